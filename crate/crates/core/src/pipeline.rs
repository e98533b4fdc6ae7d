//! Orchestration: channel -> polarize -> codesets -> rates -> ber.

use crate::ber::{self, BerError, McEstimate};
use crate::channel::{
    base_params, BasePairs, ChannelError, ChannelFamily, ChannelModel, DegradingKind,
};
use crate::codesets::{
    build_partition, check_identities, CodeSetError, CodeSetPartition, IdentityReport,
};
use crate::config::{GeometryMode, McConfig, RunConfig};
use crate::indexset::IndexSet;
use crate::polarize::{
    classify_good, polarize_exact, polarize_mc_with, unpolarized_band, BaseShape, CodeGeometry,
    PolarizeError, SyntheticTable,
};
use crate::rates::{rate_report, RateReport};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("channel_param: {0}")]
    Channel(#[from] ChannelError),
    #[error("polarize: {0}")]
    Polarize(#[from] PolarizeError),
    #[error("codesets: {0}")]
    CodeSets(#[from] CodeSetError),
    #[error("codesets: identity check failed: {0}")]
    Identity(String),
    #[error("ber: {0}")]
    Ber(#[from] BerError),
    #[error("a Monte Carlo seed is required")]
    MissingSeed,
    #[error("empty sweep")]
    EmptySweep,
    #[error("config has no sweep section")]
    MissingSweep,
    #[error("analyze does not take a sweep section; use the sweep command")]
    UnexpectedSweep,
    #[error("sweep cell {index} ({label}, k={k}): {source}")]
    Cell {
        index: usize,
        label: String,
        k: u32,
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    /// 2 for problems with the config itself, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::EmptySweep
            | PipelineError::MissingSeed
            | PipelineError::MissingSweep
            | PipelineError::UnexpectedSweep => 2,
            _ => 1,
        }
    }
}

/// Degrading-map column value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMap {
    Conjugation,
    Parametric(f64),
}

/// One flat record per (channel parameters, k).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub family: &'static str,
    pub param1: f64,
    pub param2: f64,
    pub delta_map: DeltaMap,
    pub k: u32,
    pub n: usize,
    pub beta: f64,
    pub eta: f64,
    pub size_g_amp: usize,
    pub size_g_phase_e: usize,
    pub size_g_phase_ep: usize,
    pub size_p1: usize,
    pub size_p2: usize,
    pub size_p1p: usize,
    pub size_p2p: usize,
    pub size_sin_degr: usize,
    pub size_sin_pd: usize,
    pub size_b_both: usize,
    pub delta: usize,
    pub rq_degr: f64,
    pub rq_pd: f64,
    pub chi_ab: f64,
    pub chi_ae: f64,
    pub chi_aep: f64,
    pub ent_consumption: f64,
    pub unpolarized: f64,
    pub ber_lower: f64,
    pub ber_upper: f64,
    pub ber_mc: Option<f64>,
    pub ms: Option<u128>,
}

/// One point of a BER-versus-rate curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub family: &'static str,
    pub param1: f64,
    pub param2: f64,
    pub delta_map: DeltaMap,
    pub k: u32,
    pub n: usize,
    pub rate_target: f64,
    pub info_size: usize,
    pub rate: f64,
    pub ber_lower: f64,
    pub ber_upper: f64,
    pub ber_mc: Option<f64>,
}

/// Everything computed for one cell.
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub row: ResultRow,
    pub base: BasePairs,
    pub partition: CodeSetPartition,
    pub rates: RateReport,
    pub identities: IdentityReport,
    pub bounds_crossed: bool,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Concurrent,
}

/// Per-cell settings shared by analyze and sweep.
#[derive(Debug, Clone)]
pub struct CellSettings {
    pub beta: f64,
    pub mode: GeometryMode,
    pub eta: f64,
    pub mc: McConfig,
    pub timing: bool,
    pub rate_targets: Vec<f64>,
}

impl CellSettings {
    pub fn from_config(config: &RunConfig) -> Self {
        Self {
            beta: config.geometry.beta,
            mode: config.geometry.mode,
            eta: config.eta,
            mc: config.mc.clone(),
            timing: config.output.timing,
            rate_targets: config
                .sweep
                .as_ref()
                .map(|s| s.rate_targets.clone())
                .unwrap_or_default(),
        }
    }
}

/// `(param1, param2)` CSV columns for a channel.
pub fn channel_columns(model: &ChannelModel, base: &BasePairs) -> (f64, f64) {
    match &model.family {
        ChannelFamily::Erasure { epsilon } => (*epsilon, *epsilon),
        ChannelFamily::Pauli { probs } => ChannelModel::pauli_flips(probs),
        ChannelFamily::Cloning { clones, .. } => (f64::from(*clones), base.z_amp),
    }
}

fn delta_map(model: &ChannelModel) -> DeltaMap {
    match model.degrading.kind() {
        DegradingKind::Conjugation => DeltaMap::Conjugation,
        DegradingKind::Parametric => DeltaMap::Parametric(model.degrading.delta()),
    }
}

/// Short human label for error messages.
pub fn channel_label(model: &ChannelModel) -> String {
    match &model.family {
        ChannelFamily::Erasure { epsilon } => format!("erasure epsilon={epsilon}"),
        ChannelFamily::Pauli { probs } => format!("pauli p={probs:?}"),
        ChannelFamily::Cloning { clones, .. } => format!("cloning N={clones}"),
    }
}

fn build_tables(
    base: &BasePairs,
    family: &ChannelFamily,
    geometry: CodeGeometry,
    settings: &CellSettings,
) -> Result<[SyntheticTable; 3], PipelineError> {
    match settings.mode {
        GeometryMode::Exact => Ok([
            polarize_exact(base.z_amp, geometry),
            polarize_exact(base.z_phase_e, geometry),
            polarize_exact(base.z_phase_eprime, geometry),
        ]),
        GeometryMode::Mc => {
            let shape = match family {
                ChannelFamily::Pauli { .. } => BaseShape::BinarySymmetric,
                _ => BaseShape::Erasure,
            };
            let seed = settings.mc.seed.ok_or(PipelineError::MissingSeed)?;
            let samples = settings.mc.samples;
            // same seed for every view: common random numbers keep estimates coupled
            let amp = polarize_mc_with(base.z_amp, shape, geometry, samples, seed)?;
            let phase_e = polarize_mc_with(base.z_phase_e, shape, geometry, samples, seed)?;
            let phase_ep = polarize_mc_with(base.z_phase_eprime, shape, geometry, samples, seed)?
                .entrywise_min(&phase_e);
            Ok([amp, phase_e, phase_ep])
        }
    }
}

/// Runs the full pipeline for one channel at one `k`.
pub fn analyze_cell(
    model: &ChannelModel,
    k: u32,
    settings: &CellSettings,
) -> Result<CellOutput, PipelineError> {
    let start = Instant::now();
    let geometry = CodeGeometry::new(k, settings.beta)?;
    let n = geometry.n();
    let base = base_params(model)?;
    let [amp, phase_e, phase_ep] = build_tables(&base, &model.family, geometry, settings)?;

    let g_amp = classify_good(&amp);
    let g_phase_e = classify_good(&phase_e);
    let g_phase_ep = classify_good(&phase_ep);
    let partition = build_partition(&g_amp, &g_phase_e, &g_phase_ep, n)?;
    let identities = check_identities(&partition);
    if !identities.all_asserted_hold() {
        let names: Vec<&str> = identities.failures().map(|c| c.name).collect();
        return Err(PipelineError::Identity(names.join(", ")));
    }

    let band = unpolarized_band(&amp)
        .union(&unpolarized_band(&phase_e))
        .union(&unpolarized_band(&phase_ep));
    let rates = rate_report(&partition, band.len() as f64 / n as f64);

    // an index fails if either sub-channel fails; use the larger parameter
    let block: Vec<f64> = amp
        .values()
        .iter()
        .zip(phase_ep.values())
        .map(|(a, p)| a.max(*p))
        .collect();
    let worst_base = base.z_amp.max(base.z_phase_eprime);

    let mut bounds = ber::evaluate_bounds(&block, partition.s_in_pd(), settings.eta)?;
    let mc_seed = settings.mc.seed;
    let genie_table = if settings.mc.enabled {
        Some(polarize_exact(worst_base, geometry))
    } else {
        None
    };
    if let (Some(table), Some(seed)) = (&genie_table, mc_seed) {
        let estimate = ber::mc_genie_sc(table, partition.s_in_pd(), settings.mc.samples, seed)?;
        bounds.mc = Some(McEstimate {
            estimate,
            samples: settings.mc.samples,
            seed,
        });
    }

    let (param1, param2) = channel_columns(model, &base);
    let dmap = delta_map(model);
    let family = model.family.name();

    let curve = if settings.rate_targets.is_empty() {
        Vec::new()
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| block[a].total_cmp(&block[b]).then(a.cmp(&b)));
        let sizes: Vec<usize> = settings
            .rate_targets
            .iter()
            .map(|r| ((r * n as f64).floor() as usize).min(n))
            .collect();
        let mc_values = match (&genie_table, mc_seed) {
            (Some(table), Some(seed)) => Some(ber::mc_genie_sc_nested(
                table,
                &order,
                &sizes,
                settings.mc.samples,
                seed,
            )?),
            _ => None,
        };
        let mut points = Vec::with_capacity(sizes.len());
        for (j, (&target, &size)) in settings.rate_targets.iter().zip(&sizes).enumerate() {
            let info = IndexSet::from_indices(n, order[..size].iter().copied());
            let est = ber::evaluate_bounds(&block, &info, settings.eta)?;
            points.push(CurvePoint {
                family,
                param1,
                param2,
                delta_map: dmap,
                k,
                n,
                rate_target: target,
                info_size: size,
                rate: size as f64 / n as f64,
                ber_lower: est.lower,
                ber_upper: est.upper,
                ber_mc: mc_values.as_ref().map(|v| v[j]),
            });
        }
        points
    };

    let row = ResultRow {
        family,
        param1,
        param2,
        delta_map: dmap,
        k,
        n,
        beta: settings.beta,
        eta: settings.eta,
        size_g_amp: partition.g_amp().len(),
        size_g_phase_e: partition.g_phase_e().len(),
        size_g_phase_ep: partition.g_phase_eprime().len(),
        size_p1: partition.p1().len(),
        size_p2: partition.p2().len(),
        size_p1p: partition.p1_prime().len(),
        size_p2p: partition.p2_prime().len(),
        size_sin_degr: partition.s_in_degr().len(),
        size_sin_pd: partition.s_in_pd().len(),
        size_b_both: partition.b_both().len(),
        delta: crate::codesets::delta(&partition),
        rq_degr: rates.rq_degr,
        rq_pd: rates.rq_pd,
        chi_ab: rates.chi_ab,
        chi_ae: rates.chi_ae,
        chi_aep: rates.chi_aeprime,
        ent_consumption: rates.ent_consumption,
        unpolarized: rates.unpolarized_fraction,
        ber_lower: bounds.lower,
        ber_upper: bounds.upper,
        ber_mc: bounds.mc.as_ref().map(|m| m.estimate),
        ms: settings.timing.then(|| start.elapsed().as_millis()),
    };

    Ok(CellOutput {
        row,
        base,
        partition,
        rates,
        identities,
        bounds_crossed: bounds.crossed(),
        curve,
    })
}

pub fn run_analyze(config: &RunConfig) -> Result<CellOutput, PipelineError> {
    if config.sweep.is_some() {
        return Err(PipelineError::UnexpectedSweep);
    }
    analyze_cell(
        &config.channel,
        config.geometry.k,
        &CellSettings::from_config(config),
    )
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub curve: Vec<CurvePoint>,
}

/// Cartesian product `param_grid x k_list`, parameters outermost. Output
/// order is the grid order for both execution modes.
pub fn run_sweep(config: &RunConfig, execution: Execution) -> Result<SweepOutput, PipelineError> {
    let sweep = config.sweep.as_ref().ok_or(PipelineError::MissingSweep)?;
    if sweep.grid.is_empty() || sweep.k_list.is_empty() {
        return Err(PipelineError::EmptySweep);
    }
    let settings = CellSettings::from_config(config);
    let cells: Vec<(&ChannelModel, u32)> = sweep
        .grid
        .iter()
        .flat_map(|m| sweep.k_list.iter().map(move |&k| (m, k)))
        .collect();
    let run = |(index, (model, k)): (usize, &(&ChannelModel, u32))| {
        analyze_cell(model, *k, &settings).map_err(|e| PipelineError::Cell {
            index,
            label: channel_label(model),
            k: *k,
            source: Box::new(e),
        })
    };
    let results: Vec<Result<CellOutput, PipelineError>> = match execution {
        Execution::Serial => cells.iter().enumerate().map(run).collect(),
        Execution::Concurrent => cells.par_iter().enumerate().map(run).collect(),
    };
    let mut out = SweepOutput::default();
    for r in results {
        let cell = r?;
        out.rows.push(cell.row);
        out.curve.extend(cell.curve);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DegradingMapSpec;

    fn settings() -> CellSettings {
        CellSettings {
            beta: 0.3,
            mode: GeometryMode::Exact,
            eta: 0.5,
            mc: McConfig {
                enabled: false,
                samples: 10_000,
                seed: None,
            },
            timing: false,
            rate_targets: vec![],
        }
    }

    #[test]
    fn conjugation_cell_has_no_gain() {
        let m = ChannelModel::erasure(0.5, DegradingMapSpec::conjugation()).unwrap();
        let out = analyze_cell(&m, 10, &settings()).unwrap();
        assert_eq!(out.row.delta, 0);
        assert_eq!(out.row.rq_pd, out.row.rq_degr);
        assert_eq!(out.row.ms, None);
    }

    #[test]
    fn parametric_cell_gains() {
        // erasure has equal amplitude and phase parameters, so P1 is empty
        let m = ChannelModel::erasure(0.5, DegradingMapSpec::parametric(0.4).unwrap()).unwrap();
        let out = analyze_cell(&m, 10, &settings()).unwrap();
        assert_eq!(out.row.delta, 0);
        assert!(out.row.rq_pd >= out.row.rq_degr);

        let m = ChannelModel::pauli(
            [0.93, 0.01, 0.0, 0.06],
            DegradingMapSpec::parametric(0.5).unwrap(),
        )
        .unwrap();
        let out = analyze_cell(&m, 10, &settings()).unwrap();
        assert!(out.row.delta > 0);
        assert!(out.row.rq_pd > out.row.rq_degr);
        assert_eq!(
            out.row.rq_pd,
            out.row.rq_degr + out.row.delta as f64 / 1024.0
        );
    }

    #[test]
    fn perfect_channel_cell() {
        let m = ChannelModel::erasure(0.0, DegradingMapSpec::parametric(0.3).unwrap()).unwrap();
        let out = analyze_cell(&m, 6, &settings()).unwrap();
        assert_eq!(out.row.rq_pd, 1.0);
        assert_eq!(out.row.ber_lower, 0.0);
    }

    #[test]
    fn mc_mode_pauli_cell() {
        let mut s = settings();
        s.mode = GeometryMode::Mc;
        s.mc.seed = Some(3);
        s.mc.samples = 2000;
        let m = ChannelModel::pauli(
            [0.9, 0.04, 0.02, 0.04],
            DegradingMapSpec::parametric(0.5).unwrap(),
        )
        .unwrap();
        let out = analyze_cell(&m, 5, &s).unwrap();
        assert!(out.row.rq_pd >= out.row.rq_degr);
        assert!(out.identities.all_asserted_hold());
    }

    #[test]
    fn curve_is_nested() {
        let mut s = settings();
        s.rate_targets = vec![0.1, 0.2, 0.3];
        s.mc = McConfig {
            enabled: true,
            samples: 10_000,
            seed: Some(1),
        };
        let m = ChannelModel::erasure(0.4, DegradingMapSpec::conjugation()).unwrap();
        let out = analyze_cell(&m, 6, &s).unwrap();
        assert_eq!(out.curve.len(), 3);
        let sizes: Vec<usize> = out.curve.iter().map(|p| p.info_size).collect();
        assert_eq!(sizes, vec![6, 12, 19]);
        assert!(out
            .curve
            .windows(2)
            .all(|w| w[0].ber_lower <= w[1].ber_lower));
        assert!(out
            .curve
            .windows(2)
            .all(|w| w[0].ber_mc.unwrap() <= w[1].ber_mc.unwrap()));
    }
}
