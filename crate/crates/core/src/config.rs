//! JSON run configuration.
//!
//! ```json
//! {
//!   "channel": {"family": "erasure", "epsilon": 0.5,
//!               "degrading": {"kind": "parametric", "delta": 0.4}},
//!   "geometry": {"k": 10, "beta": 0.3},
//!   "eta": 0.5,
//!   "mc": {"enabled": true, "samples": 10000, "seed": 7},
//!   "sweep": {"k_list": [5, 10], "param_grid": [{"epsilon": 0.25}, {"epsilon": 0.5}]},
//!   "output": "out"
//! }
//! ```
//!
//! Grid entries are merged over the top-level `channel` object, so they only
//! need to name the fields that change. An entry with a different `family`
//! replaces the base object entirely.

use crate::channel::{ChannelError, ChannelFamily, ChannelModel, CloningTable, DegradingMapSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Largest `k` accepted anywhere in a config (`n = 2^24`).
pub const K_GUARD: u32 = 24;
/// Largest `k` for Monte Carlo density evolution tables.
pub const MC_K_GUARD: u32 = 16;
pub const DEFAULT_K_LIST: [u32; 4] = [5, 10, 15, 20];
pub const DEFAULT_RATE_TARGETS: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: parse error at line {line}, column {column}: {msg}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{field}: {msg}")]
    Range { field: String, msg: String },
    #[error("{0}")]
    Io(String),
}

impl ConfigError {
    fn range(field: impl Into<String>, msg: impl Into<String>) -> Self {
        ConfigError::Range {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDegrading {
    kind: crate::channel::DegradingKind,
    #[serde(default)]
    delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum RawChannel {
    Erasure {
        epsilon: f64,
        #[serde(default)]
        degrading: Option<RawDegrading>,
    },
    Pauli {
        probs: [f64; 4],
        #[serde(default)]
        degrading: Option<RawDegrading>,
    },
    Cloning {
        n: u32,
        #[serde(default)]
        table: Option<PathBuf>,
        #[serde(default)]
        degrading: Option<RawDegrading>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    k: u32,
    beta: f64,
    #[serde(default)]
    mode: GeometryMode,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    #[serde(default)]
    enabled: bool,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    k_list: Option<Vec<u32>>,
    #[serde(default)]
    param_grid: Vec<Value>,
    #[serde(default)]
    rate_targets: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawOutput {
    Dir(PathBuf),
    Full {
        dir: PathBuf,
        #[serde(default)]
        timing: bool,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    channel: RawChannel,
    geometry: RawGeometry,
    eta: f64,
    #[serde(default)]
    mc: Option<RawMc>,
    #[serde(default)]
    sweep: Option<RawSweep>,
    output: RawOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryMode {
    /// Exact erasure recursion.
    #[default]
    Exact,
    /// Monte Carlo density evolution, seeded from `mc`.
    Mc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub k: u32,
    pub beta: f64,
    pub mode: GeometryMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub enabled: bool,
    pub samples: usize,
    /// Required whenever Monte Carlo is used; never generated.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_list: Vec<u32>,
    pub grid: Vec<ChannelModel>,
    pub rate_targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Record wall time per row; off by default so output is reproducible.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub channel: ChannelModel,
    pub geometry: GeometryConfig,
    pub eta: f64,
    pub mc: McConfig,
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, &path.display().to_string(), base_dir)
}

/// Parses and validates a config. Relative cloning-table paths resolve
/// against `base_dir`.
pub fn parse_config(text: &str, origin: &str, base_dir: &Path) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;

    let channel = build_channel(&raw.channel, "channel", base_dir)?;

    let beta = raw.geometry.beta;
    if !(beta > 0.0 && beta < 0.5) {
        return Err(ConfigError::range(
            "geometry.beta",
            "beta out of range (0, 0.5)",
        ));
    }
    check_k(raw.geometry.k, "geometry.k")?;
    let geometry = GeometryConfig {
        k: raw.geometry.k,
        beta,
        mode: raw.geometry.mode,
    };

    if !(raw.eta > 0.0 && raw.eta < 1.0) {
        return Err(ConfigError::range("eta", "eta out of range (0, 1)"));
    }

    let mc = match raw.mc {
        None => McConfig {
            enabled: false,
            samples: crate::ber::GENIE_SAMPLE_FLOOR,
            seed: None,
        },
        Some(m) => McConfig {
            enabled: m.enabled,
            samples: m.samples.unwrap_or(crate::ber::GENIE_SAMPLE_FLOOR),
            seed: m.seed,
        },
    };
    if mc.enabled {
        if mc.seed.is_none() {
            return Err(ConfigError::range(
                "mc.seed",
                "seed is required when mc.enabled",
            ));
        }
        if mc.samples < crate::ber::GENIE_SAMPLE_FLOOR {
            return Err(ConfigError::range(
                "mc.samples",
                format!("samples must be >= {}", crate::ber::GENIE_SAMPLE_FLOOR),
            ));
        }
    }
    if geometry.mode == GeometryMode::Mc {
        if mc.seed.is_none() {
            return Err(ConfigError::range(
                "mc.seed",
                "seed is required for geometry.mode = mc",
            ));
        }
        if mc.samples < crate::polarize::MC_SAMPLE_FLOOR {
            return Err(ConfigError::range(
                "mc.samples",
                format!("samples must be >= {}", crate::polarize::MC_SAMPLE_FLOOR),
            ));
        }
    }

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let k_list = s.k_list.unwrap_or_else(|| DEFAULT_K_LIST.to_vec());
            for (i, &k) in k_list.iter().enumerate() {
                check_k(k, &format!("sweep.k_list[{i}]"))?;
            }
            let base = serde_json::to_value(&raw.channel).expect("channel serializes");
            let mut grid = Vec::with_capacity(s.param_grid.len());
            for (i, entry) in s.param_grid.iter().enumerate() {
                let field = format!("sweep.param_grid[{i}]");
                let merged = merge_channel(&base, entry)
                    .ok_or_else(|| ConfigError::range(&field, "grid entry must be an object"))?;
                let raw_entry: RawChannel = serde_json::from_value(merged)
                    .map_err(|e| ConfigError::range(&field, e.to_string()))?;
                grid.push(build_channel(&raw_entry, &field, base_dir)?);
            }
            let rate_targets = s
                .rate_targets
                .unwrap_or_else(|| DEFAULT_RATE_TARGETS.to_vec());
            for (i, &r) in rate_targets.iter().enumerate() {
                if !(0.0..=1.0).contains(&r) {
                    return Err(ConfigError::range(
                        format!("sweep.rate_targets[{i}]"),
                        "rate target out of range [0, 1]",
                    ));
                }
            }
            let max_k = k_list.iter().copied().max().unwrap_or(geometry.k);
            if geometry.mode == GeometryMode::Mc && max_k > MC_K_GUARD {
                return Err(ConfigError::range(
                    "sweep.k_list",
                    format!("k exceeds mc guard {MC_K_GUARD}"),
                ));
            }
            Some(SweepConfig {
                k_list,
                grid,
                rate_targets,
            })
        }
    };
    if geometry.mode == GeometryMode::Mc && geometry.k > MC_K_GUARD {
        return Err(ConfigError::range(
            "geometry.k",
            format!("k exceeds mc guard {MC_K_GUARD}"),
        ));
    }

    let output = match raw.output {
        RawOutput::Dir(dir) => OutputConfig { dir, timing: false },
        RawOutput::Full { dir, timing } => OutputConfig { dir, timing },
    };

    Ok(RunConfig {
        channel,
        geometry,
        eta: raw.eta,
        mc,
        sweep,
        output,
    })
}

fn check_k(k: u32, field: &str) -> Result<(), ConfigError> {
    if k < 1 {
        return Err(ConfigError::range(field, "k must be >= 1"));
    }
    if k > K_GUARD {
        return Err(ConfigError::range(
            field,
            format!("k exceeds guard {K_GUARD}"),
        ));
    }
    Ok(())
}

fn merge_channel(base: &Value, entry: &Value) -> Option<Value> {
    let entry = entry.as_object()?;
    let base = base.as_object()?;
    let same_family = match entry.get("family") {
        None => true,
        Some(f) => Some(f) == base.get("family"),
    };
    let mut merged = if same_family {
        base.clone()
    } else {
        serde_json::Map::new()
    };
    for (k, v) in entry {
        merged.insert(k.clone(), v.clone());
    }
    Some(Value::Object(merged))
}

fn build_channel(
    raw: &RawChannel,
    field: &str,
    base_dir: &Path,
) -> Result<ChannelModel, ConfigError> {
    let to_cfg = |e: ChannelError| ConfigError::range(field, e.to_string());
    let degrading = |d: &Option<RawDegrading>| -> Result<DegradingMapSpec, ConfigError> {
        match d {
            None => Ok(DegradingMapSpec::conjugation()),
            Some(d) => match d.kind {
                crate::channel::DegradingKind::Conjugation => Ok(DegradingMapSpec::conjugation()),
                crate::channel::DegradingKind::Parametric => {
                    let delta = d.delta.ok_or_else(|| {
                        ConfigError::range(
                            format!("{field}.degrading.delta"),
                            "delta is required for a parametric map",
                        )
                    })?;
                    DegradingMapSpec::parametric(delta).map_err(|e| {
                        ConfigError::range(format!("{field}.degrading.delta"), e.to_string())
                    })
                }
            },
        }
    };
    match raw {
        RawChannel::Erasure {
            epsilon,
            degrading: d,
        } => ChannelModel::erasure(*epsilon, degrading(d)?).map_err(to_cfg),
        RawChannel::Pauli {
            probs,
            degrading: d,
        } => ChannelModel::pauli(*probs, degrading(d)?).map_err(to_cfg),
        RawChannel::Cloning {
            n,
            table,
            degrading: d,
        } => {
            let table = match table {
                None => CloningTable::illustrative(),
                Some(p) => {
                    let p = if p.is_relative() {
                        base_dir.join(p)
                    } else {
                        p.clone()
                    };
                    CloningTable::load(&p)
                        .map_err(|e| ConfigError::range(format!("{field}.table"), e.to_string()))?
                }
            };
            // the table entry is checked when base parameters are computed
            ChannelModel::new(ChannelFamily::Cloning { clones: *n, table }, degrading(d)?)
                .map_err(to_cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_config(text, "test.json", Path::new("."))
    }

    const MINIMAL: &str = r#"{
        "channel": {"family": "erasure", "epsilon": 0.5, "degrading": {"kind": "conjugation"}},
        "geometry": {"k": 10, "beta": 0.3},
        "eta": 0.5,
        "output": "out"
    }"#;

    #[test]
    fn minimal_config() {
        let c = parse(MINIMAL).unwrap();
        assert!(c.sweep.is_none());
        assert_eq!(c.geometry.k, 10);
        assert!(!c.mc.enabled);
        assert_eq!(c.output.dir, PathBuf::from("out"));
        assert!(!c.output.timing);
    }

    #[test]
    fn beta_rejected() {
        let err = parse(&MINIMAL.replace("0.3", "0.7")).unwrap_err();
        assert!(
            err.to_string().contains("beta out of range (0, 0.5)"),
            "{err}"
        );
        assert!(err.to_string().starts_with("geometry.beta"));
    }

    #[test]
    fn k_guard() {
        let err = parse(&MINIMAL.replace("\"k\": 10", "\"k\": 30")).unwrap_err();
        assert!(err.to_string().contains("k exceeds guard 24"), "{err}");
    }

    #[test]
    fn parse_error_has_position() {
        let err = parse("{\n  \"channel\": ,\n}").unwrap_err();
        match err {
            ConfigError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn mc_requires_seed() {
        let text = MINIMAL.replace(
            "\"eta\": 0.5,",
            "\"eta\": 0.5, \"mc\": {\"enabled\": true},",
        );
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().starts_with("mc.seed"), "{err}");
    }

    #[test]
    fn grid_merges_over_channel() {
        let text = MINIMAL.replace(
            "\"output\"",
            r#""sweep": {"k_list": [5, 10], "param_grid": [{"epsilon": 0.25}, {"family": "pauli", "probs": [0.9, 0.1, 0, 0]}]}, "output""#,
        );
        let c = parse(&text).unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.k_list, vec![5, 10]);
        assert_eq!(s.grid.len(), 2);
        assert_eq!(s.rate_targets, DEFAULT_RATE_TARGETS.to_vec());
        assert!(matches!(s.grid[0].family, ChannelFamily::Erasure { epsilon } if epsilon == 0.25));
        assert!(matches!(s.grid[1].family, ChannelFamily::Pauli { .. }));
    }

    #[test]
    fn grid_errors_name_the_entry() {
        let text = MINIMAL.replace(
            "\"output\"",
            r#""sweep": {"param_grid": [{"epsilon": 0.25}, {"epsilon": 2.0}]}, "output""#,
        );
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().starts_with("sweep.param_grid[1]"), "{err}");
    }

    #[test]
    fn parametric_needs_delta() {
        let text = MINIMAL.replace("{\"kind\": \"conjugation\"}", "{\"kind\": \"parametric\"}");
        let err = parse(&text).unwrap_err();
        assert!(
            err.to_string().starts_with("channel.degrading.delta"),
            "{err}"
        );
    }

    #[test]
    fn eta_range() {
        let err = parse(&MINIMAL.replace("\"eta\": 0.5", "\"eta\": 1.0")).unwrap_err();
        assert!(err.to_string().starts_with("eta"));
    }
}
