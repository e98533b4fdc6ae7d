//! Self-check suite behind `pdpolar verify`.
//!
//! Each check exercises an invariant on fixed or seeded random inputs. The
//! set-algebra check compares against a per-index membership evaluation
//! that never touches [`IndexSet`] operations.

use crate::ber::{self, lower_bound_from_sum, upper_bound_from_sum};
use crate::channel::{apply_degrading, base_params, ChannelModel, CloningTable, DegradingMapSpec};
use crate::codesets::{build_partition, check_identities, CodeSetPartition};
use crate::config::{GeometryMode, McConfig};
use crate::indexset::IndexSet;
use crate::pipeline::{analyze_cell, CellSettings};
use crate::polarize::{classify_good, polarize_exact, CodeGeometry};
use crate::rates::{holevo_proxies, rate_degr, rate_pd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail: detail.into(),
    }
}

pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        degrading_invariants(),
        polarization_oracle(),
        classification_partition(),
        set_algebra_oracle(2_000, 0x5eed),
        rate_invariants(500, 0xface),
        conjugation_equivalence(),
        ber_bounds(),
        genie_oracle(),
    ]
}

fn degrading_invariants() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let eps: f64 = rng.gen();
        let d1: f64 = rng.gen();
        let d2: f64 = rng.gen();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let model = ChannelModel::erasure(eps, DegradingMapSpec::parametric(lo).unwrap()).unwrap();
        let b = base_params(&model).unwrap();
        if b.z_phase_eprime > b.z_phase_e {
            return outcome(
                "degrading",
                false,
                format!("z'={} > z={}", b.z_phase_eprime, b.z_phase_e),
            );
        }
        let a = apply_degrading(eps, &DegradingMapSpec::parametric(lo).unwrap());
        let c = apply_degrading(eps, &DegradingMapSpec::parametric(hi).unwrap());
        if c > a {
            return outcome("degrading", false, format!("not monotone at eps={eps}"));
        }
    }
    outcome("degrading", true, "1000 draws")
}

fn polarization_oracle() -> CheckOutcome {
    let g2 = CodeGeometry::new(2, 0.25).unwrap();
    if polarize_exact(0.5, g2).values() != [0.9375, 0.5625, 0.4375, 0.0625] {
        return outcome("polarization", false, "k=2 hand values differ");
    }
    let mut worst = 0.0f64;
    for step in 0..=10 {
        let base = step as f64 / 10.0;
        for k in 1..=12 {
            let t = polarize_exact(base, CodeGeometry::new(k, 0.25).unwrap());
            let mean = t.values().iter().sum::<f64>() / t.n() as f64;
            worst = worst.max((mean - base).abs());
        }
    }
    outcome(
        "polarization",
        worst <= 1e-9,
        format!("max mean drift {worst:.3e}"),
    )
}

fn classification_partition() -> CheckOutcome {
    let g = CodeGeometry::new(10, 0.3).unwrap();
    let mut prev = usize::MAX;
    for step in 0..=20 {
        let base = step as f64 / 20.0;
        let good = classify_good(&polarize_exact(base, g));
        let bad = good.complement();
        if good.len() + bad.len() != g.n() || !good.is_disjoint(&bad) {
            return outcome(
                "classification",
                false,
                format!("partition broken at {base}"),
            );
        }
        if good.len() > prev {
            return outcome("classification", false, format!("|G| grew at base {base}"));
        }
        prev = good.len();
    }
    outcome("classification", true, "k=10, 21 bases")
}

/// Random good sets with `G_phase_E ⊆ G_phase_E'`.
pub fn random_triple(rng: &mut impl Rng, n: usize) -> (Vec<bool>, Vec<bool>, Vec<bool>) {
    let pa = rng.gen::<f64>();
    let pe = rng.gen::<f64>();
    let pp = rng.gen::<f64>();
    let amp: Vec<bool> = (0..n).map(|_| rng.gen_bool(pa)).collect();
    let ph_e: Vec<bool> = (0..n).map(|_| rng.gen_bool(pe)).collect();
    let ph_ep: Vec<bool> = ph_e.iter().map(|&e| e || rng.gen_bool(pp)).collect();
    (amp, ph_e, ph_ep)
}

fn to_set(bits: &[bool]) -> IndexSet {
    IndexSet::from_predicate(bits.len(), |i| bits[i])
}

/// Membership of index `i` in each derived set, evaluated from the three
/// input flags alone.
#[derive(Debug, PartialEq, Eq)]
struct Membership {
    p1: bool,
    p2: bool,
    p1p: bool,
    p2p: bool,
    degr: bool,
    pd: bool,
    b: bool,
}

fn membership(amp: bool, e: bool, ep: bool) -> Membership {
    Membership {
        p1: amp && !e,
        p2: !amp && e,
        p1p: amp && !e && ep,
        p2p: false,
        degr: amp && e,
        pd: amp && ep,
        b: !amp && !e,
    }
}

fn agrees(p: &CodeSetPartition, amp: &[bool], e: &[bool], ep: &[bool]) -> bool {
    (0..p.n()).all(|i| {
        let m = membership(amp[i], e[i], ep[i]);
        m == Membership {
            p1: p.p1().contains(i),
            p2: p.p2().contains(i),
            p1p: p.p1_prime().contains(i),
            p2p: p.p2_prime().contains(i),
            degr: p.s_in_degr().contains(i),
            pd: p.s_in_pd().contains(i),
            b: p.b_both().contains(i),
        }
    })
}

fn set_algebra_oracle(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let n = rng.gen_range(1..=64);
        let (amp, e, ep) = random_triple(&mut rng, n);
        let p = match build_partition(&to_set(&amp), &to_set(&e), &to_set(&ep), n) {
            Ok(p) => p,
            Err(err) => return outcome("set_algebra", false, format!("trial {t}: {err}")),
        };
        if !agrees(&p, &amp, &e, &ep) {
            return outcome(
                "set_algebra",
                false,
                format!("trial {t}: membership mismatch"),
            );
        }
        let report = check_identities(&p);
        let failed = report.failures().next().map(|c| c.name);
        if let Some(name) = failed {
            return outcome("set_algebra", false, format!("trial {t}: {name}"));
        }
    }
    outcome(
        "set_algebra",
        true,
        format!("{trials} random partitions, n <= 64"),
    )
}

fn rate_invariants(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        // power-of-two n keeps every |S|/n exact
        let n = 1usize << rng.gen_range(0..=6);
        let (amp, e, ep) = random_triple(&mut rng, n);
        let p = build_partition(&to_set(&amp), &to_set(&e), &to_set(&ep), n).unwrap();
        let (degr, pd) = (rate_degr(&p), rate_pd(&p));
        let chi = holevo_proxies(&p);
        let gain = p.delta_count() as f64 / n as f64;
        let ok = pd == degr + gain
            && (p.delta_count() == 0) == (pd == degr)
            && chi.chi_aeprime <= chi.chi_ae
            && [degr, pd, chi.chi_ab, chi.chi_ae, chi.chi_aeprime]
                .iter()
                .all(|v| (0.0..=1.0).contains(v));
        if !ok {
            return outcome("rates", false, format!("trial {t}"));
        }
    }
    outcome("rates", true, format!("{trials} random partitions"))
}

fn default_settings() -> CellSettings {
    CellSettings {
        beta: 0.3,
        mode: GeometryMode::Exact,
        eta: 0.5,
        mc: McConfig {
            enabled: false,
            samples: ber::GENIE_SAMPLE_FLOOR,
            seed: None,
        },
        timing: false,
        rate_targets: vec![],
    }
}

fn conjugation_equivalence() -> CheckOutcome {
    let conj = DegradingMapSpec::conjugation();
    let models = [
        ChannelModel::erasure(0.5, conj).unwrap(),
        ChannelModel::pauli([0.85, 0.05, 0.05, 0.05], conj).unwrap(),
        ChannelModel::cloning(3, CloningTable::illustrative(), conj).unwrap(),
    ];
    let settings = default_settings();
    for m in &models {
        match analyze_cell(m, 10, &settings) {
            Ok(cell) if cell.row.delta == 0 && cell.row.rq_pd == cell.row.rq_degr => {}
            Ok(_) => {
                return outcome(
                    "conjugation",
                    false,
                    format!("{} gained rate", m.family.name()),
                )
            }
            Err(e) => return outcome("conjugation", false, e.to_string()),
        }
    }
    outcome("conjugation", true, "erasure, pauli, cloning at k=10")
}

fn ber_bounds() -> CheckOutcome {
    if (lower_bound_from_sum(0.36) - 0.1).abs() > 1e-12 {
        return outcome("ber_bounds", false, "lower(0.36) != 0.1");
    }
    match ber::ber_upper(&[0.04, 0.05], 0.1) {
        Ok(v) if (v - 0.35).abs() <= 1e-12 => {}
        other => return outcome("ber_bounds", false, format!("upper = {other:?}")),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let s: f64 = rng.gen_range(-1.0..3.0);
        let (lo, hi) = (lower_bound_from_sum(s), upper_bound_from_sum(s));
        if !(0.0..=0.5).contains(&lo) || !(0.0..=0.5).contains(&hi) {
            return outcome("ber_bounds", false, format!("out of range at S={s}"));
        }
    }
    outcome("ber_bounds", true, "spot values and 10^4 draws")
}

fn genie_oracle() -> CheckOutcome {
    let t = polarize_exact(0.5, CodeGeometry::new(2, 0.25).unwrap());
    let samples = 100_000;
    let est = match ber::mc_genie_sc(&t, &IndexSet::from_indices(4, [3]), samples, 2024) {
        Ok(v) => v,
        Err(e) => return outcome("genie", false, e.to_string()),
    };
    let p = 0.0625;
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    outcome(
        "genie",
        (est - p).abs() <= 3.0 * sigma,
        format!("estimate {est} vs {p} (3σ = {:.2e})", 3.0 * sigma),
    )
}
