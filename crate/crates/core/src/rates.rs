//! Finite-n rate estimates and Holevo-information proxies.
//!
//! Every asymptotic `lim (1/n) |S|` quantity is reported as the plain
//! fraction `|S| / n` at the configured block length.

use crate::codesets::CodeSetPartition;

fn frac(count: usize, n: usize) -> f64 {
    count as f64 / n as f64
}

/// Degradable-channel rate `|S_in_degr| / n`.
pub fn rate_degr(p: &CodeSetPartition) -> f64 {
    frac(p.s_in_degr().len(), p.n())
}

/// PD rate `|S_in_pd| / n = (|S_in_degr| + Δ) / n`.
pub fn rate_pd(p: &CodeSetPartition) -> f64 {
    frac(p.s_in_pd().len(), p.n())
}

/// Entanglement-consumption fraction `|B| / n`.
pub fn ent_consumption(p: &CodeSetPartition) -> f64 {
    frac(p.b_both().len(), p.n())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoProxies {
    /// `|G_amp ∪ P2'| / n`
    pub chi_ab: f64,
    /// `(|P1| + |P2|) / n`
    pub chi_ae: f64,
    /// `(|P1\P1'| + |P2\P2'|) / n`
    pub chi_aeprime: f64,
    /// `|P1\P1'| / n`, the form left once the `P2` terms vanish
    pub chi_aeprime_p1_only: f64,
}

pub fn holevo_proxies(p: &CodeSetPartition) -> HolevoProxies {
    let n = p.n();
    let f1 = p.p1().difference(p.p1_prime()).len();
    let f2 = p.p2().difference(p.p2_prime()).len();
    HolevoProxies {
        chi_ab: frac(p.g_amp().union(p.p2_prime()).len(), n),
        chi_ae: frac(p.p1().len() + p.p2().len(), n),
        chi_aeprime: frac(f1 + f2, n),
        chi_aeprime_p1_only: frac(f1, n),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub n: usize,
    pub rq_degr: f64,
    pub rq_pd: f64,
    pub chi_ab: f64,
    pub chi_ae: f64,
    pub chi_aeprime: f64,
    pub chi_aeprime_p1_only: f64,
    pub ent_consumption: f64,
    pub unpolarized_fraction: f64,
}

pub fn rate_report(p: &CodeSetPartition, unpolarized_fraction: f64) -> RateReport {
    let chi = holevo_proxies(p);
    RateReport {
        n: p.n(),
        rq_degr: rate_degr(p),
        rq_pd: rate_pd(p),
        chi_ab: chi.chi_ab,
        chi_ae: chi.chi_ae,
        chi_aeprime: chi.chi_aeprime,
        chi_aeprime_p1_only: chi.chi_aeprime_p1_only,
        ent_consumption: ent_consumption(p),
        unpolarized_fraction,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityIdentity {
    /// `(|G_amp| - |P1\P1'|) / n`
    pub amp_form: f64,
    /// `|rq_pd - amp_form|`
    pub residual: f64,
    /// True when `P2\P2'` and `P2'` are both empty, so the residual must be 0.
    pub forced_zero: bool,
}

impl CapacityIdentity {
    pub fn holds(&self) -> bool {
        !self.forced_zero || self.residual == 0.0
    }
}

pub fn rate_capacity_identity(report: &RateReport, p: &CodeSetPartition) -> CapacityIdentity {
    let f1 = p.p1().difference(p.p1_prime()).len();
    let amp_form = frac(p.g_amp().len() - f1, p.n());
    let forced_zero = p.p2().difference(p.p2_prime()).is_empty() && p.p2_prime().is_empty();
    CapacityIdentity {
        amp_form,
        residual: (report.rq_pd - amp_form).abs(),
        forced_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codesets::build_partition;
    use crate::indexset::IndexSet;

    fn set(n: usize, idx: &[usize]) -> IndexSet {
        IndexSet::from_indices(n, idx.iter().copied())
    }

    fn four() -> CodeSetPartition {
        build_partition(&set(4, &[0, 1, 2]), &set(4, &[0]), &set(4, &[0, 1]), 4).unwrap()
    }

    #[test]
    fn four_index_rates() {
        let p = four();
        assert_eq!(rate_degr(&p), 0.25);
        assert_eq!(rate_pd(&p), 0.5);
        assert_eq!(ent_consumption(&p), 0.25);
        let chi = holevo_proxies(&p);
        assert_eq!((chi.chi_ab, chi.chi_ae, chi.chi_aeprime), (0.75, 0.5, 0.25));
        assert_eq!(chi.chi_aeprime_p1_only, 0.25);

        let report = rate_report(&p, 0.0);
        let id = rate_capacity_identity(&report, &p);
        assert_eq!(id.amp_form, 0.5);
        assert_eq!(id.residual, 0.0);
        assert!(id.forced_zero && id.holds());
    }

    #[test]
    fn extreme_channels() {
        let full = IndexSet::full(8);
        let empty = IndexSet::empty(8);
        let perfect = build_partition(&full, &full, &full, 8).unwrap();
        assert_eq!(rate_degr(&perfect), 1.0);
        assert_eq!(rate_pd(&perfect), 1.0);
        let chi = holevo_proxies(&perfect);
        assert_eq!((chi.chi_ab, chi.chi_ae, chi.chi_aeprime), (1.0, 0.0, 0.0));
        let r = rate_report(&perfect, 0.0);
        assert_eq!(rate_capacity_identity(&r, &perfect).residual, 0.0);

        let useless = build_partition(&empty, &empty, &empty, 8).unwrap();
        assert_eq!(rate_degr(&useless), 0.0);
        assert_eq!(ent_consumption(&useless), 1.0);
    }

    #[test]
    fn conjugation_rates_match() {
        let g_amp = set(8, &[0, 1, 4, 6]);
        let g_ph = set(8, &[1, 2, 6]);
        let p = build_partition(&g_amp, &g_ph, &g_ph, 8).unwrap();
        assert_eq!(rate_pd(&p), rate_degr(&p));
        let chi = holevo_proxies(&p);
        assert_eq!(chi.chi_aeprime, chi.chi_ae);
    }

    #[test]
    fn eight_index_arithmetic() {
        // |S_degr| = 3, |P1'| = 1
        let p = build_partition(
            &set(8, &[0, 1, 2, 3, 4]),
            &set(8, &[0, 1, 2]),
            &set(8, &[0, 1, 2, 3]),
            8,
        )
        .unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.delta_count(), 1);
        assert_eq!(rate_pd(&p), 0.5);
        assert_eq!(rate_pd(&p), rate_degr(&p) + 1.0 / 8.0);
    }

    #[test]
    fn p2_nonempty_residual_is_reported() {
        let p = build_partition(&set(4, &[0]), &set(4, &[0, 1]), &set(4, &[0, 1]), 4).unwrap();
        let report = rate_report(&p, 0.0);
        let id = rate_capacity_identity(&report, &p);
        assert!(!id.forced_zero);
        assert!(id.holds());
    }
}
