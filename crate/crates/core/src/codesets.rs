//! Codeword-set algebra for partially degradable channels.
//!
//! Inputs are three good sets: amplitude, phase analyzed against `E`, and
//! phase analyzed against the degraded output `E'`. Everything else
//! (`P1`, `P2`, their primed subsets, the information sets and the doubly
//! bad set) is derived from them by set operations.

use crate::indexset::IndexSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeSetError {
    #[error("inconsistent PD classification: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSetPartition {
    n: usize,
    g_amp: IndexSet,
    g_phase_e: IndexSet,
    g_phase_eprime: IndexSet,
    p1: IndexSet,
    p2: IndexSet,
    p1_prime: IndexSet,
    p2_prime: IndexSet,
    s_in_degr: IndexSet,
    s_in_pd: IndexSet,
    b_both: IndexSet,
}

impl CodeSetPartition {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn g_amp(&self) -> &IndexSet {
        &self.g_amp
    }
    pub fn g_phase_e(&self) -> &IndexSet {
        &self.g_phase_e
    }
    pub fn g_phase_eprime(&self) -> &IndexSet {
        &self.g_phase_eprime
    }
    /// Amplitude-good, phase-bad (degradable analysis).
    pub fn p1(&self) -> &IndexSet {
        &self.p1
    }
    /// Amplitude-bad, phase-good (degradable analysis).
    pub fn p2(&self) -> &IndexSet {
        &self.p2
    }
    /// Members of `P1` promoted to phase-good by the `E'` analysis.
    pub fn p1_prime(&self) -> &IndexSet {
        &self.p1_prime
    }
    pub fn p2_prime(&self) -> &IndexSet {
        &self.p2_prime
    }
    pub fn s_in_degr(&self) -> &IndexSet {
        &self.s_in_degr
    }
    pub fn s_in_pd(&self) -> &IndexSet {
        &self.s_in_pd
    }
    pub fn b_both(&self) -> &IndexSet {
        &self.b_both
    }
    /// `[n] \ S_in_pd`
    pub fn s_bad(&self) -> IndexSet {
        self.s_in_pd.complement()
    }
    pub fn delta_count(&self) -> usize {
        self.p1_prime.len()
    }
    /// `m = |S_in_degr|`
    pub fn m(&self) -> usize {
        self.s_in_degr.len()
    }
}

pub fn build_partition(
    g_amp: &IndexSet,
    g_phase_e: &IndexSet,
    g_phase_eprime: &IndexSet,
    n: usize,
) -> Result<CodeSetPartition, CodeSetError> {
    for (name, set) in [
        ("G_amp", g_amp),
        ("G_phase_E", g_phase_e),
        ("G_phase_E'", g_phase_eprime),
    ] {
        if set.universe() != n {
            return Err(CodeSetError::Inconsistent(format!(
                "{name} is over [{}], expected [{n}]",
                set.universe()
            )));
        }
    }
    if !g_phase_e.is_subset(g_phase_eprime) {
        return Err(CodeSetError::Inconsistent(format!(
            "G_phase_E is not contained in G_phase_E' ({} indices lost)",
            g_phase_e.difference(g_phase_eprime).len()
        )));
    }

    let b_amp = g_amp.complement();
    let b_phase_e = g_phase_e.complement();
    let promoted = g_phase_eprime.difference(g_phase_e);

    let p1 = g_amp.intersection(&b_phase_e);
    let p2 = b_amp.intersection(g_phase_e);
    let p1_prime = p1.intersection(&promoted);
    let p2_prime = p2.intersection(&promoted);
    let s_in_degr = g_amp.intersection(g_phase_e);
    let s_in_pd = g_amp.intersection(g_phase_eprime);
    let b_both = b_amp.intersection(&b_phase_e);

    Ok(CodeSetPartition {
        n,
        g_amp: g_amp.clone(),
        g_phase_e: g_phase_e.clone(),
        g_phase_eprime: g_phase_eprime.clone(),
        p1,
        p2,
        p1_prime,
        p2_prime,
        s_in_degr,
        s_in_pd,
        b_both,
    })
}

/// `Δ = |P1| - |P1 \ P1'| = |P1'|`
pub fn delta(partition: &CodeSetPartition) -> usize {
    let via_difference = partition.p1.len() - partition.p1.difference(&partition.p1_prime).len();
    debug_assert_eq!(via_difference, partition.p1_prime.len());
    via_difference
}

/// Amplitude and phase frozen sets `(P1 \ P1', P2 \ P2')`.
pub fn frozen_sets(partition: &CodeSetPartition) -> (IndexSet, IndexSet) {
    (
        partition.p1.difference(&partition.p1_prime),
        partition.p2.difference(&partition.p2_prime),
    )
}

/// Number of non-information indices: `|P1\P1'| + |P2\P2'| + |B|`.
pub fn frozen_count(partition: &CodeSetPartition) -> usize {
    let (f1, f2) = frozen_sets(partition);
    f1.len() + f2.len() + partition.b_both.len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Asserted identities must hold for every valid partition; the rest
    /// are informational at finite `n`.
    pub asserted: bool,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub sizes: Vec<(&'static str, usize)>,
}

impl IdentityReport {
    pub fn all_asserted_hold(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| c.asserted && !c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match (c.holds, c.asserted) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "slack",
            };
            writeln!(f, "{:<24} {:<5} {}", c.name, status, c.detail)?;
        }
        let sizes: Vec<String> = self.sizes.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "sizes: {}", sizes.join(" "))
    }
}

pub fn check_identities(p: &CodeSetPartition) -> IdentityReport {
    let n = p.n;
    let b_amp = p.g_amp.complement();
    let (f1, f2) = frozen_sets(p);
    let mut checks = Vec::new();
    let mut push = |name, asserted, holds, detail: String| {
        checks.push(IdentityCheck {
            name,
            asserted,
            holds,
            detail,
        })
    };

    let primes = p.p1_prime.union(&p.p2_prime);
    push(
        "primes_disjoint",
        true,
        primes.len() == p.p1_prime.len() + p.p2_prime.len(),
        format!(
            "|P1'∪P2'|={} |P1'|+|P2'|={}",
            primes.len(),
            p.p1_prime.len() + p.p2_prime.len()
        ),
    );
    push(
        "p2_frozen_in_b_amp",
        true,
        f2.is_subset(&b_amp),
        format!("|(P2\\P2')\\B_amp|={}", f2.difference(&b_amp).len()),
    );
    let pd_or_b = p.s_in_pd.union(&p.b_both);
    push(
        "p2_frozen_isolated",
        true,
        f2.is_disjoint(&pd_or_b),
        format!("|(P2\\P2')∩(S_pd∪B)|={}", f2.intersection(&pd_or_b).len()),
    );
    push(
        "primes_in_g_amp",
        false,
        primes.is_subset(&p.g_amp),
        format!("|(P1'∪P2')\\G_amp|={}", primes.difference(&p.g_amp).len()),
    );
    let frozen = f1.union(&f2);
    push(
        "frozen_in_g_amp",
        false,
        frozen.is_subset(&p.g_amp),
        format!(
            "|((P1\\P1')∪(P2\\P2'))\\G_amp|={}",
            frozen.difference(&p.g_amp).len()
        ),
    );
    push(
        "p1_parts_in_g_amp",
        true,
        p.p1_prime.is_subset(&p.g_amp) && f1.is_subset(&p.g_amp),
        String::new(),
    );
    let covered = primes.union(&f1).union(&f2);
    let bound_lhs = p.g_amp.difference(&p.s_in_degr).len() + f2.len() + covered.complement().len();
    push(
        "cardinality_bound",
        false,
        bound_lhs <= n,
        format!("lhs={bound_lhs} n={n}"),
    );
    push(
        "bad_isolated",
        true,
        p.b_both.is_disjoint(&p.s_in_pd) && f1.is_disjoint(&pd_or_b),
        format!(
            "|B∩S_pd|={} |(P1\\P1')∩(S_pd∪B)|={}",
            p.b_both.intersection(&p.s_in_pd).len(),
            f1.intersection(&pd_or_b).len()
        ),
    );
    let pd_or_f2 = p.s_in_pd.union(&f2);
    push(
        "p1_frozen_isolated",
        true,
        f1.is_disjoint(&pd_or_f2),
        format!(
            "|(P1\\P1')∩(S_pd∪(P2\\P2'))|={}",
            f1.intersection(&pd_or_f2).len()
        ),
    );
    let pieces = [&p.p1_prime, &p.p2_prime, &f1, &f2];
    let mut pairwise = true;
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            pairwise &= pieces[a].is_disjoint(pieces[b]);
        }
    }
    pairwise &= p.s_in_pd.is_disjoint(&f1) && p.s_in_pd.is_disjoint(&f2);
    push("pieces_pairwise_disjoint", true, pairwise, String::new());

    let lhs34 = p.s_in_degr.union(&primes).union(&f1).union(&f2).len();
    let mid34 = p.s_in_pd.union(&f1).union(&f2).len();
    let tail34 = p.s_in_pd.union(&f1).len();
    push(
        "frozen_cardinality",
        true,
        lhs34 == mid34,
        format!("lhs={lhs34} rhs={mid34}"),
    );
    push(
        "frozen_cardinality_tail",
        false,
        mid34 == tail34,
        format!("|S_pd∪(P1\\P1')∪(P2\\P2')|={mid34} |S_pd∪(P1\\P1')|={tail34}"),
    );
    push(
        "pd_count",
        true,
        p.s_in_pd.len() == p.s_in_degr.len() + p.p1_prime.len()
            && p.s_in_pd == p.s_in_degr.union(&p.p1_prime),
        format!(
            "|S_pd|={} m+Δ={}",
            p.s_in_pd.len(),
            p.s_in_degr.len() + p.p1_prime.len()
        ),
    );
    push(
        "pd_plus_bad_is_n",
        true,
        p.s_in_pd.len() + p.s_bad().len() == n,
        format!("{}+{}", p.s_in_pd.len(), p.s_bad().len()),
    );

    let sizes = vec![
        ("n", n),
        ("G_amp", p.g_amp.len()),
        ("G_phase_E", p.g_phase_e.len()),
        ("G_phase_Ep", p.g_phase_eprime.len()),
        ("P1", p.p1.len()),
        ("P2", p.p2.len()),
        ("P1p", p.p1_prime.len()),
        ("P2p", p.p2_prime.len()),
        ("Sin_degr", p.s_in_degr.len()),
        ("Sin_pd", p.s_in_pd.len()),
        ("B_both", p.b_both.len()),
    ];
    IdentityReport { checks, sizes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, idx: &[usize]) -> IndexSet {
        IndexSet::from_indices(n, idx.iter().copied())
    }

    fn ids(s: &IndexSet) -> Vec<usize> {
        s.iter().collect()
    }

    fn four() -> CodeSetPartition {
        build_partition(&set(4, &[0, 1, 2]), &set(4, &[0]), &set(4, &[0, 1]), 4).unwrap()
    }

    #[test]
    fn four_index_example() {
        let p = four();
        assert_eq!(ids(p.p1()), vec![1, 2]);
        assert!(p.p2().is_empty());
        assert_eq!(ids(p.s_in_degr()), vec![0]);
        assert_eq!(ids(p.p1_prime()), vec![1]);
        assert_eq!(ids(p.s_in_pd()), vec![0, 1]);
        assert_eq!(delta(&p), 1);
        assert_eq!(ids(p.b_both()), vec![3]);
        let (f1, f2) = frozen_sets(&p);
        assert_eq!(ids(&f1), vec![2]);
        assert!(f2.is_empty());
        assert_eq!(frozen_count(&p), 2);
        let report = check_identities(&p);
        assert!(report.all_asserted_hold(), "{report}");
    }

    #[test]
    fn conjugation_case() {
        let g_amp = set(8, &[0, 1, 2, 5]);
        let g_ph = set(8, &[0, 3, 5, 6]);
        let p = build_partition(&g_amp, &g_ph, &g_ph, 8).unwrap();
        assert!(p.p1_prime().is_empty());
        assert_eq!(delta(&p), 0);
        assert_eq!(p.s_in_pd(), p.s_in_degr());
        let (f1, f2) = frozen_sets(&p);
        assert_eq!(&f1, p.p1());
        assert_eq!(&f2, p.p2());
        let report = check_identities(&p);
        assert!(report.all_asserted_hold(), "{report}");
        // both sides collapse to |S_degr ∪ P1 ∪ P2|
        let expected = p.s_in_degr().union(p.p1()).union(p.p2()).len();
        assert_eq!(
            report.get("frozen_cardinality").unwrap().detail,
            format!("lhs={expected} rhs={expected}")
        );
    }

    #[test]
    fn perfect_and_useless_channels() {
        let full = IndexSet::full(16);
        let p = build_partition(&full, &full, &full, 16).unwrap();
        assert_eq!(p.s_in_degr(), &full);
        assert_eq!(p.s_in_pd(), &full);
        for s in [p.p1(), p.p2(), p.p1_prime(), p.p2_prime(), p.b_both()] {
            assert!(s.is_empty());
        }

        let empty = IndexSet::empty(16);
        let q = build_partition(&empty, &empty, &empty, 16).unwrap();
        assert_eq!(q.b_both(), &full);
        assert!(q.s_in_pd().is_empty());
        assert!(check_identities(&q).all_asserted_hold());
    }

    #[test]
    fn delta_examples() {
        // P1 = {2, 5}, P1' = {5}
        let n = 6;
        let p = build_partition(
            &set(n, &[0, 2, 5]),
            &set(n, &[0, 1]),
            &set(n, &[0, 1, 5]),
            n,
        )
        .unwrap();
        assert_eq!(ids(p.p1()), vec![2, 5]);
        assert_eq!(ids(p.p1_prime()), vec![5]);
        assert_eq!(delta(&p), 1);

        // P1 = P1' = {0, 1, 2}
        let q = build_partition(&set(4, &[0, 1, 2]), &set(4, &[]), &set(4, &[0, 1, 2]), 4).unwrap();
        assert_eq!(delta(&q), 3);
        let (f1, f2) = frozen_sets(&q);
        assert!(f1.is_empty() && f2.is_empty());
    }

    #[test]
    fn p2_slack_is_reported_not_asserted() {
        // index 1 is amplitude-bad but phase-good, so P2 = {1}
        let p = build_partition(&set(4, &[0]), &set(4, &[0, 1]), &set(4, &[0, 1]), 4).unwrap();
        assert_eq!(ids(p.p2()), vec![1]);
        let report = check_identities(&p);
        assert!(report.all_asserted_hold(), "{report}");
        assert!(!report.get("frozen_in_g_amp").unwrap().holds);
        assert!(!report.get("frozen_cardinality_tail").unwrap().holds);
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let err = build_partition(&set(4, &[0]), &set(4, &[0, 1]), &set(4, &[0]), 4).unwrap_err();
        assert!(err
            .to_string()
            .starts_with("inconsistent PD classification"));
        assert!(build_partition(&set(4, &[0]), &set(8, &[0]), &set(8, &[0]), 4).is_err());
    }
}
