//! Channel polarization: per-index synthesized fidelity tables.
//!
//! Index convention: the bits of `i`, read most-significant first, select
//! the transform applied at each level (0 = minus, 1 = plus). The first
//! level acts on the base channel.

use crate::indexset::IndexSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Smallest population accepted by [`polarize_mc`].
pub const MC_SAMPLE_FLOOR: usize = 1000;

/// Largest supported `k`; keeps `n` addressable and tables in memory.
pub const MAX_LEVELS: u32 = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolarizeError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("insufficient samples: {got} < {floor}")]
    InsufficientSamples { got: usize, floor: usize },
    #[error("base parameter {0} outside [0, 1]")]
    InvalidBase(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeGeometry {
    k: u32,
    beta: f64,
}

impl CodeGeometry {
    pub fn new(k: u32, beta: f64) -> Result<Self, PolarizeError> {
        if !(1..=MAX_LEVELS).contains(&k) {
            return Err(PolarizeError::InvalidGeometry(format!(
                "k = {k} outside [1, {MAX_LEVELS}]"
            )));
        }
        if !(beta > 0.0 && beta < 0.5) {
            return Err(PolarizeError::InvalidGeometry(format!(
                "beta = {beta} outside (0, 0.5)"
            )));
        }
        Ok(Self { k, beta })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        1usize << self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `2^{-n^beta}`; an index is good when `sqrt(F_i)` falls below this.
    pub fn good_threshold(&self) -> f64 {
        (-(self.n() as f64).powf(self.beta)).exp2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    ErasureExact,
    McDensityEvolution,
}

/// Distribution used to seed Monte Carlo density evolution from a base
/// Bhattacharyya parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseShape {
    Erasure,
    BinarySymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTable {
    geometry: CodeGeometry,
    base: f64,
    values: Vec<f64>,
    mode: TableMode,
    mc_samples: usize,
}

impl SyntheticTable {
    pub fn geometry(&self) -> CodeGeometry {
        self.geometry
    }

    /// Base parameter the table was polarized from.
    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn mc_samples(&self) -> usize {
        self.mc_samples
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Entrywise minimum with another table of the same geometry.
    pub fn entrywise_min(&self, other: &SyntheticTable) -> SyntheticTable {
        assert_eq!(self.n(), other.n());
        SyntheticTable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.min(*b))
                .collect(),
            base: self.base.min(other.base),
            ..self.clone()
        }
    }
}

// Written as `1 - (1-z)^2` so the map is monotone under rounding.
fn minus(z: f64) -> f64 {
    let c = 1.0 - z;
    1.0 - c * c
}

fn plus(z: f64) -> f64 {
    z * z
}

fn check_base(base: f64) -> Result<(), PolarizeError> {
    if (0.0..=1.0).contains(&base) {
        Ok(())
    } else {
        Err(PolarizeError::InvalidBase(base))
    }
}

/// Exact erasure recursion `z- = 2z - z^2`, `z+ = z^2` over `k` levels.
///
/// Panics if `base` lies outside `[0, 1]`.
pub fn polarize_exact(base: f64, geometry: CodeGeometry) -> SyntheticTable {
    check_base(base).expect("polarize_exact: base in [0, 1]");
    let n = geometry.n();
    let mut values = Vec::with_capacity(n);
    values.push(base);
    for _ in 0..geometry.k() {
        let len = values.len();
        values.resize(2 * len, 0.0);
        // descending so that slot j is read before 2j, 2j+1 are written
        for j in (0..len).rev() {
            let z = values[j];
            values[2 * j] = minus(z);
            values[2 * j + 1] = plus(z);
        }
    }
    SyntheticTable {
        geometry,
        base,
        values,
        mode: TableMode::ErasureExact,
        mc_samples: 0,
    }
}

/// Monte Carlo density evolution with an erasure-shaped base channel.
pub fn polarize_mc(
    base: f64,
    geometry: CodeGeometry,
    samples: usize,
    seed: u64,
) -> Result<SyntheticTable, PolarizeError> {
    polarize_mc_with(base, BaseShape::Erasure, geometry, samples, seed)
}

/// Population-based density evolution in the LLR domain.
///
/// Each tree node holds `samples` LLRs (all-zero codeword convention). A
/// minus child combines two parent draws with the check-node rule, a plus
/// child adds them. Each node shuffles with its own ChaCha stream derived
/// from `(seed, node)`, so results do not depend on traversal order, and
/// for a fixed seed the erasure-shaped estimates are monotone in `base`.
pub fn polarize_mc_with(
    base: f64,
    shape: BaseShape,
    geometry: CodeGeometry,
    samples: usize,
    seed: u64,
) -> Result<SyntheticTable, PolarizeError> {
    check_base(base)?;
    if samples < MC_SAMPLE_FLOOR {
        return Err(PolarizeError::InsufficientSamples {
            got: samples,
            floor: MC_SAMPLE_FLOOR,
        });
    }
    // stratified root: the number of bad draws is base*samples rounded up or
    // down at random, so only the fractional part is left to chance
    let mut rng = node_rng(seed, 0, 0);
    let (p, bad, good) = match shape {
        BaseShape::Erasure => (base, 0.0, f64::INFINITY),
        BaseShape::BinarySymmetric => {
            let p = crate::channel::bsc_flip_from_bhattacharyya(base);
            let mag = if p <= 0.0 {
                f64::INFINITY
            } else {
                ((1.0 - p) / p).ln()
            };
            (p, -mag, mag)
        }
    };
    let bad_count = ((p * samples as f64 + rng.gen::<f64>()).floor() as usize).min(samples);
    let root: Vec<f64> = (0..samples)
        .map(|i| if i < bad_count { bad } else { good })
        .collect();
    let mut values = vec![0.0; geometry.n()];
    descend(&root, 0, 0, geometry.k(), seed, &mut values);
    Ok(SyntheticTable {
        geometry,
        base,
        values,
        mode: TableMode::McDensityEvolution,
        mc_samples: samples,
    })
}

fn node_rng(seed: u64, level: u32, prefix: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1u64 << level) | prefix as u64);
    rng
}

fn descend(pop: &[f64], level: u32, prefix: usize, k: u32, seed: u64, out: &mut [f64]) {
    if level == k {
        let z = pop.iter().map(|l| (-0.5 * l).exp()).sum::<f64>() / pop.len() as f64;
        out[prefix] = z.clamp(0.0, 1.0);
        return;
    }
    // both children are built from the same random pairing (j, perm[j]), so
    // every parent draw is used exactly twice per child
    let mut perm: Vec<usize> = (0..pop.len()).collect();
    perm.shuffle(&mut node_rng(seed, level + 1, prefix << 1));
    let minus: Vec<f64> = perm
        .iter()
        .enumerate()
        .map(|(j, &q)| boxplus(pop[j], pop[q]))
        .collect();
    descend(&minus, level + 1, prefix << 1, k, seed, out);
    drop(minus);
    let plus: Vec<f64> = perm
        .iter()
        .enumerate()
        .map(|(j, &q)| pop[j] + pop[q])
        .collect();
    descend(&plus, level + 1, (prefix << 1) | 1, k, seed, out);
}

/// Check-node LLR combination `2 atanh(tanh(a/2) tanh(b/2))`.
fn boxplus(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a.is_infinite() {
        return b * a.signum();
    }
    if b.is_infinite() {
        return a * b.signum();
    }
    let sign = a.signum() * b.signum();
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// `G = { i : sqrt(F_i) < 2^{-n^beta} }`. The complement is the bad set.
pub fn classify_good(table: &SyntheticTable) -> IndexSet {
    let t = table.geometry.good_threshold();
    IndexSet::from_predicate(table.n(), |i| table.values[i].sqrt() < t)
}

/// Indices that are neither good nor clearly bad:
/// `2^{-n^beta} <= sqrt(F_i) < 1 - 2^{-n^beta}`.
pub fn unpolarized_band(table: &SyntheticTable) -> IndexSet {
    let t = table.geometry.good_threshold();
    IndexSet::from_predicate(table.n(), |i| {
        let s = table.values[i].sqrt();
        s >= t && s < 1.0 - t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(k: u32) -> CodeGeometry {
        CodeGeometry::new(k, 0.25).unwrap()
    }

    #[test]
    fn geometry_guards() {
        assert!(CodeGeometry::new(0, 0.3).is_err());
        assert!(CodeGeometry::new(4, 0.5).is_err());
        assert!(CodeGeometry::new(4, 0.0).is_err());
        assert_eq!(geom(5).n(), 32);
    }

    #[test]
    fn exact_hand_values() {
        assert_eq!(polarize_exact(0.0, geom(3)).values(), &[0.0; 8]);
        assert_eq!(polarize_exact(0.5, geom(1)).values(), &[0.75, 0.25]);
        assert_eq!(
            polarize_exact(0.5, geom(2)).values(),
            &[0.9375, 0.5625, 0.4375, 0.0625]
        );
        assert_eq!(polarize_exact(1.0, geom(4)).values(), &[1.0; 16]);
    }

    #[test]
    fn exact_conserves_mass() {
        for step in 0..=10 {
            let base = step as f64 / 10.0;
            for k in [1, 5, 12] {
                let t = polarize_exact(base, geom(k));
                let sum: f64 = t.values().iter().sum();
                assert!((sum - t.n() as f64 * base).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn classify_hand_example() {
        let t = polarize_exact(0.5, geom(2));
        assert!((t.geometry().good_threshold() - 0.3752).abs() < 1e-3);
        assert_eq!(classify_good(&t).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(classify_good(&polarize_exact(0.0, geom(3))).len(), 8);
        assert!(classify_good(&polarize_exact(1.0, geom(3))).is_empty());
    }

    #[test]
    fn mc_rejects_small_population() {
        assert_eq!(
            polarize_mc(0.5, geom(2), 999, 1),
            Err(PolarizeError::InsufficientSamples {
                got: 999,
                floor: 1000
            })
        );
    }

    #[test]
    fn mc_fixed_points() {
        for k in [1, 3] {
            let zero = polarize_mc(0.0, geom(k), 2000, 7).unwrap();
            assert!(zero.values().iter().all(|&v| v == 0.0));
            let one = polarize_mc(1.0, geom(k), 2000, 7).unwrap();
            assert!(one.values().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn mc_tracks_exact_on_erasure() {
        let mc = polarize_mc(0.5, geom(2), 100_000, 11).unwrap();
        let exact = [0.9375, 0.5625, 0.4375, 0.0625];
        for (a, b) in mc.values().iter().zip(exact) {
            assert!((a - b).abs() < 0.02, "{a} vs {b}");
        }
    }

    #[test]
    fn mc_deterministic_in_seed() {
        let a = polarize_mc(0.3, geom(4), 5000, 99).unwrap();
        let b = polarize_mc(0.3, geom(4), 5000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mode(), TableMode::McDensityEvolution);
        assert_eq!(a.mc_samples(), 5000);
    }

    #[test]
    fn mc_bsc_plus_branch_squares() {
        // for any symmetric channel Z(W+) = Z(W)^2 and Z(W-) <= 2Z - Z^2
        let z = 0.6;
        let t = polarize_mc_with(z, BaseShape::BinarySymmetric, geom(1), 200_000, 3).unwrap();
        assert!((t.values()[1] - z * z).abs() < 0.01, "{:?}", t.values());
        assert!(t.values()[0] <= minus(z) + 0.01);
        assert!(t.values()[0] > z);
    }

    #[test]
    fn boxplus_limits() {
        assert_eq!(boxplus(f64::INFINITY, 2.0), 2.0);
        assert_eq!(boxplus(-3.0, f64::INFINITY), -3.0);
        assert_eq!(boxplus(0.0, 5.0), 0.0);
        let v = boxplus(1.0, 1.0);
        let direct = 2.0 * ((0.5f64).tanh() * (0.5f64).tanh()).atanh();
        assert!((v - direct).abs() < 1e-12);
    }
}
