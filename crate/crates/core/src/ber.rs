//! Block-error-probability bounds and a genie-aided SC oracle.

use crate::indexset::IndexSet;
use crate::polarize::{SyntheticTable, TableMode};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Smallest sample count accepted by the Monte Carlo oracle.
pub const GENIE_SAMPLE_FLOOR: usize = 10_000;

const LANES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BerError {
    #[error("invalid threshold: eta = {0} outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("oracle requires erasure mode")]
    RequiresErasureMode,
    #[error("insufficient samples: {got} < {floor}")]
    InsufficientSamples { got: usize, floor: usize },
}

/// `1/2 (1 - sqrt(1 - S))` with `S` clamped to `[0, 1]`.
pub fn lower_bound_from_sum(sum: f64) -> f64 {
    let s = sum.clamp(0.0, 1.0);
    (0.5 * (1.0 - (1.0 - s).max(0.0).sqrt())).clamp(0.0, 0.5)
}

/// `1/2 (1 - sqrt(S))` with `S` clamped to `[0, 1]`.
pub fn upper_bound_from_sum(sum: f64) -> f64 {
    let s = sum.clamp(0.0, 1.0);
    (0.5 * (1.0 - s.sqrt())).clamp(0.0, 0.5)
}

fn sum_over(fidelities: &[f64], set: &IndexSet) -> f64 {
    set.iter().map(|i| fidelities[i]).sum()
}

/// Lower bound with the sum taken over the information set.
pub fn ber_lower(fidelities: &[f64], info_set: &IndexSet) -> f64 {
    lower_bound_from_sum(sum_over(fidelities, info_set))
}

/// `A(η) = { i : F_i <= η }`
pub fn restrict_eta(fidelities: &[f64], eta: f64) -> Result<IndexSet, BerError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(BerError::InvalidThreshold(eta));
    }
    Ok(IndexSet::from_predicate(fidelities.len(), |i| {
        fidelities[i] <= eta
    }))
}

/// Upper bound evaluated over `A(η)`.
pub fn ber_upper(fidelities: &[f64], eta: f64) -> Result<f64, BerError> {
    let a = restrict_eta(fidelities, eta)?;
    Ok(upper_bound_from_sum(sum_over(fidelities, &a)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Unclamped sum feeding the lower bound.
    pub lower_sum: f64,
    /// Unclamped sum feeding the upper bound.
    pub upper_sum: f64,
    pub eta: f64,
    /// `A(η)` over the whole index range.
    pub a_eta: IndexSet,
    pub mc: Option<McEstimate>,
}

impl BerEstimate {
    /// The two bounds come from unrelated formulas and may cross.
    pub fn crossed(&self) -> bool {
        self.upper < self.lower
    }
}

/// Both bounds for one information set. The upper bound is restricted to
/// `A(η) ∩ info_set`, since only information indices contribute errors.
pub fn evaluate_bounds(
    fidelities: &[f64],
    info_set: &IndexSet,
    eta: f64,
) -> Result<BerEstimate, BerError> {
    let a_eta = restrict_eta(fidelities, eta)?;
    let info_values: Vec<f64> = info_set.iter().map(|i| fidelities[i]).collect();
    let lower_sum = sum_over(fidelities, info_set);
    let upper_sum = sum_over(fidelities, &a_eta.intersection(info_set));
    Ok(BerEstimate {
        lower: lower_bound_from_sum(lower_sum),
        upper: ber_upper(&info_values, eta)?,
        lower_sum,
        upper_sum,
        eta,
        a_eta,
        mc: None,
    })
}

/// Monte Carlo genie-aided successive cancellation over the base erasure
/// channel of `table`. A block fails when any information index is erased
/// at its decoding step; an erased bit always counts as an error.
pub fn mc_genie_sc(
    table: &SyntheticTable,
    info_set: &IndexSet,
    samples: usize,
    seed: u64,
) -> Result<f64, BerError> {
    let order: Vec<usize> = info_set.iter().collect();
    Ok(mc_genie_sc_nested(table, &order, &[order.len()], samples, seed)?[0])
}

/// Block-error estimates for the nested information sets `order[..size]`,
/// one per entry of `sizes`, all from the same channel draws. Estimates are
/// therefore non-decreasing in `size`.
pub fn mc_genie_sc_nested(
    table: &SyntheticTable,
    order: &[usize],
    sizes: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>, BerError> {
    if table.mode() != TableMode::ErasureExact {
        return Err(BerError::RequiresErasureMode);
    }
    if samples < GENIE_SAMPLE_FLOOR {
        return Err(BerError::InsufficientSamples {
            got: samples,
            floor: GENIE_SAMPLE_FLOOR,
        });
    }
    let n = table.n();
    assert!(
        order.iter().all(|&i| i < n),
        "information index out of range"
    );
    let max_size = sizes.iter().copied().max().unwrap_or(0).min(order.len());
    let base = table.base();
    if max_size == 0 || base == 0.0 {
        return Ok(vec![0.0; sizes.len()]);
    }

    let batches = samples.div_ceil(LANES);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let lanes = (samples - b * LANES).min(LANES);
            let first = first_failure_ranks(base, n, &order[..max_size], lanes, seed, b as u64);
            let mut c = vec![0u64; sizes.len()];
            for rank in first.into_iter().flatten() {
                for (slot, &s) in c.iter_mut().zip(sizes) {
                    if rank < s {
                        *slot += 1;
                    }
                }
            }
            c
        })
        .reduce(
            || vec![0u64; sizes.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / samples as f64)
        .collect())
}

/// Erasure indicators of every synthesized index for 64 parallel trials.
/// Bit `l` of word `i` is set when index `i` is erased in lane `l`.
fn genie_erasures(base: f64, n: usize, seed: u64, batch: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    // probability quantized to 2^-32
    let threshold = (base * 4_294_967_296.0).round() as u64;
    let mut words = vec![0u64; n];
    for word in words.iter_mut() {
        let mut w = 0u64;
        for pair in 0..LANES / 2 {
            let r = rng.next_u64();
            let lo = (r & 0xffff_ffff) < threshold;
            let hi = (r >> 32) < threshold;
            w |= (lo as u64) << (2 * pair) | (hi as u64) << (2 * pair + 1);
        }
        *word = w;
    }
    // minus branch: erased if either input is; plus branch: only if both are
    let mut half = n / 2;
    while half >= 1 {
        for start in (0..n).step_by(2 * half) {
            let (lo, hi) = words[start..start + 2 * half].split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x | y;
                *b = x & y;
            }
        }
        half /= 2;
    }
    words
}

fn first_failure_ranks(
    base: f64,
    n: usize,
    order: &[usize],
    lanes: usize,
    seed: u64,
    batch: u64,
) -> Vec<Option<usize>> {
    let words = genie_erasures(base, n, seed, batch);
    let mask = if lanes == LANES {
        u64::MAX
    } else {
        (1u64 << lanes) - 1
    };
    let mut first = vec![None; lanes];
    let mut found = 0u64;
    for (rank, &i) in order.iter().enumerate() {
        let mut fresh = words[i] & mask & !found;
        found |= fresh;
        while fresh != 0 {
            let lane = fresh.trailing_zeros() as usize;
            first[lane] = Some(rank);
            fresh &= fresh - 1;
        }
        if found == mask {
            break;
        }
    }
    first
}
