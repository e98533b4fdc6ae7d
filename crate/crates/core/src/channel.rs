//! Channel families and their reduction to base fidelity parameters.
//!
//! Every channel is summarized by three Bhattacharyya-style parameters:
//! the amplitude sub-channel, the phase sub-channel analyzed against the
//! environment output `E`, and the phase sub-channel analyzed against the
//! degraded environment output `E'`. Polarization consumes nothing else.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown cloning parameter N={0}")]
    UnknownCloning(u32),
    #[error("cloning table: {0}")]
    Table(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradingKind {
    /// `E -> E'` is a complex conjugation; the parameter map is the identity.
    Conjugation,
    /// One-parameter contraction `z' = z (1 - delta)`.
    Parametric,
}

/// Parameter-level stand-in for the degrading map `D^{E->E'}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradingMapSpec {
    kind: DegradingKind,
    delta: f64,
}

impl DegradingMapSpec {
    pub fn conjugation() -> Self {
        Self {
            kind: DegradingKind::Conjugation,
            delta: 0.0,
        }
    }

    pub fn parametric(delta: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(ChannelError::InvalidParameters(format!(
                "degrading delta {delta} outside [0, 1]"
            )));
        }
        Ok(Self {
            kind: DegradingKind::Parametric,
            delta,
        })
    }

    pub fn kind(&self) -> DegradingKind {
        self.kind
    }

    /// Contraction strength; always 0 for conjugation.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The same map kind with a different contraction strength.
    fn with_delta(&self, delta: f64) -> Result<Self, ChannelError> {
        match self.kind {
            DegradingKind::Conjugation => Ok(*self),
            DegradingKind::Parametric => Self::parametric(delta),
        }
    }
}

/// Maps the phase parameter seen against `E` to the one seen against `E'`.
pub fn apply_degrading(z_phase_e: f64, spec: &DegradingMapSpec) -> f64 {
    match spec.kind {
        DegradingKind::Conjugation => z_phase_e,
        DegradingKind::Parametric => (z_phase_e * (1.0 - spec.delta)).clamp(0.0, 1.0),
    }
}

/// One row of a cloning parameter table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloningEntry {
    pub z_amp: f64,
    #[serde(rename = "z_phase_E")]
    pub z_phase_e: f64,
    pub delta: f64,
}

/// User-supplied parameters for `1 -> N` cloning channels, keyed by `N`.
///
/// On disk this is a JSON object whose keys are `N` written as text,
/// e.g. `{"1": {"z_amp": 0.5, "z_phase_E": 0.5, "delta": 0.0}}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CloningTable {
    entries: BTreeMap<u32, CloningEntry>,
}

impl CloningTable {
    /// Placeholder values for `N = 1, 2, 3, 5, 8, 12, 24`, with
    /// `z = 1 / (N + 1)` on both sub-channels and no degrading contraction.
    /// These are illustrative numbers, not physical cloner fidelities.
    pub fn illustrative() -> Self {
        let entries = [1u32, 2, 3, 5, 8, 12, 24]
            .into_iter()
            .map(|n| {
                let z = 1.0 / f64::from(n + 1);
                (
                    n,
                    CloningEntry {
                        z_amp: z,
                        z_phase_e: z,
                        delta: 0.0,
                    },
                )
            })
            .collect();
        Self { entries }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ChannelError> {
        let raw: BTreeMap<String, CloningEntry> =
            serde_json::from_str(text).map_err(|e| ChannelError::Table(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (key, entry) in raw {
            let n: u32 = key
                .trim()
                .parse()
                .map_err(|_| ChannelError::Table(format!("key {key:?} is not an integer N")))?;
            if n == 0 {
                return Err(ChannelError::Table("N must be >= 1".into()));
            }
            for (name, v) in [
                ("z_amp", entry.z_amp),
                ("z_phase_E", entry.z_phase_e),
                ("delta", entry.delta),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(ChannelError::Table(format!(
                        "N={n}: {name} = {v} outside [0, 1]"
                    )));
                }
            }
            entries.insert(n, entry);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ChannelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ChannelError::Table(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let raw: BTreeMap<String, CloningEntry> = self
            .entries
            .iter()
            .map(|(n, e)| (n.to_string(), *e))
            .collect();
        serde_json::to_string_pretty(&raw).expect("table serializes")
    }

    pub fn get(&self, n: u32) -> Option<&CloningEntry> {
        self.entries.get(&n)
    }

    pub fn clone_counts(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelFamily {
    Erasure {
        epsilon: f64,
    },
    /// Probabilities `(p_I, p_X, p_Y, p_Z)`.
    Pauli {
        probs: [f64; 4],
    },
    Cloning {
        clones: u32,
        table: CloningTable,
    },
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Erasure { .. } => "erasure",
            ChannelFamily::Pauli { .. } => "pauli",
            ChannelFamily::Cloning { .. } => "cloning",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub family: ChannelFamily,
    pub degrading: DegradingMapSpec,
}

impl ChannelModel {
    pub fn new(family: ChannelFamily, degrading: DegradingMapSpec) -> Result<Self, ChannelError> {
        let model = Self { family, degrading };
        model.validate()?;
        Ok(model)
    }

    pub fn erasure(epsilon: f64, degrading: DegradingMapSpec) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Erasure { epsilon }, degrading)
    }

    pub fn pauli(probs: [f64; 4], degrading: DegradingMapSpec) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Pauli { probs }, degrading)
    }

    pub fn cloning(
        clones: u32,
        table: CloningTable,
        degrading: DegradingMapSpec,
    ) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Cloning { clones, table }, degrading)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(0.0..=1.0).contains(&self.degrading.delta) {
            return Err(ChannelError::InvalidParameters(format!(
                "degrading delta {} outside [0, 1]",
                self.degrading.delta
            )));
        }
        match &self.family {
            ChannelFamily::Erasure { epsilon } => {
                if !(0.0..=1.0).contains(epsilon) {
                    return Err(ChannelError::InvalidParameters(format!(
                        "erasure probability {epsilon} outside [0, 1]"
                    )));
                }
            }
            ChannelFamily::Pauli { probs } => {
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(ChannelError::InvalidParameters(format!(
                        "pauli probabilities {probs:?} must be nonnegative"
                    )));
                }
                let sum: f64 = probs.iter().sum();
                if (sum - 1.0).abs() > PROB_SUM_TOL {
                    return Err(ChannelError::InvalidParameters(format!(
                        "pauli probabilities sum to {sum}, expected 1"
                    )));
                }
            }
            ChannelFamily::Cloning { clones, .. } => {
                if *clones < 1 {
                    return Err(ChannelError::InvalidParameters(
                        "cloning N must be >= 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Amplitude and phase flip probabilities for the Pauli family.
    pub fn pauli_flips(probs: &[f64; 4]) -> (f64, f64) {
        let [_, px, py, pz] = *probs;
        ((px + py).clamp(0.0, 1.0), (pz + py).clamp(0.0, 1.0))
    }
}

/// Base parameters that seed the three polarization runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePairs {
    pub z_amp: f64,
    pub z_phase_e: f64,
    pub z_phase_eprime: f64,
}

/// Bhattacharyya parameter of a binary symmetric channel.
pub fn bsc_bhattacharyya(p: f64) -> f64 {
    (2.0 * (p * (1.0 - p)).max(0.0).sqrt()).clamp(0.0, 1.0)
}

/// Inverse of [`bsc_bhattacharyya`] on the branch `p <= 1/2`.
pub fn bsc_flip_from_bhattacharyya(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    0.5 * (1.0 - (1.0 - z * z).max(0.0).sqrt())
}

pub fn base_params(model: &ChannelModel) -> Result<BasePairs, ChannelError> {
    model.validate()?;
    let (z_amp, z_phase_e, spec) = match &model.family {
        ChannelFamily::Erasure { epsilon } => (*epsilon, *epsilon, model.degrading),
        ChannelFamily::Pauli { probs } => {
            let (amp, phase) = ChannelModel::pauli_flips(probs);
            (
                bsc_bhattacharyya(amp),
                bsc_bhattacharyya(phase),
                model.degrading,
            )
        }
        ChannelFamily::Cloning { clones, table } => {
            let entry = table
                .get(*clones)
                .ok_or(ChannelError::UnknownCloning(*clones))?;
            // the table carries the contraction strength for each N
            (
                entry.z_amp,
                entry.z_phase_e,
                model.degrading.with_delta(entry.delta)?,
            )
        }
    };
    Ok(BasePairs {
        z_amp,
        z_phase_e,
        z_phase_eprime: apply_degrading(z_phase_e, &spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj() -> DegradingMapSpec {
        DegradingMapSpec::conjugation()
    }

    #[test]
    fn noiseless_erasure() {
        for spec in [conj(), DegradingMapSpec::parametric(0.7).unwrap()] {
            let b = base_params(&ChannelModel::erasure(0.0, spec).unwrap()).unwrap();
            assert_eq!((b.z_amp, b.z_phase_e, b.z_phase_eprime), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn identity_pauli() {
        let b = base_params(&ChannelModel::pauli([1.0, 0.0, 0.0, 0.0], conj()).unwrap()).unwrap();
        assert_eq!((b.z_amp, b.z_phase_e, b.z_phase_eprime), (0.0, 0.0, 0.0));
    }

    #[test]
    fn pauli_bsc_reduction() {
        // p_X + p_Y = 0.1 and p_Z + p_Y = 0.1
        let b =
            base_params(&ChannelModel::pauli([0.85, 0.05, 0.05, 0.05], conj()).unwrap()).unwrap();
        for z in [b.z_amp, b.z_phase_e, b.z_phase_eprime] {
            assert!((z - 0.6).abs() < 1e-12, "{z}");
        }
        assert_eq!(b.z_phase_e, b.z_phase_eprime);
    }

    #[test]
    fn erasure_parametric() {
        let spec = DegradingMapSpec::parametric(0.4).unwrap();
        let b = base_params(&ChannelModel::erasure(0.5, spec).unwrap()).unwrap();
        assert_eq!(b.z_amp, 0.5);
        assert_eq!(b.z_phase_e, 0.5);
        assert!((b.z_phase_eprime - 0.3).abs() < 1e-15);
    }

    #[test]
    fn degrading_examples() {
        assert_eq!(apply_degrading(0.7, &conj()), 0.7);
        assert_eq!(
            apply_degrading(0.7, &DegradingMapSpec::parametric(1.0).unwrap()),
            0.0
        );
        let z = apply_degrading(0.5, &DegradingMapSpec::parametric(0.4).unwrap());
        assert!((z - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ChannelModel::erasure(1.5, conj()),
            Err(ChannelError::InvalidParameters(_))
        ));
        assert!(matches!(
            ChannelModel::pauli([0.5, 0.5, 0.1, 0.0], conj()),
            Err(ChannelError::InvalidParameters(_))
        ));
        assert!(matches!(
            ChannelModel::pauli([1.1, -0.1, 0.0, 0.0], conj()),
            Err(ChannelError::InvalidParameters(_))
        ));
        assert!(DegradingMapSpec::parametric(-0.1).is_err());
        assert!(ChannelModel::cloning(0, CloningTable::illustrative(), conj()).is_err());
    }

    #[test]
    fn missing_cloning_entry() {
        let m = ChannelModel::cloning(4, CloningTable::illustrative(), conj()).unwrap();
        assert_eq!(base_params(&m), Err(ChannelError::UnknownCloning(4)));
        assert!(base_params(&m)
            .unwrap_err()
            .to_string()
            .contains("unknown cloning parameter"));
    }

    #[test]
    fn cloning_table_roundtrip_and_delta() {
        let text = r#"{"3": {"z_amp": 0.2, "z_phase_E": 0.4, "delta": 0.5}}"#;
        let table = CloningTable::from_json_str(text).unwrap();
        assert_eq!(
            CloningTable::from_json_str(&table.to_json_string()).unwrap(),
            table
        );

        let pd =
            ChannelModel::cloning(3, table.clone(), DegradingMapSpec::parametric(0.0).unwrap())
                .unwrap();
        let b = base_params(&pd).unwrap();
        assert_eq!((b.z_amp, b.z_phase_e, b.z_phase_eprime), (0.2, 0.4, 0.2));

        let c = base_params(&ChannelModel::cloning(3, table, conj()).unwrap()).unwrap();
        assert_eq!(c.z_phase_eprime, c.z_phase_e);
    }

    #[test]
    fn cloning_table_rejects_garbage() {
        assert!(
            CloningTable::from_json_str(r#"{"x": {"z_amp":0,"z_phase_E":0,"delta":0}}"#).is_err()
        );
        assert!(
            CloningTable::from_json_str(r#"{"2": {"z_amp":2,"z_phase_E":0,"delta":0}}"#).is_err()
        );
        assert!(CloningTable::from_json_str("[1,2]").is_err());
    }

    #[test]
    fn bsc_inverse() {
        for p in [0.0, 0.01, 0.1, 0.3, 0.5] {
            let z = bsc_bhattacharyya(p);
            assert!((bsc_flip_from_bhattacharyya(z) - p).abs() < 1e-9);
        }
    }
}
