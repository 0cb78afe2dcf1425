//! Continuous conjugate weights and their discretization onto a finite
//! phase set.

mod codebook;
mod oracle;
mod pgd;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::steering::{ElementWeights, SteeringVector};

pub use codebook::{build_codebook, Codebook, CodebookEntry, Method};
pub use oracle::{brute_force_on_steering, brute_force_oracle, DEFAULT_ORACLE_LIMIT};
pub use pgd::{pgd_discretize, pgd_on_steering, PgdParams};

/// Wraps an angle to `[0, 2π)`.
pub fn wrap_2pi(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed circular difference `a − b` wrapped to `[−π, π)`.
pub(crate) fn circular_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - TAU * ((d + PI) / TAU).floor()
}

/// Unit-amplitude weights `exp(j·phase)` with unconstrained phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousWeights {
    phases: Vec<f64>,
}

impl ContinuousWeights {
    /// Phases are wrapped to `[0, 2π)`.
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        Self { phases: phases.into_iter().map(wrap_2pi).collect() }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

impl ElementWeights for ContinuousWeights {
    fn complex_weights(&self) -> Vec<Complex64> {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect()
    }
}

/// Conjugate beamformer: `phase_m = −arg(b_m)`, so every term of
/// `ω^T b` lands on the positive real axis.
pub fn conjugate_weights(b: &SteeringVector) -> ContinuousWeights {
    ContinuousWeights::new(b.entries().iter().map(|z| -z.arg()))
}

/// Sorted set of distinct phase levels in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhaseSet {
    levels: Vec<f64>,
}

impl PhaseSet {
    pub fn new(levels: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut levels: Vec<f64> = levels.into_iter().collect();
        if levels.iter().any(|l| !l.is_finite() || *l < 0.0 || *l >= TAU) {
            return invalid("phase levels must lie in [0, 2π)");
        }
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        if levels.len() < 2 {
            return invalid("a phase set needs at least two distinct levels");
        }
        Ok(Self { levels })
    }

    /// The 1-bit set `{0, π}`.
    pub fn one_bit() -> Self {
        Self { levels: vec![0.0, PI] }
    }

    /// `2^bits` uniformly spaced levels.
    pub fn uniform(bits: u32) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return invalid(format!("unsupported bit depth {bits}"));
        }
        let n = 1usize << bits;
        Self::new((0..n).map(|k| TAU * k as f64 / n as f64))
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the level closest to `phase` on the circle, ties to the
    /// lower index, together with the signed offset `phase − level`.
    pub fn nearest(&self, phase: f64) -> (usize, f64) {
        let mut best = (0, circular_diff(phase, self.levels[0]));
        for (i, &level) in self.levels.iter().enumerate().skip(1) {
            let d = circular_diff(phase, level);
            if d.abs() < best.1.abs() {
                best = (i, d);
            }
        }
        best
    }
}

impl TryFrom<Vec<f64>> for PhaseSet {
    type Error = crate::Error;
    fn try_from(levels: Vec<f64>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<PhaseSet> for Vec<f64> {
    fn from(set: PhaseSet) -> Self {
        set.levels
    }
}

/// Per-element discrete states, as indices into a [`PhaseSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisConfiguration {
    states: Vec<usize>,
    phase_set: PhaseSet,
}

impl RisConfiguration {
    pub fn new(states: Vec<usize>, phase_set: PhaseSet) -> Result<Self> {
        if states.is_empty() {
            return invalid("a configuration needs at least one element");
        }
        if let Some(bad) = states.iter().find(|&&s| s >= phase_set.len()) {
            return invalid(format!("state {bad} out of range for {} phase levels", phase_set.len()));
        }
        Ok(Self { states, phase_set })
    }

    /// 1-bit configuration: `false ↔ 0 rad`, `true ↔ π rad`.
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Result<Self> {
        Self::new(bits.into_iter().map(usize::from).collect(), PhaseSet::one_bit())
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn phase_set(&self) -> &PhaseSet {
        &self.phase_set
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn phases(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|&s| self.phase_set.levels[s])
    }
}

impl ElementWeights for RisConfiguration {
    fn complex_weights(&self) -> Vec<Complex64> {
        self.phases().map(|p| Complex64::from_polar(1.0, p)).collect()
    }
}

/// Maps every phase to its nearest level (circular distance, ties to the
/// lower index).
pub fn quantize_nearest(weights: &ContinuousWeights, phase_set: &PhaseSet) -> RisConfiguration {
    let states = weights.phases().iter().map(|&p| phase_set.nearest(p).0).collect();
    RisConfiguration { states, phase_set: phase_set.clone() }
}

/// `|Σ_m e^{j·phase_m} b_m|` for the given configuration.
pub(crate) fn target_gain(config: &RisConfiguration, b: &SteeringVector) -> f64 {
    config.phases().zip(b.entries()).map(|(p, z)| Complex64::from_polar(1.0, p) * z).sum::<Complex64>().norm()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::steering::{beam_gain, SteeringKind};

    fn steering(entries: Vec<Complex64>) -> SteeringVector {
        SteeringVector::from_entries(entries, 1.0, SteeringKind::Cascaded)
    }

    #[test]
    fn conjugate_examples() {
        let ones = steering(vec![Complex64::new(1.0, 0.0); 3]);
        assert_eq!(conjugate_weights(&ones).phases(), &[0.0, 0.0, 0.0]);
        let j = steering(vec![Complex64::new(0.0, 1.0)]);
        assert!((conjugate_weights(&j).phases()[0] - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn conjugate_reaches_m() {
        let b = steering((0..961).map(|k| Complex64::from_polar(1.0, (k as f64 * 0.731).sin() * 9.0)).collect());
        let g = beam_gain(&conjugate_weights(&b), &b).unwrap();
        assert!((g.re - 961.0).abs() / 961.0 < 1e-6);
        assert!(g.im.abs() < 1e-9);
    }

    #[test]
    fn wrap_stays_in_range() {
        for p in [-1e-17, -TAU, TAU, 3.0 * TAU + 0.1, -0.5] {
            let w = wrap_2pi(p);
            assert!((0.0..TAU).contains(&w), "{p} -> {w}");
        }
    }

    #[test]
    fn nearest_examples() {
        let k = PhaseSet::one_bit();
        let q = |p: f64| quantize_nearest(&ContinuousWeights::new([p]), &k).states()[0];
        assert_eq!(q(0.3), 0);
        assert_eq!(q(2.0), 1);
        assert_eq!(q(FRAC_PI_2), 0);
        assert_eq!(q(6.2), 0);
        assert_eq!(q(3.5), 1);
    }

    #[test]
    fn phase_set_validation() {
        assert!(PhaseSet::new([0.0]).is_err());
        assert!(PhaseSet::new([0.0, 0.0]).is_err());
        assert!(PhaseSet::new([0.0, TAU]).is_err());
        assert!(PhaseSet::new([-0.1, 1.0]).is_err());
        assert_eq!(PhaseSet::new([PI, 0.0]).unwrap(), PhaseSet::one_bit());
        assert_eq!(PhaseSet::uniform(2).unwrap().len(), 4);
    }

    #[test]
    fn configuration_validation() {
        assert!(RisConfiguration::new(vec![0, 2], PhaseSet::one_bit()).is_err());
        assert!(RisConfiguration::new(vec![], PhaseSet::one_bit()).is_err());
        let c = RisConfiguration::from_bits([false, true]).unwrap();
        assert_eq!(c.states(), &[0, 1]);
        assert_eq!(c.phases().collect::<Vec<_>>(), vec![0.0, PI]);
    }

    #[test]
    fn two_bit_smoke() {
        let k = PhaseSet::uniform(2).unwrap();
        let w = ContinuousWeights::new([0.1, 1.5, 3.3, 4.8]);
        assert_eq!(quantize_nearest(&w, &k).states(), &[0, 1, 2, 3]);
    }
}
