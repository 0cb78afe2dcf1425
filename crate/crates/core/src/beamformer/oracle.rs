//! Exhaustive search over all discrete configurations, for small arrays.

use num_complex::Complex64;

use super::{PhaseSet, RisConfiguration};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Position};
use crate::steering::{cascaded_vector, SteeringVector};

pub const DEFAULT_ORACLE_LIMIT: u64 = 1 << 20;

/// Maximizes `|Ĝ|` over every configuration of `b.len()` elements.
///
/// Configurations are visited in lexicographic order of their state
/// vectors and only a strictly better gain replaces the incumbent, so the
/// lexicographically smallest optimum is returned.
pub fn brute_force_on_steering(b: &SteeringVector, phase_set: &PhaseSet, limit: u64) -> Result<RisConfiguration> {
    let m = b.len();
    let levels = phase_set.len();
    let size = (levels as f64).powi(m as i32);
    if m == 0 || size > limit as f64 {
        return Err(Error::CapacityExceeded { size, limit });
    }
    let total = size as u64;
    let rotors: Vec<Complex64> = phase_set.levels().iter().map(|&l| Complex64::from_polar(1.0, l)).collect();
    // tolerance for floating-point ties between exactly equal optima
    let tol = 1e-12 * m as f64;

    let mut states = vec![0usize; m];
    let mut best_states = states.clone();
    let mut best_gain = f64::NEG_INFINITY;
    for index in 0..total {
        if index > 0 {
            // odometer increment; element 0 is the most significant digit
            let mut pos = m;
            loop {
                pos -= 1;
                states[pos] += 1;
                if states[pos] < levels {
                    break;
                }
                states[pos] = 0;
            }
        }
        let gain = states.iter().zip(b.entries()).map(|(&s, z)| rotors[s] * z).sum::<Complex64>().norm();
        if gain > best_gain + tol {
            best_gain = gain;
            best_states.copy_from_slice(&states);
        }
    }
    RisConfiguration::new(best_states, phase_set.clone())
}

/// Exhaustive optimum toward `p_target`. Fails with
/// [`Error::CapacityExceeded`] when `|K|^M > limit`.
pub fn brute_force_oracle(
    geometry: &ArrayGeometry,
    p_tx: &Position,
    p_target: &Position,
    phase_set: &PhaseSet,
    wavelength: f64,
    limit: u64,
) -> Result<RisConfiguration> {
    let levels = phase_set.len() as f64;
    let size = levels.powi(geometry.len() as i32);
    if size > limit as f64 {
        return Err(Error::CapacityExceeded { size, limit });
    }
    let b = cascaded_vector(geometry, p_target, p_tx, wavelength)?;
    brute_force_on_steering(&b, phase_set, limit)
}
