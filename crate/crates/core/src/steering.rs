//! Focusing and cascaded steering vectors, beam gain and angular pattern cuts.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{ArrayGeometry, Position, SPEED_OF_LIGHT};

/// Distances below this are treated as coincident points, meters.
const COINCIDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SteeringKind {
    /// `a(p)` toward a single point.
    Focusing,
    /// `b(p, p_tx) = a(p) ⊙ a(p_tx)`.
    Cascaded,
}

/// Per-element unit-modulus phase terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    wavelength: f64,
    kind: SteeringKind,
}

impl SteeringVector {
    /// Wraps raw entries. Entries are expected to be unit modulus.
    pub fn from_entries(entries: Vec<Complex64>, wavelength: f64, kind: SteeringKind) -> Self {
        Self { entries, wavelength, kind }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn kind(&self) -> SteeringKind {
        self.kind
    }
}

/// Path-length difference `‖p − p_m‖ − ‖p − p_RIS‖` for every element.
///
/// Evaluated as `(‖q‖² − 2 u·q) / (‖u − q‖ + ‖u‖)` with `u = p − p_RIS`,
/// `q = p_m − p_RIS`, which avoids cancellation at large distances.
fn path_differences(geometry: &ArrayGeometry, p: &Position) -> Result<Vec<f64>> {
    if !p.is_finite() {
        return invalid("steering point must be finite");
    }
    let center = geometry.center();
    let u = *p - center;
    let u_norm = u.norm();
    if u_norm < COINCIDENCE_TOL {
        return invalid("steering point coincides with the aperture center");
    }
    geometry
        .elements()
        .iter()
        .map(|pm| {
            let q = *pm - center;
            let dist = (u - q).norm();
            if dist < COINCIDENCE_TOL {
                return invalid("steering point coincides with an element");
            }
            let q2 = q.x * q.x + q.y * q.y + q.z * q.z;
            let uq = u.x * q.x + u.y * q.y + u.z * q.z;
            Ok((q2 - 2.0 * uq) / (dist + u_norm))
        })
        .collect()
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return invalid(format!("wavelength must be positive, got {wavelength}"));
    }
    Ok(())
}

/// Beam-focusing vector `[a(p)]_m = exp(−j 2π/λ (‖p − p_m‖ − ‖p − p_RIS‖))`.
///
/// Exact spherical-wave form, valid in both near and far field.
pub fn focusing_vector(geometry: &ArrayGeometry, p: &Position, wavelength: f64) -> Result<SteeringVector> {
    check_wavelength(wavelength)?;
    let k = TAU / wavelength;
    let entries = path_differences(geometry, p)?.into_iter().map(|d| Complex64::from_polar(1.0, -k * d)).collect();
    Ok(SteeringVector { entries, wavelength, kind: SteeringKind::Focusing })
}

/// Cascaded TX→RIS→RX vector `b(p, p_tx) = a(p) ⊙ a(p_tx)`.
pub fn cascaded_vector(
    geometry: &ArrayGeometry,
    p: &Position,
    p_tx: &Position,
    wavelength: f64,
) -> Result<SteeringVector> {
    check_wavelength(wavelength)?;
    let k = TAU / wavelength;
    let rx = path_differences(geometry, p)?;
    let tx = path_differences(geometry, p_tx)?;
    let entries = rx.iter().zip(&tx).map(|(a, b)| Complex64::from_polar(1.0, -k * (a + b))).collect();
    Ok(SteeringVector { entries, wavelength, kind: SteeringKind::Cascaded })
}

/// Anything that yields one complex weight per element.
pub trait ElementWeights {
    fn complex_weights(&self) -> Vec<Complex64>;
}

impl ElementWeights for [Complex64] {
    fn complex_weights(&self) -> Vec<Complex64> {
        self.to_vec()
    }
}

impl ElementWeights for Vec<Complex64> {
    fn complex_weights(&self) -> Vec<Complex64> {
        self.clone()
    }
}

fn dot(weights: &[Complex64], entries: &[Complex64]) -> Complex64 {
    weights.iter().zip(entries).map(|(w, b)| w * b).sum()
}

/// Beam gain `G = ω^T b` (plain transpose, no conjugation).
pub fn beam_gain<W: ElementWeights + ?Sized>(weights: &W, b: &SteeringVector) -> Result<Complex64> {
    let w = weights.complex_weights();
    if w.len() != b.len() {
        return invalid(format!("weight length {} does not match steering length {}", w.len(), b.len()));
    }
    Ok(dot(&w, &b.entries))
}

/// Angular sweep definition for [`pattern_cut`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSpec {
    pub phi_deg: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub n_samples: usize,
    /// Probe distance from the aperture center, meters.
    pub radius: f64,
    pub wavelength: f64,
}

impl CutSpec {
    pub fn thetas(&self) -> Vec<f64> {
        let n = self.n_samples;
        let span = self.theta_max_deg - self.theta_min_deg;
        (0..n)
            .map(
                |k| {
                    if k + 1 == n {
                        self.theta_max_deg
                    } else {
                        self.theta_min_deg + span * k as f64 / (n - 1) as f64
                    }
                },
            )
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSample {
    pub theta: f64,
    pub gain: Complex64,
    /// `20 log10(|G| / max|G|)`, present once the pattern is normalized.
    pub gain_db: Option<f64>,
}

/// Sampled angular cut of the beam gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamPattern {
    pub cut_plane_phi: f64,
    pub frequency: f64,
    pub samples: Vec<PatternSample>,
    /// Linear `max|G|` used for dB normalization.
    pub normalization_peak: Option<f64>,
}

impl BeamPattern {
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.theta)
    }

    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.gain.norm())
    }
}

/// Samples `G(θ)` on a uniform theta grid in the plane `phi = cut.phi_deg`.
pub fn pattern_cut<W: ElementWeights + ?Sized>(
    geometry: &ArrayGeometry,
    weights: &W,
    p_tx: &Position,
    cut: &CutSpec,
) -> Result<BeamPattern> {
    if cut.n_samples < 2 {
        return invalid(format!("a pattern cut needs at least 2 samples, got {}", cut.n_samples));
    }
    if !(cut.theta_max_deg > cut.theta_min_deg) {
        return invalid("theta range must be increasing");
    }
    let w = weights.complex_weights();
    if w.len() != geometry.len() {
        return invalid(format!("weight length {} does not match element count {}", w.len(), geometry.len()));
    }
    // fold the feed term into the weights once: ω ⊙ a(p_tx)
    let feed = focusing_vector(geometry, p_tx, cut.wavelength)?;
    let illuminated: Vec<Complex64> = w.iter().zip(feed.entries()).map(|(w, a)| w * a).collect();

    let samples = cut
        .thetas()
        .into_par_iter()
        .map(|theta| {
            let p = geometry.farfield_probe(theta, cut.phi_deg, cut.radius)?;
            let a = focusing_vector(geometry, &p, cut.wavelength)?;
            Ok(PatternSample { theta, gain: dot(&illuminated, a.entries()), gain_db: None })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BeamPattern {
        cut_plane_phi: cut.phi_deg,
        frequency: SPEED_OF_LIGHT / cut.wavelength,
        samples,
        normalization_peak: None,
    })
}
