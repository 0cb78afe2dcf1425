//! A fixed RIS, feed and design frequency, with the evaluation conventions
//! used for far-field pattern cuts.

use crate::analysis::{normalize_db, pattern_metrics, PatternMetrics, SweepSpec};
use crate::beamformer::{
    conjugate_weights, pgd_on_steering, quantize_nearest, Method, PgdParams, PhaseSet, RisConfiguration,
};
use crate::error::{invalid, Result};
use crate::geometry::{wavelength, ArrayGeometry, FeedSpec, Position, DEFAULT_CENTER_FREQUENCY};
use crate::steering::{cascaded_vector, pattern_cut, BeamPattern, CutSpec, ElementWeights, SteeringVector};

/// Uniform theta grid of a pattern cut, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutGrid {
    pub phi_deg: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub step_deg: f64,
}

impl Default for CutGrid {
    fn default() -> Self {
        Self { phi_deg: 0.0, theta_min_deg: -90.0, theta_max_deg: 90.0, step_deg: 0.1 }
    }
}

impl CutGrid {
    pub fn n_samples(&self) -> usize {
        ((self.theta_max_deg - self.theta_min_deg) / self.step_deg).round() as usize + 1
    }

    fn validate(&self) -> Result<()> {
        if !(self.step_deg > 0.0)
            || !(self.theta_max_deg > self.theta_min_deg)
            || self.theta_min_deg < -90.0
            || self.theta_max_deg > 90.0
        {
            return invalid("theta grid must be increasing within [-90, 90] with a positive step");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    pub feed: FeedSpec,
    /// Design frequency, Hz.
    pub frequency: f64,
    pub cut: CutGrid,
    /// Far-field probe distance as a multiple of the Fraunhofer distance.
    pub probe_radius_factor: f64,
    pub phase_set: PhaseSet,
}

impl Scenario {
    pub fn new(geometry: ArrayGeometry, f_over_d: f64, frequency: f64) -> Result<Self> {
        wavelength(frequency)?;
        let feed = geometry.feed(f_over_d)?;
        Ok(Self {
            geometry,
            feed,
            frequency,
            cut: CutGrid::default(),
            probe_radius_factor: 100.0,
            phase_set: PhaseSet::one_bit(),
        })
    }

    /// 31 × 31 elements at half-wavelength spacing, f/D = 0.5, 102 GHz.
    pub fn reference() -> Self {
        let spacing = wavelength(DEFAULT_CENTER_FREQUENCY).expect("positive") / 2.0;
        let geometry = ArrayGeometry::grid(31, 31, spacing, Position::ORIGIN).expect("valid grid");
        Self::new(geometry, 0.5, DEFAULT_CENTER_FREQUENCY).expect("valid scenario")
    }

    pub fn with_cut(mut self, cut: CutGrid) -> Result<Self> {
        cut.validate()?;
        self.cut = cut;
        Ok(self)
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency).expect("validated on construction")
    }

    /// `probe_radius_factor × max(Fraunhofer distance, λ)` at the design
    /// frequency. The wavelength floor keeps tiny apertures in the far field.
    pub fn probe_radius(&self) -> f64 {
        let d_f = self.geometry.fraunhofer_distance(self.frequency).expect("validated frequency");
        self.probe_radius_factor * d_f.max(self.wavelength())
    }

    pub fn target_position(&self, theta_deg: f64, phi_deg: f64) -> Result<Position> {
        self.geometry.farfield_probe(theta_deg, phi_deg, self.probe_radius())
    }

    /// Cascaded vector toward a far-field direction at the design frequency.
    pub fn steering(&self, theta_deg: f64, phi_deg: f64) -> Result<SteeringVector> {
        let p = self.target_position(theta_deg, phi_deg)?;
        cascaded_vector(&self.geometry, &p, &self.feed.position, self.wavelength())
    }

    pub fn design(&self, theta_deg: f64, phi_deg: f64, method: Method, params: &PgdParams) -> Result<RisConfiguration> {
        let b = self.steering(theta_deg, phi_deg)?;
        match method {
            Method::Nearest => Ok(quantize_nearest(&conjugate_weights(&b), &self.phase_set)),
            Method::Pgd => pgd_on_steering(&b, &self.phase_set, params),
        }
    }

    pub fn cut_spec(&self, phi_deg: f64) -> CutSpec {
        CutSpec {
            phi_deg,
            theta_min_deg: self.cut.theta_min_deg,
            theta_max_deg: self.cut.theta_max_deg,
            n_samples: self.cut.n_samples(),
            radius: self.probe_radius(),
            wavelength: self.wavelength(),
        }
    }

    /// Normalized far-field cut in the plane `phi_deg`.
    pub fn pattern<W: ElementWeights + ?Sized>(&self, weights: &W, phi_deg: f64) -> Result<BeamPattern> {
        let raw = pattern_cut(&self.geometry, weights, &self.feed.position, &self.cut_spec(phi_deg))?;
        normalize_db(&raw)
    }

    /// Metrics of the cut through the target direction.
    pub fn metrics<W: ElementWeights + ?Sized>(
        &self,
        weights: &W,
        theta_deg: f64,
        phi_deg: f64,
    ) -> Result<PatternMetrics> {
        pattern_metrics(&self.pattern(weights, phi_deg)?, theta_deg)
    }

    pub fn sweep_spec(&self, f_min: f64, f_max: f64, n_freqs: usize) -> SweepSpec {
        SweepSpec { f_min, f_max, n_freqs, center_frequency: self.frequency, probe_radius: self.probe_radius() }
    }
}
