//! Synthesis and evaluation of 1-bit phase configurations for planar
//! reconfigurable intelligent surfaces (RIS).
//!
//! The crate models a rectangular RIS illuminated by a point feed on its
//! broadside axis. Beam gains follow the cascaded spherical-wave model
//! `G(p) = Σ_m ω_m · a_m(p) · a_m(p_tx)`, where `a(p)` is the near-field
//! focusing vector. On top of that model it provides:
//!
//! * [`geometry`]: element grids, feed placement, wavelength and Fraunhofer utilities;
//! * [`steering`]: focusing/cascaded vectors, beam gain and angular pattern cuts;
//! * [`beamformer`]: conjugate weights, discrete phase sets, nearest-point and
//!   projected-gradient discretization, an exhaustive oracle and codebooks;
//! * [`analysis`]: dB normalization, lobe detection, pointing/SLL/beamwidth
//!   metrics and 3-dB gain bandwidth;
//! * [`cli`]: the JSON/CSV front end used by the `ris-beam` binary.

// negated comparisons reject NaN inputs along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod beamformer;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod scenario;
pub mod steering;

pub use error::{Error, Result};
