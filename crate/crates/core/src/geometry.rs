//! Planar element grids, feed placement and wavelength utilities.
//!
//! Frame convention: the aperture lies in the `z = 0` plane with broadside
//! along `+z`. Angles are `theta` from broadside and `phi` from the `+x` axis.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default design (center) frequency, Hz.
pub const DEFAULT_CENTER_FREQUENCY: f64 = 102e9;

/// A point in the RIS frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, rhs: Position) -> Position {
        Position::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, rhs: Position) -> Position {
        Position::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Position {
    type Output = Position;
    fn mul(self, k: f64) -> Position {
        Position::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Uniform rectangular grid of RIS elements in the `z = 0` plane.
///
/// Elements are stored row-major: element `m = r * cols + c` sits at
/// `center + ((c - (cols-1)/2) * spacing, (r - (rows-1)/2) * spacing, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    rows: usize,
    cols: usize,
    spacing: f64,
    elements: Vec<Position>,
    center: Position,
    side_length: f64,
    diagonal: f64,
}

impl ArrayGeometry {
    /// Builds a centered `rows × cols` grid with uniform `spacing` in x and y.
    pub fn grid(rows: usize, cols: usize, spacing: f64, center: Position) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("grid needs at least one row and column, got {rows}x{cols}"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return invalid(format!("element spacing must be positive, got {spacing}"));
        }
        if !center.is_finite() || center.z != 0.0 {
            return invalid("aperture center must be finite and lie in the z = 0 plane");
        }
        let col_mid = (cols as f64 - 1.0) / 2.0;
        let row_mid = (rows as f64 - 1.0) / 2.0;
        let elements = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| center + Position::new((c as f64 - col_mid) * spacing, (r as f64 - row_mid) * spacing, 0.0))
            .collect();
        let width = (cols - 1) as f64 * spacing;
        let height = (rows - 1) as f64 * spacing;
        Ok(Self {
            rows,
            cols,
            spacing,
            elements,
            center,
            side_length: rows.max(cols) as f64 * spacing,
            diagonal: width.hypot(height),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of elements `M`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Position] {
        &self.elements
    }

    /// Aperture reference point `p_RIS`.
    pub fn center(&self) -> Position {
        self.center
    }

    /// `max(rows, cols) × spacing`; the aperture size used for f/D feed placement.
    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// Largest element-to-element distance; the aperture size for the Fraunhofer bound.
    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }

    /// Places a point feed on the broadside axis at `f_over_d × side_length`.
    pub fn feed(&self, f_over_d: f64) -> Result<FeedSpec> {
        if !(f_over_d > 0.0) || !f_over_d.is_finite() {
            return invalid(format!("f/D must be positive, got {f_over_d}"));
        }
        Ok(FeedSpec { position: Position::new(self.center.x, self.center.y, f_over_d * self.side_length), f_over_d })
    }

    /// Far-field distance `2 D² / λ`, using the aperture diagonal as `D`.
    pub fn fraunhofer_distance(&self, frequency: f64) -> Result<f64> {
        let lambda = wavelength(frequency)?;
        Ok(2.0 * self.diagonal * self.diagonal / lambda)
    }

    /// Point at `radius` from the center in direction (`theta_deg`, `phi_deg`).
    ///
    /// Negative `theta_deg` is accepted so that a single cut can sweep
    /// through broadside: `(-θ, φ)` is the same direction as `(θ, φ + 180°)`.
    pub fn farfield_probe(&self, theta_deg: f64, phi_deg: f64, radius: f64) -> Result<Position> {
        if !(radius > 0.0) || !radius.is_finite() {
            return invalid(format!("probe radius must be positive, got {radius}"));
        }
        if !(-90.0..=90.0).contains(&theta_deg) || !phi_deg.is_finite() {
            return invalid(format!("probe angles out of range: theta={theta_deg}, phi={phi_deg}"));
        }
        Ok(self.center + direction(theta_deg, phi_deg) * radius)
    }
}

/// Point feed description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedSpec {
    pub position: Position,
    pub f_over_d: f64,
}

/// Unit vector for (`theta_deg`, `phi_deg`).
pub fn direction(theta_deg: f64, phi_deg: f64) -> Position {
    let (st, ct) = theta_deg.to_radians().sin_cos();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    Position::new(st * cp, st * sp, ct)
}

/// Free-space wavelength `c / f`.
pub fn wavelength(frequency: f64) -> Result<f64> {
    if !(frequency > 0.0) || !frequency.is_finite() {
        return invalid(format!("frequency must be positive, got {frequency}"));
    }
    Ok(SPEED_OF_LIGHT / frequency)
}
