//! Pattern figures of merit: dB normalization, lobe detection, pointing
//! error, sidelobe level, 3-dB beamwidth and 3-dB gain bandwidth.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{wavelength, ArrayGeometry, FeedSpec};
use crate::steering::{beam_gain, cascaded_vector, BeamPattern, ElementWeights};

/// Half-power threshold in dB.
pub const HALF_POWER_DB: f64 = -3.0;

/// Normalizes a pattern so that its strongest sample is exactly 0 dB.
pub fn normalize_db(pattern: &BeamPattern) -> Result<BeamPattern> {
    let peak = pattern.magnitudes().fold(0.0_f64, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return invalid("cannot normalize an all-zero pattern");
    }
    let mut out = pattern.clone();
    for s in &mut out.samples {
        s.gain_db = Some(20.0 * (s.gain.norm() / peak).log10());
    }
    out.normalization_peak = Some(peak);
    Ok(out)
}

fn db_trace(pattern: &BeamPattern) -> Result<Vec<f64>> {
    pattern
        .samples
        .iter()
        .map(|s| s.gain_db)
        .collect::<Option<Vec<_>>>()
        .map_or_else(|| invalid("pattern is not normalized"), Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub index: usize,
    pub theta: f64,
    pub gain_db: f64,
}

/// Interior local maxima of a dB trace, as sample indices in trace order.
///
/// A run of equal values counts once, at its center sample, when both
/// sides of the run are strictly lower. Endpoints are never lobes.
fn local_maxima(db: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = db.len();
    let mut k = 1;
    while k + 1 < n {
        if db[k] > db[k - 1] {
            let mut j = k;
            while j + 1 < n && db[j + 1] == db[k] {
                j += 1;
            }
            if j + 1 < n && db[j + 1] < db[k] {
                out.push((k + j) / 2);
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    out
}

/// Strict local maxima of a normalized pattern, strongest first.
pub fn find_lobes(pattern: &BeamPattern) -> Result<Vec<Lobe>> {
    let db = db_trace(pattern)?;
    let mut lobes: Vec<Lobe> = local_maxima(&db)
        .into_iter()
        .map(|i| Lobe { index: i, theta: pattern.samples[i].theta, gain_db: db[i] })
        .collect();
    lobes.sort_by(|a, b| b.gain_db.total_cmp(&a.gain_db));
    Ok(lobes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub target_theta: f64,
    pub peak_theta: f64,
    pub pointing_error: f64,
    pub peak_gain_linear: f64,
    /// Main peak minus the strongest sidelobe, dB. `None` when the cut has no sidelobe.
    pub sll_db: Option<f64>,
    pub beamwidth_3db: f64,
}

/// Abscissa where the trace crosses `level` between samples `below` and `above`.
fn crossing(x: &[f64], y: &[f64], below: usize, above: usize, level: f64) -> f64 {
    let (y0, y1) = (y[below], y[above]);
    if !y0.is_finite() || y1 == y0 {
        return x[below];
    }
    x[below] + (level - y0) / (y1 - y0) * (x[above] - x[below])
}

/// Contiguous interval around `peak` where `y ≥ level`, with linearly
/// interpolated crossings. The flags report when a side ran into the end
/// of the trace instead of crossing.
fn level_span(x: &[f64], y: &[f64], peak: usize, level: f64) -> (f64, f64, bool, bool) {
    let mut lo = peak;
    while lo > 0 && y[lo - 1] >= level {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < y.len() && y[hi + 1] >= level {
        hi += 1;
    }
    let (left, left_clipped) = if lo == 0 { (x[0], true) } else { (crossing(x, y, lo - 1, lo, level), false) };
    let (right, right_clipped) =
        if hi + 1 == y.len() { (x[hi], true) } else { (crossing(x, y, hi + 1, hi, level), false) };
    (left, right, left_clipped, right_clipped)
}

fn argmax(values: &[f64]) -> usize {
    values.iter().enumerate().fold(0, |best, (i, v)| if *v > values[best] { i } else { best })
}

/// Pointing error, SLL and 3-dB beamwidth of a pattern cut.
///
/// The main lobe is the strongest sample. Local maxima inside the main
/// lobe's −3 dB span are shoulders, not sidelobes. Unnormalized patterns
/// are normalized first.
pub fn pattern_metrics(pattern: &BeamPattern, target_theta: f64) -> Result<PatternMetrics> {
    let normalized;
    let pattern = if pattern.normalization_peak.is_some() && pattern.samples.iter().all(|s| s.gain_db.is_some()) {
        pattern
    } else {
        normalized = normalize_db(pattern)?;
        &normalized
    };
    if pattern.samples.len() < 2 {
        return invalid("pattern needs at least 2 samples");
    }
    let db = db_trace(pattern)?;
    let thetas: Vec<f64> = pattern.thetas().collect();
    let peak = argmax(&db);
    let (left, right, _, _) = level_span(&thetas, &db, peak, HALF_POWER_DB);

    let sidelobe = local_maxima(&db)
        .into_iter()
        .filter(|&i| i != peak && (thetas[i] < left || thetas[i] > right))
        .map(|i| db[i])
        .fold(None, |best: Option<f64>, v| Some(best.map_or(v, |b| b.max(v))));

    Ok(PatternMetrics {
        target_theta,
        peak_theta: thetas[peak],
        pointing_error: (thetas[peak] - target_theta).abs(),
        peak_gain_linear: pattern.normalization_peak.unwrap_or(0.0),
        sll_db: sidelobe.map(|s| db[peak] - s),
        beamwidth_3db: right - left,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub center_frequency: f64,
    /// `(frequency, gain)` with gain in dB relative to the sweep maximum.
    pub peak_gain_db_by_frequency: Vec<(f64, f64)>,
    pub peak_frequency: f64,
    pub f_low: f64,
    pub f_high: f64,
    pub fractional_bandwidth: f64,
    pub low_clipped: bool,
    pub high_clipped: bool,
}

impl BandwidthReport {
    pub fn is_clipped(&self) -> bool {
        self.low_clipped || self.high_clipped
    }
}

/// Frequency sweep definition for [`gain_bandwidth`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub f_min: f64,
    pub f_max: f64,
    pub n_freqs: usize,
    /// Reference for the fractional bandwidth, Hz.
    pub center_frequency: f64,
    /// Distance of the target probe from the aperture center, meters. Held
    /// fixed across the sweep.
    pub probe_radius: f64,
}

impl SweepSpec {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_freqs;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.f_max
                } else {
                    self.f_min + (self.f_max - self.f_min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Target-direction gain of a fixed configuration across frequency and its
/// contiguous 3-dB band around the strongest frequency.
///
/// The element grid is physical: spacing does not scale with frequency.
pub fn gain_bandwidth<W: ElementWeights + ?Sized>(
    geometry: &ArrayGeometry,
    weights: &W,
    feed: &FeedSpec,
    target: (f64, f64),
    sweep: &SweepSpec,
) -> Result<BandwidthReport> {
    if sweep.n_freqs < 2 {
        return invalid(format!("a frequency sweep needs at least 2 points, got {}", sweep.n_freqs));
    }
    if !(sweep.f_min > 0.0) || !(sweep.f_max > sweep.f_min) {
        return invalid("frequency range must be positive and increasing");
    }
    if !(sweep.center_frequency > 0.0) {
        return invalid("center frequency must be positive");
    }
    let p = geometry.farfield_probe(target.0, target.1, sweep.probe_radius)?;
    let freqs = sweep.frequencies();
    let gains = freqs
        .iter()
        .map(|&f| {
            let b = cascaded_vector(geometry, &p, &feed.position, wavelength(f)?)?;
            Ok(beam_gain(weights, &b)?.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = gains.iter().copied().fold(0.0_f64, f64::max);
    if !(max > 0.0) {
        return invalid("target gain is zero across the whole sweep");
    }
    let db: Vec<f64> = gains.iter().map(|g| 20.0 * (g / max).log10()).collect();
    let peak = argmax(&db);
    let (f_low, f_high, low_clipped, high_clipped) = level_span(&freqs, &db, peak, HALF_POWER_DB);
    Ok(BandwidthReport {
        center_frequency: sweep.center_frequency,
        peak_gain_db_by_frequency: freqs.iter().copied().zip(db).collect(),
        peak_frequency: freqs[peak],
        f_low,
        f_high,
        fractional_bandwidth: (f_high - f_low) / sweep.center_frequency,
        low_clipped,
        high_clipped,
    })
}
