//! Command-line front end: JSON scenario configs in, JSON configurations
//! and codebooks plus CSV pattern/sweep traces out.
//!
//! Angles are degrees at every external interface. Configuration bits are
//! row-major in the element order of [`ArrayGeometry::grid`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{gain_bandwidth, BandwidthReport, PatternMetrics};
use crate::beamformer::{build_codebook, conjugate_weights, Codebook, Method, PgdParams, PhaseSet, RisConfiguration};
use crate::geometry::{wavelength, ArrayGeometry, Position, DEFAULT_CENTER_FREQUENCY};
use crate::scenario::{CutGrid, Scenario};
use crate::steering::{BeamPattern, ElementWeights};

pub const PATTERN_CSV_HEADER: &str = "theta_deg,gain_linear,gain_db";
pub const SWEEP_CSV_HEADER: &str = "freq_ghz,peak_gain_db";
pub const BIT_ORDER: &str =
    "row-major: index = r * cols + c; element (r, c) at x = (c - (cols-1)/2) * spacing, y = (r - (rows-1)/2) * spacing";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

fn default_rows() -> usize {
    31
}
fn default_frequency_ghz() -> f64 {
    DEFAULT_CENTER_FREQUENCY / 1e9
}
fn default_f_over_d() -> f64 {
    0.5
}
fn default_theta_grid() -> (f64, f64, f64) {
    (-90.0, 90.0, 0.1)
}
fn default_radius_factor() -> f64 {
    100.0
}

/// Scenario file. Every field is optional; an empty object `{}` is the
/// 31 × 31, f/D = 0.5, 102 GHz reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_rows")]
    pub rows: usize,
    #[serde(default = "default_rows")]
    pub cols: usize,
    /// Defaults to half a wavelength at the center frequency.
    #[serde(default)]
    pub spacing_mm: Option<f64>,
    #[serde(default = "default_frequency_ghz")]
    pub center_frequency_ghz: f64,
    #[serde(default = "default_f_over_d", rename = "f_over_D", alias = "f_over_d")]
    pub f_over_d: f64,
    #[serde(default)]
    pub cut_phi_deg: f64,
    /// `(min, max, step)` in degrees.
    #[serde(default = "default_theta_grid")]
    pub theta_grid: (f64, f64, f64),
    #[serde(default = "default_radius_factor")]
    pub probe_radius_factor: f64,
    #[serde(default)]
    pub pgd: Option<PgdParams>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))
    }

    pub fn spacing_m(&self) -> CliResult<f64> {
        match self.spacing_mm {
            Some(mm) => Ok(mm * 1e-3),
            None => Ok(wavelength(self.center_frequency_ghz * 1e9).map_err(|e| config_err(e.to_string()))? / 2.0),
        }
    }

    pub fn scenario(&self) -> CliResult<Scenario> {
        let invalid = |e: crate::Error| config_err(e.to_string());
        if !(self.probe_radius_factor > 0.0) {
            return Err(config_err("probe_radius_factor must be positive"));
        }
        let geometry =
            ArrayGeometry::grid(self.rows, self.cols, self.spacing_m()?, Position::ORIGIN).map_err(invalid)?;
        let (min, max, step) = self.theta_grid;
        let mut scenario = Scenario::new(geometry, self.f_over_d, self.center_frequency_ghz * 1e9)
            .map_err(invalid)?
            .with_cut(CutGrid { phi_deg: self.cut_phi_deg, theta_min_deg: min, theta_max_deg: max, step_deg: step })
            .map_err(invalid)?;
        scenario.probe_radius_factor = self.probe_radius_factor;
        Ok(scenario)
    }

    pub fn pgd_params(&self, seed: Option<u64>) -> CliResult<PgdParams> {
        let mut params = self.pgd.clone().unwrap_or_default();
        if let Some(seed) = seed {
            params.seed = seed;
        }
        params.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationMeta {
    pub bit_order: String,
    pub target_theta_deg: f64,
    pub target_phi_deg: f64,
    pub method: Method,
    pub seed: u64,
    pub spacing_mm: f64,
    #[serde(rename = "f_over_D")]
    pub f_over_d: f64,
    pub target_gain_linear: f64,
    pub metrics: PatternMetrics,
}

/// On-disk RIS configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub rows: usize,
    pub cols: usize,
    pub frequency_ghz: f64,
    pub phase_set_rad: Vec<f64>,
    pub states: Vec<usize>,
    pub meta: ConfigurationMeta,
}

impl ConfigurationFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("invalid configuration {}: {e}", path.display())))
    }

    /// Rebuilds the configuration, checking it against the scenario's grid.
    pub fn configuration_for(&self, scenario: &Scenario) -> CliResult<RisConfiguration> {
        let g = &scenario.geometry;
        if self.rows != g.rows() || self.cols != g.cols() || self.states.len() != g.len() {
            return Err(config_err(format!(
                "configuration is {}x{} with {} states but the scenario has {}x{} elements",
                self.rows,
                self.cols,
                self.states.len(),
                g.rows(),
                g.cols()
            )));
        }
        let set = PhaseSet::new(self.phase_set_rad.iter().copied()).map_err(|e| config_err(e.to_string()))?;
        RisConfiguration::new(self.states.clone(), set).map_err(|e| config_err(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFileEntry {
    pub target_theta_deg: f64,
    pub target_phi_deg: f64,
    pub bits: Vec<usize>,
    pub target_gain_linear: f64,
    pub metrics: PatternMetrics,
}

/// On-disk codebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFile {
    pub rows: usize,
    pub cols: usize,
    pub frequency_ghz: f64,
    pub spacing_mm: f64,
    #[serde(rename = "f_over_D")]
    pub f_over_d: f64,
    pub feed_position_m: [f64; 3],
    pub method: Method,
    pub seed: u64,
    pub phase_set_rad: Vec<f64>,
    pub bit_order: String,
    pub entries: Vec<CodebookFileEntry>,
}

impl CodebookFile {
    pub fn from_codebook(codebook: &Codebook, phase_set: &PhaseSet, seed: u64) -> Self {
        let feed = codebook.feed.position;
        Self {
            rows: codebook.rows,
            cols: codebook.cols,
            frequency_ghz: codebook.frequency / 1e9,
            spacing_mm: codebook.spacing * 1e3,
            f_over_d: codebook.feed.f_over_d,
            feed_position_m: [feed.x, feed.y, feed.z],
            method: codebook.method,
            seed,
            phase_set_rad: phase_set.levels().to_vec(),
            bit_order: BIT_ORDER.to_string(),
            entries: codebook
                .entries
                .iter()
                .map(|e| CodebookFileEntry {
                    target_theta_deg: e.target_theta,
                    target_phi_deg: e.target_phi,
                    bits: e.configuration.states().to_vec(),
                    target_gain_linear: e.target_gain,
                    metrics: e.metrics,
                })
                .collect(),
        }
    }
}

/// Designs one beam and returns its configuration file.
pub fn design(
    config: &ScenarioConfig,
    theta: f64,
    phi: Option<f64>,
    method: Method,
    seed: Option<u64>,
) -> CliResult<ConfigurationFile> {
    let scenario = config.scenario()?;
    let phi = phi.unwrap_or(config.cut_phi_deg);
    if !(-90.0..=90.0).contains(&theta) || !phi.is_finite() {
        return Err(config_err(format!("target ({theta}, {phi}) out of range")));
    }
    let params = config.pgd_params(seed)?;
    let configuration = scenario.design(theta, phi, method, &params)?;
    let target_gain = beam_gain_at(&scenario, &configuration, theta, phi)?;
    let metrics = scenario.metrics(&configuration, theta, phi)?;
    Ok(ConfigurationFile {
        rows: scenario.geometry.rows(),
        cols: scenario.geometry.cols(),
        frequency_ghz: config.center_frequency_ghz,
        phase_set_rad: configuration.phase_set().levels().to_vec(),
        states: configuration.states().to_vec(),
        meta: ConfigurationMeta {
            bit_order: BIT_ORDER.to_string(),
            target_theta_deg: theta,
            target_phi_deg: phi,
            method,
            seed: params.seed,
            spacing_mm: scenario.geometry.spacing() * 1e3,
            f_over_d: config.f_over_d,
            target_gain_linear: target_gain,
            metrics,
        },
    })
}

fn beam_gain_at<W: ElementWeights + ?Sized>(scenario: &Scenario, weights: &W, theta: f64, phi: f64) -> CliResult<f64> {
    Ok(crate::steering::beam_gain(weights, &scenario.steering(theta, phi)?)?.norm())
}

/// Pattern cut of a stored configuration, or of the continuous conjugate
/// beam toward `(theta, phi)` when `continuous` is given.
pub fn pattern(
    config: &ScenarioConfig,
    configuration: Option<&ConfigurationFile>,
    continuous: Option<(f64, f64)>,
) -> CliResult<(BeamPattern, PatternMetrics)> {
    let scenario = config.scenario()?;
    let phi = config.cut_phi_deg;
    match (continuous, configuration) {
        (Some((theta, target_phi)), _) => {
            let weights = conjugate_weights(&scenario.steering(theta, target_phi)?);
            let pattern = scenario.pattern(&weights, phi)?;
            let metrics = crate::analysis::pattern_metrics(&pattern, theta)?;
            Ok((pattern, metrics))
        }
        (None, Some(file)) => {
            let c = file.configuration_for(&scenario)?;
            let pattern = scenario.pattern(&c, phi)?;
            let metrics = crate::analysis::pattern_metrics(&pattern, file.meta.target_theta_deg)?;
            Ok((pattern, metrics))
        }
        (None, None) => Err(config_err("pattern needs a configuration file or --continuous")),
    }
}

pub fn codebook(
    config: &ScenarioConfig,
    targets: &[(f64, f64)],
    method: Method,
    seed: Option<u64>,
) -> CliResult<CodebookFile> {
    let scenario = config.scenario()?;
    if targets.is_empty() {
        return Err(config_err("at least one target is required"));
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(config_err(format!("duplicate target ({}, {})", t.0, t.1)));
        }
        if !(-90.0..=90.0).contains(&t.0) {
            return Err(config_err(format!("target theta {} out of range", t.0)));
        }
    }
    let params = config.pgd_params(seed)?;
    let cb = build_codebook(&scenario, targets, method, &params)?;
    Ok(CodebookFile::from_codebook(&cb, &scenario.phase_set, params.seed))
}

pub fn sweep(
    config: &ScenarioConfig,
    configuration: &ConfigurationFile,
    f_min_ghz: f64,
    f_max_ghz: f64,
    n_freqs: usize,
) -> CliResult<BandwidthReport> {
    if n_freqs < 2 {
        return Err(config_err("a sweep needs at least 2 frequencies to bracket a band"));
    }
    if !(f_min_ghz > 0.0) || !(f_max_ghz > f_min_ghz) {
        return Err(config_err("frequency range must be positive and increasing"));
    }
    let scenario = config.scenario()?;
    let c = configuration.configuration_for(&scenario)?;
    let spec = scenario.sweep_spec(f_min_ghz * 1e9, f_max_ghz * 1e9, n_freqs);
    let target = (configuration.meta.target_theta_deg, configuration.meta.target_phi_deg);
    Ok(gain_bandwidth(&scenario.geometry, &c, &scenario.feed, target, &spec)?)
}

/// Rounds grid coordinates so that `-89.9` does not print as `-89.89999999999999`.
fn grid_value(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn pattern_csv(pattern: &BeamPattern) -> String {
    let mut out = String::with_capacity(40 * pattern.samples.len());
    out.push_str(PATTERN_CSV_HEADER);
    out.push('\n');
    for s in &pattern.samples {
        let db = s.gain_db.unwrap_or(f64::NAN);
        let _ = writeln!(out, "{},{},{}", grid_value(s.theta), s.gain.norm(), db);
    }
    out
}

pub fn sweep_csv(report: &BandwidthReport) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for (f, db) in &report.peak_gain_db_by_frequency {
        let _ = writeln!(out, "{},{}", grid_value(f / 1e9), db);
    }
    out
}

pub fn metrics_summary(m: &PatternMetrics) -> String {
    let sll = m.sll_db.map_or_else(|| "n/a".to_string(), |s| format!("{s:.3} dB"));
    format!(
        "target {:.3} deg | peak {:.3} deg | pointing error {:.3} deg | SLL {} | 3-dB beamwidth {:.3} deg | peak |G| {:.4}",
        m.target_theta, m.peak_theta, m.pointing_error, sll, m.beamwidth_3db, m.peak_gain_linear
    )
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Parser)]
#[command(name = "ris-beam", version, about = "1-bit RIS beam design, pattern and bandwidth evaluation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario JSON; defaults to the 31x31 reference setup when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for PGD multi-start perturbations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Method::Pgd)]
    pub method: Method,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Use the unquantized conjugate beam (pattern only).
    #[arg(long, global = true)]
    pub continuous: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design one beam and write its configuration JSON.
    Design {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// Defaults to the scenario's cut plane.
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
    },
    /// Write the normalized pattern cut of a configuration as CSV.
    Pattern {
        #[arg(long)]
        configuration: Option<PathBuf>,
        /// Target of the continuous beam; defaults to the configuration's target or broadside.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
    },
    /// Design a beam per target angle and write a codebook JSON.
    Codebook {
        /// Comma-separated theta targets, degrees.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        targets: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
    },
    /// Sweep target gain over frequency and report the 3-dB band.
    Sweep {
        #[arg(long)]
        configuration: PathBuf,
        #[arg(long)]
        f_min_ghz: f64,
        #[arg(long)]
        f_max_ghz: f64,
        #[arg(long)]
        n_freqs: usize,
    },
}

/// Executes a parsed command line. Human-readable summaries go to stdout,
/// warnings to stderr.
pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    let config = match &g.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    match &cli.command {
        Command::Design { theta, phi } => {
            let file = design(&config, *theta, *phi, g.method, g.seed)?;
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("configuration.json"));
            write_file(&out, &to_json(&file))?;
            println!("{}", metrics_summary(&file.meta.metrics));
            println!(
                "target |G| {:.4} of {} elements -> {}",
                file.meta.target_gain_linear,
                file.states.len(),
                out.display()
            );
        }
        Command::Pattern { configuration, theta, phi } => {
            let file = configuration.as_deref().map(ConfigurationFile::load).transpose()?;
            let continuous = g.continuous.then(|| {
                let from_file = file.as_ref().map(|f| (f.meta.target_theta_deg, f.meta.target_phi_deg));
                let (t0, p0) = from_file.unwrap_or((0.0, config.cut_phi_deg));
                (theta.unwrap_or(t0), phi.unwrap_or(p0))
            });
            let (pat, metrics) = pattern(&config, file.as_ref(), continuous)?;
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("pattern.csv"));
            write_file(&out, &pattern_csv(&pat))?;
            println!("{}", metrics_summary(&metrics));
            println!("{} samples -> {}", pat.samples.len(), out.display());
        }
        Command::Codebook { targets, phi } => {
            let phi = phi.unwrap_or(config.cut_phi_deg);
            let targets: Vec<(f64, f64)> = targets.iter().map(|&t| (t, phi)).collect();
            let file = codebook(&config, &targets, g.method, g.seed)?;
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("codebook.json"));
            write_file(&out, &to_json(&file))?;
            for e in &file.entries {
                println!("{} | target |G| {:.4}", metrics_summary(&e.metrics), e.target_gain_linear);
            }
            println!("{} entries -> {}", file.entries.len(), out.display());
        }
        Command::Sweep { configuration, f_min_ghz, f_max_ghz, n_freqs } => {
            let file = ConfigurationFile::load(configuration)?;
            let report = sweep(&config, &file, *f_min_ghz, *f_max_ghz, *n_freqs)?;
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
            write_file(&out, &sweep_csv(&report))?;
            if report.is_clipped() {
                eprintln!(
                    "warning: 3-dB band clipped by the sweep range ({}{})",
                    if report.low_clipped { "low edge" } else { "" },
                    if report.low_clipped && report.high_clipped {
                        ", high edge"
                    } else if report.high_clipped {
                        "high edge"
                    } else {
                        ""
                    }
                );
            }
            println!(
                "f_low {:.4} GHz | f_high {:.4} GHz | peak {:.4} GHz | fractional bandwidth {:.4} ({:.2}%)",
                report.f_low / 1e9,
                report.f_high / 1e9,
                report.peak_frequency / 1e9,
                report.fractional_bandwidth,
                100.0 * report.fractional_bandwidth
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_reference() {
        let c = ScenarioConfig::default();
        let s = c.scenario().unwrap();
        assert_eq!(s.geometry.len(), 961);
        assert!((s.feed.position.z - 22.78e-3).abs() < 1e-5);
        assert!((s.wavelength() - 2.939e-3).abs() < 1e-6);
        assert_eq!(s.cut.n_samples(), 1801);
    }

    #[test]
    fn config_errors_exit_two() {
        assert!(serde_json::from_str::<ScenarioConfig>("{\"rows\": 3, \"bogus\": 1}").is_err());
        let c: ScenarioConfig = serde_json::from_str("{\"rows\": 0}").unwrap();
        assert_eq!(c.scenario().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn pgd_section_and_alias() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"f_over_d": 0.7, "pgd": {"n_iter": 10}}"#).unwrap();
        assert_eq!(c.f_over_d, 0.7);
        let p = c.pgd_params(Some(9)).unwrap();
        assert_eq!((p.n_iter, p.seed, p.phase_offsets), (10, 9, 16));
    }

    #[test]
    fn grid_values_print_cleanly() {
        assert_eq!(format!("{}", grid_value(-90.0 + 0.1)), "-89.9");
        assert_eq!(format!("{}", grid_value(-0.0)), "0");
    }
}
