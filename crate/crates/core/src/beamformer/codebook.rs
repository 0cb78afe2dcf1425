//! Multi-direction beam codebooks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{target_gain, PgdParams, RisConfiguration};
use crate::analysis::PatternMetrics;
use crate::error::{invalid, Result};
use crate::geometry::FeedSpec;
use crate::scenario::Scenario;

/// Discretizer used to realize each beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Nearest,
    Pgd,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Nearest => "nearest",
            Method::Pgd => "pgd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookEntry {
    pub target_theta: f64,
    pub target_phi: f64,
    pub configuration: RisConfiguration,
    pub metrics: PatternMetrics,
    /// `|Ĝ|` toward the target, linear.
    pub target_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub frequency: f64,
    pub feed: FeedSpec,
    pub method: Method,
    pub entries: Vec<CodebookEntry>,
}

/// One discretized beam per `(theta, phi)` target, in the order given.
pub fn build_codebook(
    scenario: &Scenario,
    targets: &[(f64, f64)],
    method: Method,
    params: &PgdParams,
) -> Result<Codebook> {
    if targets.is_empty() {
        return invalid("codebook needs at least one target");
    }
    for (i, &(theta, phi)) in targets.iter().enumerate() {
        if !(-90.0..=90.0).contains(&theta) || !phi.is_finite() {
            return invalid(format!("target ({theta}, {phi}) out of range"));
        }
        if targets[..i].iter().any(|&(t, p)| t == theta && p == phi) {
            return invalid(format!("duplicate target ({theta}, {phi})"));
        }
    }
    let entries = targets
        .par_iter()
        .map(|&(theta, phi)| {
            let configuration = scenario.design(theta, phi, method, params)?;
            let b = scenario.steering(theta, phi)?;
            Ok(CodebookEntry {
                target_theta: theta,
                target_phi: phi,
                target_gain: target_gain(&configuration, &b),
                metrics: scenario.metrics(&configuration, theta, phi)?,
                configuration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Codebook {
        rows: scenario.geometry.rows(),
        cols: scenario.geometry.cols(),
        spacing: scenario.geometry.spacing(),
        frequency: scenario.frequency,
        feed: scenario.feed,
        method,
        entries,
    })
}
