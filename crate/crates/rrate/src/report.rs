//! Theorem-bound checks and convergence-rate fits over a run summary.

use std::fmt;

use rrate_core::bounds::{concave_gap_bound, curvature_constant, derive_constants, general_gap_bound, mse_bound, BoundConstants};
use rrate_core::stats::{fit_loglog, LogLogFit};
use rrate_core::{EnvSpec, ThetaBracket};

use crate::error::{HarnessError, Result};
use crate::experiment::{PolicyKind, RunSummary};

/// Statistical slack, in standard errors, allowed for every empirical check.
pub const STAT_SLACK_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `O(1/sqrt K)` gap bound for general systems.
    GeneralGap,
    /// `O(log K / K)` gap bound under strong concavity.
    ConcaveGap,
    /// `2b / (k T_min^2)` bound on the mean squared error of `theta[k]`.
    Mse,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::GeneralGap => "theorem1",
            BoundKind::ConcaveGap => "theorem2",
            BoundKind::Mse => "mse_lemma",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub checkpoint: usize,
    pub kind: BoundKind,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    /// `bound - empirical`
    pub slack: f64,
    /// `bound >= empirical - STAT_SLACK_SE * stderr`
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub constants: BoundConstants,
    pub curvature: Option<f64>,
    pub t_min: f64,
    pub theta0: f64,
    pub theta_star: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| !r.holds)
    }
}

/// Evaluates every applicable bound at every checkpoint of a summary of the
/// proposed controller started at `theta_min`.
///
/// The gap bounds are compared with the gap of the ratio of cross-path mean
/// sums, the quantity they are stated for.
pub fn check_bounds(env: &EnvSpec, bracket: ThetaBracket, summary: &RunSummary) -> Result<BoundReport> {
    if summary.policy != PolicyKind::Proposed {
        return Err(HarnessError::Config(format!("bounds apply to the proposed policy, not {}", summary.policy)));
    }
    let constants = derive_constants(env, bracket);
    let curvature = curvature_constant(env);
    let t_min = env.moments().t_min;
    let theta0 = bracket.theta_min;
    let theta_star = summary.theta_star;
    let mut rows = Vec::new();
    let mut push = |checkpoint: usize, kind: BoundKind, empirical: f64, stderr: f64, bound: f64| {
        rows.push(BoundRow {
            checkpoint,
            kind,
            empirical,
            stderr,
            bound,
            slack: bound - empirical,
            holds: bound >= empirical - STAT_SLACK_SE * stderr,
        });
    };
    for c in &summary.checkpoints {
        let k = c.checkpoint as u64;
        if let Some(bound) = general_gap_bound(k, constants, t_min, theta0, theta_star) {
            push(c.checkpoint, BoundKind::GeneralGap, c.gap_of_sums, c.stderr_ratio_of_sums, bound);
        }
        if let Some(bound) = curvature.and_then(|cv| concave_gap_bound(k, constants.b, cv, t_min, theta0, theta_star)) {
            push(c.checkpoint, BoundKind::ConcaveGap, c.gap_of_sums, c.stderr_ratio_of_sums, bound);
        }
        if let (Some(mse), Some(se)) = (c.mse, c.stderr_mse) {
            push(c.checkpoint, BoundKind::Mse, mse, se, mse_bound(k, constants.b, t_min));
        }
    }
    Ok(BoundReport { constants, curvature, t_min, theta0, theta_star, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMetric {
    Gap,
    Mse,
}

impl RateMetric {
    pub fn name(&self) -> &'static str {
        match self {
            RateMetric::Gap => "gap",
            RateMetric::Mse => "mse",
        }
    }
}

impl std::str::FromStr for RateMetric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gap" => Ok(RateMetric::Gap),
            "mse" => Ok(RateMetric::Mse),
            other => Err(HarnessError::Config(format!("unknown metric `{other}` (expected gap or mse)"))),
        }
    }
}

pub const MIN_FIT_POINTS: usize = 5;

/// Log-log slope of a metric over checkpoints in `[k_min, k_max]`.
pub fn fit_rate(summary: &RunSummary, metric: RateMetric, k_min: usize, k_max: usize) -> Result<LogLogFit> {
    let points = summary
        .checkpoints
        .iter()
        .filter(|c| (k_min..=k_max).contains(&c.checkpoint))
        .filter_map(|c| {
            let v = match metric {
                RateMetric::Gap => Some(c.gap),
                RateMetric::Mse => c.mse,
            };
            v.map(|v| (c.checkpoint as f64, v))
        });
    Ok(fit_loglog(points, MIN_FIT_POINTS)?)
}
