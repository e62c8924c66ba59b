//! Convergence of the two-choice system near its `p = 1/2` switching point.

use rrate_core::{EnvSpec, ThetaBracket};

use crate::error::Result;
use crate::experiment::{geometric_checkpoints, run_experiment, ExperimentConfig, PolicyKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub delta: f64,
    pub p: f64,
    pub checkpoint: usize,
    pub gap: f64,
    pub stderr_gap: f64,
    pub theta_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub deltas: Vec<f64>,
    pub frames: usize,
    pub paths: usize,
    pub seed: u64,
    pub bracket: Option<ThetaBracket>,
    pub workers: Option<usize>,
}

/// `1/2 - delta` and `1/2 + delta` (once for `delta = 0`).
pub fn probe_probabilities(delta: f64) -> Vec<f64> {
    if delta == 0.0 {
        vec![0.5]
    } else {
        vec![0.5 - delta, 0.5 + delta]
    }
}

/// Mean gap of the proposed controller at geometric checkpoints for each
/// `p = 1/2 -+ delta`.
pub fn near_threshold_probe(cfg: &ProbeConfig) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for &delta in &cfg.deltas {
        for p in probe_probabilities(delta) {
            let env = EnvSpec::two_choice(p, cfg.seed)?;
            let mut exp = ExperimentConfig::new(env, vec![PolicyKind::Proposed], cfg.frames, cfg.paths);
            exp.bracket = cfg.bracket;
            exp.workers = cfg.workers;
            exp.checkpoints = geometric_checkpoints(cfg.frames);
            let result = run_experiment(&exp)?;
            let summary = &result.runs[0].summary;
            rows.extend(summary.checkpoints.iter().map(|c| ProbeRow {
                delta,
                p,
                checkpoint: c.checkpoint,
                gap: c.gap,
                stderr_gap: c.stderr_gap,
                theta_star: summary.theta_star,
            }));
        }
    }
    Ok(rows)
}
