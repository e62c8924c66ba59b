//! Multi-path Monte-Carlo runs and their cross-path aggregates.
//!
//! Path `i` draws its frames from ChaCha stream `i + 1` of the base seed
//! (stream 0 is left to oracle sampling), so every policy in a comparison
//! sees the same task sequence on the same path and results do not depend on
//! the number of workers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rrate_core::env::REJECT;
use rrate_core::{
    solve_theta_star, ControllerState, EnvSpec, Environment, FrameRecord, Policy, SolveOptions, SystemKind,
    TaskType, ThetaBracket,
};

use crate::error::{HarnessError, Result};
use crate::goldens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Proposed,
    Greedy,
    ThetaEmpirical,
    FixedTheta,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] =
        [PolicyKind::Proposed, PolicyKind::Greedy, PolicyKind::ThetaEmpirical, PolicyKind::FixedTheta];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Proposed => "proposed",
            PolicyKind::Greedy => "greedy",
            PolicyKind::ThetaEmpirical => "theta-empirical",
            PolicyKind::FixedTheta => "fixed-theta",
        }
    }

    fn instantiate(&self, bracket: ThetaBracket, t_min: f64, theta_star: f64) -> Result<Policy> {
        Ok(match self {
            PolicyKind::Proposed => Policy::Proposed(ControllerState::new(bracket, t_min)?),
            PolicyKind::Greedy => Policy::Greedy,
            PolicyKind::ThetaEmpirical => Policy::theta_empirical(bracket),
            PolicyKind::FixedTheta => Policy::FixedTheta(theta_star),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown policy `{s}`")))
    }
}

/// `1, 2, 4, ...` up to `k`, with `k` itself appended when it is not a power of two.
pub fn geometric_checkpoints(k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |&c| c.checked_mul(2)).take_while(|&c| c <= k).collect();
    if out.last() != Some(&k) && k >= 1 {
        out.push(k);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// The seed is the base seed of all paths.
    pub env: EnvSpec,
    pub policies: Vec<PolicyKind>,
    pub frames: usize,
    pub paths: usize,
    pub bracket: Option<ThetaBracket>,
    /// Keep every n-th trajectory row (plus the last frame).
    pub record_stride: usize,
    /// Frame counts after which cross-path statistics are taken, in `1..=frames`.
    pub checkpoints: Vec<usize>,
    /// Number of paths whose trajectories are kept in memory.
    pub keep_trajectories: usize,
    pub workers: Option<usize>,
    /// Skips the oracle when set.
    pub theta_star: Option<f64>,
    pub oracle_tol: f64,
    pub mc_samples: usize,
}

impl ExperimentConfig {
    pub fn new(env: EnvSpec, policies: Vec<PolicyKind>, frames: usize, paths: usize) -> Self {
        ExperimentConfig {
            env,
            policies,
            frames,
            paths,
            bracket: None,
            record_stride: 1,
            checkpoints: geometric_checkpoints(frames),
            keep_trajectories: 0,
            workers: None,
            theta_star: None,
            oracle_tol: 1e-9,
            mc_samples: 1_000_000,
        }
    }

    pub fn with_bracket(mut self, theta_min: f64, theta_max: f64) -> Result<Self> {
        self.bracket = Some(ThetaBracket::new(theta_min, theta_max)?);
        Ok(self)
    }

    pub fn bracket(&self) -> ThetaBracket {
        self.bracket.unwrap_or_else(|| self.env.default_bracket())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.frames == 0 {
            return bad("frames must be at least 1".into());
        }
        if self.paths == 0 {
            return bad("paths must be at least 1".into());
        }
        if self.record_stride == 0 {
            return bad("record stride must be at least 1".into());
        }
        if self.policies.is_empty() {
            return bad("no policies given".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c == 0 || c > self.frames) {
            return bad(format!("checkpoint {c} outside [1, {}]", self.frames));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("checkpoints must be strictly increasing".into());
        }
        Ok(())
    }
}

/// Where `theta*` came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaStarSource {
    pub value: f64,
    pub std_error: Option<f64>,
    pub origin: String,
}

/// Resolves `theta*` for a config: explicit override, closed form, committed
/// golden value, or a fresh Monte-Carlo bisection.
pub fn resolve_theta_star(cfg: &ExperimentConfig) -> Result<ThetaStarSource> {
    if let Some(value) = cfg.theta_star {
        return Ok(ThetaStarSource { value, std_error: None, origin: "override".into() });
    }
    if let Some(g) = goldens::project_selection(&cfg.env.kind) {
        return Ok(ThetaStarSource { value: g.theta_star, std_error: Some(g.std_error), origin: "golden".into() });
    }
    let opts = SolveOptions { tol: cfg.oracle_tol, bracket: cfg.bracket, mc_samples: cfg.mc_samples, mc_seed: None };
    let res = solve_theta_star(&cfg.env, &opts)
        .map_err(|source| HarnessError::Oracle { env: describe_env(&cfg.env), source })?;
    Ok(ThetaStarSource { value: res.theta_star, std_error: res.std_error, origin: res.method.label().into() })
}

pub fn describe_env(env: &EnvSpec) -> String {
    match env.kind {
        SystemKind::TwoChoice { p } | SystemKind::ProjectSelection { p } => format!("{} p={p}", env.kind.label()),
        SystemKind::FlexibleCurve { q } => format!("{} q={q}", env.kind.label()),
    }
}

/// Running sums and `theta` after a checkpoint's number of frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointSample {
    pub sum_r: f64,
    pub sum_t: f64,
    pub theta: Option<f64>,
}

impl CheckpointSample {
    pub fn ratio(&self) -> f64 {
        self.sum_r / self.sum_t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub samples: Vec<CheckpointSample>,
    pub final_ratio: f64,
    /// Frames with at least one project offer on which the reject option was taken.
    pub rejections: u64,
    /// Frames with at least one project offer.
    pub offered: u64,
    pub trajectory: Vec<FrameRecord>,
}

/// Runs one policy on one path.
pub fn simulate_path(
    env: EnvSpec,
    path: u64,
    mut policy: Policy,
    frames: usize,
    checkpoints: &[usize],
    record_stride: usize,
    keep_trajectory: bool,
) -> Result<PathOutcome> {
    let mut source = Environment::substream(env, path + 1);
    let mut samples = Vec::with_capacity(checkpoints.len());
    let mut trajectory = Vec::new();
    let (mut sum_r, mut sum_t) = (0.0, 0.0);
    let (mut rejections, mut offered) = (0u64, 0u64);
    let mut next_cp = checkpoints.iter().peekable();
    for k in 0..frames {
        let frame = source.next_frame();
        let theta = policy.theta();
        let d = policy.act(&frame.set)?;
        sum_r += d.r;
        sum_t += d.t;
        if let TaskType::Offers(n) = frame.task {
            if n > 0 {
                offered += 1;
                if d == REJECT {
                    rejections += 1;
                }
            }
        }
        if keep_trajectory && (k % record_stride == 0 || k + 1 == frames) {
            trajectory.push(FrameRecord {
                frame: k as u64,
                theta: theta.unwrap_or(f64::NAN),
                t: d.t,
                r: d.r,
                cum_ratio: sum_r / sum_t,
            });
        }
        if next_cp.peek() == Some(&&(k + 1)) {
            next_cp.next();
            samples.push(CheckpointSample { sum_r, sum_t, theta: policy.theta() });
        }
    }
    Ok(PathOutcome { samples, final_ratio: sum_r / sum_t, rejections, offered, trajectory })
}

/// Cross-path statistics at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointStats {
    pub checkpoint: usize,
    /// mean over paths of `sum R / sum T`
    pub mean_ratio: f64,
    pub stderr_ratio: f64,
    /// mean over paths of `|theta* - sum R / sum T|`
    pub gap: f64,
    pub stderr_gap: f64,
    /// mean over paths of `(theta[k] - theta*)^2`; `None` without a `theta`
    pub mse: Option<f64>,
    pub stderr_mse: Option<f64>,
    pub mean_sum_r: f64,
    pub mean_sum_t: f64,
    /// `mean sum R / mean sum T`
    pub ratio_of_sums: f64,
    pub gap_of_sums: f64,
    /// delta-method standard error of `ratio_of_sums`
    pub stderr_ratio_of_sums: f64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: PolicyKind,
    pub theta_star: f64,
    pub checkpoints: Vec<CheckpointStats>,
    pub final_ratios: Vec<f64>,
    pub rejections: u64,
    pub offered: u64,
    /// Share of frames with at least one offer on which every offer was
    /// rejected. Project selection only.
    pub rejection_rate: Option<f64>,
}

impl RunSummary {
    pub fn at(&self, checkpoint: usize) -> Option<&CheckpointStats> {
        self.checkpoints.iter().find(|c| c.checkpoint == checkpoint)
    }

    pub fn last(&self) -> &CheckpointStats {
        self.checkpoints.last().expect("validated configs have checkpoints")
    }

    pub fn mean_final_ratio(&self) -> f64 {
        mean(&self.final_ratios)
    }
}

/// Sequential mean in slice order.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (two-pass sample variance).
pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Aggregates path samples, in path order, at checkpoint index `idx`.
pub fn aggregate_checkpoint(checkpoint: usize, samples: &[CheckpointSample], theta_star: f64) -> CheckpointStats {
    let n = samples.len();
    let ratios: Vec<f64> = samples.iter().map(CheckpointSample::ratio).collect();
    let gaps: Vec<f64> = ratios.iter().map(|r| (theta_star - r).abs()).collect();
    let sq_err: Option<Vec<f64>> =
        samples.iter().map(|s| s.theta.map(|th| (th - theta_star) * (th - theta_star))).collect();
    let sum_r: Vec<f64> = samples.iter().map(|s| s.sum_r).collect();
    let sum_t: Vec<f64> = samples.iter().map(|s| s.sum_t).collect();
    let (mean_sum_r, mean_sum_t) = (mean(&sum_r), mean(&sum_t));
    let ratio_of_sums = mean_sum_r / mean_sum_t;
    let linearized: Vec<f64> = samples.iter().map(|s| s.sum_r - ratio_of_sums * s.sum_t).collect();
    CheckpointStats {
        checkpoint,
        mean_ratio: mean(&ratios),
        stderr_ratio: std_error(&ratios),
        gap: mean(&gaps),
        stderr_gap: std_error(&gaps),
        mse: sq_err.as_deref().map(mean),
        stderr_mse: sq_err.as_deref().map(std_error),
        mean_sum_r,
        mean_sum_t,
        ratio_of_sums,
        gap_of_sums: (theta_star - ratio_of_sums).abs(),
        stderr_ratio_of_sums: std_error(&linearized) / mean_sum_t,
        n_paths: n,
    }
}

/// Builds a summary from per-path outcomes given in path order.
pub fn summarize(policy: PolicyKind, checkpoints: &[usize], outcomes: &[PathOutcome], theta_star: f64, rejection_stats: bool) -> RunSummary {
    let stats = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &cp)| {
            let samples: Vec<CheckpointSample> = outcomes.iter().map(|o| o.samples[i]).collect();
            aggregate_checkpoint(cp, &samples, theta_star)
        })
        .collect();
    let rejections: u64 = outcomes.iter().map(|o| o.rejections).sum();
    let offered: u64 = outcomes.iter().map(|o| o.offered).sum();
    RunSummary {
        policy,
        theta_star,
        checkpoints: stats,
        final_ratios: outcomes.iter().map(|o| o.final_ratio).collect(),
        rejections,
        offered,
        rejection_rate: (rejection_stats && offered > 0).then(|| rejections as f64 / offered as f64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub summary: RunSummary,
    /// Trajectories of the first `keep_trajectories` paths.
    pub trajectories: Vec<Vec<FrameRecord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub bracket: ThetaBracket,
    pub theta_star: ThetaStarSource,
    pub runs: Vec<PolicyRun>,
}

impl Experiment {
    pub fn run_for(&self, policy: PolicyKind) -> Option<&PolicyRun> {
        self.runs.iter().find(|r| r.summary.policy == policy)
    }
}

/// Runs every configured policy over `paths` seeded paths.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let bracket = cfg.bracket();
    let theta_star = resolve_theta_star(cfg)?;
    let t_min = cfg.env.moments().t_min;
    let rejection_stats = matches!(cfg.env.kind, SystemKind::ProjectSelection { .. });

    let simulate_all = |kind: PolicyKind| -> Result<Vec<PathOutcome>> {
        let policy = kind.instantiate(bracket, t_min, theta_star.value)?;
        (0..cfg.paths)
            .into_par_iter()
            .map(|i| {
                simulate_path(
                    cfg.env,
                    i as u64,
                    policy,
                    cfg.frames,
                    &cfg.checkpoints,
                    cfg.record_stride,
                    i < cfg.keep_trajectories,
                )
            })
            .collect()
    };

    let mut runs = Vec::with_capacity(cfg.policies.len());
    for &kind in &cfg.policies {
        let outcomes = match cfg.workers {
            Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| simulate_all(kind))?,
            None => simulate_all(kind)?,
        };
        let summary = summarize(kind, &cfg.checkpoints, &outcomes, theta_star.value, rejection_stats);
        let trajectories = outcomes.into_iter().take(cfg.keep_trajectories).map(|o| o.trajectory).collect();
        runs.push(PolicyRun { summary, trajectories });
    }
    Ok(Experiment { config: cfg.clone(), bracket, theta_star, runs })
}
