//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad or missing flags, invalid
//! parameters), 1 on runtime failures (oracle, IO).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrate_core::{solve_theta_star, EnvSpec, SolveOptions, SystemKind, ThetaBracket};

use crate::error::HarnessError;
use crate::experiment::{describe_env, geometric_checkpoints, run_experiment, Experiment, ExperimentConfig, PolicyKind};
use crate::output;
use crate::probe::{near_threshold_probe, ProbeConfig};
use crate::report::{check_bounds, fit_rate, RateMetric};

#[derive(Debug, Parser)]
#[command(name = "rrate", version, about = "Online renewal-reward ratio optimization laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate policies and write trajectories, summaries and bound reports.
    Run(RunArgs),
    /// Compute theta* for a system.
    Solve(SolveArgs),
    /// Compare several policies on common random numbers.
    Compare(RunArgs),
    /// Fit log-log convergence rates of the proposed controller.
    Rate(RateArgs),
    /// Convergence of the two-choice system near p = 1/2.
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvName {
    #[value(name = "systemA")]
    SystemA,
    #[value(name = "systemB")]
    SystemB,
    #[value(name = "systemC")]
    SystemC,
}

#[derive(Debug, Clone, Args)]
pub struct EnvArgs {
    #[arg(long, value_enum)]
    pub env: EnvName,
    /// Type probability (systemA, systemC).
    #[arg(long)]
    pub p: Option<f64>,
    /// Curve-type probability (systemB).
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BracketArgs {
    /// Lower end of the theta bracket (overrides the moment-derived default).
    #[arg(long, requires = "theta_max", allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, requires = "theta_min", allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Oracle bisection tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Frames per Monte-Carlo evaluation of M (systemC oracle).
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long)]
    pub frames: usize,
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated policy names [default: proposed for run; proposed,greedy,theta-empirical for compare].
    #[arg(long, value_delimiter = ',')]
    pub policies: Vec<PolicyKind>,
    #[command(flatten)]
    pub bracket: BracketArgs,
    /// Comma-separated frame counts, or `geometric`.
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    #[arg(long, default_value_t = 1)]
    pub record_stride: usize,
    /// Number of paths whose trajectory files are written [default: all for run, none for compare].
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    /// Seed of the Monte-Carlo oracle (required for systemC).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub bracket: BracketArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Gap,
    Mse,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long)]
    pub frames: usize,
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MetricArg::Both)]
    pub metric: MetricArg,
    /// Fit window `k_min:k_max` [default: 1:frames].
    #[arg(long)]
    pub k_range: Option<String>,
    #[command(flatten)]
    pub bracket: BracketArgs,
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    /// Comma-separated offsets from p = 1/2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<f64>,
    #[arg(long)]
    pub frames: usize,
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub bracket: BracketArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Core(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Solve(a) => solve(a, out),
        Command::Run(a) => run(a, false, out),
        Command::Compare(a) => run(a, true, out),
        Command::Rate(a) => rate(a, out),
        Command::Probe(a) => probe(a, out),
    }
}

fn env_spec(a: &EnvArgs, seed: u64) -> CliResult<EnvSpec> {
    let (kind, needed, stray) = match a.env {
        EnvName::SystemA => (a.p.map(|p| SystemKind::TwoChoice { p }), "--p", a.q.map(|_| "--q")),
        EnvName::SystemB => (a.q.map(|q| SystemKind::FlexibleCurve { q }), "--q", a.p.map(|_| "--p")),
        EnvName::SystemC => (a.p.map(|p| SystemKind::ProjectSelection { p }), "--p", a.q.map(|_| "--q")),
    };
    if let Some(flag) = stray {
        return usage(format!("{flag} does not apply to this system"));
    }
    let Some(kind) = kind else {
        return usage(format!("{needed} is required for this system"));
    };
    EnvSpec::new(kind, seed).map_err(|e| Failure::Usage(e.to_string()))
}

fn bracket(a: &BracketArgs) -> CliResult<Option<ThetaBracket>> {
    match (a.theta_min, a.theta_max) {
        (Some(lo), Some(hi)) => ThetaBracket::new(lo, hi).map(Some).map_err(|e| Failure::Usage(e.to_string())),
        _ => Ok(None),
    }
}

/// `geometric` or a comma-separated list of frame counts.
pub fn parse_checkpoints(spec: &str, frames: usize) -> std::result::Result<Vec<usize>, String> {
    if spec == "geometric" {
        return Ok(geometric_checkpoints(frames));
    }
    spec.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("invalid checkpoint `{s}`")))
        .collect()
}

/// `k_min:k_max`
pub fn parse_k_range(spec: &str) -> std::result::Result<(usize, usize), String> {
    let bad = || format!("invalid k range `{spec}` (expected k_min:k_max)");
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Rounds to nine significant digits and prints the shortest form of the result.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific notation parses");
    output::num(rounded)
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> CliResult<()> {
    let is_mc = a.env.env == EnvName::SystemC;
    let seed = match (is_mc, a.seed) {
        (true, None) => return usage("--seed is required for the systemC oracle"),
        (_, s) => s.unwrap_or(0),
    };
    let env = env_spec(&a.env, seed)?;
    let opts = SolveOptions {
        tol: a.oracle.tol,
        bracket: bracket(&a.bracket)?,
        mc_samples: a.oracle.mc_samples,
        mc_seed: None,
    };
    let res = solve_theta_star(&env, &opts).map_err(|e| match e {
        rrate_core::Error::Domain { .. } => Failure::Usage(e.to_string()),
        other => Failure::Runtime(format!("oracle failed for {}: {other}", describe_env(&env))),
    })?;
    let mut w = || -> std::io::Result<()> {
        writeln!(out, "theta_star={}", format_sig9(res.theta_star))?;
        if let Some(t) = res.t_star {
            writeln!(out, "t_star={}", format_sig9(t))?;
        }
        if let Some(r) = res.r_star {
            writeln!(out, "r_star={}", format_sig9(r))?;
        }
        if let Some(se) = res.std_error {
            writeln!(out, "std_error={}", format_sig9(se))?;
        }
        if let Some(n) = res.samples {
            writeln!(out, "samples={n}")?;
        }
        writeln!(out, "method={}", res.method.label())
    };
    w().map_err(io_err)
}

// mirrors the flag groups shared by `run`, `compare` and `rate`
#[allow(clippy::too_many_arguments)]
fn experiment_config(
    env: &EnvArgs,
    seed: u64,
    frames: usize,
    paths: usize,
    policies: Vec<PolicyKind>,
    bracket_args: &BracketArgs,
    checkpoints: &str,
    oracle: &OracleArgs,
    workers: Option<usize>,
) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(env_spec(env, seed)?, policies, frames, paths);
    cfg.bracket = bracket(bracket_args)?;
    cfg.checkpoints = parse_checkpoints(checkpoints, frames).map_err(Failure::Usage)?;
    cfg.workers = workers;
    cfg.oracle_tol = oracle.tol;
    cfg.mc_samples = oracle.mc_samples;
    cfg.validate()?;
    Ok(cfg)
}

fn run(a: &RunArgs, compare: bool, out: &mut dyn Write) -> CliResult<()> {
    let policies = if !a.policies.is_empty() {
        a.policies.clone()
    } else if compare {
        vec![PolicyKind::Proposed, PolicyKind::Greedy, PolicyKind::ThetaEmpirical]
    } else {
        vec![PolicyKind::Proposed]
    };
    if let Some(dup) = policies.iter().enumerate().find(|(i, p)| policies[..*i].contains(p)) {
        return usage(format!("policy `{}` listed twice", dup.1));
    }
    let mut cfg =
        experiment_config(&a.env, a.seed, a.frames, a.paths, policies, &a.bracket, &a.checkpoints, &a.oracle, a.workers)?;
    cfg.record_stride = a.record_stride;
    cfg.keep_trajectories = a.trajectories.unwrap_or(if compare { 0 } else { a.paths }).min(a.paths);
    cfg.validate()?;
    let exp = run_experiment(&cfg)?;
    write_experiment(&exp, &a.out)?;
    print_experiment(&exp, &a.out, out).map_err(io_err)
}

/// Writes every output file of an experiment below `dir`.
///
/// Layout: `final_ratios.csv`, `rejection.csv` (systemC) and, per policy,
/// `<policy>/summary.csv`, `<policy>/ratio_of_sums.csv`,
/// `<policy>/bounds.csv` (proposed) and `<policy>/trajectories/path_NNNNN.csv`.
pub fn write_experiment(exp: &Experiment, dir: &Path) -> crate::Result<()> {
    std::fs::create_dir_all(dir)?;
    let summaries: Vec<_> = exp.runs.iter().map(|r| &r.summary).collect();
    output::write_final_ratios(&dir.join("final_ratios.csv"), &summaries)?;
    if matches!(exp.config.env.kind, SystemKind::ProjectSelection { .. }) {
        output::write_rejections(&dir.join("rejection.csv"), &summaries)?;
    }
    for run in &exp.runs {
        let pdir = dir.join(run.summary.policy.name());
        output::write_summary(&pdir.join("summary.csv"), &run.summary)?;
        output::write_ratio_of_sums(&pdir.join("ratio_of_sums.csv"), &run.summary)?;
        if run.summary.policy == PolicyKind::Proposed {
            let report = check_bounds(&exp.config.env, exp.bracket, &run.summary)?;
            output::write_bounds(&pdir.join("bounds.csv"), &report)?;
        }
        for (i, traj) in run.trajectories.iter().enumerate() {
            output::write_trajectory(&trajectory_path(&pdir, i), traj)?;
        }
    }
    Ok(())
}

pub fn trajectory_path(policy_dir: &Path, path: usize) -> PathBuf {
    policy_dir.join("trajectories").join(format!("path_{path:05}.csv"))
}

fn print_experiment(exp: &Experiment, dir: &Path, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "env={} bracket=[{}, {}]", describe_env(&exp.config.env), exp.bracket.theta_min, exp.bracket.theta_max)?;
    writeln!(out, "theta_star={} ({})", format_sig9(exp.theta_star.value), exp.theta_star.origin)?;
    for run in &exp.runs {
        let s = &run.summary;
        let last = s.last();
        write!(
            out,
            "{}: mean_final_ratio={} stderr={} gap={}",
            s.policy,
            format_sig9(last.mean_ratio),
            format_sig9(last.stderr_ratio),
            format_sig9(last.gap)
        )?;
        if let Some(rate) = s.rejection_rate {
            write!(out, " rejection_rate={}", format_sig9(rate))?;
        }
        writeln!(out)?;
    }
    writeln!(out, "wrote {}", dir.display())
}

fn rate(a: &RateArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = experiment_config(
        &a.env,
        a.seed,
        a.frames,
        a.paths,
        vec![PolicyKind::Proposed],
        &a.bracket,
        &a.checkpoints,
        &a.oracle,
        a.workers,
    )?;
    let (k_min, k_max) = match &a.k_range {
        Some(s) => parse_k_range(s).map_err(Failure::Usage)?,
        None => (1, a.frames),
    };
    let metrics: &[RateMetric] = match a.metric {
        MetricArg::Gap => &[RateMetric::Gap],
        MetricArg::Mse => &[RateMetric::Mse],
        MetricArg::Both => &[RateMetric::Gap, RateMetric::Mse],
    };
    let exp = run_experiment(&cfg)?;
    let summary = &exp.runs[0].summary;
    let mut rows = Vec::new();
    for &m in metrics {
        let fit = fit_rate(summary, m, k_min, k_max).map_err(|e| Failure::Runtime(format!("{} fit: {e}", m.name())))?;
        rows.push(output::RateRow { metric: m.name(), k_min, k_max, fit });
    }
    let pdir = a.out.join(PolicyKind::Proposed.name());
    output::write_summary(&pdir.join("summary.csv"), summary)?;
    output::write_ratio_of_sums(&pdir.join("ratio_of_sums.csv"), summary)?;
    output::write_rates(&a.out.join("rate.csv"), &rows)?;
    let mut w = || -> std::io::Result<()> {
        for r in &rows {
            writeln!(
                out,
                "{}: slope={} intercept={} r_squared={} points={}",
                r.metric,
                format_sig9(r.fit.slope),
                format_sig9(r.fit.intercept),
                format_sig9(r.fit.r_squared),
                r.fit.points
            )?;
        }
        writeln!(out, "wrote {}", a.out.display())
    };
    w().map_err(io_err)
}

fn probe(a: &ProbeArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(d) = a.deltas.iter().find(|d| !(0.0..=0.5).contains(*d)) {
        return usage(format!("delta {d} outside [0, 0.5]"));
    }
    if a.frames == 0 || a.paths == 0 {
        return usage("frames and paths must be at least 1");
    }
    let cfg = ProbeConfig {
        deltas: a.deltas.clone(),
        frames: a.frames,
        paths: a.paths,
        seed: a.seed,
        bracket: bracket(&a.bracket)?,
        workers: a.workers,
    };
    let rows = near_threshold_probe(&cfg)?;
    output::write_probe(&a.out.join("probe.csv"), &rows)?;
    let mut w = || -> std::io::Result<()> {
        for r in rows.iter().filter(|r| r.checkpoint == a.frames) {
            writeln!(out, "p={} gap={} stderr={}", r.p, format_sig9(r.gap), format_sig9(r.stderr_gap))?;
        }
        writeln!(out, "wrote {}", a.out.display())
    };
    w().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(2.5), "2.5");
        assert_eq!(format_sig9(6.0 / 3.5), "1.71428571");
        assert_eq!(format_sig9(1.1318838856), "1.13188389");
        assert_eq!(format_sig9(123456789012.0), "123456789000");
    }

    #[test]
    fn checkpoint_specs() {
        assert_eq!(parse_checkpoints("geometric", 5).unwrap(), vec![1, 2, 4, 5]);
        assert_eq!(parse_checkpoints("1, 10,100", 100).unwrap(), vec![1, 10, 100]);
        assert!(parse_checkpoints("1,x", 100).is_err());
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("100:100000").unwrap(), (100, 100_000));
        assert!(parse_k_range("0:10").is_err());
        assert!(parse_k_range("10:1").is_err());
        assert!(parse_k_range("10").is_err());
    }

    fn exit(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(std::iter::once("rrate").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(exit(&["solve", "--env", "systemA"]).0, 2);
        assert_eq!(exit(&["solve", "--env", "systemA", "--p", "0.3", "--q", "0.2"]).0, 2);
        assert_eq!(exit(&["solve", "--env", "systemA", "--p", "1.5"]).0, 2);
        assert_eq!(exit(&["solve", "--env", "systemD", "--p", "0.3"]).0, 2);
        assert_eq!(exit(&["solve", "--env", "systemC", "--p", "0.3"]).0, 2);
        assert_eq!(exit(&["solve", "--env", "systemA", "--p", "0.3", "--bogus"]).0, 2);
        assert_eq!(exit(&["run", "--env", "systemA", "--p", "0.3", "--frames", "10", "--paths", "1"]).0, 2);
    }

    #[test]
    fn solve_prints_theta_star() {
        let (code, text) = exit(&["solve", "--env", "systemA", "--p", "0.25"]);
        assert_eq!(code, 0);
        assert!(text.starts_with("theta_star=2.5\n"), "{text}");
    }
}
