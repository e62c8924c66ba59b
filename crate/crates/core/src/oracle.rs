//! Independent computation of the optimal ratio `theta*`.
//!
//! `theta*` is the unique root of the strictly decreasing function
//! `M(theta) = E[ max over D(S) of (r - theta t) ]`. The two systems with
//! finitely many task types have closed forms, which are cross-checked
//! against bisection on the exact `M`. Project selection uses bisection on a
//! Monte-Carlo estimate of `M` with common random numbers.

use crate::controller::ThetaBracket;
use crate::decision::best_response;
use crate::env::{EnvSpec, Environment, SystemKind};
use crate::error::{Error, Result};
use crate::stats::RunningStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedForm,
    Bisection,
    MonteCarloBisection,
}

impl OracleMethod {
    pub fn label(&self) -> &'static str {
        match self {
            OracleMethod::ClosedForm => "closed-form",
            OracleMethod::Bisection => "bisection",
            OracleMethod::MonteCarloBisection => "monte-carlo-bisection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub theta_star: f64,
    pub t_star: Option<f64>,
    pub r_star: Option<f64>,
    pub method: OracleMethod,
    /// Half-width of the final bisection bracket, or zero for closed forms.
    pub tolerance: f64,
    /// Bisection root used to cross-check a closed form.
    pub cross_check: Option<f64>,
    /// Monte-Carlo only: standard error of `theta*` propagated from the
    /// standard error of `M` at the root.
    pub std_error: Option<f64>,
    /// Monte-Carlo only: samples per evaluation of `M`.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Overrides the moment-derived bracket.
    pub bracket: Option<ThetaBracket>,
    pub mc_samples: usize,
    /// Seed of the Monte-Carlo frames; the spec's own seed when `None`.
    pub mc_seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-9, bracket: None, mc_samples: 1_000_000, mc_seed: None }
    }
}

/// Exact `M(theta)` for the systems with finitely many task types.
pub fn m_function(spec: &EnvSpec, theta: f64) -> Result<f64> {
    let support = spec.support().ok_or(Error::Unsupported { what: "exact M for project selection" })?;
    support.iter().try_fold(0.0, |acc, (prob, set)| Ok(acc + prob * best_response(set, theta)?.value))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Sample mean duration of the best responses, `-dM/dtheta`.
    pub mean_t: f64,
}

/// Sample-average `M(theta)` over `n_samples` frames drawn from `seed`. The
/// same seed gives the same frames for every `theta`.
pub fn m_function_mc(spec: &EnvSpec, theta: f64, n_samples: usize, seed: u64) -> Result<McEstimate> {
    if n_samples < 100 {
        return Err(Error::Domain { what: "Monte-Carlo samples", value: n_samples as f64 });
    }
    let mut env = Environment::new(EnvSpec { seed, ..*spec });
    let mut values = RunningStats::new();
    let mut sum_t = 0.0;
    for _ in 0..n_samples {
        let br = best_response(&env.next_frame().set, theta)?;
        values.push(br.value);
        sum_t += br.decision.t;
    }
    Ok(McEstimate { estimate: values.mean(), std_error: values.std_error(), mean_t: sum_t / n_samples as f64 })
}

/// Bisection for the root of a nonincreasing `f` on `bracket`, stopping once
/// the bracket is narrower than `width`.
pub fn bisect<F>(mut f: F, bracket: ThetaBracket, width: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (bracket.theta_min, bracket.theta_max);
    let (m_lo, m_hi) = (f(lo)?, f(hi)?);
    if !(m_lo >= 0.0 && m_hi <= 0.0) {
        return Err(Error::BracketNoSignChange { m_lo, m_hi });
    }
    if m_lo == 0.0 {
        return Ok((lo, 0.0));
    }
    if m_hi == 0.0 {
        return Ok((hi, 0.0));
    }
    for _ in 0..200 {
        if hi - lo < width {
            break;
        }
        let mid = lo + (hi - lo) / 2.0;
        let m = f(mid)?;
        if m > 0.0 {
            lo = mid;
        } else if m < 0.0 {
            hi = mid;
        } else {
            return Ok((mid, 0.0));
        }
    }
    Ok((lo + (hi - lo) / 2.0, (hi - lo) / 2.0))
}

/// `theta*` with the optimal point where one is known.
pub fn solve_theta_star(spec: &EnvSpec, opts: &SolveOptions) -> Result<OracleResult> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain { what: "tolerance", value: opts.tol });
    }
    let bracket = opts.bracket.unwrap_or_else(|| spec.default_bracket());
    match spec.kind {
        SystemKind::TwoChoice { p } => {
            let low = 3.0 - 2.0 * p;
            let high = 3.0 / (1.0 + p);
            // always-high is optimal from p = 1/2 on
            let (theta_star, t_star, r_star) = if p >= 0.5 { (high, 1.0 + p, 3.0) } else { (low, 1.0, low) };
            closed_form_checked(spec, bracket, opts.tol, theta_star, t_star, r_star)
        }
        SystemKind::FlexibleCurve { q } => {
            let (theta_star, t_star, r_star) = if q == 0.0 {
                (1.0, 1.0, 1.0)
            } else {
                let root = libm::sqrt(1.0 + q);
                (2.0 - (2.0 / q) * (root - 1.0), root, 2.0 * (q + 1.0) * (root - 1.0) / q)
            };
            closed_form_checked(spec, bracket, opts.tol, theta_star, t_star, r_star)
        }
        SystemKind::ProjectSelection { .. } => {
            let seed = opts.mc_seed.unwrap_or(spec.seed);
            let n = opts.mc_samples;
            let (mut lo, mut hi) = (bracket.theta_min, bracket.theta_max);
            let (m_lo, m_hi) = (m_function_mc(spec, lo, n, seed)?, m_function_mc(spec, hi, n, seed)?);
            if !(m_lo.estimate >= 0.0 && m_hi.estimate <= 0.0) {
                return Err(Error::BracketNoSignChange { m_lo: m_lo.estimate, m_hi: m_hi.estimate });
            }
            let mut theta_se;
            loop {
                let mid = lo + (hi - lo) / 2.0;
                let m = m_function_mc(spec, mid, n, seed)?;
                theta_se = m.std_error / m.mean_t;
                if hi - lo < opts.tol.max(4.0 * theta_se) {
                    break;
                }
                if m.estimate > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(OracleResult {
                theta_star: lo + (hi - lo) / 2.0,
                t_star: None,
                r_star: None,
                method: OracleMethod::MonteCarloBisection,
                tolerance: (hi - lo) / 2.0,
                cross_check: None,
                std_error: Some(theta_se),
                samples: Some(n),
            })
        }
    }
}

fn closed_form_checked(
    spec: &EnvSpec,
    bracket: ThetaBracket,
    tol: f64,
    theta_star: f64,
    t_star: f64,
    r_star: f64,
) -> Result<OracleResult> {
    let (bisection, _) = bisect(|theta| m_function(spec, theta), bracket, tol)?;
    if (bisection - theta_star).abs() > tol {
        return Err(Error::OracleDisagreement { closed_form: theta_star, bisection });
    }
    Ok(OracleResult {
        theta_star,
        t_star: Some(t_star),
        r_star: Some(r_star),
        method: OracleMethod::ClosedForm,
        tolerance: 0.0,
        cross_check: Some(bisection),
        std_error: None,
        samples: None,
    })
}
