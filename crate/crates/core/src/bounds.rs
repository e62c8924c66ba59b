//! Finite-horizon guarantees of the controller with stepsize
//! `1 / ((k + 2) T_min)`.
//!
//! * mean squared error: `E[(theta[k] - theta*)^2] <= 2b / (k T_min^2)`, `k >= 1`
//! * general gap, `K >= 2`:
//!   `sqrt(2 C1) / (K T_min) * (|theta[0] - theta*| + (sqrt(8b(K-1)) - sqrt(2b)) / T_min)`
//! * gap under a strongly concave frontier with curvature `c`, `K >= 2`:
//!   `(2 (theta[0] - theta*)^2 + 4b / T_min^2 * (1 + ln(K-1))) / (K c T_min)`
//!
//! The gaps are for the ratio of expected sums `sum E[R] / sum E[T]`.
//! `b` must satisfy `E[(R - theta T)^2] / 2 <= b` for every `theta` in the
//! bracket and `C1` must bound `E[T^2]`.

use crate::controller::ThetaBracket;
use crate::decision::DecisionSet;
use crate::env::{EnvSpec, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub b: f64,
    pub c1: f64,
}

/// Valid (not necessarily tight) `b` and `C1` for `spec` on `bracket`.
///
/// With finitely many task types `b` is half the largest `(r - theta t)^2`
/// over every option and every `theta` in the bracket. Project selection
/// falls back to `(R_max + theta_max T_max)^2 / 2`.
pub fn derive_constants(spec: &EnvSpec, bracket: ThetaBracket) -> BoundConstants {
    let m = spec.moments();
    let worst = match spec.support() {
        Some(support) => support.iter().map(|(_, set)| max_abs_score(set, bracket)).fold(0.0, f64::max),
        None => m.r_max.abs() + bracket.theta_max.abs() * m.t_max,
    };
    BoundConstants { b: 0.5 * worst * worst, c1: m.c1 }
}

/// `max |r - theta t|` over the set and the bracket. The score is affine in
/// `theta`, so the bracket ends suffice; on the concave curve the extremes sit
/// at the domain ends or the interior maximizer.
fn max_abs_score(set: &DecisionSet, bracket: ThetaBracket) -> f64 {
    let candidates = |theta: f64| -> f64 {
        match set {
            DecisionSet::Finite(options) => options.iter().map(|d| d.score(theta).abs()).fold(0.0, f64::max),
            DecisionSet::Curve { x_lo, x_hi, curve } => {
                let xs = [*x_lo, *x_hi, curve.argmax(theta, *x_lo, *x_hi)];
                xs.iter().map(|&x| curve.point(x).score(theta).abs()).fold(0.0, f64::max)
            }
        }
    };
    candidates(bracket.theta_min).max(candidates(bracket.theta_max))
}

/// Curvature `c` of the frontier around the optimum, when known. For the
/// flexible-curve system the frontier satisfies
/// `r <= theta* t - (t - t*)^2 / q`, and `c = 1/q` is used.
pub fn curvature_constant(spec: &EnvSpec) -> Option<f64> {
    match spec.kind {
        SystemKind::FlexibleCurve { q } if q > 0.0 => Some(1.0 / q),
        _ => None,
    }
}

pub fn mse_bound(k: u64, b: f64, t_min: f64) -> f64 {
    2.0 * b / (k as f64 * t_min * t_min)
}

/// `None` for `K < 2`.
pub fn general_gap_bound(k_frames: u64, consts: BoundConstants, t_min: f64, theta0: f64, theta_star: f64) -> Option<f64> {
    if k_frames < 2 {
        return None;
    }
    let k = k_frames as f64;
    let b = consts.b;
    let tail = (libm::sqrt(8.0 * b * (k - 1.0)) - libm::sqrt(2.0 * b)) / t_min;
    Some(libm::sqrt(2.0 * consts.c1) / (k * t_min) * ((theta0 - theta_star).abs() + tail))
}

/// `None` for `K < 2`.
pub fn concave_gap_bound(k_frames: u64, b: f64, c: f64, t_min: f64, theta0: f64, theta_star: f64) -> Option<f64> {
    if k_frames < 2 {
        return None;
    }
    let k = k_frames as f64;
    let d0 = theta0 - theta_star;
    let num = 2.0 * d0 * d0 + 4.0 * b / (t_min * t_min) * (1.0 + libm::log(k - 1.0));
    Some(num / (k * c * t_min))
}
