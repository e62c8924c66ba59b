//! Policies behind one interface: the ratio controller and its baselines.

use crate::controller::{ControllerState, ThetaBracket};
use crate::decision::{best_response, Decision, DecisionSet};
use crate::error::Result;

/// Points used to approximate the greedy ratio maximizer on a curve.
pub const GREEDY_CURVE_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// The projected Robbins-Monro controller.
    Proposed(ControllerState),
    /// Picks the option with the best reward per unit time.
    Greedy,
    /// Best response at the empirical ratio seen so far, clamped to the
    /// bracket; `theta_min` before any time has elapsed.
    ThetaEmpirical { sum_r: f64, sum_t: f64, bracket: ThetaBracket },
    /// Best response at a pinned `theta`.
    FixedTheta(f64),
}

impl Policy {
    pub fn theta_empirical(bracket: ThetaBracket) -> Self {
        Policy::ThetaEmpirical { sum_r: 0.0, sum_t: 0.0, bracket }
    }

    /// Stable name used in file names and CSV headers.
    pub fn describe(&self) -> &'static str {
        match self {
            Policy::Proposed(_) => "proposed",
            Policy::Greedy => "greedy",
            Policy::ThetaEmpirical { .. } => "theta-empirical",
            Policy::FixedTheta(_) => "fixed-theta",
        }
    }

    /// The `theta` the next decision will be made at, if the policy has one.
    pub fn theta(&self) -> Option<f64> {
        match *self {
            Policy::Proposed(state) => Some(state.theta),
            Policy::Greedy => None,
            Policy::ThetaEmpirical { sum_r, sum_t, bracket } => {
                if sum_t > 0.0 {
                    Some(bracket.project(sum_r / sum_t))
                } else {
                    Some(bracket.theta_min)
                }
            }
            Policy::FixedTheta(theta) => Some(theta),
        }
    }

    pub fn act(&mut self, set: &DecisionSet) -> Result<Decision> {
        match self {
            Policy::Proposed(state) => {
                let (d, next) = state.step(set)?;
                *state = next;
                Ok(d)
            }
            Policy::Greedy => greedy(set),
            Policy::ThetaEmpirical { .. } => {
                let theta = self.theta().expect("theta-empirical always has a theta");
                let d = best_response(set, theta)?.decision;
                if let Policy::ThetaEmpirical { sum_r, sum_t, .. } = self {
                    *sum_r += d.r;
                    *sum_t += d.t;
                }
                Ok(d)
            }
            Policy::FixedTheta(theta) => Ok(best_response(set, *theta)?.decision),
        }
    }
}

fn greedy(set: &DecisionSet) -> Result<Decision> {
    set.validate()?;
    let pick = |acc: Decision, d: Decision| {
        let (a, b) = (acc.ratio(), d.ratio());
        if b > a || (b == a && d.t < acc.t) {
            d
        } else {
            acc
        }
    };
    match set {
        DecisionSet::Finite(options) => Ok(options[1..].iter().copied().fold(options[0], pick)),
        DecisionSet::Curve { x_lo, x_hi, curve } => {
            let n = GREEDY_CURVE_GRID;
            let step = (x_hi - x_lo) / (n - 1) as f64;
            let first = curve.point(*x_lo);
            Ok((1..n)
                .map(|i| curve.point(if i + 1 == n { *x_hi } else { x_lo + step * i as f64 }))
                .fold(first, pick))
        }
    }
}
