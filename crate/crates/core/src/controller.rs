//! The projected Robbins-Monro ratio controller.
//!
//! Frame `k`: pick the best response at `theta[k]`, then
//! `theta[k+1] = clamp(theta[k] + eta[k] * (R[k] - theta[k] T[k]))` with
//! `eta[k] = 1 / ((k + 2) T_min)`.

use alloc::vec::Vec;
use core::borrow::Borrow;

use crate::decision::{best_response, Decision, DecisionSet};
use crate::error::{Error, Result};

/// Closed interval known to contain the optimal ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBracket {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl ThetaBracket {
    pub fn new(theta_min: f64, theta_max: f64) -> Result<Self> {
        if theta_min.is_finite() && theta_max.is_finite() && theta_min <= theta_max {
            Ok(ThetaBracket { theta_min, theta_max })
        } else {
            Err(Error::InvalidBracket { theta_min, theta_max })
        }
    }

    /// Projection onto the bracket. Nonexpansive.
    #[inline]
    pub fn project(&self, x: f64) -> f64 {
        x.clamp(self.theta_min, self.theta_max)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.theta_min <= x && x <= self.theta_max
    }

    pub fn width(&self) -> f64 {
        self.theta_max - self.theta_min
    }
}

/// Bracket derived from the moment bounds: the extreme ratios of
/// `R_min` and `R_max` against `T_min` and `T_max`.
pub fn default_bracket(t_min: f64, t_max: f64, r_min: f64, r_max: f64) -> Result<ThetaBracket> {
    if !(t_min > 0.0 && t_min.is_finite()) {
        return Err(Error::Domain { what: "t_min", value: t_min });
    }
    if !(t_max >= t_min && t_max.is_finite()) {
        return Err(Error::Domain { what: "t_max", value: t_max });
    }
    if !(r_max >= r_min && r_min.is_finite() && r_max.is_finite()) {
        return Err(Error::Domain { what: "r_max", value: r_max });
    }
    ThetaBracket::new((r_min / t_min).min(r_min / t_max), (r_max / t_min).max(r_max / t_max))
}

/// `1 / ((k + 2) t_min)`
#[inline]
pub fn stepsize(k: u64, t_min: f64) -> f64 {
    1.0 / ((k as f64 + 2.0) * t_min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub theta: f64,
    pub frame: u64,
    pub bracket: ThetaBracket,
    pub t_min: f64,
}

impl ControllerState {
    /// Starts at `theta[0] = theta_min`.
    pub fn new(bracket: ThetaBracket, t_min: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite()) {
            return Err(Error::Domain { what: "t_min", value: t_min });
        }
        Ok(ControllerState { theta: bracket.theta_min, frame: 0, bracket, t_min })
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !self.bracket.contains(theta) {
            return Err(Error::Domain { what: "initial theta", value: theta });
        }
        self.theta = theta;
        Ok(self)
    }

    /// One frame: best response at the current `theta`, then the projected update.
    pub fn step(&self, set: &DecisionSet) -> Result<(Decision, ControllerState)> {
        let decision = best_response(set, self.theta)?.decision;
        let eta = stepsize(self.frame, self.t_min);
        let next = ControllerState {
            theta: self.bracket.project(self.theta + eta * (decision.r - self.theta * decision.t)),
            frame: self.frame + 1,
            ..*self
        };
        Ok((decision, next))
    }
}

/// One trajectory row: `theta` is the value used on `frame`, and
/// `cum_ratio` covers frames `0..=frame`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRecord {
    pub frame: u64,
    pub theta: f64,
    pub t: f64,
    pub r: f64,
    pub cum_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub frames: Vec<FrameRecord>,
    pub final_state: ControllerState,
}

impl RunRecord {
    pub fn final_ratio(&self) -> Option<f64> {
        self.frames.last().map(|f| f.cum_ratio)
    }
}

/// Applies `step` to the first `k_frames` sets of `stream`.
pub fn run<I, B>(state: ControllerState, stream: I, k_frames: usize) -> Result<RunRecord>
where
    I: IntoIterator<Item = B>,
    B: Borrow<DecisionSet>,
{
    if k_frames == 0 {
        return Err(Error::Domain { what: "frame count", value: 0.0 });
    }
    let mut frames = Vec::with_capacity(k_frames);
    let mut state = state;
    let (mut sum_r, mut sum_t) = (0.0, 0.0);
    let mut stream = stream.into_iter();
    for _ in 0..k_frames {
        let set = stream.next().ok_or(Error::InsufficientData { needed: k_frames, got: frames.len() })?;
        let (d, next) = state.step(set.borrow())?;
        sum_r += d.r;
        sum_t += d.t;
        frames.push(FrameRecord { frame: state.frame, theta: state.theta, t: d.t, r: d.r, cum_ratio: sum_r / sum_t });
        state = next;
    }
    Ok(RunRecord { frames, final_state: state })
}
