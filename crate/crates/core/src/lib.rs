//! Online optimization of reward per unit time over a sequence of renewal
//! frames.
//!
//! Every frame the controller observes a decision set of `(duration, reward)`
//! pairs, picks the pair maximizing `r - theta * t`, and moves `theta` toward
//! the optimal ratio with a projected Robbins-Monro step. The crate also ships
//! the three benchmark systems, exact and Monte-Carlo oracles for the optimal
//! ratio, baseline policies, and the closed-form convergence bounds.
//!
//! The crate is `no_std` (it needs `alloc`). IO, parallel experiment
//! scheduling and the command line live in the `rrate` companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod controller;
pub mod decision;
pub mod env;
pub mod error;
pub mod oracle;
pub mod policy;
pub mod stats;

pub use controller::{default_bracket, stepsize, ControllerState, FrameRecord, RunRecord, ThetaBracket};
pub use decision::{best_response, enumerate_grid, BestResponse, Curve, Decision, DecisionSet};
pub use env::{EnvSpec, Environment, Frame, MomentConstants, StationaryChoice, SystemKind, TaskType};
pub use error::{Error, Result};
pub use oracle::{m_function, m_function_mc, solve_theta_star, McEstimate, OracleMethod, OracleResult, SolveOptions};
pub use policy::Policy;
