//! Seeded generators for the three benchmark systems.
//!
//! * `TwoChoice { p }`: type 1 with probability `p`. Type 0 offers only
//!   `(1, 3)`; type 1 offers high quality `(2, 3)` or low quality `(1, 1)`.
//! * `FlexibleCurve { q }`: type 1 with probability `q`. Type 0 offers only
//!   `(1, 1)`; type 1 offers any point `(x, 2 - (2 - x)^2)` with `x` in `[1, 2]`.
//! * `ProjectSelection { p }`: `N` project offers with
//!   `P[N = 0, 1, 2, 3] = (0.1, 0.9 - p, p/2, p/2)`, each with
//!   `T ~ U[1, 10]` and `R = A T`, `A ~ U[0, 50]`. Rejecting all offers,
//!   `(1, 0)`, is always available and is listed first.
//!
//! Randomness comes from ChaCha8 keyed by the seed. Independent sample paths
//! use distinct ChaCha stream ids, so path `i` draws the same numbers no matter
//! which worker runs it or in what order.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::{default_bracket, ThetaBracket};
use crate::decision::{Curve, Decision, DecisionSet};
use crate::error::{Error, Result};

/// The always-available reject option of the project-selection system.
pub const REJECT: Decision = Decision { t: 1.0, r: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemKind {
    TwoChoice { p: f64 },
    FlexibleCurve { q: f64 },
    ProjectSelection { p: f64 },
}

impl SystemKind {
    /// Command-line name.
    pub fn label(&self) -> &'static str {
        match self {
            SystemKind::TwoChoice { .. } => "systemA",
            SystemKind::FlexibleCurve { .. } => "systemB",
            SystemKind::ProjectSelection { .. } => "systemC",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            SystemKind::TwoChoice { p } | SystemKind::ProjectSelection { p } => p,
            SystemKind::FlexibleCurve { q } => q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSpec {
    pub kind: SystemKind,
    pub seed: u64,
}

impl EnvSpec {
    pub fn new(kind: SystemKind, seed: u64) -> Result<Self> {
        let in_range = |lo: f64, hi: f64, v: f64| lo <= v && v <= hi;
        match kind {
            SystemKind::TwoChoice { p } if !in_range(0.0, 1.0, p) => Err(Error::Domain { what: "p", value: p }),
            SystemKind::FlexibleCurve { q } if !in_range(0.0, 1.0, q) => Err(Error::Domain { what: "q", value: q }),
            SystemKind::ProjectSelection { p } if !in_range(0.0, 0.9, p) => {
                Err(Error::Domain { what: "p", value: p })
            }
            _ => Ok(EnvSpec { kind, seed }),
        }
    }

    pub fn two_choice(p: f64, seed: u64) -> Result<Self> {
        Self::new(SystemKind::TwoChoice { p }, seed)
    }

    pub fn flexible_curve(q: f64, seed: u64) -> Result<Self> {
        Self::new(SystemKind::FlexibleCurve { q }, seed)
    }

    pub fn project_selection(p: f64, seed: u64) -> Result<Self> {
        Self::new(SystemKind::ProjectSelection { p }, seed)
    }

    pub fn moments(&self) -> MomentConstants {
        match self.kind {
            SystemKind::TwoChoice { .. } => {
                MomentConstants { t_min: 1.0, t_max: 2.0, r_min: 1.0, r_max: 3.0, c1: 4.0, c2: 9.0 }
            }
            SystemKind::FlexibleCurve { .. } => {
                MomentConstants { t_min: 1.0, t_max: 2.0, r_min: 1.0, r_max: 2.0, c1: 4.0, c2: 4.0 }
            }
            SystemKind::ProjectSelection { .. } => {
                MomentConstants { t_min: 1.0, t_max: 10.0, r_min: 0.0, r_max: 500.0, c1: 100.0, c2: 250_000.0 }
            }
        }
    }

    /// Bracket implied by the declared moment bounds.
    pub fn default_bracket(&self) -> ThetaBracket {
        let m = self.moments();
        default_bracket(m.t_min, m.t_max, m.r_min, m.r_max).expect("declared moments are valid")
    }

    /// The task-type distribution as `(probability, decision set)` pairs, for
    /// systems with finitely many types. `None` for project selection.
    pub fn support(&self) -> Option<Vec<(f64, DecisionSet)>> {
        match self.kind {
            SystemKind::TwoChoice { p } => Some(vec![(1.0 - p, red()), (p, green())]),
            SystemKind::FlexibleCurve { q } => Some(vec![(1.0 - q, inflexible()), (q, flexible())]),
            SystemKind::ProjectSelection { .. } => None,
        }
    }

    /// Exact one-frame expectation `(E[T], E[R])` of a stationary per-type choice.
    pub fn stationary_expectation(&self, choice: StationaryChoice) -> Result<(f64, f64)> {
        match (self.kind, choice) {
            (SystemKind::TwoChoice { p }, StationaryChoice::TwoChoice { high }) => {
                let d = if high { HIGH } else { LOW };
                Ok(((1.0 - p) * 1.0 + p * d.t, (1.0 - p) * 3.0 + p * d.r))
            }
            (SystemKind::FlexibleCurve { q }, StationaryChoice::Curve { x }) => {
                if !(1.0..=2.0).contains(&x) {
                    return Err(Error::Domain { what: "curve parameter x", value: x });
                }
                let d = Curve::DiminishingReturns.point(x);
                Ok((1.0 - q + q * d.t, (1.0 - q) + q * d.r))
            }
            (SystemKind::ProjectSelection { .. }, _) => {
                Err(Error::Unsupported { what: "exact stationary expectation for project selection" })
            }
            _ => Err(Error::Unsupported { what: "stationary choice does not match the system" }),
        }
    }
}

/// Bounds on first and second moments of `T` and `R` that hold under any
/// decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConstants {
    pub t_min: f64,
    pub t_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// bound on `E[T^2]`
    pub c1: f64,
    /// bound on `E[R^2]`
    pub c2: f64,
}

/// A fixed per-type choice, used for exact one-frame expectations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationaryChoice {
    /// On type 1 pick high quality `(2, 3)` or low quality `(1, 1)`.
    TwoChoice { high: bool },
    /// On type 1 pick the curve point at `x`.
    Curve { x: f64 },
}

/// Opaque task label. Only used for statistics, never by a controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskType {
    Binary(u8),
    Offers(u8),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub task: TaskType,
    pub set: DecisionSet,
}

const HIGH: Decision = Decision { t: 2.0, r: 3.0 };
const LOW: Decision = Decision { t: 1.0, r: 1.0 };

fn red() -> DecisionSet {
    DecisionSet::Finite(vec![Decision { t: 1.0, r: 3.0 }])
}

fn green() -> DecisionSet {
    DecisionSet::Finite(vec![HIGH, LOW])
}

fn inflexible() -> DecisionSet {
    DecisionSet::Finite(vec![Decision { t: 1.0, r: 1.0 }])
}

fn flexible() -> DecisionSet {
    DecisionSet::Curve { x_lo: 1.0, x_hi: 2.0, curve: Curve::DiminishingReturns }
}

/// A frame generator for one sample path.
#[derive(Debug, Clone)]
pub struct Environment {
    spec: EnvSpec,
    rng: ChaCha8Rng,
}

impl Environment {
    pub fn new(spec: EnvSpec) -> Self {
        Self::substream(spec, 0)
    }

    /// Generator for sample path `path` under the spec's base seed.
    pub fn substream(spec: EnvSpec, path: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(path);
        Environment { spec, rng }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn moments(&self) -> MomentConstants {
        self.spec.moments()
    }

    pub fn next_frame(&mut self) -> Frame {
        match self.spec.kind {
            SystemKind::TwoChoice { p } => {
                if self.rng.gen::<f64>() < p {
                    Frame { task: TaskType::Binary(1), set: green() }
                } else {
                    Frame { task: TaskType::Binary(0), set: red() }
                }
            }
            SystemKind::FlexibleCurve { q } => {
                if self.rng.gen::<f64>() < q {
                    Frame { task: TaskType::Binary(1), set: flexible() }
                } else {
                    Frame { task: TaskType::Binary(0), set: inflexible() }
                }
            }
            SystemKind::ProjectSelection { p } => {
                let u = self.rng.gen::<f64>();
                // cumulative (0.1, 1 - p, 1 - p/2, 1)
                let n: u8 = if u < 0.1 {
                    0
                } else if u < 1.0 - p {
                    1
                } else if u < 1.0 - p / 2.0 {
                    2
                } else {
                    3
                };
                let mut options = Vec::with_capacity(n as usize + 1);
                options.push(REJECT);
                for _ in 0..n {
                    let t = 1.0 + 9.0 * self.rng.gen::<f64>();
                    let a = 50.0 * self.rng.gen::<f64>();
                    options.push(Decision { t, r: a * t });
                }
                Frame { task: TaskType::Offers(n), set: DecisionSet::Finite(options) }
            }
        }
    }
}

impl Iterator for Environment {
    type Item = Frame;

    fn next(&mut self) -> Option<Frame> {
        Some(self.next_frame())
    }
}
