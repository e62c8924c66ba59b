use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A finite decision set with no options.
    EmptyDecisionSet,
    /// A decision with nonpositive or non-finite duration, or non-finite reward.
    InvalidDecision { t: f64, r: f64 },
    /// A curve whose domain is empty or leaves the positive-duration half plane.
    InvalidCurve { x_lo: f64, x_hi: f64 },
    /// The curve descriptor has no closed-form best response.
    UnsupportedCurve,
    /// A parameter outside its admissible range.
    Domain { what: &'static str, value: f64 },
    /// The bracket is not ordered or not finite.
    InvalidBracket { theta_min: f64, theta_max: f64 },
    /// M(theta) has no sign change across the bracket.
    BracketNoSignChange { m_lo: f64, m_hi: f64 },
    /// Exact evaluation is not available for this system.
    Unsupported { what: &'static str },
    /// Closed form and bisection disagree.
    OracleDisagreement { closed_form: f64, bisection: f64 },
    /// Too few usable points for a fit.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDecisionSet => write!(f, "decision set is empty"),
            Error::InvalidDecision { t, r } => {
                write!(f, "invalid decision (t={t}, r={r}): duration must be finite and positive")
            }
            Error::InvalidCurve { x_lo, x_hi } => write!(f, "invalid curve domain [{x_lo}, {x_hi}]"),
            Error::UnsupportedCurve => write!(f, "curve descriptor has no closed-form best response"),
            Error::Domain { what, value } => write!(f, "{what} out of range: {value}"),
            Error::InvalidBracket { theta_min, theta_max } => {
                write!(f, "invalid theta bracket [{theta_min}, {theta_max}]")
            }
            Error::BracketNoSignChange { m_lo, m_hi } => write!(
                f,
                "bracket does not straddle the root: M(theta_min)={m_lo}, M(theta_max)={m_hi}"
            ),
            Error::Unsupported { what } => write!(f, "unsupported: {what}"),
            Error::OracleDisagreement { closed_form, bisection } => write!(
                f,
                "closed-form theta*={closed_form} disagrees with bisection theta*={bisection}"
            ),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need {needed} points, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
