//! Committed high-budget estimates of `theta*` for the project-selection
//! system, which has no closed form.
//!
//! Regenerate with `make goldens`: Monte-Carlo bisection on `[0, 50]` with
//! 10^7 frames per evaluation and seed [`GOLDEN_SEED`].

use rrate_core::SystemKind;

pub const GOLDEN_SEED: u64 = 20200817;
pub const GOLDEN_SAMPLES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenTheta {
    pub p: f64,
    pub theta_star: f64,
    pub std_error: f64,
}

pub const PROJECT_SELECTION: [GoldenTheta; 4] = [
    GoldenTheta { p: 0.0, theta_star: 30.8898926, std_error: 0.00487082154 },
    GoldenTheta { p: 0.3, theta_star: 33.7341309, std_error: 0.00431584226 },
    GoldenTheta { p: 0.6, theta_star: 36.0168457, std_error: 0.00375137151 },
    GoldenTheta { p: 0.9, theta_star: 37.8723145, std_error: 0.00324176543 },
];

pub fn project_selection(kind: &SystemKind) -> Option<GoldenTheta> {
    match *kind {
        SystemKind::ProjectSelection { p } => PROJECT_SELECTION.iter().copied().find(|g| g.p == p),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(project_selection(&SystemKind::ProjectSelection { p: 0.6 }).unwrap().theta_star, 36.0168457);
        assert!(project_selection(&SystemKind::ProjectSelection { p: 0.5 }).is_none());
        assert!(project_selection(&SystemKind::TwoChoice { p: 0.6 }).is_none());
    }

    #[test]
    fn ordered_in_p() {
        assert!(PROJECT_SELECTION.windows(2).all(|w| w[0].p < w[1].p && w[0].theta_star < w[1].theta_star));
    }
}
