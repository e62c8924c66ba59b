//! Decision sets and the per-frame best response `max { r - theta * t }`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One `(duration, reward)` option. Durations are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub t: f64,
    pub r: f64,
}

impl Decision {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        let d = Decision { t, r };
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.t > 0.0 && self.t.is_finite() && self.r.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidDecision { t: self.t, r: self.r })
        }
    }

    /// `r - theta * t`
    #[inline]
    pub fn score(&self, theta: f64) -> f64 {
        self.r - theta * self.t
    }

    /// Reward per unit time.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.r / self.t
    }
}

/// Parametric decision curves with a closed-form best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// `x -> (x, 2 - (2 - x)^2)`: reward grows with time spent, with
    /// diminishing returns. The flexible task of the strongly concave system.
    DiminishingReturns,
}

impl Curve {
    #[inline]
    pub fn point(&self, x: f64) -> Decision {
        match self {
            Curve::DiminishingReturns => {
                let gap = 2.0 - x;
                Decision { t: x, r: 2.0 - gap * gap }
            }
        }
    }

    /// Maximizer of `r(x) - theta * t(x)` over `[x_lo, x_hi]`.
    #[inline]
    pub fn argmax(&self, theta: f64, x_lo: f64, x_hi: f64) -> f64 {
        match self {
            // d/dx [2 - (2-x)^2 - theta x] = 2(2-x) - theta; concave, so clamp the stationary point.
            Curve::DiminishingReturns => (2.0 - theta / 2.0).clamp(x_lo, x_hi),
        }
    }
}

/// The options available on one frame.
#[derive(Debug, Clone, PartialEq)]
pub enum DecisionSet {
    Finite(Vec<Decision>),
    Curve { x_lo: f64, x_hi: f64, curve: Curve },
}

impl DecisionSet {
    pub fn finite(options: Vec<Decision>) -> Result<Self> {
        let set = DecisionSet::Finite(options);
        set.validate()?;
        Ok(set)
    }

    pub fn singleton(t: f64, r: f64) -> Result<Self> {
        Self::finite(alloc::vec![Decision::new(t, r)?])
    }

    pub fn curve(x_lo: f64, x_hi: f64, curve: Curve) -> Result<Self> {
        let set = DecisionSet::Curve { x_lo, x_hi, curve };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DecisionSet::Finite(options) => {
                if options.is_empty() {
                    return Err(Error::EmptyDecisionSet);
                }
                options.iter().try_for_each(Decision::validate)
            }
            DecisionSet::Curve { x_lo, x_hi, curve } => {
                // Both shipped curves have t(x) = x, so positivity on the
                // interval reduces to a positive lower end.
                let ok = x_lo.is_finite() && x_hi.is_finite() && x_lo <= x_hi && curve.point(*x_lo).t > 0.0;
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidCurve { x_lo: *x_lo, x_hi: *x_hi })
                }
            }
        }
    }
}

/// A maximizer of `r - theta * t` and the attained value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub decision: Decision,
    pub value: f64,
}

/// Maximizes `r - theta * t` over `set`.
///
/// Ties on a finite set are compared exactly and broken toward the smallest
/// duration; among options equal in both score and duration the first wins.
pub fn best_response(set: &DecisionSet, theta: f64) -> Result<BestResponse> {
    if !theta.is_finite() {
        return Err(Error::Domain { what: "theta", value: theta });
    }
    match set {
        DecisionSet::Finite(options) => {
            let (first, rest) = options.split_first().ok_or(Error::EmptyDecisionSet)?;
            first.validate()?;
            let mut best = BestResponse { decision: *first, value: first.score(theta) };
            for d in rest {
                d.validate()?;
                let value = d.score(theta);
                if value > best.value || (value == best.value && d.t < best.decision.t) {
                    best = BestResponse { decision: *d, value };
                }
            }
            Ok(best)
        }
        DecisionSet::Curve { x_lo, x_hi, curve } => {
            let x = curve.argmax(theta, *x_lo, *x_hi);
            let decision = curve.point(x);
            Ok(BestResponse { decision, value: decision.score(theta) })
        }
    }
}

/// Samples a curve at `n` evenly spaced parameters including both ends.
/// Finite sets are returned unchanged.
pub fn enumerate_grid(set: &DecisionSet, n: usize) -> Result<Vec<Decision>> {
    match set {
        DecisionSet::Finite(options) => Ok(options.clone()),
        DecisionSet::Curve { x_lo, x_hi, curve } => {
            if n < 2 {
                return Err(Error::Domain { what: "grid size", value: n as f64 });
            }
            let step = (x_hi - x_lo) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| {
                    // pin the last sample to the upper end exactly
                    let x = if i + 1 == n { *x_hi } else { x_lo + step * i as f64 };
                    curve.point(x)
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_choice() -> DecisionSet {
        DecisionSet::finite(vec![Decision { t: 2.0, r: 3.0 }, Decision { t: 1.0, r: 1.0 }]).unwrap()
    }

    fn flexible() -> DecisionSet {
        DecisionSet::curve(1.0, 2.0, Curve::DiminishingReturns).unwrap()
    }

    #[test]
    fn best_response_finite() {
        let br = best_response(&two_choice(), 1.0).unwrap();
        assert_eq!(br.decision, Decision { t: 2.0, r: 3.0 });
        assert_eq!(br.value, 1.0);
    }

    #[test]
    fn exact_tie_picks_smallest_duration() {
        let br = best_response(&two_choice(), 2.0).unwrap();
        assert_eq!(br.decision, Decision { t: 1.0, r: 1.0 });
        assert_eq!(br.value, -1.0);

        // order of the list must not matter
        let swapped = DecisionSet::finite(vec![Decision { t: 1.0, r: 1.0 }, Decision { t: 2.0, r: 3.0 }]).unwrap();
        assert_eq!(best_response(&swapped, 2.0).unwrap().decision.t, 1.0);
    }

    #[test]
    fn singleton_always_chosen() {
        let set = DecisionSet::singleton(1.0, 3.0).unwrap();
        for theta in [-5.0, 0.0, 1.0, 7.5] {
            assert_eq!(best_response(&set, theta).unwrap().decision, Decision { t: 1.0, r: 3.0 });
        }
    }

    #[test]
    fn curve_closed_form() {
        let br = best_response(&flexible(), 1.0).unwrap();
        assert_eq!(br.decision, Decision { t: 1.5, r: 1.75 });
        assert_eq!(br.value, 0.25);
        // stationary point left of the domain clamps to x_lo
        assert_eq!(best_response(&flexible(), 3.0).unwrap().decision.t, 1.0);
        assert_eq!(best_response(&flexible(), -1.0).unwrap().decision.t, 2.0);
    }

    #[test]
    fn curve_matches_grid_search() {
        let grid = enumerate_grid(&flexible(), 100_001).unwrap();
        for i in 0..=40 {
            let theta = i as f64 * 0.1;
            let brute = grid.iter().map(|d| d.score(theta)).fold(f64::NEG_INFINITY, f64::max);
            let br = best_response(&flexible(), theta).unwrap();
            assert!(br.value >= brute - 1e-12, "theta={theta}");
            assert!(br.value - brute < 1e-6, "theta={theta}");
        }
    }

    #[test]
    fn grid_examples() {
        let g3 = enumerate_grid(&flexible(), 3).unwrap();
        assert_eq!(
            g3,
            vec![Decision { t: 1.0, r: 1.0 }, Decision { t: 1.5, r: 1.75 }, Decision { t: 2.0, r: 2.0 }]
        );
        let g2 = enumerate_grid(&flexible(), 2).unwrap();
        assert_eq!(g2, vec![Decision { t: 1.0, r: 1.0 }, Decision { t: 2.0, r: 2.0 }]);
        let single = DecisionSet::singleton(1.0, 3.0).unwrap();
        assert_eq!(enumerate_grid(&single, 10).unwrap(), vec![Decision { t: 1.0, r: 3.0 }]);
        assert!(enumerate_grid(&flexible(), 1).is_err());
    }

    #[test]
    fn structural_errors() {
        assert_eq!(DecisionSet::finite(vec![]), Err(Error::EmptyDecisionSet));
        assert_eq!(best_response(&DecisionSet::Finite(vec![]), 1.0), Err(Error::EmptyDecisionSet));
        assert!(Decision::new(0.0, 1.0).is_err());
        assert!(Decision::new(-1.0, 1.0).is_err());
        assert!(DecisionSet::curve(2.0, 1.0, Curve::DiminishingReturns).is_err());
        assert!(DecisionSet::curve(0.0, 1.0, Curve::DiminishingReturns).is_err());
        assert!(best_response(&two_choice(), f64::NAN).is_err());
    }

    #[test]
    fn value_nonincreasing_in_theta() {
        for set in [two_choice(), flexible()] {
            let mut prev = f64::INFINITY;
            for i in 0..=400 {
                let v = best_response(&set, -2.0 + i as f64 * 0.02).unwrap().value;
                assert!(v <= prev);
                prev = v;
            }
        }
    }
}
