//! Small statistics helpers shared by the oracle and the experiment harness.

use crate::error::{Error, Result};

/// Welford running mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.n as f64)
        }
    }
}

impl Extend<f64> for RunningStats {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        iter.into_iter().for_each(|x| self.push(x));
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(ln k, ln v)`. Points with `v <= 0` or
/// non-finite values are dropped; at least `min_points` must remain.
pub fn fit_loglog<I>(points: I, min_points: usize) -> Result<LogLogFit>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut n, mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0usize, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, v) in points {
        if !(k > 0.0 && v > 0.0 && k.is_finite() && v.is_finite()) {
            continue;
        }
        let (x, y) = (libm::log(k), libm::log(v));
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    if n < min_points.max(2) {
        return Err(Error::InsufficientData { needed: min_points.max(2), got: n });
    }
    let nf = n as f64;
    let cov = sxy - sx * sy / nf;
    let var_x = sxx - sx * sx / nf;
    let var_y = syy - sy * sy / nf;
    if var_x <= 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let slope = cov / var_x;
    let intercept = (sy - slope * sx) / nf;
    let r_squared = if var_y > 0.0 { cov * cov / (var_x * var_y) } else { 1.0 };
    Ok(LogLogFit { slope, intercept, r_squared, points: n })
}
