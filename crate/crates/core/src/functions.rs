//! Scalar fields on `H^n` with a declared exponential decay order, plus a small
//! library of test functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, distance_from_origin, PointH};

/// Evaluator signature: `(x', x_n) ↦ f(x', x_n)`.
pub type Evaluator = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// A function on `H^n` together with the largest order `m` for which
/// `sup |f(x)| e^{m d(0,x)}` is claimed finite.
///
/// Cloning is cheap; clones share the evaluator and the certificate cache.
#[derive(Clone)]
pub struct DecayFunction {
    dim: usize,
    decay_order: f64,
    radial: bool,
    eval: Evaluator,
    // keyed by (m.to_bits(), budget); stores ln of the empirical sup
    pub(crate) certificates: Arc<Mutex<HashMap<(u64, usize), f64>>>,
}

impl fmt::Debug for DecayFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayFunction")
            .field("dim", &self.dim)
            .field("decay_order", &self.decay_order)
            .field("radial", &self.radial)
            .finish_non_exhaustive()
    }
}

impl DecayFunction {
    /// Wraps an evaluator. `decay_order` may be `f64::INFINITY`.
    pub fn new<F>(dim: usize, decay_order: f64, eval: F) -> Result<Self>
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        check_dim(dim)?;
        if !(decay_order > 0.0) {
            return Err(Error::invalid(format!(
                "decay order must be positive, got {decay_order}"
            )));
        }
        Ok(Self {
            dim,
            decay_order,
            radial: false,
            eval: Arc::new(eval),
            certificates: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// Declares that `f(x', x_n)` depends on `x'` only through `|x'|`.
    /// Enables the cheaper zonal and Hankel quadrature paths.
    pub fn horizontally_radial(mut self) -> Self {
        self.radial = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn decay_order(&self) -> f64 {
        self.decay_order
    }

    pub fn is_horizontally_radial(&self) -> bool {
        self.radial
    }

    pub fn evaluate(&self, p: &PointH) -> Result<f64> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        self.eval_checked(p.x_prime(), p.height())
    }

    /// Raw evaluation without any checks.
    #[inline]
    pub fn eval(&self, x_prime: &[f64], height: f64) -> f64 {
        (self.eval)(x_prime, height)
    }

    /// Evaluation that turns NaN or infinite values into an error naming the point.
    #[inline]
    pub(crate) fn eval_checked(&self, x_prime: &[f64], height: f64) -> Result<f64> {
        let v = (self.eval)(x_prime, height);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("f({x_prime:?}, {height}) = {v}")))
        }
    }

    /// The function `y ↦ f(φ(y))` for a coordinate map `φ`, keeping the declared
    /// decay order (valid when `φ` is an isometry; a change of base point only
    /// changes the certificate constant).
    pub(crate) fn compose<M>(&self, map: M) -> DecayFunction
    where
        M: Fn(&mut [f64], &mut f64) + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        let dim = self.dim;
        DecayFunction {
            dim,
            decay_order: self.decay_order,
            radial: false,
            eval: Arc::new(move |x: &[f64], h: f64| {
                let mut buf = [0.0; 8];
                let y = &mut buf[..x.len()];
                y.copy_from_slice(x);
                let mut hh = h;
                map(y, &mut hh);
                inner(y, hh)
            }),
            certificates: Arc::new(Mutex::new(HashMap::new())),
        }
    }
}

/// `exp(1 - 1/(1 - t²))` on `|t| < 1`, zero elsewhere; peak value 1 at `t = 0`.
pub fn smooth_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

fn sq_dist(x: &[f64], center: &[f64]) -> f64 {
    if center.is_empty() {
        x.iter().map(|v| v * v).sum()
    } else {
        x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

fn check_center(n: usize, center: &[f64]) -> Result<()> {
    if !center.is_empty() && center.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: center.len() + 1,
        });
    }
    Ok(())
}

/// `exp(-|x' - center|² / width²) · exp(-(ln x_n - ln mean_height)² / (2 σ²))`.
///
/// Gaussian in the horizontal variables and log-normal in the height, so it decays
/// faster than any `e^{-m d(0,x)}`. An empty `center` means the origin.
pub fn gaussian(n: usize, center: Vec<f64>, width: f64, mean_height: f64, sigma: f64) -> Result<DecayFunction> {
    check_center(n, &center)?;
    if !(width > 0.0 && mean_height > 0.0 && sigma > 0.0) {
        return Err(Error::invalid("gaussian parameters must be positive"));
    }
    let radial = center.iter().all(|c| *c == 0.0);
    let inv_w2 = 1.0 / (width * width);
    let ln_mean = mean_height.ln();
    let inv_2s2 = 1.0 / (2.0 * sigma * sigma);
    let f = DecayFunction::new(n, f64::INFINITY, move |x, h| {
        let l = h.ln() - ln_mean;
        (-sq_dist(x, &center) * inv_w2 - l * l * inv_2s2).exp()
    })?;
    Ok(if radial { f.horizontally_radial() } else { f })
}

/// `exp(-|x' - center|² / width²) · b(x_n)` with `b` a smooth bump supported in
/// `[low, high]` (peak 1 at the midpoint).
pub fn vertical_bump(n: usize, center: Vec<f64>, width: f64, low: f64, high: f64) -> Result<DecayFunction> {
    check_center(n, &center)?;
    if !(width > 0.0 && low > 0.0 && high > low) {
        return Err(Error::invalid("vertical bump needs width > 0 and 0 < low < high"));
    }
    let radial = center.iter().all(|c| *c == 0.0);
    let inv_w2 = 1.0 / (width * width);
    let mid = 0.5 * (low + high);
    let half = 0.5 * (high - low);
    let f = DecayFunction::new(n, f64::INFINITY, move |x, h| {
        let b = smooth_bump((h - mid) / half);
        if b == 0.0 {
            0.0
        } else {
            b * (-sq_dist(x, &center) * inv_w2).exp()
        }
    })?;
    Ok(if radial { f.horizontally_radial() } else { f })
}

/// `e^{-m d(0,x)}`, with decay order exactly `m`.
pub fn exp_distance(n: usize, m: f64) -> Result<DecayFunction> {
    Ok(DecayFunction::new(n, m, move |x, h| (-m * distance_from_origin(x, h)).exp())?.horizontally_radial())
}

/// The zero function.
pub fn zero(n: usize) -> Result<DecayFunction> {
    Ok(DecayFunction::new(n, f64::INFINITY, |_, _| 0.0)?.horizontally_radial())
}

/// `exp(-|x'|² / width²) · p(x_n)` with `p` the piecewise-linear interpolant of a
/// height table, zero outside the tabulated range.
pub fn custom_table(n: usize, width: f64, heights: Vec<f64>, values: Vec<f64>) -> Result<DecayFunction> {
    if heights.len() != values.len() || heights.len() < 2 {
        return Err(Error::invalid(
            "custom table needs at least two (height, value) pairs of equal length",
        ));
    }
    if heights[0] <= 0.0 || heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "custom table heights must be positive and strictly increasing",
        ));
    }
    if values.iter().any(|v| !v.is_finite()) || !(width > 0.0) {
        return Err(Error::invalid("custom table values must be finite and width positive"));
    }
    let inv_w2 = 1.0 / (width * width);
    let f = DecayFunction::new(n, f64::INFINITY, move |x, h| {
        if h < heights[0] || h > heights[heights.len() - 1] {
            return 0.0;
        }
        let k = heights.partition_point(|&t| t <= h).clamp(1, heights.len() - 1);
        let t = (h - heights[k - 1]) / (heights[k] - heights[k - 1]);
        let p = values[k - 1] + t * (values[k] - values[k - 1]);
        p * (-sq_dist(x, &[]) * inv_w2).exp()
    })?;
    Ok(f.horizontally_radial())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_peak() {
        assert_eq!(smooth_bump(1.0), 0.0);
        assert_eq!(smooth_bump(-1.5), 0.0);
        assert_eq!(smooth_bump(0.0), 1.0);
        let f = vertical_bump(3, vec![], 1.0, 0.2, 0.8).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0], 0.19), 0.0);
        assert_eq!(f.eval(&[0.0, 0.0], 0.81), 0.0);
        assert_eq!(f.eval(&[0.0, 0.0], 0.5), 1.0);
        assert!(f.is_horizontally_radial());
    }

    #[test]
    fn offset_center_is_not_radial() {
        let f = gaussian(3, vec![0.5, 0.0], 1.0, 1.0, 0.5).unwrap();
        assert!(!f.is_horizontally_radial());
        assert!((f.eval(&[0.5, 0.0], 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn table_interpolates() {
        let f = custom_table(2, 1.0, vec![0.5, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((f.eval(&[0.0], 0.75) - 0.5).abs() < 1e-15);
        assert!((f.eval(&[0.0], 1.5) - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(&[0.0], 2.5), 0.0);
        assert!((f.eval(&[1.0], 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn nan_is_reported() {
        let f = DecayFunction::new(2, 3.0, |_, _| f64::NAN).unwrap();
        let p = PointH::origin(2).unwrap();
        assert!(matches!(f.evaluate(&p), Err(Error::NonFinite(_))));
    }

    #[test]
    fn rejects_bad_decay_order() {
        assert!(DecayFunction::new(2, 0.0, |_, _| 0.0).is_err());
        assert!(DecayFunction::new(9, 1.0, |_, _| 0.0).is_err());
    }
}
