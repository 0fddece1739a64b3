//! Volterra integral equations on uniform grids.
//!
//! * second kind `φ(s) + ∫_a^s K(s,t) φ(t) dt = f(s)` by product-trapezoidal stepping;
//! * first kind `∫_a^s K(s,t) ψ(t) dt = f(s)` with `K(s,s) ≠ 0`, by differentiation;
//! * generalized Abel `∫_a^s (s-t)^{-α} G(s,t) φ(t) dt = f(s)`, by fractional
//!   integration against `(x-s)^{α-1}` followed by the first-kind solver;
//! * kernels vanishing on the diagonal, by repeated differentiation;
//! * the even-dimension step lowering a kernel equation from `n + 2` to `n`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{default_stencil, differentiate, gauss_jacobi_unit, gauss_legendre};
use crate::scalar::{sup_norm, Scalar};
use crate::slice_fourier::{EvenStepProfile, KernelEquation};

/// A real kernel `(s, t) ↦ K(s, t)`, evaluated for `t ≤ s`.
pub type Kernel<'a> = Box<dyn Fn(f64, f64) -> f64 + Send + Sync + 'a>;

/// Threshold below which `|K(s,s)|` counts as degenerate.
pub const DIAGONAL_THRESHOLD: f64 = 1e-10;
/// Relative tolerance for the compatibility condition `f(a) = 0`.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-8;

/// `a = s_0 < s_1 < … < s_{n-1} = b`, equispaced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("grid needs a < b, got [{a}, {b}]")));
        }
        if n < 3 {
            return Err(Error::GridTooCoarse { nodes: n, required: 3 });
        }
        Ok(Self { a, b, n })
    }

    /// Recognizes an equispaced node list (relative spacing deviation ≤ 1e-9).
    pub fn from_nodes(nodes: &[f64]) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::GridTooCoarse {
                nodes: nodes.len(),
                required: 3,
            });
        }
        let g = Self::new(nodes[0], nodes[nodes.len() - 1], nodes.len())?;
        let h = g.step();
        for (i, s) in nodes.iter().enumerate() {
            if (s - g.node(i)).abs() > 1e-9 * h.max(s.abs() * 1e-3) {
                return Err(Error::invalid("grid is not uniform"));
            }
        }
        Ok(g)
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.b
        } else {
            self.a + self.step() * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// A solver result.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub grid: UniformGrid,
    pub values: Vec<T>,
    /// Richardson-style estimate from a solve on every other node.
    pub error_estimate: f64,
    pub warnings: Vec<String>,
}

/// `φ(s) + ∫_a^s K(s,t) φ(t) dt = f(s)` with `f` sampled on the grid.
pub struct SecondKindProblem<'a, T> {
    pub grid: UniformGrid,
    pub kernel: Kernel<'a>,
    pub rhs: Vec<T>,
    /// Accuracy caveats inherited from how the problem was built.
    pub warnings: Vec<String>,
}

impl<'a, T: Scalar> SecondKindProblem<'a, T> {
    pub fn new(grid: UniformGrid, kernel: Kernel<'a>, rhs: Vec<T>) -> Result<Self> {
        check_samples(&grid, &rhs)?;
        Ok(Self {
            grid,
            kernel,
            rhs,
            warnings: Vec::new(),
        })
    }

    pub fn from_fn(grid: UniformGrid, kernel: Kernel<'a>, f: impl Fn(f64) -> T) -> Result<Self> {
        let rhs = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, kernel, rhs)
    }
}

fn check_samples<T: Scalar>(grid: &UniformGrid, rhs: &[T]) -> Result<()> {
    if rhs.len() != grid.n {
        return Err(Error::invalid(format!(
            "right-hand side has {} samples for {} grid nodes",
            rhs.len(),
            grid.n
        )));
    }
    if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("right-hand side at node {i}")));
    }
    Ok(())
}

/// Product-trapezoidal stepping on nodes `0, stride, 2·stride, …` of the grid.
fn step_second_kind<T: Scalar>(p: &SecondKindProblem<'_, T>, stride: usize) -> Result<Vec<T>> {
    let h = p.grid.step() * stride as f64;
    let idx: Vec<usize> = (0..p.grid.n).step_by(stride).collect();
    let s: Vec<f64> = idx.iter().map(|&i| p.grid.node(i)).collect();
    let mut phi: Vec<T> = Vec::with_capacity(idx.len());
    phi.push(p.rhs[0]);
    for i in 1..idx.len() {
        let si = s[i];
        let mut acc = phi[0] * (0.5 * (p.kernel)(si, s[0]));
        for j in 1..i {
            acc = acc + phi[j] * (p.kernel)(si, s[j]);
        }
        let diag = 1.0 + 0.5 * h * (p.kernel)(si, si);
        if !diag.is_finite() || diag.abs() < 1e-12 {
            return Err(Error::SingularStep {
                index: idx[i],
                s: si,
                value: diag,
            });
        }
        let v = (p.rhs[idx[i]] - acc * h) / diag;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("solution at node {} (s = {si})", idx[i])));
        }
        phi.push(v);
    }
    Ok(phi)
}

/// Solves a Volterra equation of the second kind by the product trapezoid rule.
pub fn solve_second_kind<T: Scalar>(p: &SecondKindProblem<'_, T>) -> Result<Solution<T>> {
    check_samples(&p.grid, &p.rhs)?;
    let values = step_second_kind(p, 1)?;
    let coarse = step_second_kind(p, 2)?;
    let error_estimate = coarse
        .iter()
        .enumerate()
        .map(|(k, c)| (values[2 * k] - *c).modulus() / 3.0)
        .fold(0.0, f64::max);
    Ok(Solution {
        grid: p.grid,
        values,
        error_estimate,
        warnings: p.warnings.clone(),
    })
}

/// `∫_a^s K(s,t) ψ(t) dt = f(s)`.
pub struct FirstKindProblem<'a, T> {
    pub grid: UniformGrid,
    pub kernel: Kernel<'a>,
    /// `∂K/∂s`; estimated by one-sided differences when absent.
    pub kernel_ds: Option<Kernel<'a>>,
    pub rhs: Vec<T>,
    /// `f'` on the grid; estimated by finite differences when absent.
    pub rhs_derivative: Option<Vec<T>>,
}

fn check_compatibility<T: Scalar>(rhs: &[T]) -> Result<()> {
    let tol = COMPATIBILITY_TOLERANCE * sup_norm(rhs).max(1.0);
    let v = rhs[0].modulus();
    if v > tol {
        return Err(Error::IncompatibleData {
            value: v,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Forward fourth-order difference in `s`, staying inside the region `s ≥ t`.
fn forward_ds(kernel: &(dyn Fn(f64, f64) -> f64 + Send + Sync), s: f64, t: f64, delta: f64) -> f64 {
    const W: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut acc = 0.0;
    for (k, w) in W.iter().enumerate() {
        acc += w * kernel(s + delta * k as f64, t);
    }
    acc / (12.0 * delta)
}

/// Solves a first-kind Volterra equation with nonvanishing diagonal by reducing
/// `K(s,s) ψ(s) + ∫_a^s ∂_s K(s,t) ψ(t) dt = f'(s)` to the second kind.
pub fn solve_first_kind<T: Scalar>(p: &FirstKindProblem<'_, T>) -> Result<Solution<T>> {
    check_samples(&p.grid, &p.rhs)?;
    check_compatibility(&p.rhs)?;
    let nodes = p.grid.nodes();
    let mut diag = Vec::with_capacity(p.grid.n);
    for (i, &s) in nodes.iter().enumerate() {
        let d = (p.kernel)(s, s);
        if !(d.abs() >= DIAGONAL_THRESHOLD) {
            return Err(Error::DiagonalDegeneracy {
                index: i,
                s,
                value: d.abs(),
            });
        }
        diag.push(d);
    }
    let mut warnings = Vec::new();
    let deriv = match &p.rhs_derivative {
        Some(d) => {
            check_samples(&p.grid, d)?;
            d.clone()
        }
        None => differentiate(&nodes, &p.rhs, 1, default_stencil(1))?,
    };
    let q: Vec<T> = deriv.iter().zip(&diag).map(|(v, d)| *v / *d).collect();
    let h = p.grid.step();
    let a = p.grid.a;
    let kernel_ds: Kernel<'_> = match &p.kernel_ds {
        Some(k) => Box::new(move |s, t| k(s, t) / (p.kernel)(s, s)),
        None => {
            warnings.push("kernel derivative estimated by finite differences".to_string());
            let delta = (h / 8.0).min(1e-3 * (p.grid.b - a));
            Box::new(move |s, t| forward_ds(&*p.kernel, s, t, delta) / (p.kernel)(s, s))
        }
    };
    let second = SecondKindProblem {
        grid: p.grid,
        kernel: kernel_ds,
        rhs: q,
        warnings,
    };
    solve_second_kind(&second)
}

/// `∫_a^s (s-t)^{-α} G(s,t) φ(t) dt = f(s)` with `0 < α < 1` and `G(s,s) ≠ 0`.
pub struct AbelProblem<'a, T> {
    pub grid: UniformGrid,
    pub alpha: f64,
    pub g: Kernel<'a>,
    /// `∂G/∂s`; estimated by one-sided differences when absent.
    pub g_ds: Option<Kernel<'a>>,
    pub rhs: Vec<T>,
}

const PANEL_NODES: usize = 16;
const PRECONDITIONER_NODES: usize = 24;

fn check_abel<T: Scalar>(p: &AbelProblem<'_, T>) -> Result<()> {
    check_samples(&p.grid, &p.rhs)?;
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(Error::invalid(format!(
            "Abel exponent must lie in (0, 1), got {}",
            p.alpha
        )));
    }
    check_compatibility(&p.rhs)?;
    for (i, s) in p.grid.nodes().into_iter().enumerate() {
        let d = (p.g)(s, s);
        if !(d.abs() >= DIAGONAL_THRESHOLD) {
            return Err(Error::DiagonalDegeneracy {
                index: i,
                s,
                value: d.abs(),
            });
        }
    }
    Ok(())
}

/// `q_i = f_i / (s_i - a)^{1-α}` for `i ≥ 1`, linearly extrapolated to `i = 0`.
fn singular_quotient<T: Scalar>(grid: &UniformGrid, f: &[T], alpha: f64) -> Vec<T> {
    let h = grid.step();
    let mut q: Vec<T> = (0..grid.n)
        .map(|i| {
            if i == 0 {
                T::zero()
            } else {
                f[i] / (h * i as f64).powf(1.0 - alpha)
            }
        })
        .collect();
    q[0] = q[1] * 2.0 - q[2];
    q
}

/// `f̂(x_i) = ∫_a^{x_i} (x_i - s)^{α-1} f(s) ds` by product integration with
/// `f = (s - a)^{1-α} q`, `q` piecewise linear.
fn fractional_integral<T: Scalar>(grid: &UniformGrid, q: &[T], alpha: f64) -> Result<Vec<T>> {
    let h = grid.step();
    let gl = gauss_legendre(PANEL_NODES, 0.0, 1.0);
    let both = gauss_jacobi_unit(PANEL_NODES, alpha - 1.0, 1.0 - alpha)?;
    let left = gauss_jacobi_unit(PANEL_NODES, 0.0, 1.0 - alpha)?;
    let right = gauss_jacobi_unit(PANEL_NODES, alpha - 1.0, 0.0)?;
    let mut out = vec![T::zero(); grid.n];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let x = h * i as f64; // measured from a
        let mut acc = T::zero();
        for j in 0..i {
            let s0 = h * j as f64;
            let lin = |y: f64| q[j] * (1.0 - y) + q[j + 1] * y;
            // the panel [s0, s0 + h] in the local variable y
            if i == 1 {
                // (x - s)^{α-1} (s - a)^{1-α} = h^0 (1-y)^{α-1} y^{1-α}
                for &(y, w) in &both {
                    acc = acc + lin(y) * (w * h);
                }
            } else if j == 0 {
                let scale = h.powf(1.0 - alpha) * h;
                for &(y, w) in &left {
                    let s = s0 + h * y;
                    acc = acc + lin(y) * (w * scale * (x - s).powf(alpha - 1.0));
                }
            } else if j == i - 1 {
                let scale = h.powf(alpha - 1.0) * h;
                for &(y, w) in &right {
                    let s = s0 + h * y;
                    acc = acc + lin(y) * (w * scale * s.powf(1.0 - alpha));
                }
            } else {
                for &(y, w) in &gl {
                    let s = s0 + h * y;
                    acc = acc + lin(y) * (w * h * (x - s).powf(alpha - 1.0) * s.powf(1.0 - alpha));
                }
            }
        }
        *slot = acc;
    }
    Ok(out)
}

/// Solves the generalized Abel equation by applying the fractional integral
/// `∫_a^x (x-s)^{α-1} · ds`, which turns it into a first-kind equation with kernel
/// `K̂(x,t) = ∫_0^1 (1-y)^{α-1} y^{-α} G(t + (x-t) y, t) dy` and diagonal
/// `G(x,x) π / sin(πα)`.
pub fn solve_abel<T: Scalar>(p: &AbelProblem<'_, T>) -> Result<Solution<T>> {
    check_abel(p)?;
    let alpha = p.alpha;
    let q = singular_quotient(&p.grid, &p.rhs, alpha);
    let f_hat = fractional_integral(&p.grid, &q, alpha)?;
    let rule = Arc::new(gauss_jacobi_unit(PRECONDITIONER_NODES, alpha - 1.0, -alpha)?);
    let mut warnings = Vec::new();
    let delta = (p.grid.step() / 8.0).min(1e-3 * (p.grid.b - p.grid.a));
    let g = &p.g;
    let g_ds: Kernel<'_> = match &p.g_ds {
        Some(d) => Box::new(d),
        None => {
            warnings.push("Abel kernel derivative estimated by finite differences".to_string());
            Box::new(move |s, t| forward_ds(&**g, s, t, delta))
        }
    };
    let r1 = rule.clone();
    let k_hat: Kernel<'_> = Box::new(move |x, t| r1.iter().map(|&(y, w)| w * g(t + (x - t) * y, t)).sum());
    let r2 = rule;
    let k_hat_dx: Kernel<'_> = Box::new(move |x, t| r2.iter().map(|&(y, w)| w * y * g_ds(t + (x - t) * y, t)).sum());
    let first = FirstKindProblem {
        grid: p.grid,
        kernel: k_hat,
        kernel_ds: Some(k_hat_dx),
        rhs: f_hat,
        rhs_derivative: None,
    };
    let mut sol = solve_first_kind(&first)?;
    warnings.append(&mut sol.warnings);
    sol.warnings = warnings;
    Ok(sol)
}

/// `∫_{t_0}^{t_1} (x - t)^{-α} ℓ(t) dt` for the two hat halves on `[t_0, t_1]`,
/// returned as the weights of `ℓ(t_0)` and `ℓ(t_1)`.
fn abel_hat_moments(x: f64, t0: f64, t1: f64, alpha: f64) -> (f64, f64) {
    let h = t1 - t0;
    let b = 1.0 - alpha;
    let (d0, d1) = (x - t0, x - t1);
    // ∫ (x-t)^{-α} dt and ∫ (x-t)^{-α} (t - t0) dt in closed form
    let m0 = (d0.powf(b) - d1.powf(b)) / b;
    let m1 = d0 * m0 - (d0.powf(b + 1.0) - d1.powf(b + 1.0)) / (b + 1.0);
    (m0 - m1 / h, m1 / h)
}

/// Direct product-integration solver for the generalized Abel equation:
/// `φ` piecewise linear, `G(s_i, ·)` sampled at the nodes, exact moments of
/// `(s_i - t)^{-α}`. An independent route used to cross-check [`solve_abel`].
pub fn solve_abel_product<T: Scalar>(p: &AbelProblem<'_, T>) -> Result<Solution<T>> {
    check_abel(p)?;
    let alpha = p.alpha;
    let nodes = p.grid.nodes();
    let q = singular_quotient(&p.grid, &p.rhs, alpha);
    let a = p.grid.a;
    let mut phi: Vec<T> = Vec::with_capacity(p.grid.n);
    // f ≈ φ(a) G(a,a) (s-a)^{1-α} / (1-α) near a
    phi.push(q[0] * ((1.0 - alpha) / (p.g)(a, a)));
    for i in 1..p.grid.n {
        let x = nodes[i];
        let mut acc = T::zero();
        let mut diag = 0.0;
        for j in 0..i {
            let (w0, w1) = abel_hat_moments(x, nodes[j], nodes[j + 1], alpha);
            acc = acc + phi[j] * (w0 * (p.g)(x, nodes[j]));
            if j + 1 < i {
                acc = acc + phi[j + 1] * (w1 * (p.g)(x, nodes[j + 1]));
            } else {
                diag = w1 * (p.g)(x, x);
            }
        }
        phi.push((p.rhs[i] - acc) / diag);
    }
    Ok(Solution {
        grid: p.grid,
        values: phi,
        error_estimate: f64::NAN,
        warnings: Vec::new(),
    })
}

/// `∫_a^s K(s,t) ψ(t) dt = f(s)` where `∂_s^j K(s,t)|_{t=s} = 0` for `j ≤ m - 2`.
pub struct DiagonalVanishingProblem<'a, T> {
    pub grid: UniformGrid,
    pub m: usize,
    /// `derivatives[j] = ∂_s^j K` for `j = 0..=m`.
    pub derivatives: Vec<Kernel<'a>>,
    pub rhs: Vec<T>,
    /// `f^{(m)}` on the grid; estimated by finite differences when absent.
    pub rhs_derivative: Option<Vec<T>>,
}

/// Differentiates the first-kind equation `m` times, giving the second-kind
/// problem with kernel `∂_s^m K(s,t) / ∂_s^{m-1} K(s,s)` and right-hand side
/// `f^{(m)}(s) / ∂_s^{m-1} K(s,s)`.
pub fn reduce_diagonal_vanishing<'a, T: Scalar>(
    p: DiagonalVanishingProblem<'a, T>,
) -> Result<SecondKindProblem<'a, T>> {
    if p.m < 2 {
        return Err(Error::invalid("diagonal-vanishing reduction needs m ≥ 2"));
    }
    if p.derivatives.len() != p.m + 1 {
        return Err(Error::invalid(format!(
            "expected {} kernel derivatives, got {}",
            p.m + 1,
            p.derivatives.len()
        )));
    }
    check_samples(&p.grid, &p.rhs)?;
    check_compatibility(&p.rhs)?;
    let nodes = p.grid.nodes();
    let mut diag = Vec::with_capacity(nodes.len());
    for (i, &s) in nodes.iter().enumerate() {
        let d = (p.derivatives[p.m - 1])(s, s);
        let scale = d.abs().max(1.0);
        for (j, k) in p.derivatives.iter().enumerate().take(p.m - 1) {
            let v = k(s, s);
            if v.abs() > 1e-8 * scale {
                return Err(Error::invalid(format!(
                    "∂_s^{j} K(s,s) = {v:e} does not vanish at s = {s}"
                )));
            }
        }
        if !(d.abs() >= DIAGONAL_THRESHOLD) {
            return Err(Error::DiagonalDegeneracy {
                index: i,
                s,
                value: d.abs(),
            });
        }
        diag.push(d);
    }
    let mut warnings = Vec::new();
    let deriv = match p.rhs_derivative {
        Some(d) => {
            check_samples(&p.grid, &d)?;
            d
        }
        None => {
            warnings.push(format!(
                "order-{} derivative of the right-hand side estimated numerically; accuracy reduced",
                p.m
            ));
            differentiate(&nodes, &p.rhs, p.m, default_stencil(p.m))?
        }
    };
    let rhs: Vec<T> = deriv.iter().zip(&diag).map(|(v, d)| *v / *d).collect();
    let mut derivatives = p.derivatives;
    let top = derivatives.pop().expect("m + 1 derivatives");
    let lower = derivatives.pop().expect("m + 1 derivatives");
    let kernel: Kernel<'a> = Box::new(move |s, t| top(s, t) / lower(s, s));
    Ok(SecondKindProblem {
        grid: p.grid,
        kernel,
        rhs,
        warnings,
    })
}

/// Lowers a kernel equation in dimension `n + 2` to dimension `n` by one
/// `d/ds`: the kernel multiplier `u^p H(x) x^{n-1}` (with `x² = su - u²`) becomes
/// `(u/2) u^p H₁(x) x^{n-3}` with `H₁(x) = x H'(x) + (n-1) H(x)`, so the reduced
/// equation has `u^{p+1} H₁` and right-hand side `2 g̃'(s)`.
pub fn reduce_even_step(eq: &KernelEquation) -> Result<KernelEquation> {
    if eq.n < 4 || eq.n % 2 != 0 {
        return Err(Error::invalid(format!(
            "even step needs an even dimension ≥ 4, got {}",
            eq.n
        )));
    }
    let n = eq.n - 2;
    let rhs: Vec<Complex64> = if eq.rhs.iter().all(|v| *v == Complex64::zero()) {
        eq.rhs.clone()
    } else {
        let d = differentiate(&eq.s_grid, &eq.rhs, 1, default_stencil(1))
            .map_err(|e| Error::DataTooCoarse(format!("cannot differentiate right-hand side: {e}")))?;
        d.into_iter().map(|v| v * 2.0).collect()
    };
    let profile = EvenStepProfile::new(eq.profile.clone(), n);
    let mut notes = eq.notes.clone();
    notes.push(format!("reduced from n = {} by differentiation in s", eq.n));
    KernelEquation::new(
        n,
        Arc::new(profile),
        eq.u_power + 1,
        eq.s_grid.clone(),
        rhs,
        eq.unknown.clone(),
        notes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(0.0, 1.0, n).unwrap()
    }

    fn max_err(sol: &Solution<f64>, exact: impl Fn(f64) -> f64) -> f64 {
        sol.grid
            .nodes()
            .iter()
            .zip(&sol.values)
            .map(|(s, v)| (v - exact(*s)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn second_kind_zero_kernel_returns_rhs() {
        let p = SecondKindProblem::from_fn(grid(33), Box::new(|_, _| 0.0), |s: f64| s.sin()).unwrap();
        let sol = solve_second_kind(&p).unwrap();
        assert!(max_err(&sol, f64::sin) == 0.0);
    }

    #[test]
    fn second_kind_exponential() {
        let p = SecondKindProblem::from_fn(grid(512), Box::new(|_, _| 1.0), |_| 1.0).unwrap();
        let sol = solve_second_kind(&p).unwrap();
        let err = max_err(&sol, |s| (-s).exp());
        assert!(err < 1e-4, "{err:e}");
        assert!(sol.error_estimate >= 0.5 * err && sol.error_estimate <= 5.0 * err);
    }

    #[test]
    fn second_kind_sine_converges_at_order_two() {
        let errs: Vec<f64> = [65, 129, 257, 513]
            .iter()
            .map(|&n| {
                let p = SecondKindProblem::from_fn(grid(n), Box::new(|s, t| s - t), |s| s).unwrap();
                max_err(&solve_second_kind(&p).unwrap(), f64::sin)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 3.5, "{errs:?}");
        }
    }

    #[test]
    fn second_kind_singular_step_reports_index() {
        // 1 + h K / 2 = 0 with h = 1/2
        let p = SecondKindProblem::from_fn(grid(3), Box::new(|_, _| -4.0), |s| s).unwrap();
        match solve_second_kind(&p) {
            Err(Error::SingularStep { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_kind_examples() {
        let g = grid(129);
        let p = FirstKindProblem {
            grid: g,
            kernel: Box::new(|_, _| 1.0),
            kernel_ds: None,
            rhs: g.nodes(),
            rhs_derivative: None,
        };
        let sol = solve_first_kind(&p).unwrap();
        assert!(max_err(&sol, |_| 1.0) < 1e-12);
        let zero = FirstKindProblem {
            rhs: vec![0.0; g.n],
            ..p
        };
        assert!(solve_first_kind(&zero).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn first_kind_errors() {
        let g = grid(17);
        let degenerate = FirstKindProblem {
            grid: g,
            kernel: Box::new(|s, t| s - t),
            kernel_ds: None,
            rhs: g.nodes().iter().map(|s| s * s / 2.0).collect(),
            rhs_derivative: None,
        };
        assert!(matches!(
            solve_first_kind(&degenerate),
            Err(Error::DiagonalDegeneracy { index: 0, .. })
        ));
        let incompatible = FirstKindProblem {
            grid: g,
            kernel: Box::new(|_, _| 1.0),
            kernel_ds: None,
            rhs: g.nodes().iter().map(|s| s + 0.1).collect(),
            rhs_derivative: None,
        };
        assert!(matches!(
            solve_first_kind(&incompatible),
            Err(Error::IncompatibleData { .. })
        ));
    }

    /// Dense lower-triangular oracle for the differentiated system
    /// `ψ_i (1 + h L_ii / 2) + h (L_i0 ψ_0 / 2 + Σ_{0<j<i} L_ij ψ_j) = q_i`.
    fn dense_oracle(n: usize) -> Vec<f64> {
        let g = grid(n);
        let s = g.nodes();
        let h = g.step();
        let l = |_: f64, _: f64| 1.0; // ∂_s (1 + s - t) / K(s,s)
        let q: Vec<f64> = s.iter().map(|v| v.exp()).collect();
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut b = nalgebra::DVector::<f64>::zeros(n);
        for i in 0..n {
            b[i] = q[i];
            if i == 0 {
                a[(0, 0)] = 1.0;
                continue;
            }
            a[(i, 0)] = 0.5 * h * l(s[i], s[0]);
            for j in 1..i {
                a[(i, j)] = h * l(s[i], s[j]);
            }
            a[(i, i)] = 1.0 + 0.5 * h * l(s[i], s[i]);
        }
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn first_kind_matches_dense_collocation() {
        for n in [9, 33, 64] {
            let g = grid(n);
            let s = g.nodes();
            let p = FirstKindProblem {
                grid: g,
                kernel: Box::new(|s, t| 1.0 + s - t),
                kernel_ds: Some(Box::new(|_, _| 1.0)),
                rhs: s.iter().map(|v| v.exp() - 1.0).collect(),
                rhs_derivative: Some(s.iter().map(|v| v.exp()).collect()),
            };
            let sol = solve_first_kind(&p).unwrap();
            let dense = dense_oracle(n);
            for (a, b) in sol.values.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
            }
            // exact solution cosh s, reached at O(h²)
            assert!(max_err(&sol, f64::cosh) < 2e-3);
        }
    }

    #[test]
    fn first_kind_finite_difference_path() {
        let g = grid(257);
        let s = g.nodes();
        let p = FirstKindProblem {
            grid: g,
            kernel: Box::new(|s, t| 1.0 + s - t),
            kernel_ds: None,
            rhs: s.iter().map(|v| v.exp() - 1.0).collect(),
            rhs_derivative: None,
        };
        let sol = solve_first_kind(&p).unwrap();
        assert!(!sol.warnings.is_empty());
        assert!(max_err(&sol, f64::cosh) < 1e-5);
    }

    fn abel(n: usize, rhs: impl Fn(f64) -> f64) -> AbelProblem<'static, f64> {
        let g = grid(n);
        AbelProblem {
            grid: g,
            alpha: 0.5,
            g: Box::new(|_, _| 1.0),
            g_ds: Some(Box::new(|_, _| 0.0)),
            rhs: g.nodes().into_iter().map(rhs).collect(),
        }
    }

    #[test]
    fn abel_recovers_constant() {
        let p = abel(129, |s| 2.0 * s.sqrt());
        let sol = solve_abel(&p).unwrap();
        assert!(max_err(&sol, |_| 1.0) < 1e-3);
        let direct = solve_abel_product(&p).unwrap();
        assert!(max_err(&direct, |_| 1.0) < 1e-10);
    }

    #[test]
    fn abel_recovers_linear() {
        let p = abel(129, |s| 4.0 / 3.0 * s.powf(1.5));
        let sol = solve_abel(&p).unwrap();
        assert!(max_err(&sol, |t| t) < 1e-3);
        let direct = solve_abel_product(&p).unwrap();
        assert!(max_err(&direct, |t| t) < 1e-3);
    }

    #[test]
    fn abel_routes_agree_on_variable_kernel() {
        // G(s,t) = 1 + s t, φ(t) = cos t; f computed by an adaptive-free oracle:
        // ∫_0^s (s-t)^{-1/2} (1 + s t) cos t dt with t = s - s y², dt = 2 s y dy
        let f = |s: f64| -> f64 {
            if s == 0.0 {
                return 0.0;
            }
            gauss_legendre(64, 0.0, 1.0)
                .iter()
                .map(|&(y, w)| {
                    let t = s - s * y * y;
                    w * 2.0 * s.sqrt() * (1.0 + s * t) * t.cos()
                })
                .sum()
        };
        let g = grid(257);
        let p = AbelProblem {
            grid: g,
            alpha: 0.5,
            g: Box::new(|s, t| 1.0 + s * t),
            g_ds: None,
            rhs: g.nodes().into_iter().map(f).collect(),
        };
        let a = solve_abel(&p).unwrap();
        let b = solve_abel_product(&p).unwrap();
        assert!(max_err(&a, f64::cos) < 1e-4, "{}", max_err(&a, f64::cos));
        assert!(max_err(&b, f64::cos) < 1e-4, "{}", max_err(&b, f64::cos));
    }

    #[test]
    fn abel_other_exponent() {
        // α = 0.3, G = 1, φ = 1: f = s^{0.7} / 0.7
        let g = grid(129);
        let p = AbelProblem {
            grid: g,
            alpha: 0.3,
            g: Box::new(|_, _| 1.0),
            g_ds: Some(Box::new(|_, _| 0.0)),
            rhs: g.nodes().iter().map(|s| s.powf(0.7) / 0.7).collect(),
        };
        assert!(max_err(&solve_abel(&p).unwrap(), |_| 1.0) < 1e-6);
    }

    #[test]
    fn abel_complex_zero_is_zero() {
        let g = grid(33);
        let p = AbelProblem {
            grid: g,
            alpha: 0.5,
            g: Box::new(|_, _| 2.0),
            g_ds: None,
            rhs: vec![Complex64::new(0.0, 0.0); g.n],
        };
        assert!(solve_abel(&p).unwrap().values.iter().all(|v| v.norm() == 0.0));
        assert!(solve_abel_product(&p).unwrap().values.iter().all(|v| v.norm() == 0.0));
    }

    fn vanishing(m: usize, rhs: impl Fn(f64) -> f64) -> DiagonalVanishingProblem<'static, f64> {
        let g = grid(129);
        let derivatives: Vec<Kernel<'static>> = match m {
            2 => vec![Box::new(|s, t| s - t), Box::new(|_, _| 1.0), Box::new(|_, _| 0.0)],
            _ => vec![
                Box::new(|s, t| (s - t) * (s - t) / 2.0),
                Box::new(|s, t| s - t),
                Box::new(|_, _| 1.0),
                Box::new(|_, _| 0.0),
            ],
        };
        DiagonalVanishingProblem {
            grid: g,
            m,
            derivatives,
            rhs: g.nodes().into_iter().map(rhs).collect(),
            rhs_derivative: None,
        }
    }

    #[test]
    fn diagonal_vanishing_examples() {
        let red = reduce_diagonal_vanishing(vanishing(2, |_| 0.0)).unwrap();
        assert!(solve_second_kind(&red).unwrap().values.iter().all(|v| *v == 0.0));
        let red = reduce_diagonal_vanishing(vanishing(2, |s| s * s / 2.0)).unwrap();
        assert!(!red.warnings.is_empty());
        let sol = solve_second_kind(&red).unwrap();
        assert!(max_err(&sol, |_| 1.0) < 1e-8);
        let red = reduce_diagonal_vanishing(vanishing(3, |s| s * s * s / 6.0)).unwrap();
        let sol = solve_second_kind(&red).unwrap();
        assert!(max_err(&sol, |_| 1.0) < 1e-6);
    }

    #[test]
    fn diagonal_vanishing_rejects_nonvanishing_lower_order() {
        let mut p = vanishing(2, |s| s * s / 2.0);
        p.derivatives[0] = Box::new(|_, _| 1.0);
        assert!(reduce_diagonal_vanishing(p).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homogeneous_inputs_give_zero(c in -2.0f64..2.0, n in 5usize..40) {
            let g = grid(n);
            let p = SecondKindProblem::new(g, Box::new(move |s, t| c * (s + t)), vec![0.0; n]).unwrap();
            prop_assert!(solve_second_kind(&p).unwrap().values.iter().all(|v| *v == 0.0));
            let fk = FirstKindProblem {
                grid: g,
                kernel: Box::new(move |s, t| 1.0 + c * s * t),
                kernel_ds: None,
                rhs: vec![0.0; n],
                rhs_derivative: None,
            };
            prop_assert!(solve_first_kind(&fk).unwrap().values.iter().all(|v| *v == 0.0));
        }

        #[test]
        fn second_kind_residual_is_small(c in -1.0f64..1.0) {
            // φ + ∫ c e^{s-t} φ dt = f with φ = cos: residual by independent Gauss quadrature
            let g = grid(257);
            let f = move |s: f64| -> f64 {
                s.cos() + gauss_legendre(40, 0.0, s.max(1e-300)).iter()
                    .map(|&(t, w)| w * c * (s - t).exp() * t.cos()).sum::<f64>()
            };
            let p = SecondKindProblem::from_fn(g, Box::new(move |s, t| c * (s - t).exp()), f).unwrap();
            let sol = solve_second_kind(&p).unwrap();
            let err = max_err(&sol, f64::cos);
            prop_assert!(err <= 10.0 * sol.error_estimate.max(1e-12), "{} vs {}", err, sol.error_estimate);
        }
    }
}
