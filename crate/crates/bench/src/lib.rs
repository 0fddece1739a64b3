//! Shared fixtures for the benchmarks.

use hororadon::functions::gaussian;
use hororadon::volterra::{Kernel, SecondKindProblem};
use hororadon::{DecayFunction, QuadratureSpec, UniformGrid};

/// Off-center Gaussian in dimension `n`, so the Cartesian sphere rule is used.
pub fn off_center_gaussian(n: usize) -> DecayFunction {
    let center = (0..n - 1).map(|j| 0.3 - 0.2 * j as f64).collect();
    gaussian(n, center, 0.8, 0.5, 0.3).expect("valid fixture")
}

pub fn quadrature() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// `φ(s) + ∫₀ˢ (s - t) φ(t) dt = s` on `nodes` points; the solution is `sin s`.
pub fn sine_problem(nodes: usize) -> SecondKindProblem<'static, f64> {
    let grid = UniformGrid::new(0.0, 1.0, nodes).expect("valid grid");
    let kernel: Kernel<'static> = Box::new(|s, t| s - t);
    SecondKindProblem::from_fn(grid, kernel, |s| s).expect("valid fixture")
}
