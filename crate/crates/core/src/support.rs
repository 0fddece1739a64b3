//! Reconstruction of Fourier slices from exterior horocycle data, and numerical
//! verification of the support theorem for the reference plane `x_n = 1`.
//!
//! The exterior family is the set of sphere horocycles with `2r ≤ 1`, which all
//! lie below the plane. Writing `s = 2r`, the data determine
//! `F(u) = f̃(η', u) / u^{n-1}` for `u ≤ 1` through a Volterra equation in `s`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::DecayFunction;
use crate::geometry::check_dim;
use crate::quadrature::{default_stencil, differentiate, fd_weights, halton, HALTON_BASES};
use crate::slice_fourier::{assemble_kernel_equation, exterior_data_multi, KernelEquation, Profile, SliceData};
use crate::transform::{transform_sphere, QuadratureSpec};
use crate::volterra::{
    reduce_diagonal_vanishing, reduce_even_step, solve_abel, solve_first_kind, solve_second_kind, AbelProblem,
    DiagonalVanishingProblem, FirstKindProblem, Kernel, UniformGrid,
};

/// Minimum s-grid size for the direct routes (`n = 2, 3`).
pub const MIN_NODES: usize = 16;
/// Minimum s-grid size when the route differentiates the data (`n = 4, 5`).
pub const MIN_NODES_REDUCED: usize = 128;
/// Gauss-Legendre nodes for the prefix response on `[0, ε]`.
const PREFIX_NODES: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Synthesized,
    Loaded,
}

/// `g(η', r)` for a list of frequencies on a common uniform grid of radii.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorDataset {
    pub n: usize,
    pub etas: Vec<Vec<f64>>,
    pub r_grid: Vec<f64>,
    /// `values[k][j] = g(etas[k], r_grid[j])`.
    pub values: Vec<Vec<Complex64>>,
    pub provenance: Provenance,
}

impl ExteriorDataset {
    pub fn new(
        n: usize,
        etas: Vec<Vec<f64>>,
        r_grid: Vec<f64>,
        values: Vec<Vec<Complex64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        check_dim(n)?;
        if etas.iter().any(|e| e.len() != n - 1) {
            return Err(Error::invalid(format!("every frequency needs {} components", n - 1)));
        }
        if values.len() != etas.len() || values.iter().any(|v| v.len() != r_grid.len()) {
            return Err(Error::invalid(
                "dataset values do not match the frequency and radius counts",
            ));
        }
        if r_grid.len() < 3 {
            return Err(Error::invalid("dataset needs at least three radii"));
        }
        UniformGrid::from_nodes(&r_grid)?;
        if !(r_grid[0] > 0.0) || 2.0 * r_grid[r_grid.len() - 1] > 1.0 + 1e-12 {
            return Err(Error::invalid("radii must satisfy 0 < r and 2r ≤ 1"));
        }
        if values.iter().flatten().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("dataset values".into()));
        }
        Ok(Self {
            n,
            etas,
            r_grid,
            values,
            provenance,
        })
    }

    /// The all-zero dataset.
    pub fn zero(n: usize, etas: Vec<Vec<f64>>, r_grid: Vec<f64>) -> Result<Self> {
        let values = vec![vec![Complex64::new(0.0, 0.0); r_grid.len()]; etas.len()];
        Self::new(n, etas, r_grid, values, Provenance::Synthesized)
    }

    pub fn s_grid(&self) -> Vec<f64> {
        self.r_grid.iter().map(|r| 2.0 * r).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Plain-text form: `n`, `eta <count>` rows, `r <count>` rows, then
    /// `values` with one `re im` row per (frequency, radius) in frequency-major order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "eta {}", self.etas.len());
        for eta in &self.etas {
            let row: Vec<String> = eta.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        let _ = writeln!(out, "r {}", self.r_grid.len());
        for r in &self.r_grid {
            let _ = writeln!(out, "{r:.16e}");
        }
        let _ = writeln!(out, "values");
        for v in self.values.iter().flatten() {
            let _ = writeln!(out, "{:.16e} {:.16e}", v.re, v.im);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines.next().ok_or(Error::Format {
                line: text.lines().count() + 1,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let header = |line: usize, l: &str, key: &str| -> Result<usize> {
            let mut it = l.split_whitespace();
            if it.next() != Some(key) {
                return Err(Error::Format {
                    line,
                    message: format!("expected `{key} <count>`"),
                });
            }
            let v = it.next().and_then(|v| v.parse().ok()).ok_or(Error::Format {
                line,
                message: format!("`{key}` needs a nonnegative integer"),
            })?;
            Ok(v)
        };
        let floats = |line: usize, l: &str, count: usize| -> Result<Vec<f64>> {
            let v: std::result::Result<Vec<f64>, _> = l.split_whitespace().map(str::parse).collect();
            match v {
                Ok(v) if v.len() == count => Ok(v),
                Ok(v) => Err(Error::Format {
                    line,
                    message: format!("expected {count} numbers, found {}", v.len()),
                }),
                Err(e) => Err(Error::Format {
                    line,
                    message: format!("bad number: {e}"),
                }),
            }
        };
        let (line, l) = next("`n <dim>`")?;
        let n = header(line, l, "n")?;
        if !(2..=8).contains(&n) {
            return Err(Error::Format {
                line,
                message: format!("dimension {n} outside 2..=8"),
            });
        }
        let (line, l) = next("`eta <count>`")?;
        let k = header(line, l, "eta")?;
        let mut etas = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, l) = next("a frequency row")?;
            etas.push(floats(line, l, n - 1)?);
        }
        let (line, l) = next("`r <count>`")?;
        let m = header(line, l, "r")?;
        let mut r_grid = Vec::with_capacity(m);
        let mut r_lines = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = next("a radius")?;
            r_grid.push(floats(line, l, 1)?[0]);
            r_lines.push(line);
        }
        if m >= 3 {
            if let Err(e) = UniformGrid::from_nodes(&r_grid) {
                return Err(Error::Format {
                    line: r_lines[0],
                    message: format!("radii: {e}"),
                });
            }
        }
        let (line, l) = next("`values`")?;
        if l != "values" {
            return Err(Error::Format {
                line,
                message: "expected `values`".into(),
            });
        }
        let mut values = vec![Vec::with_capacity(m); k];
        for row in values.iter_mut() {
            for _ in 0..m {
                let (line, l) = next("a `re im` row")?;
                let v = floats(line, l, 2)?;
                row.push(Complex64::new(v[0], v[1]));
            }
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Format {
                line,
                message: "trailing content after the last value".into(),
            });
        }
        Self::new(n, etas, r_grid, values, Provenance::Loaded).map_err(|e| Error::Format {
            line: 1,
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Computes the exterior data of `f` for every frequency in `etas`.
pub fn synthesize_dataset(
    f: &DecayFunction,
    etas: &[Vec<f64>],
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<ExteriorDataset> {
    let est = exterior_data_multi(f, etas, r_grid, q)?;
    let values = est
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.value).collect())
        .collect();
    ExteriorDataset::new(f.dim(), etas.to_vec(), r_grid.to_vec(), values, Provenance::Synthesized)
}

/// A reconstructed slice with the solver's bookkeeping.
#[derive(Clone, Debug)]
pub struct SliceReconstruction {
    /// `f̃(η', u)` on `u = s_grid`.
    pub slice: SliceData,
    /// `f̃ / u^{n-1}` on `[0, ε)`, from constant continuation.
    pub prefix_value: Complex64,
    pub error_estimate: f64,
    pub warnings: Vec<String>,
}

fn check_index(data: &ExteriorDataset, eta_index: usize) -> Result<()> {
    if eta_index >= data.etas.len() {
        return Err(Error::invalid(format!(
            "frequency index {eta_index} out of range ({} frequencies)",
            data.etas.len()
        )));
    }
    Ok(())
}

/// Solves for `f̃(η', ·)` on `u ∈ [ε, 1]` (`ε` the smallest `s = 2r`) when
/// `n ∈ {2, 3}`: an Abel equation with exponent ½ for `n = 2`, a first-kind
/// equation with diagonal `J(0)` for `n = 3`.
pub fn reconstruct_slice(data: &ExteriorDataset, eta_index: usize) -> Result<SliceReconstruction> {
    check_index(data, eta_index)?;
    if !(data.n == 2 || data.n == 3) {
        return Err(Error::UnsupportedDimension(data.n));
    }
    if data.r_grid.len() < MIN_NODES {
        return Err(Error::GridTooCoarse {
            nodes: data.r_grid.len(),
            required: MIN_NODES,
        });
    }
    let eq = equation_for(data, eta_index)?;
    solve_equation(&eq, eq.n, Vec::new()).map_err(|e| e.at_frequency(eta_index))
}

/// Solves for `f̃(η', ·)` when `n ∈ {4, 5}` after differentiating the data:
/// one even step down to the Abel case for `n = 4`, and a second-order
/// diagonal-vanishing reduction for `n = 5`.
pub fn reconstruct_slice_reduced(data: &ExteriorDataset, eta_index: usize) -> Result<SliceReconstruction> {
    check_index(data, eta_index)?;
    if !(data.n == 4 || data.n == 5) {
        return Err(Error::UnsupportedDimension(data.n));
    }
    if data.r_grid.len() < MIN_NODES_REDUCED {
        return Err(Error::GridTooCoarse {
            nodes: data.r_grid.len(),
            required: MIN_NODES_REDUCED,
        });
    }
    let run = || -> Result<SliceReconstruction> {
        let eq = equation_for(data, eta_index)?;
        let order = if eq.n % 2 == 0 { 1 } else { (eq.n - 1) / 2 };
        let noise = derivative_noise(&eq.s_grid, &eq.rhs, order)?;
        let warnings = vec![format!(
            "order-{order} numerical derivative of the data; estimated noise {noise:.3e} relative"
        )];
        let n = eq.n;
        if n % 2 == 0 {
            let mut reduced = eq;
            while reduced.n > 3 {
                reduced = reduce_even_step(&reduced)?;
            }
            solve_equation(&reduced, n, warnings)
        } else {
            solve_equation(&eq, n, warnings)
        }
    };
    run().map_err(|e| e.at_frequency(eta_index))
}

/// Dispatches on the dimension.
pub fn reconstruct_any(data: &ExteriorDataset, eta_index: usize) -> Result<SliceReconstruction> {
    if data.n <= 3 {
        reconstruct_slice(data, eta_index)
    } else {
        reconstruct_slice_reduced(data, eta_index)
    }
}

fn equation_for(data: &ExteriorDataset, eta_index: usize) -> Result<KernelEquation> {
    assemble_kernel_equation(
        &data.etas[eta_index],
        data.n,
        &data.s_grid(),
        Some(&data.values[eta_index]),
    )
}

/// Ratio of the noise in the `order`-th derivative to its smooth part. The noise
/// level comes from fourth differences of the samples (which annihilate smooth
/// data to `O(h⁴)`) propagated through the differentiation stencil; the data are
/// refused when the noise exceeds the smooth part.
fn derivative_noise(grid: &[f64], values: &[Complex64], order: usize) -> Result<f64> {
    let stencil = default_stencil(order);
    let d = differentiate(grid, values, order, stencil)?;
    let n = values.len();
    let fourth: Vec<f64> = (2..n - 2)
        .map(|i| {
            (values[i - 2] - values[i - 1] * 4.0 + values[i] * 6.0 - values[i + 1] * 4.0 + values[i + 2]).norm_sqr()
        })
        .collect();
    let sigma = (fourth.iter().sum::<f64>() / (70.0 * fourth.len() as f64)).sqrt();
    let half = stencil / 2;
    let w = fd_weights(grid[half], &grid[..stencil], order);
    let gain = w[order].iter().map(|v| v * v).sum::<f64>().sqrt();
    let noise = sigma * gain;
    let interior = &d[half..n - half];
    let rms2 = interior.iter().map(|v| v.norm_sqr()).sum::<f64>() / interior.len() as f64;
    let smooth = (rms2 - noise * noise).max(0.0).sqrt();
    if noise > smooth {
        return Err(Error::DataTooCoarse(format!(
            "order-{order} derivative noise {noise:.3e} exceeds its smooth part {smooth:.3e}"
        )));
    }
    Ok(if smooth > 0.0 { noise / smooth } else { 0.0 })
}

/// `∂_s^k` of `u^p H((su-u²)^{1/2}) (su-u²)^β` in terms of `G(y) = H(√y)`,
/// as closures `(s, u) ↦ ·` with the factor `u^p` left out.
fn kernel_derivative(profile: Arc<dyn Profile>, beta: usize, k: usize) -> Option<Kernel<'static>> {
    // ∂_s y = u, so ∂_s^k [Q(y)] = u^k Q^{(k)}(y) with Q = y^β G;
    // Leibniz: Q^{(k)} = Σ_j C(k,j) β!/(β-j)! y^{β-j} G^{(k-j)}
    profile.sq_derivative(0.25, k)?;
    Some(Box::new(move |s, u| {
        let y = (u * (s - u)).max(0.0);
        let mut q = 0.0;
        let mut binom = 1.0;
        let mut falling = 1.0;
        for j in 0..=k.min(beta) {
            let g = profile.sq_derivative(y, k - j).unwrap_or(f64::NAN);
            q += binom * falling * y.powi((beta - j) as i32) * g;
            binom *= (k - j) as f64 / (j + 1) as f64;
            falling *= (beta - j) as f64;
        }
        u.powi(k as i32) * q
    }))
}

/// Constant continuation below `ε`: `F ≡ F₀` on `[0, ε]` with `F₀` fixed by the
/// equation at `s = ε`; returns `F₀` and the right-hand side for `[ε, 1]`.
fn subtract_prefix(eq: &KernelEquation) -> (Complex64, Vec<Complex64>) {
    let eps = eq.s_grid[0];
    if eq.is_homogeneous() {
        return (Complex64::new(0.0, 0.0), eq.rhs.clone());
    }
    let p0 = eq.prefix_response(eps, eps, PREFIX_NODES);
    let f0 = eq.rhs[0] / p0;
    let mut rhs: Vec<Complex64> = eq
        .s_grid
        .iter()
        .zip(&eq.rhs)
        .map(|(&s, g)| g - f0 * eq.prefix_response(s, eps, PREFIX_NODES))
        .collect();
    rhs[0] = Complex64::new(0.0, 0.0);
    (f0, rhs)
}

/// Solves `eq` for `F` and returns `f̃ = F u^{n-1}` with `n` the dimension of the
/// original (unreduced) equation.
fn solve_equation(eq: &KernelEquation, n_orig: usize, mut warnings: Vec<String>) -> Result<SliceReconstruction> {
    let grid = UniformGrid::from_nodes(&eq.s_grid)?;
    let (f0, rhs) = subtract_prefix(eq);
    let p = eq.u_power as i32;
    let profile = eq.profile.clone();
    // the unknown actually solved for, and the factor that recovers F from it
    let (sol, to_f): (_, Box<dyn Fn(f64) -> f64>) = match eq.n {
        2 => {
            // K = (s-u)^{-1/2} · G(u(s-u)) · u^{p-1/2}: Abel with φ = F u^{p-1/2}
            let g_prof = profile.clone();
            let g: Kernel<'_> = Box::new(move |s, u| g_prof.value((u * (s - u)).max(0.0).sqrt()));
            let g_ds = kernel_derivative(profile.clone(), 0, 1);
            let problem = AbelProblem {
                grid,
                alpha: 0.5,
                g,
                g_ds,
                rhs,
            };
            (solve_abel(&problem)?, Box::new(move |u: f64| u.powf(0.5 - p as f64)))
        }
        3 => {
            // K = u^p G(u(s-u)) with diagonal s^p H(0): unknown ψ = F u^p
            let k_prof = profile.clone();
            let kernel: Kernel<'_> = Box::new(move |s, u| k_prof.value((u * (s - u)).max(0.0).sqrt()));
            let problem = FirstKindProblem {
                grid,
                kernel,
                kernel_ds: kernel_derivative(profile.clone(), 0, 1),
                rhs,
                rhs_derivative: None,
            };
            (solve_first_kind(&problem)?, Box::new(move |u: f64| u.powi(-p)))
        }
        n if n % 2 == 1 => {
            let beta = (n - 3) / 2;
            let m = beta + 1;
            let derivatives: Option<Vec<Kernel<'_>>> =
                (0..=m).map(|k| kernel_derivative(profile.clone(), beta, k)).collect();
            let derivatives = derivatives.ok_or_else(|| {
                Error::invalid("odd-dimension reduction needs closed-form derivatives of the profile")
            })?;
            let problem = DiagonalVanishingProblem {
                grid,
                m,
                derivatives,
                rhs,
                rhs_derivative: None,
            };
            let second = reduce_diagonal_vanishing(problem)?;
            let mut sol = solve_second_kind(&second)?;
            sol.warnings.extend(second.warnings);
            (sol, Box::new(move |u: f64| u.powi(-p)))
        }
        n => return Err(Error::UnsupportedDimension(n)),
    };
    warnings.extend(sol.warnings);
    let k = n_orig as i32 - 1;
    let values: Vec<Complex64> = eq
        .s_grid
        .iter()
        .zip(&sol.values)
        .map(|(&u, v)| v * to_f(u) * u.powi(k))
        .collect();
    let dim_eta = vec![0.0; n_orig - 1];
    Ok(SliceReconstruction {
        slice: SliceData::new(dim_eta, eq.s_grid.clone(), values)?,
        prefix_value: f0,
        error_estimate: sol.error_estimate,
        warnings,
    })
}

/// Reconstructs every frequency of a dataset in parallel, in index order.
pub fn reconstruct_all(data: &ExteriorDataset) -> Result<Vec<SliceReconstruction>> {
    (0..data.etas.len())
        .into_par_iter()
        .map(|k| {
            let mut rec = reconstruct_any(data, k)?;
            rec.slice.eta = data.etas[k].clone();
            Ok(rec)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithZero,
    Nonzero,
}

/// Absolute tolerances for "numerically zero".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportTolerance {
    /// For horocycle transforms and exterior data.
    pub data: f64,
    /// For reconstructed slices.
    pub slice: f64,
}

impl Default for SupportTolerance {
    fn default() -> Self {
        Self {
            data: 1e-8,
            slice: 1e-6,
        }
    }
}

/// Sampling choices for [`verify_support_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyPlan {
    /// Radii of the forward check (all with `2r ≤ 1`).
    pub forward_radii: usize,
    /// Contact points per radius in the forward check.
    pub forward_contacts: usize,
    /// Frequency magnitudes; each is used along the first axis.
    pub eta_norms: Vec<f64>,
    /// s-grid size for the reconstructions.
    pub s_nodes: usize,
    /// Smallest `s = 2r`.
    pub eps: f64,
    /// Points sampled below `1 + δ/2` to spot-check the support claim.
    pub claim_samples: usize,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        Self {
            forward_radii: 8,
            forward_contacts: 32,
            eta_norms: vec![0.0, 1.0, 4.0],
            s_nodes: 128,
            eps: 1e-3,
            claim_samples: 4096,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SupportReport {
    pub n: usize,
    /// Largest reconstructed `|f̃(η', u)|` over all frequencies, `u ≤ 1`.
    pub max_slice_magnitude: f64,
    /// `(η', max_u |f̃(η', u)|)` per frequency.
    pub profile: Vec<(Vec<f64>, f64)>,
    pub tolerance: SupportTolerance,
    /// `ConsistentWithZero` iff `max_slice_magnitude ≤ tolerance.slice`.
    pub verdict: Verdict,
    /// Largest `|f̂|` over the sampled exterior horocycles.
    pub forward_max: f64,
    /// Largest exterior data modulus used by the reconstructions.
    pub data_max: f64,
    pub forward_consistent: bool,
    pub warnings: Vec<String>,
}

impl SupportReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::ConsistentWithZero && self.forward_consistent
    }
}

fn claim_point(n: usize, k: usize, top: f64, x: &mut [f64]) -> f64 {
    let idx = k as u64 + 1;
    for (j, v) in x.iter_mut().enumerate().take(n - 1) {
        *v = 4.0 * (2.0 * halton(idx, HALTON_BASES[j + 1]) - 1.0);
    }
    top * halton(idx, HALTON_BASES[0])
}

/// Checks that `f` supported in `{x_n ≥ 1 + δ}` has vanishing exterior data and
/// that the reconstructions from that data vanish below the plane `x_n = 1`.
pub fn verify_support(
    f: &DecayFunction,
    delta: f64,
    q: &QuadratureSpec,
    tol: SupportTolerance,
) -> Result<SupportReport> {
    verify_support_with(f, delta, q, tol, &VerifyPlan::default())
}

pub fn verify_support_with(
    f: &DecayFunction,
    delta: f64,
    q: &QuadratureSpec,
    tol: SupportTolerance,
    plan: &VerifyPlan,
) -> Result<SupportReport> {
    q.validate()?;
    if !(delta > 0.0) {
        return Err(Error::invalid("δ must be positive"));
    }
    if !(tol.data > 0.0 && tol.slice > 0.0) {
        return Err(Error::invalid("tolerances must be positive"));
    }
    if plan.forward_radii == 0 || plan.forward_contacts == 0 || plan.eta_norms.is_empty() {
        return Err(Error::invalid(
            "verification plan needs radii, contacts and frequencies",
        ));
    }
    if !(plan.eps > 0.0 && plan.eps < 0.5) {
        return Err(Error::invalid("ε must lie in (0, 1/2)"));
    }
    let n = f.dim();
    let top = 1.0 + 0.5 * delta;
    let mut x = vec![0.0; n - 1];
    for k in 0..plan.claim_samples {
        let h = claim_point(n, k, top, &mut x);
        let v = f.eval_checked(&x, h)?;
        if v != 0.0 {
            return Err(Error::SupportClaimViolated {
                point: format!("{x:?}, {h}"),
                value: v,
            });
        }
    }

    // forward: sphere horocycles with 2r ≤ 1 and scattered contacts
    let mut horocycles = Vec::with_capacity(plan.forward_radii * plan.forward_contacts);
    for i in 0..plan.forward_radii {
        let r = 0.5 * (i + 1) as f64 / plan.forward_radii as f64;
        for k in 0..plan.forward_contacts {
            let c: Vec<f64> = (0..n - 1)
                .map(|j| {
                    let u = if k == 0 { 0.5 } else { halton(k as u64, HALTON_BASES[j]) };
                    q.plane_cutoff * (2.0 * u - 1.0)
                })
                .collect();
            horocycles.push((c, r));
        }
    }
    let forward: Result<Vec<f64>> = horocycles
        .par_iter()
        .map(|(c, r)| transform_sphere(f, c, *r, q).map(|e| e.value.abs()))
        .collect();
    let forward_max = forward?.into_iter().fold(0.0, f64::max);

    // inverse: data on s ∈ [ε, 1] and reconstruction per frequency
    let etas: Vec<Vec<f64>> = plan
        .eta_norms
        .iter()
        .map(|&k| {
            let mut e = vec![0.0; n - 1];
            e[0] = k;
            e
        })
        .collect();
    let s_nodes = if n >= 4 {
        plan.s_nodes.max(MIN_NODES_REDUCED)
    } else {
        plan.s_nodes.max(MIN_NODES)
    };
    let r_grid: Vec<f64> = crate::quadrature::linspace(0.5 * plan.eps, 0.5, s_nodes);
    let data = synthesize_dataset(f, &etas, &r_grid, q)?;
    let data_max = data.max_modulus();
    let recs = reconstruct_all(&data)?;
    let mut warnings = Vec::new();
    let profile: Vec<(Vec<f64>, f64)> = recs
        .into_iter()
        .map(|rec| {
            warnings.extend(rec.warnings);
            (rec.slice.eta.clone(), rec.slice.max_modulus())
        })
        .collect();
    let max_slice_magnitude = profile.iter().fold(0.0, |m: f64, p| m.max(p.1));
    warnings.sort();
    warnings.dedup();
    Ok(SupportReport {
        n,
        max_slice_magnitude,
        profile,
        tolerance: tol,
        verdict: if max_slice_magnitude <= tol.slice {
            Verdict::ConsistentWithZero
        } else {
            Verdict::Nonzero
        },
        forward_max,
        data_max,
        forward_consistent: forward_max <= tol.data && data_max <= tol.data,
        warnings,
    })
}
