//! Fourier transform in the horizontal variables.
//!
//! `f̃(η', u) = ∫ f(x', u) e^{-i⟨x',η'⟩} dx'` turns the transform over sphere
//! horocycles of radius `r = s/2` into the one-dimensional kernel equation
//!
//! ```text
//! ∫_0^s F(u) u^p H(x) (su - u²)^{(n-3)/2} du = g̃(s),   x = (su - u²)^{1/2},
//! ```
//!
//! with `F(u) = f̃(η', u) / u^{n-1}`, `H(x) = J(x |η'|)`, `p = 0`, and
//! `g̃(s) = g(η', s/2) / (s/2)` where `g(η', r)` is the Fourier transform of the
//! horocycle data in the contact point.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::DecayFunction;
use crate::geometry::check_dim;
use crate::quadrature::{gauss_legendre, sphere_area};
use crate::scalar::Scalar;
use crate::special::normalized_bessel;
use crate::transform::{plane_radius, transform_sphere, usable_certificates, Estimate, QuadratureSpec};

/// Samples of `f̃(η', ·)` on an increasing grid of heights.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceData {
    pub eta: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SliceData {
    pub fn new(eta: Vec<f64>, u_grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if u_grid.len() != values.len() {
            return Err(Error::invalid("slice grid and values differ in length"));
        }
        if u_grid.first().is_some_and(|u| *u <= 0.0) || u_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("slice grid must be positive and strictly increasing"));
        }
        if values.iter().any(|v| !Scalar::is_finite(*v)) {
            return Err(Error::NonFinite("slice values".into()));
        }
        Ok(Self { eta, u_grid, values })
    }

    /// `f̃(η', u) / u^{n-1}`, the quantity that stays bounded as `u → 0`.
    pub fn normalized(&self) -> Vec<Complex64> {
        let k = self.eta.len() as i32;
        self.u_grid
            .iter()
            .zip(&self.values)
            .map(|(u, v)| v / u.powi(k))
            .collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `J(z) = ∫_{S_{n-2}} e^{-i z ⟨e, ω⟩} dω = |S_{n-2}| Λ_{(n-3)/2}(z)`.
///
/// For `n = 2` this is `2 cos z`, for `n = 3` it is `2π J_0(z)`.
pub fn sphere_phase_integral(z: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::invalid(format!(
            "phase argument must be finite and nonnegative, got {z}"
        )));
    }
    Ok(phase(z, n))
}

#[inline]
pub(crate) fn phase(z: f64, n: usize) -> f64 {
    if n == 2 {
        2.0 * z.cos()
    } else {
        sphere_area(n - 2) * normalized_bessel(0.5 * (n as f64 - 3.0), z)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_eta(f: &DecayFunction, eta: &[f64]) -> Result<()> {
    if eta.len() + 1 != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: eta.len() + 1,
        });
    }
    if eta.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("frequency must be finite"));
    }
    Ok(())
}

/// Gauss-Legendre panels on `[0, radius]`, enough of them to resolve oscillations
/// of frequency `kmax`.
fn radial_nodes(radius: f64, kmax: f64, per_panel: usize, q: &QuadratureSpec) -> Vec<(f64, f64)> {
    let panels = ((q.plane_nodes as f64 / 16.0).ceil()).max((radius * (1.0 + kmax) / 4.0).ceil()) as usize;
    let width = radius / panels as f64;
    let base = gauss_legendre(per_panel, 0.0, width);
    let mut out = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let a = width * p as f64;
        out.extend(base.iter().map(|&(x, w)| (a + x, w)));
    }
    out
}

/// Certified bound on `∫_{|x'| > R} |f(x', u)| dx'`.
fn slice_tail(f: &DecayFunction, u: f64, radius: f64, q: &QuadratureSpec) -> f64 {
    let n = f.dim();
    let k = (n - 1) as f64;
    let area = sphere_area(n - 2);
    usable_certificates(f, q.certificate_budget)
        .into_iter()
        .map(|(m, ln_c)| {
            let rate = 2.0 * m - k;
            (area.ln() + ln_c + m * (2.0 * u).ln() - rate.ln() - rate * radius.ln()).exp()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Trapezoid weights of an odd node count on `[-R, R]` per axis; `stride = 2`
/// gives the nested coarse rule.
fn cartesian_sum<F>(dim: usize, radius: f64, nodes: usize, stride: usize, mut term: F) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    let h = 2.0 * radius / (nodes - 1) as f64;
    let axis: Vec<(f64, f64)> = (0..nodes)
        .step_by(stride)
        .map(|i| {
            let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            (-radius + h * i as f64, w * h * stride as f64)
        })
        .collect();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            x[j] = axis[i].0;
            w *= axis[i].1;
        }
        total += term(&x)? * w;
        let mut j = 0;
        while j < dim {
            idx[j] += 1;
            if idx[j] < axis.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == dim {
            break;
        }
    }
    Ok(total)
}

#[inline]
fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), -theta.sin())
}

/// `f̃(η', u)`, truncated with a certified tail bound.
///
/// Horizontally radial functions use the Hankel form
/// `∫_0^R f(ρ e_1, u) ρ^{n-2} J(ρ |η'|) dρ`; others a tensor trapezoid rule on
/// `[-R, R]^{n-1}` with `R = plane_cutoff`.
pub fn fourier_slice(f: &DecayFunction, eta: &[f64], u: f64, q: &QuadratureSpec) -> Result<Estimate<Complex64>> {
    q.validate()?;
    check_eta(f, eta)?;
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::invalid(format!("height must be positive, got {u}")));
    }
    let n = f.dim();
    let k = norm(eta);
    let (value, coarse, tail) = if f.is_horizontally_radial() {
        let (radius, tail) = plane_radius(f, u, 0.0, q);
        let mut x = vec![0.0; n - 1];
        let mut sum = |nodes: &[(f64, f64)]| -> Result<f64> {
            let mut acc = 0.0;
            for &(rho, w) in nodes {
                x[0] = rho;
                acc += w * f.eval_checked(&x, u)? * rho.powi(n as i32 - 2) * phase(rho * k, n);
            }
            Ok(acc)
        };
        let fine = sum(&radial_nodes(radius, k, 16, q))?;
        let coarse = sum(&radial_nodes(radius, k, 10, q))?;
        (Complex64::new(fine, 0.0), Complex64::new(coarse, 0.0), tail)
    } else {
        let radius = q.plane_cutoff;
        let nodes = q.plane_nodes | 1;
        let term = |x: &[f64]| -> Result<Complex64> {
            let v = f.eval_checked(x, u)?;
            let dot: f64 = x.iter().zip(eta).map(|(a, b)| a * b).sum();
            Ok(cis(dot) * v)
        };
        let fine = cartesian_sum(n - 1, radius, nodes, 1, term)?;
        let coarse = cartesian_sum(n - 1, radius, nodes, 2, term)?;
        (fine, coarse, slice_tail(f, u, radius, q))
    };
    let mut est = Estimate::new(value, (value - coarse).norm(), tail);
    if tail > q.tail_tolerance * (1.0 + 1e-9) {
        est.warnings
            .push(format!("Fourier slice tail {tail:e} exceeds tolerance at u = {u}"));
    }
    Ok(est)
}

/// `f̃(η', u)` on a grid of heights.
pub fn fourier_slices(f: &DecayFunction, eta: &[f64], u_grid: &[f64], q: &QuadratureSpec) -> Result<SliceData> {
    let values: Result<Vec<Complex64>> = u_grid
        .par_iter()
        .map(|&u| fourier_slice(f, eta, u, q).map(|e| e.value))
        .collect();
    SliceData::new(eta.to_vec(), u_grid.to_vec(), values?)
}

/// Horocycle data as a function of the contact point, sampled where the
/// horizontal Fourier integral needs it.
struct ContactSamples {
    /// (contact, quadrature weight) for the Cartesian path, or
    /// (radius ρ, weight · ρ^{n-2}) for the radial path.
    nodes: Vec<(Vec<f64>, f64)>,
    values: Vec<Estimate>,
    radial: bool,
}

fn sample_contacts(f: &DecayFunction, r: f64, kmax: f64, q: &QuadratureSpec) -> Result<ContactSamples> {
    let n = f.dim();
    let radius = q.plane_cutoff;
    let radial = f.is_horizontally_radial();
    let nodes: Vec<(Vec<f64>, f64)> = if radial {
        radial_nodes(radius, kmax, 16, q)
            .into_iter()
            .map(|(rho, w)| {
                let mut c = vec![0.0; n - 1];
                c[0] = rho;
                (c, w * rho.powi(n as i32 - 2))
            })
            .collect()
    } else {
        let count = q.plane_nodes | 1;
        let h = 2.0 * radius / (count - 1) as f64;
        let mut out = Vec::new();
        let mut idx = vec![0usize; n - 1];
        loop {
            let mut w = 1.0;
            let c: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    w *= if i == 0 || i == count - 1 { 0.5 * h } else { h };
                    -radius + h * i as f64
                })
                .collect();
            out.push((c, w));
            let mut j = 0;
            while j < n - 1 {
                idx[j] += 1;
                if idx[j] < count {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n - 1 {
                break;
            }
        }
        out
    };
    let values: Result<Vec<Estimate>> = nodes.par_iter().map(|(c, _)| transform_sphere(f, c, r, q)).collect();
    Ok(ContactSamples {
        nodes,
        values: values?,
        radial,
    })
}

fn contact_fourier(samples: &ContactSamples, eta: &[f64], n: usize, tol: f64) -> Estimate<Complex64> {
    let k = norm(eta);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for ((c, w), est) in samples.nodes.iter().zip(&samples.values) {
        let weight = if samples.radial {
            Complex64::new(w * phase(c[0] * k, n), 0.0)
        } else {
            let dot: f64 = c.iter().zip(eta).map(|(a, b)| a * b).sum();
            cis(dot) * *w
        };
        value += weight * est.value;
        error += weight.norm() * est.error;
    }
    // edge magnitude of the contact profile times the volume beyond the cutoff scale
    let edge = if samples.radial {
        let last = samples.values.len().saturating_sub(3);
        let rho = samples.nodes.last().map_or(0.0, |(c, _)| c[0]);
        samples.values[last..].iter().fold(0.0_f64, |m, e| m.max(e.value.abs()))
            * sphere_area(n - 2)
            * rho.powi(n as i32 - 1)
    } else {
        let radius = samples.nodes.last().map_or(0.0, |(c, _)| c[0]);
        samples
            .nodes
            .iter()
            .zip(&samples.values)
            .filter(|((c, _), _)| c.iter().any(|x| (x.abs() - radius).abs() < 1e-12))
            .fold(0.0_f64, |m, (_, e)| m.max(e.value.abs()))
            * (2.0 * radius).powi(n as i32 - 1)
    };
    let mut est = Estimate::new(value, error, edge);
    if edge > tol * (1.0 + 1e-9) {
        est.warnings
            .push(format!("contact truncation estimate {edge:e} exceeds tolerance"));
    }
    est
}

fn check_radii(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0)) || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be positive and strictly increasing"));
    }
    let top = r_grid[r_grid.len() - 1];
    if 2.0 * top > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("exterior family needs 2r ≤ 1, got r = {top}")));
    }
    Ok(())
}

/// `g(η', r) = ∫ f̂(Sphere(x', r)) e^{-i⟨x',η'⟩} dx'` for each `r`.
pub fn exterior_data(
    f: &DecayFunction,
    eta: &[f64],
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<Estimate<Complex64>>> {
    let mut all = exterior_data_multi(f, &[eta.to_vec()], r_grid, q)?;
    Ok(all.pop().unwrap_or_default())
}

/// [`exterior_data`] for several frequencies sharing the horocycle evaluations.
/// The result is indexed `[frequency][radius]`.
pub fn exterior_data_multi(
    f: &DecayFunction,
    etas: &[Vec<f64>],
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<Vec<Estimate<Complex64>>>> {
    q.validate()?;
    check_radii(r_grid)?;
    for eta in etas {
        check_eta(f, eta)?;
    }
    let n = f.dim();
    let kmax = etas.iter().map(|e| norm(e)).fold(0.0, f64::max);
    let mut out: Vec<Vec<Estimate<Complex64>>> = vec![Vec::with_capacity(r_grid.len()); etas.len()];
    for &r in r_grid {
        let samples = sample_contacts(f, r, kmax, q)?;
        for (i, eta) in etas.iter().enumerate() {
            out[i].push(contact_fourier(&samples, eta, n, q.tail_tolerance));
        }
    }
    Ok(out)
}

/// `r ∫_0^{2r} f̃(η', u) u^{-(n-1)} J((2ur - u²)^{1/2} |η'|) (2ur - u²)^{(n-3)/2} du`,
/// the height-integral form of the exterior data, evaluated with `nodes`
/// Gauss-Legendre points after `u = 2r sin² ψ`.
pub fn fubini_integral(f: &DecayFunction, eta: &[f64], r: f64, q: &QuadratureSpec, nodes: usize) -> Result<Complex64> {
    check_eta(f, eta)?;
    let n = f.dim();
    let s = 2.0 * r;
    let profile = BesselProfile::new(n, norm(eta))?;
    let mut err = None;
    let value = kernel_integral(n, &profile, 0, s, nodes, |u| match fourier_slice(f, eta, u, q) {
        Ok(e) => e.value / u.powi(n as i32 - 1),
        Err(e) => {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(value * r),
    }
}

/// `∫_0^s F(u) u^p H(x) (su - u²)^{(n-3)/2} du` via `u = s sin² ψ`, which gives
/// `2 s^{n-2} ∫_0^{π/2} F(u) u^p H(s sin ψ cos ψ) (sin ψ cos ψ)^{n-2} dψ`.
pub(crate) fn kernel_integral<T: Scalar>(
    n: usize,
    profile: &dyn Profile,
    p: usize,
    s: f64,
    nodes: usize,
    mut unknown: impl FnMut(f64) -> T,
) -> T {
    let mut acc = T::zero();
    for (psi, w) in gauss_legendre(nodes, 0.0, std::f64::consts::FRAC_PI_2) {
        let (sn, cs) = psi.sin_cos();
        let u = s * sn * sn;
        let sc = sn * cs;
        let weight = w * u.powi(p as i32) * profile.value(s * sc) * sc.powi(n as i32 - 2);
        acc = acc + unknown(u) * weight;
    }
    acc * (2.0 * s.powi(n as i32 - 2))
}

/// The radial factor `H` of a kernel equation.
pub trait Profile: Send + Sync {
    fn value(&self, x: f64) -> f64;

    fn derivative(&self, x: f64) -> f64 {
        let h = 1e-5 * x.abs().max(1.0);
        if x >= 2.0 * h {
            (self.value(x - 2.0 * h) - 8.0 * self.value(x - h) + 8.0 * self.value(x + h) - self.value(x + 2.0 * h))
                / (12.0 * h)
        } else {
            // H is even in x for every profile used here
            (8.0 * (self.value(x + h) - self.value((x - h).abs())) - self.value(x + 2.0 * h)
                + self.value((x - 2.0 * h).abs()))
                / (12.0 * h)
        }
    }

    /// `d^k/dy^k H(√y)` when available in closed form.
    fn sq_derivative(&self, _y: f64, _k: usize) -> Option<f64> {
        None
    }

    fn describe(&self) -> String;
}

/// `H(x) = J(x |η'|)` in dimension `n`.
#[derive(Clone, Debug)]
pub struct BesselProfile {
    n: usize,
    eta_norm: f64,
    area: f64,
}

impl BesselProfile {
    pub fn new(n: usize, eta_norm: f64) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            eta_norm,
            area: sphere_area(n - 2),
        })
    }

    fn nu(&self) -> f64 {
        0.5 * (self.n as f64 - 3.0)
    }
}

impl Profile for BesselProfile {
    fn value(&self, x: f64) -> f64 {
        phase(x * self.eta_norm, self.n)
    }

    fn derivative(&self, x: f64) -> f64 {
        // Λ_ν'(z) = -z Λ_{ν+1}(z) / (2(ν+1))
        let z = x * self.eta_norm;
        let nu = self.nu();
        -self.area * self.eta_norm * z / (2.0 * (nu + 1.0)) * normalized_bessel(nu + 1.0, z)
    }

    fn sq_derivative(&self, y: f64, k: usize) -> Option<f64> {
        // H(√y) = |S| ₀F₁(; b; -c y), b = ν + 1, c = |η'|² / 4
        let nu = self.nu();
        let b = nu + 1.0;
        let c = 0.25 * self.eta_norm * self.eta_norm;
        let mut coef = self.area;
        for j in 0..k {
            coef *= -c / (b + j as f64);
        }
        Some(coef * normalized_bessel(nu + k as f64, self.eta_norm * y.max(0.0).sqrt()))
    }

    fn describe(&self) -> String {
        format!("J(x·{}) for n = {}", self.eta_norm, self.n)
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied profile with an optional analytic derivative.
#[derive(Clone)]
pub struct FnProfile {
    value: RealFn,
    derivative: Option<RealFn>,
    label: String,
}

impl FnProfile {
    pub fn new(label: impl Into<String>, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
            label: label.into(),
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }
}

impl Profile for FnProfile {
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let h = 1e-5 * x.abs().max(1.0);
                (self.value(x - 2.0 * h) - 8.0 * self.value(x - h) + 8.0 * self.value(x + h) - self.value(x + 2.0 * h))
                    / (12.0 * h)
            }
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// `H₁(x) = x H'(x) + (n-1) H(x)`, the profile after one even-dimension step.
#[derive(Clone)]
pub struct EvenStepProfile {
    inner: Arc<dyn Profile>,
    n: usize,
}

impl EvenStepProfile {
    pub fn new(inner: Arc<dyn Profile>, n: usize) -> Self {
        Self { inner, n }
    }
}

impl Profile for EvenStepProfile {
    fn value(&self, x: f64) -> f64 {
        x * self.inner.derivative(x) + (self.n as f64 - 1.0) * self.inner.value(x)
    }

    fn sq_derivative(&self, y: f64, k: usize) -> Option<f64> {
        // with G(y) = H(√y): H₁(√y) = 2y G'(y) + (n-1) G(y)
        let g_k = self.inner.sq_derivative(y, k)?;
        let g_k1 = self.inner.sq_derivative(y, k + 1)?;
        Some(2.0 * y * g_k1 + (2.0 * k as f64 + self.n as f64 - 1.0) * g_k)
    }

    fn describe(&self) -> String {
        format!("x H'(x) + {} H(x) with H = {}", self.n - 1, self.inner.describe())
    }
}

/// The one-dimensional equation
/// `∫_0^s F(u) u^p H((su - u²)^{1/2}) (su - u²)^{(n-3)/2} du = rhs(s)` on `s_grid`.
#[derive(Clone)]
pub struct KernelEquation {
    pub n: usize,
    pub profile: Arc<dyn Profile>,
    pub u_power: usize,
    pub s_grid: Vec<f64>,
    pub rhs: Vec<Complex64>,
    pub unknown: String,
    pub notes: Vec<String>,
}

impl fmt::Debug for KernelEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelEquation")
            .field("n", &self.n)
            .field("profile", &self.profile.describe())
            .field("u_power", &self.u_power)
            .field("nodes", &self.s_grid.len())
            .field("unknown", &self.unknown)
            .finish()
    }
}

impl KernelEquation {
    pub fn new(
        n: usize,
        profile: Arc<dyn Profile>,
        u_power: usize,
        s_grid: Vec<f64>,
        rhs: Vec<Complex64>,
        unknown: String,
        notes: Vec<String>,
    ) -> Result<Self> {
        check_dim(n)?;
        let h0 = profile.value(0.0);
        if !(h0.abs() > 1e-12) {
            return Err(Error::invalid(format!(
                "kernel profile must satisfy H(0) ≠ 0, got {h0:e}"
            )));
        }
        if s_grid.len() != rhs.len() {
            return Err(Error::invalid("s grid and right-hand side differ in length"));
        }
        if s_grid.first().map_or(true, |s| *s <= 0.0) || s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("s grid must be positive and strictly increasing"));
        }
        if rhs.iter().any(|v| !Scalar::is_finite(*v)) {
            return Err(Error::NonFinite("kernel equation right-hand side".into()));
        }
        Ok(Self {
            n,
            profile,
            u_power,
            s_grid,
            rhs,
            unknown,
            notes,
        })
    }

    pub fn h0(&self) -> f64 {
        self.profile.value(0.0)
    }

    /// Exponent `(n-3)/2` of `su - u²` in the kernel.
    pub fn exponent(&self) -> f64 {
        0.5 * (self.n as f64 - 3.0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// The kernel `u^p H(x) (su - u²)^{(n-3)/2}` at `0 < u < s`.
    pub fn kernel(&self, s: f64, u: f64) -> f64 {
        let y = (u * (s - u)).max(0.0);
        u.powi(self.u_power as i32) * self.profile.value(y.sqrt()) * y.powf(self.exponent())
    }

    /// `∫_0^s F(u) K(s, u) du` by Gauss-Legendre after `u = s sin² ψ`.
    pub fn apply<T: Scalar>(&self, s: f64, nodes: usize, unknown: impl FnMut(f64) -> T) -> T {
        kernel_integral(self.n, &*self.profile, self.u_power, s, nodes, unknown)
    }

    /// `∫_0^ε K(s, u) du` for `s ≥ ε`, the response to a constant unknown on `[0, ε]`.
    pub fn prefix_response(&self, s: f64, eps: f64, nodes: usize) -> f64 {
        let mut acc = 0.0;
        for (psi, w) in gauss_legendre(nodes, 0.0, std::f64::consts::FRAC_PI_2) {
            let (sn, cs) = psi.sin_cos();
            let u = eps * sn * sn;
            // (su - u²) = u (s - u), and s - u = (s - ε) + ε cos² ψ without cancellation
            let rest = (s - eps) + eps * cs * cs;
            let y = u * rest;
            let du = 2.0 * eps * sn * cs;
            acc += w * du * u.powi(self.u_power as i32) * self.profile.value(y.sqrt()) * y.powf(self.exponent());
        }
        acc
    }
}

/// Builds the kernel equation for frequency `eta` in dimension `n` from exterior
/// data `g(η', s/2)` (or the homogeneous equation when `data` is `None`).
pub fn assemble_kernel_equation(
    eta: &[f64],
    n: usize,
    s_grid: &[f64],
    data: Option<&[Complex64]>,
) -> Result<KernelEquation> {
    check_dim(n)?;
    if eta.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eta.len() + 1,
        });
    }
    if s_grid.iter().any(|s| !(*s > 0.0 && *s <= 1.0 + 1e-12)) {
        return Err(Error::invalid("s = 2r must lie in (0, 1]"));
    }
    let rhs: Vec<Complex64> = match data {
        Some(g) => {
            if g.len() != s_grid.len() {
                return Err(Error::invalid("data and s grid differ in length"));
            }
            g.iter().zip(s_grid).map(|(v, s)| v / (0.5 * s)).collect()
        }
        None => vec![Complex64::new(0.0, 0.0); s_grid.len()],
    };
    let profile = BesselProfile::new(n, norm(eta))?;
    KernelEquation::new(
        n,
        Arc::new(profile),
        0,
        s_grid.to_vec(),
        rhs,
        "F(u) = f̃(η', u) / u^(n-1)".to_string(),
        Vec::new(),
    )
}
