//! Forward horocycle transform `f ↦ f̂(ξ)`.
//!
//! Sphere horocycles are integrated slice by slice in the angle `θ` of the point
//! seen from the Euclidean center, after the substitution `θ = 2 arctan(e^{-v})`
//! which sends the contact point to `v → +∞`. In `v` the slice weight is
//! `e^{(n-1) v}` and the slice point is `(x' + (r / cosh v) ω, 2r / (1 + e^{2v}))`.
//! Planes are integrated in log-polar coordinates.

use crate::error::{Error, Result};
use crate::functions::DecayFunction;
use crate::geometry::{distance_from_origin, horocycle_to_plane, Horocycle};
use crate::quadrature::{halton, sphere_area, SphereRule, HALTON_BASES};

/// Quadrature parameters shared by the forward transforms and Fourier slices.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes in the slice variable of sphere horocycles.
    pub theta_nodes: usize,
    /// Nodes per angular coordinate of `S_{n-2}`.
    pub sphere_nodes: usize,
    /// Minimal truncation radius for horizontal integrals.
    pub plane_cutoff: f64,
    /// Nodes per axis (or radial nodes) for horizontal integrals.
    pub plane_nodes: usize,
    /// Target for truncation tails; larger tails produce warnings.
    pub tail_tolerance: f64,
    /// Sample count for decay certificates.
    pub certificate_budget: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            theta_nodes: 512,
            sphere_nodes: 24,
            plane_cutoff: 8.0,
            plane_nodes: 256,
            tail_tolerance: 1e-10,
            certificate_budget: 4096,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.theta_nodes < 2 || self.sphere_nodes < 2 || self.plane_nodes < 2 || self.certificate_budget < 2 {
            return Err(Error::invalid("quadrature node counts must be at least 2"));
        }
        if !(self.plane_cutoff > 0.0) || !(self.tail_tolerance > 0.0) {
            return Err(Error::invalid("plane cutoff and tail tolerance must be positive"));
        }
        Ok(())
    }
}

/// A quadrature result with its error bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T = f64> {
    pub value: T,
    /// Discretization error estimate (difference to a coarser nested rule).
    pub error: f64,
    /// Bound on the truncated tail, from the decay certificate.
    pub tail: f64,
    pub warnings: Vec<String>,
}

impl<T> Estimate<T> {
    pub(crate) fn new(value: T, error: f64, tail: f64) -> Self {
        Self {
            value,
            error,
            tail,
            warnings: Vec::new(),
        }
    }
}

/// `k`-th point of the certificate sample: the origin first, then a Halton
/// sequence with heights log-uniform in `[e^{-8}, e^{8}]` and horizontal
/// coordinates `sinh(6 (2u - 1))`.
pub(crate) fn certificate_point(n: usize, k: usize, x: &mut [f64]) -> f64 {
    if k == 0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return 1.0;
    }
    let idx = k as u64;
    for (j, v) in x.iter_mut().enumerate().take(n - 1) {
        let u = halton(idx, HALTON_BASES[j + 1]);
        *v = (6.0 * (2.0 * u - 1.0)).sinh();
    }
    (-8.0 + 16.0 * halton(idx, HALTON_BASES[0])).exp()
}

/// `ln sup |f| e^{m d}` over the certificate sample (`-∞` if `f` vanishes on it).
/// `m = 0` is allowed and gives the log of the sampled sup norm.
pub(crate) fn log_certificate(f: &DecayFunction, m: f64, budget: usize) -> Result<f64> {
    let key = (m.to_bits(), budget);
    if let Some(v) = f.certificates.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let n = f.dim();
    let mut x = vec![0.0; n - 1];
    let mut best = f64::NEG_INFINITY;
    for k in 0..budget {
        let h = certificate_point(n, k, &mut x);
        let v = f.eval_checked(&x, h)?.abs();
        if v == 0.0 {
            continue;
        }
        let l = v.ln() + m * distance_from_origin(&x, h);
        if l > 709.0 {
            return Err(Error::Overflow(format!("x' = {x:?}, x_n = {h:e} with m = {m}")));
        }
        best = best.max(l);
    }
    f.certificates.lock().unwrap().insert(key, best);
    Ok(best)
}

/// Empirical `sup |f(x)| e^{m d(0,x)}` over a deterministic low-discrepancy sample.
pub fn decay_certificate(f: &DecayFunction, m: f64, budget: usize) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::invalid(format!("decay order m must be positive, got {m}")));
    }
    if m > f.decay_order() {
        return Err(Error::invalid(format!(
            "m = {m} exceeds the declared decay order {}",
            f.decay_order()
        )));
    }
    if budget == 0 {
        return Err(Error::invalid("certificate budget must be positive"));
    }
    Ok(log_certificate(f, m, budget)?.exp())
}

/// Decay orders tried when converting certificates into truncation bounds.
pub(crate) fn candidate_orders(f: &DecayFunction) -> Vec<f64> {
    let n = f.dim() as f64;
    let mut out: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|k| k * n)
        .filter(|m| *m <= f.decay_order())
        .collect();
    if f.decay_order().is_finite() && !out.contains(&f.decay_order()) {
        out.push(f.decay_order());
    }
    out
}

/// Minimizes `ln coef(m) - rate(m) · t` style bounds: for each usable candidate
/// order returns `(m, ln C_m)`; orders whose certificate overflows are skipped.
pub(crate) fn usable_certificates(f: &DecayFunction, budget: usize) -> Vec<(f64, f64)> {
    candidate_orders(f)
        .into_iter()
        .filter_map(|m| log_certificate(f, m, budget).ok().map(|c| (m, c)))
        .collect()
}

pub(crate) fn require_integrable(f: &DecayFunction) -> Result<()> {
    let n = f.dim() as f64;
    if f.decay_order() < n {
        return Err(Error::NonIntegrable {
            declared: f.decay_order(),
            required: n,
        });
    }
    Ok(())
}

fn check_contact(f: &DecayFunction, contact: &[f64], r: f64) -> Result<()> {
    if contact.len() + 1 != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: contact.len() + 1,
        });
    }
    Horocycle::sphere(contact.to_vec(), r).map(|_| ())
}

/// Integration range in `v` for a sphere horocycle of radius `r`, with the
/// certified tail mass outside it.
fn slice_range(f: &DecayFunction, r: f64, q: &QuadratureSpec) -> Result<Option<(f64, f64, f64)>> {
    let n = f.dim();
    let area = sphere_area(n - 2);
    let ln_sup = log_certificate(f, 0.0, q.certificate_budget)?;
    if ln_sup == f64::NEG_INFINITY {
        return Ok(None);
    }
    let half_tol = 0.5 * q.tail_tolerance;
    let k = (n - 1) as f64;
    // top of the sphere: |S| sup|f| e^{(n-1) v} / (n-1) ≤ tol/2
    let v_lo = ((half_tol * k).ln() - area.ln() - ln_sup) / k;
    let lo_tail = (area.ln() + ln_sup + k * v_lo).exp() / k;
    // contact point: |f| ≤ C_m h^m, h ≤ 2r e^{-2v}, tail |S| C_m (2r)^m e^{-(2m-n+1) V} / (2m-n+1)
    let mut best: Option<(f64, f64)> = None;
    for (m, ln_c) in usable_certificates(f, q.certificate_budget) {
        let rate = 2.0 * m - k;
        let ln_coef = area.ln() + ln_c + m * (2.0 * r).ln() - rate.ln();
        let v = ((ln_coef - half_tol.ln()) / rate).max(v_lo + 1.0);
        let tail = (ln_coef - rate * v).exp();
        if best.map_or(true, |(bv, _)| v < bv) {
            best = Some((v, tail));
        }
    }
    let (v_hi, hi_tail) = best.ok_or_else(|| Error::NonIntegrable {
        declared: f.decay_order(),
        required: n as f64,
    })?;
    Ok(Some((v_lo, v_hi, lo_tail + hi_tail)))
}

/// Trapezoid sum over `nodes` equispaced `v` in `[v_lo, v_hi]` of
/// `e^{(n-1)v} Σ_ω w f(contact + (r / cosh v) ω, 2r / (1 + e^{2v}))`.
#[allow(clippy::too_many_arguments)]
fn sphere_sum(
    f: &DecayFunction,
    contact: &[f64],
    r: f64,
    rule: &SphereRule,
    zonal: bool,
    v_lo: f64,
    v_hi: f64,
    nodes: usize,
) -> Result<f64> {
    let n = f.dim();
    let k = (n - 1) as f64;
    let h = (v_hi - v_lo) / (nodes - 1) as f64;
    let c_norm = contact.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut x = vec![0.0; n - 1];
    let mut total = 0.0;
    for i in 0..nodes {
        let v = v_lo + h * i as f64;
        let rho = r / v.cosh();
        let height = 2.0 * r / (1.0 + (2.0 * v).exp());
        if height <= 0.0 {
            continue;
        }
        let mut slice = 0.0;
        for (omega, w) in rule.iter() {
            if zonal {
                x[0] = c_norm + rho * omega[0];
                if n > 2 {
                    x[1] = rho * omega[1];
                }
            } else {
                for j in 0..n - 1 {
                    x[j] = contact[j] + rho * omega[j];
                }
            }
            slice += w * f.eval_checked(&x, height)?;
        }
        let end = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
        total += end * (k * v).exp() * slice;
    }
    Ok(total * h)
}

/// `f̂` of the sphere horocycle with contact point `contact` and radius `r`.
pub fn transform_sphere(f: &DecayFunction, contact: &[f64], r: f64, q: &QuadratureSpec) -> Result<Estimate> {
    q.validate()?;
    check_contact(f, contact, r)?;
    require_integrable(f)?;
    let Some((v_lo, v_hi, tail)) = slice_range(f, r, q)? else {
        return Ok(Estimate::new(0.0, 0.0, 0.0));
    };
    let n = f.dim();
    let zonal = f.is_horizontally_radial() && n >= 3;
    let make = |nodes: usize| {
        if zonal {
            SphereRule::zonal(n, nodes)
        } else {
            SphereRule::new(n, nodes)
        }
    };
    let fine_nodes = q.theta_nodes | 1;
    let fine = sphere_sum(f, contact, r, &make(q.sphere_nodes), zonal, v_lo, v_hi, fine_nodes)?;
    let coarse = sphere_sum(
        f,
        contact,
        r,
        &make((q.sphere_nodes / 2).max(2)),
        zonal,
        v_lo,
        v_hi,
        fine_nodes / 2 + 1,
    )?;
    let mut est = Estimate::new(fine, (fine - coarse).abs(), tail);
    if tail > q.tail_tolerance * (1.0 + 1e-9) {
        est.warnings
            .push(format!("slice truncation tail {tail:e} exceeds tolerance"));
    }
    Ok(est)
}

/// Log-polar trapezoid sum of `∫ g(ρ ω, c) ρ^{n-1} dw dω` over `w = ln ρ ∈ [w_lo, w_hi]`.
fn log_polar_sum(g: &DecayFunction, c: f64, rule: &SphereRule, w_lo: f64, w_hi: f64, nodes: usize) -> Result<f64> {
    let n = g.dim();
    let k = (n - 1) as f64;
    let h = (w_hi - w_lo) / (nodes - 1) as f64;
    let mut x = vec![0.0; n - 1];
    let mut total = 0.0;
    for i in 0..nodes {
        let w = w_lo + h * i as f64;
        let rho = w.exp();
        let mut ring = 0.0;
        for (omega, wt) in rule.iter() {
            for j in 0..n - 1 {
                x[j] = rho * omega[j];
            }
            ring += wt * g.eval_checked(&x, c)?;
        }
        let end = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
        total += end * (k * w).exp() * ring;
    }
    Ok(total * h)
}

/// Largest radius the plane quadrature will extend to.
const MAX_PLANE_RADIUS: f64 = 1e6;

/// Horizontal truncation radius for integrals at height `c`: at least
/// `plane_cutoff`, enlarged until the certified tail
/// `|S| C_m (2c)^m c^{-(n-1)} R^{n-1-2m} / (2m-n+1)` is below half the tolerance.
/// Returns `(R, tail bound)`.
pub(crate) fn plane_radius(g: &DecayFunction, c: f64, weight_power: f64, q: &QuadratureSpec) -> (f64, f64) {
    let n = g.dim();
    let k = (n - 1) as f64;
    let area = sphere_area(n - 2);
    let half_tol = 0.5 * q.tail_tolerance;
    let mut best: Option<(f64, f64)> = None;
    for (m, ln_c) in usable_certificates(g, q.certificate_budget) {
        let rate = 2.0 * m - k;
        // e^{d(0,x)} ≥ ρ² / (2c) on the plane x_n = c
        let ln_coef = area.ln() + ln_c + m * (2.0 * c).ln() - weight_power * c.ln() - rate.ln();
        let ln_r = ((ln_coef - half_tol.ln()) / rate)
            .max(q.plane_cutoff.ln())
            .min(MAX_PLANE_RADIUS.ln());
        let tail = (ln_coef - rate * ln_r).exp();
        if best.map_or(true, |(br, bt)| ln_r < br || (ln_r == br && tail < bt)) {
            best = Some((ln_r, tail));
        }
    }
    match best {
        Some((ln_r, tail)) => (ln_r.exp(), tail),
        None => (q.plane_cutoff, f64::INFINITY),
    }
}

/// `∫_{R^{n-1}} f(x', c) c^{-(n-1)} dx'`, truncated at a certified radius.
pub fn transform_plane(f: &DecayFunction, c: f64, q: &QuadratureSpec) -> Result<Estimate> {
    q.validate()?;
    Horocycle::plane(c)?;
    let n = f.dim();
    let k = (n - 1) as f64;
    let ln_sup = log_certificate(f, 0.0, q.certificate_budget)?;
    if ln_sup == f64::NEG_INFINITY {
        return Ok(Estimate::new(0.0, 0.0, 0.0));
    }
    let area = sphere_area(n - 2);
    let scale = c.powf(-k);
    let (radius, outer_tail) = plane_radius(f, c, k, q);
    // inner ball: |S| sup|f| ρ^{n-1} / (n-1) · c^{-(n-1)} ≤ tol/2
    let w_lo = ((0.5 * q.tail_tolerance * k).ln() - area.ln() - ln_sup + k * c.ln()) / k;
    let w_lo = w_lo.min(radius.ln() - 1.0);
    let inner_tail = (area.ln() + ln_sup + k * w_lo).exp() / k * scale;
    let w_hi = radius.ln();
    let nodes = q.plane_nodes | 1;
    let fine = log_polar_sum(f, c, &SphereRule::new(n, q.sphere_nodes), w_lo, w_hi, nodes)? * scale;
    let coarse = log_polar_sum(
        f,
        c,
        &SphereRule::new(n, (q.sphere_nodes / 2).max(2)),
        w_lo,
        w_hi,
        nodes / 2 + 1,
    )? * scale;
    let tail = outer_tail + inner_tail;
    let mut est = Estimate::new(fine, (fine - coarse).abs(), tail);
    if tail > q.tail_tolerance * (1.0 + 1e-9) {
        est.warnings.push(format!(
            "plane truncation tail {tail:e} at radius {radius:e} exceeds tolerance"
        ));
    }
    Ok(est)
}

/// `f̂` of a sphere horocycle computed by moving it onto the plane `x_n = 1/(2r)`
/// with an isometry and integrating `f ∘ σ^{-1}` there.
pub fn transform_via_isometry(f: &DecayFunction, contact: &[f64], r: f64, q: &QuadratureSpec) -> Result<Estimate> {
    check_contact(f, contact, r)?;
    require_integrable(f)?;
    let back = horocycle_to_plane(contact, r)?.inverse();
    let pulled = f.compose(move |x, h| back.apply_in_place(x, h));
    transform_plane(&pulled, 1.0 / (2.0 * r), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{exp_distance, gaussian, vertical_bump, zero};
    use crate::quadrature::gauss_legendre;
    use std::f64::consts::PI;

    #[test]
    fn zero_function_transforms_to_zero() {
        let q = QuadratureSpec::default();
        for n in 2..=4 {
            let f = zero(n).unwrap();
            let c = vec![0.3; n - 1];
            assert_eq!(transform_sphere(&f, &c, 0.4, &q).unwrap().value, 0.0);
            assert_eq!(transform_plane(&f, 0.7, &q).unwrap().value, 0.0);
            assert_eq!(transform_via_isometry(&f, &c, 0.4, &q).unwrap().value, 0.0);
        }
    }

    /// Arc-length quadrature over the circle of radius r tangent at `a`:
    /// points (a + r sin t, r - r cos t), ds / y = r dt / y.
    fn circle_arc_oracle(f: &DecayFunction, a: f64, r: f64) -> f64 {
        // split at the contact point and cluster nodes there with t = π (1 - τ^p) style grading
        let mut total = 0.0;
        for (tau, w) in gauss_legendre(400, 0.0, 1.0) {
            // t ∈ (0, π] with t = π τ^4
            let t = PI * tau.powi(4);
            let dt = 4.0 * PI * tau.powi(3) * w;
            for sign in [-1.0, 1.0] {
                let x = a + sign * r * t.sin();
                let y = 2.0 * r * (0.5 * t).sin().powi(2);
                if y == 0.0 {
                    continue;
                }
                total += f.eval(&[x], y) * r / y * dt;
            }
        }
        total
    }

    #[test]
    fn n2_matches_arc_length_oracle() {
        let f = exp_distance(2, 4.0).unwrap();
        let q = QuadratureSpec::default();
        let v = transform_sphere(&f, &[0.0], 0.25, &q).unwrap();
        let oracle = circle_arc_oracle(&f, 0.0, 0.25);
        assert!(
            (v.value - oracle).abs() <= 1e-6 * oracle.abs(),
            "{} vs {oracle}",
            v.value
        );
        let g = gaussian(2, vec![0.2], 0.7, 0.4, 0.6).unwrap();
        let v = transform_sphere(&g, &[-0.1], 0.3, &q).unwrap();
        let oracle = circle_arc_oracle(&g, -0.1, 0.3);
        assert!(
            (v.value - oracle).abs() <= 1e-8 * oracle.abs(),
            "{} vs {oracle}",
            v.value
        );
    }

    #[test]
    fn sphere_and_isometry_routes_agree() {
        let q = QuadratureSpec::default();
        let cases: [(usize, Vec<f64>, f64); 4] = [
            (2, vec![0.0], 0.25),
            (3, vec![0.0, 0.0], 1.0 / 3.0),
            (3, vec![0.4, -0.2], 0.45),
            (4, vec![0.0, 0.0, 0.0], 0.5),
        ];
        for (n, contact, r) in cases {
            let f = gaussian(n, vec![], 0.9, 0.5, 0.5).unwrap();
            let a = transform_sphere(&f, &contact, r, &q).unwrap();
            let b = transform_via_isometry(&f, &contact, r, &q).unwrap();
            let rel = (a.value - b.value).abs() / (a.value.abs() + 1e-12);
            assert!(rel < 1e-6, "n={n} r={r}: {} vs {} ({rel:e})", a.value, b.value);
        }
    }

    #[test]
    fn exp_distance_via_isometry_route() {
        let q = QuadratureSpec::default();
        let f = exp_distance(2, 4.0).unwrap();
        let a = transform_sphere(&f, &[0.0], 0.25, &q).unwrap();
        let b = transform_via_isometry(&f, &[0.0], 0.25, &q).unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-6 * a.value.abs(),
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn plane_gaussian_closed_forms() {
        let q = QuadratureSpec::default();
        let g = |h: f64| (-(h - 0.8) * (h - 0.8)).exp();
        let f2 = DecayFunction::new(2, f64::INFINITY, move |x, h| (-x[0] * x[0]).exp() * g(h)).unwrap();
        let v = transform_plane(&f2, 1.0, &q).unwrap();
        assert!((v.value - g(1.0) * PI.sqrt()).abs() < 1e-10, "{}", v.value);
        let f3 = DecayFunction::new(3, f64::INFINITY, move |x, h| {
            (-(x[0] * x[0] + x[1] * x[1])).exp() * g(h)
        })
        .unwrap();
        let v = transform_plane(&f3, 0.5, &q).unwrap();
        assert!((v.value - 4.0 * PI * g(0.5)).abs() < 1e-9, "{}", v.value);
    }

    #[test]
    fn certificate_examples() {
        let z = zero(3).unwrap();
        assert_eq!(decay_certificate(&z, 1.0, 256).unwrap(), 0.0);
        let f = exp_distance(2, 2.0).unwrap();
        assert!((decay_certificate(&f, 1.0, 256).unwrap() - 1.0).abs() < 1e-15);
        assert!((decay_certificate(&f, 2.0, 256).unwrap() - 1.0).abs() < 1e-12);
        assert!(decay_certificate(&f, 2.5, 256).is_err());
    }

    #[test]
    fn certificate_overflow_names_point() {
        let f = DecayFunction::new(2, 1000.0, |_, _| 1.0).unwrap();
        match decay_certificate(&f, 1000.0, 64) {
            Err(Error::Overflow(msg)) => assert!(msg.contains("x_n")),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn insufficient_decay_is_rejected() {
        let f = exp_distance(3, 2.0).unwrap();
        let q = QuadratureSpec::default();
        assert!(matches!(
            transform_sphere(&f, &[0.0, 0.0], 0.3, &q),
            Err(Error::NonIntegrable { .. })
        ));
    }

    #[test]
    fn nan_propagates() {
        let f = DecayFunction::new(2, f64::INFINITY, |x, _| if x[0] > 0.1 { f64::NAN } else { 0.0 }).unwrap();
        let q = QuadratureSpec::default();
        assert!(transform_sphere(&f, &[0.0], 0.3, &q).is_err());
    }

    #[test]
    fn translation_equivariance() {
        let q = QuadratureSpec::default();
        let f = gaussian(3, vec![0.3, -0.1], 0.8, 0.6, 0.5).unwrap();
        let t = [0.25, 0.4];
        let shifted = gaussian(3, vec![0.3 - t[0], -0.1 - t[1]], 0.8, 0.6, 0.5).unwrap();
        let a = transform_sphere(&f, &[0.1 + t[0], 0.2 + t[1]], 0.35, &q).unwrap();
        let b = transform_sphere(&shifted, &[0.1, 0.2], 0.35, &q).unwrap();
        assert!((a.value - b.value).abs() <= 1e-10 * a.value.abs().max(1.0));
    }

    #[test]
    fn refinement_within_error_estimate() {
        let f = gaussian(3, vec![0.2, 0.0], 0.8, 0.5, 0.5).unwrap();
        let q = QuadratureSpec::default();
        let fine = QuadratureSpec {
            theta_nodes: 2 * q.theta_nodes,
            sphere_nodes: 2 * q.sphere_nodes,
            ..q.clone()
        };
        let a = transform_sphere(&f, &[0.3, 0.1], 0.3, &q).unwrap();
        let b = transform_sphere(&f, &[0.3, 0.1], 0.3, &fine).unwrap();
        assert!(
            (a.value - b.value).abs() <= a.error.max(1e-14),
            "{:e} > {:e}",
            (a.value - b.value).abs(),
            a.error
        );
    }

    #[test]
    fn support_above_plane_gives_zero_exterior_transform() {
        let f = vertical_bump(3, vec![], 1.0, 1.05, 2.0).unwrap();
        let q = QuadratureSpec::default();
        for r in [0.1, 0.3, 0.5] {
            let v = transform_sphere(&f, &[0.2, -0.4], r, &q).unwrap();
            assert!(v.value.abs() <= 1e-10);
        }
    }
}
