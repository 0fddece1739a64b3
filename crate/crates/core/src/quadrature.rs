//! Quadrature building blocks: Gauss rules, sphere rules on `S_{k}`, finite-difference
//! weights on arbitrary stencils and a Halton sequence.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).unwrap();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n)
        .iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs
}

/// `ln Γ(x)` for `x > 0` (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for the weight `(1 - x)^a (1 + x)^b`,
/// by Newton iteration on the three-term recurrence. Nodes are returned in
/// decreasing order.
#[allow(clippy::approx_constant)] // empirical root-guess coefficients, not τ
fn gauss_jacobi_raw(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let nf = n as f64;
    let ab = a + b;
    let mut x = vec![0.0; n];
    let mut out = Vec::with_capacity(n);
    let mut z: f64 = 0.0;
    for i in 0..n {
        // initial guesses after Stroud and Secrest
        if i == 0 {
            let an = a / nf;
            let bn = b / nf;
            let r1 = (1.0 + a) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if i == 1 {
            let r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.06 * a));
            let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * a) / nf;
            let r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * a.abs()) / nf;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if i == 2 {
            let r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
            let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
            let r3 = 1.0 + 8.0 * b / ((6.28 + b) * nf * nf);
            z -= (x[0] - z) * r1 * r2 * r3;
        } else if i == n - 2 {
            let r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
            let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * nf * nf));
            z += (z - x[n - 4]) * r1 * r2 * r3;
        } else if i == n - 1 {
            let r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
            let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
            let r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * nf * nf));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
        }
        let mut pp = 0.0;
        let mut p2 = 0.0;
        let mut temp = 0.0;
        for _ in 0..100 {
            temp = 2.0 + ab;
            let mut p1 = (a - b + temp * z) / 2.0;
            p2 = 1.0;
            for j in 2..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                temp = 2.0 * jf + ab;
                let a1 = 2.0 * jf * (jf + ab) * (temp - 2.0);
                let b1 = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
                let c1 = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
                p1 = (b1 * p2 - c1 * p3) / a1;
            }
            pp = (nf * (a - b - temp * z) * p1 + 2.0 * (nf + a) * (nf + b) * p2) / (temp * (1.0 - z * z));
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        let w = (ln_gamma(a + nf) + ln_gamma(b + nf) - ln_gamma(nf + 1.0) - ln_gamma(nf + ab + 1.0)).exp()
            * temp
            * 2f64.powf(ab)
            / (pp * p2);
        out.push((z, w));
    }
    out
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `(1 - y)^right · y^left`.
///
/// Both exponents must exceed `-1`. At least four nodes are used.
pub fn gauss_jacobi_unit(n: usize, right: f64, left: f64) -> Result<Vec<(f64, f64)>> {
    if !(right > -1.0) || !(left > -1.0) {
        return Err(Error::invalid(format!(
            "Jacobi exponents must exceed -1, got ({right}, {left})"
        )));
    }
    // (1-ξ)^A (1+ξ)^B dξ on [-1,1] becomes 2^{A+B+1} (1-y)^A y^B dy on [0,1]
    let scale = 2f64.powf(-(right + left + 1.0));
    let mut pairs: Vec<(f64, f64)> = gauss_jacobi_raw(n.max(4), right, left)
        .into_iter()
        .map(|(x, w)| (0.5 * (1.0 + x), w * scale))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let ordered = pairs.windows(2).all(|w| w[0].0 < w[1].0);
    let inside = pairs
        .iter()
        .all(|p| p.0 > 0.0 && p.0 < 1.0 && p.1 > 0.0 && p.1.is_finite());
    if !ordered || !inside {
        return Err(Error::NonFinite(format!(
            "Gauss-Jacobi iteration failed for n = {n}, exponents ({right}, {left})"
        )));
    }
    Ok(pairs)
}

/// `Γ(x)` for positive integers and half-integers.
pub fn gamma_half_integer(x: f64) -> f64 {
    debug_assert!(x > 0.0 && (2.0 * x).fract() == 0.0);
    let (mut acc, mut y) = if x.fract() == 0.0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while y < x - 0.25 {
        acc *= y;
        y += 1.0;
    }
    acc
}

/// Surface area of the unit sphere `S_k ⊂ R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    let m = 0.5 * (k as f64 + 1.0);
    2.0 * PI.powf(m) / gamma_half_integer(m)
}

/// A quadrature rule on the unit sphere `S_{n-2} ⊂ R^{n-1}`.
///
/// `n = 2` uses the two points `±1` exactly, `n = 3` the trapezoid rule on the circle,
/// and `n ≥ 4` a tensor product of Gauss-Legendre rules in the polar angles with a
/// trapezoid rule in the azimuth.
#[derive(Clone, Debug)]
pub struct SphereRule {
    ambient: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// Rule for `S_{n-2}` using `nodes` points per polar angle; the azimuth
    /// (the whole circle when `n = 3`) gets `2 · nodes`.
    pub fn new(n: usize, nodes: usize) -> Self {
        let ambient = n - 1;
        match n {
            2 => Self {
                ambient,
                points: vec![1.0, -1.0],
                weights: vec![1.0, 1.0],
            },
            3 => {
                let m = 2 * nodes.max(1);
                let mut points = Vec::with_capacity(2 * m);
                for j in 0..m {
                    let phi = 2.0 * PI * j as f64 / m as f64;
                    points.push(phi.cos());
                    points.push(phi.sin());
                }
                Self {
                    ambient,
                    points,
                    weights: vec![2.0 * PI / m as f64; m],
                }
            }
            _ => {
                let polar = gauss_legendre(nodes.max(2), 0.0, PI);
                let m = 2 * nodes.max(2);
                let polar_count = n - 3;
                let mut points = Vec::new();
                let mut weights = Vec::new();
                let mut idx = vec![0usize; polar_count];
                loop {
                    let mut w = 1.0;
                    let mut sin_prod = 1.0;
                    let mut prefix = Vec::with_capacity(ambient);
                    for (k, &i) in idx.iter().enumerate() {
                        let (phi, wk) = polar[i];
                        // the k-th polar angle carries sin^{polar_count - k}
                        w *= wk * phi.sin().powi((polar_count - k) as i32);
                        prefix.push(sin_prod * phi.cos());
                        sin_prod *= phi.sin();
                    }
                    for j in 0..m {
                        let az = 2.0 * PI * j as f64 / m as f64;
                        points.extend_from_slice(&prefix);
                        points.push(sin_prod * az.cos());
                        points.push(sin_prod * az.sin());
                        weights.push(w * 2.0 * PI / m as f64);
                    }
                    // odometer over polar indices
                    let mut k = 0;
                    while k < polar_count {
                        idx[k] += 1;
                        if idx[k] < polar.len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == polar_count {
                        break;
                    }
                }
                Self {
                    ambient,
                    points,
                    weights,
                }
            }
        }
    }

    /// Rule for integrands on `S_{n-2}` that depend only on the first coordinate
    /// `ω_1 = cos φ`: `∫ F(ω_1) dω = |S_{n-3}| ∫_0^π F(cos φ) sin^{n-3} φ dφ`.
    ///
    /// Points are returned as `(cos φ, sin φ, 0, …)`.
    pub fn zonal(n: usize, nodes: usize) -> Self {
        let ambient = n - 1;
        if n == 2 {
            return Self::new(2, nodes);
        }
        let m = nodes.max(2);
        let mut points = Vec::with_capacity(m * ambient);
        let mut weights = Vec::with_capacity(m);
        let area = sphere_area(n - 3);
        if n == 3 {
            // even periodic integrand: trapezoid on [0, π] with half end weights
            for j in 0..=m {
                let phi = PI * j as f64 / m as f64;
                let end = if j == 0 || j == m { 0.5 } else { 1.0 };
                points.push(phi.cos());
                points.push(phi.sin());
                weights.push(area * end * PI / m as f64);
            }
        } else {
            for (phi, w) in gauss_legendre(m, 0.0, PI) {
                points.push(phi.cos());
                points.push(phi.sin());
                points.extend(std::iter::repeat(0.0).take(ambient - 2));
                weights.push(area * w * phi.sin().powi((n - 3) as i32));
            }
        }
        Self {
            ambient,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.ambient).zip(self.weights.iter().copied())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Fornberg's algorithm: weights `w[k][j]` such that `Σ_j w[k][j] f(xs[j]) ≈ f^{(k)}(x0)`
/// for `k = 0..=order`.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// `order`-th derivative of sampled data using local stencils of `stencil` points,
/// centred where possible and shifted inward at the ends.
pub fn differentiate<T: Scalar>(grid: &[f64], values: &[T], order: usize, stencil: usize) -> Result<Vec<T>> {
    let n = grid.len();
    if values.len() != n {
        return Err(Error::invalid("sample count does not match grid"));
    }
    if n < stencil || stencil <= order {
        return Err(Error::GridTooCoarse {
            nodes: n,
            required: stencil.max(order + 1),
        });
    }
    let half = stencil / 2;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - stencil);
        let xs = &grid[start..start + stencil];
        let w = fd_weights(grid[i], xs, order);
        let mut acc = T::zero();
        for (k, wk) in w[order].iter().enumerate() {
            acc = acc + values[start + k] * *wk;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Default stencil width for an `order`-th derivative: at least fourth-order accurate.
pub fn default_stencil(order: usize) -> usize {
    let s = order + 4;
    if s % 2 == 0 {
        s + 1
    } else {
        s
    }
}

/// Radical inverse of `index` in `base` (van der Corput / Halton component).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

pub(crate) const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Uniform grid `a, a + h, …, b` with `n ≥ 2` nodes.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
}
