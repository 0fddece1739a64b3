//! Normalized Bessel functions `Λ_ν(z) = Γ(ν+1) (2/z)^ν J_ν(z) = ₀F₁(; ν+1; -z²/4)`
//! for integer and half-integer orders `ν ≥ -1/2`.

use std::f64::consts::PI;

use crate::quadrature::gamma_half_integer;

const SERIES_LIMIT: f64 = 4.0;

/// `Λ_ν(z)` for `ν ∈ {-1/2, 0, 1/2, 1, …}` and `z ≥ 0`. `Λ_ν(0) = 1`.
pub fn normalized_bessel(nu: f64, z: f64) -> f64 {
    debug_assert!(nu >= -0.5 && (2.0 * nu).fract() == 0.0);
    let z = z.abs();
    if nu == -0.5 {
        return z.cos();
    }
    if z <= SERIES_LIMIT {
        return series(nu, z);
    }
    let j = if nu.fract() == 0.0 {
        miller_integer(nu as usize, z)
    } else {
        miller_half_integer(nu, z)
    };
    gamma_half_integer(nu + 1.0) * (2.0 / z).powf(nu) * j
}

fn series(nu: f64, z: f64) -> f64 {
    let x = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= x / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn start_index(nu: f64, z: f64) -> usize {
    let m = nu.max(z) + 20.0 + (40.0 * z).sqrt();
    let m = m.ceil() as usize;
    m + (m % 2)
}

/// Backward recurrence `J_{μ-1} = (2μ/z) J_μ - J_{μ+1}` normalized by
/// `J_0 + 2 Σ J_{2k} = 1`.
fn miller_integer(nu: usize, z: f64) -> f64 {
    let top = start_index(nu as f64, z);
    let mut next = 0.0; // J_{μ+1}
    let mut cur = 1e-300; // J_μ
    let mut norm = 0.0;
    let mut target = 0.0;
    for mu in (1..=top).rev() {
        if mu % 2 == 0 {
            norm += 2.0 * cur;
        }
        if mu == nu {
            target = cur;
        }
        let prev = 2.0 * mu as f64 / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    if nu == 0 {
        target = cur;
    }
    norm += cur;
    target / norm
}

/// Backward recurrence down to order `-1/2`, normalized against
/// `J_{1/2} = A sin z`, `J_{-1/2} = A cos z` with `A = sqrt(2 / (π z))`.
fn miller_half_integer(nu: f64, z: f64) -> f64 {
    let top = start_index(nu, z) as f64 + 0.5;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut target = 0.0;
    let mut mu = top;
    let mut half = 0.0;
    while mu > -0.25 {
        if (mu - nu).abs() < 0.25 {
            target = cur;
        }
        if (mu - 0.5).abs() < 0.25 {
            half = cur;
        }
        let prev = 2.0 * mu / z * cur - next;
        next = cur;
        cur = prev;
        mu -= 1.0;
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            target *= 1e-250;
            half *= 1e-250;
        }
    }
    // cur now holds the unnormalized J_{-1/2}
    let a = (2.0 / (PI * z)).sqrt();
    let (ts, tc) = (a * z.sin(), a * z.cos());
    let big = half.abs().max(cur.abs());
    let (h, c, t) = (half / big, cur / big, target / big);
    t * (ts * h + tc * c) / (h * h + c * c)
}
