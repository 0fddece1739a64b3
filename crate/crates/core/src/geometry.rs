//! Upper half-space model of `H^n`.
//!
//! Points are `(x', x_n)` with `x' ∈ R^{n-1}` and height `x_n > 0`; the metric is
//! `ds² = |dx|² / x_n²`. Horocycles are either horizontal planes or Euclidean
//! spheres tangent to the boundary `x_n = 0`.

use std::fmt;

use crate::error::{Error, Result};

/// Smallest supported dimension of `H^n`.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension of `H^n`.
pub const MAX_DIM: usize = 8;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// A point of `H^n` in half-space coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PointH {
    x_prime: Vec<f64>,
    height: f64,
}

impl PointH {
    pub fn new(x_prime: Vec<f64>, height: f64) -> Result<Self> {
        check_dim(x_prime.len() + 1)?;
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::invalid(format!(
                "height must be positive and finite, got {height}"
            )));
        }
        if x_prime.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("horizontal coordinates must be finite"));
        }
        Ok(Self { x_prime, height })
    }

    /// The origin `(0, …, 0, 1)`.
    pub fn origin(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            x_prime: vec![0.0; n - 1],
            height: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.x_prime.len() + 1
    }

    pub fn x_prime(&self) -> &[f64] {
        &self.x_prime
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

impl fmt::Display for PointH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for v in &self.x_prime {
            write!(f, "{v}, ")?;
        }
        write!(f, "{})", self.height)
    }
}

/// Hyperbolic distance between raw coordinates.
///
/// Uses `d = 2 asinh(|p - q| / (2 sqrt(p_n q_n)))`, which is the same as
/// `cosh d = 1 + |p - q|² / (2 p_n q_n)` but keeps full precision for nearby points.
pub fn distance_coords(p_prime: &[f64], p_n: f64, q_prime: &[f64], q_n: f64) -> f64 {
    let mut sq = (p_n - q_n) * (p_n - q_n);
    for (a, b) in p_prime.iter().zip(q_prime) {
        sq += (a - b) * (a - b);
    }
    2.0 * (sq.sqrt() / (2.0 * (p_n * q_n).sqrt())).asinh()
}

/// Distance from the origin `(0, …, 0, 1)`.
pub fn distance_from_origin(x_prime: &[f64], height: f64) -> f64 {
    let mut sq = (height - 1.0) * (height - 1.0);
    for a in x_prime {
        sq += a * a;
    }
    2.0 * (sq.sqrt() / (2.0 * height.sqrt())).asinh()
}

pub fn distance(p: &PointH, q: &PointH) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(distance_coords(&p.x_prime, p.height, &q.x_prime, q.height))
}

/// A horocycle of the half-space model.
#[derive(Clone, Debug, PartialEq)]
pub enum Horocycle {
    /// The plane `x_n = c`.
    Plane { c: f64 },
    /// The Euclidean sphere of center `(contact, r)` and radius `r`, tangent to `x_n = 0`.
    Sphere { contact: Vec<f64>, r: f64 },
}

impl Horocycle {
    pub fn plane(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("plane height must be positive, got {c}")));
        }
        Ok(Horocycle::Plane { c })
    }

    pub fn sphere(contact: Vec<f64>, r: f64) -> Result<Self> {
        check_dim(contact.len() + 1)?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("sphere radius must be positive, got {r}")));
        }
        if contact.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("contact point must be finite"));
        }
        Ok(Horocycle::Sphere { contact, r })
    }

    /// Supremum of the height over the horocycle.
    pub fn top_height(&self) -> f64 {
        match self {
            Horocycle::Plane { c } => *c,
            Horocycle::Sphere { r, .. } => 2.0 * r,
        }
    }

    /// Whether `p` lies on the horocycle up to a relative tolerance.
    pub fn contains(&self, p: &PointH, tol: f64) -> bool {
        match self {
            Horocycle::Plane { c } => (p.height - c).abs() <= tol * c.max(1.0),
            Horocycle::Sphere { contact, r } => {
                if contact.len() != p.x_prime.len() {
                    return false;
                }
                let mut sq = (p.height - r) * (p.height - r);
                for (a, b) in p.x_prime.iter().zip(contact) {
                    sq += (a - b) * (a - b);
                }
                (sq.sqrt() - r).abs() <= tol * r.max(1.0)
            }
        }
    }
}

impl fmt::Display for Horocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horocycle::Plane { c } => write!(f, "plane x_n = {c}"),
            Horocycle::Sphere { contact, r } => write!(f, "sphere contact {contact:?} radius {r}"),
        }
    }
}

/// Isometries of the half-space model used by the transform cross-checks.
#[derive(Clone, Debug, PartialEq)]
pub enum Isometry {
    HorizontalTranslation(Vec<f64>),
    Dilation(f64),
    /// `x ↦ x / |x|²`, the inversion in the unit sphere centred on the boundary origin.
    Inversion,
}

impl Isometry {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Isometry::HorizontalTranslation(t) if t.len() + 1 != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: t.len() + 1,
            }),
            Isometry::HorizontalTranslation(t) if t.iter().any(|v| !v.is_finite()) => {
                Err(Error::invalid("translation must be finite"))
            }
            Isometry::Dilation(l) if !(*l > 0.0) || !l.is_finite() => {
                Err(Error::invalid(format!("dilation factor must be positive, got {l}")))
            }
            _ => Ok(()),
        }
    }

    /// Applies the isometry to raw coordinates without validation.
    pub fn apply_in_place(&self, x_prime: &mut [f64], height: &mut f64) {
        match self {
            Isometry::HorizontalTranslation(t) => {
                for (x, dt) in x_prime.iter_mut().zip(t) {
                    *x += dt;
                }
            }
            Isometry::Dilation(l) => {
                for x in x_prime.iter_mut() {
                    *x *= l;
                }
                *height *= l;
            }
            Isometry::Inversion => {
                let norm_sq = x_prime.iter().map(|v| v * v).sum::<f64>() + *height * *height;
                for x in x_prime.iter_mut() {
                    *x /= norm_sq;
                }
                *height /= norm_sq;
            }
        }
    }

    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::HorizontalTranslation(t) => Isometry::HorizontalTranslation(t.iter().map(|v| -v).collect()),
            Isometry::Dilation(l) => Isometry::Dilation(1.0 / l),
            Isometry::Inversion => Isometry::Inversion,
        }
    }
}

pub fn apply_isometry(iso: &Isometry, p: &PointH) -> Result<PointH> {
    iso.validate(p.dim())?;
    let mut x = p.x_prime.clone();
    let mut h = p.height;
    iso.apply_in_place(&mut x, &mut h);
    PointH::new(x, h)
}

/// A composition of isometries, applied first to last.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IsometryChain(pub Vec<Isometry>);

impl IsometryChain {
    pub fn apply(&self, p: &PointH) -> Result<PointH> {
        let mut q = p.clone();
        for iso in &self.0 {
            q = apply_isometry(iso, &q)?;
        }
        Ok(q)
    }

    pub fn apply_in_place(&self, x_prime: &mut [f64], height: &mut f64) {
        for iso in &self.0 {
            iso.apply_in_place(x_prime, height);
        }
    }

    pub fn inverse(&self) -> IsometryChain {
        IsometryChain(self.0.iter().rev().map(Isometry::inverse).collect())
    }
}

/// Isometry taking the sphere horocycle with contact `0` and radius `r` onto the
/// plane `x_n = 1 / (2r)`.
///
/// The sphere satisfies `|x|² = 2 r x_n`, so its image under the inversion has
/// constant height `x_n / |x|² = 1 / (2r)`. The inversion also fixes the origin.
pub fn sphere_to_plane_isometry(r: f64) -> Result<IsometryChain> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("sphere radius must be positive, got {r}")));
    }
    Ok(IsometryChain(vec![Isometry::Inversion]))
}

/// Isometry taking the sphere horocycle `(contact, r)` onto the plane `x_n = 1 / (2r)`.
pub fn horocycle_to_plane(contact: &[f64], r: f64) -> Result<IsometryChain> {
    let mut chain = vec![Isometry::HorizontalTranslation(contact.iter().map(|v| -v).collect())];
    chain.extend(sphere_to_plane_isometry(r)?.0);
    Ok(IsometryChain(chain))
}

/// Whether `xi` is disjoint from the open horoball `{x_n > 1}` bounded by `xi0`.
///
/// `xi0` must already be normalized to the plane `x_n = 1`. Tangent spheres
/// (`2r = 1`) and planes below or at height 1 count as outside.
pub fn lies_outside(xi: &Horocycle, xi0: &Horocycle) -> Result<bool> {
    match xi0 {
        Horocycle::Plane { c } if (c - 1.0).abs() <= 1e-12 => {}
        other => return Err(Error::NotNormalized(other.to_string())),
    }
    Ok(match xi {
        Horocycle::Plane { c } => *c <= 1.0,
        Horocycle::Sphere { r, .. } => 2.0 * r <= 1.0,
    })
}
