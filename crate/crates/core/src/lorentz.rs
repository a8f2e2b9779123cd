//! The Lorentz (hyperboloid) model of hyperbolic space with curvature −1.
//!
//! Points are stored in ambient coordinates `[x_0, x_1, …, x_Q]` on the upper
//! sheet `⟨x, x⟩_L = −1, x_0 > 0`, with the Lorentzian inner product
//! `⟨a, b⟩_L = −a_0 b_0 + Σ_{q≥1} a_q b_q`.
//!
//! Every constructor that produces a point recomputes the time coordinate
//! from the spatial part, so constraint drift never accumulates across
//! optimizer steps.

use crate::error::{Error, Result};

/// Constraint tolerance, relative to `max(1, x_0²)`.
pub const MANIFOLD_TOL: f64 = 1e-9;
/// Tangency tolerance, relative to `max(1, ‖base‖·‖v‖)`.
pub const TANGENT_TOL: f64 = 1e-8;

/// Below this norm `sinh(r)/r` and friends switch to their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// A point on the upper hyperboloid `ℍ^Q ⊂ ℝ^{Q+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzPoint {
    coords: Vec<f64>,
}

/// A vector in the tangent space at `base`, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: LorentzPoint,
    vec: Vec<f64>,
}

/// A point in the open Poincaré ball.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincarePoint {
    coords: Vec<f64>,
}

/// `−a_0 b_0 + Σ a_q b_q`, without length checks.
#[inline]
pub(crate) fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let spatial: f64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum();
    spatial - a[0] * b[0]
}

/// Lorentzian inner product of two ambient vectors.
pub fn lorentz_inner(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), got: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::Dimension { expected: 2, got: a.len() });
    }
    Ok(minkowski(a, b))
}

/// `sqrt(1 + ‖spatial‖²)`
#[inline]
pub(crate) fn time_coord(spatial: &[f64]) -> f64 {
    (1.0 + spatial.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `sinh(r)/r`
#[inline]
pub(crate) fn sinhc(r: f64) -> f64 {
    if r < SERIES_CUTOFF {
        let r2 = r * r;
        1.0 + r2 / 6.0 * (1.0 + r2 / 20.0 * (1.0 + r2 / 42.0))
    } else {
        r.sinh() / r
    }
}

/// `cosh(r)` with the same series switch as [`sinhc`] so both stay consistent.
#[inline]
pub(crate) fn cosh_series(r: f64) -> f64 {
    if r < SERIES_CUTOFF {
        let r2 = r * r;
        1.0 + r2 / 2.0 * (1.0 + r2 / 12.0 * (1.0 + r2 / 30.0))
    } else {
        r.cosh()
    }
}

/// `(r cosh r − sinh r) / r³`, the derivative of `sinhc` divided by `r`.
#[inline]
pub(crate) fn sinhc_prime_over_r(r: f64) -> f64 {
    if r < 1e-2 {
        let r2 = r * r;
        1.0 / 3.0 + r2 / 30.0 + r2 * r2 / 840.0 + r2 * r2 * r2 / 45360.0
    } else {
        (r * r.cosh() - r.sinh()) / (r * r * r)
    }
}

/// `coth(r) − 1/r`
#[inline]
pub(crate) fn coth_minus_inv(r: f64) -> f64 {
    if r < 1e-2 {
        let r2 = r * r;
        r / 3.0 - r * r2 / 45.0 + 2.0 * r * r2 * r2 / 945.0
    } else {
        1.0 / r.tanh() - 1.0 / r
    }
}

/// `−⟨x, y⟩_L − 1` for two points on the hyperboloid.
///
/// Evaluated as `⟨x − y, x − y⟩_L / 2` with the time difference taken from
/// the spatial parts, which avoids cancellation for nearby points.
#[inline]
pub(crate) fn cosh_dist_minus_one(x: &[f64], y: &[f64]) -> f64 {
    let mut diff_sq = 0.0;
    let mut diff_dot_sum = 0.0;
    for (a, b) in x[1..].iter().zip(&y[1..]) {
        let d = a - b;
        diff_sq += d * d;
        diff_dot_sum += d * (a + b);
    }
    let dt = diff_dot_sum / (x[0] + y[0]);
    (0.5 * (diff_sq - dt * dt)).max(0.0)
}

/// `cosh⁻¹(1 + w)` for `w ≥ 0`.
#[inline]
pub(crate) fn acosh1p(w: f64) -> f64 {
    (w + (w * (w + 2.0)).sqrt()).ln_1p()
}

/// Geodesic distance on raw coordinates.
#[inline]
pub(crate) fn distance_raw(x: &[f64], y: &[f64]) -> f64 {
    acosh1p(cosh_dist_minus_one(x, y))
}

/// `cosh(|v|) μ + sinh(|v|) v/|v|` followed by re-projection of the time
/// coordinate.
pub(crate) fn exp_map_raw(mu: &[f64], v: &[f64]) -> Vec<f64> {
    let r = minkowski(v, v).max(0.0).sqrt();
    let (c, s) = (cosh_series(r), sinhc(r));
    let mut out: Vec<f64> = mu.iter().zip(v).map(|(m, t)| c * m + s * t).collect();
    out[0] = time_coord(&out[1..]);
    out
}

/// `g + ⟨μ, g⟩ μ`
pub(crate) fn proj_tangent_raw(mu: &[f64], g: &[f64]) -> Vec<f64> {
    let ip = minkowski(mu, g);
    mu.iter().zip(g).map(|(m, gi)| gi + ip * m).collect()
}

/// Parallel transport of `v` from `nu` to `mu` along the connecting geodesic.
pub(crate) fn transport_raw(nu: &[f64], mu: &[f64], v: &[f64]) -> Vec<f64> {
    if nu == mu {
        return v.to_vec();
    }
    // alpha = -<nu, mu> >= 1, so the denominator never vanishes.
    let alpha = 1.0 + cosh_dist_minus_one(nu, mu);
    let num = minkowski(mu, v) - alpha * minkowski(nu, v);
    let coef = num / (alpha + 1.0);
    v.iter()
        .zip(nu.iter().zip(mu))
        .map(|(vi, (n, m))| vi + coef * (n + m))
        .collect()
}

fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

impl LorentzPoint {
    /// The origin `μ_0 = [1, 0, …, 0]` of `ℍ^Q`.
    pub fn origin(q: usize) -> Self {
        let mut coords = vec![0.0; q + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    /// Lifts spatial coordinates onto the hyperboloid: `[sqrt(1+‖s‖²), s…]`.
    pub fn lift(spatial: &[f64]) -> Result<Self> {
        if spatial.is_empty() {
            return Err(Error::Dimension { expected: 1, got: 0 });
        }
        check_finite(spatial, "spatial coordinates")?;
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push(time_coord(spatial));
        coords.extend_from_slice(spatial);
        Ok(Self { coords })
    }

    /// Validates ambient coordinates against the hyperboloid constraint.
    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Dimension { expected: 2, got: coords.len() });
        }
        check_finite(&coords, "ambient coordinates")?;
        let p = Self { coords };
        let residual = p.constraint_residual();
        if p.coords[0] <= 0.0 || residual.abs() > MANIFOLD_TOL * p.coords[0].powi(2).max(1.0) {
            return Err(Error::OffManifold { residual });
        }
        Ok(p)
    }

    /// Builds a point from ambient coordinates, recomputing `x_0` from the
    /// spatial part. Callers guarantee the input is near the hyperboloid.
    pub(crate) fn from_raw(mut coords: Vec<f64>) -> Self {
        coords[0] = time_coord(&coords[1..]);
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn spatial(&self) -> &[f64] {
        &self.coords[1..]
    }

    pub fn time(&self) -> f64 {
        self.coords[0]
    }

    /// Latent dimension `Q` (one less than the ambient length).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `⟨x, x⟩_L + 1`
    pub fn constraint_residual(&self) -> f64 {
        minkowski(&self.coords, &self.coords) + 1.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TangentVector {
    /// Checks `⟨base, vec⟩_L ≈ 0` before accepting the pair.
    pub fn new(base: LorentzPoint, vec: Vec<f64>) -> Result<Self> {
        if vec.len() != base.coords.len() {
            return Err(Error::Dimension { expected: base.coords.len(), got: vec.len() });
        }
        check_finite(&vec, "tangent vector")?;
        let inner = minkowski(&base.coords, &vec);
        let scale = euclid_norm(&base.coords) * euclid_norm(&vec);
        if inner.abs() > TANGENT_TOL * scale.max(1.0) {
            return Err(Error::NotTangent { inner });
        }
        Ok(Self { base, vec })
    }

    /// The zero vector at `base`.
    pub fn zero(base: LorentzPoint) -> Self {
        let vec = vec![0.0; base.coords.len()];
        Self { base, vec }
    }

    /// A vector at the origin with the given spatial components.
    pub fn at_origin(spatial: &[f64]) -> Self {
        let base = LorentzPoint::origin(spatial.len());
        let mut vec = Vec::with_capacity(spatial.len() + 1);
        vec.push(0.0);
        vec.extend_from_slice(spatial);
        Self { base, vec }
    }

    pub(crate) fn from_raw(base: LorentzPoint, vec: Vec<f64>) -> Self {
        Self { base, vec }
    }

    pub fn base(&self) -> &LorentzPoint {
        &self.base
    }

    pub fn vec(&self) -> &[f64] {
        &self.vec
    }

    /// `sqrt(⟨v, v⟩_L)`, clamped at zero against rounding.
    pub fn norm(&self) -> f64 {
        minkowski(&self.vec, &self.vec).max(0.0).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            base: self.base.clone(),
            vec: self.vec.iter().map(|v| v * factor).collect(),
        }
    }
}

impl PoincarePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords, "Poincaré coordinates")?;
        if euclid_norm(&coords) >= 1.0 {
            return Err(Error::Argument("Poincaré point must lie inside the unit ball".into()));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        euclid_norm(&self.coords)
    }
}

pub(crate) fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lifts spatial coordinates onto the hyperboloid.
pub fn lift(spatial: &[f64]) -> Result<LorentzPoint> {
    LorentzPoint::lift(spatial)
}

/// Geodesic distance `cosh⁻¹(−⟨x, y⟩_L)`.
pub fn distance(x: &LorentzPoint, y: &LorentzPoint) -> f64 {
    distance_raw(&x.coords, &y.coords)
}

/// Exponential map at `mu`; `v` must be based at `mu`.
pub fn exp_map(mu: &LorentzPoint, v: &TangentVector) -> Result<LorentzPoint> {
    if v.vec.len() != mu.coords.len() {
        return Err(Error::Dimension { expected: mu.coords.len(), got: v.vec.len() });
    }
    if v.base.coords != mu.coords {
        let inner = minkowski(&mu.coords, &v.vec);
        let scale = euclid_norm(&mu.coords) * euclid_norm(&v.vec);
        if inner.abs() > TANGENT_TOL * scale.max(1.0) {
            return Err(Error::NotTangent { inner });
        }
    }
    Ok(LorentzPoint { coords: exp_map_raw(&mu.coords, &v.vec) })
}

/// Projects an ambient vector onto the tangent space at `mu`.
pub fn proj_tangent(mu: &LorentzPoint, g: &[f64]) -> Result<TangentVector> {
    if g.len() != mu.coords.len() {
        return Err(Error::Dimension { expected: mu.coords.len(), got: g.len() });
    }
    check_finite(g, "ambient gradient")?;
    Ok(TangentVector::from_raw(mu.clone(), proj_tangent_raw(&mu.coords, g)))
}

/// Carries `v` (based at `nu`) to the tangent space at `mu`.
pub fn parallel_transport(
    nu: &LorentzPoint,
    mu: &LorentzPoint,
    v: &TangentVector,
) -> Result<TangentVector> {
    if nu.coords.len() != mu.coords.len() || v.vec.len() != mu.coords.len() {
        return Err(Error::Dimension { expected: mu.coords.len(), got: v.vec.len() });
    }
    Ok(TangentVector::from_raw(mu.clone(), transport_raw(&nu.coords, &mu.coords, &v.vec)))
}

/// Maps a hyperboloid point into the Poincaré ball: `x̃ / (1 + x_0)`.
pub fn to_poincare(x: &LorentzPoint) -> PoincarePoint {
    let denom = 1.0 + x.coords[0];
    PoincarePoint { coords: x.coords[1..].iter().map(|v| v / denom).collect() }
}
