//! Wrapped Gaussian distributions on the hyperboloid.
//!
//! A sample is drawn by taking `ṽ ~ N(0, S)` in the tangent space at the
//! origin, transporting `[0, ṽ]` to the mean `μ` and applying the
//! exponential map there. With `r = ‖ṽ‖` the log density is
//!
//! ```text
//! log q(x) = log N(ṽ | 0, S) − (Q − 1) log(sinh r / r)
//! ```
//!
//! where the second term is the volume change of the exponential map.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};
use crate::lorentz::{
    acosh1p, coth_minus_inv, cosh_dist_minus_one, cosh_series, exp_map_raw, minkowski, sinhc,
    sinhc_prime_over_r, transport_raw, LorentzPoint, TangentVector,
};

/// Per-datum variational parameters: mean on the hyperboloid and diagonal
/// variances, stored as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalState {
    pub mu: LorentzPoint,
    log_s: Vec<f64>,
}

/// One reparameterized draw and every intermediate of the sampling chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ReparamSample {
    pub zeta: Vec<f64>,
    /// `[0, S^{1/2} ζ]` at the origin.
    pub v: TangentVector,
    /// `v` transported to `μ`.
    pub u: TangentVector,
    pub x: LorentzPoint,
}

/// Monte-Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
}

/// Jacobians of a sample with respect to the variational parameters, and
/// the matching derivatives of that sample's KL contribution.
#[derive(Debug, Clone)]
pub struct ReparamGrads {
    /// `∂x_a/∂μ_b`, `(Q+1) × (Q+1)`, in raw ambient coordinates of `μ`.
    pub dx_dmu: Mat<f64>,
    /// `∂x_a/∂s_q`, `(Q+1) × Q`.
    pub dx_ds: Mat<f64>,
    /// `∂/∂μ` of `log q(x) − log p(x)` through the sample position.
    pub dkl_dmu: Vec<f64>,
    /// `∂/∂s_q` of `log q(x) − log p(x)`.
    pub dkl_ds: Vec<f64>,
}

impl VariationalState {
    pub fn new(mu: LorentzPoint, s: &[f64]) -> Result<Self> {
        if s.len() != mu.dim() {
            return Err(Error::Dimension { expected: mu.dim(), got: s.len() });
        }
        if let Some(bad) = s.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Parameter { name: "s", reason: format!("variances must be positive, got {bad}") });
        }
        Ok(Self { mu, log_s: s.iter().map(|v| v.ln()).collect() })
    }

    pub fn from_log_s(mu: LorentzPoint, log_s: Vec<f64>) -> Result<Self> {
        if log_s.len() != mu.dim() {
            return Err(Error::Dimension { expected: mu.dim(), got: log_s.len() });
        }
        if log_s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("log variances"));
        }
        Ok(Self { mu, log_s })
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn s(&self) -> Vec<f64> {
        self.log_s.iter().map(|v| v.exp()).collect()
    }

    pub fn log_s(&self) -> &[f64] {
        &self.log_s
    }

    pub(crate) fn log_s_mut(&mut self) -> &mut [f64] {
        &mut self.log_s
    }
}

fn log_sinhc(r: f64) -> f64 {
    sinhc(r).ln()
}

/// Reparameterized sample for a fixed standard-normal draw `ζ`.
pub fn wg_sample(state: &VariationalState, zeta: &[f64]) -> Result<ReparamSample> {
    let q = state.dim();
    if zeta.len() != q {
        return Err(Error::Dimension { expected: q, got: zeta.len() });
    }
    let mut v = Vec::with_capacity(q + 1);
    v.push(0.0);
    v.extend(state.log_s.iter().zip(zeta).map(|(ls, z)| (0.5 * ls).exp() * z));
    let origin = LorentzPoint::origin(q);
    let u = transport_raw(origin.coords(), state.mu.coords(), &v);
    let x = exp_map_raw(state.mu.coords(), &u);
    Ok(ReparamSample {
        zeta: zeta.to_vec(),
        v: TangentVector::from_raw(origin, v),
        u: TangentVector::from_raw(state.mu.clone(), u),
        x: LorentzPoint::from_raw(x),
    })
}

fn gauss_log_density(log_s: &[f64], v: &[f64]) -> f64 {
    let q = log_s.len() as f64;
    let quad: f64 = log_s.iter().zip(v).map(|(ls, vi)| vi * vi * (-ls).exp()).sum();
    -0.5 * q * (2.0 * PI).ln() - 0.5 * log_s.iter().sum::<f64>() - 0.5 * quad
}

/// Log density of the wrapped Gaussian at an arbitrary point.
pub fn wg_log_density(state: &VariationalState, x: &LorentzPoint) -> Result<f64> {
    if x.dim() != state.dim() {
        return Err(Error::Dimension { expected: state.dim(), got: x.dim() });
    }
    let mu = state.mu.coords();
    let xc = x.coords();
    // Logarithmic map at mu: d/sinh(d) (x - z mu), z = -<mu, x>.
    let w = cosh_dist_minus_one(mu, xc);
    let d = acosh1p(w);
    let scale = 1.0 / sinhc(d);
    let u: Vec<f64> = xc.iter().zip(mu).map(|(a, m)| scale * (a - (1.0 + w) * m)).collect();
    let origin = LorentzPoint::origin(state.dim());
    let v = transport_raw(mu, origin.coords(), &u);
    let vt = &v[1..];
    let r = vt.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(gauss_log_density(&state.log_s, vt) - (state.dim() as f64 - 1.0) * log_sinhc(r))
}

/// `log q(x)` for a sample produced from `state`, using its cached draw.
pub fn sample_log_density(state: &VariationalState, sample: &ReparamSample) -> f64 {
    let q = state.dim() as f64;
    let r = sample.v.vec()[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
    let zz: f64 = sample.zeta.iter().map(|z| z * z).sum();
    -0.5 * q * (2.0 * PI).ln() - 0.5 * state.log_s.iter().sum::<f64>() - 0.5 * zz - (q - 1.0) * log_sinhc(r)
}

/// Log density of the standard wrapped Gaussian prior centred at the origin.
pub fn prior_log_density(x: &LorentzPoint) -> f64 {
    let q = x.dim() as f64;
    let rho = x.spatial().iter().map(|a| a * a).sum::<f64>().sqrt().asinh();
    -0.5 * q * (2.0 * PI).ln() - 0.5 * rho * rho - (q - 1.0) * log_sinhc(rho)
}

/// Gradient of [`prior_log_density`] with respect to ambient coordinates
/// (zero time component, since the prior depends on `x̃` only).
fn prior_log_density_grad(x: &[f64]) -> Vec<f64> {
    let q = (x.len() - 1) as f64;
    let n2: f64 = x[1..].iter().map(|a| a * a).sum();
    let mut g = vec![0.0; x.len()];
    if n2 == 0.0 {
        return g;
    }
    let n = n2.sqrt();
    let rho = n.asinh();
    let dlogp_drho = -rho - (q - 1.0) * coth_minus_inv(rho);
    let f = dlogp_drho / (n * (1.0 + n2).sqrt());
    for (gi, xi) in g[1..].iter_mut().zip(&x[1..]) {
        *gi = f * xi;
    }
    g
}

/// `log q(x) − log p(x)` for one sample.
pub fn kl_sample(state: &VariationalState, sample: &ReparamSample) -> f64 {
    sample_log_density(state, sample) - prior_log_density(&sample.x)
}

/// Monte-Carlo estimate of `KL(q ‖ p)` with `p` the standard wrapped Gaussian.
pub fn kl_mc(state: &VariationalState, samples: &[ReparamSample]) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::Argument("kl_mc needs at least one sample".into()));
    }
    let vals: Vec<f64> = samples.iter().map(|s| kl_sample(state, s)).collect();
    Ok(mean_and_se(&vals))
}

pub(crate) fn mean_and_se(vals: &[f64]) -> McEstimate {
    let h = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / h;
    let var = if vals.len() > 1 {
        vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (h - 1.0)
    } else {
        0.0
    };
    McEstimate { mean, std_err: (var / h).sqrt() }
}

/// Jacobians of the sampling chain `ζ ↦ x` with respect to `μ` and `s`,
/// holding `ζ` fixed.
pub fn reparam_grads(state: &VariationalState, sample: &ReparamSample) -> ReparamGrads {
    let q = state.dim();
    let mu = state.mu.coords();
    let s = state.s();
    let v = sample.v.vec();
    let u = sample.u.vec();
    let m0p1 = mu[0] + 1.0;
    let c = mu[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>() / m0p1;
    let r = minkowski(u, u).max(0.0).sqrt();
    let (ch, sc, sp) = (cosh_series(r), sinhc(r), sinhc_prime_over_r(r));

    // dx = ch dmu + sc <u,du> mu + sp <u,du> u + sc du
    let push = |dmu: &[f64], du: &[f64], col: &mut [f64]| {
        let ud = minkowski(u, du);
        for a in 0..=q {
            col[a] = ch * dmu[a] + sc * ud * mu[a] + sp * ud * u[a] + sc * du[a];
        }
    };

    let e0_plus_mu: Vec<f64> = mu.iter().enumerate().map(|(a, m)| m + if a == 0 { 1.0 } else { 0.0 }).collect();
    let mut dx_dmu = Mat::zeros(q + 1, q + 1);
    let mut col = vec![0.0; q + 1];
    for b in 0..=q {
        let dc = if b == 0 { -c / m0p1 } else { v[b] / m0p1 };
        let mut du: Vec<f64> = e0_plus_mu.iter().map(|e| dc * e).collect();
        du[b] += c;
        let mut dmu = vec![0.0; q + 1];
        dmu[b] = 1.0;
        push(&dmu, &du, &mut col);
        for a in 0..=q {
            dx_dmu[(a, b)] = col[a];
        }
    }

    let zero = vec![0.0; q + 1];
    let mut dx_ds = Mat::zeros(q + 1, q);
    for k in 0..q {
        let a_k = sample.zeta[k] / (2.0 * s[k].sqrt());
        let mut du: Vec<f64> = e0_plus_mu.iter().map(|e| a_k * mu[k + 1] / m0p1 * e).collect();
        du[k + 1] += a_k;
        push(&zero, &du, &mut col);
        for a in 0..=q {
            dx_ds[(a, k)] = col[a];
        }
    }

    // log q depends on s only (for fixed zeta); log p on the sample position.
    let gp = prior_log_density_grad(sample.x.coords());
    let dkl_dmu: Vec<f64> = (0..=q).map(|b| -(0..=q).map(|a| gp[a] * dx_dmu[(a, b)]).sum::<f64>()).collect();
    let rv = v[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
    let qf = q as f64;
    let dkl_ds: Vec<f64> = (0..q)
        .map(|k| {
            let z2 = sample.zeta[k] * sample.zeta[k];
            // (coth r - 1/r) * z^2 / (2 r), finite as r -> 0
            let curv = if rv > 0.0 { coth_minus_inv(rv) / rv } else { 1.0 / 3.0 };
            let dlogq = -0.5 / s[k] - (qf - 1.0) * curv * z2 / 2.0;
            let dlogp: f64 = (0..=q).map(|a| gp[a] * dx_ds[(a, k)]).sum();
            dlogq - dlogp
        })
        .collect();

    ReparamGrads { dx_dmu, dx_ds, dkl_dmu, dkl_ds }
}
