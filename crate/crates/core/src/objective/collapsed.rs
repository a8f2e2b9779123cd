//! The inducing-point collapsed bound shared by the sparse and Bayesian
//! objectives.
//!
//! With `P` (M×N) standing for `K_mn` or `Ψ₁`, `Φ` (M×M) for `K_mn K_nm` or
//! `Ψ₂`, `A = K_mm + βΦ`, `C = P Y` and `E = A⁻¹ C`:
//!
//! ```text
//! F = −ND/2 log 2π + ND/2 log β − D/2 log|A| + D/2 log|K_mm|
//!     − β/2 ‖Y‖² + β²/2 tr(Cᵀ E) − βD/2 ψ₀ + βD/2 tr(K_mm⁻¹ Φ)
//! ```
//!
//! Everything is evaluated through `B = I + β L⁻¹ Φ L⁻ᵀ` with `K_mm = L Lᵀ`,
//! so `|A| = |K_mm| |B|` and no explicit `A` is ever factorized.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::Result;
use crate::linalg::{cholesky_jittered, frob_sq, inverse_spd, logdet, solve_lower, solve_upper_t, symmetrize, trace};

pub(crate) struct Bound {
    pub value: f64,
    /// `∂F/∂P`
    pub d_p: Mat<f64>,
    /// `∂F/∂Φ`
    pub d_phi: Mat<f64>,
    /// `Σ (∂F/∂K_mm) ∘ K_mm` for the jittered `K_mm`, the term `σ ∂/∂σ`
    /// needs from `K_mm`.
    pub km_dot: f64,
    pub dlog_beta: f64,
    /// Jitter actually added to `K_mm`.
    pub jitter: f64,
}

pub(crate) struct BoundInput<'a> {
    pub y: &'a Mat<f64>,
    pub p: &'a Mat<f64>,
    pub phi: &'a Mat<f64>,
    /// Un-jittered `K_mm`.
    pub km: &'a Mat<f64>,
    pub beta: f64,
    pub psi0: f64,
    pub jitter: f64,
    pub retry_jitter: f64,
}

pub(crate) fn collapsed_bound(inp: BoundInput<'_>) -> Result<Bound> {
    let BoundInput { y, p, phi, km, beta, psi0, jitter, retry_jitter } = inp;
    let m = km.nrows();
    let n = y.nrows() as f64;
    let d = y.ncols() as f64;

    let (lm, eps) = cholesky_jittered(km, jitter, retry_jitter, "K_mm")?;
    let li = solve_lower(&lm, &Mat::identity(m, m));
    // phibar = L^-1 Phi L^-T
    let mut phibar = &li * phi * li.transpose();
    symmetrize(&mut phibar);
    let mut b = Mat::<f64>::identity(m, m);
    for j in 0..m {
        for i in 0..m {
            b[(i, j)] += beta * phibar[(i, j)];
        }
    }
    let (lb, _) = cholesky_jittered(&b, 0.0, 0.0, "I + beta L^-1 Phi L^-T")?;
    let binv = inverse_spd(&lb);

    let c = p * y;
    let cbar = solve_lower(&lb, &(&li * &c));
    let tr_ce = frob_sq(&cbar);
    // E = A^-1 C = L^-T B^-1 L^-1 C
    let lt_e = solve_upper_t(&lb, &cbar);
    let e = li.transpose() * &lt_e;
    let yy = frob_sq(y);
    let tr_phibar = trace(&phibar);

    let value = -0.5 * n * d * (2.0 * PI).ln() + 0.5 * n * d * beta.ln() - 0.5 * d * logdet(&lb) - 0.5 * beta * yy
        + 0.5 * beta * beta * tr_ce
        - 0.5 * beta * d * psi0
        + 0.5 * beta * d * tr_phibar;

    let d_p = (&e * y.transpose()) * faer::Scale(beta * beta);

    // Km^-1 - A^-1 = L^-T (I - B^-1) L^-1
    let mut i_minus_binv = binv.clone() * faer::Scale(-1.0);
    for i in 0..m {
        i_minus_binv[(i, i)] += 1.0;
    }
    let mut km_minus_a = li.transpose() * &i_minus_binv * &li;
    symmetrize(&mut km_minus_a);
    let eet = &e * e.transpose();
    let mut d_phi = Mat::zeros(m, m);
    for j in 0..m {
        for i in 0..m {
            d_phi[(i, j)] = 0.5 * beta * d * km_minus_a[(i, j)] - 0.5 * beta.powi(3) * eet[(i, j)];
        }
    }

    // Σ dF/dKm ∘ Km with Li Km Li^T = I:
    // D/2 M - D/2 tr(B^-1) - beta^2/2 tr(E^T Km E) - beta D/2 tr(phibar)
    let km_dot = 0.5 * d * (m as f64) - 0.5 * d * trace(&binv) - 0.5 * beta * beta * frob_sq(&lt_e)
        - 0.5 * beta * d * tr_phibar;

    // tr(A^-1 Phi) = tr(B^-1 phibar); tr(E^T Phi E)
    let tr_ainv_phi: f64 = {
        let prod = &binv * &phibar;
        trace(&prod)
    };
    let phi_e = phi * &e;
    let tr_ephie: f64 = (0..e.ncols())
        .map(|j| e.col_as_slice(j).iter().zip(phi_e.col_as_slice(j)).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let dbeta = 0.5 * n * d / beta - 0.5 * d * tr_ainv_phi + beta * tr_ce - 0.5 * beta * beta * tr_ephie - 0.5 * yy
        - 0.5 * d * psi0
        + 0.5 * d * tr_phibar;

    Ok(Bound { value, d_p, d_phi, km_dot, dlog_beta: beta * dbeta, jitter: eps })
}
