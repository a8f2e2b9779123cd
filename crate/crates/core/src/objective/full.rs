use std::f64::consts::PI;

use faer::Mat;

use super::{check_shapes, Hyper, ObjectiveEval, RETRY_JITTER};
use crate::error::Result;
use crate::kernel::{add_scaled_dual, PointSet};
use crate::linalg::{cholesky_jittered, inverse_spd, logdet, solve_spd};

/// Exact log marginal likelihood `Σ_d log N(y_d | 0, K + β⁻¹I)`.
pub fn objective_full(y: &Mat<f64>, x: &PointSet, hyper: &Hyper) -> Result<ObjectiveEval> {
    let n = x.len();
    check_shapes(y, n)?;
    let d = y.ncols() as f64;
    let sigma = hyper.sigma();
    let mut kb = hyper.kernel.gram_sym(x);
    for i in 0..n {
        kb[(i, i)] += 1.0 / hyper.beta;
    }
    let (l, eps) = cholesky_jittered(&kb, 0.0, RETRY_JITTER * sigma, "K + I/beta")?;
    if eps > 0.0 {
        for i in 0..n {
            kb[(i, i)] += eps;
        }
    }
    let alpha = solve_spd(&l, y);
    let fit: f64 = (0..y.ncols())
        .map(|j| y.col_as_slice(j).iter().zip(alpha.col_as_slice(j)).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let value = -0.5 * n as f64 * d * (2.0 * PI).ln() - 0.5 * d * logdet(&l) - 0.5 * fit;

    // G = dF/dK = (alpha alpha^T - D K^{-1}) / 2
    let mut g = &alpha * alpha.transpose();
    let kinv = inverse_spd(&l);
    for j in 0..n {
        for i in 0..n {
            g[(i, j)] = 0.5 * (g[(i, j)] - d * kinv[(i, j)]);
        }
    }

    let mut trace_g = 0.0;
    let mut dlog_sigma = 0.0;
    for j in 0..n {
        trace_g += g[(j, j)];
        for i in 0..n {
            let kij = if i == j { kb[(i, i)] - 1.0 / hyper.beta } else { kb[(i, j)] };
            dlog_sigma += g[(i, j)] * kij;
        }
    }

    let s = x.dim() + 1;
    let mut latent_grad = vec![0.0; n * s];
    for i in 0..n {
        for j in 0..i {
            let (_, c) = hyper.kernel.eval_coef_raw(x.row(i), x.row(j));
            let w = 2.0 * g[(i, j)] * c;
            if w == 0.0 {
                continue;
            }
            add_scaled_dual(&mut latent_grad[i * s..(i + 1) * s], w, x.row(j), false);
            add_scaled_dual(&mut latent_grad[j * s..(j + 1) * s], w, x.row(i), false);
        }
    }

    let eval = ObjectiveEval {
        value,
        latent_grad,
        log_s_grad: Vec::new(),
        dlog_sigma,
        dlog_beta: -trace_g / hyper.beta,
        kl: 0.0,
        jitter_used: eps / sigma,
    };
    eval.check_finite()?;
    Ok(eval)
}
