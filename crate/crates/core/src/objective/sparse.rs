use faer::Mat;

use super::collapsed::{collapsed_bound, BoundInput};
use super::{check_shapes, Hyper, ObjectiveEval, RETRY_JITTER};
use crate::error::{Error, Result};
use crate::kernel::{add_scaled_dual, PointSet};

/// Collapsed inducing-point lower bound on the log marginal likelihood.
///
/// `z` is treated as a constant snapshot: no gradient flows to it.
pub fn objective_sparse(y: &Mat<f64>, x: &PointSet, z: &PointSet, hyper: &Hyper) -> Result<ObjectiveEval> {
    let n = x.len();
    check_shapes(y, n)?;
    if z.is_empty() || z.dim() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), got: z.dim() });
    }
    let m = z.len();
    let sigma = hyper.sigma();
    let kern = &hyper.kernel;

    let mut kmn = Mat::zeros(m, n);
    let mut coef = Mat::zeros(m, n);
    for i in 0..n {
        for k in 0..m {
            let (v, c) = kern.eval_coef_raw(x.row(i), z.row(k));
            kmn[(k, i)] = v;
            coef[(k, i)] = c;
        }
    }
    let phi = &kmn * kmn.transpose();
    let km = kern.gram_sym(z);
    let bound = collapsed_bound(BoundInput {
        y,
        p: &kmn,
        phi: &phi,
        km: &km,
        beta: hyper.beta,
        psi0: n as f64 * sigma,
        jitter: hyper.jitter * sigma,
        retry_jitter: RETRY_JITTER * sigma,
    })?;

    // Total derivative with respect to K_mn: dF/dP + 2 dF/dPhi P
    let g = &bound.d_p + (&bound.d_phi * &kmn) * faer::Scale(2.0);

    let s = x.dim() + 1;
    let mut latent_grad = vec![0.0; n * s];
    let mut p_dot = 0.0;
    for i in 0..n {
        let out = &mut latent_grad[i * s..(i + 1) * s];
        for k in 0..m {
            p_dot += g[(k, i)] * kmn[(k, i)];
            let w = g[(k, i)] * coef[(k, i)];
            if w != 0.0 {
                add_scaled_dual(out, w, z.row(k), false);
            }
        }
    }
    let d = y.ncols() as f64;
    let dlog_sigma = p_dot + bound.km_dot - 0.5 * hyper.beta * d * n as f64 * sigma;

    let eval = ObjectiveEval {
        value: bound.value,
        latent_grad,
        log_s_grad: Vec::new(),
        dlog_sigma,
        dlog_beta: bound.dlog_beta,
        kl: 0.0,
        jitter_used: bound.jitter / sigma,
    };
    eval.check_finite()?;
    Ok(eval)
}
