use faer::Mat;

use super::collapsed::{collapsed_bound, BoundInput};
use super::{check_shapes, Hyper, ObjectiveEval, RETRY_JITTER};
use crate::error::{Error, Result};
use crate::kernel::{add_scaled_dual, frobenius_dot, HeKernel, PointSet};
use crate::wrapped::{kl_sample, reparam_grads, wg_sample, ReparamSample, VariationalState};

/// Monte-Carlo kernel expectations under the variational posteriors.
#[derive(Debug, Clone)]
pub struct PsiStats {
    /// `M × N`, `Ψ₁[k, i] = (1/H) Σ_h k(z_k, x_i^(h))`.
    pub psi1: Mat<f64>,
    /// `M × M`, `Σ_i (1/H) Σ_h k(z, x_i^(h)) k(x_i^(h), z)ᵀ`.
    pub psi2: Mat<f64>,
    /// `tr K_nn = N σ`, exact for this kernel.
    pub psi0: f64,
}

/// `samples[i]` holds the `H` draws for datum `i`.
pub fn psi_stats(samples: &[Vec<ReparamSample>], z: &PointSet, kernel: &HeKernel) -> Result<PsiStats> {
    let n = samples.len();
    let h = samples.first().map_or(0, Vec::len);
    if n == 0 || h == 0 || samples.iter().any(|s| s.len() != h) {
        return Err(Error::Argument("psi_stats needs the same non-zero sample count for every datum".into()));
    }
    let m = z.len();
    let kall = Mat::from_fn(m, n * h, |k, c| kernel.eval_raw(samples[c / h][c % h].x.coords(), z.row(k)));
    Ok(psi_from_kall(&kall, n, h, kernel.sigma()))
}

fn psi_from_kall(kall: &Mat<f64>, n: usize, h: usize, sigma: f64) -> PsiStats {
    let m = kall.nrows();
    let inv_h = 1.0 / h as f64;
    let psi1 = Mat::from_fn(m, n, |k, i| (0..h).map(|t| kall[(k, i * h + t)]).sum::<f64>() * inv_h);
    let mut psi2 = (kall * kall.transpose()) * faer::Scale(inv_h);
    crate::linalg::symmetrize(&mut psi2);
    PsiStats { psi1, psi2, psi0: n as f64 * sigma }
}

/// Evidence lower bound with wrapped-Gaussian posteriors and a standard
/// wrapped-Gaussian prior at the origin.
///
/// `zeta` is the flat `N × H × Q` array of standard-normal draws; the same
/// draws are used for the value and for every gradient.
pub fn objective_bayesian(
    y: &Mat<f64>,
    states: &[VariationalState],
    z: &PointSet,
    zeta: &[f64],
    hyper: &Hyper,
) -> Result<ObjectiveEval> {
    let n = states.len();
    check_shapes(y, n)?;
    let q = z.dim();
    if states.iter().any(|s| s.dim() != q) {
        return Err(Error::Dimension { expected: q, got: states[0].dim() });
    }
    if zeta.is_empty() || zeta.len() % (n * q) != 0 {
        return Err(Error::Argument(format!("zeta length {} is not a multiple of N·Q = {}", zeta.len(), n * q)));
    }
    let h = zeta.len() / (n * q);
    let m = z.len();
    let sigma = hyper.sigma();
    let kern = &hyper.kernel;

    let mut samples = Vec::with_capacity(n * h);
    for (i, st) in states.iter().enumerate() {
        for t in 0..h {
            let off = (i * h + t) * q;
            samples.push(wg_sample(st, &zeta[off..off + q])?);
        }
    }
    let mut kall = Mat::zeros(m, n * h);
    let mut coef = Mat::zeros(m, n * h);
    for (c, smp) in samples.iter().enumerate() {
        for k in 0..m {
            let (v, cf) = kern.eval_coef_raw(smp.x.coords(), z.row(k));
            kall[(k, c)] = v;
            coef[(k, c)] = cf;
        }
    }
    let psi = psi_from_kall(&kall, n, h, sigma);
    let km = kern.gram_sym(z);
    let bound = collapsed_bound(BoundInput {
        y,
        p: &psi.psi1,
        phi: &psi.psi2,
        km: &km,
        beta: hyper.beta,
        psi0: psi.psi0,
        jitter: hyper.jitter * sigma,
        retry_jitter: RETRY_JITTER * sigma,
    })?;

    let inv_h = 1.0 / h as f64;
    let g2k = &bound.d_phi * &kall;
    let s = q + 1;
    let mut latent_grad = vec![0.0; n * s];
    let mut log_s_grad = vec![0.0; n * q];
    let mut kl = 0.0;
    let mut gx = vec![0.0; s];
    for (i, st) in states.iter().enumerate() {
        let s_vals = st.s();
        let mut ds = vec![0.0; q];
        for t in 0..h {
            let c = i * h + t;
            let smp = &samples[c];
            kl += kl_sample(st, smp) * inv_h;
            gx.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..m {
                let w = (bound.d_p[(k, i)] + 2.0 * g2k[(k, c)]) * inv_h * coef[(k, c)];
                if w != 0.0 {
                    add_scaled_dual(&mut gx, w, z.row(k), false);
                }
            }
            let rg = reparam_grads(st, smp);
            let out = &mut latent_grad[i * s..(i + 1) * s];
            for b in 0..s {
                let chain: f64 = (0..s).map(|a| rg.dx_dmu[(a, b)] * gx[a]).sum();
                out[b] += chain - rg.dkl_dmu[b] * inv_h;
            }
            for kq in 0..q {
                let chain: f64 = (0..s).map(|a| rg.dx_ds[(a, kq)] * gx[a]).sum();
                ds[kq] += chain - rg.dkl_ds[kq] * inv_h;
            }
        }
        for kq in 0..q {
            log_s_grad[i * q + kq] = ds[kq] * s_vals[kq];
        }
    }

    let d = y.ncols() as f64;
    let dlog_sigma = frobenius_dot(&bound.d_p, &psi.psi1) + 2.0 * frobenius_dot(&bound.d_phi, &psi.psi2) + bound.km_dot
        - 0.5 * hyper.beta * d * psi.psi0;

    let eval = ObjectiveEval {
        value: bound.value - kl,
        latent_grad,
        log_s_grad,
        dlog_sigma,
        dlog_beta: bound.dlog_beta,
        kl,
        jitter_used: bound.jitter / sigma,
    };
    eval.check_finite()?;
    Ok(eval)
}
