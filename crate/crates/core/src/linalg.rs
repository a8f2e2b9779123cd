//! Symmetric positive-definite helpers on top of faer.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Lower Cholesky factor of `a`, or `None` if `a` is not numerically PD.
pub(crate) fn cholesky(a: &Mat<f64>) -> Option<Mat<f64>> {
    let llt = a.llt(Side::Lower).ok()?;
    let l = llt.L().to_owned();
    if (0..l.nrows()).all(|i| l[(i, i)].is_finite() && l[(i, i)] > 0.0) {
        Some(l)
    } else {
        None
    }
}

/// Factorizes `a + jitter·I`, retrying once with `retry` on failure.
///
/// Returns the factor and the jitter that was actually applied.
pub(crate) fn cholesky_jittered(
    a: &Mat<f64>,
    jitter: f64,
    retry: f64,
    name: &'static str,
) -> Result<(Mat<f64>, f64)> {
    for eps in [jitter, retry] {
        let mut b = a.clone();
        if eps > 0.0 {
            for i in 0..b.nrows() {
                b[(i, i)] += eps;
            }
        }
        if let Some(l) = cholesky(&b) {
            return Ok((l, eps));
        }
    }
    Err(Error::Conditioning { matrix: name, jitter: retry })
}

/// `log det(L Lᵀ)`
pub(crate) fn logdet(l: &Mat<f64>) -> f64 {
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
}

/// `L⁻¹ B`
pub(crate) fn solve_lower(l: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut x = b.clone();
    l.solve_lower_triangular_in_place(&mut x);
    x
}

/// `L⁻ᵀ B`
pub(crate) fn solve_upper_t(l: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut x = b.clone();
    l.transpose().solve_upper_triangular_in_place(&mut x);
    x
}

/// `(L Lᵀ)⁻¹ B`
pub(crate) fn solve_spd(l: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    solve_upper_t(l, &solve_lower(l, b))
}

/// `(L Lᵀ)⁻¹`, symmetrized.
pub(crate) fn inverse_spd(l: &Mat<f64>) -> Mat<f64> {
    let n = l.nrows();
    let li = solve_lower(l, &Mat::identity(n, n));
    let mut inv = li.transpose() * &li;
    symmetrize(&mut inv);
    inv
}

pub(crate) fn symmetrize(a: &mut Mat<f64>) {
    for i in 0..a.nrows() {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

pub(crate) fn trace(a: &Mat<f64>) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub(crate) fn frob_sq(a: &Mat<f64>) -> f64 {
    (0..a.ncols()).map(|j| a.col_as_slice(j).iter().map(|v| v * v).sum::<f64>()).sum()
}
