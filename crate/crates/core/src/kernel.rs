//! Hyperboloid exponential kernel `k(x, y) = σ exp(−d(x, y)/κ)`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::lorentz::{acosh1p, cosh_dist_minus_one, LorentzPoint};

/// Kernel distances below this are treated as coincident for gradients.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Kernel hyperparameters: variance `σ` and length scale `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeKernel {
    sigma: f64,
    kappa: f64,
}

/// A contiguous list of hyperboloid points sharing one latent dimension.
///
/// Stored as a flat `len × (Q+1)` buffer; this is the layout the objectives
/// iterate over.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    q: usize,
    coords: Vec<f64>,
}

/// Which point list a gram-matrix axis was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRole {
    Data,
    Inducing,
}

/// A kernel matrix tagged with the provenance of its rows and columns.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub values: Mat<f64>,
    pub rows: PointRole,
    pub cols: PointRole,
}

impl HeKernel {
    pub fn new(sigma: f64, kappa: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter { name: "sigma", reason: format!("must be positive, got {sigma}") });
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Parameter { name: "kappa", reason: format!("must be positive, got {kappa}") });
        }
        Ok(Self { sigma, kappa })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        Self::new(sigma, self.kappa)
    }

    pub fn eval(&self, x: &LorentzPoint, y: &LorentzPoint) -> f64 {
        self.eval_raw(x.coords(), y.coords())
    }

    #[inline]
    pub(crate) fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        self.sigma * (-acosh1p(cosh_dist_minus_one(x, y)) / self.kappa).exp()
    }

    /// Kernel value `k` and coefficient `c` such that the ambient gradient of
    /// `k(x, y)` with respect to `x` is `c · [−y_0, ỹ]`. `c` is zero when the
    /// points coincide.
    #[inline]
    pub(crate) fn eval_coef_raw(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let w = cosh_dist_minus_one(x, y);
        let d = acosh1p(w);
        let k = self.sigma * (-d / self.kappa).exp();
        if d < COINCIDENCE_TOL {
            return (k, 0.0);
        }
        // z = -<x, y> = x0 y0 - x~.y~, dk/dz = -k / (kappa sqrt(z^2 - 1))
        (k, k / (self.kappa * (w * (w + 2.0)).sqrt()))
    }

    /// Kernel value, with the ambient gradient with respect to `x` written
    /// into `grad`.
    #[inline]
    pub(crate) fn eval_grad_raw(&self, x: &[f64], y: &[f64], grad: &mut [f64]) -> f64 {
        let (k, c) = self.eval_coef_raw(x, y);
        add_scaled_dual(grad, c, y, true);
        k
    }

    /// Ambient-coordinate gradient of `k(x, y)` with respect to `x`.
    pub fn grad_point(&self, x: &LorentzPoint, y: &LorentzPoint) -> Vec<f64> {
        let mut g = vec![0.0; x.coords().len()];
        self.eval_grad_raw(x.coords(), y.coords(), &mut g);
        g
    }

    /// Entrywise kernel matrix between two point sets.
    pub fn gram(&self, rows: &PointSet, cols: &PointSet) -> Mat<f64> {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.eval_raw(rows.row(i), cols.row(j)))
    }

    /// Symmetric kernel matrix of one point set, with exact `σ` on the diagonal.
    pub fn gram_sym(&self, points: &PointSet) -> Mat<f64> {
        let n = points.len();
        let mut k = Mat::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = self.sigma;
            for j in 0..i {
                let v = self.eval_raw(points.row(i), points.row(j));
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    /// Tagged gram matrix; symmetric assembly is used when both roles match.
    pub fn gram_tagged(&self, rows: (&PointSet, PointRole), cols: (&PointSet, PointRole)) -> GramMatrix {
        let values = if rows.1 == cols.1 && rows.0 == cols.0 {
            self.gram_sym(rows.0)
        } else {
            self.gram(rows.0, cols.0)
        };
        GramMatrix { values, rows: rows.1, cols: cols.1 }
    }
}

/// Writes (or, with `overwrite = false`, adds) `c · [−y_0, ỹ]` into `out`.
#[inline]
pub(crate) fn add_scaled_dual(out: &mut [f64], c: f64, y: &[f64], overwrite: bool) {
    if overwrite {
        out[0] = -c * y[0];
        for (o, v) in out[1..].iter_mut().zip(&y[1..]) {
            *o = c * v;
        }
    } else {
        out[0] -= c * y[0];
        for (o, v) in out[1..].iter_mut().zip(&y[1..]) {
            *o += c * v;
        }
    }
}

/// `∂F/∂σ = (1/σ) Σ_ij (∂F/∂K)_ij K_ij`, valid because `K` is linear in `σ`.
pub fn variance_grad(sigma: f64, df_dk: &Mat<f64>, k: &Mat<f64>) -> Result<f64> {
    if df_dk.nrows() != k.nrows() || df_dk.ncols() != k.ncols() {
        return Err(Error::Dimension { expected: k.nrows() * k.ncols(), got: df_dk.nrows() * df_dk.ncols() });
    }
    Ok(frobenius_dot(df_dk, k) / sigma)
}

pub(crate) fn frobenius_dot(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for (x, y) in a.col_as_slice(j).iter().zip(b.col_as_slice(j)) {
            s += x * y;
        }
    }
    s
}

impl PointSet {
    pub fn new(q: usize) -> Self {
        Self { q, coords: Vec::new() }
    }

    pub fn from_points(points: &[LorentzPoint]) -> Result<Self> {
        let q = points.first().map(|p| p.dim()).ok_or_else(|| Error::Argument("empty point list".into()))?;
        let mut set = Self { q, coords: Vec::with_capacity(points.len() * (q + 1)) };
        for p in points {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &LorentzPoint) -> Result<()> {
        if p.dim() != self.q {
            return Err(Error::Dimension { expected: self.q, got: p.dim() });
        }
        self.coords.extend_from_slice(p.coords());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / (self.q + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Latent dimension `Q`.
    pub fn dim(&self) -> usize {
        self.q
    }

    /// Ambient coordinates of point `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let s = self.q + 1;
        &self.coords[i * s..(i + 1) * s]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let s = self.q + 1;
        &mut self.coords[i * s..(i + 1) * s]
    }

    pub fn point(&self, i: usize) -> LorentzPoint {
        LorentzPoint::from_raw(self.row(i).to_vec())
    }

    pub fn to_points(&self) -> Vec<LorentzPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Copies the listed rows into a new set.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * (self.q + 1));
        for &i in indices {
            coords.extend_from_slice(self.row(i));
        }
        Self { q: self.q, coords }
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{distance, exp_map, lift, TangentVector};

    fn kern(s: f64, k: f64) -> HeKernel {
        HeKernel::new(s, k).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HeKernel::new(0.0, 1.0).is_err());
        assert!(HeKernel::new(1.0, -2.0).is_err());
        assert!(HeKernel::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn eval_examples() {
        let k = kern(2.5, 3.0);
        let x = lift(&[0.3, 1.2]).unwrap();
        assert_eq!(k.eval(&x, &x), 2.5);

        let o = LorentzPoint::origin(2);
        let y = exp_map(&o, &TangentVector::at_origin(&[2f64.ln(), 0.0])).unwrap();
        assert!((kern(1.0, 1.0).eval(&o, &y) - 0.5).abs() < 1e-12);

        let far = lift(&[4.0, -3.0]).unwrap();
        assert!((kern(1.0, 1e12).eval(&o, &far) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gram_shapes_and_symmetry() {
        let k = kern(1.3, 2.0);
        let a = PointSet::from_points(&[lift(&[0.1, 0.2]).unwrap(), lift(&[-1.0, 0.5]).unwrap(), lift(&[2.0, 2.0]).unwrap()]).unwrap();
        let b = PointSet::from_points(&[lift(&[0.0, 0.0]).unwrap(), lift(&[0.4, -0.9]).unwrap()]).unwrap();
        let single = a.select(&[1]);
        let g1 = k.gram_sym(&single);
        assert_eq!((g1.nrows(), g1.ncols(), g1[(0, 0)]), (1, 1, 1.3));
        let kab = k.gram(&a, &b);
        let kba = k.gram(&b, &a);
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(kab[(i, j)], kba[(j, i)]);
            }
        }
        let ks = k.gram_sym(&a);
        let kf = k.gram(&a, &a);
        for i in 0..3 {
            for j in 0..3 {
                assert!((ks[(i, j)] - kf[(i, j)]).abs() < 1e-15);
                assert!(ks[(i, j)] > 0.0 && ks[(i, j)] <= 1.3);
            }
        }
        let tagged = k.gram_tagged((&b, PointRole::Inducing), (&a, PointRole::Data));
        assert_eq!((tagged.rows, tagged.cols), (PointRole::Inducing, PointRole::Data));
    }

    #[test]
    fn grad_is_zero_at_coincidence() {
        let x = lift(&[0.5, 0.5]).unwrap();
        assert!(kern(1.0, 1.0).grad_point(&x, &x).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn riemannian_grad_norm_is_k_over_kappa() {
        let k = kern(1.7, 2.5);
        let x = lift(&[0.3, -0.8]).unwrap();
        let y = lift(&[-1.1, 0.4]).unwrap();
        let mut g = k.grad_point(&x, &y);
        g[0] = -g[0];
        let t = crate::lorentz::proj_tangent(&x, &g).unwrap();
        assert!((t.norm() - k.eval(&x, &y) / 2.5).abs() < 1e-12);
        assert!(distance(&x, &y) > 0.0);
    }

    #[test]
    fn variance_grad_examples() {
        let z = Mat::<f64>::zeros(3, 3);
        let k = Mat::<f64>::identity(3, 3) * faer::Scale(2.0);
        assert_eq!(variance_grad(2.0, &z, &k).unwrap(), 0.0);
        assert_eq!(variance_grad(2.0, &Mat::identity(3, 3), &k).unwrap(), 3.0);
        assert!(variance_grad(2.0, &Mat::identity(2, 2), &k).is_err());
    }

    #[test]
    fn point_set_round_trip() {
        let pts = vec![lift(&[0.1, 0.2]).unwrap(), lift(&[3.0, -1.0]).unwrap()];
        let set = PointSet::from_points(&pts).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.to_points(), pts);
        assert!(PointSet::from_points(&[]).is_err());
        let mut s = PointSet::new(2);
        assert!(s.push(&lift(&[1.0]).unwrap()).is_err());
    }
}
