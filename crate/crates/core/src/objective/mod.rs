//! GP-LVM objectives and their analytic gradients.
//!
//! All three objectives return an [`ObjectiveEval`] whose latent gradients
//! are taken with respect to raw ambient coordinates. The optimizer turns
//! them into Riemannian gradients.

mod bayesian;
mod collapsed;
mod full;
mod sparse;

pub use bayesian::{objective_bayesian, psi_stats, PsiStats};
pub use full::objective_full;
pub use sparse::objective_sparse;

use crate::error::{Error, Result};
use crate::kernel::HeKernel;

/// Default diagonal jitter on `K_mm`, relative to `σ`.
pub const DEFAULT_JITTER: f64 = 1e-8;
/// Jitter used when the first factorization attempt fails, relative to `σ`.
pub const RETRY_JITTER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Full,
    Sparse,
    Bayesian,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Sparse => "sparse",
            Variant::Bayesian => "bayesian",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "sparse" => Ok(Variant::Sparse),
            "bayesian" => Ok(Variant::Bayesian),
            other => Err(Error::Argument(format!("unknown variant '{other}' (expected full, sparse or bayesian)"))),
        }
    }
}

/// Static model description; `σ` and `β` here are initial values.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub variant: Variant,
    pub latent_dim: usize,
    /// Inducing count `M` (sparse and Bayesian).
    pub inducing: usize,
    /// Monte-Carlo samples per datum `H` (Bayesian).
    pub mc_samples: usize,
    pub kappa: f64,
    pub sigma_init: f64,
    pub beta_init: f64,
    /// `K_mm` diagonal jitter relative to `σ`.
    pub jitter: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Full,
            latent_dim: 2,
            inducing: 50,
            mc_samples: 5,
            kappa: 100.0,
            sigma_init: 1.0,
            beta_init: 100.0,
            jitter: DEFAULT_JITTER,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        let param = |name: &'static str, reason: String| Err(Error::Parameter { name, reason });
        if self.latent_dim == 0 {
            return param("latent_dim", "must be at least 1".into());
        }
        if !(self.kappa > 0.0) {
            return param("kappa", format!("must be positive, got {}", self.kappa));
        }
        if !(self.sigma_init > 0.0) {
            return param("sigma", format!("must be positive, got {}", self.sigma_init));
        }
        if !(self.beta_init > 0.0) {
            return param("beta", format!("must be positive, got {}", self.beta_init));
        }
        if !(self.jitter >= 0.0) {
            return param("jitter", format!("must be non-negative, got {}", self.jitter));
        }
        if self.variant != Variant::Full && (self.inducing == 0 || self.inducing > n) {
            return param("inducing", format!("must lie in 1..={n}, got {}", self.inducing));
        }
        if self.variant == Variant::Bayesian && self.mc_samples == 0 {
            return param("mc_samples", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Current hyperparameters of an evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub kernel: HeKernel,
    pub beta: f64,
    /// `K_mm` diagonal jitter relative to `σ`.
    pub jitter: f64,
}

impl Hyper {
    pub fn new(sigma: f64, kappa: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter { name: "beta", reason: format!("must be positive, got {beta}") });
        }
        Ok(Self { kernel: HeKernel::new(sigma, kappa)?, beta, jitter: DEFAULT_JITTER })
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.kernel.sigma()
    }
}

/// Objective value and gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEval {
    pub value: f64,
    /// Row-major `N × (Q+1)` ambient gradients: `∂F/∂x_i` for point
    /// variants, `∂F/∂μ_i` for the Bayesian variant.
    pub latent_grad: Vec<f64>,
    /// Row-major `N × Q` gradients with respect to `log s_iq` (Bayesian only).
    pub log_s_grad: Vec<f64>,
    pub dlog_sigma: f64,
    pub dlog_beta: f64,
    /// `Σ_i KL_i` included in `value` (Bayesian only).
    pub kl: f64,
    /// Diagonal jitter, relative to `σ`, that the factorization needed.
    pub jitter_used: f64,
}

impl ObjectiveEval {
    pub fn latent_row(&self, i: usize, q: usize) -> &[f64] {
        &self.latent_grad[i * (q + 1)..(i + 1) * (q + 1)]
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !self.value.is_finite() {
            return Err(Error::NonFinite("objective value"));
        }
        let ok = self.latent_grad.iter().chain(&self.log_s_grad).all(|v| v.is_finite())
            && self.dlog_sigma.is_finite()
            && self.dlog_beta.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("objective gradient"))
        }
    }
}

pub(crate) fn check_shapes(y: &faer::Mat<f64>, n: usize) -> Result<()> {
    if y.nrows() != n {
        return Err(Error::Dimension { expected: n, got: y.nrows() });
    }
    if y.ncols() == 0 || n == 0 {
        return Err(Error::Argument("objective needs at least one row and column".into()));
    }
    if (0..y.ncols()).any(|j| y.col_as_slice(j).iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite("observations"));
    }
    Ok(())
}
