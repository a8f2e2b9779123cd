//! Hyperboloid Gaussian-process latent variable models.
//!
//! Latent variables live on the Lorentz model of hyperbolic space and are
//! learned by Riemannian gradient ascent on one of three objectives:
//!
//! | Variant | Objective | Cost per epoch |
//! |---------|-----------|----------------|
//! | [`Variant::Full`] | exact GP marginal likelihood | O(N³) |
//! | [`Variant::Sparse`] | inducing-point collapsed bound | O(M²N + M³) |
//! | [`Variant::Bayesian`] | evidence lower bound with wrapped-Gaussian posteriors | O(HM²N + M³) |
//!
//! The covariance is the hyperboloid exponential kernel
//! `k(x, y) = σ exp(-d(x, y) / κ)` where `d` is the geodesic distance.
//! Inducing positions are not optimized; they are resampled from the current
//! latent set every few epochs.
//!
//! Embeddings are visualized on the Poincaré ball via [`lorentz::to_poincare`].

pub mod datasets;
pub mod error;
pub mod kernel;
pub(crate) mod linalg;
pub mod lorentz;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod wrapped;

pub use error::{Error, Result};
pub use kernel::{GramMatrix, HeKernel, PointSet};
pub use lorentz::{LorentzPoint, PoincarePoint, TangentVector};
pub use objective::{Hyper, ModelConfig, ObjectiveEval, Variant};
pub use optimizer::{Latent, TraceRecord, TrainConfig, TrainOutcome, TrainState};
pub use wrapped::{ReparamSample, VariationalState};

/// Dense row-major-agnostic matrix type used throughout the public API.
pub type Matrix = faer::Mat<f64>;
