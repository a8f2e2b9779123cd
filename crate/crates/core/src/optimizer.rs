//! Riemannian gradient ascent on the latent points, plain gradient ascent
//! on `log σ`, `log β` and the variational log-variances.
//!
//! Steps follow the gradient of the per-entry objective `F / (N·D)`, so one
//! learning rate serves every dataset size. Latent steps are further
//! multiplied by `κ`, which cancels the `1/κ` carried by every kernel
//! gradient and keeps the step length in units of the length scale.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use faer::Mat;

use crate::error::{Error, Result};
use crate::kernel::PointSet;
use crate::lorentz::{exp_map_raw, minkowski, proj_tangent_raw, LorentzPoint};
use crate::objective::{objective_bayesian, objective_full, objective_sparse, Hyper, ModelConfig, ObjectiveEval, Variant};
use crate::wrapped::VariationalState;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_iter: usize,
    /// Step size `α` for latent points and variational means, applied to
    /// `κ · ∇(F / ND)`.
    pub lr_latent: f64,
    /// Step size for `log σ`, `log β` and `log s`, applied to `∇(F / ND)`.
    pub lr_hyper: f64,
    /// Epochs of linear learning-rate warmup.
    pub warmup_epochs: usize,
    pub resample_every: usize,
    /// Variational variances stay fixed for this many epochs.
    pub variance_freeze_epochs: usize,
    /// Half-width of the uniform initialization of spatial coordinates.
    pub init_scale: f64,
    /// Initial variational variance.
    pub init_variance: f64,
    /// Largest geodesic length of a single latent step.
    pub max_step: f64,
    pub learn_sigma: bool,
    pub learn_beta: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            lr_latent: 5e-4,
            lr_hyper: 0.005,
            warmup_epochs: 10,
            resample_every: 10,
            variance_freeze_epochs: 100,
            init_scale: 1e-3,
            init_variance: 1e-5,
            max_step: 1.0,
            learn_sigma: true,
            learn_beta: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| Err(Error::Parameter { name, reason: reason.into() });
        if !(self.lr_latent > 0.0) {
            return bad("lr_latent", "must be positive");
        }
        if !(self.lr_hyper >= 0.0) {
            return bad("lr_hyper", "must be non-negative");
        }
        if self.resample_every == 0 {
            return bad("resample_every", "must be at least 1");
        }
        if !(self.init_scale >= 0.0) {
            return bad("init_scale", "must be non-negative");
        }
        if !(self.init_variance > 0.0) {
            return bad("init_variance", "must be positive");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step", "must be positive");
        }
        Ok(())
    }

    /// Linear warmup factor in `(0, 1]`.
    fn warmup(&self, epoch: usize) -> f64 {
        if self.warmup_epochs == 0 {
            1.0
        } else {
            ((epoch + 1) as f64 / self.warmup_epochs as f64).min(1.0)
        }
    }
}

/// Latent variables: points for the full and sparse models, variational
/// states for the Bayesian model.
#[derive(Debug, Clone, PartialEq)]
pub enum Latent {
    Points(PointSet),
    Variational(Vec<VariationalState>),
}

impl Latent {
    /// Points, or variational means.
    pub fn positions(&self) -> PointSet {
        match self {
            Latent::Points(p) => p.clone(),
            Latent::Variational(v) => {
                let mut set = PointSet::new(v[0].dim());
                for s in v {
                    set.push(&s.mu).expect("variational states share one dimension");
                }
                set
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Latent::Points(p) => p.len(),
            Latent::Variational(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub latent: Latent,
    /// Inducing positions, a snapshot of `inducing_idx` rows of the latent set.
    pub z: Option<PointSet>,
    pub inducing_idx: Vec<usize>,
    pub log_sigma: f64,
    pub log_beta: f64,
    pub epoch: usize,
    pub rng_seed: u64,
}

/// One row of the objective trace, recorded before that epoch's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub epoch: usize,
    pub objective: f64,
    pub log_sigma: f64,
    pub log_beta: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub state: TrainState,
    pub trace: Vec<TraceRecord>,
    /// Objective at the final parameters.
    pub final_objective: f64,
    pub warnings: Vec<String>,
}

/// One ascent step along the Riemannian gradient of the objective.
///
/// `ambient_grad` is the Euclidean gradient in ambient coordinates; its time
/// component is negated (the inverse Lorentz metric) before projection.
pub fn riemannian_step(x: &LorentzPoint, ambient_grad: &[f64], alpha: f64) -> Result<LorentzPoint> {
    if ambient_grad.len() != x.coords().len() {
        return Err(Error::Dimension { expected: x.coords().len(), got: ambient_grad.len() });
    }
    let out = step_raw(x.coords(), ambient_grad, alpha, f64::INFINITY)?;
    Ok(LorentzPoint::from_raw(out))
}

fn step_raw(x: &[f64], grad: &[f64], alpha: f64, max_step: f64) -> Result<Vec<f64>> {
    if grad.iter().any(|g| !g.is_finite()) || !alpha.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    let mut g = grad.to_vec();
    g[0] = -g[0];
    let mut t = proj_tangent_raw(x, &g);
    let norm = alpha * minkowski(&t, &t).max(0.0).sqrt();
    let scale = if norm > max_step { alpha * max_step / norm } else { alpha };
    t.iter_mut().for_each(|v| *v *= scale);
    Ok(exp_map_raw(x, &t))
}

/// Spatial coordinates drawn from `U(−scale, scale)` and lifted.
pub fn init_latent(n: usize, q: usize, scale: f64, seed: u64) -> Result<Vec<LorentzPoint>> {
    if n == 0 || q == 0 {
        return Err(Error::Argument("init_latent needs N >= 1 and Q >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s: Vec<f64> = (0..q).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
            LorentzPoint::lift(&s)
        })
        .collect()
}

/// `m` distinct indices chosen uniformly, and the corresponding rows.
pub fn resample_inducing(latent: &PointSet, m: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, PointSet)> {
    if m == 0 || m > latent.len() {
        return Err(Error::Parameter { name: "inducing", reason: format!("must lie in 1..={}, got {m}", latent.len()) });
    }
    let mut idx: Vec<usize> = (0..latent.len()).collect();
    idx.shuffle(rng);
    idx.truncate(m);
    let z = latent.select(&idx);
    Ok((idx, z))
}

fn draw_zeta(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

fn evaluate(y: &Mat<f64>, state: &TrainState, model: &ModelConfig, zeta: &[f64]) -> Result<ObjectiveEval> {
    let hyper = Hyper::new(state.log_sigma.exp(), model.kappa, state.log_beta.exp())?.with_jitter(model.jitter);
    let z = || state.z.as_ref().ok_or_else(|| Error::Argument("inducing points missing".into()));
    match (&state.latent, model.variant) {
        (Latent::Points(x), Variant::Full) => objective_full(y, x, &hyper),
        (Latent::Points(x), Variant::Sparse) => objective_sparse(y, x, z()?, &hyper),
        (Latent::Variational(v), Variant::Bayesian) => objective_bayesian(y, v, z()?, zeta, &hyper),
        _ => Err(Error::Argument("latent representation does not match the model variant".into())),
    }
}

/// Fresh training state: uniform initialization near the origin, `σ` and
/// `β` at their configured initial values.
pub fn init_state(n: usize, model: &ModelConfig, tc: &TrainConfig, seed: u64) -> Result<TrainState> {
    model.validate(n)?;
    tc.validate()?;
    let points = init_latent(n, model.latent_dim, tc.init_scale, seed)?;
    let latent = match model.variant {
        Variant::Full | Variant::Sparse => Latent::Points(PointSet::from_points(&points)?),
        Variant::Bayesian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_5a11);
            let states = points
                .into_iter()
                .map(|mu| {
                    // positive variances near init_variance
                    let s: Vec<f64> = (0..model.latent_dim)
                        .map(|_| tc.init_variance * (1.0 + rng.random::<f64>()))
                        .collect();
                    VariationalState::new(mu, &s)
                })
                .collect::<Result<Vec<_>>>()?;
            Latent::Variational(states)
        }
    };
    Ok(TrainState {
        latent,
        z: None,
        inducing_idx: Vec::new(),
        log_sigma: model.sigma_init.ln(),
        log_beta: model.beta_init.ln(),
        epoch: 0,
        rng_seed: seed,
    })
}

/// Runs `tc.max_iter` epochs of ascent. A pure function of its arguments.
pub fn train(y: &Mat<f64>, model: &ModelConfig, tc: &TrainConfig, seed: u64) -> Result<TrainOutcome> {
    let state = init_state(y.nrows(), model, tc, seed)?;
    train_from(y, model, tc, state)
}

/// Continues training from an existing state.
pub fn train_from(y: &Mat<f64>, model: &ModelConfig, tc: &TrainConfig, mut state: TrainState) -> Result<TrainOutcome> {
    model.validate(y.nrows())?;
    tc.validate()?;
    if state.latent.len() != y.nrows() {
        return Err(Error::Dimension { expected: y.nrows(), got: state.latent.len() });
    }
    let n = y.nrows();
    let q = model.latent_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(state.rng_seed.wrapping_add(state.epoch as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut trace = Vec::with_capacity(tc.max_iter);
    let mut warnings = Vec::new();
    let needs_z = model.variant != Variant::Full;
    let zeta_len = if model.variant == Variant::Bayesian { n * model.mc_samples * q } else { 0 };
    let abort = |epoch: usize, e: Error| Error::TrainingAborted { epoch, reason: e.to_string() };

    let start = state.epoch;
    for epoch in start..start + tc.max_iter {
        if needs_z && (state.z.is_none() || (epoch - start) % tc.resample_every == 0) {
            let (idx, z) = resample_inducing(&state.latent.positions(), model.inducing, &mut rng)?;
            state.inducing_idx = idx;
            state.z = Some(z);
        }
        let zeta = draw_zeta(&mut rng, zeta_len);
        let eval = evaluate(y, &state, model, &zeta).map_err(|e| abort(epoch, e))?;
        trace.push(TraceRecord { epoch, objective: eval.value, log_sigma: state.log_sigma, log_beta: state.log_beta });

        let w = tc.warmup(epoch) / (n * y.ncols()) as f64;
        let lr = tc.lr_latent * model.kappa * w;
        let lr_h = tc.lr_hyper * w;
        let mut rejected = 0usize;
        match &mut state.latent {
            Latent::Points(x) => {
                for i in 0..n {
                    match step_raw(x.row(i), eval.latent_row(i, q), lr, tc.max_step) {
                        Ok(p) => x.row_mut(i).copy_from_slice(&p),
                        Err(_) => rejected += 1,
                    }
                }
            }
            Latent::Variational(states) => {
                let update_s = epoch >= tc.variance_freeze_epochs;
                for (i, st) in states.iter_mut().enumerate() {
                    match step_raw(st.mu.coords(), eval.latent_row(i, q), lr, tc.max_step) {
                        Ok(p) => st.mu = LorentzPoint::from_raw(p),
                        Err(_) => rejected += 1,
                    }
                    if update_s {
                        for (ls, g) in st.log_s_mut().iter_mut().zip(&eval.log_s_grad[i * q..(i + 1) * q]) {
                            if g.is_finite() {
                                *ls += lr_h * g;
                            }
                        }
                    }
                }
            }
        }
        if rejected > 0 {
            warnings.push(format!("epoch {epoch}: rejected {rejected} non-finite latent steps"));
        }
        if tc.learn_sigma {
            state.log_sigma += lr_h * eval.dlog_sigma;
        }
        if tc.learn_beta {
            state.log_beta += lr_h * eval.dlog_beta;
        }
        state.epoch = epoch + 1;
    }

    if needs_z && state.z.is_none() {
        let (idx, z) = resample_inducing(&state.latent.positions(), model.inducing, &mut rng)?;
        state.inducing_idx = idx;
        state.z = Some(z);
    }
    if let Some(z) = &state.z {
        // keep the snapshot consistent with the final latent positions
        let pos = state.latent.positions();
        let refreshed = pos.select(&state.inducing_idx);
        debug_assert_eq!(refreshed.len(), z.len());
        state.z = Some(refreshed);
    }
    let zeta = draw_zeta(&mut rng, zeta_len);
    let final_objective = evaluate(y, &state, model, &zeta).map_err(|e| abort(state.epoch, e))?.value;
    Ok(TrainOutcome { state, trace, final_objective, warnings })
}
