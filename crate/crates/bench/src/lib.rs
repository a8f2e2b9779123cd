//! Shared fixtures for the benchmarks.

use faer::Mat;
use hgplvm::datasets::{sbt_dataset, SbtSpec};
use hgplvm::lorentz::lift;
use hgplvm::objective::Hyper;
use hgplvm::{PointSet, VariationalState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Fixture {
    pub y: Mat<f64>,
    pub x: PointSet,
    pub z: PointSet,
    pub states: Vec<VariationalState>,
    /// `N × H × 2` standard-normal draws.
    pub zeta: Vec<f64>,
    pub hyper: Hyper,
}

/// Binary-tree observations of the given depth with random planar latents,
/// `m` inducing points and `h` Monte Carlo draws per point.
pub fn fixture(depth: usize, m: usize, h: usize, seed: u64) -> Fixture {
    let ds = sbt_dataset(&SbtSpec::new(depth, seed)).expect("valid tree depth");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = |n: usize| {
        let pts: Vec<_> = (0..n)
            .map(|_| lift(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).unwrap())
            .collect();
        PointSet::from_points(&pts).unwrap()
    };
    let x = points(ds.n());
    let z = points(m);
    let states = x.to_points().into_iter().map(|p| VariationalState::new(p, &[0.05, 0.05]).unwrap()).collect();
    let zeta = (0..ds.n() * h * 2).map(|_| rng.sample(StandardNormal)).collect();
    Fixture { y: ds.y, x, z, states, zeta, hyper: Hyper::new(1.0, 100.0, 10.0).unwrap() }
}
