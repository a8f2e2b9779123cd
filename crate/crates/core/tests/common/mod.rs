#![allow(dead_code)]

use faer::Mat;
use hgplvm::kernel::PointSet;
use hgplvm::lorentz::lift;
use hgplvm::LorentzPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, q: usize, spread: f64) -> Vec<LorentzPoint> {
    (0..n)
        .map(|_| {
            let s: Vec<f64> = (0..q).map(|_| rng.random_range(-spread..spread)).collect();
            lift(&s).unwrap()
        })
        .collect()
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize, q: usize, spread: f64) -> PointSet {
    PointSet::from_points(&random_points(rng, n, q, spread)).unwrap()
}

pub fn random_y(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Mat<f64> {
    Mat::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// Gradient along the free spatial coordinates of a point whose time
/// coordinate follows from them.
pub fn spatial_from_ambient(x: &[f64], g: &[f64]) -> Vec<f64> {
    (1..x.len()).map(|q| g[q] + g[0] * x[q] / x[0]).collect()
}

/// Copy of `set` with spatial coordinate `q` of point `i` shifted by `h`.
pub fn nudge(set: &PointSet, i: usize, q: usize, h: f64) -> PointSet {
    let mut pts = set.to_points();
    let mut s = pts[i].spatial().to_vec();
    s[q] += h;
    pts[i] = lift(&s).unwrap();
    PointSet::from_points(&pts).unwrap()
}

pub fn central(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// `‖a − b‖ / ‖b‖`, with an absolute floor for vanishing references.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(1e-8)
}
