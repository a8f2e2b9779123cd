//! Relations between the exact and the inducing-point objectives.

mod common;

use common::*;
use hgplvm::objective::{objective_full, objective_sparse, Hyper};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_hyper(r: &mut ChaCha8Rng) -> Hyper {
    Hyper::new(r.random_range(0.5..2.0), r.random_range(0.5..3.0), r.random_range(1.0..100.0)).unwrap()
}

#[test]
fn sparse_with_all_points_inducing_equals_full() {
    let mut r = rng(4);
    for _ in 0..10 {
        let n = r.random_range(2..=15);
        let d = r.random_range(1..=4);
        let x = random_set(&mut r, n, 2, 1.5);
        let y = random_y(&mut r, n, d);
        let hyper = random_hyper(&mut r);
        let f = objective_full(&y, &x, &hyper).unwrap().value;
        let s = objective_sparse(&y, &x, &x, &hyper).unwrap().value;
        assert!((f - s).abs() <= 1e-6 * f.abs(), "full {f} sparse {s}");
    }
}

#[test]
fn sparse_never_exceeds_full() {
    let mut r = rng(5);
    for _ in 0..50 {
        let n = r.random_range(3..=15);
        let m = r.random_range(1..n);
        let d = r.random_range(1..=4);
        let x = random_set(&mut r, n, 2, 1.5);
        let y = random_y(&mut r, n, d);
        let hyper = random_hyper(&mut r);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut r);
        let z = x.select(&idx[..m]);
        let f = objective_full(&y, &x, &hyper).unwrap().value;
        let s = objective_sparse(&y, &x, &z, &hyper).unwrap().value;
        assert!(s <= f + 1e-6 * f.abs(), "full {f} sparse {s}");
    }
}

#[test]
fn objectives_are_permutation_invariant() {
    let mut r = rng(6);
    let (n, d) = (9, 3);
    let x = random_set(&mut r, n, 2, 1.0);
    let y = random_y(&mut r, n, d);
    let z = x.select(&[0, 4, 7]);
    let hyper = random_hyper(&mut r);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let xp = x.select(&perm);
    let yp = faer::Mat::from_fn(n, d, |i, j| y[(perm[i], j)]);
    let f = objective_full(&y, &x, &hyper).unwrap().value;
    let fp = objective_full(&yp, &xp, &hyper).unwrap().value;
    assert!((f - fp).abs() <= 1e-10 * f.abs());
    let s = objective_sparse(&y, &x, &z, &hyper).unwrap().value;
    let sp = objective_sparse(&yp, &xp, &z, &hyper).unwrap().value;
    assert!((s - sp).abs() <= 1e-10 * s.abs());
}

#[test]
fn repeated_evaluation_is_bit_identical() {
    let mut r = rng(7);
    let x = random_set(&mut r, 12, 2, 1.0);
    let y = random_y(&mut r, 12, 4);
    let hyper = random_hyper(&mut r);
    let a = objective_full(&y, &x, &hyper).unwrap();
    let b = objective_full(&y, &x, &hyper).unwrap();
    assert_eq!(a, b);
    let z = x.select(&[1, 2, 3]);
    assert_eq!(objective_sparse(&y, &x, &z, &hyper).unwrap(), objective_sparse(&y, &x, &z, &hyper).unwrap());
}
