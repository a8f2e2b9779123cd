mod common;

use std::f64::consts::PI;

use common::{central, rng};
use hgplvm::lorentz::{exp_map, lift, parallel_transport};
use hgplvm::wrapped::{kl_mc, reparam_grads, wg_log_density, wg_sample};
use hgplvm::{LorentzPoint, TangentVector, VariationalState};
use rand::Rng;
use rand_distr::StandardNormal;

fn draws(seed: u64, h: usize, q: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..h).map(|_| (0..q).map(|_| r.sample::<f64, _>(StandardNormal)).collect()).collect()
}

#[test]
fn kl_of_prior_against_itself_vanishes() {
    let st = VariationalState::new(LorentzPoint::origin(2), &[1.0, 1.0]).unwrap();
    let samples: Vec<_> = draws(1, 10_000, 2).iter().map(|z| wg_sample(&st, z).unwrap()).collect();
    let est = kl_mc(&st, &samples).unwrap();
    assert!(est.mean.abs() <= 3.0 * est.std_err + 1e-12, "{est:?}");
}

#[test]
fn small_variance_kl_matches_gaussian_closed_form() {
    let s = [2e-3, 5e-4];
    let st = VariationalState::new(LorentzPoint::origin(2), &s).unwrap();
    let samples: Vec<_> = draws(2, 10_000, 2).iter().map(|z| wg_sample(&st, z).unwrap()).collect();
    let est = kl_mc(&st, &samples).unwrap();
    let exact = 0.5 * s.iter().map(|v| v - 1.0 - v.ln()).sum::<f64>();
    assert!((est.mean - exact).abs() <= 3.0 * est.std_err, "{} vs {exact} (se {})", est.mean, est.std_err);
}

#[test]
fn sampler_is_bit_deterministic() {
    let st = VariationalState::new(lift(&[0.8, -1.1]).unwrap(), &[0.3, 0.05]).unwrap();
    for z in draws(3, 50, 2) {
        let a = wg_sample(&st, &z).unwrap();
        let b = wg_sample(&st, &z).unwrap();
        assert_eq!(a.x.coords(), b.x.coords());
    }
    assert_eq!(draws(4, 10, 2), draws(4, 10, 2));
}

#[test]
fn density_integrates_to_one_in_geodesic_polar_coordinates() {
    // volume element around μ is sinh(r) dr dθ; the tangent frame at μ is
    // the origin frame carried over by parallel transport
    let mu = lift(&[0.6, -0.9]).unwrap();
    let st = VariationalState::new(mu.clone(), &[0.4, 0.1]).unwrap();
    let o = LorentzPoint::origin(2);
    let (nr, nt, r_max) = (800usize, 256usize, 6.0);
    let hr = r_max / nr as f64;
    let ht = 2.0 * PI / nt as f64;
    let mut total = 0.0;
    for i in 0..=nr {
        let r = i as f64 * hr;
        let w = if i == 0 || i == nr { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let mut ring = 0.0;
        for j in 0..nt {
            let t = j as f64 * ht;
            let v0 = TangentVector::at_origin(&[r * t.cos(), r * t.sin()]);
            let u = parallel_transport(&o, &mu, &v0).unwrap();
            let x = exp_map(&mu, &u).unwrap();
            ring += wg_log_density(&st, &x).unwrap().exp() * r.sinh() * ht;
        }
        total += w * hr / 3.0 * ring;
    }
    assert!((total - 1.0).abs() < 1e-6, "mass {total}");
}

#[test]
fn variance_jacobian_matches_finite_differences() {
    let mu = lift(&[-0.4, 0.7]).unwrap();
    let s = [0.2, 0.6];
    let zeta = [0.9, -1.3];
    let st = VariationalState::new(mu.clone(), &s).unwrap();
    let g = reparam_grads(&st, &wg_sample(&st, &zeta).unwrap());
    for q in 0..2 {
        for a in 0..3 {
            let fd = central(
                |h| {
                    let mut sp = s;
                    sp[q] += h;
                    let st = VariationalState::new(mu.clone(), &sp).unwrap();
                    wg_sample(&st, &zeta).unwrap().x.coords()[a]
                },
                1e-6,
            );
            assert!((g.dx_ds[(a, q)] - fd).abs() < 1e-6 * (1.0 + fd.abs()), "a={a} q={q}: {} vs {fd}", g.dx_ds[(a, q)]);
        }
    }
}

#[test]
fn mean_jacobian_matches_finite_differences_along_the_manifold() {
    let m = [0.5, 0.3];
    let s = [0.3, 0.1];
    let zeta = [-0.7, 1.1];
    let mu = lift(&m).unwrap();
    let st = VariationalState::new(mu.clone(), &s).unwrap();
    let g = reparam_grads(&st, &wg_sample(&st, &zeta).unwrap());
    for q in 0..2 {
        for a in 0..3 {
            // μ₀ follows the spatial coordinates
            let chain = g.dx_dmu[(a, q + 1)] + g.dx_dmu[(a, 0)] * m[q] / mu.time();
            let fd = central(
                |h| {
                    let mut mp = m;
                    mp[q] += h;
                    let st = VariationalState::new(lift(&mp).unwrap(), &s).unwrap();
                    wg_sample(&st, &zeta).unwrap().x.coords()[a]
                },
                1e-6,
            );
            assert!((chain - fd).abs() < 1e-6 * (1.0 + fd.abs()), "a={a} q={q}: {chain} vs {fd}");
        }
    }
}
