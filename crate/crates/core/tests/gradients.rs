//! Analytic gradients against central finite differences.

mod common;

use common::*;
use hgplvm::kernel::PointSet;
use hgplvm::lorentz::lift;
use hgplvm::objective::{objective_bayesian, objective_full, objective_sparse, Hyper};
use hgplvm::{HeKernel, VariationalState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const H: f64 = 1e-5;

fn random_hyper(rng: &mut ChaCha8Rng) -> Hyper {
    Hyper::new(rng.random_range(0.5..2.0), rng.random_range(0.5..3.0), rng.random_range(1.0..20.0)).unwrap()
}

fn point_grad_check(eval: impl Fn(&PointSet, &Hyper) -> hgplvm::ObjectiveEval, x: &PointSet, hyper: &Hyper) -> (f64, f64, f64) {
    let e = eval(x, hyper);
    let q = x.dim();
    let mut analytic = Vec::new();
    let mut fd = Vec::new();
    for i in 0..x.len() {
        analytic.extend(spatial_from_ambient(x.row(i), e.latent_row(i, q)));
        for k in 0..q {
            fd.push(central(|h| eval(&nudge(x, i, k, h), hyper).value, H));
        }
    }
    let ls = hyper.sigma().ln();
    let fd_sigma = central(
        |h| {
            let hy = Hyper { kernel: HeKernel::new((ls + h).exp(), hyper.kernel.kappa()).unwrap(), ..*hyper };
            eval(x, &hy).value
        },
        H,
    );
    let lb = hyper.beta.ln();
    let fd_beta = central(|h| eval(x, &Hyper { beta: (lb + h).exp(), ..*hyper }).value, H);
    (
        rel_err(&analytic, &fd),
        rel_err(&[e.dlog_sigma], &[fd_sigma]),
        rel_err(&[e.dlog_beta], &[fd_beta]),
    )
}

#[test]
fn kernel_point_gradient_matches_finite_differences() {
    let mut r = rng(11);
    for _ in 0..50 {
        let k = HeKernel::new(r.random_range(0.5..2.0), r.random_range(0.3..5.0)).unwrap();
        let pts = random_points(&mut r, 2, 2, 2.0);
        let g = spatial_from_ambient(pts[0].coords(), &k.grad_point(&pts[0], &pts[1]));
        let fd: Vec<f64> = (0..2)
            .map(|q| {
                central(
                    |h| {
                        let mut s = pts[0].spatial().to_vec();
                        s[q] += h;
                        k.eval(&lift(&s).unwrap(), &pts[1])
                    },
                    1e-6,
                )
            })
            .collect();
        assert!(rel_err(&g, &fd) < 1e-5, "{g:?} vs {fd:?}");
    }
}

#[test]
fn full_objective_gradients() {
    let mut r = rng(1);
    for _ in 0..20 {
        let n = r.random_range(2..=20);
        let d = r.random_range(1..=4);
        let x = random_set(&mut r, n, 2, 1.5);
        let y = random_y(&mut r, n, d);
        let hyper = random_hyper(&mut r);
        let (lat, sig, bet) = point_grad_check(|x, h| objective_full(&y, x, h).unwrap(), &x, &hyper);
        assert!(lat < 1e-4 && sig < 1e-4 && bet < 1e-4, "latent {lat:e} sigma {sig:e} beta {bet:e}");
    }
}

#[test]
fn sparse_objective_gradients() {
    let mut r = rng(2);
    for _ in 0..20 {
        let n = r.random_range(5..=20);
        let m = r.random_range(1..=5);
        let d = r.random_range(1..=4);
        let x = random_set(&mut r, n, 2, 1.5);
        let z = random_set(&mut r, m, 2, 1.5);
        let y = random_y(&mut r, n, d);
        let hyper = random_hyper(&mut r);
        let (lat, sig, bet) = point_grad_check(|x, h| objective_sparse(&y, x, &z, h).unwrap(), &x, &hyper);
        assert!(lat < 1e-4 && sig < 1e-4 && bet < 1e-4, "latent {lat:e} sigma {sig:e} beta {bet:e}");
    }
}

#[test]
fn bayesian_objective_gradients() {
    let mut r = rng(3);
    for _ in 0..20 {
        let n = r.random_range(3..=12);
        let m = r.random_range(1..=5);
        let d = r.random_range(1..=4);
        let hs = r.random_range(1..=4);
        let mus = random_points(&mut r, n, 2, 1.5);
        let states: Vec<VariationalState> = mus
            .into_iter()
            .map(|mu| VariationalState::new(mu, &[r.random_range(0.01..0.5), r.random_range(0.01..0.5)]).unwrap())
            .collect();
        let z = random_set(&mut r, m, 2, 1.5);
        let y = random_y(&mut r, n, d);
        let zeta: Vec<f64> = (0..n * hs * 2).map(|_| r.sample(StandardNormal)).collect();
        let hyper = random_hyper(&mut r);
        let eval = |st: &[VariationalState], h: &Hyper| objective_bayesian(&y, st, &z, &zeta, h).unwrap();
        let e = eval(&states, &hyper);

        let mut an_mu = Vec::new();
        let mut fd_mu = Vec::new();
        let mut an_s = Vec::new();
        let mut fd_s = Vec::new();
        for i in 0..n {
            an_mu.extend(spatial_from_ambient(states[i].mu.coords(), e.latent_row(i, 2)));
            an_s.extend_from_slice(&e.log_s_grad[2 * i..2 * i + 2]);
            for q in 0..2 {
                fd_mu.push(central(
                    |h| {
                        let mut st = states.clone();
                        let mut s = st[i].mu.spatial().to_vec();
                        s[q] += h;
                        st[i].mu = lift(&s).unwrap();
                        eval(&st, &hyper).value
                    },
                    H,
                ));
                fd_s.push(central(
                    |h| {
                        let mut st = states.clone();
                        let mut ls = st[i].log_s().to_vec();
                        ls[q] += h;
                        st[i] = VariationalState::from_log_s(st[i].mu.clone(), ls).unwrap();
                        eval(&st, &hyper).value
                    },
                    H,
                ));
            }
        }
        let ls = hyper.sigma().ln();
        let fd_sigma = central(
            |h| eval(&states, &Hyper { kernel: HeKernel::new((ls + h).exp(), hyper.kernel.kappa()).unwrap(), ..hyper }).value,
            H,
        );
        let lb = hyper.beta.ln();
        let fd_beta = central(|h| eval(&states, &Hyper { beta: (lb + h).exp(), ..hyper }).value, H);
        let errs = [
            rel_err(&an_mu, &fd_mu),
            rel_err(&an_s, &fd_s),
            rel_err(&[e.dlog_sigma], &[fd_sigma]),
            rel_err(&[e.dlog_beta], &[fd_beta]),
        ];
        assert!(errs.iter().all(|&v| v < 1e-3), "mu, log s, sigma, beta: {errs:?}");
    }
}
