//! Embedding quality metrics.
//!
//! Pairwise distances are kept in condensed form: the strict upper triangle
//! of the `N × N` distance matrix, row by row. Neighbour ranks break ties by
//! point index.

use std::str::FromStr;

use faer::Mat;

use crate::error::{Error, Result};
use crate::kernel::PointSet;
use crate::lorentz::distance_raw;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Hyperbolic,
    Euclidean,
    Hamming,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(Metric::Hyperbolic),
            "euclidean" => Ok(Metric::Euclidean),
            "hamming" => Ok(Metric::Hamming),
            other => Err(Error::Argument(format!("unknown metric '{other}'"))),
        }
    }
}

/// Condensed pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector {
    pub values: Vec<f64>,
    pub metric: Metric,
    n: usize,
}

impl DistanceVector {
    /// Wraps condensed values; the length must be `N(N−1)/2` for some `N ≥ 2`.
    pub fn new(values: Vec<f64>, metric: Metric) -> Result<Self> {
        let len = values.len();
        let n = ((1.0 + (1.0 + 8.0 * len as f64).sqrt()) / 2.0).round() as usize;
        if n < 2 || n * (n - 1) / 2 != len {
            return Err(Error::Argument(format!("{len} is not a condensed distance length")));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Argument("distances must be finite and non-negative".into()));
        }
        Ok(Self { values, metric, n })
    }

    fn build(n: usize, metric: Metric, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("pairwise distances need at least two points".into()));
        }
        let mut values = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                values.push(f(i, j));
            }
        }
        Ok(Self { values, metric, n })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[a * (2 * self.n - a - 1) / 2 + (b - a - 1)]
    }

    /// For each point, the other points sorted by distance then index.
    fn neighbour_orders(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                let mut others: Vec<usize> = (0..self.n).filter(|&j| j != i).collect();
                others.sort_by(|&a, &b| self.get(i, a).total_cmp(&self.get(i, b)).then(a.cmp(&b)));
                others
            })
            .collect()
    }
}

pub fn pairwise_hyperbolic(points: &PointSet) -> Result<DistanceVector> {
    DistanceVector::build(points.len(), Metric::Hyperbolic, |i, j| distance_raw(points.row(i), points.row(j)))
}

/// Euclidean distances between the rows of `y`.
pub fn pairwise_euclidean(y: &Mat<f64>) -> Result<DistanceVector> {
    let rows: Vec<Vec<f64>> = (0..y.nrows()).map(|i| (0..y.ncols()).map(|j| y[(i, j)]).collect()).collect();
    DistanceVector::build(rows.len(), Metric::Euclidean, |i, j| {
        rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    })
}

pub fn pairwise_hamming<C: AsRef<[u8]>>(codes: &[C]) -> Result<DistanceVector> {
    if let Some(first) = codes.first() {
        let len = first.as_ref().len();
        if codes.iter().any(|c| c.as_ref().len() != len) {
            return Err(Error::Argument("codes must share one length".into()));
        }
    }
    DistanceVector::build(codes.len(), Metric::Hamming, |i, j| {
        codes[i].as_ref().iter().zip(codes[j].as_ref()).filter(|(a, b)| a != b).count() as f64
    })
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), got: b.len() });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("a distance vector has zero variance"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation between two condensed distance vectors.
pub fn distance_correlation(latent: &DistanceVector, observed: &DistanceVector) -> Result<f64> {
    pearson(&latent.values, &observed.values)
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman correlation of the two condensed distance vectors.
pub fn shepard_goodness(observed: &DistanceVector, latent: &DistanceVector) -> Result<f64> {
    if observed.n < 3 {
        return Err(Error::Argument("Shepard goodness needs at least three points".into()));
    }
    pearson(&average_ranks(&observed.values), &average_ranks(&latent.values))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k >= n.saturating_sub(1) {
        return Err(Error::Argument(format!("k must satisfy 1 <= k < (N-1)/2, got k={k}, N={n}")));
    }
    Ok(())
}

/// Penalizes points that are neighbours in `near` but far in `rank_in`.
fn rank_penalty(near: &DistanceVector, rank_in: &DistanceVector, k: usize) -> Result<f64> {
    let n = near.n;
    if rank_in.n != n {
        return Err(Error::Dimension { expected: n, got: rank_in.n });
    }
    check_k(n, k)?;
    let near_orders = near.neighbour_orders();
    let rank_orders = rank_in.neighbour_orders();
    let mut total = 0usize;
    let mut rank = vec![0usize; n];
    for i in 0..n {
        for (r, &j) in rank_orders[i].iter().enumerate() {
            rank[j] = r + 1;
        }
        total += near_orders[i][..k].iter().map(|&j| rank[j].saturating_sub(k)).sum::<usize>();
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(1.0 - 2.0 / (nf * kf * (2.0 * nf - 3.0 * kf - 1.0)) * total as f64)
}

/// Trustworthiness from precomputed distances: latent neighbours ranked in
/// the observed space.
pub fn trustworthiness_from(observed: &DistanceVector, latent: &DistanceVector, k: usize) -> Result<f64> {
    rank_penalty(latent, observed, k)
}

/// Continuity from precomputed distances: observed neighbours ranked in the
/// latent space.
pub fn continuity_from(observed: &DistanceVector, latent: &DistanceVector, k: usize) -> Result<f64> {
    rank_penalty(observed, latent, k)
}

/// Trustworthiness with Euclidean observed distances and hyperbolic latent
/// distances.
pub fn trustworthiness(observed: &Mat<f64>, latent: &PointSet, k: usize) -> Result<f64> {
    trustworthiness_from(&pairwise_euclidean(observed)?, &pairwise_hyperbolic(latent)?, k)
}

pub fn continuity(observed: &Mat<f64>, latent: &PointSet, k: usize) -> Result<f64> {
    continuity_from(&pairwise_euclidean(observed)?, &pairwise_hyperbolic(latent)?, k)
}

/// Leave-one-out k-nearest-neighbour label accuracy. Majority ties go to the
/// tied label whose member is nearest.
pub fn knn_accuracy_from(latent: &DistanceVector, labels: &[usize], k: usize) -> Result<f64> {
    let n = latent.n;
    if labels.len() != n {
        return Err(Error::Dimension { expected: n, got: labels.len() });
    }
    if k == 0 || k >= n {
        return Err(Error::Argument(format!("k must satisfy 1 <= k < N, got k={k}, N={n}")));
    }
    let orders = latent.neighbour_orders();
    let mut hits = 0usize;
    for (i, order) in orders.iter().enumerate() {
        let neigh = &order[..k];
        let count = |l: usize| neigh.iter().filter(|&&j| labels[j] == l).count();
        let best = neigh.iter().map(|&j| count(labels[j])).max().unwrap_or(0);
        let winner = neigh.iter().map(|&j| labels[j]).find(|&l| count(l) == best);
        if winner == Some(labels[i]) {
            hits += 1;
        }
    }
    Ok(hits as f64 / n as f64)
}

pub fn knn_accuracy(latent: &PointSet, labels: &[usize], k: usize) -> Result<f64> {
    knn_accuracy_from(&pairwise_hyperbolic(latent)?, labels, k)
}
