//! Synthetic datasets: the noisy binary tree and the linearly embedded
//! spirals.
//!
//! Tree nodes are numbered in heap order: the root is 0 and node `i` has
//! children `2i + 1` and `2i + 2`.

use std::f64::consts::PI;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};

/// Noisy binary-tree dataset parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SbtSpec {
    pub depth: usize,
    pub samples_per_node: usize,
    pub flip_prob: f64,
    pub seed: u64,
}

impl SbtSpec {
    pub fn new(depth: usize, seed: u64) -> Self {
        Self { depth, samples_per_node: 20, flip_prob: 0.1, seed }
    }
}

/// Spiral dataset parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSpec {
    pub n_spirals: usize,
    pub points_per_spiral: usize,
    pub ambient_dim: usize,
    /// Standard deviation of the radius-proportional oscillation.
    pub noise: f64,
    /// Angular rate `ω`: the angle advances by `ω r` along each arm.
    pub angular_rate: f64,
    pub seed: u64,
}

impl SpiralSpec {
    pub fn new(seed: u64) -> Self {
        Self { n_spirals: 10, points_per_spiral: 80, ambient_dim: 20, noise: 0.05, angular_rate: 3.0 * PI, seed }
    }
}

/// Observations with their labels and, for tree data, the node structure.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// `N × D` observations.
    pub y: Mat<f64>,
    /// Node (tree) or arm (spiral) index per row.
    pub labels: Vec<usize>,
    /// Clean binary code per node; empty for non-tree data.
    pub node_codes: Vec<Vec<u8>>,
    /// Depth per node, root at depth 0; empty for non-tree data.
    pub depth_of_node: Vec<usize>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn d(&self) -> usize {
        self.y.ncols()
    }

    /// Clean code of each sample's node, one row per sample.
    pub fn sample_codes(&self) -> Option<Vec<&[u8]>> {
        if self.node_codes.is_empty() {
            return None;
        }
        Some(self.labels.iter().map(|&l| self.node_codes[l].as_slice()).collect())
    }
}

pub fn node_depth(i: usize) -> usize {
    (usize::BITS - 1 - (i + 1).leading_zeros()) as usize
}

/// Number of edges between two heap-ordered tree nodes.
pub fn tree_distance(mut a: usize, mut b: usize) -> usize {
    let mut steps = 0;
    while a != b {
        if a > b {
            a = (a - 1) / 2;
        } else {
            b = (b - 1) / 2;
        }
        steps += 1;
    }
    steps
}

/// Path-indicator codes: bit `j` of node `i` is set iff `j` lies on the path
/// from the root to `i`. Hamming distance between codes equals tree distance.
pub fn sbt_codes(depth: usize) -> Result<Vec<Vec<u8>>> {
    if !(2..=20).contains(&depth) {
        return Err(Error::Parameter { name: "depth", reason: format!("must lie in 2..=20, got {depth}") });
    }
    let nodes = (1usize << depth) - 1;
    let mut codes = vec![vec![0u8; nodes]; nodes];
    for (i, code) in codes.iter_mut().enumerate() {
        let mut a = i;
        loop {
            code[a] = 1;
            if a == 0 {
                break;
            }
            a = (a - 1) / 2;
        }
    }
    Ok(codes)
}

/// `samples_per_node` noisy copies of every node code, bits flipped
/// independently with probability `flip_prob`.
pub fn sbt_dataset(spec: &SbtSpec) -> Result<Dataset> {
    if !(0.0..0.5).contains(&spec.flip_prob) {
        return Err(Error::Parameter { name: "flip_prob", reason: format!("must lie in [0, 0.5), got {}", spec.flip_prob) });
    }
    if spec.samples_per_node == 0 {
        return Err(Error::Parameter { name: "samples_per_node", reason: "must be positive".into() });
    }
    let codes = sbt_codes(spec.depth)?;
    let nodes = codes.len();
    let n = nodes * spec.samples_per_node;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut y = Mat::zeros(n, nodes);
    let mut labels = Vec::with_capacity(n);
    for (node, code) in codes.iter().enumerate() {
        for s in 0..spec.samples_per_node {
            let row = node * spec.samples_per_node + s;
            for (j, &bit) in code.iter().enumerate() {
                let flip = spec.flip_prob > 0.0 && rng.random_bool(spec.flip_prob);
                y[(row, j)] = f64::from(bit ^ u8::from(flip));
            }
            labels.push(node);
        }
    }
    Ok(Dataset { y, labels, depth_of_node: (0..nodes).map(node_depth).collect(), node_codes: codes })
}

/// Noisy planar spirals pushed through a random linear map into
/// `ambient_dim` dimensions.
pub fn spiral_dataset(spec: &SpiralSpec) -> Result<Dataset> {
    if spec.n_spirals == 0 || spec.points_per_spiral == 0 || spec.ambient_dim == 0 {
        return Err(Error::Parameter { name: "spiral", reason: "counts must be positive".into() });
    }
    let normal = Normal::new(0.0, spec.noise)
        .map_err(|e| Error::Parameter { name: "noise", reason: e.to_string() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_spirals * spec.points_per_spiral;
    let mut plane = Mat::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for arm in 0..spec.n_spirals {
        let start = 2.0 * PI * arm as f64 / spec.n_spirals as f64;
        for t in 0..spec.points_per_spiral {
            let r = t as f64 / spec.points_per_spiral as f64;
            let theta = start + spec.angular_rate * r;
            let row = arm * spec.points_per_spiral + t;
            let (e0, e1): (f64, f64) = (normal.sample(&mut rng), normal.sample(&mut rng));
            plane[(row, 0)] = r * theta.cos() + r * e0;
            plane[(row, 1)] = r * theta.sin() + r * e1;
            labels.push(arm);
        }
    }
    let proj = Mat::from_fn(2, spec.ambient_dim, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
    Ok(Dataset { y: &plane * &proj, labels, node_codes: Vec::new(), depth_of_node: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_codes() {
        let c = sbt_codes(2).unwrap();
        assert_eq!(c, vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]);
        assert!(sbt_codes(1).is_err());
    }

    #[test]
    fn depth_and_tree_distance() {
        assert_eq!((0..7).map(node_depth).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 2, 2]);
        assert_eq!(tree_distance(3, 4), 2);
        assert_eq!(tree_distance(3, 6), 4);
        assert_eq!(tree_distance(5, 5), 0);
        assert_eq!(tree_distance(0, 6), 2);
    }

    #[test]
    fn noiseless_samples_equal_codes() {
        let spec = SbtSpec { depth: 3, samples_per_node: 2, flip_prob: 0.0, seed: 1 };
        let ds = sbt_dataset(&spec).unwrap();
        for (row, &l) in ds.labels.iter().enumerate() {
            for j in 0..7 {
                assert_eq!(ds.y[(row, j)], f64::from(ds.node_codes[l][j]));
            }
        }
    }

    #[test]
    fn flips_are_seeded() {
        let a = sbt_dataset(&SbtSpec::new(3, 5)).unwrap();
        let b = sbt_dataset(&SbtSpec::new(3, 5)).unwrap();
        let c = sbt_dataset(&SbtSpec::new(3, 6)).unwrap();
        assert_eq!(a.y, b.y);
        assert_ne!(a.y, c.y);
        assert!(sbt_dataset(&SbtSpec { flip_prob: 0.5, ..SbtSpec::new(3, 0) }).is_err());
    }

    #[test]
    fn spiral_arms_start_at_origin_before_projection() {
        let ds = spiral_dataset(&SpiralSpec { n_spirals: 3, points_per_spiral: 5, ..SpiralSpec::new(2) }).unwrap();
        assert_eq!((ds.n(), ds.d()), (15, 20));
        for arm in 0..3 {
            assert!((0..20).all(|j| ds.y[(arm * 5, j)] == 0.0));
        }
        assert!(ds.sample_codes().is_none());
    }
}
