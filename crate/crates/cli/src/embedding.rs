//! Embedding CSV: `index,label,x0,…,xQ,p1,…,pQ[,s1,…,sQ]`.
//!
//! Values are written with 17 significant digits so that reloading
//! reproduces the stored coordinates.

use std::fmt::Write as _;
use std::path::Path;

use hgplvm::lorentz::to_poincare;
use hgplvm::{Latent, LorentzPoint, PointSet};

use crate::error::{CliError, Result};

/// One embedding, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub labels: Vec<usize>,
    pub lorentz: PointSet,
    /// Row-major `N × Q` Poincaré coordinates.
    pub poincare: Vec<f64>,
    /// Row-major `N × Q` variational variances, Bayesian runs only.
    pub variances: Option<Vec<f64>>,
}

impl Embedding {
    pub fn from_latent(latent: &Latent, labels: &[usize]) -> Result<Self> {
        let lorentz = latent.positions();
        if labels.len() != lorentz.len() {
            return Err(CliError::Usage(format!("{} labels for {} points", labels.len(), lorentz.len())));
        }
        let poincare = lorentz.to_points().iter().flat_map(|p| to_poincare(p).coords().to_vec()).collect();
        let variances = match latent {
            Latent::Points(_) => None,
            Latent::Variational(v) => Some(v.iter().flat_map(|s| s.s()).collect()),
        };
        Ok(Self { labels: labels.to_vec(), lorentz, poincare, variances })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lorentz.dim()
    }

    pub fn poincare_row(&self, i: usize) -> &[f64] {
        let q = self.dim();
        &self.poincare[i * q..(i + 1) * q]
    }

    pub fn to_csv(&self) -> String {
        let q = self.dim();
        let mut out = String::from("index,label");
        (0..=q).for_each(|a| write!(out, ",x{a}").unwrap());
        (1..=q).for_each(|a| write!(out, ",p{a}").unwrap());
        if self.variances.is_some() {
            (1..=q).for_each(|a| write!(out, ",s{a}").unwrap());
        }
        out.push('\n');
        for i in 0..self.len() {
            write!(out, "{i},{}", self.labels[i]).unwrap();
            let vars = self.variances.as_ref().map(|v| &v[i * q..(i + 1) * q]).unwrap_or(&[]);
            for v in self.lorentz.row(i).iter().chain(self.poincare_row(i)).chain(vars) {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| CliError::io(path, e))
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, reason: String| CliError::Parse { path: path.to_path_buf(), line, reason };
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| err(1, "empty file".into()))?.split(',').collect();
        if header.len() < 5 || header[0] != "index" || header[1] != "label" {
            return Err(err(1, "header must start with index,label".into()));
        }
        let xs = header.iter().filter(|h| h.starts_with('x')).count();
        if xs < 2 {
            return Err(err(1, "need at least columns x0 and x1".into()));
        }
        let q = xs - 1;
        let with_s = match header.len() - 2 {
            n if n == 2 * q + 1 => false,
            n if n == 3 * q + 1 => true,
            _ => return Err(err(1, format!("unexpected column count {} for dimension {q}", header.len()))),
        };
        let mut labels = Vec::new();
        let mut lorentz = PointSet::new(q);
        let mut poincare = Vec::new();
        let mut variances = Vec::new();
        for (idx, line) in lines.enumerate() {
            let ln = idx + 2;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != header.len() {
                return Err(err(ln, format!("expected {} cells, got {}", header.len(), cells.len())));
            }
            labels.push(cells[1].parse().map_err(|e| err(ln, format!("label: {e}")))?);
            let nums = cells[2..]
                .iter()
                .map(|c| c.parse::<f64>().map_err(|e| err(ln, format!("'{c}': {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            let p = LorentzPoint::from_coords(nums[..=q].to_vec()).map_err(|e| err(ln, e.to_string()))?;
            lorentz.push(&p)?;
            poincare.extend_from_slice(&nums[q + 1..2 * q + 1]);
            if with_s {
                variances.extend_from_slice(&nums[2 * q + 1..]);
            }
        }
        Ok(Self { labels, lorentz, poincare, variances: with_s.then_some(variances) })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}
