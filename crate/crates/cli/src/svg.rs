//! Static Poincaré-disk scatter plots.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::embedding::Embedding;
use crate::error::{CliError, Result};

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#ad494a",
];

const DISK: f64 = 300.0;
const MARGIN: f64 = 20.0;
const LEGEND_W: f64 = 140.0;
const ROW_H: f64 = 16.0;

pub fn label_color(label: usize) -> &'static str {
    PALETTE[label % PALETTE.len()]
}

/// SVG document: unit-circle boundary, one mark per point, legend.
pub fn render(emb: &Embedding) -> Result<String> {
    if emb.dim() != 2 {
        return Err(CliError::UnsupportedDimension(emb.dim()));
    }
    let labels: BTreeSet<usize> = emb.labels.iter().copied().collect();
    let c = MARGIN + DISK;
    let width = 2.0 * c + LEGEND_W;
    let height = (2.0 * c).max(2.0 * MARGIN + ROW_H * labels.len() as f64);
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<circle class="boundary" cx="{c:.1}" cy="{c:.1}" r="{DISK:.1}" fill="none" stroke="black" stroke-width="1.5"/>"#)
        .unwrap();
    writeln!(s, r#"<g class="marks" stroke="none" fill-opacity="0.8">"#).unwrap();
    for (i, &label) in emb.labels.iter().enumerate() {
        let p = emb.poincare_row(i);
        // screen y grows downward
        let (x, y) = (c + DISK * p[0], c - DISK * p[1]);
        writeln!(s, r#"<circle class="mark" cx="{x:.3}" cy="{y:.3}" r="3" fill="{}"/>"#, label_color(label)).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="12">"#).unwrap();
    let lx = 2.0 * c + 10.0;
    for (row, label) in labels.iter().enumerate() {
        let y = MARGIN + ROW_H * row as f64;
        writeln!(s, r#"<rect x="{lx:.1}" y="{y:.1}" width="10" height="10" fill="{}"/>"#, label_color(*label)).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}">{label}</text>"#, lx + 16.0, y + 10.0).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

pub fn render_to(emb: &Embedding, path: &Path) -> Result<()> {
    std::fs::write(path, render(emb)?).map_err(|e| CliError::io(path, e))
}
