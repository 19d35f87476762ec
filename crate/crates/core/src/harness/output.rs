//! CSV traces and PGM images.

use std::fmt::Write as _;
use std::path::Path;

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::grid::Grid;

pub const METRICS_HEADER: &str = "n,i_n,residual_norm,mu_tilde,mu,eps_n,inner_iterations,rel_error,q_n";

pub const TRACE_HEADER: &str =
    "n,i_n,residual_norm,mu_tilde,mu,eps_n,inner_iterations,inner_gap_rel,q_n,discrepancy,rel_error,bregman_to_truth";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Every `every`-th record plus the last one.
pub fn metrics_csv(trace: &RunTrace, every: usize) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    let last = trace.records.len().saturating_sub(1);
    for (k, r) in trace.records.iter().enumerate() {
        if k % every.max(1) != 0 && k != last {
            continue;
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.i_n,
            r.residual_norm,
            r.mu_tilde,
            r.mu,
            r.eps_n,
            r.inner_iterations,
            opt(r.rel_error),
            r.q_n
        );
    }
    out
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.i_n,
            r.residual_norm,
            r.mu_tilde,
            r.mu,
            r.eps_n,
            r.inner_iterations,
            r.inner_gap_rel,
            r.q_n,
            u8::from(r.discrepancy),
            opt(r.rel_error),
            opt(r.bregman_to_truth)
        );
    }
    out
}

pub fn emit_metrics(path: &Path, trace: &RunTrace, every: usize) -> Result<()> {
    std::fs::write(path, metrics_csv(trace, every)).map_err(|e| Error::io(path, e))
}

pub fn emit_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    std::fs::write(path, trace_csv(trace)).map_err(|e| Error::io(path, e))
}

/// Binary 8-bit PGM, min-max scaled; a constant image maps to 0.
pub fn pgm_bytes(image: &Grid) -> Vec<u8> {
    let (rows, cols) = image.shape();
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    let (lo, hi) = (image.min_value(), image.max_value());
    let span = hi - lo;
    out.extend(image.iter().map(|&v| {
        if span > 0.0 && span.is_finite() {
            (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

pub fn emit_image(path: &Path, image: &Grid) -> Result<()> {
    std::fs::write(path, pgm_bytes(image)).map_err(|e| Error::io(path, e))
}
