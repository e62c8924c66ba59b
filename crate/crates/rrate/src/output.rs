//! CSV writers. Every file has a header row and a fixed column order.
//! Floats use Rust's shortest round-trip formatting; fields that do not apply
//! are left empty.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rrate_core::FrameRecord;

use crate::error::Result;
use crate::experiment::RunSummary;
use crate::probe::ProbeRow;
use crate::report::BoundReport;

pub const TRAJECTORY_HEADER: [&str; 5] = ["frame", "theta", "t", "r", "cum_ratio"];
pub const SUMMARY_HEADER: [&str; 7] = ["checkpoint", "mean_ratio", "gap", "mse", "stderr_ratio", "stderr_mse", "n_paths"];
pub const BOUNDS_HEADER: [&str; 5] = ["checkpoint", "bound_name", "empirical", "bound", "slack"];
pub const RATIO_OF_SUMS_HEADER: [&str; 7] =
    ["checkpoint", "mean_sum_r", "mean_sum_t", "ratio_of_sums", "gap_of_sums", "stderr_ratio_of_sums", "n_paths"];
pub const PROBE_HEADER: [&str; 6] = ["delta", "p", "checkpoint", "gap", "stderr_gap", "theta_star"];
pub const REJECTION_HEADER: [&str; 4] = ["policy", "rejections", "offered_frames", "rejection_rate"];
pub const RATE_HEADER: [&str; 7] = ["metric", "k_min", "k_max", "points", "slope", "intercept", "r_squared"];

pub fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

pub fn write_trajectory(path: &Path, rows: &[FrameRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for f in rows {
        w.write_record([f.frame.to_string(), num(f.theta), num(f.t), num(f.r), num(f.cum_ratio)])?;
    }
    finish(w)
}

pub fn write_summary(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for c in &summary.checkpoints {
        w.write_record([
            c.checkpoint.to_string(),
            num(c.mean_ratio),
            num(c.gap),
            opt(c.mse),
            num(c.stderr_ratio),
            opt(c.stderr_mse),
            c.n_paths.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_ratio_of_sums(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RATIO_OF_SUMS_HEADER)?;
    for c in &summary.checkpoints {
        w.write_record([
            c.checkpoint.to_string(),
            num(c.mean_sum_r),
            num(c.mean_sum_t),
            num(c.ratio_of_sums),
            num(c.gap_of_sums),
            num(c.stderr_ratio_of_sums),
            c.n_paths.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_bounds(path: &Path, report: &BoundReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(BOUNDS_HEADER)?;
    for r in &report.rows {
        w.write_record([r.checkpoint.to_string(), r.kind.name().to_string(), num(r.empirical), num(r.bound), num(r.slack)])?;
    }
    finish(w)
}

/// One row per path, one column per policy.
pub fn write_final_ratios(path: &Path, summaries: &[&RunSummary]) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["path".to_string()];
    header.extend(summaries.iter().map(|s| s.policy.name().to_string()));
    w.write_record(&header)?;
    let n = summaries.first().map_or(0, |s| s.final_ratios.len());
    for i in 0..n {
        let mut row = vec![i.to_string()];
        row.extend(summaries.iter().map(|s| num(s.final_ratios[i])));
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn write_rejections(path: &Path, summaries: &[&RunSummary]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(REJECTION_HEADER)?;
    for s in summaries {
        w.write_record([s.policy.name().to_string(), s.rejections.to_string(), s.offered.to_string(), opt(s.rejection_rate)])?;
    }
    finish(w)
}

pub fn write_probe(path: &Path, rows: &[ProbeRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(PROBE_HEADER)?;
    for r in rows {
        w.write_record([num(r.delta), num(r.p), r.checkpoint.to_string(), num(r.gap), num(r.stderr_gap), num(r.theta_star)])?;
    }
    finish(w)
}

pub struct RateRow<'a> {
    pub metric: &'a str,
    pub k_min: usize,
    pub k_max: usize,
    pub fit: rrate_core::stats::LogLogFit,
}

pub fn write_rates(path: &Path, rows: &[RateRow<'_>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.metric.to_string(),
            r.k_min.to_string(),
            r.k_max.to_string(),
            r.fit.points.to_string(),
            num(r.fit.slope),
            num(r.fit.intercept),
            num(r.fit.r_squared),
        ])?;
    }
    finish(w)
}
