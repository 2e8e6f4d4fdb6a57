//! Reproducible experiments E0–E9 with machine-readable reports.

mod config;
mod report;
mod runs;

pub use config::{ExperimentConfig, ExperimentId};
pub use report::{Criterion, ExperimentReport, Tolerance};

use crate::error::Result;
use std::time::Instant;

/// Runs one experiment, writes its artifacts and `report.json` when an
/// output directory is configured, and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut ctx = runs::Ctx::new(config);
    runs::dispatch(&mut ctx)?;
    let runtime_s = start.elapsed().as_secs_f64();
    let mut criteria = ctx.criteria;
    criteria.push(Criterion::new(
        "runtime (s)",
        runtime_s,
        Tolerance::AtMost { bound: config.id.runtime_limit() },
    ));
    let mut artifacts = ctx.artifacts;
    let pass = criteria.iter().all(|c| c.pass);
    let mut report = ExperimentReport {
        id: config.id,
        title: config.id.title().to_string(),
        inputs: config.inputs(),
        criteria,
        runtime_s,
        artifacts: Vec::new(),
        pass,
    };
    if let Some(dir) = &config.output {
        std::fs::create_dir_all(dir)?;
        artifacts.push("report.json".into());
        report.artifacts = artifacts;
        std::fs::write(dir.join("report.json"), report.to_json())?;
    } else {
        report.artifacts = artifacts;
    }
    Ok(report)
}
