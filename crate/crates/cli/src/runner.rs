//! Single runs and seeded batches.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use so3_track::analysis::{format_real, ConvergenceReport};
use so3_track::integrator::{simulate, TrajectoryRecord};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{report_text, trajectory_csv, write_atomic};
use crate::plot::render_svg;

pub const SUMMARY_HEADER: &str =
    "seed,theta0,convergence_time,fitted_rate,singularity_hit,theta_monotone,status";

/// Simulates and analyses `config` without touching the file system.
pub fn execute(config: &RunConfig) -> Result<(Vec<TrajectoryRecord>, ConvergenceReport), CliError> {
    config.validate()?;
    let records = simulate(&config.sim)?;
    let report = ConvergenceReport::from_records(&records, &config.analysis);
    Ok((records, report))
}

/// Runs `config` and writes the trajectory CSV, the report and optionally
/// an SVG plot. Nothing is written if the simulation fails.
pub fn run(
    config: &RunConfig,
    csv: &Path,
    report: &Path,
    plot: Option<&Path>,
) -> Result<ConvergenceReport, CliError> {
    let (records, summary) = execute(config)?;
    write_atomic(csv, &trajectory_csv(&records))?;
    write_atomic(report, &report_text(&summary))?;
    if let Some(plot) = plot {
        write_atomic(plot, &render_svg(&records, config.sim.controller.law))?;
    }
    Ok(summary)
}

#[derive(Debug)]
pub struct BatchRow {
    pub seed: u64,
    pub outcome: Result<ConvergenceReport, CliError>,
}

impl BatchRow {
    fn csv_line(&self) -> String {
        match &self.outcome {
            Ok(r) => format!(
                "{},{},{},{},{},{},ok",
                self.seed,
                format_real(r.theta0),
                r.convergence_time.map_or("none".into(), format_real),
                r.fitted_rate.map_or("n/a".into(), format_real),
                u8::from(r.singularity_hit),
                u8::from(r.theta_monotone),
            ),
            Err(e) => {
                let status = match e {
                    CliError::Singularity(_) => "singularity",
                    CliError::Io { .. } => "io_error",
                    _ => "error",
                };
                let singular = u8::from(matches!(e, CliError::Singularity(_)));
                format!("{},nan,none,n/a,{singular},0,{status}", self.seed)
            }
        }
    }
}

#[derive(Debug)]
pub struct BatchSummary {
    /// One row per seed, in seed order.
    pub rows: Vec<BatchRow>,
}

impl BatchSummary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// True when every run finished and none had θ increase.
    pub fn theta_monotone(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(&r.outcome, Ok(rep) if rep.theta_monotone))
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn aggregate(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "runs = {}", self.rows.len());
        let _ = writeln!(out, "failed = {}", self.failures());
        let _ = writeln!(
            out,
            "theta_monotone = {}",
            if self.theta_monotone() { "pass" } else { "fail" }
        );
        out
    }
}

pub fn run_file_stem(out_dir: &Path, seed: u64) -> PathBuf {
    out_dir.join(format!("run_{seed}"))
}

/// Runs seeds `seed_base .. seed_base + n_runs` of `template`, possibly in
/// parallel. Each run writes `run_<seed>.csv` and `run_<seed>.report` into
/// `out_dir`; the batch writes `summary.csv` and `summary.report`.
///
/// A failed run is recorded in its row and does not stop the others.
pub fn batch(
    template: &RunConfig,
    n_runs: u64,
    seed_base: u64,
    out_dir: &Path,
) -> Result<BatchSummary, CliError> {
    if n_runs == 0 {
        return Err(crate::error::ConfigError::Validation("batch needs at least one run".into()).into());
    }
    let last = seed_base.checked_add(n_runs - 1).ok_or_else(|| {
        crate::error::ConfigError::Validation("seed range overflows u64".into())
    })?;
    template.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let rows: Vec<BatchRow> = (seed_base..=last)
        .into_par_iter()
        .map(|seed| {
            let outcome = (|| {
                let mut config = template.clone();
                config.set_seed(seed)?;
                let stem = run_file_stem(out_dir, seed);
                run(
                    &config,
                    &stem.with_extension("csv"),
                    &stem.with_extension("report"),
                    None,
                )
            })();
            BatchRow { seed, outcome }
        })
        .collect();

    let summary = BatchSummary { rows };
    write_atomic(&out_dir.join("summary.csv"), &summary.csv())?;
    write_atomic(&out_dir.join("summary.report"), &summary.aggregate())?;
    Ok(summary)
}
