use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use so3_track::controllers::ControlLaw;
use so3_track_cli::{batch, parse_config, run, CliError, ConfigError, Overrides};

#[derive(Parser)]
#[command(name = "so3track", version, about = "Attitude tracking simulations on SO(3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its trajectory and report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run a range of random seeds and write a summary table.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// asy_geo, ftt_geo, asy_fro or ftt_fro.
    #[arg(long)]
    controller: Option<ControlLaw>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<so3_track_cli::RunConfig, CliError> {
        let mut config = parse_config(&self.config)?;
        config.apply(&Overrides {
            controller: self.controller,
            seed: self.seed,
            t_final: self.t_final,
            dt: self.dt,
        })?;
        Ok(config)
    }
}

fn required(flag: Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> Result<PathBuf, CliError> {
    flag.or_else(|| file.clone()).ok_or_else(|| {
        ConfigError::Validation(format!("no {name} path: pass --{name} or set output.{name}")).into()
    })
}

fn main_inner(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { common, csv, report, plot } => {
            let config = common.load()?;
            let csv = required(csv, &config.output.csv, "csv")?;
            let report = required(report, &config.output.report, "report")?;
            let plot = plot.or_else(|| config.output.plot.clone());
            let summary = run(&config, &csv, &report, plot.as_deref())?;
            print!("{}", summary.to_key_value());
            Ok(true)
        }
        Command::Batch { common, runs, seed_base, out_dir } => {
            let config = common.load()?;
            let summary = batch(&config, runs, seed_base, Path::new(&out_dir))?;
            print!("{}", summary.csv());
            print!("{}", summary.aggregate());
            for row in &summary.rows {
                if let Err(e) = &row.outcome {
                    eprintln!("seed {}: {e}", row.seed);
                }
            }
            Ok(summary.failures() == 0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
