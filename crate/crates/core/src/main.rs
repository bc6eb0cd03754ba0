//! Command-line experiment harness.
//!
//! Each subcommand loads an optional JSON scenario, applies the flag
//! overrides, runs one study, and writes CSV (and with `--plot`, SVG) into
//! the output directory. Failures exit nonzero with a machine-readable JSON
//! object on stderr.

use clap::{Args, Parser, Subcommand};
use irs_sensing::error::Error;
use irs_sensing::experiments::output::emit_outputs;
use irs_sensing::experiments::scenario::{parse_schemes, Scenario};
use irs_sensing::experiments::{
    run_beampattern, run_budget_report, run_crb_vs_power, run_crb_vs_sensors,
    run_placement_report, run_rmse_vs_power, RunOutput,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "irs-sensing", version, about = "IRS NLoS sensing experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON scenario file; omitted keys take the built-in defaults.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Output directory for CSV/SVG files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Master RNG seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trial count; on crb-vs-power a nonzero value adds an
    /// RMSE-vs-power study.
    #[arg(long)]
    trials: Option<usize>,
    /// Also render SVG plots.
    #[arg(long)]
    plot: bool,
    /// Angle grid step in degrees for spectrum scans.
    #[arg(long, value_name = "DEG")]
    grid_step: Option<f64>,
    /// Comma-separated scheme list: FP, MS, MS-Interp.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    scheme: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Command {
    /// CRB versus transmit power over (M, N, K) variants.
    CrbVsPower(Common),
    /// CRB versus sensor count for the MS and FP schemes.
    CrbVsK(Common),
    /// MUSIC beampatterns for the selected schemes.
    Beampattern(Common),
    /// Optimal sensor placement report with brute-force certification.
    Placement(Common),
    /// Budget-constrained element/group trade-off report.
    Budget(Common),
}

fn load_scenario(common: &Common) -> Result<Scenario, Error> {
    let mut scenario = match &common.scenario {
        Some(path) => Scenario::from_file(path)?,
        None => Scenario::default(),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    if let Some(trials) = common.trials {
        scenario.trials = trials;
    }
    if let Some(labels) = &common.scheme {
        scenario.schemes = parse_schemes(labels)?;
    }
    Ok(scenario)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let common = match &cli.command {
        Command::CrbVsPower(c)
        | Command::CrbVsK(c)
        | Command::Beampattern(c)
        | Command::Placement(c)
        | Command::Budget(c) => c,
    };
    let scenario = load_scenario(common)?;
    let grid_step = common.grid_step.unwrap_or(0.05);

    let mut outputs: Vec<RunOutput> = Vec::new();
    match &cli.command {
        Command::CrbVsPower(c) => {
            outputs.push(run_crb_vs_power(&scenario)?);
            if c.trials.unwrap_or(0) > 0 {
                outputs.push(run_rmse_vs_power(&scenario, scenario.trials)?);
            }
        }
        Command::CrbVsK(_) => outputs.push(run_crb_vs_sensors(&scenario)?),
        Command::Beampattern(_) => outputs.push(run_beampattern(&scenario, grid_step)?),
        Command::Placement(_) => outputs.push(run_placement_report(&scenario)?),
        Command::Budget(_) => outputs.push(run_budget_report(&scenario)?),
    }

    for output in &outputs {
        for note in &output.notes {
            eprintln!("note: {note}");
        }
        let written = emit_outputs(&common.out, &output.tables, &output.plots, common.plot)?;
        for path in written {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Layout(_) => "layout",
        Error::Domain(_) => "domain",
        Error::Singularity(_) => "singularity",
        Error::SearchSpace { .. } => "search_space",
        Error::Conditioning { .. } => "conditioning",
        Error::Ambiguity(_) => "ambiguity",
        Error::TrialFailures { .. } => "trial_failures",
        Error::Scenario(_) => "scenario",
        Error::Io { .. } => "io",
        Error::Json(_) => "json",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": { "kind": error_kind(&err), "message": err.to_string() }
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
