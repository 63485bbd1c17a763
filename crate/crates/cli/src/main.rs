use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tes_dispatch::salt::{build_ragone, builtin_salt, ragone_limit};
use tes_dispatch::scenario::{
    run_peak_shift, run_scenarios, write_peak_shift_outputs, write_ragone_csv, write_run_outputs, HouseholdFailure,
    ResolvedConfig, RunConfig, RunOptions,
};
use tes_dispatch::sizing::SizingPolicy;
use tes_dispatch::synthetic::synthetic_city;

/// Shortest dispatch block the CLI accepts, hours.
const MIN_HORIZON_BLOCK: usize = 24;

#[derive(Parser)]
#[command(name = "tes-dispatch", version, about = "Heat pump and thermal storage dispatch")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cost-minimizing dispatch and economics for every scenario.
    Run(RunArgs),
    /// Largest peak-hour shift at no extra operating cost.
    Peakshift(CommonArgs),
    /// Print a salt's Ragone curve and linearized caps as CSV.
    Ragone {
        #[arg(long)]
        salt: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Write a seeded synthetic city and a config that runs it.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        households: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "Detroit")]
        city: String,
        /// $ per kWh of delivered heat for gas-backup scenarios.
        #[arg(long, default_value_t = 0.04)]
        gas_price: f64,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    parallel: Option<usize>,
    /// variable, incremental:<kg> or fixed:<kg>; overrides every scenario.
    #[arg(long)]
    sizing: Option<SizingPolicy>,
    /// Scenario ids to run (default: all).
    #[arg(long = "scenario", num_args = 1..)]
    scenarios: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Convert $/kg to $/kWh by multiplying by enthalpy.
    #[arg(long)]
    paper_compat: bool,
    /// Solve in blocks of this many hours instead of one full-year LP.
    #[arg(long)]
    horizon_block: Option<usize>,
}

fn load(common: &CommonArgs, tweak: impl FnOnce(&mut RunConfig)) -> Result<(ResolvedConfig, RunOptions), String> {
    let mut config = RunConfig::from_file(&common.config).map_err(|e| e.to_string())?;
    if common.sizing.is_some() {
        config.sizing = common.sizing;
    }
    tweak(&mut config);
    if let Some(b) = config.horizon_block {
        if b < MIN_HORIZON_BLOCK {
            return Err(format!(
                "horizon block must be at least {MIN_HORIZON_BLOCK} hours, got {b}"
            ));
        }
    }
    if common.parallel == Some(0) {
        return Err("--parallel must be at least 1".into());
    }
    let resolved = ResolvedConfig::resolve(&config).map_err(|e| e.to_string())?;
    let options = RunOptions {
        parallel: common.parallel,
        scenario_ids: common.scenarios.clone(),
    };
    Ok((resolved, options))
}

fn finish(failures: &[HouseholdFailure], skipped: &[String], written: usize) -> ExitCode {
    for id in skipped {
        eprintln!("scenario {id}: no configured city; skipped");
    }
    for f in failures {
        eprintln!("failed: {f}");
    }
    eprintln!("wrote {written} files");
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} household runs failed", failures.len());
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run(args) => {
            let (config, options) = load(&args.common, |c| {
                if args.paper_compat {
                    c.paper_compat = true;
                }
                if args.horizon_block.is_some() {
                    c.horizon_block = args.horizon_block;
                }
            })?;
            let report = run_scenarios(&config, &options).map_err(|e| e.to_string())?;
            let written = write_run_outputs(&report, &args.common.out).map_err(|e| e.to_string())?;
            Ok(finish(&report.failures, &report.skipped, written.len()))
        }
        Command::Peakshift(common) => {
            let (config, options) = load(&common, |_| {})?;
            let report = run_peak_shift(&config, &options).map_err(|e| e.to_string())?;
            let written = write_peak_shift_outputs(&report, &common.out).map_err(|e| e.to_string())?;
            Ok(finish(&report.failures, &report.skipped, written.len()))
        }
        Command::Ragone { salt, samples } => {
            let spec = builtin_salt(&salt).map_err(|e| e.to_string())?;
            let curve = build_ragone(&spec, samples).map_err(|e| e.to_string())?;
            let limit = ragone_limit(&spec).map_err(|e| e.to_string())?;
            write_ragone_csv(&curve, &limit, std::io::stdout().lock()).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth {
            out,
            households,
            seed,
            city,
            gas_price,
        } => {
            if households == 0 {
                return Err("--households must be at least 1".into());
            }
            let config = synthetic_city(&city, households, seed)
                .write(&out, gas_price)
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            println!("{}", config.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
