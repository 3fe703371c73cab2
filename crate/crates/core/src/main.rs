//! Command-line front end: scenario loading, sweep selection, CSV output.

use clap::{Parser, ValueEnum};
use hetnet_sim::scenario::{load_scenario, Scenario};
use hetnet_sim::sweep::{
    emit, render_csv, render_decisions_csv, run_sweep, AggregateCurve, DecisionRow, Mode,
    SweepConfig,
};
use hetnet_sim::{Error, Result};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    /// Sweep the mean BS-user distance.
    Distance,
    /// Sweep the number of extra co-channel interferers.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    V,
    E,
    Hybrid,
    All,
}

impl ModeArg {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::V => vec![Mode::VOnly],
            ModeArg::E => vec![Mode::EOnly],
            ModeArg::Hybrid => vec![Mode::Hybrid],
            ModeArg::All => Mode::ALL.to_vec(),
        }
    }
}

/// Monte-Carlo throughput sweeps for hybrid V-band/E-band networks.
#[derive(Debug, Parser)]
#[command(name = "hetnet-sim", version, about)]
struct Args {
    /// Scenario file; omit to run the built-in reference scenario.
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Swept variable.
    #[arg(long, value_enum, default_value_t = SweepArg::Distance)]
    sweep: SweepArg,

    /// Band policy: a forced single band, the full hybrid policy, or all three.
    #[arg(long, value_enum, default_value_t = ModeArg::All)]
    mode: ModeArg,

    /// Override the scenario's Monte-Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Override the scenario's master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write a per-trial band-allocation audit log to this file.
    #[arg(long)]
    decisions: Option<PathBuf>,

    /// Print the regulatory validation report and exit.
    #[arg(long)]
    validate_only: bool,
}

fn run(args: Args) -> Result<()> {
    let mut scenario = match &args.scenario {
        Some(path) => load_scenario(path)?,
        None => Scenario::defaults(),
    };
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(Error::Domain("--trials must be at least 1".into()));
        }
        scenario.trials = trials;
    }
    if let Some(seed) = args.seed {
        scenario.master_seed = seed;
    }

    // Waivers always surface on the error stream; they are the record of
    // rules deliberately not enforced for this run.
    for waiver in &scenario.validation.waivers {
        eprintln!("waiver: {waiver}");
    }

    if args.validate_only {
        // A scenario that reaches this point has zero violations; a violating
        // file already failed to parse with a validation error.
        eprintln!(
            "scenario is compliant ({} waiver(s))",
            scenario.validation.waivers.len()
        );
        return Ok(());
    }

    let mut curves: Vec<AggregateCurve> = Vec::new();
    let mut decisions: Vec<DecisionRow> = Vec::new();
    for mode in args.mode.modes() {
        let config = match args.sweep {
            SweepArg::Distance => SweepConfig::distance(&scenario, mode),
            SweepArg::Density => SweepConfig::density(&scenario, mode),
        };
        let run = run_sweep(&scenario, &config)?;
        curves.push(run.curve);
        decisions.extend(run.decisions);
    }

    emit(&render_csv(&curves), args.out.as_deref())?;
    if let Some(path) = &args.decisions {
        emit(&render_decisions_csv(&decisions), Some(path))?;
    }
    Ok(())
}

fn main() {
    let args = Args::parse();
    if let Err(err) = run(args) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
