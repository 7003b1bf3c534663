use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rydpump::{Execution, Tier};
use rydpump_cli::checks::run_criterion;
use rydpump_cli::config::{default_config, load_config, Overrides, Scenario, ScenarioConfig};
use rydpump_cli::output::config_json;
use rydpump_cli::{run_scenario, CliError};

#[derive(Parser)]
#[command(name = "rydpump", version, about = "Driven-dissipative Rydberg lattice scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Full,
    Effective,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML configuration; figure scenarios run without one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "RYD_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    tier: Option<TierArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Packed-configuration energies and pair shifts.
    Spectrum(RunArgs),
    /// Effective hopping matrix, light shifts and truncation tail.
    Effective(RunArgs),
    /// Master-equation evolution from the ground state.
    Evolve(RunArgs),
    /// Quantum-trajectory ensemble from the ground state.
    Trajectory(RunArgs),
    /// Liouvillian steady state.
    Steady(RunArgs),
    /// Witness report and boundary table of the steady state.
    Witness(RunArgs),
    /// Single-excitation dark states of one chain.
    Darkscan(RunArgs),
    /// Dark-state depth over chain lengths.
    Scaling(RunArgs),
    /// Engineered decay of the dressed Rydberg level.
    Bloch(RunArgs),
    /// Steady-state fidelity over the (xi, a0) grid.
    Fig2a(RunArgs),
    /// N = 4 dynamics.
    Fig2b(RunArgs),
    /// N = 6 dynamics, trajectories and witness crossings.
    Fig3(RunArgs),
    /// Dark-state scaling up to N = 128.
    Fig4(RunArgs),
    /// Resolve a configuration and print it as JSON.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        tier: Option<TierArg>,
    },
    /// Run one acceptance criterion (1 to 9).
    Check {
        criterion: u8,
        #[arg(long, env = "RYD_WORKERS")]
        workers: Option<usize>,
    },
}

fn tier(t: Option<TierArg>) -> Option<Tier> {
    t.map(|t| match t {
        TierArg::Full => Tier::Full,
        TierArg::Effective => Tier::Effective,
    })
}

fn execution(workers: Option<usize>) -> Execution {
    match workers {
        Some(n) => Execution::workers(n),
        None => Execution::Parallel(None),
    }
}

fn resolve(scenario: Scenario, args: &RunArgs) -> Result<ScenarioConfig, CliError> {
    let o = Overrides { scenario: Some(scenario), out: args.out.clone(), seed: args.seed, tier: tier(args.tier) };
    match &args.config {
        Some(p) => load_config(p, &o),
        None => default_config(&o),
    }
    .map_err(CliError::Config)
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    let (scenario, args) = match cmd {
        Command::Validate { config, tier: t } => {
            let o = Overrides { tier: tier(t), ..Default::default() };
            let cfg = load_config(&config, &o).map_err(CliError::Config)?;
            println!("{}", config_json(&cfg));
            return Ok(ExitCode::SUCCESS);
        }
        Command::Check { criterion, workers } => {
            let outcome = run_criterion(criterion, execution(workers))?;
            println!("{outcome}");
            return Ok(if outcome.pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Spectrum(a) => (Scenario::Spectrum, a),
        Command::Effective(a) => (Scenario::Effective, a),
        Command::Evolve(a) => (Scenario::Evolve, a),
        Command::Trajectory(a) => (Scenario::Trajectory, a),
        Command::Steady(a) => (Scenario::Steady, a),
        Command::Witness(a) => (Scenario::Witness, a),
        Command::Darkscan(a) => (Scenario::Darkscan, a),
        Command::Scaling(a) => (Scenario::Scaling, a),
        Command::Bloch(a) => (Scenario::Bloch, a),
        Command::Fig2a(a) => (Scenario::Fig2a, a),
        Command::Fig2b(a) => (Scenario::Fig2b, a),
        Command::Fig3(a) => (Scenario::Fig3, a),
        Command::Fig4(a) => (Scenario::Fig4, a),
    };
    let cfg = resolve(scenario, &args)?;
    let manifest = run_scenario(&cfg, execution(args.workers))?;
    println!("{}: wrote {} files to {} in {:.2} s", manifest.scenario, manifest.files.len(), cfg.output.display(), manifest.wall_time_s);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
