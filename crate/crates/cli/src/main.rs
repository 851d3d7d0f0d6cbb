use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod run;

use run::{Command, GridSpec, McSettings, RunConfig, Tolerances};

/// Optimal dividend barriers for two-sided Lévy risk models.
#[derive(Debug, Parser)]
#[command(name = "levy-barrier", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute ρ, the ruin expansion, b* and the h / V tables.
    Solve(Common),
    /// Run the generator, HJB and convexity diagnostics; non-zero exit on failure.
    Check(Common),
    /// Monte Carlo estimate of the discounted dividends of one strategy.
    Simulate(SimArgs),
    /// Compare the optimal barrier against rival strategies on common paths.
    Dominance(DomArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Output directory.
    #[arg(long, env = "LEVY_BARRIER_OUT", default_value = ".")]
    out: PathBuf,
    /// Evaluation grid `x_min:x_max:n`; defaults to `0.01:3b*+5:200`.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Tolerance for the generator residual checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, Args)]
struct McArgs {
    /// Number of simulated paths.
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    /// Simulation horizon; defaults to ln(10⁴)/δ.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial capital; defaults to b*.
    #[arg(long)]
    x0: Option<f64>,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: McArgs,
    /// `none`, `barrier:<b>` or `threshold:<b>:<rate>`; defaults to the optimal barrier.
    #[arg(long)]
    strategy: Option<String>,
    /// Also write one CSV row per path.
    #[arg(long)]
    dump_paths: bool,
}

#[derive(Debug, Args)]
struct DomArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: McArgs,
    /// Rival strategy; repeatable. Defaults to b*±0.5, b*±1 and threshold(b*, a/2).
    #[arg(long = "rival")]
    rivals: Vec<String>,
    /// Standard errors a rival may exceed the barrier by.
    #[arg(long, default_value_t = 3.0)]
    z: f64,
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let (common, command, mc) = match self.command {
            Cmd::Solve(c) => (c, Command::Solve, None),
            Cmd::Check(c) => (c, Command::Check, None),
            Cmd::Simulate(s) => (
                s.common,
                Command::Simulate {
                    strategy: s.strategy,
                    dump_paths: s.dump_paths,
                },
                Some(s.mc),
            ),
            Cmd::Dominance(d) => (
                d.common,
                Command::Dominance {
                    rivals: d.rivals,
                    z: d.z,
                },
                Some(d.mc),
            ),
        };
        let mc = mc.map(|m| McSettings {
            n_paths: m.paths,
            horizon: m.horizon,
            seed: m.seed,
            x0: m.x0,
        });
        RunConfig {
            model_path: common.model,
            command,
            output_dir: common.out,
            grid: common.grid,
            mc,
            tolerances: Tolerances {
                generator: common.tol,
                ..Tolerances::default()
            },
        }
    }
}

fn main() -> ExitCode {
    let config = Cli::parse().into_config();
    match run::run(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
