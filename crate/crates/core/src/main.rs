use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use treemart::runner::{self, Command, Equation, ExperimentConfig, Model, SuiteName};
use treemart::Error;

#[derive(Parser)]
#[command(name = "treemart", version, about = "Yule, bisection and BST martingales: simulate, solve, verify")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parent directory of run directories (default: runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Martingale trajectories along simulated paths.
    Simulate(SimulateArgs),
    /// Fixed points of the smoothing or pantograph equation.
    Solve(SolveArgs),
    /// Verification suites.
    Verify(VerifyArgs),
    /// Summary and integrity check of an earlier run directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// time=T, leaves=n or generation=g (yule); size=n (bst); generation=g (bisection).
    #[arg(long)]
    stop: Option<String>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    z: Option<f64>,
    /// Number of index steps per path.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    equation: Option<EquationArg>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest abscissa written to solution.csv.
    #[arg(long)]
    xmax: Option<f64>,
    /// Power-series order of the pantograph solver.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// critical, onestep, degenerate, yule_limit, quarter_laws, fixedpoint,
    /// pantograph, mellin, theorems, determinism or all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory to summarize.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Yule,
    Bst,
    Bisection,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum EquationArg {
    Smoothing,
    Pantograph,
}

fn build_config(cli: Cli) -> treemart::Result<ExperimentConfig> {
    let command = match cli.command {
        Cmd::Simulate(_) => Command::Simulate,
        Cmd::Solve(_) => Command::Solve,
        Cmd::Verify(_) => Command::Verify,
        Cmd::Report(_) => Command::Report,
    };
    let mut c = match &cli.config {
        Some(path) => {
            let c = ExperimentConfig::load(path)?;
            if c.command != command {
                return Err(Error::Config {
                    field: "command".into(),
                    message: format!("config file is for {}, not {}", c.command.name(), command.name()),
                });
            }
            c
        }
        None => ExperimentConfig::new(command),
    };
    fn set<T>(slot: &mut Option<T>, v: Option<T>) {
        if v.is_some() {
            *slot = v;
        }
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    set(&mut c.out, cli.out);
    set(&mut c.threads, cli.threads);
    match cli.command {
        Cmd::Simulate(a) => {
            set(
                &mut c.model,
                a.model.map(|m| match m {
                    ModelArg::Yule => Model::Yule,
                    ModelArg::Bst => Model::Bst,
                    ModelArg::Bisection => Model::Bisection,
                }),
            );
            set(&mut c.stop, a.stop);
            set(&mut c.paths, a.paths);
            set(&mut c.z, a.z);
            set(&mut c.steps, a.steps);
        }
        Cmd::Solve(a) => {
            set(
                &mut c.equation,
                a.equation.map(|e| match e {
                    EquationArg::Smoothing => Equation::Smoothing,
                    EquationArg::Pantograph => Equation::Pantograph,
                }),
            );
            set(&mut c.z, a.z);
            set(&mut c.alpha, a.alpha);
            set(&mut c.xmax, a.xmax);
            set(&mut c.order, a.order);
        }
        Cmd::Verify(a) => {
            set(&mut c.suite, a.suite.as_deref().map(SuiteName::parse).transpose()?);
            set(&mut c.z, a.z);
            set(&mut c.paths, a.paths);
        }
        Cmd::Report(a) => set(&mut c.input, a.input),
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(cli).and_then(|c| runner::run(&c));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.dir.display());
            eprintln!("wall time {:.3} s", outcome.wall_seconds);
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.failures {
                    eprintln!("FAILED {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e @ Error::Resource { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
