use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bayes_exec::config::DEFAULT_GRID_POINTS;
use bayes_exec::{
    cmd_costs, cmd_cumulative, cmd_solve, cmd_sweep, exit_code, RunConfig, SweepPath, SweepSpec,
};
use bayes_exec_core::{Mode, Quadrature};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bayesian equilibrium trading strategies for two competing firms.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the equilibrium and write sampled strategies.
    Solve(Common),
    /// Realized and expected costs per active type pair.
    Costs(Common),
    /// Cost-to-date curves per active type pair.
    Cumulative(Common),
    /// Solve once per value of one scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary, e.g. `prior[0][0]`, `firm2[1].target`, `conditional1[0][0]`.
        #[arg(long)]
        param: String,
        /// Values to sweep through (comma separated or repeated).
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Direct,
    NormalForm,
}

#[derive(Args)]
struct Common {
    /// Scenario file (.json, or .csv as written by `solve`).
    #[arg(long)]
    scenario: PathBuf,
    /// Number of equally spaced output times on [0, 1].
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Evaluation impact parameter; repeat for several.
    #[arg(long = "eval-kappa", default_values_t = [1.0], allow_negative_numbers = true)]
    eval_kappas: Vec<f64>,
    #[arg(long, value_enum, default_value = "normal-form")]
    mode: ModeArg,
    /// Divide costs by the active type's target.
    #[arg(long)]
    normalized: bool,
    /// Output directory.
    #[arg(long, env = "BAYESEXEC_OUT", default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cost quadrature: `gl[:panels]` or `trapezoid[:panels]`.
    #[arg(long, default_value = "gl:64")]
    quadrature: Quadrature,
    /// Random deviation trials per firm type recorded by `solve`.
    #[arg(long, default_value_t = 0)]
    verify_trials: usize,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            grid_points: self.grid_points,
            eval_kappas: self.eval_kappas.clone(),
            mode: match self.mode {
                ModeArg::Direct => Mode::Direct,
                ModeArg::NormalForm => Mode::NormalForm,
            },
            normalized: self.normalized,
            output_dir: self.out.clone(),
            seed: self.seed,
            quadrature: self.quadrature,
            verify_trials: self.verify_trials,
        }
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Solve(c) => cmd_solve(&c.scenario, &c.config()),
        Command::Costs(c) => cmd_costs(&c.scenario, &c.config()),
        Command::Cumulative(c) => cmd_cumulative(&c.scenario, &c.config()),
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let spec = SweepSpec {
                path: param.parse::<SweepPath>()?,
                values,
            };
            cmd_sweep(&common.scenario, &spec, &common.config())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
