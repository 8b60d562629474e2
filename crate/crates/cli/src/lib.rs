//! File formats and commands behind the `bayes-exec` binary.

pub mod commands;
pub mod config;
pub mod input;
pub mod output;
pub mod sweep;

pub use commands::{cmd_costs, cmd_cumulative, cmd_solve, cmd_sweep};
pub use config::RunConfig;
pub use input::{load_scenario, scenario_from_csv, scenario_to_csv, ScenarioFile};
pub use sweep::{SweepPath, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Process exit code for a failed command: numerical failures of the solver
/// map to 3, everything else (unreadable or invalid input, bad arguments,
/// unwritable output) to 2.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<bayes_exec_core::Error>())
        .any(|e| !e.is_input_error());
    if numerical {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}
