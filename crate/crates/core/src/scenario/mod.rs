//! Configuration-driven experiments and their outputs.

mod bundle;
mod config;
mod design;
mod linearization;
pub mod peaks;
mod runs;

pub use bundle::{
    format_float, parse_trajectory_csv, table_csv, trajectory_csv, wigner_csv, OutputFormat, ResultBundle, Table, WignerSnapshot,
};
pub use config::{EchoEntry, ParamEcho, ScenarioConfig, ScenarioKind, Source};
pub use design::{run_design_report, DIVERGENCE_FLAG};
pub use linearization::{run_linearization_check, LINEARIZATION_TOLERANCE};
pub use runs::{
    run_single_node_swap, run_two_node_transfer, run_xi_sweep, summarize_single, summarize_two_node, sweep_is_monotone,
    DEFAULT_G0, DEFAULT_LEAKAGE_THRESHOLD,
};

use crate::error::Result;

/// Runs the scenario named in `cfg`.
pub fn run(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    match cfg.kind()? {
        ScenarioKind::SingleNodeSwap => run_single_node_swap(cfg),
        ScenarioKind::TwoNodeTransfer => run_two_node_transfer(cfg),
        ScenarioKind::XiSweep => run_xi_sweep(cfg),
        ScenarioKind::LinearizationCheck => run_linearization_check(cfg),
        ScenarioKind::DesignReport => run_design_report(cfg),
    }
}
