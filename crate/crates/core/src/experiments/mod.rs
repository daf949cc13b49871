//! Batch experiments: grids of independent trials and their summaries.

mod kde;
mod ordering;
pub mod output;
mod speed;
mod sweep;

pub use kde::{
    branch_stats, silverman_bandwidth, BranchStats, Mode, LOWER_BRANCH, MODE_FLOOR, UPPER_BRANCH,
};
pub use ordering::{long_long_pairings, speed_order, PairingSpeeds, SpeedReport};
pub use speed::{median_speed, speed_metric, Speed, DEFAULT_SPEED_THRESHOLD};
pub use sweep::{
    cell_seed, mean_std, network_seed, run_grid, run_unit, scenario_long_short, scenario_synergy,
    sweep_beta, sweep_tau_grid, synergy_pairings, Axis, CellPlan, CellRecord, Pairing, SweepResult,
    TrialSummary,
};

/// Default dormancy axis: 0, 0.01, …, 0.20.
pub fn default_tau_axis() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 100.0).collect()
}

/// Trials per cell when a configuration does not say.
pub const DEFAULT_TRIALS: usize = 50;
