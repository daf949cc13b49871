//! Scenario execution and output files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cocontagion::dynamics::Contagion;
use cocontagion::engine::{run_trial, trial_seed};
use cocontagion::experiments::output::{fmt_real, write_sweep};
use cocontagion::experiments::{
    cell_seed, network_seed, scenario_long_short, scenario_synergy, speed_order, sweep_beta,
    sweep_tau_grid, Speed, SweepResult, LOWER_BRANCH, UPPER_BRANCH,
};
use cocontagion::graphgen::DEFAULT_DEGREE;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, RunConfig, Scenario, DEFAULT_BETA_A};
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// One `(cell, trial)` unit and the seeds that reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    /// Output prefix of the sweep the unit belongs to; empty for
    /// single-sweep scenarios, the pairing name otherwise.
    pub sweep: String,
    pub cell: u64,
    pub trial: u64,
    pub network_seed: u64,
    pub dynamics_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub git_describe: String,
    pub master_seed: u64,
    pub lower_branch: f64,
    pub upper_branch: f64,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
    pub units: Vec<UnitRecord>,
}

/// Runs the configured scenario on a pool of `cfg.threads` workers and
/// writes its CSV files and `manifest.json` into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.pool_size())
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let exp = &cfg.experiment;
    log::info!(
        "running {} with n={} seed={} on {} threads",
        exp.scenario,
        exp.n,
        exp.seed,
        pool.current_num_threads()
    );
    let (files, units) = pool.install(|| execute(exp, dir))?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        git_describe: env!("COCONTAGION_GIT_DESCRIBE").to_string(),
        master_seed: exp.seed,
        lower_branch: LOWER_BRANCH,
        upper_branch: UPPER_BRANCH,
        config: exp.clone(),
        files,
        units,
    };
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, body).map_err(|source| CliError::Write { path, source })?;
    log::info!(
        "wrote {} files to {}",
        manifest.files.len() + 1,
        dir.display()
    );
    Ok(manifest)
}

type Outputs = (Vec<String>, Vec<UnitRecord>);

fn execute(exp: &ExperimentConfig, dir: &Path) -> Result<Outputs> {
    let base = exp.params.sim(exp.seed);
    let grids = &exp.grids;
    let emit_cells = exp.emit_cells.unwrap_or(false);
    let mut out = Outputs::default();
    match exp.scenario {
        Scenario::SingleTrial => {
            let pairing = exp.pairing().expect("single_trial has layers");
            let seed = cell_seed(exp.seed, 0);
            let network = pairing.build(exp.n, network_seed(seed, 0))?;
            let result = run_trial(&network, &exp.params.sim(seed), 0);
            put(dir, "trial.csv", result.to_csv(), &mut out)?;
            out.1.push(UnitRecord {
                sweep: String::new(),
                cell: 0,
                trial: 0,
                network_seed: network_seed(seed, 0),
                dynamics_seed: trial_seed(seed, 0),
            });
        }
        Scenario::TauGrid | Scenario::LongShort => {
            let (tau_a, tau_b) = (grids.axis("tau_a"), grids.axis("tau_b"));
            let sweep = if exp.scenario == Scenario::TauGrid {
                sweep_tau_grid(
                    &exp.pairing().expect("tau_grid has layers"),
                    exp.n,
                    tau_a,
                    tau_b,
                    &base,
                    exp.trials,
                )?
            } else {
                let long = exp.layer_a.as_ref().expect("long_short has layers");
                scenario_long_short(&base, exp.n, long, tau_a, tau_b, exp.trials)?
            };
            emit_sweep(dir, "", &sweep, emit_cells, &mut out)?;
        }
        Scenario::BetaSweep => {
            let a = exp.layer_a.as_ref().expect("beta_sweep has layers");
            let k = a.k.unwrap_or(DEFAULT_DEGREE);
            let beta_a = a.beta.unwrap_or(DEFAULT_BETA_A);
            let sweep = sweep_beta(
                exp.n,
                k,
                beta_a,
                grids.axis("beta_b"),
                grids.axis("tau_b"),
                &base,
                exp.trials,
            )?;
            emit_sweep(dir, "", &sweep, emit_cells, &mut out)?;
        }
        Scenario::Synergy => {
            let pairings = exp.pairings.as_deref().expect("synergy has pairings");
            let alphas = grids.axis("alpha");
            let results = scenario_synergy(&base, exp.n, alphas, pairings, exp.trials)?;
            let mut summary =
                String::from("pairing,alpha,mean_final_a,mean_final_b,both_upper_fraction\n");
            for (pairing, sweep) in &results {
                let name = pairing.name();
                for (c, alpha) in alphas.iter().enumerate() {
                    let cell = sweep.cell(0, c);
                    let upper = (UPPER_BRANCH * exp.n as f64) as usize;
                    let both = cell
                        .trials
                        .iter()
                        .filter(|t| t.final_a > upper && t.final_b > upper)
                        .count();
                    writeln!(
                        summary,
                        "{name},{},{},{},{}",
                        fmt_real(*alpha),
                        fmt_real(sweep.mean_final_a[0][c]),
                        fmt_real(sweep.mean_final_b[0][c]),
                        fmt_real(both as f64 / cell.trials.len() as f64)
                    )
                    .unwrap();
                }
                emit_sweep(dir, &format!("{name}_"), sweep, emit_cells, &mut out)?;
            }
            put(dir, "synergy.csv", summary, &mut out)?;
        }
        Scenario::SpeedOrder => {
            let pairings = exp.pairings.as_deref().expect("speed_order has pairings");
            let threshold = exp.speed_threshold.expect("speed_order has a threshold");
            let report = speed_order(&base, exp.n, pairings, exp.trials, threshold)?;
            let mut speeds = String::from("pairing,trial,kind_a,speed_a,kind_b,speed_b\n");
            for entry in &report.pairings {
                let (ka, kb) = (entry.pairing.a.kind, entry.pairing.b.kind);
                for t in &entry.sweep.cells[0].trials {
                    writeln!(
                        speeds,
                        "{},{},{ka},{},{kb},{}",
                        entry.pairing.name(),
                        t.trial,
                        fmt_speed(t.speed(Contagion::A)),
                        fmt_speed(t.speed(Contagion::B))
                    )
                    .unwrap();
                }
                record_units(&entry.pairing.name(), &entry.sweep, &mut out.1);
            }
            let mut medians = String::from("kind,median_speed\n");
            for (kind, median) in report.median_by_kind() {
                writeln!(medians, "{kind},{}", fmt_speed(median)).unwrap();
            }
            put(dir, "speeds.csv", speeds, &mut out)?;
            put(dir, "speed_medians.csv", medians, &mut out)?;
        }
    }
    out.0.sort();
    Ok(out)
}

/// Steps to threshold, or `censored` when the threshold was never reached.
fn fmt_speed(s: Speed) -> String {
    s.steps()
        .map(|t| t.to_string())
        .unwrap_or_else(|| "censored".into())
}

fn put(dir: &Path, name: &str, body: String, out: &mut Outputs) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|source| CliError::Write { path, source })?;
    out.0.push(name.to_string());
    Ok(())
}

fn emit_sweep(
    dir: &Path,
    prefix: &str,
    sweep: &SweepResult,
    emit_cells: bool,
    out: &mut Outputs,
) -> Result<()> {
    for path in write_sweep(dir, prefix, sweep, emit_cells)? {
        let name = path
            .file_name()
            .expect("file path")
            .to_string_lossy()
            .into_owned();
        out.0.push(name);
    }
    record_units(prefix.trim_end_matches('_'), sweep, &mut out.1);
    Ok(())
}

fn record_units(sweep_name: &str, sweep: &SweepResult, units: &mut Vec<UnitRecord>) {
    for cell in &sweep.cells {
        for t in &cell.trials {
            units.push(UnitRecord {
                sweep: sweep_name.to_string(),
                cell: cell.index,
                trial: t.trial,
                network_seed: network_seed(cell.seed, t.trial),
                dynamics_seed: trial_seed(cell.seed, t.trial),
            });
        }
    }
}
