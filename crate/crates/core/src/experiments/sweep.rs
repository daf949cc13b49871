//! Parameter sweeps over independent trials.
//!
//! Each trial builds fresh layer instances and a fresh pairing, so the spread
//! of outcomes covers both topological and dynamical randomness. The work of
//! a sweep is a flat list of `(cell, trial)` units executed on the rayon
//! pool; results are gathered back in unit order, so the output does not
//! depend on scheduling or thread count.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::speed::{speed_metric, Speed, DEFAULT_SPEED_THRESHOLD};
use crate::dynamics::{Contagion, SimParams};
#[cfg(doc)]
use crate::engine::trial_seed;
use crate::engine::{run_trial, StopReason};
use crate::error::{Error, Result};
use crate::graphgen::{GraphKind, LayerSpec};
use crate::multiplex::Multiplex;
use crate::seed::derive_seed;

const LAYER_A_TAG: u64 = 1;
const LAYER_B_TAG: u64 = 2;
const PAIRING_TAG: u64 = 3;
const NETWORK_TAG: u64 = 4;

/// The layer templates of a two-layer network; contagion A spreads on `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pairing {
    pub a: LayerSpec,
    pub b: LayerSpec,
}

impl Pairing {
    pub fn new(a: LayerSpec, b: LayerSpec) -> Self {
        Self { a, b }
    }

    pub fn of_kinds(a: GraphKind, b: GraphKind) -> Self {
        Self::new(LayerSpec::of(a), LayerSpec::of(b))
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Builds one seeded instance with `n` nodes per layer.
    pub fn build(&self, n: usize, seed: u64) -> Result<Multiplex> {
        let a = self
            .a
            .resolve(n, derive_seed(&[seed, LAYER_A_TAG]))
            .generate()?;
        let b = self
            .b
            .resolve(n, derive_seed(&[seed, LAYER_B_TAG]))
            .generate()?;
        Multiplex::pair_layers(a, b, derive_seed(&[seed, PAIRING_TAG]))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.a.resolve(n, 0).validate()?;
        self.b.resolve(n, 0).validate()
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a.kind, self.b.kind)
    }
}

/// Per-trial outcome kept by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: u64,
    pub final_a: usize,
    pub final_b: usize,
    pub steps_run: u64,
    pub stop_reason: StopReason,
    /// First step at which each contagion reached the speed threshold.
    pub speed_a: Speed,
    pub speed_b: Speed,
}

impl TrialSummary {
    pub fn final_count(&self, contagion: Contagion) -> usize {
        match contagion {
            Contagion::A => self.final_a,
            Contagion::B => self.final_b,
        }
    }

    pub fn speed(&self, contagion: Contagion) -> Speed {
        match contagion {
            Contagion::A => self.speed_a,
            Contagion::B => self.speed_b,
        }
    }
}

/// All trials of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub row: usize,
    pub col: usize,
    /// Row-major cell index, part of every trial's seed.
    pub index: u64,
    /// Seed from which the cell's graphs and dynamics are derived.
    pub seed: u64,
    pub trials: Vec<TrialSummary>,
}

impl CellRecord {
    pub fn finals(&self, contagion: Contagion) -> Vec<usize> {
        self.trials
            .iter()
            .map(|t| t.final_count(contagion))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// Aggregated grid. Matrices are indexed `[row][col]` where rows follow `y`
/// and columns follow `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub n: usize,
    pub x: Axis,
    pub y: Axis,
    pub mean_final_a: Vec<Vec<f64>>,
    pub mean_final_b: Vec<Vec<f64>>,
    /// Population standard deviations.
    pub std_final_a: Vec<Vec<f64>>,
    pub std_final_b: Vec<Vec<f64>>,
    pub trials_per_cell: usize,
    /// Row-major.
    pub cells: Vec<CellRecord>,
}

impl SweepResult {
    pub fn cell(&self, row: usize, col: usize) -> &CellRecord {
        &self.cells[row * self.x.values.len() + col]
    }

    pub fn mean(&self, contagion: Contagion) -> &[Vec<f64>] {
        match contagion {
            Contagion::A => &self.mean_final_a,
            Contagion::B => &self.mean_final_b,
        }
    }

    pub fn std(&self, contagion: Contagion) -> &[Vec<f64>] {
        match contagion {
            Contagion::A => &self.std_final_a,
            Contagion::B => &self.std_final_b,
        }
    }
}

/// What to run in one cell.
#[derive(Debug, Clone)]
pub struct CellPlan {
    pub pairing: Pairing,
    pub params: SimParams,
}

/// Runs `trials` trials of every cell of an `x × y` grid.
///
/// `plan(row, col)` describes the cell; `base.master_seed` seeds everything.
pub fn run_grid(
    n: usize,
    x: Axis,
    y: Axis,
    base: &SimParams,
    trials: usize,
    speed_threshold: f64,
    plan: impl Fn(usize, usize) -> CellPlan,
) -> Result<SweepResult> {
    if x.values.is_empty() || y.values.is_empty() {
        return Err(Error::Config("sweep axes must be non-empty".into()));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if !(speed_threshold > 0.0 && speed_threshold < 1.0) {
        return Err(Error::Config("speed threshold must lie in (0,1)".into()));
    }
    let (rows, cols) = (y.values.len(), x.values.len());
    let plans: Vec<CellPlan> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| plan(r, c))
        .collect();
    for p in &plans {
        p.params.validate()?;
        p.pairing.validate(n)?;
    }

    let units = plans.len() * trials;
    let done = AtomicUsize::new(0);
    let report_every = (units / 20).max(1);
    let summaries: Vec<TrialSummary> = (0..units)
        .into_par_iter()
        .map(|unit| {
            let cell = unit / trials;
            let trial = (unit % trials) as u64;
            let summary = run_unit(
                n,
                &plans[cell],
                base.master_seed,
                cell as u64,
                trial,
                speed_threshold,
            );
            let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
            if finished.is_multiple_of(report_every) || finished == units {
                log::info!("{finished}/{units} trials done");
            }
            summary
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(plans.len());
    let mut chunks = summaries.chunks_exact(trials);
    for index in 0..plans.len() {
        cells.push(CellRecord {
            row: index / cols,
            col: index % cols,
            index: index as u64,
            seed: cell_seed(base.master_seed, index as u64),
            trials: chunks.next().unwrap().to_vec(),
        });
    }
    let matrix = |f: &dyn Fn(&CellRecord) -> f64| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|r| (0..cols).map(|c| f(&cells[r * cols + c])).collect())
            .collect()
    };
    let stat = |contagion: Contagion, want_std: bool| {
        matrix(&|cell: &CellRecord| {
            let (mean, std) = mean_std(&cell.finals(contagion));
            if want_std {
                std
            } else {
                mean
            }
        })
    };
    Ok(SweepResult {
        n,
        mean_final_a: stat(Contagion::A, false),
        mean_final_b: stat(Contagion::B, false),
        std_final_a: stat(Contagion::A, true),
        std_final_b: stat(Contagion::B, true),
        x,
        y,
        trials_per_cell: trials,
        cells,
    })
}

/// Seed shared by every trial of a cell.
pub fn cell_seed(master_seed: u64, cell_index: u64) -> u64 {
    derive_seed(&[master_seed, cell_index])
}

/// Seed of the network instance built for `trial` of a cell. The dynamics of
/// that trial are seeded by [`trial_seed`] of the same cell seed.
pub fn network_seed(cell_seed: u64, trial: u64) -> u64 {
    derive_seed(&[cell_seed, trial, NETWORK_TAG])
}

/// One trial of one cell: a fresh network instance and one run of the
/// dynamics, reproducible from `(master_seed, cell_index, trial)`.
pub fn run_unit(
    n: usize,
    plan: &CellPlan,
    master_seed: u64,
    cell_index: u64,
    trial: u64,
    speed_threshold: f64,
) -> Result<TrialSummary> {
    let seed = cell_seed(master_seed, cell_index);
    let network = plan.pairing.build(n, network_seed(seed, trial))?;
    let params = SimParams {
        master_seed: seed,
        ..plan.params.clone()
    };
    let result = run_trial(&network, &params, trial);
    Ok(TrialSummary {
        trial,
        final_a: result.final_a,
        final_b: result.final_b,
        steps_run: result.steps_run,
        stop_reason: result.stop_reason,
        speed_a: speed_metric(&result, Contagion::A, speed_threshold),
        speed_b: speed_metric(&result, Contagion::B, speed_threshold),
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[usize]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / count;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / count;
    (mean, var.sqrt())
}

/// Final depths over a `τ_A × τ_B` grid (columns τ_A, rows τ_B).
pub fn sweep_tau_grid(
    pairing: &Pairing,
    n: usize,
    tau_a_values: &[f64],
    tau_b_values: &[f64],
    base: &SimParams,
    trials: usize,
) -> Result<SweepResult> {
    run_grid(
        n,
        Axis::new("tau_a", tau_a_values.to_vec()),
        Axis::new("tau_b", tau_b_values.to_vec()),
        base,
        trials,
        DEFAULT_SPEED_THRESHOLD,
        |r, c| CellPlan {
            pairing: pairing.clone(),
            params: base.with_taus(tau_a_values[c], tau_b_values[r]),
        },
    )
}

/// Small-world pair with `β_A` fixed and `τ_A` from `base`; columns sweep
/// `β_B`, rows sweep `τ_B`. Both layers use degree `k`.
pub fn sweep_beta(
    n: usize,
    k: usize,
    beta_a: f64,
    beta_b_values: &[f64],
    tau_b_values: &[f64],
    base: &SimParams,
    trials: usize,
) -> Result<SweepResult> {
    if beta_b_values.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
        return Err(Error::Config("beta_b values must lie in (0,1]".into()));
    }
    let layer = |beta: f64| LayerSpec {
        k: Some(k),
        ..LayerSpec::wsg(beta)
    };
    run_grid(
        n,
        Axis::new("beta_b", beta_b_values.to_vec()),
        Axis::new("tau_b", tau_b_values.to_vec()),
        base,
        trials,
        DEFAULT_SPEED_THRESHOLD,
        |r, c| CellPlan {
            pairing: Pairing::new(layer(beta_a), layer(beta_b_values[c])),
            params: base.with_taus(base.tau_a, tau_b_values[r]),
        },
    )
}

/// Pairings admitted by the synergy comparison.
pub fn synergy_pairings() -> Vec<Pairing> {
    [GraphKind::Erg, GraphKind::Rrg, GraphKind::Plg]
        .into_iter()
        .map(|b| Pairing::of_kinds(GraphKind::Erg, b))
        .collect()
}

/// For each pairing, final depths across the `alpha_values` axis at the
/// dormancy rates of `base`. The master seed of each pairing's sweep is
/// derived from its position in `pairings`.
pub fn scenario_synergy(
    base: &SimParams,
    n: usize,
    alpha_values: &[f64],
    pairings: &[Pairing],
    trials: usize,
) -> Result<Vec<(Pairing, SweepResult)>> {
    let allowed = synergy_pairings();
    pairings
        .iter()
        .enumerate()
        .map(|(i, pairing)| {
            if !allowed
                .iter()
                .any(|a| a.a.kind == pairing.a.kind && a.b.kind == pairing.b.kind)
            {
                return Err(Error::Config(format!(
                    "synergy pairing {pairing} not in ERG-ERG, ERG-RRG, ERG-PLG"
                )));
            }
            let seeded = SimParams {
                master_seed: derive_seed(&[base.master_seed, i as u64]),
                ..base.clone()
            };
            let sweep = run_grid(
                n,
                Axis::new("alpha", alpha_values.to_vec()),
                Axis::new("tau_b", vec![base.tau_b]),
                &seeded,
                trials,
                DEFAULT_SPEED_THRESHOLD,
                |_, c| CellPlan {
                    pairing: pairing.clone(),
                    params: SimParams {
                        alpha: alpha_values[c],
                        ..base.clone()
                    },
                },
            )?;
            Ok((pairing.clone(), sweep))
        })
        .collect()
}

/// Long-range layer (A) paired with a lattice (B); columns sweep the
/// long-range dormancy τ_A, rows the lattice dormancy.
pub fn scenario_long_short(
    base: &SimParams,
    n: usize,
    long: &LayerSpec,
    tau_long_values: &[f64],
    tau_lat_values: &[f64],
    trials: usize,
) -> Result<SweepResult> {
    if !matches!(long.kind, GraphKind::Rrg | GraphKind::Erg | GraphKind::Plg) {
        return Err(Error::Config(format!(
            "long-range layer must be RRG, ERG or PLG, got {}",
            long.kind
        )));
    }
    let pairing = Pairing::new(long.clone(), LayerSpec::of(GraphKind::Lat));
    let mut sweep = sweep_tau_grid(&pairing, n, tau_long_values, tau_lat_values, base, trials)?;
    sweep.y.name = "tau_lat".into();
    Ok(sweep)
}
