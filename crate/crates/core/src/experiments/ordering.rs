//! Diffusion-speed comparison of long-range topologies.

use super::speed::{median_speed, Speed};
use super::sweep::{run_grid, Axis, CellPlan, Pairing, SweepResult};
use crate::dynamics::{Contagion, SimParams};
use crate::error::Result;
use crate::graphgen::GraphKind;
use crate::seed::derive_seed;

/// The three long-range pairings RRG-ERG, ERG-PLG and RRG-PLG.
pub fn long_long_pairings() -> Vec<Pairing> {
    use GraphKind::*;
    [(Rrg, Erg), (Erg, Plg), (Rrg, Plg)]
        .into_iter()
        .map(|(a, b)| Pairing::of_kinds(a, b))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PairingSpeeds {
    pub pairing: Pairing,
    /// A single-cell sweep holding every trial.
    pub sweep: SweepResult,
}

impl PairingSpeeds {
    pub fn speeds(&self, contagion: Contagion) -> Vec<Speed> {
        self.sweep.cells[0]
            .trials
            .iter()
            .map(|t| t.speed(contagion))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub threshold: f64,
    pub pairings: Vec<PairingSpeeds>,
}

impl SpeedReport {
    /// Median steps-to-threshold of each layer kind, pooling every layer of
    /// that kind across pairings. Kinds appear in order of first use.
    pub fn median_by_kind(&self) -> Vec<(GraphKind, Speed)> {
        let mut kinds: Vec<GraphKind> = Vec::new();
        for p in &self.pairings {
            for kind in [p.pairing.a.kind, p.pairing.b.kind] {
                if !kinds.contains(&kind) {
                    kinds.push(kind);
                }
            }
        }
        kinds
            .into_iter()
            .map(|kind| {
                let pooled: Vec<Speed> = self
                    .pairings
                    .iter()
                    .flat_map(|p| {
                        let mut v = Vec::new();
                        if p.pairing.a.kind == kind {
                            v.extend(p.speeds(Contagion::A));
                        }
                        if p.pairing.b.kind == kind {
                            v.extend(p.speeds(Contagion::B));
                        }
                        v
                    })
                    .collect();
                (kind, median_speed(&pooled).expect("at least one trial"))
            })
            .collect()
    }
}

/// Runs `trials` trials of every pairing at the parameters of `base` and
/// records how fast each layer's contagion reaches `threshold · n`.
pub fn speed_order(
    base: &SimParams,
    n: usize,
    pairings: &[Pairing],
    trials: usize,
    threshold: f64,
) -> Result<SpeedReport> {
    let pairings = pairings
        .iter()
        .enumerate()
        .map(|(i, pairing)| {
            let seeded = SimParams {
                master_seed: derive_seed(&[base.master_seed, i as u64]),
                ..base.clone()
            };
            let sweep = run_grid(
                n,
                Axis::new("tau_a", vec![base.tau_a]),
                Axis::new("tau_b", vec![base.tau_b]),
                &seeded,
                trials,
                threshold,
                |_, _| CellPlan {
                    pairing: pairing.clone(),
                    params: base.clone(),
                },
            )?;
            Ok(PairingSpeeds {
                pairing: pairing.clone(),
                sweep,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpeedReport {
        threshold,
        pairings,
    })
}
