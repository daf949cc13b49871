//! Synchronous time stepping of a single trial.
//!
//! A step has two phases. In the adoption phase every node reads the state as
//! it was at the start of the step and may adopt one contagion. In the
//! dormancy phase every active spreader, including the step's new adopters,
//! may go dormant. Two implementations of a step exist: a per-node reference
//! loop and a change-vector form that updates whole state vectors at once.
//! Both read the same node-indexed draws and agree bit for bit.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{
    active_fraction, adoption_prob, apply_dormancy_after, choice_prob_a, hill_term,
    local_densities, saturating_ratio, uninfected, ActivityModel, Contagion, SimParams, SimState,
};
use crate::multiplex::{Layer, Multiplex};
use crate::seed::{derive_seed, rng_from, Purpose, StepDraws};

/// Node count above which the vectorized adoption phase runs on the rayon pool.
const PARALLEL_NODES: usize = 4096;
const INITIAL_NODE_TAG: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No node actively spreads either contagion.
    Extinct,
    /// Every node holds both contagions.
    Saturated,
    /// The step limit was reached.
    Horizon,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Extinct => "extinct",
            Self::Saturated => "saturated",
            Self::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepper {
    Reference,
    #[default]
    Vectorized,
}

/// Cumulative adoption of one trial. `series_a[t]` is the number of nodes
/// holding A after step `t` (`t = 0` is the initial state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub n: usize,
    pub series_a: Vec<usize>,
    pub series_b: Vec<usize>,
    pub final_a: usize,
    pub final_b: usize,
    pub steps_run: u64,
    pub stop_reason: StopReason,
}

impl TrialResult {
    pub fn series(&self, contagion: Contagion) -> &[usize] {
        match contagion {
            Contagion::A => &self.series_a,
            Contagion::B => &self.series_b,
        }
    }

    pub fn final_count(&self, contagion: Contagion) -> usize {
        match contagion {
            Contagion::A => self.final_a,
            Contagion::B => self.final_b,
        }
    }

    /// `step,count_a,count_b` with one row per recorded step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,count_a,count_b\n");
        for (t, (a, b)) in self.series_a.iter().zip(&self.series_b).enumerate() {
            writeln!(out, "{t},{a},{b}").unwrap();
        }
        out
    }
}

/// Seed of the draw streams of trial `trial_index`.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    derive_seed(&[master_seed, trial_index])
}

/// One uniformly chosen node holds and spreads both contagions; everyone else
/// is naïve.
pub fn seed_initial(m: &Multiplex, trial_seed: u64) -> SimState {
    let n = m.node_count();
    let node = rng_from(derive_seed(&[trial_seed, INITIAL_NODE_TAG])).random_range(0..n);
    let mut st = SimState::naive(n);
    st.infect(node, Contagion::A);
    st.infect(node, Contagion::B);
    st
}

/// Per-node step, one branch per infection state.
pub fn step_reference(m: &Multiplex, st: &SimState, p: &SimParams, draws: &StepDraws) -> SimState {
    let mut next = st.clone();
    for i in 0..st.node_count() {
        let d = local_densities(m, st, i);
        let (has_a, has_b) = (st.s_a[i] == 1, st.s_b[i] == 1);
        if has_a && has_b {
            continue;
        }
        if draws.get(i, Purpose::Adopt) >= adoption_prob(d, has_a, has_b, p) {
            continue;
        }
        let pick = match (has_a, has_b) {
            (false, false) => {
                if draws.get(i, Purpose::Choice) < choice_prob_a(d, p) {
                    Contagion::A
                } else {
                    Contagion::B
                }
            }
            (true, false) => Contagion::B,
            (false, true) => Contagion::A,
            (true, true) => unreachable!(),
        };
        next.adopt(i, pick, p.activity);
    }
    apply_dormancy_after(&mut next, Some(st), p, draws);
    next.step += 1;
    next
}

/// Change-vector step.
///
/// Builds the adoption vector Δ and the choice vector γ for all nodes, then
/// applies `S_A += Δ (1 - S_A) γ` and `S_B += Δ (1 - S_B) (1 - γ)`. The choice
/// weight uses the same infection masks as the adoption probability, so γ is
/// forced to B for nodes holding only A and to A for nodes holding only B.
pub fn step_vectorized(m: &Multiplex, st: &SimState, p: &SimParams, draws: &StepDraws) -> SimState {
    let n = st.node_count();
    // bit 0: Δ, bit 1: γ
    let change = |i: usize| -> u8 {
        let dens_a = active_fraction(m, Layer::A, &st.s_a, &st.active_a, i);
        let dens_b = active_fraction(m, Layer::B, &st.s_b, &st.active_b, i);
        let open_a = uninfected(st.s_a[i]) * hill_term(dens_a, p.k_a, p.alpha);
        let open_b = uninfected(st.s_b[i]) * hill_term(dens_b, p.k_b, p.alpha);
        let x = open_a + open_b;
        if x == 0.0 {
            return 0;
        }
        let delta = u8::from(draws.get(i, Purpose::Adopt) < saturating_ratio(x));
        let gamma = u8::from(draws.get(i, Purpose::Choice) < open_a / x);
        delta | (gamma << 1)
    };
    let changes: Vec<u8> = if n >= PARALLEL_NODES {
        (0..n).into_par_iter().map(change).collect()
    } else {
        (0..n).map(change).collect()
    };

    let shared = u8::from(p.activity == ActivityModel::Shared);
    let exempt_new = u8::from(!p.dormancy_on_adoption);
    let mut next = SimState::naive(n);
    next.step = st.step + 1;
    let mut counts = st.counts;
    for (i, &change) in changes.iter().enumerate() {
        let delta = change & 1;
        let gamma = change >> 1;
        let gain_a = delta * (1 - st.s_a[i]) * gamma;
        let gain_b = delta * (1 - st.s_b[i]) * (1 - gamma);
        let s_a = st.s_a[i] + gain_a;
        let s_b = st.s_b[i] + gain_b;
        // Under the shared model a new contagion is spread only by live nodes.
        let spreads_new = 1 - shared * (1 - u8::from(st.is_live(i)));
        let mut active_a = st.active_a[i] + gain_a * spreads_new;
        let mut active_b = st.active_b[i] + gain_b * spreads_new;
        let gain_ab = (gain_a + gain_b) * s_a * s_b;
        let hit_a = active_a
            * (1 - exempt_new * gain_a)
            * u8::from(draws.get(i, Purpose::DormantA) < p.tau_a);
        let hit_b = active_b
            * (1 - exempt_new * gain_b)
            * u8::from(draws.get(i, Purpose::DormantB) < p.tau_b);
        let silenced = shared * (hit_a | hit_b);
        let dormant_a = active_a * (hit_a | silenced);
        let dormant_b = active_b * (hit_b | silenced);
        active_a -= dormant_a;
        active_b -= dormant_b;

        counts.infected_a += gain_a as usize;
        counts.infected_b += gain_b as usize;
        counts.infected_ab += gain_ab as usize;
        counts.active_a = counts.active_a + (gain_a * spreads_new) as usize - dormant_a as usize;
        counts.active_b = counts.active_b + (gain_b * spreads_new) as usize - dormant_b as usize;

        next.s_a[i] = s_a;
        next.s_b[i] = s_b;
        next.active_a[i] = active_a;
        next.active_b[i] = active_b;
    }
    next.counts = counts;
    next
}

/// Runs one trial with the default (vectorized) stepper.
pub fn run_trial(m: &Multiplex, p: &SimParams, trial_index: u64) -> TrialResult {
    run_trial_with(m, p, trial_index, Stepper::Vectorized)
}

/// Seeds one node and steps until extinction, saturation or `p.max_steps`.
/// The outcome is a pure function of `(m, p, trial_index)`.
pub fn run_trial_with(
    m: &Multiplex,
    p: &SimParams,
    trial_index: u64,
    stepper: Stepper,
) -> TrialResult {
    let n = m.node_count();
    let seed = trial_seed(p.master_seed, trial_index);
    let mut st = seed_initial(m, seed);
    let mut series_a = vec![st.counts.infected_a];
    let mut series_b = vec![st.counts.infected_b];
    let stop_reason = loop {
        if st.is_saturated() {
            break StopReason::Saturated;
        }
        if !st.has_active() {
            break StopReason::Extinct;
        }
        if st.step >= p.max_steps {
            break StopReason::Horizon;
        }
        let draws = StepDraws::generate(seed, st.step + 1, n);
        st = match stepper {
            Stepper::Reference => step_reference(m, &st, p, &draws),
            Stepper::Vectorized => step_vectorized(m, &st, p, &draws),
        };
        series_a.push(st.counts.infected_a);
        series_b.push(st.counts.infected_b);
    };
    TrialResult {
        n,
        final_a: st.counts.infected_a,
        final_b: st.counts.infected_b,
        series_a,
        series_b,
        steps_run: st.step,
        stop_reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{gen_lattice, GraphSpec, LayerGraph};

    fn lattice_pair(n: usize, seed: u64) -> Multiplex {
        let a = gen_lattice(&GraphSpec::lattice(n, 0)).unwrap();
        Multiplex::pair_layers(a.clone(), a, seed).unwrap()
    }

    #[test]
    fn single_node_is_seeded_and_saturated() {
        let g = LayerGraph::from_edges(1, &[]).unwrap();
        let m = Multiplex::pair_layers(g.clone(), g, 0).unwrap();
        let st = seed_initial(&m, 5);
        assert_eq!(
            (st.s_a[0], st.s_b[0], st.active_a[0], st.active_b[0]),
            (1, 1, 1, 1)
        );
        let r = run_trial(&m, &SimParams::default(), 0);
        assert_eq!(r.stop_reason, StopReason::Saturated);
        assert_eq!(r.steps_run, 0);
        assert_eq!(r.series_a, vec![1]);
    }

    #[test]
    fn seeding_is_deterministic() {
        let m = lattice_pair(400, 1);
        let a = seed_initial(&m, 77);
        assert_eq!(a, seed_initial(&m, 77));
        assert_eq!(a.counts.infected_a, 1);
        assert_eq!(a.counts.infected_b, 1);
        assert!(a.is_consistent());
    }

    #[test]
    fn quiet_state_only_advances_step() {
        let m = lattice_pair(9, 0);
        let p = SimParams::default();
        let st = SimState::naive(9);
        let draws = StepDraws::generate(1, 1, 9);
        for next in [
            step_reference(&m, &st, &p, &draws),
            step_vectorized(&m, &st, &p, &draws),
        ] {
            assert_eq!(next.step, 1);
            assert_eq!(SimState { step: 0, ..next }, st);
        }
    }

    #[test]
    fn full_dormancy_goes_extinct_on_first_step() {
        let m = lattice_pair(9, 0);
        let p = SimParams {
            tau_a: 1.0,
            tau_b: 1.0,
            ..SimParams::default()
        };
        for trial in 0..20 {
            let r = run_trial(&m, &p, trial);
            assert_eq!(r.stop_reason, StopReason::Extinct);
            assert_eq!(r.steps_run, 1);
            // the seed plus at most its 4 + 4 neighbors adopted in step 1
            assert!(r.final_a >= 1 && r.final_a <= 9);
            assert_eq!(r.series_a.len(), 2);
        }
    }

    #[test]
    fn reference_and_vectorized_trials_agree() {
        let m = lattice_pair(100, 3);
        let p = SimParams {
            alpha: 0.8,
            tau_a: 0.1,
            tau_b: 0.05,
            master_seed: 4,
            ..SimParams::default()
        };
        for trial in 0..5 {
            assert_eq!(
                run_trial_with(&m, &p, trial, Stepper::Reference),
                run_trial(&m, &p, trial)
            );
        }
        for activity in [ActivityModel::PerContagion, ActivityModel::Shared] {
            for dormancy_on_adoption in [true, false] {
                let q = SimParams {
                    activity,
                    dormancy_on_adoption,
                    ..p.clone()
                };
                for trial in 0..5 {
                    assert_eq!(
                        run_trial_with(&m, &q, trial, Stepper::Reference),
                        run_trial(&m, &q, trial)
                    );
                }
            }
        }
    }

    #[test]
    fn exempt_new_adopters_outlive_full_dormancy() {
        let m = lattice_pair(9, 0);
        let p = SimParams {
            tau_a: 1.0,
            tau_b: 1.0,
            alpha: 0.2,
            dormancy_on_adoption: false,
            ..SimParams::default()
        };
        let st = seed_initial(&m, 3);
        let draws = StepDraws::generate(3, 1, 9);
        let next = step_reference(&m, &st, &p, &draws);
        let seed = (0..9).find(|&i| st.s_a[i] == 1).unwrap();
        assert_eq!((next.active_a[seed], next.active_b[seed]), (0, 0));
        let adopted = (0..9)
            .filter(|&i| i != seed && (next.s_a[i] | next.s_b[i]) == 1)
            .count();
        assert!(adopted > 0);
        assert_eq!(next.counts.active_a + next.counts.active_b, adopted);
    }

    #[test]
    fn csv_layout() {
        let r = TrialResult {
            n: 3,
            series_a: vec![1, 2],
            series_b: vec![1, 3],
            final_a: 2,
            final_b: 3,
            steps_run: 1,
            stop_reason: StopReason::Horizon,
        };
        assert_eq!(r.to_csv(), "step,count_a,count_b\n0,1,1\n1,2,3\n");
    }

    #[test]
    fn horizon_stops() {
        let m = lattice_pair(400, 0);
        let p = SimParams {
            max_steps: 3,
            alpha: 3.0,
            ..SimParams::default()
        };
        let r = run_trial(&m, &p, 0);
        assert_eq!(r.stop_reason, StopReason::Horizon);
        assert_eq!(r.steps_run, 3);
        assert_eq!(r.series_b.len(), 4);
    }
}
