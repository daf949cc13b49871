//! Per-node adoption, choice and dormancy rules.
//!
//! A node adopts a new contagion with probability `x / (1 + x)` where
//! `x = (1 - S_A) (A/K_A)^α + (1 - S_B) (B/K_B)^α` and `A`, `B` are the
//! fractions of its neighbors (in the respective layer) that hold and
//! actively spread each contagion. A naïve node that adopts picks A with
//! probability `(A/K_A)^α / ((A/K_A)^α + (B/K_B)^α)`.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::multiplex::{Layer, Multiplex};
use crate::seed::{Purpose, StepDraws};

pub const DEFAULT_ATTRACTIVENESS: f64 = 1.34;
pub const DEFAULT_MAX_STEPS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contagion {
    A,
    B,
}

/// How dormancy relates the two contagions of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityModel {
    /// Independent activity per contagion. Dormancy in one contagion leaves
    /// the node free to spread the other, and a newly adopted contagion is
    /// always spread.
    #[default]
    PerContagion,
    /// One activity bit per node. Going dormant (at rate τ_A for A holders,
    /// τ_B for B holders) stops the node from spreading anything, including
    /// contagions it adopts later; it can still adopt.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    /// Synergy exponent; below 1 joint densities are super-additive.
    pub alpha: f64,
    pub k_a: f64,
    pub k_b: f64,
    /// Per-step probability that an active A spreader goes dormant.
    pub tau_a: f64,
    pub tau_b: f64,
    pub max_steps: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub activity: ActivityModel,
    /// Whether a contagion adopted during a step is already exposed to that
    /// step's dormancy draw.
    #[serde(default = "exposed")]
    pub dormancy_on_adoption: bool,
}

fn exposed() -> bool {
    true
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            k_a: DEFAULT_ATTRACTIVENESS,
            k_b: DEFAULT_ATTRACTIVENESS,
            tau_a: 0.0,
            tau_b: 0.0,
            max_steps: DEFAULT_MAX_STEPS,
            master_seed: 0,
            activity: ActivityModel::PerContagion,
            dormancy_on_adoption: true,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return config("alpha must be a finite number > 0");
        }
        if !(self.k_a > 0.0 && self.k_a.is_finite()) {
            return config("k_a must be a finite number > 0");
        }
        if !(self.k_b > 0.0 && self.k_b.is_finite()) {
            return config("k_b must be a finite number > 0");
        }
        if !(0.0..=1.0).contains(&self.tau_a) {
            return config("tau_a must lie in [0,1]");
        }
        if !(0.0..=1.0).contains(&self.tau_b) {
            return config("tau_b must lie in [0,1]");
        }
        if self.max_steps == 0 {
            return config("max_steps must be positive");
        }
        Ok(())
    }

    pub fn with_taus(&self, tau_a: f64, tau_b: f64) -> Self {
        Self {
            tau_a,
            tau_b,
            ..self.clone()
        }
    }
}

/// Per-node infection and activity flags (0 or 1), plus running counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub s_a: Vec<u8>,
    pub s_b: Vec<u8>,
    pub active_a: Vec<u8>,
    pub active_b: Vec<u8>,
    pub step: u64,
    pub counts: Counts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub infected_a: usize,
    pub infected_b: usize,
    pub infected_ab: usize,
    pub active_a: usize,
    pub active_b: usize,
}

impl SimState {
    /// All nodes naïve.
    pub fn naive(n: usize) -> Self {
        Self {
            s_a: vec![0; n],
            s_b: vec![0; n],
            active_a: vec![0; n],
            active_b: vec![0; n],
            step: 0,
            counts: Counts::default(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.s_a.len()
    }

    /// Counts recomputed from the flags.
    pub fn scan_counts(&self) -> Counts {
        let sum = |v: &[u8]| v.iter().map(|&x| x as usize).sum::<usize>();
        Counts {
            infected_a: sum(&self.s_a),
            infected_b: sum(&self.s_b),
            infected_ab: self
                .s_a
                .iter()
                .zip(&self.s_b)
                .filter(|(&a, &b)| a == 1 && b == 1)
                .count(),
            active_a: sum(&self.active_a),
            active_b: sum(&self.active_b),
        }
    }

    /// Checks flag ranges and that activity implies infection.
    pub fn is_consistent(&self) -> bool {
        let n = self.node_count();
        [&self.s_b, &self.active_a, &self.active_b]
            .iter()
            .all(|v| v.len() == n)
            && (0..n).all(|i| {
                self.s_a[i] <= 1
                    && self.s_b[i] <= 1
                    && self.active_a[i] <= self.s_a[i]
                    && self.active_b[i] <= self.s_b[i]
            })
            && self.counts == self.scan_counts()
    }

    pub fn has_active(&self) -> bool {
        self.counts.active_a + self.counts.active_b > 0
    }

    pub fn is_saturated(&self) -> bool {
        self.counts.infected_ab == self.node_count()
    }

    /// True unless the node holds a contagion but spreads none.
    #[inline]
    pub fn is_live(&self, node: usize) -> bool {
        (self.s_a[node] | self.s_b[node]) == 0 || (self.active_a[node] | self.active_b[node]) == 1
    }

    /// Marks `node` as holding `contagion` and, unless the shared activity
    /// bit of the node is already off, as spreading it.
    pub fn adopt(&mut self, node: usize, contagion: Contagion, model: ActivityModel) {
        let spreads = model == ActivityModel::PerContagion || self.is_live(node);
        self.infect(node, contagion);
        if !spreads {
            match contagion {
                Contagion::A => {
                    self.active_a[node] = 0;
                    self.counts.active_a -= 1;
                }
                Contagion::B => {
                    self.active_b[node] = 0;
                    self.counts.active_b -= 1;
                }
            }
        }
    }

    /// Marks `node` as holding and spreading `contagion`.
    pub fn infect(&mut self, node: usize, contagion: Contagion) {
        let (s, active, other) = match contagion {
            Contagion::A => (&mut self.s_a, &mut self.active_a, &self.s_b),
            Contagion::B => (&mut self.s_b, &mut self.active_b, &self.s_a),
        };
        if s[node] == 1 {
            return;
        }
        s[node] = 1;
        active[node] = 1;
        let both = other[node] == 1;
        match contagion {
            Contagion::A => {
                self.counts.infected_a += 1;
                self.counts.active_a += 1;
            }
            Contagion::B => {
                self.counts.infected_b += 1;
                self.counts.active_b += 1;
            }
        }
        if both {
            self.counts.infected_ab += 1;
        }
    }
}

/// Active-infected neighbor fractions seen by one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Densities {
    pub dens_a: f64,
    pub dens_b: f64,
}

/// Fraction of a node's neighbors in each layer that hold and actively spread
/// that layer's contagion. A node without neighbors in a layer sees 0 there.
pub fn local_densities(m: &Multiplex, st: &SimState, i: usize) -> Densities {
    Densities {
        dens_a: active_fraction(m, Layer::A, &st.s_a, &st.active_a, i),
        dens_b: active_fraction(m, Layer::B, &st.s_b, &st.active_b, i),
    }
}

#[inline]
pub(crate) fn active_fraction(
    m: &Multiplex,
    layer: Layer,
    infected: &[u8],
    active: &[u8],
    i: usize,
) -> f64 {
    let neighbors = m.layer(layer).neighbors(i);
    if neighbors.is_empty() {
        return 0.0;
    }
    let spreading = neighbors
        .iter()
        .filter(|&&j| infected[j as usize] & active[j as usize] == 1)
        .count();
    spreading as f64 / neighbors.len() as f64
}

/// `(density / k)^alpha` with `0^alpha = 0`.
#[inline]
pub fn hill_term(density: f64, k: f64, alpha: f64) -> f64 {
    if density <= 0.0 {
        0.0
    } else {
        (density / k).powf(alpha)
    }
}

#[inline]
pub(crate) fn uninfected(flag: u8) -> f64 {
    f64::from(1 - flag)
}

/// `x / (1 + x)`, or exactly 0 when `x = 0`.
#[inline]
pub(crate) fn saturating_ratio(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / (1.0 + x)
    }
}

/// Probability that a node with infection flags `(s_a_i, s_b_i)` adopts a
/// contagion it does not yet hold during this step.
pub fn adoption_prob(d: Densities, s_a_i: bool, s_b_i: bool, p: &SimParams) -> f64 {
    let term_a = hill_term(d.dens_a, p.k_a, p.alpha);
    let term_b = hill_term(d.dens_b, p.k_b, p.alpha);
    let x = uninfected(u8::from(s_a_i)) * term_a + uninfected(u8::from(s_b_i)) * term_b;
    saturating_ratio(x)
}

/// Probability that an adopting naïve node picks A over B.
///
/// # Panics
/// If both densities are zero; no adoption can happen then.
pub fn choice_prob_a(d: Densities, p: &SimParams) -> f64 {
    let term_a = hill_term(d.dens_a, p.k_a, p.alpha);
    let term_b = hill_term(d.dens_b, p.k_b, p.alpha);
    assert!(
        term_a + term_b > 0.0,
        "choice between contagions requires a positive density"
    );
    term_a / (term_a + term_b)
}

/// Each active spreader of A goes dormant with probability `tau_a`, and of B
/// with `tau_b`, using the node's dormancy draws. Under the shared activity
/// model either event silences the whole node. Infection flags are left
/// alone and dormancy is never undone.
pub fn apply_dormancy(st: &mut SimState, p: &SimParams, draws: &StepDraws) {
    apply_dormancy_after(st, None, p, draws);
}

/// [`apply_dormancy`] at the end of a step that started from `before`. When
/// `p.dormancy_on_adoption` is off, contagions adopted since `before` are not
/// exposed to this step's draws.
pub fn apply_dormancy_after(
    st: &mut SimState,
    before: Option<&SimState>,
    p: &SimParams,
    draws: &StepDraws,
) {
    let exempt = |held: fn(&SimState) -> &[u8], i: usize| {
        !p.dormancy_on_adoption && before.is_some_and(|b| held(b)[i] == 0)
    };
    for i in 0..st.node_count() {
        let hit_a = st.active_a[i] == 1
            && !exempt(|b| &b.s_a, i)
            && draws.get(i, Purpose::DormantA) < p.tau_a;
        let hit_b = st.active_b[i] == 1
            && !exempt(|b| &b.s_b, i)
            && draws.get(i, Purpose::DormantB) < p.tau_b;
        let shared = p.activity == ActivityModel::Shared && (hit_a || hit_b);
        if st.active_a[i] == 1 && (hit_a || shared) {
            st.active_a[i] = 0;
            st.counts.active_a -= 1;
        }
        if st.active_b[i] == 1 && (hit_b || shared) {
            st.active_b[i] = 0;
            st.counts.active_b -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::LayerGraph;

    fn params(alpha: f64, k: f64) -> SimParams {
        SimParams {
            alpha,
            k_a: k,
            k_b: k,
            ..SimParams::default()
        }
    }

    fn dens(a: f64, b: f64) -> Densities {
        Densities {
            dens_a: a,
            dens_b: b,
        }
    }

    #[test]
    fn dormant_neighbors_do_not_count() {
        // star: node 0 with neighbors 1..=4
        let star = LayerGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let m = Multiplex::with_map(star.clone(), star, (0..5).collect()).unwrap();
        let mut st = SimState::naive(5);
        st.infect(1, Contagion::A);
        st.infect(2, Contagion::A);
        st.infect(3, Contagion::A);
        st.active_a[3] = 0;
        st.counts.active_a -= 1;
        assert_eq!(local_densities(&m, &st, 0), dens(0.5, 0.0));
        for j in 1..5 {
            st.infect(j, Contagion::A);
        }
        st.active_a[3] = 1;
        st.counts.active_a += 1;
        assert_eq!(local_densities(&m, &st, 0).dens_a, 1.0);
        assert_eq!(local_densities(&m, &SimState::naive(5), 0), dens(0.0, 0.0));
    }

    #[test]
    fn isolated_node_sees_zero() {
        let g = LayerGraph::from_edges(2, &[]).unwrap();
        let m = Multiplex::with_map(g.clone(), g, vec![0, 1]).unwrap();
        let mut st = SimState::naive(2);
        st.infect(1, Contagion::A);
        assert_eq!(local_densities(&m, &st, 0), dens(0.0, 0.0));
    }

    #[test]
    fn no_density_no_adoption() {
        let p = params(2.5, 1.34);
        for (sa, sb) in [(false, false), (true, false), (false, true), (true, true)] {
            assert_eq!(adoption_prob(dens(0.0, 0.0), sa, sb, &p), 0.0);
        }
    }

    #[test]
    fn coinfected_adopt_nothing() {
        assert_eq!(
            adoption_prob(dens(1.0, 1.0), true, true, &params(1.0, 1.0)),
            0.0
        );
    }

    #[test]
    fn single_density_value() {
        // x = 0.25 / 1.34 = 0.18656716417910447..., P = x / (1 + x) = 0.25 / 1.59
        let p = adoption_prob(dens(0.25, 0.0), false, false, &params(1.0, 1.34));
        assert!((p - 0.157_232_704_402_515_7).abs() < 1e-15);
        assert!((hill_term(0.25, 1.34, 1.0) - 0.186_567_164_179_104_47).abs() < 1e-15);
    }

    #[test]
    fn univariate_reduction() {
        let p = params(3.0, 1.34);
        let t = hill_term(0.6, 1.34, 3.0);
        assert_eq!(
            adoption_prob(dens(0.9, 0.6), true, false, &p),
            t / (1.0 + t)
        );
        assert_eq!(
            adoption_prob(dens(0.6, 0.9), false, true, &p),
            t / (1.0 + t)
        );
    }

    #[test]
    fn choice_values() {
        assert!((choice_prob_a(dens(0.3, 0.1), &params(1.0, 1.0)) - 0.75).abs() < 1e-15);
        assert_eq!(choice_prob_a(dens(0.3, 0.0), &params(2.0, 1.34)), 1.0);
        for alpha in [0.5, 1.0, 3.0, 5.0] {
            assert_eq!(choice_prob_a(dens(0.4, 0.4), &params(alpha, 1.34)), 0.5);
        }
    }

    #[test]
    #[should_panic(expected = "positive density")]
    fn choice_without_density_panics() {
        choice_prob_a(dens(0.0, 0.0), &params(1.0, 1.0));
    }

    #[test]
    fn linear_threshold_baseline() {
        // alpha = K = 1: x is the plain density sum
        let d = dens(0.25, 0.5);
        let p = adoption_prob(d, false, false, &params(1.0, 1.0));
        assert_eq!(p, 0.75 / 1.75);
    }

    #[test]
    fn params_validation() {
        assert!(SimParams::default().validate().is_ok());
        let bad = SimParams {
            tau_a: 1.5,
            ..SimParams::default()
        };
        assert_eq!(
            bad.validate().unwrap_err().to_string(),
            "configuration error: tau_a must lie in [0,1]"
        );
        assert!(SimParams {
            alpha: 0.0,
            ..SimParams::default()
        }
        .validate()
        .is_err());
        assert!(SimParams {
            k_b: -1.0,
            ..SimParams::default()
        }
        .validate()
        .is_err());
        assert!(SimParams {
            max_steps: 0,
            ..SimParams::default()
        }
        .validate()
        .is_err());
    }

    fn all_active(n: usize) -> SimState {
        let mut st = SimState::naive(n);
        for i in 0..n {
            st.infect(i, Contagion::A);
            st.infect(i, Contagion::B);
        }
        st
    }

    #[test]
    fn dormancy_extremes() {
        let draws = StepDraws::generate(1, 1, 100);
        let mut st = all_active(100);
        apply_dormancy(&mut st, &SimParams::default(), &draws);
        assert_eq!(st, all_active(100));
        let p = SimParams {
            tau_a: 1.0,
            ..SimParams::default()
        };
        apply_dormancy(&mut st, &p, &draws);
        assert!(st.active_a.iter().all(|&x| x == 0));
        assert_eq!(st.counts.active_b, 100);
        assert_eq!(st.counts.infected_a, 100);
        assert!(st.is_consistent());
    }

    #[test]
    fn shared_dormancy_silences_both() {
        let p = SimParams {
            tau_a: 1.0,
            activity: ActivityModel::Shared,
            ..SimParams::default()
        };
        let mut st = all_active(10);
        apply_dormancy(&mut st, &p, &StepDraws::generate(1, 1, 10));
        assert_eq!(st.counts.active_a + st.counts.active_b, 0);
        assert_eq!(st.counts.infected_ab, 10);
        assert!(st.is_consistent());
    }

    #[test]
    fn dormant_node_adopts_silently_under_shared_model() {
        let mut st = SimState::naive(2);
        st.infect(0, Contagion::A);
        st.active_a[0] = 0;
        st.counts.active_a = 0;
        st.adopt(0, Contagion::B, ActivityModel::Shared);
        assert_eq!((st.s_b[0], st.active_b[0]), (1, 0));
        st.adopt(1, Contagion::B, ActivityModel::Shared);
        assert_eq!(st.active_b[1], 1);
        let mut per = SimState::naive(1);
        per.infect(0, Contagion::A);
        per.active_a[0] = 0;
        per.counts.active_a = 0;
        per.adopt(0, Contagion::B, ActivityModel::PerContagion);
        assert_eq!(per.active_b[0], 1);
        assert!(st.is_consistent() && per.is_consistent());
    }

    #[test]
    fn dormancy_is_binomial() {
        // Binomial(10000, 0.14) has variance 1204; the mean of 50 runs has sd ~4.9.
        let p = SimParams {
            tau_a: 0.14,
            ..SimParams::default()
        };
        let n = 10_000;
        let mut total = 0usize;
        for seed in 0..50 {
            let mut st = all_active(n);
            apply_dormancy(&mut st, &p, &StepDraws::generate(seed, 0, n));
            total += n - st.counts.active_a;
        }
        let mean = total as f64 / 50.0;
        assert!((mean - 1400.0).abs() < 3.0 * (1204.0f64 / 50.0).sqrt());
    }
}
