use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{generators, LayerGraph};
use crate::error::{config, Error, Result};

/// Default mean degree shared by all topologies.
pub const DEFAULT_DEGREE: usize = 4;
pub const DEFAULT_M_PER_NODE: usize = 2;
pub const DEFAULT_BETA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GraphKind {
    /// Square lattice with periodic boundaries.
    Lat,
    /// Random regular graph.
    Rrg,
    /// Erdős–Rényi graph with a fixed edge count.
    Erg,
    /// Growing preferential-attachment graph.
    Plg,
    /// Watts–Strogatz small world.
    Wsg,
}

impl GraphKind {
    pub const ALL: [GraphKind; 5] = [Self::Lat, Self::Rrg, Self::Erg, Self::Plg, Self::Wsg];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lat => "LAT",
            Self::Rrg => "RRG",
            Self::Erg => "ERG",
            Self::Plg => "PLG",
            Self::Wsg => "WSG",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown graph kind `{s}` (expected LAT, RRG, ERG, PLG or WSG)"
                ))
            })
    }
}

/// Complete, seeded description of one layer instance.
///
/// Fields that do not apply to `kind` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Degree for LAT (must be 4), RRG and WSG.
    pub k: usize,
    /// Edge count for ERG.
    pub m_edges: usize,
    /// Attachment edges per new node for PLG.
    pub m_per_node: usize,
    /// Rewiring probability for WSG.
    pub beta: f64,
    /// Triad-formation probability for PLG (0 = plain preferential attachment).
    pub triad_prob: f64,
    pub seed: u64,
}

impl GraphSpec {
    /// A spec of the given kind with every parameter at its mean-degree-4 default.
    pub fn new(kind: GraphKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            k: DEFAULT_DEGREE,
            m_edges: n * DEFAULT_DEGREE / 2,
            m_per_node: DEFAULT_M_PER_NODE,
            beta: DEFAULT_BETA,
            triad_prob: 0.0,
            seed,
        }
    }

    pub fn lattice(n: usize, seed: u64) -> Self {
        Self::new(GraphKind::Lat, n, seed)
    }

    pub fn rrg(n: usize, k: usize, seed: u64) -> Self {
        Self {
            k,
            ..Self::new(GraphKind::Rrg, n, seed)
        }
    }

    pub fn erg(n: usize, m_edges: usize, seed: u64) -> Self {
        Self {
            m_edges,
            ..Self::new(GraphKind::Erg, n, seed)
        }
    }

    pub fn plg(n: usize, m_per_node: usize, seed: u64) -> Self {
        Self {
            m_per_node,
            ..Self::new(GraphKind::Plg, n, seed)
        }
    }

    pub fn wsg(n: usize, k: usize, beta: f64, seed: u64) -> Self {
        Self {
            k,
            beta,
            ..Self::new(GraphKind::Wsg, n, seed)
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return config("n must be positive");
        }
        match self.kind {
            GraphKind::Lat => {
                let side = lattice_side(n).ok_or_else(|| {
                    Error::Config(format!("LAT requires a perfect-square n, got {n}"))
                })?;
                if side < 3 {
                    return config(format!("LAT requires at least a 3x3 torus, got n={n}"));
                }
                if self.k != 4 {
                    return config(format!("LAT supports k=4 only, got k={}", self.k));
                }
            }
            GraphKind::Rrg => {
                if self.k >= n {
                    return config(format!("RRG requires k < n, got k={} n={n}", self.k));
                }
                if !(n * self.k).is_multiple_of(2) {
                    return config(format!("RRG requires n*k even, got n={n} k={}", self.k));
                }
            }
            GraphKind::Erg => {
                let max = n * (n - 1) / 2;
                if self.m_edges > max {
                    return config(format!(
                        "ERG m_edges={} exceeds n(n-1)/2={max}",
                        self.m_edges
                    ));
                }
            }
            GraphKind::Plg => {
                if self.m_per_node < 1 {
                    return config("PLG requires m_per_node >= 1");
                }
                if n <= self.m_per_node {
                    return config(format!(
                        "PLG requires n > m_per_node, got n={n} m_per_node={}",
                        self.m_per_node
                    ));
                }
                if !(0.0..=1.0).contains(&self.triad_prob) {
                    return config("triad_prob must lie in [0,1]");
                }
            }
            GraphKind::Wsg => {
                if !self.k.is_multiple_of(2) {
                    return config(format!("WSG requires even k, got {}", self.k));
                }
                if self.k >= n {
                    return config(format!("WSG requires k < n, got k={} n={n}", self.k));
                }
                if !(0.0..=1.0).contains(&self.beta) {
                    return config("beta must lie in [0,1]");
                }
            }
        }
        Ok(())
    }

    /// Generates the layer described by this spec.
    pub fn generate(&self) -> Result<LayerGraph> {
        match self.kind {
            GraphKind::Lat => generators::gen_lattice(self),
            GraphKind::Rrg => generators::gen_rrg(self),
            GraphKind::Erg => generators::gen_erg(self),
            GraphKind::Plg => generators::gen_plg(self),
            GraphKind::Wsg => generators::gen_wsg(self),
        }
    }
}

pub(crate) fn lattice_side(n: usize) -> Option<usize> {
    let side = (n as f64).sqrt().round() as usize;
    (side * side == n).then_some(side)
}

/// Unseeded, size-free layer template as it appears in run configurations.
/// Missing parameters take the defaults of [`GraphSpec::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_edges: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_per_node: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triad_prob: Option<f64>,
}

impl LayerSpec {
    pub fn of(kind: GraphKind) -> Self {
        Self {
            kind,
            k: None,
            m_edges: None,
            m_per_node: None,
            beta: None,
            triad_prob: None,
        }
    }

    pub fn wsg(beta: f64) -> Self {
        Self {
            beta: Some(beta),
            ..Self::of(GraphKind::Wsg)
        }
    }

    pub fn resolve(&self, n: usize, seed: u64) -> GraphSpec {
        let base = GraphSpec::new(self.kind, n, seed);
        GraphSpec {
            k: self.k.unwrap_or(base.k),
            m_edges: self.m_edges.unwrap_or(base.m_edges),
            m_per_node: self.m_per_node.unwrap_or(base.m_per_node),
            beta: self.beta.unwrap_or(base.beta),
            triad_prob: self.triad_prob.unwrap_or(base.triad_prob),
            ..base
        }
    }

    /// The same template with the parameters relevant to `kind` made explicit.
    pub fn filled(&self, n: usize) -> Self {
        let spec = self.resolve(n, 0);
        let mut out = Self::of(self.kind);
        match self.kind {
            GraphKind::Lat => {}
            GraphKind::Rrg => out.k = Some(spec.k),
            GraphKind::Erg => out.m_edges = Some(spec.m_edges),
            GraphKind::Plg => {
                out.m_per_node = Some(spec.m_per_node);
                out.triad_prob = Some(spec.triad_prob);
            }
            GraphKind::Wsg => {
                out.k = Some(spec.k);
                out.beta = Some(spec.beta);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GraphSpec::lattice(10, 0).validate().is_err());
        assert!(GraphSpec::lattice(4, 0).validate().is_err());
        assert!(GraphSpec::lattice(9, 0).validate().is_ok());
        assert!(GraphSpec::rrg(5, 3, 0).validate().is_err());
        assert!(GraphSpec::rrg(5, 5, 0).validate().is_err());
        assert!(GraphSpec::rrg(5, 4, 0).validate().is_ok());
        assert!(GraphSpec::erg(3, 4, 0).validate().is_err());
        assert!(GraphSpec::erg(3, 3, 0).validate().is_ok());
        assert!(GraphSpec::plg(2, 2, 0).validate().is_err());
        assert!(GraphSpec::wsg(10, 3, 0.1, 0).validate().is_err());
        assert!(GraphSpec::wsg(10, 4, 1.5, 0).validate().is_err());
        assert!(GraphSpec::wsg(10, 4, 1.0, 0).validate().is_ok());
    }

    #[test]
    fn defaults_give_mean_degree_four() {
        let s = GraphSpec::new(GraphKind::Erg, 6400, 0);
        assert_eq!(s.m_edges, 12800);
        assert_eq!(s.k, 4);
        assert_eq!(s.m_per_node, 2);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("wsg".parse::<GraphKind>().unwrap(), GraphKind::Wsg);
        assert!("foo".parse::<GraphKind>().is_err());
    }

    #[test]
    fn layer_spec_fill() {
        let l = LayerSpec::of(GraphKind::Wsg).filled(100);
        assert_eq!(l.k, Some(4));
        assert_eq!(l.beta, Some(DEFAULT_BETA));
        assert_eq!(l.m_edges, None);
        assert_eq!(LayerSpec::of(GraphKind::Erg).resolve(100, 9).m_edges, 200);
    }
}
