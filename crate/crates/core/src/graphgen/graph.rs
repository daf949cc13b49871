use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// An immutable simple undirected graph in compressed sparse row form.
///
/// Neighbor lists are sorted ascending; the graph has no self-loops and no
/// duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl LayerGraph {
    /// Builds a graph from undirected edges. Rejects self-loops, duplicate
    /// edges and endpoints outside `0..n`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("graph must have at least one node".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::Config(format!("node count {n} exceeds u32 range")));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Config(format!(
                    "edge ({u}, {v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::Config(format!("self-loop at node {u}")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for i in 0..n {
            let list = &mut neighbors[offsets[i]..offsets[i + 1]];
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Config(format!("duplicate edge at node {i}")));
            }
        }
        Ok(Self { offsets, neighbors })
    }

    /// Builds a graph from per-node neighbor lists, which must already be
    /// symmetric. Lists are sorted on the way in.
    pub fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Result<Self> {
        let edges: Vec<(u32, u32)> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| {
                list.iter()
                    .filter(move |&&v| (u as u32) < v)
                    .map(move |&v| (u as u32, v))
            })
            .collect();
        let g = Self::from_edges(adjacency.len(), &edges)?;
        for (u, list) in adjacency.iter().enumerate() {
            if list.len() != g.degree(u) {
                return Err(Error::Config(format!(
                    "adjacency of node {u} is not symmetric"
                )));
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once as `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn relabel(&self, perm: &[u32]) -> Self {
        let n = self.node_count();
        assert_eq!(perm.len(), n);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut inverse = vec![0usize; n];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new as usize] = old;
        }
        for &old in &inverse {
            offsets.push(offsets.last().unwrap() + self.degree(old));
        }
        let mut neighbors = Vec::with_capacity(self.neighbors.len());
        for &old in &inverse {
            let start = neighbors.len();
            neighbors.extend(self.neighbors(old).iter().map(|&v| perm[v as usize]));
            neighbors[start..].sort_unstable();
        }
        Self { offsets, neighbors }
    }

    /// Serializes to the edge-list text format: a `# n=<nodes>` header, then
    /// one `i j` line per edge with `i < j`, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n={}\n", self.node_count());
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the format written by [`LayerGraph::to_edge_list`].
    pub fn read_edge_list(reader: impl BufRead) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                if n.is_none() {
                    let value = header
                        .trim()
                        .strip_prefix("n=")
                        .ok_or_else(|| Error::Parse {
                            line: lineno,
                            msg: "expected header `# n=<nodes>`".into(),
                        })?;
                    n = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad node count: {e}"),
                    })?);
                }
                continue;
            }
            if n.is_none() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "edge before `# n=` header".into(),
                });
            }
            let mut parts = trimmed.split_whitespace();
            let mut field = |name: &str| -> Result<u32> {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: format!("missing {name}"),
                    })?
                    .parse::<u32>()
                    .map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            let u = field("source")?;
            let v = field("target")?;
            edges.push((u, v));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing `# n=` header".into(),
        })?;
        Self::from_edges(n, &edges)
    }
}
