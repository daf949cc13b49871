use std::collections::VecDeque;

use rand::seq::index;

use super::LayerGraph;
use crate::seed::rng_from;

pub const DEFAULT_PATH_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLengthReport {
    /// Mean BFS distance from the sampled sources to every node they reach.
    pub mean: f64,
    /// False if some sampled source could not reach every node; `mean` then
    /// covers only the reachable pairs.
    pub connected: bool,
    pub sources: usize,
}

/// Characteristic path length estimated by BFS from `sample_size` distinct
/// random sources (all nodes when `sample_size >= n`).
pub fn mean_shortest_path(g: &LayerGraph, sample_size: usize, seed: u64) -> PathLengthReport {
    let n = g.node_count();
    let sources: Vec<usize> = if sample_size >= n {
        (0..n).collect()
    } else {
        let mut rng = rng_from(seed);
        let mut picked = index::sample(&mut rng, n, sample_size.max(1)).into_vec();
        picked.sort_unstable();
        picked
    };

    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut total: u64 = 0;
    let mut pairs: u64 = 0;
    let mut connected = true;
    for &s in &sources {
        dist.fill(u32::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &v in g.neighbors(u) {
                let v = v as usize;
                if dist[v] == u32::MAX {
                    dist[v] = du + 1;
                    total += u64::from(du + 1);
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        pairs += reached - 1;
        connected &= reached as usize == n;
    }
    let mean = if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    };
    PathLengthReport {
        mean,
        connected,
        sources: sources.len(),
    }
}
