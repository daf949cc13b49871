//! Seeded generators for the five layer topologies.
//!
//! Every generator is a pure function of its [`GraphSpec`], including the seed.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::spec::lattice_side;
use super::{GraphKind, GraphSpec, LayerGraph};
use crate::error::{config, Result};
use crate::seed::rng_from;

/// Attempts of the pairing model before giving up on a simple regular graph.
pub const RRG_MAX_RESTARTS: usize = 1000;

fn check(spec: &GraphSpec, kind: GraphKind) -> Result<()> {
    if spec.kind != kind {
        return config(format!("expected a {kind} spec, got {}", spec.kind));
    }
    spec.validate()
}

/// 4-regular square torus. Node `(row, col)` has index `row * side + col`.
pub fn gen_lattice(spec: &GraphSpec) -> Result<LayerGraph> {
    check(spec, GraphKind::Lat)?;
    let side = lattice_side(spec.n).expect("validated");
    let mut edges = Vec::with_capacity(2 * spec.n);
    for row in 0..side {
        for col in 0..side {
            let u = (row * side + col) as u32;
            let right = (row * side + (col + 1) % side) as u32;
            let down = (((row + 1) % side) * side + col) as u32;
            edges.push((u, right));
            edges.push((u, down));
        }
    }
    LayerGraph::from_edges(spec.n, &edges)
}

/// Random `k`-regular graph by the pairing (configuration) model, restarting
/// from scratch whenever a self-loop or multi-edge appears.
pub fn gen_rrg(spec: &GraphSpec) -> Result<LayerGraph> {
    check(spec, GraphKind::Rrg)?;
    let (n, k) = (spec.n, spec.k);
    let mut rng = rng_from(spec.seed);
    let mut stubs: Vec<u32> = (0..n as u32)
        .flat_map(|u| std::iter::repeat_n(u, k))
        .collect();
    'attempt: for _ in 0..RRG_MAX_RESTARTS {
        stubs.shuffle(&mut rng);
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::with_capacity(k); n];
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adjacency[u as usize].contains(&v) {
                continue 'attempt;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        return LayerGraph::from_adjacency(adjacency);
    }
    config(format!(
        "RRG pairing model failed {RRG_MAX_RESTARTS} times for n={n} k={k}"
    ))
}

/// Uniform graph with exactly `m_edges` edges, by rejection sampling of
/// distinct unordered pairs. Dense requests sample the complement instead.
pub fn gen_erg(spec: &GraphSpec) -> Result<LayerGraph> {
    check(spec, GraphKind::Erg)?;
    let n = spec.n;
    let max = n * (n - 1) / 2;
    let mut rng = rng_from(spec.seed);
    let dense = spec.m_edges > max / 2;
    let wanted = if dense {
        max - spec.m_edges
    } else {
        spec.m_edges
    };
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(wanted);
    while chosen.len() < wanted {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u != v {
            chosen.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(u32, u32)> = if dense {
        (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .filter(|e| !chosen.contains(e))
            .collect()
    } else {
        chosen.into_iter().collect()
    };
    LayerGraph::from_edges(n, &edges)
}

/// Growing preferential attachment seeded with a clique on `m_per_node + 1`
/// nodes. Each new node attaches `m_per_node` edges to distinct existing
/// nodes chosen proportionally to degree; with probability `triad_prob` an
/// attachment after the first closes a triangle with a neighbor of the last
/// preferential target instead.
pub fn gen_plg(spec: &GraphSpec) -> Result<LayerGraph> {
    check(spec, GraphKind::Plg)?;
    let (n, m) = (spec.n, spec.m_per_node);
    let mut rng = rng_from(spec.seed);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    // One entry per edge endpoint, so a uniform pick is degree-proportional.
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * m * n);
    for u in 0..=m as u32 {
        for v in u + 1..=m as u32 {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
            endpoints.extend([u, v]);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(m);
    for source in (m + 1)..n {
        targets.clear();
        let mut last_pa = preferential_pick(&endpoints, &targets, &mut rng);
        targets.push(last_pa);
        while targets.len() < m {
            if spec.triad_prob > 0.0 && rng.random::<f64>() < spec.triad_prob {
                let open: Vec<u32> = adjacency[last_pa as usize]
                    .iter()
                    .copied()
                    .filter(|v| !targets.contains(v))
                    .collect();
                if let Some(&v) = open.as_slice().choose(&mut rng) {
                    targets.push(v);
                    continue;
                }
            }
            last_pa = preferential_pick(&endpoints, &targets, &mut rng);
            targets.push(last_pa);
        }
        for &t in &targets {
            adjacency[source].push(t);
            adjacency[t as usize].push(source as u32);
            endpoints.extend([source as u32, t]);
        }
    }
    LayerGraph::from_adjacency(adjacency)
}

fn preferential_pick(endpoints: &[u32], taken: &[u32], rng: &mut impl Rng) -> u32 {
    loop {
        let v = endpoints[rng.random_range(0..endpoints.len())];
        if !taken.contains(&v) {
            return v;
        }
    }
}

/// Watts–Strogatz graph; see [`gen_wsg_counted`].
pub fn gen_wsg(spec: &GraphSpec) -> Result<LayerGraph> {
    gen_wsg_counted(spec).map(|(g, _)| g)
}

/// Ring lattice where node `u` links to `u+1..=u+k/2` (mod n), then each ring
/// edge `(u, u+j)`, visited by node and then offset, is rewired with
/// probability `beta` to `(u, w)` for a uniform `w`. A candidate that would
/// create a self-loop or duplicate edge is skipped. Returns the graph and the
/// number of edges actually rewired.
pub fn gen_wsg_counted(spec: &GraphSpec) -> Result<(LayerGraph, usize)> {
    check(spec, GraphKind::Wsg)?;
    let (n, half) = (spec.n, spec.k / 2);
    let mut rng = rng_from(spec.seed);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::with_capacity(spec.k); n];
    for u in 0..n {
        for j in 1..=half {
            let v = (u + j) % n;
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
    }
    let mut rewired = 0;
    for u in 0..n {
        for j in 1..=half {
            if rng.random::<f64>() >= spec.beta {
                continue;
            }
            let w = rng.random_range(0..n);
            if w == u || adjacency[u].contains(&(w as u32)) {
                continue;
            }
            let v = (u + j) % n;
            adjacency[u].retain(|&x| x as usize != v);
            adjacency[v].retain(|&x| x as usize != u);
            adjacency[u].push(w as u32);
            adjacency[w].push(u as u32);
            rewired += 1;
        }
    }
    Ok((LayerGraph::from_adjacency(adjacency)?, rewired))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_3x3_neighbors() {
        let g = gen_lattice(&GraphSpec::lattice(9, 0)).unwrap();
        // (0,0) touches (0,1), (0,2), (1,0), (2,0)
        assert_eq!(g.neighbors(0), &[1, 2, 3, 6]);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert_eq!(g.edge_count(), 18);
    }

    #[test]
    fn lattice_edge_count() {
        let g = gen_lattice(&GraphSpec::lattice(6400, 0)).unwrap();
        assert_eq!(g.edge_count(), 12800);
        assert!(gen_lattice(&GraphSpec::lattice(4, 0)).is_err());
        assert!(gen_lattice(&GraphSpec::lattice(50, 0)).is_err());
    }

    #[test]
    fn rrg_k5_is_complete() {
        let g = gen_rrg(&GraphSpec::rrg(5, 4, 3)).unwrap();
        assert_eq!(g.edge_count(), 10);
        for u in 0..5 {
            assert_eq!(g.degree(u), 4);
        }
    }

    #[test]
    fn rrg_sizes() {
        let g = gen_rrg(&GraphSpec::rrg(400, 4, 1)).unwrap();
        assert_eq!(g.edge_count(), 800);
        let g = gen_rrg(&GraphSpec::rrg(6400, 4, 1)).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(gen_rrg(&GraphSpec::rrg(5, 3, 1)).is_err());
    }

    #[test]
    fn erg_exact_edges() {
        let g = gen_erg(&GraphSpec::erg(3, 3, 5)).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let g = gen_erg(&GraphSpec::erg(6400, 12800, 5)).unwrap();
        assert_eq!(g.edge_count(), 12800);
        let mean = g.degrees().iter().sum::<usize>() as f64 / 6400.0;
        assert_eq!(mean, 4.0);
        let dense = gen_erg(&GraphSpec::erg(20, 180, 5)).unwrap();
        assert_eq!(dense.edge_count(), 180);
        assert!(gen_erg(&GraphSpec::erg(3, 4, 5)).is_err());
    }

    #[test]
    fn erg_equivalent_edge_probability() {
        // m / (n(n-1)/2) = 4 / (n - 1) = 6.2510e-4
        let p: f64 = 12800.0 / (6400.0 * 6399.0 / 2.0);
        assert!((p - 4.0 / 6399.0).abs() < 1e-18);
        assert!((p - 6.2510e-4_f64).abs() < 1e-8);
    }

    #[test]
    fn plg_smallest_case_is_the_seed_clique() {
        // With m=2 the seed clique has 3 nodes, so n=3 adds nothing.
        let g = gen_plg(&GraphSpec::plg(3, 2, 0)).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        // The fourth node attaches to two distinct clique nodes.
        let g = gen_plg(&GraphSpec::plg(4, 2, 0)).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.degree(3), 2);
    }

    #[test]
    fn plg_mean_degree() {
        let g = gen_plg(&GraphSpec::plg(6400, 2, 11)).unwrap();
        // 3 clique edges + 2 per added node
        assert_eq!(g.edge_count(), 3 + 2 * 6397);
        let mean = 2.0 * g.edge_count() as f64 / 6400.0;
        assert!((mean - 4.0).abs() < 0.01);
    }

    #[test]
    fn plg_with_triads_keeps_edge_count() {
        let spec = GraphSpec {
            triad_prob: 0.8,
            ..GraphSpec::plg(1000, 3, 2)
        };
        let g = gen_plg(&spec).unwrap();
        assert_eq!(g.edge_count(), 6 + 3 * 996);
    }

    #[test]
    fn wsg_without_rewiring_is_ring() {
        let (g, rewired) = gen_wsg_counted(&GraphSpec::wsg(6400, 4, 0.0, 1)).unwrap();
        assert_eq!(rewired, 0);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert_eq!(g.neighbors(0), &[1, 2, 6398, 6399]);
    }

    #[test]
    fn wsg_full_rewiring_keeps_edge_count() {
        let (g, rewired) = gen_wsg_counted(&GraphSpec::wsg(500, 6, 1.0, 1)).unwrap();
        assert_eq!(g.edge_count(), 1500);
        assert!(rewired > 1300);
    }

    #[test]
    fn kind_mismatch_rejected() {
        assert!(gen_rrg(&GraphSpec::lattice(9, 0)).is_err());
    }
}
