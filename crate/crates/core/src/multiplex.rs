//! Two layers over one node set, joined by a random one-to-one pairing.
//!
//! Nodes are addressed by their layer-A index ("canonical" index). Layer B is
//! relabeled into canonical indices once at construction, so dynamics never
//! translate indices.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graphgen::LayerGraph;
use crate::seed::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    A,
    B,
}

#[derive(Debug, Clone)]
pub struct Multiplex {
    layer_a: LayerGraph,
    layer_b: LayerGraph,
    /// `map_ab[i]` is the layer-B index of canonical node `i`.
    map_ab: Vec<u32>,
    /// Layer B with nodes renamed to canonical indices.
    canonical_b: LayerGraph,
}

impl Multiplex {
    /// Pairs the layers through a uniformly random permutation drawn from `seed`.
    pub fn pair_layers(layer_a: LayerGraph, layer_b: LayerGraph, seed: u64) -> Result<Self> {
        let n = layer_a.node_count();
        let mut map_ab: Vec<u32> = (0..n as u32).collect();
        map_ab.shuffle(&mut rng_from(seed));
        Self::with_map(layer_a, layer_b, map_ab)
    }

    /// Pairs the layers through an explicit map (`map_ab[i]` = layer-B index
    /// of canonical node `i`).
    pub fn with_map(layer_a: LayerGraph, layer_b: LayerGraph, map_ab: Vec<u32>) -> Result<Self> {
        let n = layer_a.node_count();
        if layer_b.node_count() != n {
            return Err(Error::Config(format!(
                "layers have different node counts ({n} vs {})",
                layer_b.node_count()
            )));
        }
        if map_ab.len() != n {
            return Err(Error::Config(format!(
                "map has {} entries for {n} nodes",
                map_ab.len()
            )));
        }
        let mut inverse = vec![u32::MAX; n];
        for (i, &j) in map_ab.iter().enumerate() {
            let slot = inverse
                .get_mut(j as usize)
                .ok_or_else(|| Error::Config(format!("map entry {j} out of range")))?;
            if *slot != u32::MAX {
                return Err(Error::Config(format!(
                    "map is not a bijection: {j} repeated"
                )));
            }
            *slot = i as u32;
        }
        // Node j of layer B becomes canonical node inverse[j].
        let canonical_b = layer_b.relabel(&inverse);
        Ok(Self {
            layer_a,
            layer_b,
            map_ab,
            canonical_b,
        })
    }

    pub fn node_count(&self) -> usize {
        self.layer_a.node_count()
    }

    pub fn layer_a(&self) -> &LayerGraph {
        &self.layer_a
    }

    /// Layer B in its own (uncanonicalized) indexing.
    pub fn layer_b(&self) -> &LayerGraph {
        &self.layer_b
    }

    pub fn map_ab(&self) -> &[u32] {
        &self.map_ab
    }

    /// The layer's adjacency in canonical indices.
    #[inline]
    pub fn layer(&self, layer: Layer) -> &LayerGraph {
        match layer {
            Layer::A => &self.layer_a,
            Layer::B => &self.canonical_b,
        }
    }

    /// Neighbors of canonical node `node` in `layer`, as canonical indices.
    pub fn neighbors_of(&self, node: usize, layer: Layer) -> Result<&[u32]> {
        if node >= self.node_count() {
            return Err(Error::Usage(format!(
                "node {node} out of range (n={})",
                self.node_count()
            )));
        }
        Ok(self.layer(layer).neighbors(node))
    }
}
