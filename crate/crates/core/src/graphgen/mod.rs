//! Layer topologies: the graph type, the five generators and path-length
//! measurement.

mod generators;
mod graph;
mod paths;
mod spec;

pub use generators::{
    gen_erg, gen_lattice, gen_plg, gen_rrg, gen_wsg, gen_wsg_counted, RRG_MAX_RESTARTS,
};
pub use graph::LayerGraph;
pub use paths::{mean_shortest_path, PathLengthReport, DEFAULT_PATH_SAMPLES};
pub use spec::{GraphKind, GraphSpec, LayerSpec, DEFAULT_BETA, DEFAULT_DEGREE, DEFAULT_M_PER_NODE};
