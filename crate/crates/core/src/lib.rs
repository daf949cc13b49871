//! Simulation of two interacting contagions on edge-colored multiplex
//! networks.
//!
//! Each contagion spreads on its own layer of a two-layer network that shares
//! one node set. Adoption depends on the active-infected neighbor densities
//! of both layers through a multivariate Hill function, spreaders go dormant
//! at a per-contagion rate, and the [`experiments`] module sweeps parameters
//! over many independent trials.

pub mod dynamics;
pub mod engine;
mod error;
pub mod experiments;
pub mod graphgen;
pub mod multiplex;
pub mod seed;

pub use error::{Error, Result};
