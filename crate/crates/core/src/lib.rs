//! Steiner tree toolkit for fibre-network planning.
//!
//! Problems are ingested from pixel rasters or problem files, optionally
//! simplified and partitioned, solved with one of several solver families,
//! merged, lifted back to the original graph and validated.

pub mod graph;
pub mod io;
pub mod partition;
pub mod pipeline;
pub mod rng;
pub mod simplify;
pub mod solvers;
