//! Extremal uniform hypergraphs: bit-parallel kernels, property checkers
//! with witnesses, probabilistic constructions, conflict-avoiding packings,
//! exact extremal search, and exact-rational bounds.

pub mod bitset;
pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod packing;
pub mod properties;
pub mod rng;
pub mod search;

pub use bitset::BitSet;
pub use cli::cli_main;
pub use error::{HxError, Result};
pub use hypergraph::{Edge, Hypergraph, SubsetFamily};
