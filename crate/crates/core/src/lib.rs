//! Finite higher-rank graphs given by an edge-colored skeleton and an
//! explicit set of commuting squares.
//!
//! The crate validates the factorization conditions, rewrites paths to
//! normal forms, and runs the Reduction, Delay and Complete-Edge Reduction
//! moves together with the realizations that relate their outputs to their
//! inputs.

pub mod error;
pub mod export;
pub mod factorization;
pub mod format;
pub mod generators;
pub mod kgraph;
pub mod moves;
pub mod saturation;
pub mod skeleton;

pub use error::{Error, Result};
pub use factorization::{Path, Square, SquareSet};
pub use kgraph::{assemble, KGraph};
pub use skeleton::{ColorSet, ColoredDigraph, EdgeId, VertexId};
