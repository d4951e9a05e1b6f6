//! Online spectral embedding for graphs that grow one vertex at a time.
//!
//! A prefix of the stream is embedded offline with the smallest nontrivial
//! eigenvectors of the normalized Laplacian. Each later arrival runs a short
//! influence cascade from the new vertex; the new vertex receives the mean of
//! the influenced rows, and those rows are shifted so that the columns stay
//! orthonormal.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod influence;
pub mod io;
pub mod objective;
pub mod spectral;
pub mod update;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use graph::{ArrivalEvent, BatchArrival, DynGraph, EdgeStream, VertexId};
pub use influence::{influenced_set, InfluenceConfig, InfluenceResult};
pub use spectral::{spectral_embed, SolverConfig};
pub use update::{alpha, apply_update, StreamConfig, StreamState};
