//! Offline embedding of a small graph and its leading eigenvalues.
//!
//! cargo run --example spectral_init

use stream_embed::graph::{DynGraph, VertexId};
use stream_embed::objective::orthogonality_residual;
use stream_embed::spectral::{spectral_embed_with_values, SolverConfig};

fn main() -> stream_embed::Result<()> {
    // two triangles joined by one bridge edge
    let edges: Vec<(VertexId, VertexId)> = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]
        .iter()
        .map(|&(u, v)| (VertexId(u), VertexId(v)))
        .collect();
    let graph = DynGraph::from_edges(6, &edges)?;
    let (f, values) = spectral_embed_with_values(&graph, 2, &SolverConfig::default())?;
    println!("eigenvalues {values:?}");
    for (v, row) in f.iter_rows().enumerate() {
        println!("vertex {v}: {row:+.4?}");
    }
    println!("|F^T F - I| = {:.2e}", orthogonality_residual(&f));
    Ok(())
}
