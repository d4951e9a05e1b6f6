//! Several vertices arriving at once, including edges among themselves.
//!
//! cargo run --example batch_arrivals

use stream_embed::graph::{decompose_batch, BatchArrival, DynGraph, VertexId};
use stream_embed::spectral::{spectral_embed, SolverConfig};
use stream_embed::update::{StreamConfig, StreamState};

fn main() -> stream_embed::Result<()> {
    let ring: Vec<(VertexId, VertexId)> = (0..8).map(|i| (VertexId(i), VertexId((i + 1) % 8))).collect();
    let graph = DynGraph::from_edges(8, &ring)?;
    let f = spectral_embed(&graph, 3, &SolverConfig::default())?;
    let mut state = StreamState::new(graph, f, StreamConfig::default())?;

    let batch = BatchArrival {
        vertices: vec![VertexId(9), VertexId(8)],
        edges: vec![(VertexId(8), VertexId(0)), (VertexId(9), VertexId(8)), (VertexId(4), VertexId(9))],
    };
    for event in decompose_batch(state.graph().vertex_count(), &batch)? {
        let out = state.process_arrival(&event)?;
        println!(
            "vertex {} edges {:?} influenced {:?} row {:+.4?}",
            event.vertex.0,
            event.edges.iter().map(|v| v.0).collect::<Vec<_>>(),
            out.influence.influenced.iter().map(|v| v.0).collect::<Vec<_>>(),
            state.embedding().row(event.vertex)
        );
    }
    Ok(())
}
