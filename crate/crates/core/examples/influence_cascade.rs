//! Influence cascades from a new vertex, and how often each vertex is hit.
//!
//! cargo run --example influence_cascade -- [depth] [trials]

use stream_embed::graph::{DynGraph, VertexId};
use stream_embed::influence::{influence_probability, influenced_set, InfluenceConfig};

fn main() -> stream_embed::Result<()> {
    let depth: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let trials: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    // vertex 6 is the newcomer, attached to a hub and to a leaf
    let edges: Vec<(VertexId, VertexId)> = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (0, 6), (5, 6)]
        .iter()
        .map(|&(u, v)| (VertexId(u), VertexId(v)))
        .collect();
    let graph = DynGraph::from_edges(7, &edges)?;
    let source = VertexId(6);

    let sample = influenced_set(&graph, source, &InfluenceConfig::new(depth, 42)?);
    println!("seed 42 rounds: {:?}", sample.rounds);

    let mut hits = [0u64; 6];
    for seed in 0..trials {
        for v in influenced_set(&graph, source, &InfluenceConfig::new(depth, seed)?).influenced {
            hits[v.0] += 1;
        }
    }
    println!("vertex  degree  p_activate  frequency");
    for (v, &h) in hits.iter().enumerate() {
        let v = VertexId(v);
        println!(
            "{:>6}  {:>6}  {:>10.3}  {:>9.4}",
            v.0,
            graph.degree(v),
            influence_probability(&graph, v)?,
            h as f64 / trials as f64
        );
    }
    Ok(())
}
