//! Embed a prefix offline, then absorb the remaining vertices one by one.
//!
//! cargo run --release --example online_stream -- [vertices] [depth]

use stream_embed::graph::{stream_from_edgelist, DynGraph};
use stream_embed::io::{generate_sbm, SbmSpec};
use stream_embed::objective::orthogonality_residual;
use stream_embed::spectral::{spectral_embed, SolverConfig};
use stream_embed::update::{StreamConfig, StreamState};

fn main() -> stream_embed::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let depth: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (edges, _) = generate_sbm(&SbmSpec::with_average_degree(n, 10.0, 0.8, 1))?;
    let stream = stream_from_edgelist(&edges, n)?;
    let prefix = n / 5;
    let graph = DynGraph::from_events(&stream.events[..prefix])?;
    let f = spectral_embed(&graph, 16, &SolverConfig::default())?;
    let mut state = StreamState::new(graph, f, StreamConfig { depth, seed: 7, ..StreamConfig::default() })?;

    let mut update_ns = Vec::new();
    let mut sizes = 0usize;
    for (i, event) in stream.events[prefix..].iter().enumerate() {
        let out = state.process_arrival(event)?;
        update_ns.push(out.timing.influence_ns + out.timing.update_ns);
        sizes += out.timing.influenced_size;
        if (i + 1) % 400 == 0 {
            println!(
                "{:>6} vertices  residual {:.2e}",
                state.graph().vertex_count(),
                orthogonality_residual(state.embedding())
            );
        }
    }
    update_ns.sort_unstable();
    println!(
        "{} arrivals, mean influenced set {:.2}, median arrival {} ns",
        update_ns.len(),
        sizes as f64 / update_ns.len() as f64,
        update_ns[update_ns.len() / 2]
    );
    Ok(())
}
