//! Read an edge list and labels from disk, then score a streaming run.
//!
//! cargo run --release --example load_edgelist -- [edges.tsv labels.tsv]
//!
//! Without arguments a small two-block graph is written to the temp dir first.

use std::fs::File;
use std::path::PathBuf;

use stream_embed::eval::{run_streaming_experiment, ExperimentConfig};
use stream_embed::graph::stream_from_edgelist;
use stream_embed::io::{generate_sbm, load_edgelist, load_labels, write_edgelist, write_labels, SbmSpec};

fn main() -> stream_embed::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (edges_path, labels_path) = match args.as_slice() {
        [e, l] => (PathBuf::from(e), PathBuf::from(l)),
        _ => {
            let dir = std::env::temp_dir();
            let (edges, labels) = generate_sbm(&SbmSpec {
                block_sizes: vec![80, 80],
                p_in: 0.15,
                p_out: 0.01,
                seed: 5,
                shuffle_ids: true,
            })?;
            let (e, l) = (dir.join("stream_embed_edges.tsv"), dir.join("stream_embed_labels.tsv"));
            write_edgelist(File::create(&e)?, &edges)?;
            write_labels(File::create(&l)?, &labels)?;
            (e, l)
        }
    };
    let loaded = load_edgelist(&edges_path)?;
    println!(
        "{} vertices, {} edges ({} duplicates, {} self-loops dropped)",
        loaded.vertex_count,
        loaded.edges.len(),
        loaded.duplicates,
        loaded.self_loops
    );
    let data = load_labels(&labels_path, &loaded.ids)?;
    let stream = stream_from_edgelist(&loaded.edges, loaded.vertex_count)?;
    let cfg = ExperimentConfig {
        k: 8,
        train_fraction: 0.3,
        ..ExperimentConfig::default()
    };
    let report = run_streaming_experiment(&stream.events, &data, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
