//! Streaming versus full-retrain quality on a four-block model.
//!
//! cargo run --release --example evaluate_sbm -- [seeds] [depth]

use stream_embed::eval::{run_retrain_baseline, run_streaming_experiment, ExperimentConfig, LabeledDataset};
use stream_embed::graph::stream_from_edgelist;
use stream_embed::io::{generate_sbm, SbmSpec};

fn main() -> stream_embed::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let depth: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    println!("seed  stream_nmi  base_nmi  stream_micro  base_micro  empty_arrivals");
    let (mut s_nmi, mut b_nmi, mut s_f1, mut b_f1) = (0.0, 0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let (edges, labels) = generate_sbm(&SbmSpec {
            block_sizes: vec![250; 4],
            p_in: 0.1,
            p_out: 0.005,
            seed,
            shuffle_ids: true,
        })?;
        let stream = stream_from_edgelist(&edges, labels.len())?;
        let data = LabeledDataset::new(labels)?;
        let cfg = ExperimentConfig {
            k: 16,
            train_fraction: 0.3,
            depth,
            seed,
            ..ExperimentConfig::default()
        };
        let s = run_streaming_experiment(&stream.events, &data, &cfg)?;
        let b = run_retrain_baseline(&stream.events, &data, &cfg)?;
        println!(
            "{seed:>4}  {:>10.4}  {:>8.4}  {:>12.4}  {:>10.4}  {:>14}",
            s.nmi,
            b.nmi,
            s.micro_f1.unwrap_or(f64::NAN),
            b.micro_f1.unwrap_or(f64::NAN),
            s.empty_influence_arrivals
        );
        s_nmi += s.nmi;
        b_nmi += b.nmi;
        s_f1 += s.micro_f1.unwrap_or(0.0);
        b_f1 += b.micro_f1.unwrap_or(0.0);
    }
    let n = seeds as f64;
    println!(
        "mean  {:>10.4}  {:>8.4}  {:>12.4}  {:>10.4}",
        s_nmi / n,
        b_nmi / n,
        s_f1 / n,
        b_f1 / n
    );
    println!("nmi ratio {:.4}, micro-F1 ratio {:.4}", s_nmi / b_nmi, s_f1 / b_f1);
    Ok(())
}
