//! Loss gap between the online embedding and a retrain after every arrival.
//!
//! cargo run --release --example deviation_diagnostic -- [seeds]

use stream_embed::graph::stream_from_edgelist;
use stream_embed::io::{generate_sbm, SbmSpec};
use stream_embed::objective::{deviation_diagnostic, DiagnosticConfig};
use stream_embed::spectral::SolverConfig;

fn main() -> stream_embed::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let (edges, labels) = generate_sbm(&SbmSpec {
        block_sizes: vec![50, 50],
        p_in: 0.2,
        p_out: 0.02,
        seed: 9,
        shuffle_ids: true,
    })?;
    let stream = stream_from_edgelist(&edges, labels.len())?;
    let cfg = DiagnosticConfig {
        prefix: 30,
        k: 8,
        depth: 1,
        solver: SolverConfig::default(),
    };
    let seeds: Vec<u64> = (0..seeds).collect();
    let report = deviation_diagnostic(&stream.events, &cfg, &seeds)?;
    for r in report.records.iter().filter(|r| r.seed == 0).take(10) {
        println!(
            "step {:>3}  alpha {:.4}  delta_L {:+.4}  smoothness {:.4}  homophily {:.4}",
            r.step, r.alpha, r.delta_l, r.smoothness_term, r.homophily_term
        );
    }
    println!(
        "{} records, {:.3} within 2 alpha, {} smoothness violations",
        report.records.len(),
        report.fraction_within_bound(),
        report.smoothness_violations()
    );
    Ok(())
}
