use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::kmeans::kmeans;
use crate::eval::logreg::train_logreg_ovr;
use crate::eval::metrics::{completeness, f1_scores, nmi};
use crate::graph::{ArrivalEvent, DynGraph, VertexId};
use crate::objective::orthogonality_residual;
use crate::spectral::{spectral_embed, SolverConfig};
use crate::update::{StreamConfig, StreamState, TimingRecord};

pub const KMEANS_REPEATS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub labels: Vec<usize>,
    pub class_count: usize,
}

impl LabeledDataset {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let class_count = labels.iter().max().map_or(0, |m| m + 1);
        if class_count < 2 {
            return Err(Error::SingleClass);
        }
        Ok(LabeledDataset {
            labels,
            class_count,
        })
    }
}

/// Arrival-order split: the first `ceil(p |V|)` vertices form the offline
/// (and training) prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitProtocol {
    pub train_fraction: f64,
}

impl SplitProtocol {
    pub fn new(train_fraction: f64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1], got {train_fraction}"
            )));
        }
        Ok(SplitProtocol { train_fraction })
    }

    pub fn prefix_len(&self, vertex_count: usize) -> usize {
        ((self.train_fraction * vertex_count as f64).ceil() as usize).min(vertex_count)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub train_fraction: f64,
    pub depth: usize,
    pub seed: u64,
    pub l2: f64,
    pub reorth_interval: usize,
    pub incremental: bool,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 90,
            train_fraction: 0.2,
            depth: 1,
            seed: 0,
            l2: 1.0,
            reorth_interval: 0,
            incremental: false,
            solver: SolverConfig::default(),
        }
    }
}

/// Embeddings produced by one pass over a stream.
#[derive(Clone, Debug)]
pub struct StreamingRun {
    pub prefix: usize,
    /// Offline embedding of the prefix, before any online arrival.
    pub prefix_embedding: EmbeddingMatrix,
    /// Row of each post-prefix vertex as it was right after its arrival.
    pub arrival_rows: EmbeddingMatrix,
    pub final_embedding: EmbeddingMatrix,
    pub final_graph: DynGraph,
    pub timings: Vec<TimingRecord>,
}

/// Embeds `events[..prefix]` offline, then streams the rest.
pub fn stream_embedding(events: &[ArrivalEvent], cfg: &ExperimentConfig) -> Result<StreamingRun> {
    let split = SplitProtocol::new(cfg.train_fraction)?;
    let prefix = split.prefix_len(events.len());
    if cfg.k + 1 > prefix {
        return Err(Error::DimensionTooLarge {
            k: cfg.k,
            vertices: prefix,
        });
    }
    let graph = DynGraph::from_events(&events[..prefix])?;
    let prefix_embedding = spectral_embed(&graph, cfg.k, &cfg.solver)?;
    let mut state = StreamState::new(
        graph,
        prefix_embedding.clone(),
        StreamConfig {
            depth: cfg.depth,
            seed: cfg.seed,
            incremental: cfg.incremental,
            reorth_interval: cfg.reorth_interval,
        },
    )?;
    let mut arrival_rows = EmbeddingMatrix::zeros(0, cfg.k);
    let mut timings = Vec::with_capacity(events.len() - prefix);
    for event in &events[prefix..] {
        let outcome = state.process_arrival(event)?;
        arrival_rows.push_row(&outcome.step.new_row);
        timings.push(outcome.timing);
    }
    let (final_graph, final_embedding) = state.into_parts();
    Ok(StreamingRun {
        prefix,
        prefix_embedding,
        arrival_rows,
        final_embedding,
        final_graph,
        timings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub vertices: usize,
    pub edges: usize,
    pub prefix: usize,
    pub arrivals: usize,
    /// `None` when the test split is empty.
    pub micro_f1: Option<f64>,
    pub macro_f1: Option<f64>,
    pub nmi: f64,
    pub completeness: f64,
    pub nmi_per_repeat: Vec<f64>,
    pub completeness_per_repeat: Vec<f64>,
    pub empty_influence_arrivals: usize,
    pub mean_influenced: f64,
    pub orthogonality_residual: f64,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub per_arrival_times: Vec<TimingRecord>,
}

fn rows(m: &EmbeddingMatrix, range: std::ops::Range<usize>) -> Vec<Vec<f64>> {
    range.map(|v| m.row(VertexId(v)).to_vec()).collect()
}

fn classify(
    train: &[Vec<f64>],
    train_labels: &[usize],
    test: &[Vec<f64>],
    test_labels: &[usize],
    class_count: usize,
    l2: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    if test.is_empty() {
        return Ok((None, None));
    }
    let clf = train_logreg_ovr(train, train_labels, class_count, l2)?;
    let (micro, macro_) = f1_scores(test_labels, &clf.predict(test), class_count)?;
    Ok((Some(micro), Some(macro_)))
}

struct ClusterScores {
    nmi: Vec<f64>,
    completeness: Vec<f64>,
}

fn cluster(m: &EmbeddingMatrix, data: &LabeledDataset, seed: u64) -> Result<ClusterScores> {
    let xs = rows(m, 0..m.rows());
    let runs = kmeans(&xs, data.class_count, KMEANS_REPEATS, seed ^ 0x6b6d_6561_6e73)?;
    let mut scores = ClusterScores {
        nmi: Vec::with_capacity(runs.len()),
        completeness: Vec::with_capacity(runs.len()),
    };
    for run in &runs {
        scores.nmi.push(nmi(&run.assignment, &data.labels)?);
        scores.completeness.push(completeness(&run.assignment, &data.labels)?);
    }
    Ok(scores)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn check_labels(events: &[ArrivalEvent], data: &LabeledDataset) -> Result<()> {
    if data.labels.len() != events.len() {
        return Err(Error::LengthMismatch {
            left: events.len(),
            right: data.labels.len(),
        });
    }
    Ok(())
}

/// Streaming protocol: classifier trained on the prefix rows as they were
/// when the prefix was embedded, tested on arrival-time rows; clustering
/// on the final embedding.
pub fn run_streaming_experiment(
    events: &[ArrivalEvent],
    data: &LabeledDataset,
    cfg: &ExperimentConfig,
) -> Result<EvalReport> {
    check_labels(events, data)?;
    let run = stream_embedding(events, cfg)?;
    evaluate_run(&run, data, cfg)
}

pub fn evaluate_run(run: &StreamingRun, data: &LabeledDataset, cfg: &ExperimentConfig) -> Result<EvalReport> {
    let n = run.final_graph.vertex_count();
    let train = rows(&run.prefix_embedding, 0..run.prefix);
    let test = rows(&run.arrival_rows, 0..run.arrival_rows.rows());
    let (micro_f1, macro_f1) = classify(
        &train,
        &data.labels[..run.prefix],
        &test,
        &data.labels[run.prefix..],
        data.class_count,
        cfg.l2,
    )?;
    let scores = cluster(&run.final_embedding, data, cfg.seed)?;
    let empty = run.timings.iter().filter(|t| t.influenced_size == 0).count();
    let influenced: usize = run.timings.iter().map(|t| t.influenced_size).sum();
    Ok(EvalReport {
        method: "streaming".into(),
        vertices: n,
        edges: run.final_graph.edge_count(),
        prefix: run.prefix,
        arrivals: run.timings.len(),
        micro_f1,
        macro_f1,
        nmi: mean(&scores.nmi),
        completeness: mean(&scores.completeness),
        nmi_per_repeat: scores.nmi,
        completeness_per_repeat: scores.completeness,
        empty_influence_arrivals: empty,
        mean_influenced: influenced as f64 / run.timings.len().max(1) as f64,
        orthogonality_residual: orthogonality_residual(&run.final_embedding),
        config: cfg.clone(),
        per_arrival_times: run.timings.clone(),
    })
}

/// Offline reference: spectral embedding of the complete final graph, with
/// the same split and classifier as the streaming protocol.
pub fn run_retrain_baseline(
    events: &[ArrivalEvent],
    data: &LabeledDataset,
    cfg: &ExperimentConfig,
) -> Result<EvalReport> {
    check_labels(events, data)?;
    let split = SplitProtocol::new(cfg.train_fraction)?;
    let prefix = split.prefix_len(events.len());
    let graph = DynGraph::from_events(events)?;
    let f = spectral_embed(&graph, cfg.k, &cfg.solver)?;
    let n = graph.vertex_count();
    let (micro_f1, macro_f1) = classify(
        &rows(&f, 0..prefix),
        &data.labels[..prefix],
        &rows(&f, prefix..n),
        &data.labels[prefix..],
        data.class_count,
        cfg.l2,
    )?;
    let scores = cluster(&f, data, cfg.seed)?;
    Ok(EvalReport {
        method: "retrain".into(),
        vertices: n,
        edges: graph.edge_count(),
        prefix,
        arrivals: 0,
        micro_f1,
        macro_f1,
        nmi: mean(&scores.nmi),
        completeness: mean(&scores.completeness),
        nmi_per_repeat: scores.nmi,
        completeness_per_repeat: scores.completeness,
        empty_influence_arrivals: 0,
        mean_influenced: 0.0,
        orthogonality_residual: orthogonality_residual(&f),
        config: cfg.clone(),
        per_arrival_times: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::stream_from_edgelist;
    use crate::io::{generate_sbm, SbmSpec};

    fn small_sbm() -> (Vec<ArrivalEvent>, LabeledDataset) {
        let (edges, labels) = generate_sbm(&SbmSpec {
            block_sizes: vec![40, 40],
            p_in: 0.3,
            p_out: 0.02,
            seed: 11,
            shuffle_ids: true,
        })
        .unwrap();
        let stream = stream_from_edgelist(&edges, 80).unwrap();
        (stream.events, LabeledDataset::new(labels).unwrap())
    }

    #[test]
    fn prefix_rounds_up() {
        let split = SplitProtocol::new(0.3).unwrap();
        assert_eq!(split.prefix_len(10), 3);
        assert_eq!(split.prefix_len(11), 4);
        assert!(SplitProtocol::new(0.0).is_err());
        assert!(SplitProtocol::new(1.5).is_err());
    }

    #[test]
    fn full_prefix_skips_classification() {
        let (events, data) = small_sbm();
        let cfg = ExperimentConfig {
            k: 4,
            train_fraction: 1.0,
            ..ExperimentConfig::default()
        };
        let report = run_streaming_experiment(&events, &data, &cfg).unwrap();
        assert_eq!(report.micro_f1, None);
        assert_eq!(report.arrivals, 0);
        assert!(report.nmi >= 0.0 && report.nmi <= 1.0);
    }

    #[test]
    fn experiment_is_deterministic() {
        let (events, data) = small_sbm();
        let cfg = ExperimentConfig {
            k: 4,
            train_fraction: 0.4,
            seed: 3,
            ..ExperimentConfig::default()
        };
        let a = run_streaming_experiment(&events, &data, &cfg).unwrap();
        let b = run_streaming_experiment(&events, &data, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.arrivals, 48);
        assert_eq!(a.per_arrival_times.len(), 48);
        assert!(a.micro_f1.is_some());
    }

    #[test]
    fn arrival_rows_are_frozen() {
        let (events, _) = small_sbm();
        let cfg = ExperimentConfig {
            k: 4,
            train_fraction: 0.4,
            ..ExperimentConfig::default()
        };
        let run = stream_embedding(&events, &cfg).unwrap();
        assert_eq!(run.prefix, 32);
        assert_eq!(run.arrival_rows.rows(), 48);
        // later arrivals adjust earlier rows, but the stored copies keep the
        // arrival-time values
        let mut moved = 0;
        for i in 0..run.arrival_rows.rows() {
            let frozen = run.arrival_rows.row(VertexId(i));
            let last = run.final_embedding.row(VertexId(run.prefix + i));
            if frozen != last {
                moved += 1;
            }
        }
        assert!(moved > 0);
        let again = stream_embedding(&events, &cfg).unwrap();
        assert_eq!(run.arrival_rows, again.arrival_rows);
    }

    #[test]
    fn prefix_must_fit_dimension() {
        let (events, data) = small_sbm();
        let cfg = ExperimentConfig {
            k: 30,
            train_fraction: 0.1,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            run_streaming_experiment(&events, &data, &cfg),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
