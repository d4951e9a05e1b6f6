//! Closed-form representation generation and update for one arrival.
//!
//! The new vertex receives the mean `f` of the influenced rows, and every
//! influenced row moves by `-alpha * f` with `alpha = 1 - sqrt(1 - 1/|I|)`.
//! That `alpha` is the root of `|I| a^2 - 2 |I| a + 1 = 0`, which is exactly
//! the condition for `F^T F` to be unchanged by the update.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArrivalEvent, DynGraph, VertexId};
use crate::influence::{
    arrival_seed, incremental_influenced_set, influenced_set, InfluenceCache, InfluenceConfig,
    InfluenceResult,
};

/// Step size for an influenced set of `size` vertices.
pub fn alpha(size: usize) -> Result<f64> {
    if size == 0 {
        return Err(Error::EmptyInfluence);
    }
    Ok(1.0 - (1.0 - 1.0 / size as f64).sqrt())
}

/// Mean of the influenced rows; the zero vector when nothing is influenced.
pub fn generate_new_row(f: &EmbeddingMatrix, influenced: &[VertexId]) -> Vec<f64> {
    let mut row = vec![0.0; f.dim()];
    if influenced.is_empty() {
        return row;
    }
    for &u in influenced {
        for (acc, x) in row.iter_mut().zip(f.row(u)) {
            *acc += x;
        }
    }
    let scale = 1.0 / influenced.len() as f64;
    row.iter_mut().for_each(|x| *x *= scale);
    row
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateStep {
    pub new_vertex: VertexId,
    pub influenced: Vec<VertexId>,
    /// `None` when the influenced set is empty and no row was adjusted.
    pub alpha: Option<f64>,
    pub new_row: Vec<f64>,
}

/// Appends the row of `new_vertex` and adjusts the influenced rows in place.
pub fn apply_update(
    f: &mut EmbeddingMatrix,
    new_vertex: VertexId,
    influenced: &[VertexId],
) -> Result<UpdateStep> {
    if new_vertex.index() != f.rows() {
        return Err(Error::NonContiguousVertex {
            expected: VertexId(f.rows()),
            got: new_vertex,
        });
    }
    let mut sorted = influenced.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidInfluenced(format!("{} listed twice", pair[0])));
        }
    }
    if let Some(&last) = sorted.last() {
        if last == new_vertex {
            return Err(Error::InvalidInfluenced(format!(
                "contains the arriving vertex {new_vertex}"
            )));
        }
        if last.index() > f.rows() {
            return Err(Error::InvalidInfluenced(format!("{last} is not present")));
        }
    }

    // the new row is built from the pre-update rows
    let new_row = generate_new_row(f, influenced);
    let step_alpha = if influenced.is_empty() {
        None
    } else {
        let a = alpha(influenced.len())?;
        for &u in influenced {
            for (x, y) in f.row_mut(u).iter_mut().zip(&new_row) {
                *x -= a * y;
            }
        }
        Some(a)
    };
    f.push_row(&new_row);
    Ok(UpdateStep {
        new_vertex,
        influenced: influenced.to_vec(),
        alpha: step_alpha,
        new_row,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub depth: usize,
    pub seed: u64,
    /// Use cached downstream cascades of earlier arrivals.
    pub incremental: bool,
    /// Re-orthonormalize every this many arrivals; 0 disables the guard.
    pub reorth_interval: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            depth: 1,
            seed: 0,
            incremental: false,
            reorth_interval: 0,
        }
    }
}

/// Wall-clock cost of one arrival, split into cascade sampling and the
/// row generation/adjustment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub step: usize,
    pub vertex: VertexId,
    pub influence_ns: u64,
    pub update_ns: u64,
    pub influenced_size: usize,
}

#[derive(Clone, Debug)]
pub struct ArrivalOutcome {
    pub influence: InfluenceResult,
    pub step: UpdateStep,
    pub timing: TimingRecord,
}

/// Graph, embedding and cascade cache advanced one arrival at a time.
#[derive(Clone, Debug)]
pub struct StreamState {
    graph: DynGraph,
    embedding: EmbeddingMatrix,
    cache: InfluenceCache,
    config: StreamConfig,
    steps: usize,
}

impl StreamState {
    pub fn new(graph: DynGraph, embedding: EmbeddingMatrix, config: StreamConfig) -> Result<Self> {
        if graph.vertex_count() != embedding.rows() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} vertices but embedding has {} rows",
                graph.vertex_count(),
                embedding.rows()
            )));
        }
        InfluenceConfig::new(config.depth, config.seed)?;
        Ok(StreamState {
            graph,
            embedding,
            cache: InfluenceCache::new(),
            config,
            steps: 0,
        })
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn embedding(&self) -> &EmbeddingMatrix {
        &self.embedding
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn into_parts(self) -> (DynGraph, EmbeddingMatrix) {
        (self.graph, self.embedding)
    }

    /// Applies the arrival to the graph, samples the influenced set on the
    /// post-arrival graph, then updates the embedding.
    pub fn process_arrival(&mut self, event: &ArrivalEvent) -> Result<ArrivalOutcome> {
        self.graph.apply_arrival(event)?;
        let source = event.vertex;
        let cfg = InfluenceConfig {
            depth: self.config.depth,
            seed: arrival_seed(self.config.seed, source),
        };

        let started = Instant::now();
        let influence = if self.config.incremental {
            incremental_influenced_set(&self.cache, &self.graph, source, &cfg)
        } else {
            influenced_set(&self.graph, source, &cfg)
        };
        let sampled = Instant::now();
        let step = apply_update(&mut self.embedding, source, &influence.influenced)?;
        let finished = Instant::now();

        self.steps += 1;
        if self.config.reorth_interval > 0 && self.steps.is_multiple_of(self.config.reorth_interval) {
            self.embedding.reorthonormalize();
        }
        let timing = TimingRecord {
            step: self.steps,
            vertex: source,
            influence_ns: (sampled - started).as_nanos() as u64,
            update_ns: (finished - sampled).as_nanos() as u64,
            influenced_size: influence.len(),
        };
        if self.config.incremental {
            self.cache.insert(source, influence.clone());
        }
        Ok(ArrivalOutcome {
            influence,
            step,
            timing,
        })
    }
}
