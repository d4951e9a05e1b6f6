//! Influenced-vertex identification with a depth-bounded weighted
//! independent cascade.
//!
//! A vertex activated in round `r` gets one Bernoulli attempt on each
//! neighbor that is not yet active in round `r + 1`; the attempt on `u`
//! succeeds with probability `1 / deg(u)` in the post-arrival graph. Attempts
//! are made in ascending order of attacker id and then neighbor id. Failed
//! attempts do not immunize: another active neighbor may try again.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DynGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceConfig {
    pub depth: usize,
    pub seed: u64,
}

impl InfluenceConfig {
    pub fn new(depth: usize, seed: u64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("influence depth must be at least 1".into()));
        }
        Ok(InfluenceConfig { depth, seed })
    }
}

/// Vertices activated by a cascade, grouped by the round that activated them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceResult {
    /// All activated vertices except the source, ascending.
    pub influenced: Vec<VertexId>,
    /// `rounds[r]` holds the vertices first activated in round `r + 1`, ascending.
    pub rounds: Vec<Vec<VertexId>>,
    pub seed: u64,
}

impl InfluenceResult {
    pub fn len(&self) -> usize {
        self.influenced.len()
    }

    pub fn is_empty(&self) -> bool {
        self.influenced.is_empty()
    }

    fn from_rounds(rounds: Vec<Vec<VertexId>>, seed: u64) -> Self {
        let mut influenced: Vec<VertexId> = rounds.iter().flatten().copied().collect();
        influenced.sort_unstable();
        InfluenceResult {
            influenced,
            rounds,
            seed,
        }
    }
}

/// Mixes the stream-wide seed with the arriving vertex id (SplitMix64 finalizer).
pub fn arrival_seed(global_seed: u64, source: VertexId) -> u64 {
    let mut z = global_seed ^ (source.0 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Probability that an active neighbor activates `target`: `1 / deg(target)`.
pub fn influence_probability(graph: &DynGraph, target: VertexId) -> Result<f64> {
    match graph.degree(target) {
        0 => Err(Error::IsolatedTarget(target)),
        d => Ok(1.0 / d as f64),
    }
}

/// One cascade round: every vertex of `frontier` attempts each inactive
/// neighbor once. Newly activated vertices are marked in `active`.
fn cascade_round(
    graph: &DynGraph,
    frontier: &[VertexId],
    active: &mut HashSet<VertexId>,
    rng: &mut ChaCha8Rng,
) -> Vec<VertexId> {
    let mut next = Vec::new();
    for &v in frontier {
        for &u in graph.neighbors(v) {
            if active.contains(&u) {
                continue;
            }
            // u is adjacent to v, so its degree is positive
            let p = 1.0 / graph.degree(u) as f64;
            if rng.random::<f64>() < p {
                active.insert(u);
                next.push(u);
            }
        }
    }
    next.sort_unstable();
    next
}

/// Runs the cascade from `source` for at most `cfg.depth` rounds.
pub fn influenced_set(graph: &DynGraph, source: VertexId, cfg: &InfluenceConfig) -> InfluenceResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut active = HashSet::new();
    active.insert(source);
    let mut frontier = vec![source];
    let mut rounds = Vec::new();
    for _ in 0..cfg.depth {
        let next = cascade_round(graph, &frontier, &mut active, &mut rng);
        if next.is_empty() {
            break;
        }
        rounds.push(next.clone());
        frontier = next;
    }
    InfluenceResult::from_rounds(rounds, cfg.seed)
}

/// Stored cascade results of earlier arrivals, keyed by source vertex.
#[derive(Clone, Debug, Default)]
pub struct InfluenceCache {
    results: HashMap<VertexId, InfluenceResult>,
}

impl InfluenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: VertexId, result: InfluenceResult) {
        self.results.insert(source, result);
    }

    pub fn get(&self, source: VertexId) -> Option<&InfluenceResult> {
        self.results.get(&source)
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }
}

/// Cascade that simulates only the first round and splices in the cached
/// downstream sets of the directly activated neighbors, truncated to the
/// remaining depth.
///
/// Cached sets were sampled when each neighbor arrived, on an older graph,
/// so beyond the first round the result is an approximation of
/// [`influenced_set`]. If any activated neighbor has no cached entry the
/// whole cascade is simulated directly with the same seed.
pub fn incremental_influenced_set(
    cache: &InfluenceCache,
    graph: &DynGraph,
    source: VertexId,
    cfg: &InfluenceConfig,
) -> InfluenceResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut active = HashSet::new();
    active.insert(source);
    let first = cascade_round(graph, &[source], &mut active, &mut rng);
    if first.is_empty() {
        return InfluenceResult::from_rounds(Vec::new(), cfg.seed);
    }
    if cfg.depth == 1 {
        return InfluenceResult::from_rounds(vec![first], cfg.seed);
    }
    let Some(cached) = first.iter().map(|&u| cache.get(u)).collect::<Option<Vec<_>>>() else {
        return influenced_set(graph, source, cfg);
    };

    let mut rounds = vec![first];
    for r in 0..cfg.depth - 1 {
        let mut layer: Vec<VertexId> = cached
            .iter()
            .filter_map(|res| res.rounds.get(r))
            .flatten()
            .copied()
            .filter(|&v| active.insert(v))
            .collect();
        if layer.is_empty() {
            break;
        }
        layer.sort_unstable();
        rounds.push(layer);
    }
    InfluenceResult::from_rounds(rounds, cfg.seed)
}
