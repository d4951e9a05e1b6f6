//! Growing undirected graph driven by single-vertex arrival events.
//!
//! Vertices are numbered densely in arrival order. Every arrival carries the
//! edges joining the new vertex to vertices that are already present, so an
//! undirected edge `(u, v)` always travels with the event of `max(u, v)`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index; equals the vertex's position in arrival order.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

/// One new vertex together with its back-edges to already-arrived vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalEvent {
    pub vertex: VertexId,
    pub edges: Vec<VertexId>,
}

impl ArrivalEvent {
    pub fn new(vertex: impl Into<VertexId>, edges: impl IntoIterator<Item = usize>) -> Self {
        ArrivalEvent {
            vertex: vertex.into(),
            edges: edges.into_iter().map(VertexId).collect(),
        }
    }

    pub fn isolated(vertex: impl Into<VertexId>) -> Self {
        ArrivalEvent {
            vertex: vertex.into(),
            edges: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        for &u in &self.edges {
            if u == self.vertex {
                return Err(Error::SelfLoop(u));
            }
            if u > self.vertex {
                return Err(Error::ForwardEdge {
                    vertex: self.vertex,
                    endpoint: u,
                });
            }
            if !seen.insert(u) {
                return Err(Error::DuplicateEdge(u, self.vertex));
            }
        }
        Ok(())
    }
}

/// Several vertices arriving together; edges may join two new vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchArrival {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DynGraph {
    adjacency: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl DynGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph in one shot from an undirected edge list.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u.0 >= vertex_count || v.0 >= vertex_count {
                return Err(Error::EndpointOutOfRange {
                    u,
                    v,
                    vertex_count,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            adjacency[u.0].push(v);
            adjacency[v.0].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(DynGraph {
            adjacency,
            edge_count: seen.len(),
        })
    }

    /// Builds a graph by replaying arrival events in order.
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a ArrivalEvent>) -> Result<Self> {
        let mut graph = DynGraph::new();
        for event in events {
            graph.apply_arrival(event)?;
        }
        Ok(graph)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.0]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        u.0 < self.vertex_count() && self.adjacency[u.0].binary_search(&v).is_ok()
    }

    /// Every undirected edge once, as `(smaller, larger)`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(v, list)| {
            list.iter()
                .take_while(move |u| u.0 < v)
                .map(move |&u| (u, VertexId(v)))
        })
    }

    /// Appends the event's vertex and its back-edges.
    ///
    /// The event is validated in full before the graph is touched, so a
    /// rejected event leaves the graph unchanged.
    pub fn apply_arrival(&mut self, event: &ArrivalEvent) -> Result<()> {
        let expected = VertexId(self.vertex_count());
        if event.vertex != expected {
            return Err(Error::NonContiguousVertex {
                expected,
                got: event.vertex,
            });
        }
        event.validate()?;

        let mut own: Vec<VertexId> = event.edges.clone();
        own.sort_unstable();
        // the new id is the largest present, so pushing keeps lists sorted
        for &u in &own {
            self.adjacency[u.0].push(event.vertex);
        }
        self.edge_count += own.len();
        self.adjacency.push(own);
        Ok(())
    }

    /// Checks the structural invariants; used by tests and debug assertions.
    pub fn check_invariants(&self) -> bool {
        let mut degree_sum = 0;
        for (v, list) in self.adjacency.iter().enumerate() {
            degree_sum += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &u in list {
                if u.0 == v || !self.contains_edge(u, VertexId(v)) {
                    return false;
                }
            }
        }
        degree_sum == 2 * self.edge_count
    }
}

/// Splits a batch into single-vertex arrivals ordered by vertex id.
///
/// `present` is the number of vertices already in the graph; the batch must
/// introduce exactly the ids `present..present + batch.vertices.len()`.
pub fn decompose_batch(present: usize, batch: &BatchArrival) -> Result<Vec<ArrivalEvent>> {
    let mut vertices = batch.vertices.clone();
    vertices.sort_unstable();
    for (offset, &v) in vertices.iter().enumerate() {
        let expected = VertexId(present + offset);
        if v != expected {
            return Err(Error::NonContiguousVertex { expected, got: v });
        }
    }
    let end = present + vertices.len();

    let mut events: Vec<ArrivalEvent> = vertices.iter().map(|&v| ArrivalEvent::isolated(v)).collect();
    let mut seen = HashSet::with_capacity(batch.edges.len());
    for &(u, v) in &batch.edges {
        if u.0 >= end || v.0 >= end {
            return Err(Error::EndpointOutOfRange {
                u,
                v,
                vertex_count: end,
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let (lo, hi) = (u.min(v), u.max(v));
        if hi.0 < present {
            return Err(Error::EdgeBetweenExisting(lo, hi));
        }
        if !seen.insert((lo, hi)) {
            return Err(Error::DuplicateEdge(lo, hi));
        }
        events[hi.0 - present].edges.push(lo);
    }
    for event in &mut events {
        event.edges.sort_unstable();
    }
    Ok(events)
}

/// Arrival schedule derived from a static edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStream {
    pub events: Vec<ArrivalEvent>,
    /// Repeated undirected edges dropped while building the schedule.
    pub duplicates: usize,
}

impl EdgeStream {
    pub fn vertex_count(&self) -> usize {
        self.events.len()
    }

    pub fn edge_count(&self) -> usize {
        self.events.iter().map(|e| e.edges.len()).sum()
    }
}

/// One event per vertex in id order, each edge attached to its larger endpoint.
pub fn stream_from_edgelist(
    edges: &[(VertexId, VertexId)],
    vertex_count: usize,
) -> Result<EdgeStream> {
    let mut events: Vec<ArrivalEvent> = (0..vertex_count).map(ArrivalEvent::isolated).collect();
    let mut seen = HashSet::with_capacity(edges.len());
    let mut duplicates = 0;
    for &(u, v) in edges {
        if u.0 >= vertex_count || v.0 >= vertex_count {
            return Err(Error::EndpointOutOfRange {
                u,
                v,
                vertex_count,
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let (lo, hi) = (u.min(v), u.max(v));
        if !seen.insert((lo, hi)) {
            duplicates += 1;
            continue;
        }
        events[hi.0].edges.push(lo);
    }
    if duplicates > 0 {
        log::warn!("dropped {duplicates} duplicate edges while building the arrival stream");
    }
    for event in &mut events {
        event.edges.sort_unstable();
    }
    Ok(EdgeStream { events, duplicates })
}
