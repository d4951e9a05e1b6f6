//! Loss terms of the per-arrival objective, feasibility residuals, and the
//! deviation diagnostic comparing the online update with a retrained optimum.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{ArrivalEvent, DynGraph, VertexId};
use crate::io::format_f64;
use crate::spectral::{spectral_embed, SolverConfig};
use crate::update::{StreamConfig, StreamState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub smoothness: f64,
    pub homophily: f64,
    pub gamma_s: f64,
    pub gamma_h: f64,
    pub total: f64,
    /// Set when the graph has no edges and the homophily weight is forced to 0.
    pub degenerate: bool,
}

impl LossBreakdown {
    pub fn smoothness_term(&self) -> f64 {
        self.gamma_s * self.smoothness
    }

    pub fn homophily_term(&self) -> f64 {
        self.gamma_h * self.homophily
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_step_shapes(prev: &EmbeddingMatrix, next: &EmbeddingMatrix) -> Result<()> {
    if next.rows() != prev.rows() + 1 || next.dim() != prev.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected {}x{} after one arrival, got {}x{}",
            prev.rows() + 1,
            prev.dim(),
            next.rows(),
            next.dim()
        )));
    }
    Ok(())
}

/// Sum of squared row changes over the vertices present before the arrival.
pub fn smoothness_loss(prev: &EmbeddingMatrix, next: &EmbeddingMatrix) -> Result<f64> {
    check_step_shapes(prev, next)?;
    Ok(prev
        .iter_rows()
        .zip(next.iter_rows())
        .map(|(a, b)| squared_distance(a, b))
        .sum())
}

/// `||J F_next - F_prev||_F^2` with `J` the row-truncation matrix, formed
/// explicitly. Quadratic in the row count; meant for checks and small graphs.
pub fn smoothness_loss_matrix_form(prev: &EmbeddingMatrix, next: &EmbeddingMatrix) -> Result<f64> {
    check_step_shapes(prev, next)?;
    let n = prev.rows();
    let j = DMatrix::<f64>::from_fn(n, n + 1, |r, c| if r == c { 1.0 } else { 0.0 });
    let diff = j * next.to_dmatrix() - prev.to_dmatrix();
    Ok(diff.norm_squared())
}

/// `1/2 sum_{i,j} A(i,j) ||f_i - f_j||^2`, i.e. each edge once.
pub fn homophily_loss(f: &EmbeddingMatrix, graph: &DynGraph) -> Result<f64> {
    if f.rows() != graph.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} rows, graph has {} vertices",
            f.rows(),
            graph.vertex_count()
        )));
    }
    Ok(graph
        .edges()
        .map(|(u, v)| squared_distance(f.row(u), f.row(v)))
        .sum())
}

/// Weighted objective with `gamma_s = 1/|V|` and `gamma_h = 1/(4|E|)`.
pub fn total_loss(
    prev: &EmbeddingMatrix,
    next: &EmbeddingMatrix,
    graph_next: &DynGraph,
) -> Result<LossBreakdown> {
    let smoothness = smoothness_loss(prev, next)?;
    let homophily = homophily_loss(next, graph_next)?;
    let gamma_s = 1.0 / graph_next.vertex_count() as f64;
    let edges = graph_next.edge_count();
    let (gamma_h, degenerate) = if edges == 0 {
        (0.0, true)
    } else {
        (1.0 / (4.0 * edges as f64), false)
    };
    Ok(LossBreakdown {
        smoothness,
        homophily,
        gamma_s,
        gamma_h,
        total: gamma_s * smoothness + gamma_h * homophily,
        degenerate,
    })
}

/// `max_{a,b} |(F^T F - I)_{ab}|`.
pub fn orthogonality_residual(f: &EmbeddingMatrix) -> f64 {
    let k = f.dim();
    f.gram()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let target = if i / k == i % k { 1.0 } else { 0.0 };
            (g - target).abs()
        })
        .fold(0.0, f64::max)
}

/// Orthogonal `R` minimizing `||source R - target||_F`.
pub fn procrustes_rotation(source: &EmbeddingMatrix, target: &EmbeddingMatrix) -> DMatrix<f64> {
    let m = source.to_dmatrix().transpose() * target.to_dmatrix();
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    u * v_t
}

/// One row of the deviation report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord {
    pub step: usize,
    pub seed: u64,
    /// Step size of the update; 0 when the influenced set was empty.
    pub alpha: f64,
    pub delta_l: f64,
    pub bound: f64,
    pub smoothness_term: f64,
    pub homophily_term: f64,
    pub precondition_ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub records: Vec<DeviationRecord>,
}

impl DeviationReport {
    /// Fraction of records with `delta_L <= 2 alpha`.
    pub fn fraction_within_bound(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let ok = self.records.iter().filter(|r| r.delta_l <= r.bound).count();
        ok as f64 / self.records.len() as f64
    }

    pub fn fraction_precondition_ok(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let ok = self.records.iter().filter(|r| r.precondition_ok).count();
        ok as f64 / self.records.len() as f64
    }

    /// Records where the smoothness term exceeds the step size.
    pub fn smoothness_violations(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.smoothness_term > r.alpha)
            .count()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "step,seed,alpha,delta_L,bound,smoothness_term,homophily_term,precondition_ok"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.step,
                r.seed,
                format_f64(r.alpha),
                format_f64(r.delta_l),
                format_f64(r.bound),
                format_f64(r.smoothness_term),
                format_f64(r.homophily_term),
                r.precondition_ok
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticConfig {
    /// Number of leading arrivals embedded offline.
    pub prefix: usize,
    pub k: usize,
    pub depth: usize,
    pub solver: SolverConfig,
}

/// Streams `events[prefix..]` once per seed and, after every arrival,
/// compares the online embedding with a spectral retrain on the current
/// graph (aligned by an orthogonal Procrustes rotation).
pub fn deviation_diagnostic(
    events: &[ArrivalEvent],
    cfg: &DiagnosticConfig,
    seeds: &[u64],
) -> Result<DeviationReport> {
    if seeds.is_empty() {
        return Err(Error::Config("diagnostic needs at least one seed".into()));
    }
    if cfg.prefix > events.len() {
        return Err(Error::Config(format!(
            "prefix {} exceeds stream length {}",
            cfg.prefix,
            events.len()
        )));
    }
    let prefix_graph = DynGraph::from_events(&events[..cfg.prefix])?;
    let initial = spectral_embed(&prefix_graph, cfg.k, &cfg.solver)?;
    let mut states = seeds
        .iter()
        .map(|&seed| {
            StreamState::new(
                prefix_graph.clone(),
                initial.clone(),
                StreamConfig {
                    depth: cfg.depth,
                    seed,
                    ..StreamConfig::default()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = DeviationReport::default();
    for (offset, event) in events[cfg.prefix..].iter().enumerate() {
        let step = offset + 1;
        let mut per_seed = Vec::with_capacity(seeds.len());
        for state in &mut states {
            let prev = state.embedding().clone();
            let outcome = state.process_arrival(event)?;
            per_seed.push((prev, outcome.step.alpha.unwrap_or(0.0)));
        }
        let graph_next = states[0].graph();
        let optimum = spectral_embed(graph_next, cfg.k, &cfg.solver)?;

        let mut rows = Vec::with_capacity(seeds.len());
        let n = graph_next.vertex_count();
        let k = cfg.k;
        let mut mean_diff = vec![0.0; n * k];
        for ((state, (prev, alpha)), &seed) in states.iter().zip(&per_seed).zip(seeds) {
            let next = state.embedding();
            let rotation = procrustes_rotation(&optimum, next);
            let aligned = EmbeddingMatrix::from_dmatrix(&(optimum.to_dmatrix() * rotation));
            let online = total_loss(prev, next, graph_next)?;
            let retrained = total_loss(prev, &aligned, graph_next)?;
            for v in 0..n {
                let (a, b) = (next.row(VertexId(v)), aligned.row(VertexId(v)));
                for j in 0..k {
                    mean_diff[v * k + j] += (a[j] - b[j]) / seeds.len() as f64;
                }
            }
            rows.push(DeviationRecord {
                step,
                seed,
                alpha: *alpha,
                delta_l: (online.total - retrained.total).abs(),
                bound: 2.0 * alpha,
                smoothness_term: online.smoothness_term(),
                homophily_term: online.homophily_term(),
                precondition_ok: false,
            });
        }
        let worst_vertex = mean_diff
            .chunks_exact(k)
            .map(|d| d.iter().map(|x| x * x).sum::<f64>())
            .fold(0.0, f64::max);
        for r in &mut rows {
            r.precondition_ok = worst_vertex < r.alpha;
        }
        report.records.extend(rows);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DynGraph {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect();
        DynGraph::from_edges(n, &e).unwrap()
    }

    fn m(k: usize, rows: &[&[f64]]) -> EmbeddingMatrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        EmbeddingMatrix::from_rows(k, &rows).unwrap()
    }

    #[test]
    fn appended_row_costs_nothing() {
        let prev = m(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let next = m(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.3, 0.3]]);
        assert_eq!(smoothness_loss(&prev, &next).unwrap(), 0.0);
    }

    #[test]
    fn moved_row_costs_squared_distance() {
        let prev = m(2, &[&[1.0, 0.0]]);
        let next = m(2, &[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(smoothness_loss(&prev, &next).unwrap(), 2.0);
        assert!(smoothness_loss(&prev, &prev).is_err());
    }

    #[test]
    fn smoothness_of_worked_update() {
        let prev = m(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let mut next = prev.clone();
        crate::update::apply_update(&mut next, VertexId(2), &[VertexId(0), VertexId(1)]).unwrap();
        let a = 1.0 - 1.0 / 2f64.sqrt();
        let want = 2.0 * a * a * 0.5;
        let got = smoothness_loss(&prev, &next).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.085_786_437_626_904_9).abs() < 1e-12);
        assert!((smoothness_loss_matrix_form(&prev, &next).unwrap() - got).abs() < 1e-12);
    }

    #[test]
    fn homophily_examples() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(homophily_loss(&m(2, &[&[1.0, 0.0], &[0.0, 1.0]]), &g).unwrap(), 2.0);
        assert_eq!(homophily_loss(&m(2, &[&[0.4, 0.1], &[0.4, 0.1]]), &g).unwrap(), 0.0);
        let empty = graph(2, &[]);
        assert_eq!(homophily_loss(&m(2, &[&[1.0, 0.0], &[0.0, 1.0]]), &empty).unwrap(), 0.0);
    }

    #[test]
    fn weights_follow_graph_size() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let prev = m(1, &[&[0.5], &[0.5]]);
        let next = m(1, &[&[0.5], &[0.5], &[0.0]]);
        let loss = total_loss(&prev, &next, &g).unwrap();
        assert_eq!(loss.gamma_s, 1.0 / 3.0);
        assert_eq!(loss.gamma_h, 1.0 / 8.0);
        assert_eq!(loss.smoothness, 0.0);
        assert_eq!(loss.total, loss.gamma_h * loss.homophily);

        let edgeless = graph(3, &[]);
        let moved = m(1, &[&[0.0], &[0.5], &[0.0]]);
        let loss = total_loss(&prev, &moved, &edgeless).unwrap();
        assert!(loss.degenerate);
        assert_eq!(loss.total, loss.gamma_s * loss.smoothness);
    }

    #[test]
    fn residual_examples() {
        let f = m(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(orthogonality_residual(&f), 0.0);
        let f = m(2, &[&[1.1, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert!((orthogonality_residual(&f) - 0.21).abs() < 1e-12);
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let f = m(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let (c, s) = (0.6, 0.8);
        let rotated = m(2, &[&[c, s], &[-s, c], &[0.0, 0.0]]);
        let r = procrustes_rotation(&f, &rotated);
        let back = EmbeddingMatrix::from_dmatrix(&(f.to_dmatrix() * r));
        for (a, b) in back.as_slice().iter().zip(rotated.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn diagnostic_on_small_stream() {
        let edges = [(0, 1), (1, 2), (2, 3), (0, 3), (3, 4), (4, 5), (2, 5), (5, 6), (1, 6), (6, 7), (7, 0)];
        let e: Vec<_> = edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect();
        let stream = crate::graph::stream_from_edgelist(&e, 8).unwrap();
        let cfg = DiagnosticConfig {
            prefix: 4,
            k: 2,
            depth: 1,
            solver: SolverConfig::default(),
        };
        let report = deviation_diagnostic(&stream.events, &cfg, &[1, 2, 3]).unwrap();
        assert_eq!(report.records.len(), 4 * 3);
        assert_eq!(report.smoothness_violations(), 0);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 13);
    }
}
