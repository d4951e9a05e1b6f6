//! Offline spectral embedding: eigenvectors of the symmetric normalized
//! Laplacian for the smallest eigenvalues, skipping the first.
//!
//! Eigenvectors of `L_sym` are orthonormal in the standard inner product,
//! which is the feasibility condition the online update preserves. The
//! generalized problem `L x = lambda D x` has the same spectrum through
//! `x = D^{-1/2} y`.
//!
//! The null space is known in closed form (one `D^{1/2} 1_C` per connected
//! component), so both solver paths lock it analytically and only search
//! the complement numerically.

mod lanczos;
mod laplacian;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

pub use laplacian::{build_normalized_laplacian, LaplacianView};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::DynGraph;

/// Residual bound every returned eigenpair satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Graphs with at most this many vertices use the dense solver.
    pub dense_threshold: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dense_threshold: 512,
            max_restarts: 20_000,
            seed: 0x5eed_1a2c,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl EigenPair {
    /// `||L x - lambda x||`.
    pub fn residual(&self, lap: &LaplacianView) -> f64 {
        let mut y = vec![0.0; self.vector.len()];
        lap.apply(&self.vector, &mut y);
        y.iter()
            .zip(&self.vector)
            .map(|(a, b)| (a - self.value * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub fn apply_sign_convention(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// The `m` smallest eigenpairs of `lap`, ascending.
pub fn eigendecompose(lap: &LaplacianView, m: usize, cfg: &SolverConfig) -> Result<Vec<EigenPair>> {
    let n = lap.size();
    if m == 0 || m > n {
        return Err(Error::BadEigenCount { requested: m, size: n });
    }
    let null = lap.null_basis();
    let mut pairs: Vec<EigenPair> = null
        .iter()
        .take(m)
        .map(|v| EigenPair {
            value: 0.0,
            vector: v.clone(),
        })
        .collect();

    let rest = m.saturating_sub(null.len());
    if rest > 0 {
        let extra = if n <= cfg.dense_threshold {
            dense_nonzero(lap, null.len(), rest)
        } else {
            let opts = lanczos::LanczosOptions {
                tolerance: 0.1 * RESIDUAL_TOLERANCE,
                max_restarts: cfg.max_restarts,
                seed: cfg.seed,
            };
            lanczos::smallest_eigenpairs(&|x: &[f64], y: &mut [f64]| lap.apply(x, y), n, &null, rest, &opts)?
        };
        pairs.extend(extra.into_iter().map(|(value, vector)| EigenPair { value, vector }));
    }

    let mut worst: f64 = 0.0;
    for p in &mut pairs {
        apply_sign_convention(&mut p.vector);
        worst = worst.max(p.residual(lap));
    }
    if worst > RESIDUAL_TOLERANCE {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: worst,
        });
    }
    Ok(pairs)
}

/// Dense eigendecomposition, returning positions `skip..skip + count` of the
/// ascending spectrum. The first `skip` are the analytic null directions.
fn dense_nonzero(lap: &LaplacianView, skip: usize, count: usize) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(lap.to_dense());
    let mut order: Vec<usize> = (0..lap.size()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order[skip..skip + count]
        .iter()
        .map(|&i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .collect()
}

/// Spectral embedding of dimension `k`: eigenvectors at ascending positions
/// 2..=k+1, i.e. the smallest eigenvector is dropped.
pub fn spectral_embed(graph: &DynGraph, k: usize, cfg: &SolverConfig) -> Result<EmbeddingMatrix> {
    Ok(spectral_embed_with_values(graph, k, cfg)?.0)
}

/// Like [`spectral_embed`], also returning the selected eigenvalues.
pub fn spectral_embed_with_values(
    graph: &DynGraph,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(EmbeddingMatrix, Vec<f64>)> {
    let n = graph.vertex_count();
    if k == 0 || k + 1 > n {
        return Err(Error::DimensionTooLarge { k, vertices: n });
    }
    let lap = build_normalized_laplacian(graph);
    let pairs = eigendecompose(&lap, k + 1, cfg)?;
    let columns: Vec<&[f64]> = pairs[1..].iter().map(|p| p.vector.as_slice()).collect();
    let values = pairs[1..].iter().map(|p| p.value).collect();
    Ok((EmbeddingMatrix::from_columns(&columns)?, values))
}
