//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stream_embed::graph::{DynGraph, VertexId};

/// Random simple graph on `n` vertices with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> (DynGraph, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    (graph(n, &edges), edges)
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> DynGraph {
    let e: Vec<_> = edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect();
    DynGraph::from_edges(n, &e).unwrap()
}

/// Dense normalized Laplacian built straight from an edge list.
pub fn dense_laplacian(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let mut deg = vec![0.0f64; n];
    for &(u, v) in edges {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        if deg[i] > 0.0 {
            m[i][i] = 1.0;
        }
    }
    for &(u, v) in edges {
        let w = -1.0 / (deg[u] * deg[v]).sqrt();
        m[u][v] = w;
        m[v][u] = w;
    }
    m
}

/// Cyclic Jacobi rotations; returns ascending eigenvalues.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Exact activation probability of every vertex under the depth-bounded
/// cascade, by enumerating every sequence of attempt outcomes.
pub fn cascade_marginals(adj: &[Vec<usize>], source: usize, depth: usize) -> Vec<f64> {
    let n = adj.len();
    let mut out = vec![0.0; n];
    let mut active = vec![false; n];
    active[source] = true;
    rounds(adj, &[source], &mut active, depth, 1.0, &mut out);
    out[source] = 0.0;
    out
}

fn rounds(
    adj: &[Vec<usize>],
    frontier: &[usize],
    active: &mut Vec<bool>,
    remaining: usize,
    prob: f64,
    out: &mut [f64],
) {
    if remaining == 0 || frontier.is_empty() {
        for (v, &a) in active.iter().enumerate() {
            if a {
                out[v] += prob;
            }
        }
        return;
    }
    let mut attempts = Vec::new();
    let mut sorted = frontier.to_vec();
    sorted.sort_unstable();
    for &v in &sorted {
        let mut nbrs = adj[v].clone();
        nbrs.sort_unstable();
        for u in nbrs {
            attempts.push(u);
        }
    }
    attempt(adj, &attempts, 0, active, Vec::new(), remaining, prob, out);
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    adj: &[Vec<usize>],
    attempts: &[usize],
    idx: usize,
    active: &mut Vec<bool>,
    next: Vec<usize>,
    remaining: usize,
    prob: f64,
    out: &mut [f64],
) {
    if idx == attempts.len() {
        rounds(adj, &next, active, remaining - 1, prob, out);
        return;
    }
    let u = attempts[idx];
    if active[u] {
        attempt(adj, attempts, idx + 1, active, next, remaining, prob, out);
        return;
    }
    let p = 1.0 / adj[u].len() as f64;
    // failure branch
    attempt(adj, attempts, idx + 1, active, next.clone(), remaining, prob * (1.0 - p), out);
    // success branch
    active[u] = true;
    let mut with = next;
    with.push(u);
    attempt(adj, attempts, idx + 1, active, with, remaining, prob * p, out);
    active[u] = false;
}

fn entropy_of(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Marginal and joint entropies of two labelings.
pub fn entropies(a: &[usize], b: &[usize]) -> (f64, f64, f64) {
    let n = a.len() as f64;
    let mut ca: HashMap<usize, usize> = HashMap::new();
    let mut cb: HashMap<usize, usize> = HashMap::new();
    let mut cab: HashMap<(usize, usize), usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        *cab.entry((x, y)).or_default() += 1;
    }
    (
        entropy_of(ca.into_values(), n),
        entropy_of(cb.into_values(), n),
        entropy_of(cab.into_values(), n),
    )
}

/// NMI via `I = H(C) + H(K) - H(C,K)`.
pub fn brute_nmi(clusters: &[usize], classes: &[usize]) -> f64 {
    let (hc, hk, hck) = entropies(classes, clusters);
    if hc + hk == 0.0 {
        return 1.0;
    }
    (2.0 * (hc + hk - hck) / (hc + hk)).clamp(0.0, 1.0)
}

/// Completeness via `H(K|C) = H(C,K) - H(C)`.
pub fn brute_completeness(clusters: &[usize], classes: &[usize]) -> f64 {
    let (hc, hk, hck) = entropies(classes, clusters);
    if hk == 0.0 {
        return 1.0;
    }
    (1.0 - (hck - hc) / hk).clamp(0.0, 1.0)
}

/// Per-class precision and recall, then F1; micro from accuracy-style counts.
pub fn brute_f1(truth: &[usize], pred: &[usize], classes: usize) -> (f64, f64) {
    let mut macro_sum = 0.0;
    let mut tp_all = 0usize;
    let mut fp_all = 0usize;
    let mut fn_all = 0usize;
    for c in 0..classes {
        let tp = truth.iter().zip(pred).filter(|(&t, &p)| t == c && p == c).count();
        let fp = truth.iter().zip(pred).filter(|(&t, &p)| t != c && p == c).count();
        let fn_ = truth.iter().zip(pred).filter(|(&t, &p)| t == c && p != c).count();
        tp_all += tp;
        fp_all += fp;
        fn_all += fn_;
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        macro_sum += if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
    }
    let p = tp_all as f64 / (tp_all + fp_all).max(1) as f64;
    let r = tp_all as f64 / (tp_all + fn_all).max(1) as f64;
    let micro = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (micro, macro_sum / classes as f64)
}

/// Random orthonormal `n x k` matrix via Gram-Schmidt on Gaussian-ish columns.
pub fn random_orthonormal(n: usize, k: usize, seed: u64) -> stream_embed::EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-6 {
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    stream_embed::EmbeddingMatrix::from_columns(&refs).unwrap()
}
