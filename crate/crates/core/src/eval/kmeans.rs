//! Lloyd's k-means with k-means++ seeding and repeated restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansRun {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after each centroid update.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(x, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centroids(xs: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![xs[rng.random_range(0..xs.len())].clone()];
    let mut dist: Vec<f64> = xs.iter().map(|x| sq_dist(x, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = xs.len() - 1;
            for (i, &d) in dist.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..xs.len())
        };
        let c = xs[pick].clone();
        for (d, x) in dist.iter_mut().zip(xs) {
            *d = d.min(sq_dist(x, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn update_centroids(xs: &[Vec<f64>], assignment: &[usize], centroids: &mut [Vec<f64>]) {
    let dim = xs[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (x, &a) in xs.iter().zip(assignment) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    for ((c, s), &n) in centroids.iter_mut().zip(sums).zip(&counts) {
        if n > 0 {
            *c = s.into_iter().map(|v| v / n as f64).collect();
        }
    }
}

fn inertia(xs: &[Vec<f64>], assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    xs.iter()
        .zip(assignment)
        .map(|(x, &a)| sq_dist(x, &centroids[a]))
        .sum()
}

/// Moves the farthest point of a multi-member cluster into each empty
/// cluster and re-centers the empty cluster on it.
fn fill_empty(xs: &[Vec<f64>], assignment: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignment.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, x) in xs.iter().enumerate() {
            let a = assignment[i];
            if counts[a] < 2 {
                continue;
            }
            let d = sq_dist(x, &centroids[a]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let Some(i) = far else { return };
        assignment[i] = empty;
        centroids[empty] = xs[i].clone();
    }
}

fn lloyd(xs: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> KMeansRun {
    let mut centroids = seed_centroids(xs, k, rng);
    let mut assignment: Vec<usize> = xs.iter().map(|x| nearest(x, &centroids).0).collect();
    fill_empty(xs, &mut assignment, &mut centroids);
    update_centroids(xs, &assignment, &mut centroids);
    let mut trace = vec![inertia(xs, &assignment, &centroids)];
    let mut iterations = 0;
    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        let mut next: Vec<usize> = xs.iter().map(|x| nearest(x, &centroids).0).collect();
        // keep the current cluster on exact ties so the fixpoint is stable
        for (i, x) in xs.iter().enumerate() {
            let cur = assignment[i];
            if sq_dist(x, &centroids[cur]) <= sq_dist(x, &centroids[next[i]]) {
                next[i] = cur;
            }
        }
        fill_empty(xs, &mut next, &mut centroids);
        let changed = next != assignment;
        assignment = next;
        update_centroids(xs, &assignment, &mut centroids);
        trace.push(inertia(xs, &assignment, &centroids));
        if !changed {
            break;
        }
    }
    KMeansRun {
        inertia: *trace.last().expect("trace is never empty"),
        assignment,
        centroids,
        inertia_trace: trace,
        iterations,
    }
}

/// Runs k-means `repeats` times from independent k-means++ seedings.
pub fn kmeans(xs: &[Vec<f64>], k: usize, repeats: usize, seed: u64) -> Result<Vec<KMeansRun>> {
    if k == 0 || k > xs.len() {
        return Err(Error::TooManyClusters {
            clusters: k,
            points: xs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..repeats).map(|_| lloyd(xs, k, &mut rng)).collect())
}
