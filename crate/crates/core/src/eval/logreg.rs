//! One-vs-rest L2-regularized logistic regression, trained by full-batch
//! gradient descent with backtracking line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl BinaryModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvrClassifier {
    pub models: Vec<BinaryModel>,
}

impl OvrClassifier {
    /// Class with the highest score; ties go to the lowest class id.
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, m) in self.models.iter().enumerate() {
            let s = m.score(x);
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        best
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<usize> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

/// Numerically stable `log(1 + e^z)`.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct Problem<'a> {
    xs: &'a [Vec<f64>],
    ys: Vec<f64>,
    l2: f64,
}

impl Problem<'_> {
    fn n(&self) -> f64 {
        self.xs.len() as f64
    }

    /// Parameters are `[w..., b]`; the bias is not regularized.
    fn loss(&self, theta: &[f64]) -> f64 {
        let (w, b) = theta.split_at(theta.len() - 1);
        let data: f64 = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, &y)| {
                let z = b[0] + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
                softplus(z) - y * z
            })
            .sum();
        let reg: f64 = w.iter().map(|a| a * a).sum();
        (data + 0.5 * self.l2 * reg) / self.n()
    }

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let d = theta.len() - 1;
        let (w, b) = theta.split_at(d);
        let mut g = vec![0.0; d + 1];
        for (x, &y) in self.xs.iter().zip(&self.ys) {
            let z = b[0] + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
            let r = sigmoid(z) - y;
            for (gi, xi) in g.iter_mut().zip(x) {
                *gi += r * xi;
            }
            g[d] += r;
        }
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi += self.l2 * wi;
        }
        let n = self.n();
        g.iter_mut().for_each(|v| *v /= n);
        g
    }
}

fn train_binary(problem: &Problem<'_>, dim: usize) -> BinaryModel {
    let mut theta = vec![0.0; dim + 1];
    let mut loss = problem.loss(&theta);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut grad = problem.gradient(&theta);
    let mut gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    while gnorm > GRADIENT_TOLERANCE && iterations < MAX_ITERATIONS {
        iterations += 1;
        step = (step * 2.0).min(1e6);
        loop {
            let candidate: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g).collect();
            let cand_loss = problem.loss(&candidate);
            if cand_loss <= loss - 0.5 * step * gnorm * gnorm {
                theta = candidate;
                loss = cand_loss;
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                break;
            }
        }
        if step < 1e-16 {
            break;
        }
        grad = problem.gradient(&theta);
        gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    }
    let bias = theta.pop().unwrap_or(0.0);
    BinaryModel {
        weights: theta,
        bias,
        iterations,
        gradient_norm: gnorm,
    }
}

/// Trains one binary model per class in `0..class_count`.
pub fn train_logreg_ovr(
    xs: &[Vec<f64>],
    ys: &[usize],
    class_count: usize,
    l2: f64,
) -> Result<OvrClassifier> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if l2 <= 0.0 {
        return Err(Error::Config(format!("l2 weight must be positive, got {l2}")));
    }
    let mut present = ys.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::SingleClass);
    }
    let dim = xs.first().map_or(0, Vec::len);
    if xs.iter().any(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch("feature rows differ in length".into()));
    }
    let models = (0..class_count)
        .map(|c| {
            let problem = Problem {
                xs,
                ys: ys.iter().map(|&y| if y == c { 1.0 } else { 0.0 }).collect(),
                l2,
            };
            train_binary(&problem, dim)
        })
        .collect();
    Ok(OvrClassifier { models })
}
