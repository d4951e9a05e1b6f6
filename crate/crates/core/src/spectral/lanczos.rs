//! Thick-restart Lanczos for the smallest eigenpairs of a sparse symmetric
//! operator, restricted to the orthogonal complement of a locked subspace.
//!
//! The Krylov basis is kept fully reorthogonalized, so the projected matrix
//! is formed explicitly and restarts simply keep the leading Ritz vectors.
//! A single Krylov sequence can only see one direction of a repeated
//! eigenvalue; missed copies are recovered by a verification pass that
//! re-runs the iteration with everything found so far deflated.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub(crate) struct LanczosOptions {
    pub tolerance: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn project_out(basis: &[Vec<f64>], x: &mut [f64]) {
    for q in basis {
        let c = dot(q, x);
        axpy(-c, q, x);
    }
}

/// Random unit vector orthogonal to `locked` and `basis`.
fn random_orthogonal(
    n: usize,
    locked: &[Vec<f64>],
    basis: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            project_out(locked, &mut v);
            project_out(basis, &mut v);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// The `want` smallest eigenpairs of `op` on the complement of `locked`
/// (which must be orthonormal). Returned ascending.
fn run<F>(
    op: &F,
    n: usize,
    locked: &[Vec<f64>],
    want: usize,
    opts: &LanczosOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = n - locked.len();
    if want == 0 {
        return Ok(Vec::new());
    }
    if want > dim {
        return Err(Error::BadEigenCount {
            requested: want + locked.len(),
            size: n,
        });
    }
    let ncv = dim.min((2 * want + 16).max(want + 24));

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ncv);
    basis.push(random_orthogonal(n, locked, &[], rng).ok_or(Error::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    })?);
    let mut h = DMatrix::<f64>::zeros(ncv, ncv);
    let mut kept = 0;
    let mut w = vec![0.0; n];
    let mut worst = f64::INFINITY;

    for restart in 0..=opts.max_restarts {
        let mut beta_last = 0.0;
        let mut residual_vec: Option<Vec<f64>> = None;
        for j in kept..ncv {
            op(&basis[j], &mut w);
            project_out(locked, &mut w);
            let scale = norm(&w);
            // classical Gram-Schmidt, twice; the locked space is removed on
            // each pass too, since dividing by a small beta would otherwise
            // amplify rounding-level components along it
            let mut coeffs = vec![0.0; j + 1];
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate().take(j + 1) {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                    coeffs[i] += c;
                }
                project_out(locked, &mut w);
            }
            for (i, &c) in coeffs.iter().enumerate() {
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
            let beta = norm(&w);
            let breakdown = beta <= 1e-10 * scale.max(1e-300);
            if j + 1 < ncv {
                let next = if breakdown {
                    h[(j + 1, j)] = 0.0;
                    h[(j, j + 1)] = 0.0;
                    random_orthogonal(n, locked, &basis, rng).ok_or(Error::NoConvergence {
                        iterations: restart,
                        residual: worst,
                    })?
                } else {
                    h[(j + 1, j)] = beta;
                    h[(j, j + 1)] = beta;
                    w.iter().map(|x| x / beta).collect()
                };
                basis.truncate(j + 1);
                basis.push(next);
            } else if !breakdown {
                beta_last = beta;
                residual_vec = Some(w.iter().map(|x| x / beta).collect());
            }
        }

        let eig = SymmetricEigen::new(h.clone());
        let mut order: Vec<usize> = (0..ncv).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let estimate = |i: usize| (beta_last * eig.eigenvectors[(ncv - 1, i)]).abs();
        worst = order[..want].iter().map(|&i| estimate(i)).fold(0.0, f64::max);

        let converged = worst <= opts.tolerance;
        if converged || restart == opts.max_restarts {
            if !converged {
                return Err(Error::NoConvergence {
                    iterations: restart,
                    residual: worst,
                });
            }
            return Ok(order[..want]
                .iter()
                .map(|&i| (eig.eigenvalues[i], ritz_vector(&basis, &eig.eigenvectors, i, n)))
                .collect());
        }

        // keep the leading Ritz vectors and continue from the residual
        let keep = (want + (ncv - want) / 2).min(ncv - 1);
        let mut new_basis: Vec<Vec<f64>> = order[..keep]
            .iter()
            .map(|&i| ritz_vector(&basis, &eig.eigenvectors, i, n))
            .collect();
        h.fill(0.0);
        for (slot, &i) in order[..keep].iter().enumerate() {
            h[(slot, slot)] = eig.eigenvalues[i];
            let coupling = beta_last * eig.eigenvectors[(ncv - 1, i)];
            h[(keep, slot)] = coupling;
            h[(slot, keep)] = coupling;
        }
        let next = match residual_vec {
            Some(r) => r,
            None => random_orthogonal(n, locked, &new_basis, rng).ok_or(Error::NoConvergence {
                iterations: restart,
                residual: worst,
            })?,
        };
        new_basis.push(next);
        basis = new_basis;
        kept = keep;
    }
    unreachable!("loop returns on the final restart")
}

fn ritz_vector(basis: &[Vec<f64>], s: &DMatrix<f64>, col: usize, n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for (j, q) in basis.iter().enumerate().take(s.nrows()) {
        axpy(s[(j, col)], q, &mut y);
    }
    let ny = norm(&y);
    y.iter_mut().for_each(|x| *x /= ny);
    y
}

/// Smallest `want` eigenpairs of `op` orthogonal to `locked`, with a
/// deflated verification pass to catch repeated eigenvalues.
pub(crate) fn smallest_eigenpairs<F>(
    op: &F,
    n: usize,
    locked: &[Vec<f64>],
    want: usize,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found = run(op, n, locked, want, opts, &mut rng)?;
    let gap = 10.0 * opts.tolerance;

    loop {
        let mut deflate: Vec<Vec<f64>> = locked.to_vec();
        deflate.extend(found.iter().map(|(_, v)| v.clone()));
        if deflate.len() >= n {
            break;
        }
        // `found` is only approximately orthonormal; re-orthonormalize the tail
        for i in locked.len()..deflate.len() {
            let (head, tail) = deflate.split_at_mut(i);
            let v = &mut tail[0];
            project_out(head, v);
            let nv = norm(v);
            v.iter_mut().for_each(|x| *x /= nv);
        }
        let probe = run(op, n, &deflate, 1, opts, &mut rng)?;
        let (mu, x) = probe.into_iter().next().expect("one pair requested");
        let largest = found.last().map_or(f64::INFINITY, |p| p.0);
        if mu >= largest - gap {
            break;
        }
        log::debug!("lanczos verification recovered eigenvalue {mu} below {largest}");
        found.pop();
        let pos = found.partition_point(|p| p.0 <= mu);
        found.insert(pos, (mu, x));
    }
    Ok(found)
}
