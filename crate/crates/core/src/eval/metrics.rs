//! Classification and clustering agreement scores.

use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Micro- and macro-averaged F1 over `class_count` classes.
///
/// Classes that appear in neither `y_true` nor `y_pred` score 0 and still
/// count toward the macro average.
pub fn f1_scores(y_true: &[usize], y_pred: &[usize], class_count: usize) -> Result<(f64, f64)> {
    check_lengths(y_true.len(), y_pred.len())?;
    let mut tp = vec![0usize; class_count];
    let mut fp = vec![0usize; class_count];
    let mut fn_ = vec![0usize; class_count];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= class_count || p >= class_count {
            return Err(Error::DimensionMismatch(format!(
                "label {} outside 0..{class_count}",
                t.max(p)
            )));
        }
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let f1 = |tp: usize, fp: usize, fn_: usize| {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let micro = f1(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum());
    let macro_ = if class_count == 0 {
        0.0
    } else {
        (0..class_count).map(|c| f1(tp[c], fp[c], fn_[c])).sum::<f64>() / class_count as f64
    };
    Ok((micro, macro_))
}

struct Contingency {
    n: f64,
    joint: Vec<Vec<f64>>,
    rows: Vec<f64>,
    cols: Vec<f64>,
}

fn dense_ids(xs: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let ids = xs
        .iter()
        .map(|x| {
            let next = map.len();
            *map.entry(*x).or_insert(next)
        })
        .collect();
    (ids, map.len())
}

impl Contingency {
    fn new(classes: &[usize], clusters: &[usize]) -> Self {
        let (c, nc) = dense_ids(classes);
        let (k, nk) = dense_ids(clusters);
        let mut joint = vec![vec![0.0; nk]; nc];
        for (&a, &b) in c.iter().zip(&k) {
            joint[a][b] += 1.0;
        }
        let rows = joint.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..nk).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
        Contingency {
            n: classes.len() as f64,
            joint,
            rows,
            cols,
        }
    }

    fn entropy(&self, counts: &[f64]) -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| {
                let p = c / self.n;
                -p * p.ln()
            })
            .sum()
    }

    fn class_entropy(&self) -> f64 {
        self.entropy(&self.rows)
    }

    fn cluster_entropy(&self) -> f64 {
        self.entropy(&self.cols)
    }

    fn mutual_information(&self) -> f64 {
        let mut mi = 0.0;
        for (i, row) in self.joint.iter().enumerate() {
            for (j, &nij) in row.iter().enumerate() {
                if nij > 0.0 {
                    mi += nij / self.n * (self.n * nij / (self.rows[i] * self.cols[j])).ln();
                }
            }
        }
        mi.max(0.0)
    }

    /// `H(K | C)`.
    fn cluster_given_class(&self) -> f64 {
        let mut h = 0.0;
        for (i, row) in self.joint.iter().enumerate() {
            for &nij in row {
                if nij > 0.0 {
                    h -= nij / self.n * (nij / self.rows[i]).ln();
                }
            }
        }
        h.max(0.0)
    }
}

/// `2 I(C;K) / (H(C) + H(K))`; 1 when both partitions are a single block.
pub fn nmi(assignment: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(assignment.len(), labels.len())?;
    if labels.is_empty() {
        return Ok(1.0);
    }
    let table = Contingency::new(labels, assignment);
    let denom = table.class_entropy() + table.cluster_entropy();
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * table.mutual_information() / denom).clamp(0.0, 1.0))
}

/// `1 - H(K|C) / H(K)`; 1 when there is a single cluster.
pub fn completeness(assignment: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(assignment.len(), labels.len())?;
    if labels.is_empty() {
        return Ok(1.0);
    }
    let table = Contingency::new(labels, assignment);
    let hk = table.cluster_entropy();
    if hk == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - table.cluster_given_class() / hk).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        assert_eq!(f1_scores(&[0, 1, 2], &[0, 1, 2], 3).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn hand_contingency_f1() {
        let (micro, macro_) = f1_scores(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert!((micro - 0.75).abs() < 1e-15);
        assert!((macro_ - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-15);

        let (micro, macro_) = f1_scores(&[0, 0, 1, 1], &[0, 0, 0, 0], 2).unwrap();
        assert!((micro - 0.5).abs() < 1e-15);
        assert!((macro_ - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn f1_length_mismatch() {
        assert!(matches!(
            f1_scores(&[0], &[0, 1], 2),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nmi_examples() {
        assert!((nmi(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmi(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap().abs() < 1e-15);
        let v = nmi(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap();
        assert!((v - 0.343_711_018_485_450_7).abs() < 1e-12, "{v}");
        assert_eq!(nmi(&[3, 3], &[1, 1]).unwrap(), 1.0);
        assert!(nmi(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn completeness_examples() {
        assert_eq!(completeness(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        // two classes merged into one cluster still keeps each class whole
        assert!((completeness(&[0, 0, 0, 0, 1], &[0, 0, 1, 1, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!(completeness(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap().abs() < 1e-15);
        assert_eq!(completeness(&[5, 5, 5], &[0, 1, 2]).unwrap(), 1.0);
    }
}
