use nalgebra::DMatrix;

use crate::graph::DynGraph;

/// Sparse symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
///
/// Rows and columns of isolated vertices are identically zero, so each
/// isolated vertex contributes one eigenvalue-0 direction `e_i`.
#[derive(Clone, Debug)]
pub struct LaplacianView {
    offsets: Vec<usize>,
    columns: Vec<usize>,
    /// Off-diagonal entries `-1/sqrt(deg u * deg v)`, aligned with `columns`.
    values: Vec<f64>,
    degrees: Vec<usize>,
}

impl LaplacianView {
    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.degrees[i] == 0
    }

    pub fn isolated_mask(&self) -> Vec<bool> {
        self.degrees.iter().map(|&d| d == 0).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn nnz(&self) -> usize {
        self.columns.len() + self.degrees.iter().filter(|&&d| d > 0).count()
    }

    fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[i]..self.offsets[i + 1];
        (&self.columns[range.clone()], &self.values[range])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return if self.is_isolated(i) { 0.0 } else { 1.0 };
        }
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// `y = L x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.size() {
            if self.is_isolated(i) {
                y[i] = 0.0;
                continue;
            }
            let (cols, vals) = self.row(i);
            let mut acc = x[i];
            for (&j, &w) in cols.iter().zip(vals) {
                acc += w * x[j];
            }
            y[i] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if !self.is_isolated(i) {
                m[(i, i)] = 1.0;
            }
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// Connected components ordered by size (descending), ties broken by
    /// smallest member id. Members of each component are ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut label = vec![usize::MAX; n];
        let mut comps = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &u in self.row(v).0 {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        members.push(u);
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort_by(|a: &Vec<usize>, b: &Vec<usize>| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// Orthonormal basis of the null space, one vector per connected
    /// component: `D^{1/2} 1_C` normalized (or `e_i` for an isolated vertex).
    pub fn null_basis(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        self.components()
            .into_iter()
            .map(|members| {
                let mut v = vec![0.0; n];
                if members.len() == 1 && self.is_isolated(members[0]) {
                    v[members[0]] = 1.0;
                    return v;
                }
                let volume: usize = members.iter().map(|&i| self.degrees[i]).sum();
                let scale = 1.0 / (volume as f64).sqrt();
                for &i in &members {
                    v[i] = (self.degrees[i] as f64).sqrt() * scale;
                }
                v
            })
            .collect()
    }

    /// `tr(F^T L F)` for column vectors given as slices.
    pub fn rayleigh_trace(&self, columns: &[Vec<f64>]) -> f64 {
        let mut y = vec![0.0; self.size()];
        columns
            .iter()
            .map(|x| {
                self.apply(x, &mut y);
                x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum()
    }
}

/// Builds the sparse symmetric normalized Laplacian of `graph`.
pub fn build_normalized_laplacian(graph: &DynGraph) -> LaplacianView {
    let n = graph.vertex_count();
    let degrees = graph.degrees();
    let inv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut columns = Vec::with_capacity(2 * graph.edge_count());
    let mut values = Vec::with_capacity(2 * graph.edge_count());
    offsets.push(0);
    for i in 0..n {
        for &u in graph.neighbors(i.into()) {
            columns.push(u.index());
            values.push(-inv_sqrt[i] * inv_sqrt[u.index()]);
        }
        offsets.push(columns.len());
    }
    LaplacianView {
        offsets,
        columns,
        values,
        degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DynGraph {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect();
        DynGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn path_entries() {
        let lap = build_normalized_laplacian(&graph(3, &[(0, 1), (1, 2)]));
        let h = -1.0 / 2f64.sqrt();
        assert!((lap.entry(0, 1) - h).abs() < 1e-15);
        assert!((lap.entry(2, 1) - h).abs() < 1e-15);
        assert_eq!(lap.entry(0, 2), 0.0);
        for i in 0..3 {
            assert_eq!(lap.entry(i, i), 1.0);
        }
    }

    #[test]
    fn single_vertex_is_zero() {
        let lap = build_normalized_laplacian(&graph(1, &[]));
        assert_eq!(lap.to_dense(), DMatrix::zeros(1, 1));
        assert_eq!(lap.isolated_mask(), vec![true]);
    }

    #[test]
    fn triangle_entries() {
        let lap = build_normalized_laplacian(&graph(3, &[(0, 1), (1, 2), (0, 2)]));
        let d = lap.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { -0.5 };
                assert!((d[(i, j)] - want).abs() < 1e-15);
            }
        }
        assert_eq!(d.transpose(), d);
    }

    #[test]
    fn null_basis_spans_components() {
        let lap = build_normalized_laplacian(&graph(6, &[(0, 1), (3, 4), (4, 5)]));
        let comps = lap.components();
        assert_eq!(comps, vec![vec![3, 4, 5], vec![0, 1], vec![2]]);
        let mut y = vec![0.0; 6];
        for v in lap.null_basis() {
            lap.apply(&v, &mut y);
            assert!(y.iter().all(|x| x.abs() < 1e-15));
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
    }
}
