use std::collections::{BTreeSet, VecDeque};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Connected simple undirected agent graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    laplacian: Array2<f64>,
}

impl NetworkGraph {
    /// Duplicate edges (in either orientation) are merged.
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= node_count {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        len: node_count,
                    });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        if set.is_empty() {
            return Err(Error::InvalidParameter(
                "agent graph needs at least two nodes and one edge".into(),
            ));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); node_count];
        let mut laplacian = Array2::zeros((node_count, node_count));
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
            laplacian[[a, b]] = -1.0;
            laplacian[[b, a]] = -1.0;
            laplacian[[a, a]] += 1.0;
            laplacian[[b, b]] += 1.0;
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        let mut seen = vec![false; node_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::DisconnectedGraph);
        }
        Ok(Self {
            node_count,
            edges,
            neighbors,
            laplacian,
        })
    }

    pub fn path(m: usize) -> Result<Self> {
        let edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        Self::new(m, &edges)
    }

    /// Star with node 0 at the center.
    pub fn star(m: usize) -> Result<Self> {
        let edges: Vec<_> = (1..m).map(|i| (0, i)).collect();
        Self::new(m, &edges)
    }

    pub fn cycle(m: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        if m > 2 {
            edges.push((m - 1, 0));
        }
        Self::new(m, &edges)
    }

    /// Edge list text: one `i j` pair per line, 0-indexed, `#` comments.
    /// The node count is one past the largest index unless given.
    pub fn parse_edge_list(text: &str, node_count: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |t: &str| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("{e}: {t:?}"),
                })
            };
            match parts.as_slice() {
                [a, b] => edges.push((parse(a)?, parse(b)?)),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected two node indices, found {line:?}"),
                    })
                }
            }
        }
        let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::new(node_count.unwrap_or(inferred), &edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// `W̄`: degrees on the diagonal, `−1` per edge.
    pub fn laplacian(&self) -> &Array2<f64> {
        &self.laplacian
    }

    /// Largest Laplacian eigenvalue by 20 steps of power iteration.
    pub fn spectral_radius_estimate(&self) -> f64 {
        let m = self.node_count;
        let mut v: Vec<f64> = (0..m)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } + 1.0 / (i as f64 + 1.0))
            .collect();
        let mut estimate = 0.0;
        for _ in 0..20 {
            let w: Vec<f64> = (0..m)
                .map(|i| {
                    self.degree(i) as f64 * v[i] - self.neighbors[i].iter().map(|&j| v[j]).sum::<f64>()
                })
                .collect();
            let norm_v: f64 = v.iter().map(|x| x * x).sum();
            estimate = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm_v;
            let norm_w = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm_w == 0.0 {
                break;
            }
            v = w.into_iter().map(|x| x / norm_w).collect();
        }
        estimate
    }
}

/// Laplacian of the graph on `m` nodes with the given edges.
pub fn laplacian(edges: &[(usize, usize)], m: usize) -> Result<Array2<f64>> {
    Ok(NetworkGraph::new(m, edges)?.laplacian().clone())
}

/// `√(qᵀ (W̄ ⊗ I_n) q)` for stacked agent vectors, evaluated blockwise as
/// `√(Σ_{(i,j)∈E} ‖q_i − q_j‖²)` without forming the Kronecker product.
pub fn consensus_residual<V: AsRef<[f64]>>(q: &[V], graph: &NetworkGraph) -> Result<f64> {
    if q.len() != graph.node_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.node_count(),
            found: q.len(),
        });
    }
    let n = q[0].as_ref().len();
    if let Some(bad) = q.iter().find(|v| v.as_ref().len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.as_ref().len(),
        });
    }
    let total: f64 = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            q[a].as_ref()
                .iter()
                .zip(q[b].as_ref())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum();
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn builtin_laplacians() {
        assert_eq!(
            NetworkGraph::path(3).unwrap().laplacian(),
            &array![[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]
        );
        assert_eq!(laplacian(&[(0, 1)], 2).unwrap(), array![[1.0, -1.0], [-1.0, 1.0]]);
        let star = NetworkGraph::star(4).unwrap();
        assert_eq!(
            star.laplacian(),
            &array![
                [3.0, -1.0, -1.0, -1.0],
                [-1.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 1.0, 0.0],
                [-1.0, 0.0, 0.0, 1.0]
            ]
        );
        let cycle = NetworkGraph::cycle(4).unwrap();
        assert!(cycle.laplacian().diag().iter().all(|d| *d == 2.0));
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = NetworkGraph::new(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 0), (1, 0)]).unwrap();
        for row in g.laplacian().rows() {
            assert_eq!(row.sum(), 0.0);
        }
        assert_eq!(g.laplacian(), &g.laplacian().t().to_owned());
        assert_eq!(g.edges().len(), 5);
    }

    #[test]
    fn invalid_graphs() {
        assert!(matches!(
            NetworkGraph::new(3, &[(0, 1)]),
            Err(Error::DisconnectedGraph)
        ));
        assert!(matches!(NetworkGraph::new(2, &[(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(NetworkGraph::new(1, &[]).is_err());
        assert!(matches!(
            NetworkGraph::new(2, &[(0, 2)]),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn edge_list_parsing() {
        let g = NetworkGraph::parse_edge_list("# ring\n0 1\n1 2\n2 0\n", None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(matches!(
            NetworkGraph::parse_edge_list("0 1 2\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(NetworkGraph::parse_edge_list("0 x\n", None).is_err());
    }

    #[test]
    fn residual_examples() {
        let g = NetworkGraph::path(2).unwrap();
        let r = consensus_residual(&[vec![1.0, 0.0], vec![0.0, 1.0]], &g).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let same = vec![vec![0.3, 0.7]; 2];
        assert_eq!(consensus_residual(&same, &g).unwrap(), 0.0);
        assert!(consensus_residual(&[vec![1.0], vec![0.0, 1.0]], &g).is_err());
    }

    #[test]
    fn spectral_radius_of_path() {
        // Path on 3 nodes has eigenvalues 0, 1, 3.
        let est = NetworkGraph::path(3).unwrap().spectral_radius_estimate();
        assert!((est - 3.0).abs() < 1e-6, "{est}");
    }
}
