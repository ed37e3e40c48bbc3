//! Collapsing a glued tree onto a chain of node clusters.
//!
//! Nodes that the graph's mirror symmetries make equivalent can be grouped
//! into clusters; the walk restricted to the totally symmetric superposition
//! `|a_k> = (1/sqrt(d_k)) sum_{n in cluster k} |n>` evolves under a small
//! tridiagonal matrix instead of the full adjacency matrix. The reduction is
//! exact precisely when the partition is *equitable* — every node of a
//! cluster has the same degree and the same number of neighbors in each
//! adjacent cluster — so partitions are validated rather than assumed.
//!
//! Two layered partitions are built here:
//! * [`row_partition`]: the `2G + 1` horizontal rows (top-to-bottom walks);
//! * [`left_right_partition`]: breadth-first layers seeded on the left half
//!   of the axis row (left-to-right walks).
//!
//! The reduced matrix has the cluster functionality `f_k` on the diagonal
//! and `-b_k / sqrt(d_k d_{k+1})` next to it, where `b_k` counts the bonds
//! between consecutive clusters. It grows with `2G + 1` while the full
//! matrix grows with `3 * 2^G - 2`.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{Graph, GluedTreeSpec};
use crate::limiting::chi_exact;
use crate::spectral::{
    decompose_symmetric, default_degeneracy_tolerance, group_degenerate, SpectralDecomposition,
    SpectralError,
};
use crate::walk::{ctqw_amplitude_matrix, ctrw_matrix, WalkParams};

/// Agreement required between the projected reduced matrix and its
/// closed-form prediction.
const REDUCTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollapseError {
    #[error("clusters must be non-empty and cover every node exactly once")]
    NotAPartition,
    #[error("graph has {nodes} nodes but the partition covers {covered}")]
    SizeMismatch { nodes: usize, covered: usize },
    #[error("cluster {cluster} contains an internal edge {{{a}, {b}}}")]
    IntraClusterEdge { cluster: usize, a: usize, b: usize },
    #[error("edge {{{a}, {b}}} connects non-adjacent clusters {cluster_a} and {cluster_b}")]
    NonAdjacentClusters {
        a: usize,
        b: usize,
        cluster_a: usize,
        cluster_b: usize,
    },
    #[error("cluster {cluster} mixes node degrees {expected} and {found}")]
    DegreeMismatch {
        cluster: usize,
        expected: usize,
        found: usize,
    },
    #[error(
        "cluster {cluster} mixes neighbor counts towards cluster {towards}: {expected} and {found}"
    )]
    NeighborCountMismatch {
        cluster: usize,
        towards: usize,
        expected: usize,
        found: usize,
    },
    #[error("adjacency matrix is {rows}x{cols} but the partition covers {nodes} nodes")]
    MatrixMismatch {
        rows: usize,
        cols: usize,
        nodes: usize,
    },
    #[error(
        "projected element ({j}, {k}) = {projected} disagrees with the equitable form {formula}"
    )]
    ReductionMismatch {
        j: usize,
        k: usize,
        projected: f64,
        formula: f64,
    },
    #[error("graph does not match the glued-tree layout: {0}")]
    LayoutMismatch(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// An ordered equitable partition of a graph into a chain of clusters.
///
/// Cluster indices are 1-based like node ids. Construction validates
/// equitability, so a value of this type certifies that the reduction to
/// the symmetric-superposition chain is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    clusters: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    bonds: Vec<usize>,
    functionality: Vec<usize>,
}

impl ClusterPartition {
    /// Validates `clusters` as an equitable chain partition of `graph` and
    /// records the cluster sizes `d_k`, inter-cluster bond counts `b_k`, and
    /// per-cluster functionalities `f_k`.
    pub fn from_clusters(
        graph: &Graph,
        clusters: Vec<Vec<usize>>,
    ) -> Result<Self, CollapseError> {
        let n = graph.n_nodes();
        let covered: usize = clusters.iter().map(Vec::len).sum();
        if covered != n {
            return Err(CollapseError::SizeMismatch { nodes: n, covered });
        }
        if clusters.iter().any(Vec::is_empty) {
            return Err(CollapseError::NotAPartition);
        }
        let mut membership = vec![usize::MAX; n + 1];
        for (idx, cluster) in clusters.iter().enumerate() {
            for &node in cluster {
                if node == 0 || node > n || membership[node] != usize::MAX {
                    return Err(CollapseError::NotAPartition);
                }
                membership[node] = idx;
            }
        }

        // Every edge must join consecutive clusters.
        for &(a, b) in graph.edges() {
            let (ca, cb) = (membership[a], membership[b]);
            if ca == cb {
                return Err(CollapseError::IntraClusterEdge {
                    cluster: ca + 1,
                    a,
                    b,
                });
            }
            if ca.abs_diff(cb) != 1 {
                return Err(CollapseError::NonAdjacentClusters {
                    a,
                    b,
                    cluster_a: ca + 1,
                    cluster_b: cb + 1,
                });
            }
        }

        // Degrees and per-direction neighbor counts must be uniform within
        // each cluster.
        let m = clusters.len();
        let mut functionality = vec![0usize; m];
        let mut down = vec![0usize; m]; // neighbors in cluster k+1 per node of k
        for (idx, cluster) in clusters.iter().enumerate() {
            let mut expected: Option<(usize, usize, usize)> = None;
            for &node in cluster {
                let mut up_count = 0;
                let mut down_count = 0;
                for &nb in graph.neighbors(node) {
                    if membership[nb] + 1 == idx {
                        up_count += 1;
                    } else {
                        down_count += 1;
                    }
                }
                let degree = graph.degree(node);
                match expected {
                    None => expected = Some((degree, up_count, down_count)),
                    Some((f, up, dn)) => {
                        if degree != f {
                            return Err(CollapseError::DegreeMismatch {
                                cluster: idx + 1,
                                expected: f,
                                found: degree,
                            });
                        }
                        if up_count != up {
                            return Err(CollapseError::NeighborCountMismatch {
                                cluster: idx + 1,
                                towards: idx, // 1-based id of cluster idx-1
                                expected: up,
                                found: up_count,
                            });
                        }
                        if down_count != dn {
                            return Err(CollapseError::NeighborCountMismatch {
                                cluster: idx + 1,
                                towards: idx + 2,
                                expected: dn,
                                found: down_count,
                            });
                        }
                    }
                }
            }
            let (f, _, dn) = expected.expect("clusters are non-empty");
            functionality[idx] = f;
            down[idx] = dn;
        }

        let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
        let bonds: Vec<usize> = (0..m.saturating_sub(1))
            .map(|k| sizes[k] * down[k])
            .collect();

        let mut clusters = clusters;
        for cluster in &mut clusters {
            cluster.sort_unstable();
        }
        Ok(Self {
            clusters,
            sizes,
            bonds,
            functionality,
        })
    }

    /// Number of clusters.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Sorted node ids of each cluster, in chain order.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Nodes of 1-based cluster `k`.
    pub fn cluster(&self, k: usize) -> &[usize] {
        &self.clusters[k - 1]
    }

    /// Cluster sizes `d_k`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Bond counts `b_k` between clusters `k` and `k + 1`.
    pub fn bonds(&self) -> &[usize] {
        &self.bonds
    }

    /// Common node degree `f_k` within each cluster.
    pub fn functionality(&self) -> &[usize] {
        &self.functionality
    }

    /// Total number of underlying nodes.
    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

fn check_layout(spec: &GluedTreeSpec, graph: &Graph) -> Result<(), CollapseError> {
    if graph.n_nodes() != spec.node_count() {
        return Err(CollapseError::LayoutMismatch(format!(
            "expected {} nodes for generation {}, got {}",
            spec.node_count(),
            spec.generation(),
            graph.n_nodes()
        )));
    }
    Ok(())
}

/// Left-to-right chain of clusters: breadth-first layers seeded on the left
/// half of the axis row. For generation 3 the chain starts with the four
/// leftmost axis nodes `{8, 9, 10, 11}` and ends on the mirrored right half.
pub fn left_right_partition(
    spec: &GluedTreeSpec,
    graph: &Graph,
) -> Result<ClusterPartition, CollapseError> {
    check_layout(spec, graph)?;
    let axis_first = spec.row_first_node(spec.axis_row());
    let seed_width = spec.row_width(spec.axis_row()) / 2;
    let seed: Vec<usize> = (axis_first..axis_first + seed_width).collect();

    let mut assigned = vec![false; graph.n_nodes() + 1];
    for &node in &seed {
        assigned[node] = true;
    }
    let mut layers = vec![seed];
    loop {
        let mut next: Vec<usize> = Vec::new();
        for &node in layers.last().expect("seeded") {
            for &nb in graph.neighbors(node) {
                if !assigned[nb] {
                    assigned[nb] = true;
                    next.push(nb);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layers.push(next);
    }
    ClusterPartition::from_clusters(graph, layers)
}

/// Top-to-bottom chain of clusters: the `2G + 1` rows of the glued tree.
pub fn row_partition(
    spec: &GluedTreeSpec,
    graph: &Graph,
) -> Result<ClusterPartition, CollapseError> {
    check_layout(spec, graph)?;
    let rows = (1..=spec.row_count())
        .map(|r| {
            let first = spec.row_first_node(r);
            (first..first + spec.row_width(r)).collect()
        })
        .collect();
    ClusterPartition::from_clusters(graph, rows)
}

/// Cluster sizes `d_k` of the left-right chain, from the closed formulas:
/// `d_1 = d_{2G+1} = 2^(G-1)`, `d_{G+1} = 2`, and `d_k = 2^(G-k+1)` for
/// `k` in `[2, G]` together with its mirror `d_k = d_{2G+2-k}`.
pub fn glued_tree_cluster_sizes(generation: u32) -> Vec<usize> {
    let g = generation as usize;
    assert!(g >= 1, "generation must be at least 1");
    let m = 2 * g + 1;
    (1..=m)
        .map(|k| {
            let folded = k.min(m + 1 - k);
            if folded == g + 1 {
                2
            } else if folded == 1 {
                1 << (g - 1)
            } else {
                1 << (g - folded + 1)
            }
        })
        .collect()
}

/// Bond counts `b_k` of the left-right chain: `2^G` at the two ends, 2 on
/// both sides of the central cluster, and `max(d_k, d_{k+1})` elsewhere.
pub fn glued_tree_bond_counts(generation: u32) -> Vec<usize> {
    let g = generation as usize;
    assert!(g >= 1, "generation must be at least 1");
    let sizes = glued_tree_cluster_sizes(generation);
    let m = 2 * g + 1;
    (1..m)
        .map(|k| {
            if k == 1 || k == m - 1 {
                1 << g
            } else if k == g || k == g + 1 {
                2
            } else {
                sizes[k - 1].max(sizes[k])
            }
        })
        .collect()
}

/// The walk generator on symmetric superposition states: a real symmetric
/// tridiagonal matrix with `f_k` on the diagonal and
/// `-b_k / sqrt(d_k d_{k+1})` off it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChain {
    matrix: Array2<f64>,
    partition: ClusterPartition,
}

impl ReducedChain {
    /// Chain length (number of clusters).
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    /// Diagonalizes the chain; the result feeds the ordinary walk and
    /// limiting machinery.
    pub fn decompose(&self) -> Result<SpectralDecomposition, SpectralError> {
        decompose_symmetric(&self.matrix)
    }
}

/// Projects the adjacency matrix onto the symmetric superposition states of
/// an equitable partition.
///
/// The element `(j, k)` is computed two ways: by direct summation of
/// `<a_j| A |a_k>` and from the `f_k` / `b_k` closed form. Any disagreement
/// beyond `1e-12` means the partition is not equitable for this matrix and
/// is reported as an error rather than silently reduced.
pub fn reduce(
    partition: ClusterPartition,
    adjacency: &Array2<f64>,
) -> Result<ReducedChain, CollapseError> {
    let n = partition.node_count();
    let (rows, cols) = adjacency.dim();
    if rows != n || cols != n {
        return Err(CollapseError::MatrixMismatch {
            rows,
            cols,
            nodes: n,
        });
    }
    let m = partition.len();
    let sizes = partition.sizes();
    let mut formula = Array2::<f64>::zeros((m, m));
    for k in 0..m {
        formula[[k, k]] = partition.functionality()[k] as f64;
    }
    for k in 0..m - 1 {
        let coupling =
            -(partition.bonds()[k] as f64) / ((sizes[k] * sizes[k + 1]) as f64).sqrt();
        formula[[k, k + 1]] = coupling;
        formula[[k + 1, k]] = coupling;
    }

    for j in 0..m {
        for k in 0..m {
            let mut sum = 0.0;
            for &u in partition.cluster(j + 1) {
                for &v in partition.cluster(k + 1) {
                    sum += adjacency[[u - 1, v - 1]];
                }
            }
            let projected = sum / ((sizes[j] * sizes[k]) as f64).sqrt();
            if (projected - formula[[j, k]]).abs() > REDUCTION_TOLERANCE {
                return Err(CollapseError::ReductionMismatch {
                    j: j + 1,
                    k: k + 1,
                    projected,
                    formula: formula[[j, k]],
                });
            }
        }
    }

    Ok(ReducedChain {
        matrix: formula,
        partition,
    })
}

/// One evaluation of the collapsed walk: classical and quantum propagators
/// over clusters at the given time, plus the time-independent limiting
/// distribution of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedWalk {
    pub classical: Array2<f64>,
    pub amplitude: Array2<Complex64>,
    pub probability: Array2<f64>,
    pub chi: Array2<f64>,
}

/// Runs the walk on the reduced chain. Cluster dynamics obey the same
/// contracts as node dynamics: `sum_j |amplitude[j][k]|^2 = 1` per start
/// cluster `k`.
pub fn reduced_walk(
    chain: &ReducedChain,
    params: &WalkParams,
) -> Result<ReducedWalk, CollapseError> {
    let d = chain.decompose()?;
    let groups = group_degenerate(&d, default_degeneracy_tolerance(&d));
    let amplitude = ctqw_amplitude_matrix(&d, params);
    Ok(ReducedWalk {
        classical: ctrw_matrix(&d, params),
        probability: amplitude.mapv(|a| a.norm_sqr()),
        amplitude,
        chi: chi_exact(&d, &groups),
    })
}
