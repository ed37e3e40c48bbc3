//! Graph construction and adjacency matrices.
//!
//! The central graph family consists of two binary Cayley trees of generation
//! `G` glued along their common leaf row, giving `3 * 2^G - 2` nodes arranged
//! in `2G + 1` rows. Nodes are numbered row by row, top to bottom, left to
//! right, starting at 1; all public interfaces use these 1-based ids.
//!
//! The "adjacency" matrix used throughout is the discrete Laplace operator:
//! `A[i][i]` is the degree (functionality) of node `i` and `A[i][j] = -1` for
//! every bond, so each row sums to zero and `A` is positive semidefinite.

use ndarray::Array2;
use std::collections::HashSet;
use std::fmt::Write as _;
use thiserror::Error;

/// Errors from graph construction and edge-list parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("generation must be at least 1, got {0}")]
    InvalidGeneration(u32),
    #[error("graph must contain at least one node")]
    Empty,
    #[error("node id {id} outside 1..={max}")]
    NodeOutOfRange { id: usize, max: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("line {line}: expected two positive node ids, got {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

/// An undirected simple graph over nodes `1..=n_nodes`.
///
/// Edges are kept normalized: smaller endpoint first, sorted ascending.
/// Values are immutable after construction, so sharing across threads is safe.
#[derive(Debug, Clone)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n_nodes == other.n_nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph over nodes `1..=n_nodes` from an edge list.
    ///
    /// Rejects self-loops, duplicate edges (in either orientation) and node
    /// ids outside the range. Isolated nodes are allowed.
    pub fn from_edges(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n_nodes == 0 {
            return Err(GraphError::Empty);
        }
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in edges {
            for id in [a, b] {
                if id == 0 || id > n_nodes {
                    return Err(GraphError::NodeOutOfRange { id, max: n_nodes });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let edge = (a.min(b), a.max(b));
            if !seen.insert(edge) {
                return Err(GraphError::DuplicateEdge(edge.0, edge.1));
            }
            normalized.push(edge);
        }
        normalized.sort_unstable();
        let mut neighbors = vec![Vec::new(); n_nodes];
        for &(a, b) in &normalized {
            neighbors[a - 1].push(b);
            neighbors[b - 1].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n_nodes,
            edges: normalized,
            neighbors,
        })
    }

    /// Parses the plain-text edge-list format: one `a b` pair per line,
    /// `#` starts a comment, blank lines are skipped. The node count is the
    /// largest id mentioned.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = HashSet::new();
        let mut max_id = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let mut fields = content.split_whitespace();
            let (a, b) = match (fields.next(), fields.next(), fields.next()) {
                (None, _, _) => continue,
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::MalformedLine {
                        line,
                        text: content.trim().to_owned(),
                    })
                }
            };
            let parse = |s: &str| -> Option<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 => Some(v),
                    _ => None,
                }
            };
            let (a, b) = match (parse(a), parse(b)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(GraphError::MalformedLine {
                        line,
                        text: content.trim().to_owned(),
                    })
                }
            };
            if a == b {
                return Err(GraphError::AtLine {
                    line,
                    source: Box::new(GraphError::SelfLoop(a)),
                });
            }
            let edge = (a.min(b), a.max(b));
            if !seen.insert(edge) {
                return Err(GraphError::AtLine {
                    line,
                    source: Box::new(GraphError::DuplicateEdge(edge.0, edge.1)),
                });
            }
            edges.push(edge);
            max_id = max_id.max(edge.1);
        }
        if max_id == 0 {
            return Err(GraphError::Empty);
        }
        Self::from_edges(max_id, edges)
    }

    /// Emits the edge list: one edge per line, smaller id first, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Normalized edge list, smaller id first, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degree (functionality) of a node. Panics if `node` is out of range.
    pub fn degree(&self, node: usize) -> usize {
        self.neighbors(node).len()
    }

    /// Sorted neighbor ids of a node. Panics if `node` is out of range.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        assert!(
            node >= 1 && node <= self.n_nodes,
            "node {node} outside 1..={}",
            self.n_nodes
        );
        &self.neighbors[node - 1]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let edge = (a.min(b), a.max(b));
        self.edges.binary_search(&edge).is_ok()
    }

    /// Dense discrete Laplace operator: degree on the diagonal, `-1` per bond.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let n = self.n_nodes;
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = self.neighbors[i].len() as f64;
        }
        for &(u, v) in &self.edges {
            a[[u - 1, v - 1]] = -1.0;
            a[[v - 1, u - 1]] = -1.0;
        }
        a
    }
}

/// Two binary Cayley trees of generation `G >= 1` glued along their leaf row.
///
/// Row `r` (1-based, `r = 1..=2G+1`) holds `2^(r-1)` nodes for `r <= G+1` and
/// `2^(2G+1-r)` nodes below the axis. Node 1 is the top, the axis row is
/// `G+1`, and node `3 * 2^G - 2` is the bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluedTreeSpec {
    generation: u32,
}

impl GluedTreeSpec {
    pub fn new(generation: u32) -> Result<Self, GraphError> {
        if generation < 1 {
            return Err(GraphError::InvalidGeneration(generation));
        }
        Ok(Self { generation })
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    /// Total nodes: `3 * 2^G - 2`.
    pub fn node_count(&self) -> usize {
        3 * (1usize << self.generation) - 2
    }

    /// Number of rows: `2G + 1`.
    pub fn row_count(&self) -> usize {
        2 * self.generation as usize + 1
    }

    /// Index of the glue row, `G + 1`.
    pub fn axis_row(&self) -> usize {
        self.generation as usize + 1
    }

    /// Nodes in row `r`.
    pub fn row_width(&self, row: usize) -> usize {
        assert!(
            row >= 1 && row <= self.row_count(),
            "row {row} outside 1..={}",
            self.row_count()
        );
        if row <= self.axis_row() {
            1 << (row - 1)
        } else {
            1 << (self.row_count() - row)
        }
    }

    /// Id of the first (leftmost) node in row `r`.
    pub fn row_first_node(&self, row: usize) -> usize {
        (1..row).map(|r| self.row_width(r)).sum::<usize>() + 1
    }

    /// Id of the node at 1-based `pos` within row `r`.
    pub fn node_at(&self, row: usize, pos: usize) -> usize {
        assert!(
            pos >= 1 && pos <= self.row_width(row),
            "position {pos} outside row {row} of width {}",
            self.row_width(row)
        );
        self.row_first_node(row) + pos - 1
    }

    /// Inverse of [`node_at`](Self::node_at): `(row, pos)` of a node id.
    pub fn row_and_position(&self, node: usize) -> (usize, usize) {
        assert!(
            node >= 1 && node <= self.node_count(),
            "node {node} outside 1..={}",
            self.node_count()
        );
        let mut first = 1;
        for row in 1..=self.row_count() {
            let width = self.row_width(row);
            if node < first + width {
                return (row, node - first + 1);
            }
            first += width;
        }
        unreachable!("node id within range must fall in some row");
    }

    /// Reflection through the vertical axis: position `p -> width + 1 - p`
    /// within each row. A graph automorphism of [`build`](Self::build).
    pub fn mirror_left_right(&self, node: usize) -> usize {
        let (row, pos) = self.row_and_position(node);
        self.node_at(row, self.row_width(row) + 1 - pos)
    }

    /// Reflection through the glue row: row `r -> 2G + 2 - r`, same position.
    /// A graph automorphism of [`build`](Self::build).
    pub fn mirror_top_bottom(&self, node: usize) -> usize {
        let (row, pos) = self.row_and_position(node);
        self.node_at(self.row_count() + 1 - row, pos)
    }

    /// Builds the glued tree. Row-`r` position `p` is bonded to positions
    /// `2p-1` and `2p` of the next row towards the axis, from both sides.
    pub fn build(&self) -> Graph {
        let g = self.generation as usize;
        let mut edges = Vec::with_capacity(self.node_count() + 2);
        for row in 1..=g {
            for pos in 1..=self.row_width(row) {
                let parent = self.node_at(row, pos);
                edges.push((parent, self.node_at(row + 1, 2 * pos - 1)));
                edges.push((parent, self.node_at(row + 1, 2 * pos)));
            }
        }
        for row in g + 1..=2 * g {
            for pos in 1..=self.row_width(row + 1) {
                let parent = self.node_at(row + 1, pos);
                edges.push((parent, self.node_at(row, 2 * pos - 1)));
                edges.push((parent, self.node_at(row, 2 * pos)));
            }
        }
        Graph::from_edges(self.node_count(), edges)
            .expect("glued-tree construction yields a valid simple graph")
    }
}

/// Convenience wrapper: validate the generation and build the glued tree.
pub fn build_glued_tree(generation: u32) -> Result<Graph, GraphError> {
    GluedTreeSpec::new(generation).map(|spec| spec.build())
}
