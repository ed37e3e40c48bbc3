//! Continuous-time quantum walks (CTQW) and continuous-time random walks
//! (CTRW) on finite graphs, evaluated exactly through dense spectral
//! decomposition.
//!
//! The crate centers on the family of two glued binary Cayley trees, where
//! transport is strikingly direction-dependent: a quantum walk crosses the
//! graph top-to-bottom much faster than diffusion, yet left-to-right it is
//! slower than its classical counterpart. Everything needed to reproduce
//! those results is here:
//!
//! * [`graph`] — glued-tree construction, edge-list I/O, adjacency matrices;
//! * [`spectral`] — a deterministic Jacobi eigensolver and degeneracy
//!   grouping;
//! * [`walk`] — classical propagators, quantum amplitudes, and their ratios
//!   at arbitrary times;
//! * [`limiting`] — exact long-time averaged distributions plus a
//!   brute-force quadrature oracle;
//! * [`collapse`] — equitable partitions of the glued tree and the exact
//!   reduction of the walk onto a short tridiagonal chain.

pub mod collapse;
pub mod graph;
pub mod limiting;
pub mod spectral;
pub mod walk;

pub use collapse::{
    glued_tree_bond_counts, glued_tree_cluster_sizes, left_right_partition, reduce, reduced_walk,
    row_partition, ClusterPartition, CollapseError, ReducedChain, ReducedWalk,
};
pub use graph::{build_glued_tree, GluedTreeSpec, Graph, GraphError};
pub use limiting::{chi_exact, chi_numeric, chi_numeric_matrix, chi_profile, LimitingDistribution};
pub use spectral::{
    decompose_symmetric, default_degeneracy_tolerance, group_degenerate, DegeneracyGroups,
    SpectralDecomposition, SpectralError,
};
pub use walk::{
    ctqw_amplitude_matrix, ctqw_probability, ctqw_probability_matrix, ctrw_matrix,
    quantum_classical_ratio, WalkDistribution, WalkError, WalkParams,
};
