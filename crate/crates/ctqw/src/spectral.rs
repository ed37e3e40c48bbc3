//! Dense eigendecomposition of real symmetric matrices.
//!
//! A cyclic Jacobi sweep is used: at the matrix sizes this crate targets
//! (a few hundred nodes at most) it is simple, unconditionally stable, and
//! delivers eigenvector orthogonality at machine precision, which the
//! long-time averages downstream depend on.
//!
//! Output is deterministic: eigenvalues ascend, and each eigenvector is
//! normalized so that its largest-magnitude entry (ties broken by lowest
//! index) is positive.

use ndarray::{Array1, Array2};
use thiserror::Error;

/// Maximum number of full Jacobi sweeps before giving up. Convergence is
/// quadratic; well-conditioned symmetric matrices need fewer than 15.
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("Jacobi iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Eigenvalues and orthonormal eigenvectors of a real symmetric matrix.
///
/// `eigenvalues[n]` pairs with column `n` of `eigenvectors`; eigenvalues are
/// ascending. Satisfies `A = Q diag(lambda) Q^T` and `Q^T Q = I` to within
/// `1e-10 * max(1, max|A|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }
}

/// Groups of indices of (numerically) equal eigenvalues.
///
/// Produced by single-linkage clustering of the sorted eigenvalue sequence:
/// two neighbors belong to the same group when their gap is at most the
/// tolerance. Groups partition `0..n` in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyGroups {
    groups: Vec<Vec<usize>>,
    values: Vec<f64>,
}

impl DegeneracyGroups {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Index sets, one per group, ascending.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Representative (mean) eigenvalue per group.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.groups
            .iter()
            .map(Vec::as_slice)
            .zip(self.values.iter().copied())
    }
}

/// Diagonalizes a real symmetric matrix with cyclic Jacobi rotations.
///
/// The input must be exactly symmetric (bitwise equal across the diagonal);
/// graph adjacency builders guarantee this. Fails with
/// [`SpectralError::NotSymmetric`] otherwise.
pub fn decompose_symmetric(m: &Array2<f64>) -> Result<SpectralDecomposition, SpectralError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(SpectralError::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(SpectralError::Empty);
    }
    for i in 0..rows {
        for j in i + 1..rows {
            if m[[i, j]] != m[[j, i]] {
                return Err(SpectralError::NotSymmetric { row: i, col: j });
            }
        }
    }

    let n = rows;
    let mut a = m.clone();
    let mut q = Array2::<f64>::eye(n);

    // Stop once the off-diagonal mass is negligible against the matrix scale.
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-14 * frob.max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = a[[p, r]];
                if apq == 0.0 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[r, r]];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != r {
                        let aip = a[[i, p]];
                        let aiq = a[[i, r]];
                        a[[i, p]] = c * aip - s * aiq;
                        a[[p, i]] = a[[i, p]];
                        a[[i, r]] = s * aip + c * aiq;
                        a[[r, i]] = a[[i, r]];
                    }
                }
                a[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[[r, r]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[[p, r]] = 0.0;
                a[[r, p]] = 0.0;

                for i in 0..n {
                    let vip = q[[i, p]];
                    let viq = q[[i, r]];
                    q[[i, p]] = c * vip - s * viq;
                    q[[i, r]] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(SpectralError::NoConvergence(MAX_SWEEPS));
    }

    // Ascending eigenvalue order; stable sort keeps ties deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));

    let eigenvalues = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        let flip = needs_sign_flip(&q, src);
        for i in 0..n {
            let v = q[[i, src]];
            eigenvectors[[i, dst]] = if flip { -v } else { v };
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for r in p + 1..n {
            sum += 2.0 * a[[p, r]] * a[[p, r]];
        }
    }
    sum.sqrt()
}

// Sign convention: largest-magnitude entry positive, ties to the lowest index.
fn needs_sign_flip(q: &Array2<f64>, col: usize) -> bool {
    let mut best = 0;
    for i in 1..q.nrows() {
        if q[[i, col]].abs() > q[[best, col]].abs() {
            best = i;
        }
    }
    q[[best, col]] < 0.0
}

/// Default grouping tolerance: `1e-8` relative to the spectral radius.
///
/// Symmetry-induced degeneracies are exact, so anything safely between
/// roundoff (`~1e-12`) and the smallest true gap works.
pub fn default_degeneracy_tolerance(d: &SpectralDecomposition) -> f64 {
    let radius = d
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    1e-8 * radius.max(1.0)
}

/// Splits the sorted eigenvalue sequence into degenerate groups by single
/// linkage: a gap of more than `tol` starts a new group.
pub fn group_degenerate(d: &SpectralDecomposition, tol: f64) -> DegeneracyGroups {
    assert!(tol > 0.0, "tolerance must be positive, got {tol}");
    let lambda = &d.eigenvalues;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    for i in 1..lambda.len() {
        if lambda[i] - lambda[i - 1] <= tol {
            current.push(i);
        } else {
            groups.push(std::mem::replace(&mut current, vec![i]));
        }
    }
    groups.push(current);
    let values = groups
        .iter()
        .map(|g| g.iter().map(|&i| lambda[i]).sum::<f64>() / g.len() as f64)
        .collect();
    DegeneracyGroups { groups, values }
}
