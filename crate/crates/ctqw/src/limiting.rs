//! Long-time averaged quantum transition probabilities.
//!
//! Unitary evolution never relaxes to a stationary distribution, so the
//! meaningful long-time object is the time average
//!
//! ```text
//! chi_jk = lim_{T -> inf} (1/T) int_0^T |alpha_jk(t)|^2 dt
//! ```
//!
//! Unlike its classical counterpart (uniform `1/N` on a connected graph no
//! matter where the walk starts), `chi` retains a strong dependence on the
//! start node.
//!
//! # Closed form
//!
//! Expanding `alpha_jk(t) = sum_n exp(-i gamma lambda_n t) Q_jn Q_kn` gives
//!
//! ```text
//! |alpha_jk(t)|^2 = sum_{n,m} Q_jn Q_kn Q_jm Q_km exp(-i gamma (lambda_n - lambda_m) t).
//! ```
//!
//! The time average of `exp(-i gamma (lambda_n - lambda_m) t)` is 1 when
//! `lambda_n = lambda_m` and 0 otherwise (the oscillation integrates to a
//! bounded quantity, which vanishes after dividing by `T`). Only pairs
//! inside a degenerate eigenvalue group survive:
//!
//! ```text
//! chi_jk = sum_{groups E} ( sum_{n in E} Q_jn Q_kn )^2.
//! ```
//!
//! `gamma` drops out entirely — it only rescales time. [`chi_exact`]
//! evaluates this group sum; [`chi_numeric`] integrates the definition
//! directly on a finite horizon and serves as its independent check.

use ndarray::{Array1, Array2, Zip};

use crate::spectral::{DegeneracyGroups, SpectralDecomposition};

/// Exact limiting distribution via the degeneracy-group sum.
///
/// The result is symmetric, doubly stochastic, entrywise in `[0, 1]`, and
/// independent of the transmission rate. `groups` must come from the same
/// decomposition (see [`crate::spectral::group_degenerate`]).
pub fn chi_exact(d: &SpectralDecomposition, groups: &DegeneracyGroups) -> Array2<f64> {
    let n = d.n();
    let covered: usize = groups.groups().iter().map(Vec::len).sum();
    assert_eq!(covered, n, "degeneracy groups must partition the spectrum");
    let q = d.eigenvectors();
    let mut chi = Array2::<f64>::zeros((n, n));
    let mut overlap = Array2::<f64>::zeros((n, n));
    for (group, _) in groups.iter() {
        overlap.fill(0.0);
        for &idx in group {
            let col = q.column(idx);
            for j in 0..n {
                let qj = col[j];
                if qj == 0.0 {
                    continue;
                }
                for k in 0..n {
                    overlap[[j, k]] += qj * col[k];
                }
            }
        }
        Zip::from(&mut chi).and(&overlap).for_each(|c, &s| *c += s * s);
    }
    chi
}

/// One column of [`chi_exact`]: the limiting profile seen from a 1-based
/// start node.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingDistribution {
    start: usize,
    chi: Array1<f64>,
}

impl LimitingDistribution {
    pub fn start(&self) -> usize {
        self.start
    }

    /// `chi[j - 1]` is the limiting probability at node `j`; entries sum to 1.
    pub fn chi(&self) -> &Array1<f64> {
        &self.chi
    }
}

/// Limiting profile for one start node, computed column-wise.
pub fn chi_profile(
    d: &SpectralDecomposition,
    groups: &DegeneracyGroups,
    start: usize,
) -> LimitingDistribution {
    let n = d.n();
    assert!(start >= 1 && start <= n, "node {start} outside 1..={n}");
    let q = d.eigenvectors();
    let mut chi = Array1::<f64>::zeros(n);
    let mut overlap = vec![0.0f64; n];
    for (group, _) in groups.iter() {
        overlap.fill(0.0);
        for &idx in group {
            let col = q.column(idx);
            let qk = col[start - 1];
            if qk == 0.0 {
                continue;
            }
            for j in 0..n {
                overlap[j] += col[j] * qk;
            }
        }
        for j in 0..n {
            chi[j] += overlap[j] * overlap[j];
        }
    }
    LimitingDistribution { start, chi }
}

/// Finite-horizon time average of `pi_jk` between 1-based nodes `j` and `k`:
/// a trapezoidal rule over `steps` uniform intervals on `[0, horizon]`.
///
/// This is the brute-force oracle for [`chi_exact`]; it converges like
/// `O(1/horizon)` because the off-diagonal phases cancel.
pub fn chi_numeric(
    d: &SpectralDecomposition,
    gamma: f64,
    j: usize,
    k: usize,
    horizon: f64,
    steps: usize,
) -> f64 {
    let n = d.n();
    assert!(j >= 1 && j <= n, "node {j} outside 1..={n}");
    assert!(k >= 1 && k <= n, "node {k} outside 1..={n}");
    assert!(horizon > 0.0, "horizon must be positive, got {horizon}");
    assert!(steps >= 1000, "need at least 1000 steps, got {steps}");
    let q = d.eigenvectors();
    let lambda = d.eigenvalues();
    let products: Vec<f64> = (0..n).map(|m| q[[j - 1, m]] * q[[k - 1, m]]).collect();
    let dt = horizon / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let t = i as f64 * dt;
        let mut re = 0.0;
        let mut im = 0.0;
        for m in 0..n {
            let theta = gamma * lambda[m] * t;
            re += theta.cos() * products[m];
            im -= theta.sin() * products[m];
        }
        let weight = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += weight * (re * re + im * im);
    }
    acc / steps as f64
}

/// All-pairs variant of [`chi_numeric`]: the same trapezoidal average,
/// evaluated for every `(j, k)` at once so whole-matrix comparisons against
/// [`chi_exact`] stay affordable.
pub fn chi_numeric_matrix(
    d: &SpectralDecomposition,
    gamma: f64,
    horizon: f64,
    steps: usize,
) -> Array2<f64> {
    assert!(horizon > 0.0, "horizon must be positive, got {horizon}");
    assert!(steps >= 1000, "need at least 1000 steps, got {steps}");
    let n = d.n();
    let q = d.eigenvectors();
    let qt = q.t();
    let lambda = d.eigenvalues();
    let dt = horizon / steps as f64;

    let mut acc = Array2::<f64>::zeros((n, n));
    let mut scaled = Array2::<f64>::zeros((n, n));
    let mut re = Array2::<f64>::zeros((n, n));
    let mut im = Array2::<f64>::zeros((n, n));
    for i in 0..=steps {
        let t = i as f64 * dt;
        let weight = if i == 0 || i == steps { 0.5 } else { 1.0 };

        for m in 0..n {
            let cos = (gamma * lambda[m] * t).cos();
            for row in 0..n {
                scaled[[row, m]] = q[[row, m]] * cos;
            }
        }
        ndarray::linalg::general_mat_mul(1.0, &scaled, &qt, 0.0, &mut re);
        for m in 0..n {
            let sin = (gamma * lambda[m] * t).sin();
            for row in 0..n {
                scaled[[row, m]] = q[[row, m]] * sin;
            }
        }
        ndarray::linalg::general_mat_mul(1.0, &scaled, &qt, 0.0, &mut im);

        Zip::from(&mut acc)
            .and(&re)
            .and(&im)
            .for_each(|a, &r, &i2| *a += weight * (r * r + i2 * i2));
    }
    acc /= steps as f64;
    acc
}
