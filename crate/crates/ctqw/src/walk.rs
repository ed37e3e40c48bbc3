//! Classical and quantum walk propagators evaluated from a spectral
//! decomposition.
//!
//! With the adjacency matrix `A = Q diag(lambda) Q^T` and a uniform bond
//! rate `gamma`, the classical transition probabilities and quantum
//! transition amplitudes are
//!
//! ```text
//! p_jk(t)     = sum_n exp(-gamma lambda_n t) Q_jn Q_kn
//! alpha_jk(t) = sum_n exp(-i gamma lambda_n t) Q_jn Q_kn
//! ```
//!
//! so a single decomposition serves every `(gamma, t)`. Nothing here steps
//! an ODE; the spectral form is exact at arbitrary times.
//!
//! Matrices are indexed 0-based; row/column `j - 1` belongs to node `j`.
//! Scalar helpers take the 1-based node ids used everywhere else.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::SpectralDecomposition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("transmission rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
}

/// Uniform bond rate `gamma` and evaluation time `t` (in units of
/// `1/gamma`). Negative or non-finite values are rejected at construction,
/// so the propagator evaluations themselves cannot fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    gamma: f64,
    time: f64,
}

impl WalkParams {
    pub fn new(gamma: f64, time: f64) -> Result<Self, WalkError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(WalkError::InvalidRate(gamma));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(WalkError::InvalidTime(time));
        }
        Ok(Self { gamma, time })
    }

    /// Rate 1, i.e. time measured in units of the inverse transmission rate.
    pub fn unit_rate(time: f64) -> Result<Self, WalkError> {
        Self::new(1.0, time)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn at_time(&self, time: f64) -> Result<Self, WalkError> {
        Self::new(self.gamma, time)
    }
}

// The propagators are symmetric because A is; the blocked matrix product
// only guarantees that up to the last ulp, so the upper triangle is made
// authoritative.
fn symmetrize(m: &mut Array2<f64>) {
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            m[[j, i]] = m[[i, j]];
        }
    }
}

/// Classical propagator matrix `p_jk(t)`: symmetric and column-stochastic.
pub fn ctrw_matrix(d: &SpectralDecomposition, params: &WalkParams) -> Array2<f64> {
    let q = d.eigenvectors();
    let weights = d
        .eigenvalues()
        .mapv(|l| (-params.gamma * l * params.time).exp());
    let mut p = (q * &weights).dot(&q.t());
    symmetrize(&mut p);
    p
}

/// Quantum transition amplitudes `alpha_jk(t)`. Complex-symmetric, with
/// unitary columns: `sum_j |alpha_jk|^2 = 1`.
pub fn ctqw_amplitude_matrix(
    d: &SpectralDecomposition,
    params: &WalkParams,
) -> Array2<Complex64> {
    let q = d.eigenvectors();
    let phases = d.eigenvalues().mapv(|l| params.gamma * l * params.time);
    let mut re = (q * &phases.mapv(f64::cos)).dot(&q.t());
    let mut im = (q * &phases.mapv(|x| -x.sin())).dot(&q.t());
    symmetrize(&mut re);
    symmetrize(&mut im);
    let mut alpha = Array2::from_elem(re.dim(), Complex64::new(0.0, 0.0));
    Zip::from(&mut alpha)
        .and(&re)
        .and(&im)
        .for_each(|a, &r, &i| *a = Complex64::new(r, i));
    alpha
}

/// Quantum transition probabilities `pi_jk(t) = |alpha_jk(t)|^2`.
pub fn ctqw_probability_matrix(d: &SpectralDecomposition, params: &WalkParams) -> Array2<f64> {
    ctqw_amplitude_matrix(d, params).mapv(|a| a.norm_sqr())
}

/// Single quantum transition probability between 1-based nodes `j` and `k`.
pub fn ctqw_probability(d: &SpectralDecomposition, params: &WalkParams, j: usize, k: usize) -> f64 {
    let n = d.n();
    assert!(j >= 1 && j <= n, "node {j} outside 1..={n}");
    assert!(k >= 1 && k <= n, "node {k} outside 1..={n}");
    let q = d.eigenvectors();
    let lambda = d.eigenvalues();
    let mut re = 0.0;
    let mut im = 0.0;
    for m in 0..n {
        let c = q[[j - 1, m]] * q[[k - 1, m]];
        let theta = params.gamma * lambda[m] * params.time;
        re += theta.cos() * c;
        im -= theta.sin() * c;
    }
    re * re + im * im
}

/// Classical probabilities below this are treated as "not meaningfully
/// reachable yet" and the quantum/classical ratio is reported as missing.
pub const RATIO_FLOOR: f64 = 1e-300;

/// Elementwise ratio `pi_jk(t) / p_jk(t)`. Entries where the classical
/// probability underflows [`RATIO_FLOOR`] are `NaN` (missing), never
/// infinity; serializers emit them as empty fields.
pub fn quantum_classical_ratio(d: &SpectralDecomposition, params: &WalkParams) -> Array2<f64> {
    let p = ctrw_matrix(d, params);
    let pi = ctqw_probability_matrix(d, params);
    let mut ratio = Array2::zeros(p.dim());
    Zip::from(&mut ratio)
        .and(&pi)
        .and(&p)
        .for_each(|r, &pi_jk, &p_jk| {
            *r = if p_jk < RATIO_FLOOR { f64::NAN } else { pi_jk / p_jk };
        });
    ratio
}

/// Everything one start node produces at one time: the classical
/// probability column, the quantum amplitude column, and its squared
/// modulus. Both probability columns sum to 1 (up to roundoff); tiny
/// negative classical entries from roundoff are kept as-is and only clamped
/// when serialized.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    start: usize,
    time: f64,
    classical: Array1<f64>,
    amplitude: Array1<Complex64>,
    quantum: Array1<f64>,
}

impl WalkDistribution {
    /// Evaluates the column of the walk starting from 1-based node `start`.
    pub fn evaluate(d: &SpectralDecomposition, params: &WalkParams, start: usize) -> Self {
        let n = d.n();
        assert!(start >= 1 && start <= n, "node {start} outside 1..={n}");
        let q = d.eigenvectors();
        let row = q.row(start - 1);

        let weights = Array1::from_iter(
            d.eigenvalues()
                .iter()
                .zip(row.iter())
                .map(|(&l, &qk)| (-params.gamma * l * params.time).exp() * qk),
        );
        let classical = q.dot(&weights);

        let theta =
            Array1::from_iter(d.eigenvalues().iter().map(|&l| params.gamma * l * params.time));
        let re_w = Array1::from_iter(theta.iter().zip(row.iter()).map(|(&t, &qk)| t.cos() * qk));
        let im_w = Array1::from_iter(theta.iter().zip(row.iter()).map(|(&t, &qk)| -t.sin() * qk));
        let re = q.dot(&re_w);
        let im = q.dot(&im_w);
        let amplitude =
            Array1::from_iter(re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)));
        let quantum = amplitude.mapv(|a| a.norm_sqr());

        Self {
            start,
            time: params.time,
            classical,
            amplitude,
            quantum,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Classical probabilities `p_jk(t)`, indexed by node - 1.
    pub fn classical(&self) -> &Array1<f64> {
        &self.classical
    }

    /// Quantum amplitudes `alpha_jk(t)`, indexed by node - 1.
    pub fn amplitude(&self) -> &Array1<Complex64> {
        &self.amplitude
    }

    /// Quantum probabilities `pi_jk(t)`, indexed by node - 1.
    pub fn quantum(&self) -> &Array1<f64> {
        &self.quantum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_glued_tree, GluedTreeSpec, Graph};
    use crate::spectral::decompose_symmetric;

    fn decompose_generation(generation: u32) -> SpectralDecomposition {
        let a = build_glued_tree(generation).unwrap().adjacency_matrix();
        decompose_symmetric(&a).unwrap()
    }

    #[test]
    fn params_validate() {
        assert!(WalkParams::new(1.0, 0.0).is_ok());
        assert!(matches!(
            WalkParams::new(0.0, 1.0),
            Err(WalkError::InvalidRate(_))
        ));
        assert!(matches!(
            WalkParams::new(1.0, -0.5),
            Err(WalkError::InvalidTime(_))
        ));
        assert!(matches!(
            WalkParams::new(1.0, f64::NAN),
            Err(WalkError::InvalidTime(_))
        ));
    }

    #[test]
    fn zero_time_is_the_identity() {
        let d = decompose_generation(2);
        let params = WalkParams::unit_rate(0.0).unwrap();
        let p = ctrw_matrix(&d, &params);
        let alpha = ctqw_amplitude_matrix(&d, &params);
        for i in 0..d.n() {
            for j in 0..d.n() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((p[[i, j]] - expected).abs() < 1e-12);
                assert!((alpha[[i, j]] - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_node_classical_is_analytic() {
        let g = Graph::from_edges(2, [(1, 2)]).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        for &t in &[0.0, 0.1, 0.7, 2.5, 10.0] {
            let p = ctrw_matrix(&d, &WalkParams::unit_rate(t).unwrap());
            let decay = (-2.0 * t).exp();
            assert!((p[[0, 0]] - (1.0 + decay) / 2.0).abs() < 1e-12, "t={t}");
            assert!((p[[1, 0]] - (1.0 - decay) / 2.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn two_node_quantum_is_analytic() {
        let g = Graph::from_edges(2, [(1, 2)]).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        for &t in &[0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2, 4.0] {
            let params = WalkParams::unit_rate(t).unwrap();
            let alpha = ctqw_amplitude_matrix(&d, &params);
            // alpha_11(t) = exp(-it) cos(t)
            let expected = Complex64::new(0.0, -t).exp() * t.cos();
            assert!((alpha[[0, 0]] - expected).norm() < 1e-12, "t={t}");
            let pi11 = ctqw_probability(&d, &params, 1, 1);
            assert!((pi11 - t.cos().powi(2)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn two_node_perfect_transfer_at_half_pi() {
        let g = Graph::from_edges(2, [(1, 2)]).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        let params = WalkParams::unit_rate(std::f64::consts::FRAC_PI_2).unwrap();
        assert!(ctqw_probability(&d, &params, 1, 1) < 1e-12);
        assert!((ctqw_probability(&d, &params, 2, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn glued_tree_classical_limit_is_uniform() {
        let d = decompose_generation(2);
        let p = ctrw_matrix(&d, &WalkParams::unit_rate(100.0).unwrap());
        for i in 0..10 {
            for j in 0..10 {
                assert!((p[[i, j]] - 0.1).abs() < 1e-6, "p[{i},{j}] = {}", p[[i, j]]);
            }
        }
    }

    #[test]
    fn propagators_are_symmetric_as_computed() {
        let d = decompose_generation(3);
        let params = WalkParams::new(1.3, 2.7).unwrap();
        let p = ctrw_matrix(&d, &params);
        let alpha = ctqw_amplitude_matrix(&d, &params);
        for i in 0..d.n() {
            for j in 0..d.n() {
                assert_eq!(p[[i, j]], p[[j, i]]);
                assert_eq!(alpha[[i, j]], alpha[[j, i]]);
            }
        }
    }

    #[test]
    fn mirror_pair_probabilities_match() {
        let d = decompose_generation(2);
        for &t in &[0.5, 3.0, 17.0] {
            let params = WalkParams::unit_rate(t).unwrap();
            let a = ctqw_probability(&d, &params, 7, 4);
            let b = ctqw_probability(&d, &params, 4, 7);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conservation_over_sampled_configurations() {
        // Cheap deterministic xorshift so the sweep is reproducible.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let decomps: Vec<_> = (1..=4).map(decompose_generation).collect();
        for i in 0..200 {
            let d = &decomps[i % 4];
            let gamma = [0.5, 1.0, 2.0][i % 3];
            let t = 100.0 * next();
            let params = WalkParams::new(gamma, t).unwrap();
            let p = ctrw_matrix(d, &params);
            let pi = ctqw_probability_matrix(d, &params);
            for k in 0..d.n() {
                let p_sum: f64 = (0..d.n()).map(|j| p[[j, k]]).sum();
                let pi_sum: f64 = (0..d.n()).map(|j| pi[[j, k]]).sum();
                assert!((p_sum - 1.0).abs() <= 1e-10, "p sum {p_sum} at t={t}");
                assert!((pi_sum - 1.0).abs() <= 1e-10, "pi sum {pi_sum} at t={t}");
                for j in 0..d.n() {
                    assert!(p[[j, k]] >= -1e-12, "p[{j},{k}] = {}", p[[j, k]]);
                }
            }
        }
    }

    #[test]
    fn automorphisms_leave_probabilities_invariant() {
        for generation in [2u32, 3] {
            let spec = GluedTreeSpec::new(generation).unwrap();
            let d = decompose_symmetric(&spec.build().adjacency_matrix()).unwrap();
            for &t in &[0.8, 5.0, 21.0] {
                let params = WalkParams::unit_rate(t).unwrap();
                let pi = ctqw_probability_matrix(&d, &params);
                for map in [
                    GluedTreeSpec::mirror_left_right as fn(&GluedTreeSpec, usize) -> usize,
                    GluedTreeSpec::mirror_top_bottom,
                ] {
                    for j in 1..=d.n() {
                        for k in 1..=d.n() {
                            let mapped = pi[[map(&spec, j) - 1, map(&spec, k) - 1]];
                            assert!(
                                (pi[[j - 1, k - 1]] - mapped).abs() <= 1e-10,
                                "G={generation} t={t} ({j},{k})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classical_semigroup_property() {
        let d = decompose_generation(3);
        let (t1, t2) = (1.7, 4.4);
        let p1 = ctrw_matrix(&d, &WalkParams::unit_rate(t1).unwrap());
        let p2 = ctrw_matrix(&d, &WalkParams::unit_rate(t2).unwrap());
        let p12 = ctrw_matrix(&d, &WalkParams::unit_rate(t1 + t2).unwrap());
        let composed = p1.dot(&p2);
        for i in 0..d.n() {
            for j in 0..d.n() {
                assert!((p12[[i, j]] - composed[[i, j]]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn amplitudes_satisfy_the_schrodinger_equation() {
        // Centered difference in t against -i H alpha with H = gamma A.
        let g = build_glued_tree(3).unwrap();
        let a = g.adjacency_matrix();
        let d = decompose_symmetric(&a).unwrap();
        let gamma = 1.0;
        let h = 1e-5;
        for &t in &[0.5, 2.0, 9.0] {
            let plus = ctqw_amplitude_matrix(&d, &WalkParams::new(gamma, t + h).unwrap());
            let minus = ctqw_amplitude_matrix(&d, &WalkParams::new(gamma, t - h).unwrap());
            let alpha = ctqw_amplitude_matrix(&d, &WalkParams::new(gamma, t).unwrap());
            for j in 0..d.n() {
                for k in 0..d.n() {
                    let derivative = (plus[[j, k]] - minus[[j, k]]) / (2.0 * h);
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for l in 0..d.n() {
                        rhs += Complex64::new(0.0, -gamma * a[[j, l]]) * alpha[[l, k]];
                    }
                    assert!(
                        (derivative - rhs).norm() <= 1e-6,
                        "t={t} ({j},{k}): {derivative} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn ratio_is_one_on_the_single_node_graph() {
        let g = Graph::from_edges(1, []).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        for &t in &[0.1, 1.0, 50.0] {
            let ratio = quantum_classical_ratio(&d, &WalkParams::unit_rate(t).unwrap());
            assert!((ratio[[0, 0]] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_matches_two_node_analytic_form() {
        let g = Graph::from_edges(2, [(1, 2)]).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        for &t in &[0.05, 0.2, 0.9] {
            let ratio = quantum_classical_ratio(&d, &WalkParams::unit_rate(t).unwrap());
            let expected = t.sin().powi(2) / ((1.0 - (-2.0 * t).exp()) / 2.0);
            assert!((ratio[[1, 0]] - expected).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn far_pair_ratio_exceeds_one_on_average_at_long_times() {
        // Once p has flattened to 1/N the ratio oscillates about
        // N * chi_10_1 > 1 for the top-to-bottom pair.
        let d = decompose_generation(2);
        let samples = 200;
        let total: f64 = (0..samples)
            .map(|i| {
                let t = 50.0 + 50.0 * i as f64 / samples as f64;
                let ratio = quantum_classical_ratio(&d, &WalkParams::unit_rate(t).unwrap());
                ratio[[9, 0]]
            })
            .sum();
        assert!(total / samples as f64 > 1.0);
    }

    #[test]
    fn ratio_is_missing_when_classically_unreachable() {
        // Two isolated nodes: p_21(t) is exactly zero forever.
        let g = Graph::from_edges(2, []).unwrap();
        let d = decompose_symmetric(&g.adjacency_matrix()).unwrap();
        let ratio = quantum_classical_ratio(&d, &WalkParams::unit_rate(1.0).unwrap());
        assert!(ratio[[1, 0]].is_nan());
        assert!((ratio[[0, 0]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_columns_match_matrices_and_conserve() {
        let d = decompose_generation(3);
        let params = WalkParams::new(0.5, 7.3).unwrap();
        let dist = WalkDistribution::evaluate(&d, &params, 8);
        let p = ctrw_matrix(&d, &params);
        let pi = ctqw_probability_matrix(&d, &params);
        for j in 0..d.n() {
            assert!((dist.classical()[j] - p[[j, 7]]).abs() < 1e-13);
            assert!((dist.quantum()[j] - pi[[j, 7]]).abs() < 1e-13);
        }
        assert!((dist.classical().sum() - 1.0).abs() < 1e-10);
        assert!((dist.quantum().sum() - 1.0).abs() < 1e-10);
    }
}
