//! Diagonal-norm summation-by-parts first-derivative operator, fourth order
//! in the interior with second-order boundary closures.
//!
//! The defining property is discrete integration by parts: with `P` the
//! diagonal norm (quadrature) matrix and `D` the derivative,
//! `P D + (P D)^T = diag(-1, 0, ..., 0, 1)` exactly. Everything downstream
//! (energy estimates, conservation, penalty scaling) leans on it.

use super::{PdeError, MIN_POINTS};
use nalgebra::DMatrix;

/// Interior five-point central stencil, offsets -2..=2, units of 1/dx.
const INTERIOR: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

/// Left-edge closure rows acting on the first six points, units of 1/dx.
/// Right-edge rows are these reversed and negated.
const BOUNDARY_ROWS: [[f64; 6]; 4] = [
    [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
    [-0.5, 0.0, 0.5, 0.0, 0.0, 0.0],
    [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
    [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
];

/// Boundary norm weights; interior weights are one. Units of dx.
const P_BOUNDARY: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];

const EDGE: usize = 4;
const ROW_WIDTH: usize = 6;

/// The 4-2 SBP first-derivative operator. Stateless apart from its stencil
/// tables; `apply` is O(n) and allocation-light.
#[derive(Debug, Clone)]
pub struct SbpOperator {
    interior: [f64; 5],
    boundary: [[f64; 6]; 4],
    p_boundary: [f64; 4],
}

impl SbpOperator {
    pub fn order_4_2() -> Self {
        SbpOperator {
            interior: INTERIOR,
            boundary: BOUNDARY_ROWS,
            p_boundary: P_BOUNDARY,
        }
    }

    /// Closure depth: number of special rows (and norm weights) per edge.
    pub fn boundary_depth(&self) -> usize {
        EDGE
    }

    /// Norm weight of boundary row `row` (0 is the edge), without the dx
    /// factor. Rows at or beyond the closure depth weigh one.
    pub fn boundary_norm(&self, row: usize) -> f64 {
        if row < EDGE {
            self.p_boundary[row]
        } else {
            1.0
        }
    }

    /// Diagonal of the norm (quadrature) matrix P, including the dx factor.
    /// Periodic grids have no closures, so their norm is uniformly dx; this
    /// is the line-grid version.
    pub fn norm_diag(&self, n: usize, dx: f64) -> Result<Vec<f64>, PdeError> {
        if n < MIN_POINTS {
            return Err(PdeError::TooFewPoints {
                min: MIN_POINTS,
                got: n,
            });
        }
        let mut p = vec![dx; n];
        for (i, &w) in self.p_boundary.iter().enumerate() {
            p[i] = w * dx;
            p[n - 1 - i] = w * dx;
        }
        Ok(p)
    }

    /// Apply the derivative: `(D u)_i`, with cyclic indexing when `periodic`.
    pub fn apply(&self, u: &[f64], dx: f64, periodic: bool) -> Result<Vec<f64>, PdeError> {
        let n = u.len();
        if n < MIN_POINTS {
            return Err(PdeError::TooFewPoints {
                min: MIN_POINTS,
                got: n,
            });
        }
        let inv = 1.0 / dx;
        let mut du = vec![0.0; n];
        if periodic {
            for i in 0..n {
                let mut acc = 0.0;
                for (k, &s) in self.interior.iter().enumerate() {
                    let j = (i + n + k - 2) % n;
                    acc += s * u[j];
                }
                du[i] = acc * inv;
            }
            return Ok(du);
        }
        for (r, row) in self.boundary.iter().enumerate() {
            let mut left = 0.0;
            let mut right = 0.0;
            for (k, &s) in row.iter().enumerate().take(ROW_WIDTH) {
                left += s * u[k];
                // Mirror image: reversed stencil, negated, from the far end.
                right -= s * u[n - 1 - k];
            }
            du[r] = left * inv;
            du[n - 1 - r] = right * inv;
        }
        for i in EDGE..n - EDGE {
            let mut acc = 0.0;
            for (k, &s) in self.interior.iter().enumerate() {
                acc += s * u[i + k - 2];
            }
            du[i] = acc * inv;
        }
        Ok(du)
    }

    /// Dense matrix form of the operator, mostly for spectra and the SBP
    /// property test. Row i of the result applied to u equals `apply`.
    pub fn dense_matrix(
        &self,
        n: usize,
        dx: f64,
        periodic: bool,
    ) -> Result<DMatrix<f64>, PdeError> {
        if n < MIN_POINTS {
            return Err(PdeError::TooFewPoints {
                min: MIN_POINTS,
                got: n,
            });
        }
        let mut d = DMatrix::zeros(n, n);
        let inv = 1.0 / dx;
        if periodic {
            for i in 0..n {
                for (k, &s) in self.interior.iter().enumerate() {
                    let j = (i + n + k - 2) % n;
                    d[(i, j)] += s * inv;
                }
            }
            return Ok(d);
        }
        for (r, row) in self.boundary.iter().enumerate() {
            for (k, &s) in row.iter().enumerate() {
                d[(r, k)] = s * inv;
                d[(n - 1 - r, n - 1 - k)] = -s * inv;
            }
        }
        for i in EDGE..n - EDGE {
            for (k, &s) in self.interior.iter().enumerate() {
                d[(i, i + k - 2)] = s * inv;
            }
        }
        Ok(d)
    }
}

/// Free-function form of [`SbpOperator::apply`].
pub fn sbp_derivative(
    op: &SbpOperator,
    u: &[f64],
    dx: f64,
    periodic: bool,
) -> Result<Vec<f64>, PdeError> {
    op.apply(u, dx, periodic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;

    /// Max eigenvalue magnitude of the periodic operator, via its circulant
    /// symbol: lambda_k dx = i (4/3 sin t - 1/6 sin 2t), t = 2 pi k / n.
    fn circulant_symbol(theta: f64) -> f64 {
        (4.0 / 3.0) * theta.sin() - (1.0 / 6.0) * (2.0 * theta).sin()
    }

    #[test]
    fn sbp_property_holds_exactly() {
        // Q = P D must satisfy Q + Q^T = diag(-1, 0, ..., 0, 1); dx cancels,
        // so the identity is dx-independent.
        let op = SbpOperator::order_4_2();
        for (n, dx) in [(9usize, 1.0), (16, 0.37), (31, 2.9)] {
            let d = op.dense_matrix(n, dx, false).unwrap();
            let p = op.norm_diag(n, dx).unwrap();
            let mut q = d.clone();
            for i in 0..n {
                for j in 0..n {
                    q[(i, j)] *= p[i];
                }
            }
            let s = &q + q.transpose();
            for i in 0..n {
                for j in 0..n {
                    let want = match (i, j) {
                        (0, 0) => -1.0,
                        _ if i == j && i == n - 1 => 1.0,
                        _ => 0.0,
                    };
                    assert!(
                        (s[(i, j)] - want).abs() < 1e-12,
                        "SBP defect at ({i},{j}): {}",
                        s[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn exactness_degrees() {
        // Interior rows differentiate quartics exactly; closure rows handle
        // quadratics. Nodes x_i = x0 + i dx with an offset to avoid lucky
        // cancellation at zero.
        let op = SbpOperator::order_4_2();
        let n = 14;
        let dx = 0.13;
        let x: Vec<f64> = (0..n).map(|i| 0.71 + i as f64 * dx).collect();
        for deg in 0..=4usize {
            let u: Vec<f64> = x.iter().map(|&xi| xi.powi(deg as i32)).collect();
            let du = op.apply(&u, dx, false).unwrap();
            let scale = x[n - 1].powi(deg.max(1) as i32 - 1).abs() * deg.max(1) as f64;
            for i in 0..n {
                let exact = if deg == 0 {
                    0.0
                } else {
                    deg as f64 * x[i].powi(deg as i32 - 1)
                };
                let boundary = i < 4 || i >= n - 4;
                if !boundary || deg <= 2 {
                    assert!(
                        (du[i] - exact).abs() < 1e-12 * (1.0 + scale),
                        "degree {deg} row {i}: {} vs {exact}",
                        du[i]
                    );
                }
            }
        }
    }

    #[test]
    fn periodic_rows_kill_constants() {
        // Monomials above degree zero are not periodic, so the meaningful
        // exactness statement here is D 1 = 0: every row sums to zero.
        let op = SbpOperator::order_4_2();
        let n = 12;
        let d = op.dense_matrix(n, 0.25, true).unwrap();
        for i in 0..n {
            let row_sum: f64 = (0..n).map(|j| d[(i, j)]).sum();
            assert!(row_sum.abs() < 1e-13, "row {i} sum {row_sum}");
        }
    }

    #[test]
    fn dense_matrix_matches_apply() {
        let op = SbpOperator::order_4_2();
        for periodic in [false, true] {
            let n = 17;
            let dx = 0.09;
            let u: Vec<f64> = (0..n).map(|i| ((i * i) as f64 * 0.318).sin()).collect();
            let via_apply = op.apply(&u, dx, periodic).unwrap();
            let d = op.dense_matrix(n, dx, periodic).unwrap();
            let via_matrix = &d * DVector::from_column_slice(&u);
            for i in 0..n {
                assert!(
                    (via_apply[i] - via_matrix[i]).abs() < 1e-13,
                    "row {i} disagrees ({periodic})"
                );
            }
        }
    }

    #[test]
    fn periodic_spectrum_matches_circulant_symbol() {
        // The periodic operator is a circulant, so its eigenvalues are the
        // symbol samples i f(2 pi k / n) / dx: purely imaginary, and an
        // independent oracle for the dense eigensolve.
        let op = SbpOperator::order_4_2();
        let n = 61;
        let dx = 1.01666 / n as f64;
        let d = op.dense_matrix(n, dx, true).unwrap();
        let schur = nalgebra::Schur::try_new(d, 1e-12, 100_000).unwrap();
        let eig = schur.complex_eigenvalues();
        let mut magnitudes: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
        magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected: Vec<f64> = (0..n)
            .map(|k| {
                (circulant_symbol(2.0 * std::f64::consts::PI * k as f64 / n as f64) / dx).abs()
            })
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (m, e) in magnitudes.iter().zip(&expected) {
            assert!((m - e).abs() < 1e-9 / dx, "eigenvalue magnitude {m} vs symbol {e}");
        }
        for z in eig.iter() {
            assert!(z.re.abs() < 1e-9 / dx, "periodic operator not skew: Re {}", z.re);
        }
    }

    #[test]
    fn symbol_peak_is_the_advective_stability_scale() {
        // max |lambda| dx over the continuum of wavenumbers; the timestep
        // pins downstream reference this constant.
        let peak = (0..200_000)
            .map(|k| circulant_symbol(std::f64::consts::PI * k as f64 / 100_000.0).abs())
            .fold(0.0f64, f64::max);
        assert!((peak - 1.372218).abs() < 1e-4, "symbol peak {peak}");
    }

    #[test]
    fn too_short_input_is_rejected() {
        let op = SbpOperator::order_4_2();
        assert!(matches!(
            op.apply(&[0.0; 8], 0.1, false),
            Err(PdeError::TooFewPoints { min: 9, got: 8 })
        ));
        assert!(op.norm_diag(8, 0.1).is_err());
        assert!(op.dense_matrix(8, 0.1, true).is_err());
    }

    proptest! {
        // SBP property for arbitrary sizes and spacings; the identity is
        // exact in exact arithmetic, so 1e-12 absolute is generous.
        #[test]
        fn prop_sbp_property(n in 9usize..40, dx in 0.01f64..10.0) {
            let op = SbpOperator::order_4_2();
            let d = op.dense_matrix(n, dx, false).unwrap();
            let p = op.norm_diag(n, dx).unwrap();
            let mut q = d.clone();
            for i in 0..n {
                for j in 0..n {
                    q[(i, j)] *= p[i];
                }
            }
            let s = &q + q.transpose();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == 0 && j == 0 {
                        -1.0
                    } else if i == n - 1 && j == n - 1 {
                        1.0
                    } else {
                        0.0
                    };
                    prop_assert!((s[(i, j)] - want).abs() < 1e-12);
                }
            }
        }
    }
}
