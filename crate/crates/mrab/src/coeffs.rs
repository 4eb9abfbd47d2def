//! Adams-Bashforth extrapolation weights from arbitrary history nodes.
//!
//! An AB step of order `n` over `[a, b]` advances the state by a weighted sum
//! of stored right-hand-side values: `y(b) = y(a) + sum_k alpha_k f(t_k)`.
//! The weights are the quadrature rule that integrates the degree-`n-1`
//! polynomial fit of the history exactly, i.e. the solution of the moment
//! system
//!
//! ```text
//! sum_k alpha_k t_k^(i-1) = (b^i - a^i) / i,   i = 1..n.
//! ```
//!
//! With `m = n` history nodes the system is square and recovers the classical
//! AB coefficients. With `m > n` nodes it is underdetermined and we take the
//! unique minimum-2-norm solution, which is what extends AB3 to AB34 and AB4
//! to AB45. Weights are always computed on the reference interval `[-1, 0]`
//! (nodes mapped by `s = (t - b)/(b - a)`) and scaled back afterwards; raw
//! time values would make the Vandermonde system ill-conditioned long before
//! `m = 6`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoeffsError {
    #[error("insufficient history: {m} nodes cannot support order {n}")]
    InsufficientHistory { m: usize, n: usize },
    #[error("degenerate nodes: history times must be strictly increasing and finite")]
    DegenerateNodes,
    #[error("invalid interval: need finite a < b")]
    InvalidInterval,
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("history/value length mismatch: {nodes} nodes vs {values} values")]
    LengthMismatch { nodes: usize, values: usize },
}

/// AB weights `alpha` for one step over `interval`, derived from RHS history
/// at `nodes`. Both `nodes` and `alpha` are ordered oldest-first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub interval: (f64, f64),
    pub alpha: Vec<f64>,
}

impl CoefficientSet {
    /// Number of history nodes (`m >= order`).
    pub fn history_len(&self) -> usize {
        self.nodes.len()
    }

    /// `sum_k alpha_k values[k]` for vector-valued RHS samples.
    ///
    /// `values[k]` must all share one dimension; this is the hot path of
    /// every AB step so it panics on shape mismatch rather than returning a
    /// `Result`.
    pub fn apply(&self, values: &[Vec<f64>]) -> Vec<f64> {
        assert_eq!(values.len(), self.alpha.len(), "history length mismatch");
        let dim = values[0].len();
        let mut out = vec![0.0; dim];
        for (a, v) in self.alpha.iter().zip(values) {
            debug_assert_eq!(v.len(), dim);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += a * vi;
            }
        }
        out
    }
}

fn validate_nodes(nodes: &[f64]) -> Result<(), CoeffsError> {
    if nodes.iter().any(|t| !t.is_finite()) {
        return Err(CoeffsError::DegenerateNodes);
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoeffsError::DegenerateNodes);
    }
    Ok(())
}

/// Compute AB weights of order `order` for the step interval `interval`,
/// given RHS history at `nodes` (oldest first, strictly increasing).
///
/// `nodes.len() == order` yields the classical AB weights; `nodes.len() >
/// order` yields the minimum-2-norm solution of the underdetermined moment
/// system. Nodes need not be uniformly spaced and the interval need not abut
/// the newest node, which is what the multi-rate scheme exploits.
pub fn ab_weights(
    nodes: &[f64],
    order: usize,
    interval: (f64, f64),
) -> Result<CoefficientSet, CoeffsError> {
    let (a, b) = interval;
    let (m, n) = (nodes.len(), order);
    if n == 0 {
        return Err(CoeffsError::ZeroOrder);
    }
    if m < n {
        return Err(CoeffsError::InsufficientHistory { m, n });
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(CoeffsError::InvalidInterval);
    }
    validate_nodes(nodes)?;

    let width = b - a;
    // Reference nodes s_k = (t_k - b)/width map the step to [-1, 0].
    let s: Vec<f64> = nodes.iter().map(|t| (t - b) / width).collect();

    // Moments of the monomial basis on [-1, 0]: integral of s^(i-1).
    let moments = DVector::from_fn(n, |i, _| {
        let p = (i + 1) as f64;
        -(-1.0f64).powi(i as i32 + 1) / p
    });

    // Rows are the moment conditions: v[(i, k)] = s_k^i.
    let v = DMatrix::from_fn(n, m, |i, k| s[k].powi(i as i32));

    let alpha_ref = if m == n {
        v.clone()
            .lu()
            .solve(&moments)
            .ok_or(CoeffsError::DegenerateNodes)?
    } else {
        // Minimum-norm solution alpha = V^T (V V^T)^{-1} moments. V V^T is
        // n x n symmetric positive definite for distinct nodes.
        let gram = &v * v.transpose();
        let rhs = gram
            .cholesky()
            .ok_or(CoeffsError::DegenerateNodes)?
            .solve(&moments);
        v.transpose() * rhs
    };

    Ok(CoefficientSet {
        order: n,
        nodes: nodes.to_vec(),
        interval,
        alpha: alpha_ref.iter().map(|x| x * width).collect(),
    })
}

/// Lagrange-form polynomial through vector samples at distinct nodes.
///
/// This is the extrapolant object the multi-rate scheme integrates; it fits
/// all `m` samples (degree `<= m-1`), unlike the order-`n` weight fit above.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolant {
    nodes: Vec<f64>,
    values: Vec<Vec<f64>>,
    dim: usize,
}

impl Extrapolant {
    /// Build from history samples; nodes must be strictly increasing.
    pub fn from_history(nodes: &[f64], values: &[Vec<f64>]) -> Result<Self, CoeffsError> {
        if nodes.len() != values.len() {
            return Err(CoeffsError::LengthMismatch {
                nodes: nodes.len(),
                values: values.len(),
            });
        }
        if nodes.is_empty() {
            return Err(CoeffsError::InsufficientHistory { m: 0, n: 1 });
        }
        validate_nodes(nodes)?;
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(CoeffsError::LengthMismatch {
                nodes: nodes.len(),
                values: values.len(),
            });
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            values: values.to_vec(),
            dim,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate the interpolating polynomial at `t` (Lagrange basis form).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let m = self.nodes.len();
        let mut out = vec![0.0; self.dim];
        for k in 0..m {
            let mut w = 1.0;
            for j in 0..m {
                if j != k {
                    w *= (t - self.nodes[j]) / (self.nodes[k] - self.nodes[j]);
                }
            }
            for (o, v) in out.iter_mut().zip(&self.values[k]) {
                *o += w * v;
            }
        }
        out
    }

    /// Exact integral of the interpolating polynomial over `interval`.
    ///
    /// Equivalent to an `ab_weights` application with `order == m` (full
    /// degree), so for a square history this matches the AB weight path to
    /// round-off; that consistency is pinned by tests.
    pub fn integrate(&self, interval: (f64, f64)) -> Result<Vec<f64>, CoeffsError> {
        let w = ab_weights(&self.nodes, self.nodes.len(), interval)?;
        Ok(w.apply(&self.values))
    }
}
