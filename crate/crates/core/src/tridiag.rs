//! Symmetric tridiagonal systems with a rank-one update.
//!
//! Newton steps for the discretized one-dimensional energies lead to
//! symmetric tridiagonal Hessians, optionally augmented by a rank-one term
//! μ q qᵀ from a quadratic-penalty mass constraint.  The factorization is an
//! unpivoted LDLᵀ sweep; its smallest pivot doubles as a positive-definiteness
//! certificate, which the solvers use to decide when a Levenberg shift is
//! needed.  Rank-one updates are resolved by the Sherman–Morrison identity
//! (two triangular solves instead of a dense factorization).

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` of length n, `sub` of length n-1.
#[derive(Clone, Debug)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
}

/// LDLᵀ factors of a [`SymTridiagonal`]; `min_pivot` certifies definiteness.
#[derive(Clone, Debug)]
pub struct Factor {
    l: Vec<f64>,
    d: Vec<f64>,
    /// Smallest diagonal pivot encountered; the matrix is positive definite
    /// iff this is strictly positive.
    pub min_pivot: f64,
}

impl SymTridiagonal {
    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = self.diag[i] * x[i];
            if i > 0 {
                y[i] += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y[i] += self.sub[i] * x[i + 1];
            }
        }
        y
    }

    /// Unpivoted LDLᵀ factorization.  Always completes; a non-positive
    /// `min_pivot` means the matrix is not positive definite and any solve
    /// with the factor is unreliable (callers shift and refactorize).
    pub fn factorize(&self) -> Factor {
        let n = self.n();
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut d = vec![0.0; n];
        let mut min_pivot = f64::INFINITY;
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= l[i - 1] * l[i - 1] * d[i - 1];
            }
            d[i] = di;
            min_pivot = min_pivot.min(di);
            if i + 1 < n {
                // Guard against a zero pivot poisoning the sweep; the factor
                // is marked non-positive either way.
                l[i] = if di != 0.0 { self.sub[i] / di } else { 0.0 };
            }
        }
        Factor { l, d, min_pivot }
    }

    /// Factorization of the diagonally shifted matrix `self + shift I`.
    pub fn factorize_shifted(&self, shift: f64) -> Factor {
        let shifted = SymTridiagonal {
            diag: self.diag.iter().map(|v| v + shift).collect(),
            sub: self.sub.clone(),
        };
        shifted.factorize()
    }
}

impl Factor {
    /// Whether the factored matrix is positive definite.
    pub fn is_positive(&self) -> bool {
        self.min_pivot > 0.0 && self.min_pivot.is_finite()
    }

    /// Solves L D Lᵀ x = rhs.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

/// Solves (T + mu q qᵀ) x = rhs given a factorization of T, via
/// Sherman–Morrison: x = T⁻¹rhs - mu (qᵀT⁻¹rhs)/(1 + mu qᵀT⁻¹q) T⁻¹q.
pub fn rank_one_solve(factor: &Factor, mu: f64, q: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let base = factor.solve(rhs);
    if mu == 0.0 {
        return Ok(base);
    }
    let tq = factor.solve(q);
    let qtq: f64 = q.iter().zip(&tq).map(|(a, b)| a * b).sum();
    let denom = 1.0 + mu * qtq;
    if !(denom.is_finite() && denom.abs() > 1e-300) {
        return Err(Error::Numerical(format!(
            "rank-one update is singular (denominator {denom})"
        )));
    }
    let qtr: f64 = q.iter().zip(&base).map(|(a, b)| a * b).sum();
    let scale = mu * qtr / denom;
    Ok(base
        .iter()
        .zip(&tq)
        .map(|(b, t)| b - scale * t)
        .collect())
}
