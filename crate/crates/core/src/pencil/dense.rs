//! Dense congruence oracle for cross-checking inertia counts.
//!
//! Independent of the Sturm pivot path: factor K = L L^T, form the
//! congruent symmetric matrix C = L^{-1} M L^{-T}, and take its full
//! eigenvalue set {nu_i} with a cyclic Jacobi sweep. Then
//! K + lambda M is congruent to I + lambda C, so
//!
//! ```text
//!   ind(lambda) = #{ nu_i < -1/lambda }   for lambda > 0,
//!   ind(lambda) = #{ nu_i > -1/lambda }   for lambda < 0,
//! ```
//!
//! and the pencil eigenvalues are lambda = -1/nu_i over nonzero nu_i.

// index-style loops kept for the substitution sweeps
#![allow(clippy::needless_range_loop)]

use super::{PencilError, TridiagonalForm};

const MAX_ORACLE_SIZE: usize = 2000;

/// Full congruence spectrum of a (K, M) pair.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    /// Eigenvalues of L^{-1} M L^{-T}, ascending.
    pub nu: Vec<f64>,
    /// Pencil eigenvalues -1/nu_i within the requested magnitude bound,
    /// ascending (negative side first).
    pub pencil_eigenvalues: Vec<f64>,
}

impl DenseOracle {
    /// Inertia count of K + lambda M from the congruent spectrum.
    pub fn inertia_count(&self, lambda: f64) -> usize {
        if lambda == 0.0 {
            return 0;
        }
        let threshold = -1.0 / lambda;
        if lambda > 0.0 {
            self.nu.iter().filter(|&&v| v < threshold).count()
        } else {
            self.nu.iter().filter(|&&v| v > threshold).count()
        }
    }

    /// Positive pencil eigenvalues, ascending.
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.pencil_eigenvalues
            .iter()
            .copied()
            .filter(|&l| l > 0.0)
            .collect()
    }

    /// Negative pencil eigenvalues by magnitude, ascending.
    pub fn negative_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pencil_eigenvalues
            .iter()
            .copied()
            .filter(|&l| l < 0.0)
            .map(f64::abs)
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v
    }
}

/// Computes the congruence spectrum; sizes above 2000 are rejected.
pub fn dense_oracle(
    k: &TridiagonalForm,
    m: &TridiagonalForm,
    lambda_max: f64,
) -> Result<DenseOracle, PencilError> {
    let size = k.size();
    if size != m.size() {
        return Err(PencilError::SizeMismatch(size, m.size()));
    }
    if size > MAX_ORACLE_SIZE {
        return Err(PencilError::OracleTooLarge(size));
    }

    // Cholesky of the tridiagonal K: L has diagonal c and subdiagonal e
    let mut c = vec![0.0; size];
    let mut e = vec![0.0; size.saturating_sub(1)];
    for i in 0..size {
        let mut t = k.diag[i];
        if i > 0 {
            t -= e[i - 1] * e[i - 1];
        }
        if t <= 0.0 {
            return Err(PencilError::NotPositiveDefinite { row: i, pivot: t });
        }
        c[i] = t.sqrt();
        if i + 1 < size {
            e[i] = k.off[i] / c[i];
        }
    }

    // dense M
    let mut dense = vec![vec![0.0; size]; size];
    for i in 0..size {
        dense[i][i] = m.diag[i];
        if i + 1 < size {
            dense[i][i + 1] = m.off[i];
            dense[i + 1][i] = m.off[i];
        }
    }

    // B = L^{-1} M: forward-substitute down each column
    for col in 0..size {
        for row in 0..size {
            let mut val = dense[row][col];
            if row > 0 {
                val -= e[row - 1] * dense[row - 1][col];
            }
            dense[row][col] = val / c[row];
        }
    }
    // C = B L^{-T}: forward-substitute along each row
    for row in 0..size {
        for col in 0..size {
            let mut val = dense[row][col];
            if col > 0 {
                val -= e[col - 1] * dense[row][col - 1];
            }
            dense[row][col] = val / c[col];
        }
    }
    // symmetrize against rounding
    for i in 0..size {
        for j in (i + 1)..size {
            let avg = 0.5 * (dense[i][j] + dense[j][i]);
            dense[i][j] = avg;
            dense[j][i] = avg;
        }
    }

    let mut nu = jacobi_eigenvalues(&mut dense);
    nu.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let nu_scale = nu.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let mut pencil: Vec<f64> = nu
        .iter()
        .filter(|&&v| v.abs() > 1e-14 * nu_scale.max(1e-300))
        .map(|&v| -1.0 / v)
        .filter(|l| l.abs() <= lambda_max)
        .collect();
    pencil.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    Ok(DenseOracle {
        nu,
        pencil_eigenvalues: pencil,
    })
}

/// Cyclic Jacobi sweeps until the off-diagonal norm is negligible.
fn jacobi_eigenvalues(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let frob: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let apq = a[i][j];
                if apq == 0.0 {
                    continue;
                }
                let app = a[i][i];
                let aqq = a[j][j];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for r in 0..n {
                    let air = a[r][i];
                    let ajr = a[r][j];
                    a[r][i] = cs * air - sn * ajr;
                    a[r][j] = sn * air + cs * ajr;
                }
                for r in 0..n {
                    let ari = a[i][r];
                    let arj = a[j][r];
                    a[i][r] = cs * ari - sn * arj;
                    a[j][r] = sn * ari + cs * arj;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
