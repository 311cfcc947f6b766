//! Inertia-index evaluation by Sturm pivot counting.

use super::{InertiaResult, PencilError, TridiagonalForm};

/// Counts the negative eigenvalues of K + lambda M.
///
/// Runs the pivot recursion d_i = t_i - o_{i-1}^2 / d_{i-1} on the
/// symmetric tridiagonal sum; by Sylvester's law the number of negative
/// pivots equals the number of negative eigenvalues. A pivot smaller in
/// magnitude than machine epsilon times the matrix scale means lambda sits
/// (numerically) on an eigenvalue of a leading submatrix; the evaluation
/// retries at lambda (1 + 1e-12), doubling the shift if needed, and flags
/// the result as perturbed. At lambda = 0 the form is the positive
/// definite stiffness, so the index is 0 and no perturbation can occur.
pub fn inertia_index(
    k: &TridiagonalForm,
    m: &TridiagonalForm,
    lambda: f64,
) -> Result<InertiaResult, PencilError> {
    if k.size() != m.size() {
        return Err(PencilError::SizeMismatch(k.size(), m.size()));
    }
    let mut shift = 1e-12;
    let mut lam = lambda;
    let mut perturbed = false;
    for _ in 0..8 {
        let a = k.add_scaled(m, lam)?;
        if let Some((count, pivot_min)) = try_pivots(&a) {
            return Ok(InertiaResult {
                lambda: lam,
                index: count,
                pivot_min,
                perturbed,
            });
        }
        perturbed = true;
        lam = lambda * (1.0 + shift);
        shift *= 2.0;
    }
    // accept the last attempt unconditionally, counting tiny pivots by sign
    let a = k.add_scaled(m, lam)?;
    let (count, pivot_min) = force_pivots(&a);
    Ok(InertiaResult {
        lambda: lam,
        index: count,
        pivot_min,
        perturbed: true,
    })
}

fn matrix_scale(a: &TridiagonalForm) -> f64 {
    let mut scale = 0.0f64;
    let size = a.size();
    for i in 0..size {
        let mut row = a.diag[i].abs();
        if i > 0 {
            row += a.off[i - 1].abs();
        }
        if i + 1 < size {
            row += a.off[i].abs();
        }
        scale = scale.max(row);
    }
    scale.max(f64::MIN_POSITIVE)
}

/// Pivot pass; `None` on breakdown (a pivot too close to zero).
fn try_pivots(a: &TridiagonalForm) -> Option<(usize, f64)> {
    let eps = f64::EPSILON * matrix_scale(a);
    let mut count = 0usize;
    let mut pivot_min = f64::INFINITY;
    let mut prev = f64::INFINITY; // signals "no previous pivot"
    for i in 0..a.size() {
        let mut d = a.diag[i];
        if i > 0 {
            let o = a.off[i - 1];
            d -= o * o / prev;
        }
        if d.abs() < eps {
            return None;
        }
        if d < 0.0 {
            count += 1;
        }
        pivot_min = pivot_min.min(d.abs());
        prev = d;
    }
    Some((count, pivot_min))
}

/// Pivot pass that never gives up: exact zeros are bumped to the smallest
/// representable positive pivot.
fn force_pivots(a: &TridiagonalForm) -> (usize, f64) {
    let mut count = 0usize;
    let mut pivot_min = f64::INFINITY;
    let mut prev = f64::INFINITY;
    for i in 0..a.size() {
        let mut d = a.diag[i];
        if i > 0 {
            let o = a.off[i - 1];
            d -= o * o / prev;
        }
        if d == 0.0 {
            d = f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        pivot_min = pivot_min.min(d.abs());
        prev = d;
    }
    (count, pivot_min)
}
