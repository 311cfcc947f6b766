//! Assembly of the stiffness and weight forms on an aligned grid.

use super::{AlignedGrid, PencilError, TridiagonalForm};
use crate::selfsim::{global_moments, SimilarityParams};

/// Assembles (K, M) for interior hat functions with homogeneous Dirichlet
/// ends dropped.
///
/// K is the standard nonuniform stiffness (diag 1/h_left + 1/h_right, off
/// -1/h). M discretizes int P (phi_i phi_j)' dx exactly: with per-cell
/// moments m0 = int P and m1 = int x P over a cell \[xl, xr\] of width h,
/// the cell contributes
///
/// ```text
///   off-diagonal: ((xl + xr) m0 - 2 m1) / h^2
///   diagonal of the left node:  2 (m1 - xr m0) / h^2
///   diagonal of the right node: 2 (m1 - xl m0) / h^2
/// ```
///
/// Cell moments come from the accumulated (B, D) of the cell word, so no
/// quadrature is involved anywhere.
pub fn assemble(
    p: &SimilarityParams,
    grid: &AlignedGrid,
) -> Result<(TridiagonalForm, TridiagonalForm), PencilError> {
    if grid.pieces() != p.n() {
        return Err(PencilError::GridMismatch);
    }
    let nodes = grid.nodes();
    let size = grid.interior_size();
    let gm = global_moments(p);

    let mut k_diag = vec![0.0; size];
    let mut k_off = vec![0.0; size.saturating_sub(1)];
    let mut m_diag = vec![0.0; size];
    let mut m_off = vec![0.0; size.saturating_sub(1)];

    // walk cells left to right in lockstep with the recursion over words;
    // cell i spans [nodes[i], nodes[i+1]] and touches hats i and i+1
    // (1-based interior numbering: hat j lives at node j, j = 1..=size)
    let mut cell = 0usize;
    walk(p, grid.depth(), 0.0, 1.0, &mut |b: f64, delta: f64| {
        let xl = nodes[cell];
        let xr = nodes[cell + 1];
        let h = xr - xl;
        let mean = b + delta * gm.m0;
        let m0 = h * mean;
        let m1 = h * xl * mean + h * h * (b / 2.0 + delta * gm.m1);

        let inv_h = 1.0 / h;
        let inv_h2 = inv_h * inv_h;
        let left_hat = cell; // node index of the falling hat
        let right_hat = cell + 1; // node index of the rising hat

        if (1..=size).contains(&left_hat) {
            k_diag[left_hat - 1] += inv_h;
            m_diag[left_hat - 1] += 2.0 * (m1 - xr * m0) * inv_h2;
        }
        if (1..=size).contains(&right_hat) {
            k_diag[right_hat - 1] += inv_h;
            m_diag[right_hat - 1] += 2.0 * (m1 - xl * m0) * inv_h2;
        }
        if (1..=size).contains(&left_hat) && (1..=size).contains(&right_hat) {
            k_off[left_hat - 1] += -inv_h;
            m_off[left_hat - 1] += ((xl + xr) * m0 - 2.0 * m1) * inv_h2;
        }
        cell += 1;
    });

    Ok((
        TridiagonalForm {
            diag: k_diag,
            off: k_off,
        },
        TridiagonalForm {
            diag: m_diag,
            off: m_off,
        },
    ))
}

/// Depth-first pass over all depth-m cells in left-to-right order, calling
/// `emit(B, D)` per cell.
fn walk(p: &SimilarityParams, levels: usize, b: f64, delta: f64, emit: &mut impl FnMut(f64, f64)) {
    if levels == 0 {
        emit(b, delta);
        return;
    }
    for k in 0..p.n() {
        walk(
            p,
            levels - 1,
            b + delta * p.beta()[k],
            delta * p.d()[k],
            emit,
        );
    }
}
