//! Galerkin discretization of the weighted Sturm-Liouville pencil.
//!
//! For a weight rho = P' with P self-similar, the pencil acts through the
//! sesquilinear form
//!
//! ```text
//!   form(lambda)[y, z] = int y' z' dx + lambda int P (y' z + y z') dx
//! ```
//!
//! on functions vanishing at 0 and 1. Discretizing with hat functions on a
//! grid aligned with the IFS cells makes both ingredients exact: the
//! stiffness form K is the standard nonuniform tridiagonal, and the weight
//! form M has entries int P (phi_i phi_j)' dx computable from per-cell
//! moments (m0, m1) alone. The inertia index of K + lambda M (the number
//! of negative eigenvalues) counts pencil eigenvalues between 0 and
//! lambda, is exact for the discretization via Sturm pivot counting, and
//! is monotone under nested grid refinement, so eigenvalues are localized
//! by bisection on lambda.

mod assemble;
mod dense;
mod eigen;
mod grid;
mod inertia;

pub use assemble::assemble;
pub use dense::{dense_oracle, DenseOracle};
pub use eigen::{eigenvalues, EigenOptions, EigenvalueEstimate, Side, SpectrumReport};
pub use grid::build_grid;
pub use inertia::inertia_index;

use thiserror::Error;

use crate::selfsim::CellWord;

/// Errors from grid construction and the eigenvalue driver.
#[derive(Debug, Error)]
pub enum PencilError {
    #[error("grid at depth {depth} would have {nodes} nodes, above the 1e7 guard")]
    GridTooLarge { depth: usize, nodes: u128 },
    #[error("depth must be at least 1")]
    DepthZero,
    #[error("forms have mismatched sizes {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("dense oracle limited to size 2000, got {0}")]
    OracleTooLarge(usize),
    #[error("stiffness form is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("eigenvalue count must be at least 1")]
    ZeroCount,
    #[error("grid was built for different parameters")]
    GridMismatch,
}

/// Grid of all IFS cell endpoints at a fixed depth.
///
/// Nodes are strictly increasing from 0 to 1 and each interior interval is
/// exactly one depth-m cell. Grids are nested across depths because
/// refinement subdivides each cell in place.
#[derive(Debug, Clone)]
pub struct AlignedGrid {
    depth: usize,
    pieces: usize,
    nodes: Vec<f64>,
    cell_words: Vec<CellWord>,
}

impl AlignedGrid {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of IFS pieces of the generating parameters.
    pub fn pieces(&self) -> usize {
        self.pieces
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Per-interval cell words, in left-to-right order.
    pub fn cell_words(&self) -> &[CellWord] {
        &self.cell_words
    }

    /// Number of interior nodes = size of the discretized forms.
    pub fn interior_size(&self) -> usize {
        self.nodes.len() - 2
    }
}

/// Symmetric tridiagonal quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalForm {
    /// Main diagonal, length `size`.
    pub diag: Vec<f64>,
    /// Off diagonal, length `size - 1` (empty when size <= 1).
    pub off: Vec<f64>,
}

impl TridiagonalForm {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Entrywise K + lambda * M.
    pub fn add_scaled(&self, other: &Self, lambda: f64) -> Result<Self, PencilError> {
        if self.size() != other.size() {
            return Err(PencilError::SizeMismatch(self.size(), other.size()));
        }
        Ok(Self {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| a + lambda * b)
                .collect(),
            off: self
                .off
                .iter()
                .zip(&other.off)
                .map(|(a, b)| a + lambda * b)
                .collect(),
        })
    }
}

/// Result of one inertia-index evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaResult {
    /// Spectral parameter the form was evaluated at (after any
    /// perturbation).
    pub lambda: f64,
    /// Number of negative pivots = negative eigenvalues of K + lambda M.
    pub index: usize,
    /// Smallest |pivot| encountered.
    pub pivot_min: f64,
    /// Whether lambda had to be perturbed to avoid an exact pivot
    /// breakdown.
    pub perturbed: bool,
}
