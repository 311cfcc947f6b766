//! Self-similar functions in L2\[0,1\].
//!
//! A set of parameters (n, a_k, d_k, beta_k) with sum(a_k) = 1 defines a
//! similarity operator G acting on L2\[0,1\]: the unit interval is split at
//! the cumulative breakpoints alpha_k, and on the k-th piece
//!
//! ```text
//!     G(f)(x) = beta_k + d_k * f((x - alpha_k) / a_k).
//! ```
//!
//! G is a contraction exactly when sum(a_k d_k^2) < 1, and its unique fixed
//! point P is the self-similar function described by the parameters. The
//! classic example is the Cantor ladder (n = 3, a = [1/3,1/3,1/3],
//! d = [1/2,0,1/2], beta = [0,1/2,1/2]).
//!
//! Everything here is exact arithmetic on the parameters: moments of P over
//! IFS cells come from closed-form linear solves, never quadrature.

mod arithmetic;
mod catalog;

pub use arithmetic::{arithmetic_structure, ArithmeticStructure, DEFAULT_ARITH_TOL};
pub use catalog::{builtin, cantor, hat_p, linear, p_a_delta, tilde_p};

use thiserror::Error;

/// Validation and catalog errors for similarity parameters.
#[derive(Debug, Error)]
pub enum ParamError {
    #[error("parameter lists must have equal length, got a: {a}, d: {d}, beta: {beta}")]
    LengthMismatch { a: usize, d: usize, beta: usize },
    #[error("need at least two pieces, got n = {0}")]
    TooFewPieces(usize),
    #[error("piece length a[{index}] = {value} is not positive")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("piece lengths must sum to 1 within 1e-12, got {0}")]
    LengthSumNotOne(f64),
    #[error("not contractive: sum(a_k d_k^2) = {0} >= 1, fixed point not guaranteed")]
    NotContractive(f64),
    #[error("unknown builtin weight `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}`: {message}")]
    BadBuiltinParameter { name: String, message: String },
    #[error("tolerance {0} outside (0, 1e-3]")]
    InvalidTolerance(f64),
    #[error("cell word index {index} out of range for n = {n} pieces")]
    WordIndexOutOfRange { index: usize, n: usize },
}

const SUM_TOL: f64 = 1e-12;

/// Validated similarity parameters (n, a_k, d_k, beta_k) together with the
/// derived cumulative breakpoints alpha_0 = 0 < alpha_1 < ... < alpha_n = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityParams {
    a: Vec<f64>,
    d: Vec<f64>,
    beta: Vec<f64>,
    alpha: Vec<f64>,
}

impl SimilarityParams {
    /// Validates raw parameter lists and computes the breakpoints.
    ///
    /// Rejects lists of mismatched length or with fewer than two pieces,
    /// non-positive piece lengths, piece lengths that do not sum to 1
    /// within 1e-12, and non-contractive data (sum(a_k d_k^2) >= 1).
    pub fn new(a: Vec<f64>, d: Vec<f64>, beta: Vec<f64>) -> Result<Self, ParamError> {
        if a.len() != d.len() || a.len() != beta.len() {
            return Err(ParamError::LengthMismatch {
                a: a.len(),
                d: d.len(),
                beta: beta.len(),
            });
        }
        if a.len() < 2 {
            return Err(ParamError::TooFewPieces(a.len()));
        }
        for (k, &ak) in a.iter().enumerate() {
            // negated comparison also rejects NaN
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(ak > 0.0) {
                return Err(ParamError::NonPositiveLength {
                    index: k,
                    value: ak,
                });
            }
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(ParamError::LengthSumNotOne(sum));
        }
        let contraction: f64 = a.iter().zip(&d).map(|(ak, dk)| ak * dk * dk).sum();
        if contraction >= 1.0 {
            return Err(ParamError::NotContractive(contraction));
        }
        let mut alpha = Vec::with_capacity(a.len() + 1);
        alpha.push(0.0);
        let mut acc = 0.0;
        for &ak in &a[..a.len() - 1] {
            acc += ak;
            alpha.push(acc);
        }
        alpha.push(1.0);
        Ok(Self { a, d, beta, alpha })
    }

    /// Like [`SimilarityParams::new`], but first rescales the piece lengths
    /// to sum exactly to 1. Normalization never happens silently: this is
    /// the explicit opt-in entry point.
    pub fn new_normalizing(a: Vec<f64>, d: Vec<f64>, beta: Vec<f64>) -> Result<Self, ParamError> {
        let sum: f64 = a.iter().sum();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(sum > 0.0) {
            return Err(ParamError::LengthSumNotOne(sum));
        }
        let a = a.into_iter().map(|x| x / sum).collect();
        Self::new(a, d, beta)
    }

    /// Number of pieces n.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Piece lengths a_k.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Scaling factors d_k.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Offsets beta_k.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Cumulative breakpoints alpha_0..alpha_n (length n + 1).
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// sum(a_k d_k^2), the squared L2 contraction factor of G.
    pub fn contraction_sum(&self) -> f64 {
        self.a.iter().zip(&self.d).map(|(a, d)| a * d * d).sum()
    }

    /// 1 - sum(a_k d_k^2), strictly positive for valid parameters.
    pub fn contraction_margin(&self) -> f64 {
        1.0 - self.contraction_sum()
    }
}

/// A finite word (k_1, ..., k_m) of 0-based piece indices identifying the
/// IFS cell G_{k_1} o ... o G_{k_m}([0,1]); the empty word is the root cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellWord {
    indices: Vec<u8>,
}

impl CellWord {
    /// The root cell \[0,1\].
    pub fn root() -> Self {
        Self {
            indices: Vec::new(),
        }
    }

    /// Builds a word from 0-based piece indices, checking them against n.
    pub fn from_indices(indices: Vec<u8>, n: usize) -> Result<Self, ParamError> {
        if let Some(&bad) = indices.iter().find(|&&i| usize::from(i) >= n) {
            return Err(ParamError::WordIndexOutOfRange {
                index: usize::from(bad),
                n,
            });
        }
        Ok(Self { indices })
    }

    /// Word length m (cell depth).
    pub fn depth(&self) -> usize {
        self.indices.len()
    }

    /// The 0-based indices k_1, ..., k_m.
    pub fn indices(&self) -> &[u8] {
        &self.indices
    }
}

/// Exact integrals of P over one IFS cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMoments {
    /// Cell width, the product of the a_k along the word.
    pub length: f64,
    /// Integral of P over the cell.
    pub m0: f64,
    /// Integral of x * P(x) over the cell (global coordinate).
    pub m1: f64,
    /// Accumulated offset B: on the cell, P(x) = B + D * P(rescaled x).
    pub offset_b: f64,
    /// Accumulated scale D, the product of the d_k along the word.
    pub scale_d: f64,
}

/// Global moments M0 = int P dx and M1 = int x P dx of the fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalMoments {
    pub m0: f64,
    pub m1: f64,
}

/// Closed-form global moments of the fixed point P.
///
/// Integrating the fixed-point identity over each piece gives linear
/// equations with contraction-controlled denominators:
///
/// ```text
///   M0 = sum(a_k beta_k) / (1 - sum(a_k d_k))
///   M1 = [sum(beta_k (alpha_{k+1}^2 - alpha_k^2) / 2) + M0 sum(d_k a_k alpha_k)]
///        / (1 - sum(d_k a_k^2))
/// ```
///
/// Both denominators are nonzero whenever sum(a_k d_k^2) < 1.
pub fn global_moments(p: &SimilarityParams) -> GlobalMoments {
    let n = p.n();
    let mut sum_ab = 0.0;
    let mut sum_ad = 0.0;
    let mut sum_beta_alpha2 = 0.0;
    let mut sum_da_alpha = 0.0;
    let mut sum_da2 = 0.0;
    for k in 0..n {
        let (a, d, b) = (p.a[k], p.d[k], p.beta[k]);
        let (al, ar) = (p.alpha[k], p.alpha[k + 1]);
        sum_ab += a * b;
        sum_ad += a * d;
        sum_beta_alpha2 += b * (ar * ar - al * al) / 2.0;
        sum_da_alpha += d * a * al;
        sum_da2 += d * a * a;
    }
    let m0 = sum_ab / (1.0 - sum_ad);
    let m1 = (sum_beta_alpha2 + m0 * sum_da_alpha) / (1.0 - sum_da2);
    GlobalMoments { m0, m1 }
}

/// Mean square int P^2 dx, by the same fixed-point linear-solve device.
///
/// Expanding int (beta_k + d_k P)^2 over the pieces yields
/// `S = [sum(a_k beta_k^2) + 2 M0 sum(a_k beta_k d_k)] / (1 - sum(a_k d_k^2))`.
pub fn mean_square(p: &SimilarityParams) -> f64 {
    let m0 = global_moments(p).m0;
    let mut num = 0.0;
    for k in 0..p.n() {
        let (a, d, b) = (p.a[k], p.d[k], p.beta[k]);
        num += a * b * b + 2.0 * m0 * a * b * d;
    }
    num / p.contraction_margin()
}

/// Walks a cell word, returning (left endpoint, length, offset B, scale D).
fn descend(p: &SimilarityParams, word: &CellWord) -> (f64, f64, f64, f64) {
    let mut left = 0.0;
    let mut len = 1.0;
    let mut b = 0.0;
    let mut delta = 1.0;
    for &k in &word.indices {
        let k = usize::from(k);
        left += len * p.alpha[k];
        len *= p.a[k];
        b += delta * p.beta[k];
        delta *= p.d[k];
    }
    (left, len, b, delta)
}

/// Exact moments of P over the cell of `word`, by pure arithmetic.
///
/// On the cell \[z, z+h\] the fixed point satisfies
/// P(x) = B + D * P((x - z)/h), so
///
/// ```text
///   m0 = h (B + D M0),
///   m1 = h z (B + D M0) + h^2 (B/2 + D M1).
/// ```
pub fn cell_moments(p: &SimilarityParams, word: &CellWord) -> CellMoments {
    let gm = global_moments(p);
    let (left, len, b, delta) = descend(p, word);
    let m0 = len * (b + delta * gm.m0);
    let m1 = len * left * (b + delta * gm.m0) + len * len * (b / 2.0 + delta * gm.m1);
    CellMoments {
        length: len,
        m0,
        m1,
        offset_b: b,
        scale_d: delta,
    }
}

/// Left and right endpoints of the cell of `word`.
pub fn cell_bounds(p: &SimilarityParams, word: &CellWord) -> (f64, f64) {
    let (left, len, _, _) = descend(p, word);
    (left, left + len)
}

/// Pointwise evaluation of P by digit-expansion truncation.
///
/// Descends `depth` levels of the cell containing `x` and returns
/// `B + D * M0` together with an interval radius `|D| * osc`, where `osc`
/// is a sup-style oscillation bound for P. The value is exact (radius 0)
/// whenever a zero scale factor is reached. A breakpoint x = alpha_k
/// resolves to the left cell; only the L2 identity of P matters, so the
/// tie-break is a pure convention.
///
/// The oscillation bound uses `sup |P| <= max|beta| / (1 - max|d|)` and is
/// infinite when `max|d| >= 1` (P need not be essentially bounded then).
pub fn evaluate_at(p: &SimilarityParams, x: f64, depth: usize) -> (f64, f64) {
    let gm = global_moments(p);
    let n = p.n();
    let mut u = x.clamp(0.0, 1.0);
    let mut b = 0.0;
    let mut delta = 1.0;
    for _ in 0..depth {
        if delta == 0.0 {
            break;
        }
        // left cell on ties: the largest k with alpha_k < u, else piece 0
        let mut k = 0;
        for j in (0..n).rev() {
            if u > p.alpha[j] {
                k = j;
                break;
            }
        }
        b += delta * p.beta[k];
        delta *= p.d[k];
        u = ((u - p.alpha[k]) / p.a[k]).clamp(0.0, 1.0);
    }
    if delta == 0.0 {
        return (b, 0.0);
    }
    let max_d = p.d.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let max_beta = p.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let sup = if max_d < 1.0 {
        max_beta / (1.0 - max_d)
    } else {
        f64::INFINITY
    };
    (b + delta * gm.m0, delta.abs() * (sup + gm.m0.abs()))
}

/// Spectral order of the self-similar function.
///
/// For parameters with at least two nonzero d_k and some nonzero beta_k
/// this is the unique root D in (0, 2) of `sum (a_k |d_k|)^{D/2} = 1`,
/// found by bisection on the strictly decreasing sum; otherwise 0 by
/// convention.
pub fn spectral_order(p: &SimilarityParams) -> f64 {
    let products: Vec<f64> =
        p.a.iter()
            .zip(&p.d)
            .filter(|(_, d)| **d != 0.0)
            .map(|(a, d)| a * d.abs())
            .collect();
    if products.len() < 2 || p.beta.iter().all(|&b| b == 0.0) {
        return 0.0;
    }
    let upsilon = |x: f64| -> f64 { products.iter().map(|c| c.powf(x)).sum::<f64>() };
    // root of upsilon(x) = 1 on x in (0, 1); D = 2x
    let mut lo = 0.0;
    let mut hi = 1.0;
    debug_assert!(upsilon(hi) < 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = upsilon(mid);
        if (v - 1.0).abs() < 1e-15 {
            return 2.0 * mid;
        }
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    2.0 * 0.5 * (lo + hi)
}

/// Applies the similarity operator to a depth-m piecewise-constant cell
/// representation, returning the depth-(m+1) representation of G(f).
///
/// `values` holds one value per depth-m cell in left-to-right order.
pub fn apply_similarity(p: &SimilarityParams, values: &[f64]) -> Vec<f64> {
    let n = p.n();
    let mut out = Vec::with_capacity(n * values.len());
    for k in 0..n {
        for v in values {
            out.push(p.beta[k] + p.d[k] * v);
        }
    }
    out
}

/// Piecewise-constant cell representation of P at a given depth: the value
/// on each cell is the exact cell mean B + D * M0.
pub fn sample_cells(p: &SimilarityParams, depth: usize) -> Vec<f64> {
    let gm = global_moments(p);
    let n = p.n();
    let mut vals = vec![(0.0f64, 1.0f64)]; // (B, D) pairs per cell
    for _ in 0..depth {
        let mut next = Vec::with_capacity(vals.len() * n);
        // refine by prepending the new letter: cell (k, w) carries
        // beta_k + d_k * B_w and d_k * D_w, in lexicographic order
        for k in 0..n {
            for &(b, delta) in &vals {
                next.push((p.beta[k] + p.d[k] * b, p.d[k] * delta));
            }
        }
        vals = next;
    }
    vals.into_iter().map(|(b, d)| b + d * gm.m0).collect()
}

/// Discrete L2 distance between two piecewise-constant cell functions given
/// at depths m and m+1 (the coarse one is refined before comparing).
pub fn cell_l2_distance(p: &SimilarityParams, coarse: &[f64], fine: &[f64]) -> f64 {
    let n = p.n();
    assert_eq!(fine.len(), coarse.len() * n);
    // depth-(m+1) cell widths: outer index k scales by a_k, inner pattern
    // repeats the depth-m widths
    let depth = {
        let mut d = 0;
        let mut c = fine.len();
        while c > 1 {
            c /= n;
            d += 1;
        }
        d
    };
    let mut acc = 0.0;
    for (i, &fv) in fine.iter().enumerate() {
        let cv = coarse[coarse_index(i, fine.len(), n)];
        let w = cell_width(p, i, depth);
        acc += w * (fv - cv) * (fv - cv);
    }
    acc.sqrt()
}

/// Width of the i-th depth-m cell (lexicographic order).
fn cell_width(p: &SimilarityParams, mut i: usize, depth: usize) -> f64 {
    let n = p.n();
    let mut w = 1.0;
    let mut span = n.pow(depth as u32);
    for _ in 0..depth {
        span /= n;
        let k = i / span;
        i %= span;
        w *= p.a[k];
    }
    w
}

/// Index of the depth-m parent of the i-th depth-(m+1) cell.
fn coarse_index(i: usize, fine_len: usize, n: usize) -> usize {
    // dropping the last digit of the word means dividing the *trailing*
    // index; cells are ordered with the first letter outermost, so the
    // parent of cell i is i / n only if the last letter were outermost.
    // With the first letter outermost, the parent drops the last letter:
    // i = k_1 * n^m + rest, parent = k_1 * n^{m-1} + rest / n.
    let m_fine = {
        let mut d = 0;
        let mut c = fine_len;
        while c > 1 {
            c /= n;
            d += 1;
        }
        d
    };
    let mut digits = Vec::with_capacity(m_fine);
    let mut rest = i;
    let mut span = fine_len;
    for _ in 0..m_fine {
        span /= n;
        digits.push(rest / span);
        rest %= span;
    }
    digits.pop();
    let mut idx = 0;
    for d in digits {
        idx = idx * n + d;
    }
    idx
}
