//! Eigenvalue-count asymptotics for arithmetically self-similar weights.
//!
//! For a weight of spectral order D with step nu, the index grows like
//! `ind(lambda) = |lambda|^{D/2} (s(ln|lambda| / nu) + o(1))` with
//! continuous nonnegative 1-periodic amplitude functions s+ and s-. This
//! module extracts information about s from computed spectra in three
//! independent ways:
//!
//! - [`lambda_profile`]: the exponentially weighted sliding average
//!   `L(t) = exp(-D nu t / 2) (1/eps) int_t^{t+eps} ind(sign exp(nu z)) dz`,
//!   integrated exactly from the eigenvalue list (the index is a step
//!   function of z).
//! - [`s_bounds`]: rigorous pointwise bounds
//!   `|lambda|^{-D/2} (ind -/+ (n-1)) <= s <= ...` at sample points away
//!   from eigenvalues, folded into one period.
//! - [`s_estimate`]: the renewal representation: the profile L satisfies a
//!   lattice renewal equation up to an exponentially small defect, so
//!   folding the defect forcing through the renewal limit formula
//!   recovers s, with Richardson extrapolation in eps.
//!
//! The growth exponent itself is checked by [`exponent_fit`], and the
//! self-similar index inequality by [`check_splitting_inequality`].

use thiserror::Error;

use crate::pencil::{assemble, build_grid, inertia_index, PencilError, Side, SpectrumReport};
use crate::renewal::{solve_continuous, RenewalError, RenewalSystem};
use crate::selfsim::{ArithmeticStructure, SimilarityParams};

#[derive(Debug, Error)]
pub enum AsymError {
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(&'static str),
    #[error("side {} required but no curve was supplied", .0.symbol())]
    MissingSide(Side),
    #[error("curve too short: need index data up to t = {needed}, have {available}")]
    CurveTooShort { needed: f64, available: f64 },
    #[error("need at least {need} eigenvalues for the fit, got {got}")]
    TooFewEigenvalues { got: usize, need: usize },
    #[error("arithmetic structure carries no step")]
    NoStep,
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Renewal(#[from] RenewalError),
}

/// Index-counting curve for one spectral side: the ordered eigenvalue
/// magnitudes, from which ind(|lambda|) is the count strictly below.
#[derive(Debug, Clone)]
pub struct IndexCurve {
    side: Side,
    magnitudes: Vec<f64>,
    depth: usize,
    /// Magnitude below which the list is known to be the complete
    /// spectrum on this side.
    complete_below: f64,
    /// Relative one-sided uncertainty of the magnitudes (discretization
    /// shift between the two depths; 0 when unknown).
    rel_uncertainty: f64,
}

impl IndexCurve {
    /// Builds the curve from a spectrum report, using the guard as the
    /// completeness bound for partial reports.
    pub fn from_report(report: &SpectrumReport, lambda_guard: f64) -> Self {
        let magnitudes: Vec<f64> = report.eigenvalues.iter().map(|e| e.lambda.abs()).collect();
        let complete_below = if report.warning.is_some() {
            lambda_guard
        } else {
            magnitudes.last().copied().unwrap_or(lambda_guard)
        };
        let rel_uncertainty = report
            .eigenvalues
            .iter()
            .map(|e| e.depth_shift_rel)
            .filter(|s| s.is_finite())
            .fold(0.0f64, f64::max);
        Self {
            side: report.side,
            magnitudes,
            depth: report.depth,
            complete_below,
            rel_uncertainty,
        }
    }

    /// Curve from raw eigenvalue magnitudes; they are sorted ascending.
    pub fn from_magnitudes(side: Side, mut magnitudes: Vec<f64>, depth: usize) -> Self {
        magnitudes.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let complete_below = magnitudes.last().copied().unwrap_or(0.0);
        Self {
            side,
            magnitudes,
            depth,
            complete_below,
            rel_uncertainty: 0.0,
        }
    }

    /// Overrides the magnitude below which the curve is complete (e.g. a
    /// search guard for a side known to be empty).
    pub fn with_complete_below(mut self, bound: f64) -> Self {
        self.complete_below = bound;
        self
    }

    /// Overrides the recorded relative uncertainty.
    pub fn with_rel_uncertainty(mut self, u: f64) -> Self {
        self.rel_uncertainty = u;
        self
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rel_uncertainty(&self) -> f64 {
        self.rel_uncertainty
    }

    /// ind at a magnitude: number of eigenvalues strictly below.
    pub fn ind_at(&self, magnitude: f64) -> usize {
        self.magnitudes.partition_point(|&m| m < magnitude)
    }

    /// Number of eigenvalues at most `magnitude` (the right limit of ind).
    pub fn ind_right(&self, magnitude: f64) -> usize {
        self.magnitudes.partition_point(|&m| m <= magnitude)
    }

    /// Largest t with exact index data: ln(complete_below) / nu.
    pub fn max_t(&self, nu: f64) -> f64 {
        self.complete_below.ln() / nu
    }

    fn scaled(&self, factor: f64) -> Self {
        let mut c = self.clone();
        for m in &mut c.magnitudes {
            *m *= factor;
        }
        c.complete_below *= factor;
        c
    }

    /// Exact integral of ind(sign e^{nu z}) over z in [t, t + eps].
    fn ind_integral(&self, nu: f64, t: f64, eps: f64) -> f64 {
        let hi = t + eps;
        let mut acc = 0.0;
        for &m in &self.magnitudes {
            let z = m.ln() / nu;
            if z >= hi {
                break;
            }
            acc += hi - z.max(t);
        }
        acc
    }
}

/// One value of the sliding-average profile Lambda.
fn lambda_at(curve: &IndexCurve, d_order: f64, nu: f64, eps: f64, t: f64) -> f64 {
    (-d_order * nu * t / 2.0).exp() * curve.ind_integral(nu, t, eps) / eps
}

/// Samples `Lambda(t) = e^{-D nu t/2} (1/eps) int_t^{t+eps} ind dz` on the
/// grid t = t_start + i/q, exactly (the index is a step function with
/// jumps at ln(lambda_n)/nu).
pub fn lambda_profile(
    curve: &IndexCurve,
    arith: &ArithmeticStructure,
    eps: f64,
    t_start: f64,
    t_end: f64,
    q: usize,
) -> Result<Vec<(f64, f64)>, AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    let d_order = arith.spectral_order;
    let available = curve.max_t(nu);
    if t_end + eps > available + 1e-12 {
        return Err(AsymError::CurveTooShort {
            needed: t_end + eps,
            available,
        });
    }
    let steps = ((t_end - t_start) * q as f64).round() as usize;
    Ok((0..=steps)
        .map(|i| {
            let t = t_start + i as f64 / q as f64;
            (t, lambda_at(curve, d_order, nu, eps, t))
        })
        .collect())
}

/// A pointwise bound for s at one sample magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    /// Sample magnitude |lambda|.
    pub lambda: f64,
    /// t = ln|lambda| / nu.
    pub t: f64,
    /// t folded into [0, 1).
    pub t_fold: f64,
    /// Index at the sample (right limit when the sample sits at an
    /// eigenvalue).
    pub ind: usize,
    /// |lambda|^{-D/2} (ind - (n-1)), clamped at 0.
    pub lower: f64,
    /// |lambda|^{-D/2} (ind + (n-1)).
    pub upper: f64,
}

fn bound_sample(magnitude: f64, ind: usize, d_order: f64, nu: f64, n_pieces: usize) -> BoundSample {
    let scale = magnitude.powf(-d_order / 2.0);
    let slack = (n_pieces - 1) as f64;
    let t = magnitude.ln() / nu;
    BoundSample {
        lambda: magnitude,
        t,
        t_fold: t.rem_euclid(1.0),
        ind,
        lower: (scale * (ind as f64 - slack)).max(0.0),
        upper: scale * (ind as f64 + slack),
    }
}

/// Bounds at the right limit of every eigenvalue: s(ln lambda_n / nu + 0)
/// lies within |lambda_n|^{-D/2} (ind(lambda_n + 0) -/+ (n-1)).
pub fn just_right_bounds(
    curve: &IndexCurve,
    arith: &ArithmeticStructure,
    n_pieces: usize,
) -> Result<Vec<BoundSample>, AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    Ok(curve
        .magnitudes()
        .iter()
        .map(|&m| bound_sample(m, curve.ind_right(m), arith.spectral_order, nu, n_pieces))
        .collect())
}

/// Bound for s at an arbitrary magnitude with known index (the magnitude
/// must not be an eigenvalue and must lie within the curve's complete
/// range).
pub fn bound_at(
    curve: &IndexCurve,
    arith: &ArithmeticStructure,
    n_pieces: usize,
    magnitude: f64,
) -> Result<BoundSample, AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    let t = magnitude.ln() / nu;
    if t > curve.max_t(nu) {
        return Err(AsymError::CurveTooShort {
            needed: t,
            available: curve.max_t(nu),
        });
    }
    Ok(bound_sample(
        magnitude,
        curve.ind_at(magnitude),
        arith.spectral_order,
        nu,
        n_pieces,
    ))
}

/// Bounds at geometric midpoints strictly between consecutive eigenvalues.
pub fn between_bounds(
    curve: &IndexCurve,
    arith: &ArithmeticStructure,
    n_pieces: usize,
) -> Result<Vec<BoundSample>, AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    let mags = curve.magnitudes();
    let mut out = Vec::new();
    for w in mags.windows(2) {
        if w[1] > w[0] {
            let mid = (w[0] * w[1]).sqrt();
            out.push(bound_sample(
                mid,
                curve.ind_at(mid),
                arith.spectral_order,
                nu,
                n_pieces,
            ));
        }
    }
    Ok(out)
}

/// Lower/estimate/upper triple at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
}

/// A periodic profile estimate on the grid tau = j/q, j = 0..q.
#[derive(Debug, Clone)]
pub struct ProfileEstimate {
    /// Fold grid tau_j = j / q over one period (endpoint included).
    pub t_grid: Vec<f64>,
    /// Per-point bands for s+; `None` at points where no data lands.
    pub s_plus: Option<Vec<Option<Band>>>,
    /// Per-point bands for s-.
    pub s_minus: Option<Vec<Option<Band>>>,
    /// Averaging width the profile was computed with.
    pub epsilon: f64,
    pub spectral_order: f64,
    pub nu: f64,
    pub renewal_mass: f64,
    /// Raw last-period sliding averages per side (direct s readings),
    /// index 0 for plus and 1 for minus.
    pub raw_last_period: [Option<Vec<f64>>; 2],
    /// Per-side max |Lambda(t) - Lambda(t - 1)| over the last period (an
    /// empirical proxy for the remaining o(1) drift), same indexing.
    pub period_spread: [Option<f64>; 2],
    /// max |Z - s| of the renewal solve at the base averaging width.
    pub renewal_sup_gap: Option<f64>,
}

impl ProfileEstimate {
    fn empty(q: usize, eps: f64, arith: &ArithmeticStructure) -> Self {
        Self {
            t_grid: (0..=q).map(|j| j as f64 / q as f64).collect(),
            s_plus: None,
            s_minus: None,
            epsilon: eps,
            spectral_order: arith.spectral_order,
            nu: arith.nu.unwrap_or(f64::NAN),
            renewal_mass: arith.renewal_mass.unwrap_or(f64::NAN),
            raw_last_period: [None, None],
            period_spread: [None, None],
            renewal_sup_gap: None,
        }
    }

    fn side_slot(&mut self, side: Side) -> &mut Option<Vec<Option<Band>>> {
        match side {
            Side::Plus => &mut self.s_plus,
            Side::Minus => &mut self.s_minus,
        }
    }

    /// Merges per-side data of `other` into `self`.
    pub fn merge(&mut self, other: ProfileEstimate) {
        assert_eq!(self.t_grid.len(), other.t_grid.len(), "grid mismatch");
        if let Some(v) = other.s_plus {
            self.s_plus = Some(v);
            self.raw_last_period[0] = other.raw_last_period[0].clone();
            self.period_spread[0] = other.period_spread[0];
        }
        if let Some(v) = other.s_minus {
            self.s_minus = Some(v);
            self.raw_last_period[1] = other.raw_last_period[1].clone();
            self.period_spread[1] = other.period_spread[1];
        }
        if other.renewal_sup_gap.is_some() {
            self.renewal_sup_gap = other.renewal_sup_gap;
        }
    }
}

/// Folds pointwise bounds into per-period-bin envelopes: within a bin the
/// lower bounds max and the upper bounds min.
///
/// `n_pieces` is the piece count n of the weight; the slack in the bounds
/// is n - 1.
pub fn s_bounds(
    curve: &IndexCurve,
    arith: &ArithmeticStructure,
    n_pieces: usize,
    q: usize,
    eps: f64,
) -> Result<ProfileEstimate, AsymError> {
    let mut est = ProfileEstimate::empty(q, eps, arith);
    if curve.magnitudes().is_empty() {
        *est.side_slot(curve.side()) = Some(vec![None; q + 1]);
        return Ok(est);
    }
    let mut samples = just_right_bounds(curve, arith, n_pieces)?;
    samples.extend(between_bounds(curve, arith, n_pieces)?);

    let mut bands: Vec<Option<Band>> = vec![None; q + 1];
    for s in &samples {
        let j = (s.t_fold * q as f64).floor() as usize % q;
        let band = bands[j].get_or_insert(Band {
            lower: 0.0,
            estimate: 0.0,
            upper: f64::INFINITY,
        });
        band.lower = band.lower.max(s.lower);
        band.upper = band.upper.min(s.upper);
    }
    for band in bands.iter_mut().flatten() {
        band.estimate = if band.upper.is_finite() {
            0.5 * (band.lower + band.upper)
        } else {
            band.lower
        };
    }
    bands[q] = bands[0];
    *est.side_slot(curve.side()) = Some(bands);
    Ok(est)
}

/// Renewal coefficients extracted from the similarity parameters.
struct RenewalPieces {
    /// u_l = sum of (a_k |d_k|)^{D/2} over pieces with d_k > 0 and lag l.
    u: Vec<f64>,
    /// v_l = the same over pieces with d_k < 0.
    v: Vec<f64>,
    coupled: bool,
}

fn renewal_pieces(
    p: &SimilarityParams,
    arith: &ArithmeticStructure,
) -> Result<RenewalPieces, AsymError> {
    if !arith.arithmetic {
        return Err(AsymError::HypothesisNotMet("arithmetic self-similarity"));
    }
    if !arith.parity_condition {
        return Err(AsymError::HypothesisNotMet(
            "parity condition (odd lag with d_k > 0 or even lag with d_k < 0)",
        ));
    }
    let half = arith.spectral_order / 2.0;
    let max_lag = arith.lags.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut u = vec![0.0; max_lag];
    let mut v = vec![0.0; max_lag];
    let mut coupled = false;
    for k in 0..p.n() {
        if let Some(l) = arith.lags[k] {
            let w = (p.a()[k] * p.d()[k].abs()).powf(half);
            if p.d()[k] > 0.0 {
                u[(l - 1) as usize] += w;
            } else {
                v[(l - 1) as usize] += w;
                coupled = true;
            }
        }
    }
    Ok(RenewalPieces { u, v, coupled })
}

/// Renewal-based estimate of the periodic amplitude functions.
///
/// The sliding average Lambda of each side satisfies the lattice renewal
/// recursion up to a defect bounded by (n-1) e^{-D nu t / 2}; the forcing
///
/// ```text
///   X_s(t) = L_s(t) - sum over d_k > 0 of w_k L_s(t - l_k)
///                   - sum over d_k < 0 of w_k L_{-s}(t - l_k)
/// ```
///
/// with w_k = (a_k |d_k|)^{D/2} is folded through the renewal limit
/// formula to produce s: per side when all d_k >= 0, common to both sides
/// otherwise (which realizes the identity s+ = s-). The estimate is
/// Richardson-extrapolated over averaging widths {eps, eps/2} and carries
/// a conservative additive error band: extrapolation spread +
/// last-two-period truncation spread + geometric tail slack +
/// eigenvalue-shift sensitivity.
pub fn s_estimate(
    p: &SimilarityParams,
    arith: &ArithmeticStructure,
    plus: Option<&IndexCurve>,
    minus: Option<&IndexCurve>,
    eps: f64,
    q: usize,
) -> Result<ProfileEstimate, AsymError> {
    let pieces = renewal_pieces(p, arith)?;
    if pieces.coupled {
        let plus = plus.ok_or(AsymError::MissingSide(Side::Plus))?;
        let minus = minus.ok_or(AsymError::MissingSide(Side::Minus))?;
        estimate_with(
            p,
            arith,
            &pieces,
            &[plus, minus],
            eps,
            q,
            &[Side::Plus, Side::Minus],
        )
    } else {
        let mut est = ProfileEstimate::empty(q, eps, arith);
        let mut any = false;
        for curve in [plus, minus].into_iter().flatten() {
            let scalar_pieces = RenewalPieces {
                u: pieces.u.clone(),
                v: vec![0.0; pieces.v.len()],
                coupled: false,
            };
            let one = estimate_with(p, arith, &scalar_pieces, &[curve], eps, q, &[curve.side()])?;
            est.merge(one);
            any = true;
        }
        if !any {
            return Err(AsymError::MissingSide(Side::Plus));
        }
        Ok(est)
    }
}

/// Grid data for one side: Lambda and the forcing X on t0 + i/q.
struct SideGrid {
    lambda: Vec<f64>,
    forcing: Vec<f64>,
}

/// Builds the common time grid and per-side profiles at one eps level.
/// Returns (t0, whole periods covered, per-side grids).
fn build_grids(
    arith: &ArithmeticStructure,
    pieces: &RenewalPieces,
    curves: &[&IndexCurve],
    eps: f64,
    q: usize,
) -> Result<(f64, usize, Vec<SideGrid>), AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    let d_order = arith.spectral_order;

    // origin: an integer below every first jump minus the averaging window
    let mut first = f64::INFINITY;
    let mut last = f64::INFINITY;
    for c in curves {
        if let Some(&m) = c.magnitudes().first() {
            first = first.min(m.ln() / nu);
        }
        last = last.min(c.max_t(nu));
    }
    if !first.is_finite() {
        // no eigenvalues anywhere: profiles are identically zero
        let grids = curves
            .iter()
            .map(|_| SideGrid {
                lambda: vec![0.0; q + 1],
                forcing: vec![0.0; q + 1],
            })
            .collect();
        return Ok((0.0, 1, grids));
    }
    let t0 = (first - 2.0 * eps).floor() - 1.0;
    let t_end_exact = last - eps;
    let periods = (t_end_exact - t0).floor();
    if periods < 2.0 {
        return Err(AsymError::CurveTooShort {
            needed: t0 + 2.0 + eps,
            available: last,
        });
    }
    let periods = periods as usize;
    let len = periods * q + 1;

    let raw: Vec<Vec<f64>> = curves
        .iter()
        .map(|c| {
            (0..len)
                .map(|i| lambda_at(c, d_order, nu, eps, t0 + i as f64 / q as f64))
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(raw.len());
    for (ci, lambda) in raw.iter().enumerate() {
        let other = if raw.len() == 2 {
            Some(&raw[1 - ci])
        } else {
            None
        };
        let forcing: Vec<f64> = (0..len)
            .map(|i| {
                let mut x = lambda[i];
                for (li, &w) in pieces.u.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let back = (li + 1) * q;
                    if back <= i {
                        x -= w * lambda[i - back];
                    }
                }
                for (li, &w) in pieces.v.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let back = (li + 1) * q;
                    if back <= i {
                        let o = other.expect("cross terms need both sides");
                        x -= w * o[i - back];
                    }
                }
                x
            })
            .collect();
        out.push(SideGrid {
            lambda: lambda.clone(),
            forcing,
        });
    }
    Ok((t0, periods, out))
}

/// Renewal fold at one eps level; returns (profile samples, grids, periods).
fn fold_once(
    arith: &ArithmeticStructure,
    pieces: &RenewalPieces,
    curves: &[&IndexCurve],
    eps: f64,
    q: usize,
) -> Result<(Vec<f64>, Vec<SideGrid>, usize, f64), AsymError> {
    let (_t0, periods, grids) = build_grids(arith, pieces, curves, eps, q)?;
    let sys = if pieces.coupled {
        RenewalSystem::coupled(pieces.u.clone(), pieces.v.clone())?
    } else {
        RenewalSystem::scalar(pieces.u.clone())?
    };
    let t_end = periods as f64;
    let forcings: Vec<Vec<f64>> = grids.iter().map(|g| g.forcing.clone()).collect();
    let sol = solve_continuous(&sys, &forcings, t_end, 1.0 / q as f64)?;
    let profile = sol
        .profile
        .expect("continuous mode always yields a profile");
    Ok((profile.samples, grids, periods, sol.sup_gap.unwrap_or(0.0)))
}

fn estimate_with(
    p: &SimilarityParams,
    arith: &ArithmeticStructure,
    pieces: &RenewalPieces,
    curves: &[&IndexCurve],
    eps: f64,
    q: usize,
    fill_sides: &[Side],
) -> Result<ProfileEstimate, AsymError> {
    let nu = arith.nu.ok_or(AsymError::NoStep)?;
    let d_order = arith.spectral_order;
    let j_mass = arith.renewal_mass.unwrap_or(f64::NAN);

    // base estimate at eps, Richardson against eps/2, spread vs 2 eps
    let (coarse, _, _, _) = fold_once(arith, pieces, curves, 2.0 * eps, q)?;
    let (base, grids, periods, sup_gap) = fold_once(arith, pieces, curves, eps, q)?;
    let (fine, _, _, _) = fold_once(arith, pieces, curves, 0.5 * eps, q)?;
    let richardson: Vec<f64> = fine.iter().zip(&base).map(|(f, b)| 2.0 * f - b).collect();
    let rich_spread: Vec<f64> = fine
        .iter()
        .zip(&base)
        .zip(&coarse)
        .map(|((f, b), c)| (f - b).abs() + (b - c).abs())
        .collect();

    // truncation: spread of Lambda across the last two periods, plus the
    // geometric tail of the defect beyond the data
    let len = periods * q + 1;
    let mut trunc = 0.0f64;
    let mut side_spread = vec![0.0f64; grids.len()];
    if periods >= 2 {
        for (gi, g) in grids.iter().enumerate() {
            for i in (len - q - 1)..len {
                side_spread[gi] = side_spread[gi].max((g.lambda[i] - g.lambda[i - q]).abs());
            }
            trunc = trunc.max(side_spread[gi]);
        }
    }
    let t_last = curves
        .iter()
        .map(|c| c.max_t(nu))
        .fold(f64::INFINITY, f64::min);
    let decay = (-d_order * nu / 2.0).exp();
    let tail_slack = if j_mass.is_finite() && j_mass > 0.0 && t_last.is_finite() {
        (p.n() - 1) as f64 / j_mass * (-d_order * nu * t_last / 2.0).exp() / (1.0 - decay)
    } else {
        0.0
    };

    // sensitivity to the eigenvalue discretization shift
    let max_uncertainty = curves
        .iter()
        .map(|c| c.rel_uncertainty())
        .fold(0.0f64, f64::max);
    let shift_band: Vec<f64> = if max_uncertainty > 0.0 {
        let shifted: Vec<IndexCurve> = curves
            .iter()
            .map(|c| c.scaled(1.0 + max_uncertainty))
            .collect();
        let refs: Vec<&IndexCurve> = shifted.iter().collect();
        let (shifted_base, _, _, _) = fold_once(arith, pieces, &refs, eps, q)?;
        let (shifted_fine, _, _, _) = fold_once(arith, pieces, &refs, 0.5 * eps, q)?;
        shifted_fine
            .iter()
            .zip(&shifted_base)
            .zip(&richardson)
            .map(|((f, b), r)| (2.0 * f - b - r).abs())
            .collect()
    } else {
        vec![0.0; q + 1]
    };

    let bands: Vec<Option<Band>> = richardson
        .iter()
        .zip(&rich_spread)
        .zip(&shift_band)
        .map(|((&est, &rs), &sb)| {
            let band = rs + trunc + tail_slack + sb;
            let estimate = est.max(0.0);
            Some(Band {
                lower: (estimate - band).max(0.0),
                estimate,
                upper: estimate + band,
            })
        })
        .collect();

    let mut est = ProfileEstimate::empty(q, eps, arith);
    est.renewal_sup_gap = Some(sup_gap);
    for (ci, &side) in fill_sides.iter().enumerate() {
        *est.side_slot(side) = Some(bands.clone());
        // raw last-period reading of Lambda as a direct s estimate
        let gi = ci.min(grids.len() - 1);
        let g = &grids[gi];
        let raw: Vec<f64> = (0..=q).map(|j| g.lambda[len - 1 - q + j]).collect();
        let slot = match side {
            Side::Plus => 0,
            Side::Minus => 1,
        };
        est.raw_last_period[slot] = Some(raw);
        est.period_spread[slot] = Some(side_spread[gi]);
    }
    Ok(est)
}

/// Least-squares slope of ln(lambda_n) against ln(n), with r^2.
pub fn exponent_fit(curve: &IndexCurve) -> Result<(f64, f64), AsymError> {
    let mags = curve.magnitudes();
    if mags.len() < 10 {
        return Err(AsymError::TooFewEigenvalues {
            got: mags.len(),
            need: 10,
        });
    }
    let pts: Vec<(f64, f64)> = mags
        .iter()
        .enumerate()
        .map(|(i, &m)| (((i + 1) as f64).ln(), m.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let syy: f64 = pts.iter().map(|p| p.1 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let r_num = n * sxy - sx * sy;
    let r_den = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    let r = r_num / r_den;
    Ok((slope, r * r))
}

/// One row of the splitting-inequality check.
#[derive(Debug, Clone, Copy)]
pub struct SplittingRow {
    pub lambda: f64,
    /// ind at lambda (finer depth).
    pub ind_total: usize,
    /// Sum over pieces of ind at a_k d_k lambda.
    pub ind_parts: usize,
    /// Whether every involved index was stable across the depth pair.
    pub converged: bool,
    /// 0 <= total - parts <= n - 1; `None` when not converged.
    pub satisfied: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SplittingReport {
    pub rows: Vec<SplittingRow>,
    pub violations: usize,
    pub n_pieces: usize,
}

/// Checks the self-similar index inequality
/// `0 <= ind(lambda) - sum_k ind(a_k d_k lambda) <= n - 1`
/// at the given sample points, asserting it only where the indices are
/// stable across the two depths.
pub fn check_splitting_inequality(
    p: &SimilarityParams,
    depth_pair: (usize, usize),
    lambda_samples: &[f64],
) -> Result<SplittingReport, AsymError> {
    let n = p.n();
    let mut forms = Vec::new();
    for depth in [depth_pair.0, depth_pair.1] {
        let grid = build_grid(p, depth)?;
        forms.push(assemble(p, &grid)?);
    }
    let ind = |fi: usize, lam: f64| -> Result<usize, AsymError> {
        if lam == 0.0 {
            return Ok(0);
        }
        Ok(inertia_index(&forms[fi].0, &forms[fi].1, lam)?.index)
    };

    let mut rows = Vec::with_capacity(lambda_samples.len());
    let mut violations = 0usize;
    for &lam in lambda_samples {
        let mut totals = [0usize; 2];
        let mut parts = [0usize; 2];
        for fi in 0..2 {
            totals[fi] = ind(fi, lam)?;
            for k in 0..n {
                parts[fi] += ind(fi, p.a()[k] * p.d()[k] * lam)?;
            }
        }
        let converged = totals[0] == totals[1] && parts[0] == parts[1];
        let satisfied = if converged {
            let diff = totals[1] as i64 - parts[1] as i64;
            let ok = diff >= 0 && diff <= (n - 1) as i64;
            if !ok {
                violations += 1;
            }
            Some(ok)
        } else {
            None
        };
        rows.push(SplittingRow {
            lambda: lam,
            ind_total: totals[1],
            ind_parts: parts[1],
            converged,
            satisfied,
        });
    }
    Ok(SplittingReport {
        rows,
        violations,
        n_pieces: n,
    })
}
