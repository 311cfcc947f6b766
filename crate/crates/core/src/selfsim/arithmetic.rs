//! Arithmetic self-similarity: detecting a common step nu such that every
//! nonzero product a_k |d_k| is an integer power exp(-l_k nu).

use super::{spectral_order, ParamError, SimilarityParams};

/// Default integrality tolerance for step detection.
///
/// The products a_k |d_k| are floating-point, so "the log-ratios are
/// rational" can only be decided heuristically. With convergent
/// denominators capped at 10^6, a genuinely irrational ratio still admits
/// convergents with |q x - p| of order 1e-7..1e-8 below the cap, while
/// exact rational ratios computed in doubles land near 1e-13. The default
/// sits between the two regimes.
pub const DEFAULT_ARITH_TOL: f64 = 1e-9;

const MAX_DENOMINATOR: u64 = 1_000_000;

/// Arithmetic structure (nu, {l_k}, D, J) of a self-similar function.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticStructure {
    /// Maximal step nu > 0, when the parameters are arithmetically
    /// self-similar.
    pub nu: Option<f64>,
    /// Lag l_k per piece; `None` where a_k |d_k| = 0.
    pub lags: Vec<Option<u64>>,
    /// Spectral order D (0 when not of positive spectral order).
    pub spectral_order: f64,
    /// Renewal mass J = sum over d_k != 0 of l_k (a_k |d_k|)^{D/2}.
    pub renewal_mass: Option<f64>,
    /// Whether a common step was found for this parametrization.
    pub arithmetic: bool,
    /// Whether some piece has d_k > 0 with l_k odd, or d_k < 0 with l_k
    /// even (the oscillation hypothesis of the index asymptotics).
    pub parity_condition: bool,
}

impl ArithmeticStructure {
    fn non_arithmetic(n: usize, d_order: f64) -> Self {
        Self {
            nu: None,
            lags: vec![None; n],
            spectral_order: d_order,
            renewal_mass: None,
            arithmetic: false,
            parity_condition: false,
        }
    }
}

/// First continued-fraction convergent p/q of `x` with |q x - p| <= tol and
/// q <= max_den; `None` when the cap is exceeded first.
fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut h_prev: u128 = 0;
    let mut h: u128 = 1;
    let mut k_prev: u128 = 1;
    let mut k: u128 = 0;
    let mut xs = x;
    for _ in 0..64 {
        let a = xs.floor();
        if a >= u64::MAX as f64 {
            return None;
        }
        let a_int = a as u128;
        let h_next = a_int.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a_int.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > u128::from(max_den) {
            return None;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        let err = (k as f64) * x - (h as f64);
        if err.abs() <= tol {
            return Some((h as u64, k as u64));
        }
        let frac = xs - a;
        if frac <= 0.0 {
            return None; // exact integer but outside tolerance: give up
        }
        xs = 1.0 / frac;
    }
    None
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Detects the maximal arithmetic step for the given parametrization.
///
/// Over the pieces with a_k |d_k| > 0, the log-ratios
/// y_k = -ln(a_k |d_k|) are reconstructed as rational multiples of the
/// first one by continued fractions (denominators capped at 10^6 and
/// integrality tested against `tol`), the lags are reduced by their gcd so
/// that nu is maximal, and nu is refit by least squares. The verdict is
/// the final verification `|a_k|d_k| - exp(-l_k nu)| <= tol * a_k|d_k|`
/// per piece; any failure yields `arithmetic = false`.
///
/// A step found this way is maximal only for the *given* parametrization;
/// another parametrization of the same function may carry a different (or
/// no) step.
pub fn arithmetic_structure(
    p: &SimilarityParams,
    tol: f64,
) -> Result<ArithmeticStructure, ParamError> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(ParamError::InvalidTolerance(tol));
    }
    let n = p.n();
    let d_order = spectral_order(p);
    let products: Vec<(usize, f64)> = (0..n)
        .filter(|&k| p.d()[k] != 0.0)
        .map(|k| (k, p.a()[k] * p.d()[k].abs()))
        .collect();
    if products.is_empty() {
        // all d_k = 0: D = 0 and no step
        return Ok(ArithmeticStructure::non_arithmetic(n, d_order));
    }

    let logs: Vec<(usize, f64)> = products.iter().map(|&(k, c)| (k, -c.ln())).collect();
    let y0 = logs[0].1;

    // rational reconstruction of every ratio y_k / y0
    let mut fracs = Vec::with_capacity(logs.len());
    for &(_, y) in &logs {
        match rational_approx(y / y0, MAX_DENOMINATOR, tol.min(1e-6)) {
            Some(pq) => fracs.push(pq),
            None => return Ok(ArithmeticStructure::non_arithmetic(n, d_order)),
        }
    }

    // common denominator, then integer lags, reduced so gcd = 1
    let mut denom: u64 = 1;
    for &(_, q) in &fracs {
        denom = match lcm(denom, q) {
            Some(l) if l <= MAX_DENOMINATOR => l,
            _ => return Ok(ArithmeticStructure::non_arithmetic(n, d_order)),
        };
    }
    let mut lag_values: Vec<u64> = fracs.iter().map(|&(p, q)| p * (denom / q)).collect();
    if lag_values.contains(&0) {
        return Ok(ArithmeticStructure::non_arithmetic(n, d_order));
    }
    let g = lag_values.iter().copied().fold(0, gcd);
    for l in &mut lag_values {
        *l /= g;
    }

    // least-squares step, then final verification on the original scale
    let num: f64 = logs
        .iter()
        .zip(&lag_values)
        .map(|(&(_, y), &l)| y * l as f64)
        .sum();
    let den: f64 = lag_values.iter().map(|&l| (l as f64) * (l as f64)).sum();
    let nu = num / den;
    for (&(_, c), &l) in products.iter().zip(&lag_values) {
        if (c - (-(l as f64) * nu).exp()).abs() > tol * c {
            return Ok(ArithmeticStructure::non_arithmetic(n, d_order));
        }
    }

    let mut lags = vec![None; n];
    for (&(k, _), &l) in products.iter().zip(&lag_values) {
        lags[k] = Some(l);
    }
    let half = d_order / 2.0;
    let renewal_mass: f64 = products
        .iter()
        .zip(&lag_values)
        .map(|(&(_, c), &l)| l as f64 * c.powf(half))
        .sum();
    let parity_condition = (0..n).any(|k| match lags[k] {
        Some(l) => (p.d()[k] > 0.0 && l % 2 == 1) || (p.d()[k] < 0.0 && l % 2 == 0),
        None => false,
    });

    Ok(ArithmeticStructure {
        nu: Some(nu),
        lags,
        spectral_order: d_order,
        renewal_mass: Some(renewal_mass),
        arithmetic: true,
        parity_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{cantor, linear, tilde_p};
    use super::*;

    #[test]
    fn cantor_step_ln6() {
        let s = arithmetic_structure(&cantor().unwrap(), DEFAULT_ARITH_TOL).unwrap();
        assert!(s.arithmetic);
        assert!((s.nu.unwrap() - 6f64.ln()).abs() < 1e-12);
        assert_eq!(s.lags, vec![Some(1), None, Some(1)]);
        assert!(s.parity_condition);
        assert!((s.renewal_mass.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_one_step_ln4() {
        let s = arithmetic_structure(&linear(1).unwrap(), DEFAULT_ARITH_TOL).unwrap();
        assert!(s.arithmetic);
        assert!((s.nu.unwrap() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(s.lags, vec![Some(1), Some(1)]);
    }

    #[test]
    fn linear_two_step_golden() {
        let s = arithmetic_structure(&linear(2).unwrap(), DEFAULT_ARITH_TOL).unwrap();
        assert!(s.arithmetic);
        let expected = 2f64.ln() - (3.0 - 5f64.sqrt()).ln();
        assert!((s.nu.unwrap() - expected).abs() < 1e-12);
        assert_eq!(s.lags, vec![Some(2), Some(1)]);
    }

    #[test]
    fn linear_three_not_arithmetic() {
        let s = arithmetic_structure(&linear(3).unwrap(), DEFAULT_ARITH_TOL).unwrap();
        assert!(!s.arithmetic);
        assert!(s.nu.is_none());
    }

    #[test]
    fn tilde_all_lags_one() {
        let s = arithmetic_structure(&tilde_p(0.2).unwrap(), DEFAULT_ARITH_TOL).unwrap();
        assert!(s.arithmetic);
        assert_eq!(s.lags, vec![Some(1), Some(1), Some(1)]);
        assert!(s.parity_condition);
        // all three products equal, so J = sum of (c)^{D/2} = 1
        assert!((s.renewal_mass.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_zero_d_degenerate() {
        let p = SimilarityParams::new(vec![0.5, 0.5], vec![0.0, 0.0], vec![0.2, 0.7]).unwrap();
        let s = arithmetic_structure(&p, DEFAULT_ARITH_TOL).unwrap();
        assert!(!s.arithmetic);
        assert_eq!(s.spectral_order, 0.0);
        assert_eq!(s.lags, vec![None, None]);
    }

    #[test]
    fn tolerance_validated() {
        let p = cantor().unwrap();
        assert!(arithmetic_structure(&p, 0.0).is_err());
        assert!(arithmetic_structure(&p, 1e-2).is_err());
    }

    #[test]
    fn step_invariant_verified_per_piece() {
        let s = arithmetic_structure(&linear(2).unwrap(), DEFAULT_ARITH_TOL).unwrap();
        let p = linear(2).unwrap();
        let nu = s.nu.unwrap();
        for k in 0..p.n() {
            if let Some(l) = s.lags[k] {
                let c = p.a()[k] * p.d()[k].abs();
                assert!((c - (-(l as f64) * nu).exp()).abs() <= 1e-12 * c);
            }
        }
    }
}
