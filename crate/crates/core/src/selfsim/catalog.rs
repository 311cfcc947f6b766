//! Built-in weight catalog.
//!
//! The three-piece family `P_a_delta(a, delta)` has parameters
//!
//! ```text
//!   a    = [a, 1 - 2a, a]
//!   d    = [1/2 + delta, -2 delta, 1/2 + delta]
//!   beta = [0, 1/2 + delta, 1/2 - delta]
//! ```
//!
//! `cantor` is P_a_delta(1/3, 0), the Cantor ladder. `tilde_P(a)` fixes
//! delta by (2 - 5a) delta = a/2, which makes all three products a_k |d_k|
//! equal. `hat_P` is the Cantor parameters with beta_2 = 2/5, an indefinite
//! weight whose scale factors are still nonnegative. `linear_1..3` are three
//! parametrizations of the identity function f(x) = x.

use super::{ParamError, SimilarityParams};

fn bad(name: &str, message: impl Into<String>) -> ParamError {
    ParamError::BadBuiltinParameter {
        name: name.to_string(),
        message: message.into(),
    }
}

/// Three-piece self-similar function P_{a,delta}.
pub fn p_a_delta(a: f64, delta: f64) -> Result<SimilarityParams, ParamError> {
    if !(a > 0.0 && a < 0.5) {
        return Err(bad("P_a_delta", format!("a = {a} outside (0, 1/2)")));
    }
    if !(0.0..1.0 / 3.0).contains(&delta) {
        return Err(bad(
            "P_a_delta",
            format!("delta = {delta} outside [0, 1/3)"),
        ));
    }
    SimilarityParams::new(
        vec![a, 1.0 - 2.0 * a, a],
        vec![0.5 + delta, -2.0 * delta, 0.5 + delta],
        vec![0.0, 0.5 + delta, 0.5 - delta],
    )
}

/// The Cantor ladder P_{1/3, 0}.
pub fn cantor() -> Result<SimilarityParams, ParamError> {
    p_a_delta(1.0 / 3.0, 0.0)
}

/// P_{a, delta} with delta fixed by (2 - 5a) delta = a/2.
///
/// For a close to 1/3 the induced delta exceeds the [0, 1/3) range of the
/// generic family entry, but the parameters stay contractive on all of
/// (0, 1/3), so they are built directly.
pub fn tilde_p(a: f64) -> Result<SimilarityParams, ParamError> {
    if !(a > 0.0 && a < 1.0 / 3.0) {
        return Err(bad("tilde_P", format!("a = {a} outside (0, 1/3)")));
    }
    let delta = a / (2.0 * (2.0 - 5.0 * a));
    SimilarityParams::new(
        vec![a, 1.0 - 2.0 * a, a],
        vec![0.5 + delta, -2.0 * delta, 0.5 + delta],
        vec![0.0, 0.5 + delta, 0.5 - delta],
    )
}

/// Cantor parameters with beta_2 = 2/5 (indefinite weight).
pub fn hat_p() -> Result<SimilarityParams, ParamError> {
    SimilarityParams::new(
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![0.5, 0.0, 0.5],
        vec![0.0, 0.4, 0.5],
    )
}

/// The k-th standard parametrization of the identity function, k in 1..=3.
pub fn linear(k: usize) -> Result<SimilarityParams, ParamError> {
    match k {
        1 => SimilarityParams::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![0.0, 0.5]),
        2 => {
            let phi2 = (3.0 - 5f64.sqrt()) / 2.0;
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            SimilarityParams::new(vec![phi2, phi], vec![phi2, phi], vec![0.0, phi2])
        }
        3 => SimilarityParams::new(
            vec![1.0 / 3.0, 2.0 / 3.0],
            vec![1.0 / 3.0, 2.0 / 3.0],
            vec![0.0, 1.0 / 3.0],
        ),
        _ => Err(bad("linear_k", format!("k = {k} outside 1..=3"))),
    }
}

/// Catalog lookup by name, with positional real parameters.
///
/// Names: `cantor`, `hat_P`, `P_a_delta` (2 params), `tilde_P` (1 param),
/// `linear_1`, `linear_2`, `linear_3`.
pub fn builtin(name: &str, params: &[f64]) -> Result<SimilarityParams, ParamError> {
    let expect = |count: usize| -> Result<(), ParamError> {
        if params.len() != count {
            Err(bad(
                name,
                format!("expected {count} parameter(s), got {}", params.len()),
            ))
        } else {
            Ok(())
        }
    };
    match name {
        "cantor" => {
            expect(0)?;
            cantor()
        }
        "hat_P" => {
            expect(0)?;
            hat_p()
        }
        "P_a_delta" => {
            expect(2)?;
            p_a_delta(params[0], params[1])
        }
        "tilde_P" => {
            expect(1)?;
            tilde_p(params[0])
        }
        "linear_1" => {
            expect(0)?;
            linear(1)
        }
        "linear_2" => {
            expect(0)?;
            linear(2)
        }
        "linear_3" => {
            expect(0)?;
            linear(3)
        }
        other => Err(ParamError::UnknownBuiltin(other.to_string())),
    }
}
