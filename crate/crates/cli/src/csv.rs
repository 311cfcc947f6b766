//! Versioned CSV emission with fixed 17-significant-digit formatting.
//!
//! All numeric output funnels through [`fmt17`], so identical runs produce
//! byte-identical files and every value round-trips to the exact f64.

use anyhow::{anyhow, bail, Context, Result};

use fractal_sl_core::pencil::{Side, SpectrumReport};

pub const HEADER: &str = "# fractal-sl v1";

/// 17 significant digits in scientific notation: lossless for f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Spectrum CSV body (shared by `eigs` and ingested by `s-profile`).
pub fn spectrum_csv(reports: &[&SpectrumReport], modulation: bool) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str("n,lambda,side,bracket_rel_width,depth_shift_rel");
    if modulation {
        out.push_str(",n_over_lambda_log6_2");
    }
    out.push('\n');
    let log62 = 2f64.ln() / 6f64.ln();
    for rep in reports {
        for e in &rep.eigenvalues {
            out.push_str(&format!(
                "{},{},{},{},{}",
                e.index,
                fmt17(e.lambda),
                rep.side.symbol(),
                fmt17(e.bracket_rel_width),
                fmt17(e.depth_shift_rel),
            ));
            if modulation {
                let m = e.index as f64 / e.lambda.abs().powf(log62);
                out.push(',');
                out.push_str(&fmt17(m));
            }
            out.push('\n');
        }
    }
    out
}

/// Parses a spectrum CSV back into per-side eigenvalue data:
/// (side, |lambda| list, max depth shift).
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<(Side, Vec<f64>, f64)>> {
    let mut plus: Vec<f64> = Vec::new();
    let mut minus: Vec<f64> = Vec::new();
    let mut shift_plus = 0.0f64;
    let mut shift_minus = 0.0f64;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 5 {
            bail!("spectrum line {}: expected at least 5 columns", ln + 1);
        }
        let lambda: f64 = cols[1]
            .parse()
            .with_context(|| format!("spectrum line {}: bad lambda", ln + 1))?;
        let shift: f64 = cols[4].parse().unwrap_or(0.0);
        match cols[2] {
            "+" => {
                plus.push(lambda.abs());
                if shift.is_finite() {
                    shift_plus = shift_plus.max(shift);
                }
            }
            "-" => {
                minus.push(lambda.abs());
                if shift.is_finite() {
                    shift_minus = shift_minus.max(shift);
                }
            }
            other => bail!("spectrum line {}: unknown side `{other}`", ln + 1),
        }
    }
    let mut out = Vec::new();
    if !plus.is_empty() {
        out.push((Side::Plus, plus, shift_plus));
    }
    if !minus.is_empty() {
        out.push((Side::Minus, minus, shift_minus));
    }
    if out.is_empty() {
        return Err(anyhow!("spectrum CSV contains no eigenvalue rows"));
    }
    Ok(out)
}

/// Writes to a file, or to stdout when no path is given.
pub fn emit(out_path: Option<&str>, content: &str) -> Result<()> {
    match out_path {
        Some(path) => std::fs::write(path, content).with_context(|| format!("writing {path}")),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_roundtrips() {
        for v in [1.0 / 3.0, 14.435234892348, -9.23e3, 1e-300] {
            let s = fmt17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }
}
