//! Weight and renewal configuration loading.
//!
//! Weight configs are JSON, either explicit parameter lists
//! `{"a": [...], "d": [...], "beta": [...]}` or a catalog reference
//! `{"builtin": "cantor"}` / `{"builtin": "tilde_P", "params": [0.2]}`.
//! Numbers may be JSON numbers or exact fraction strings like "1/3".

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use serde_json::Value;

use fractal_sl_core::selfsim::{builtin, SimilarityParams};

/// Parses a decimal or "p/q" fraction string.
pub fn parse_real(text: &str) -> Result<f64> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .with_context(|| format!("bad numerator in `{t}`"))?;
        let d: f64 = den
            .trim()
            .parse()
            .with_context(|| format!("bad denominator in `{t}`"))?;
        if d == 0.0 {
            bail!("zero denominator in `{t}`");
        }
        Ok(n / d)
    } else {
        t.parse().with_context(|| format!("bad number `{t}`"))
    }
}

fn value_to_real(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| anyhow!("field {field}: number out of range")),
        Value::String(s) => parse_real(s).with_context(|| format!("field {field}")),
        other => bail!("field {field}: expected number or fraction string, got {other}"),
    }
}

fn value_to_reals(v: &Value, field: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| anyhow!("field {field} must be an array"))?;
    arr.iter().map(|x| value_to_real(x, field)).collect()
}

/// Builds weight parameters from a JSON config document.
pub fn weight_from_json(doc: &Value) -> Result<SimilarityParams> {
    let obj = doc
        .as_object()
        .ok_or_else(|| anyhow!("weight config must be a JSON object"))?;
    if let Some(name) = obj.get("builtin") {
        let name = name
            .as_str()
            .ok_or_else(|| anyhow!("field builtin must be a string"))?;
        let params = match obj.get("params") {
            Some(v) => value_to_reals(v, "params")?,
            None => Vec::new(),
        };
        return builtin(name, &params).map_err(|e| anyhow!("{e}"));
    }
    let a = value_to_reals(obj.get("a").ok_or_else(|| anyhow!("missing field a"))?, "a")?;
    let d = value_to_reals(obj.get("d").ok_or_else(|| anyhow!("missing field d"))?, "d")?;
    let beta = value_to_reals(
        obj.get("beta")
            .ok_or_else(|| anyhow!("missing field beta"))?,
        "beta",
    )?;
    let normalize = obj
        .get("normalize")
        .and_then(Value::as_bool)
        .unwrap_or(false);
    let built = if normalize {
        SimilarityParams::new_normalizing(a, d, beta)
    } else {
        SimilarityParams::new(a, d, beta)
    };
    built.map_err(|e| anyhow!("{e}"))
}

/// Resolves a weight from `--builtin NAME` or `--config PATH`.
///
/// A builtin name may carry positional parameters in parentheses, e.g.
/// `tilde_P(0.2)` or `P_a_delta(1/3, 0.05)`.
pub fn resolve_weight(
    builtin_arg: Option<&str>,
    config_path: Option<&str>,
) -> Result<SimilarityParams> {
    match (builtin_arg, config_path) {
        (Some(name), None) => {
            let (base, params) = split_builtin(name)?;
            builtin(&base, &params).map_err(|e| anyhow!("{e}"))
        }
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading config {path}"))?;
            let doc: Value =
                serde_json::from_str(&text).with_context(|| format!("parsing config {path}"))?;
            weight_from_json(&doc)
        }
        (None, None) => bail!("a weight is required: pass --builtin NAME or --config PATH"),
        (Some(_), Some(_)) => bail!("pass either --builtin or --config, not both"),
    }
}

fn split_builtin(spec: &str) -> Result<(String, Vec<f64>)> {
    let spec = spec.trim();
    match spec.split_once('(') {
        None => Ok((spec.to_string(), Vec::new())),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| anyhow!("unbalanced parentheses in `{spec}`"))?;
            let params = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(parse_real)
                .collect::<Result<Vec<_>>>()?;
            Ok((name.trim().to_string(), params))
        }
    }
}

/// Renewal problem description loaded from JSON.
#[derive(Debug, Deserialize)]
pub struct RenewalConfig {
    pub u: Vec<Value>,
    #[serde(default)]
    pub v: Option<Vec<Value>>,
    #[serde(default)]
    pub x: Option<Vec<Value>>,
    #[serde(default)]
    pub x1: Option<Vec<Value>>,
    #[serde(default)]
    pub x2: Option<Vec<Value>>,
    #[serde(default)]
    pub x_file: Option<String>,
    #[serde(default)]
    pub n_max: Option<usize>,
}

/// Parsed renewal inputs: coefficients and one or two forcing sequences.
pub struct RenewalInputs {
    pub u: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub x1: Vec<f64>,
    pub x2: Option<Vec<f64>>,
    pub n_max: usize,
}

pub fn renewal_from_json(path: &str) -> Result<RenewalInputs> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {path}"))?;
    let cfg: RenewalConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing config {path}"))?;
    let reals = |vs: &[Value], field: &str| -> Result<Vec<f64>> {
        vs.iter().map(|v| value_to_real(v, field)).collect()
    };
    let u = reals(&cfg.u, "u")?;
    let v = match &cfg.v {
        Some(vs) => {
            let v = reals(vs, "v")?;
            if v.iter().all(|&c| c == 0.0) {
                None
            } else {
                Some(v)
            }
        }
        None => None,
    };
    let (x1, x2) = if let Some(path) = &cfg.x_file {
        read_forcing_csv(path)?
    } else if let Some(x1) = &cfg.x1 {
        let x2 = cfg
            .x2
            .as_ref()
            .map(|v| reals(v, "x2"))
            .transpose()?
            .unwrap_or_default();
        (reals(x1, "x1")?, Some(x2))
    } else if let Some(x) = &cfg.x {
        (reals(x, "x")?, None)
    } else {
        bail!("renewal config needs one of: x, x1/x2, x_file");
    };
    let x2 = match (&v, x2) {
        (Some(_), Some(x2)) => Some(x2),
        (Some(_), None) => Some(Vec::new()),
        (None, Some(_)) => bail!("x2 given but no cross coefficients v"),
        (None, None) => None,
    };
    Ok(RenewalInputs {
        u,
        v,
        x1,
        x2,
        n_max: cfg.n_max.unwrap_or(1000),
    })
}

/// Reads forcing samples from CSV: one or two numeric columns, optional
/// comment lines starting with '#'.
fn read_forcing_csv(path: &str) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let mut col1 = Vec::new();
    let mut col2 = Vec::new();
    let mut has_two = false;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let first = parts
            .next()
            .ok_or_else(|| anyhow!("{path}:{}: empty row", ln + 1))?;
        col1.push(parse_real(first).with_context(|| format!("{path}:{}", ln + 1))?);
        if let Some(second) = parts.next() {
            has_two = true;
            col2.push(parse_real(second).with_context(|| format!("{path}:{}", ln + 1))?);
        }
    }
    Ok((col1, if has_two { Some(col2) } else { None }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn builtin_with_params() {
        let (name, params) = split_builtin("tilde_P(0.2)").unwrap();
        assert_eq!(name, "tilde_P");
        assert_eq!(params, vec![0.2]);
        let (name, params) = split_builtin("P_a_delta(1/3, 0)").unwrap();
        assert_eq!(name, "P_a_delta");
        assert_eq!(params, vec![1.0 / 3.0, 0.0]);
    }

    #[test]
    fn weight_json_exact_strings() {
        let doc: Value = serde_json::from_str(
            r#"{"a": ["1/3", "1/3", "1/3"], "d": [0.5, 0, 0.5], "beta": [0, "1/2", 0.5]}"#,
        )
        .unwrap();
        let p = weight_from_json(&doc).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.beta()[1], 0.5);
    }

    #[test]
    fn weight_json_builtin() {
        let doc: Value = serde_json::from_str(r#"{"builtin": "cantor"}"#).unwrap();
        assert!(weight_from_json(&doc).is_ok());
        let doc: Value =
            serde_json::from_str(r#"{"builtin": "tilde_P", "params": [0.2]}"#).unwrap();
        assert!(weight_from_json(&doc).is_ok());
    }
}
