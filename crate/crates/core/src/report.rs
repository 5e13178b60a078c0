//! Rate reports and output formatting shared by the analytic and Monte Carlo paths.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::detectors::DETECTOR_COUNT;
use crate::error::Result;

/// Version tag written into every JSON object and CSV table this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept in emitted numbers.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    MonteCarlo,
}

/// A note attached to a report when a formula is evaluated outside the regime where it is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Diagnostic {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            value: None,
        }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }
}

/// Alert rate, sifted key rate and QBER for one scenario.
///
/// `alert_rate` counts alert clicks per pulse delivered to Bob's receiver; `sifted_rate`
/// counts sifted bits per protocol round. `detector_click_probs` are per delivered pulse,
/// in the order `[a1, a2, b1, b2, b3, b4]` of physical detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub provenance: Provenance,
    pub alert_rate: f64,
    pub sifted_rate: f64,
    pub qber: f64,
    pub detector_click_probs: [f64; DETECTOR_COUNT],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

impl RatesReport {
    pub fn analytic(
        alert_rate: f64,
        sifted_rate: f64,
        qber: f64,
        detector_click_probs: [f64; DETECTOR_COUNT],
    ) -> Self {
        Self {
            provenance: Provenance::Analytic,
            alert_rate,
            sifted_rate,
            qber,
            detector_click_probs,
            diagnostics: Vec::new(),
        }
    }

    pub fn diagnostic(&self, code: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.code == code)
    }
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// `x` rounded to nine significant digits, formatted for CSV.
pub fn sig9(x: f64) -> String {
    round_sig(x).to_string()
}

/// Rounds every floating-point number inside a JSON tree in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with all numbers rounded to nine significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.123456789123), 0.123456789);
        assert_eq!(round_sig(1234567891234.0), 1234567890000.0);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(sig9(0.25), "0.25");
    }

    #[test]
    fn json_rounding_walks_tree() {
        let mut v = serde_json::json!({"a": [1.0000000001, 2], "b": {"c": 1.23456789012345}});
        round_json(&mut v);
        assert_eq!(v["a"][0], 1.0);
        assert_eq!(v["a"][1], 2);
        assert_eq!(v["b"]["c"], 1.23456789);
    }
}
