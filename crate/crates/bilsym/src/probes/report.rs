//! Probe reports: JSON schema, CSV rows, pass logic.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

/// How `measured` is judged against `target ± tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − target| ≤ tolerance`.
    Within,
    /// `measured ≤ target + tolerance`.
    AtMost,
    /// `measured ≥ target − tolerance`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, measured: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Comparison::Within => (measured - target).abs() <= tolerance,
            Comparison::AtMost => measured <= target + tolerance,
            Comparison::AtLeast => measured >= target - tolerance,
        }
    }
}

/// Non-finite floats are written as the strings `"NaN"`, `"inf"`, `"-inf"`
/// so reports stay valid JSON and reload to the same values.
pub mod float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v.is_nan() {
            Repr::Text("NaN".into())
        } else if v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("not a number: {other}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod rows {
        use super::*;

        pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
            let out: Vec<Vec<Repr>> = rows.iter().map(|r| r.iter().map(|v| to_repr(*v)).collect()).collect();
            out.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
            let raw: Vec<Vec<Repr>> = Vec::deserialize(d)?;
            raw.into_iter().map(|r| r.into_iter().map(from_repr).collect()).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub schema: u32,
    pub name: String,
    /// Inputs summary.
    pub params: BTreeMap<String, serde_json::Value>,
    /// What `measured` is: a ratio, slope, residual or spread.
    pub quantity: String,
    #[serde(with = "float")]
    pub measured: f64,
    #[serde(with = "float")]
    pub target: f64,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Column names of `trials`.
    pub columns: Vec<String>,
    #[serde(with = "float::rows")]
    pub trials: Vec<Vec<f64>>,
    /// Trials dropped as degenerate.
    pub skipped: usize,
    pub notes: Vec<String>,
}

impl ProbeReport {
    pub fn new(name: impl Into<String>, quantity: impl Into<String>) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            name: name.into(),
            params: BTreeMap::new(),
            quantity: quantity.into(),
            measured: f64::NAN,
            target: f64::NAN,
            tolerance: f64::NAN,
            comparison: Comparison::Within,
            pass: false,
            columns: Vec::new(),
            trials: Vec::new(),
            skipped: 0,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn columns(mut self, cols: &[&str]) -> Self {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.trials.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Sets the verdict; a non-finite measurement never passes.
    pub fn judge(mut self, measured: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        self.measured = measured;
        self.target = target;
        self.tolerance = tolerance;
        self.comparison = comparison;
        self.pass = measured.is_finite() && comparison.holds(measured, target, tolerance);
        self
    }

    /// Whether `pass` agrees with the stored numbers.
    pub fn consistent(&self) -> bool {
        self.pass == (self.measured.is_finite() && self.comparison.holds(self.measured, self.target, self.tolerance))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.trials.iter().map(|r| r[i]).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// Trial table as CSV with a header row.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(&self.columns).map_err(fail)?;
        for row in &self.trials {
            out.write_record(row.iter().map(|v| format_float(*v))).map_err(fail)?;
        }
        out.flush()?;
        Ok(())
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} = {:.6e} vs {} {:.6e} (tol {:.3e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.quantity,
            self.measured,
            match self.comparison {
                Comparison::Within => "target",
                Comparison::AtMost => "at most",
                Comparison::AtLeast => "at least",
            },
            self.target,
            self.tolerance
        )
    }
}

/// Shortest round-trip decimal form; non-finite values as in JSON.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}
