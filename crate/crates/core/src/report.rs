//! Structured check reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An `f64` that survives JSON: non-finite values are written as the
/// strings `"NaN"`, `"inf"` and `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Real(x)),
            Raw::Str(s) => match s.as_str() {
                "NaN" | "nan" => Ok(Real(f64::NAN)),
                "inf" | "+inf" | "Infinity" => Ok(Real(f64::INFINITY)),
                "-inf" | "-Infinity" => Ok(Real(f64::NEG_INFINITY)),
                other => other.parse().map(Real).map_err(serde::de::Error::custom),
            },
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub value: Real,
    pub stderr: Real,
}

impl Fitted {
    pub fn new(value: f64, stderr: f64) -> Self {
        Fitted { value: Real(value), stderr: Real(stderr) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<Real>,
    pub y: Vec<Real>,
}

impl Curve {
    pub fn new(x_label: &str, y_label: &str, x: &[f64], y: &[f64]) -> Self {
        Curve {
            x_label: x_label.into(),
            y_label: y_label.into(),
            x: x.iter().copied().map(Real).collect(),
            y: y.iter().copied().map(Real).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    AtMost,
    AtLeast,
    Within,
}

/// A single pass/fail condition with its observed value and tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub value: Real,
    pub comparator: Comparator,
    pub lower: Option<Real>,
    pub upper: Option<Real>,
    pub passed: bool,
}

impl Criterion {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Criterion {
            name: name.into(),
            value: Real(value),
            comparator: Comparator::AtMost,
            lower: None,
            upper: Some(Real(bound)),
            passed: value <= bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Criterion {
            name: name.into(),
            value: Real(value),
            comparator: Comparator::AtLeast,
            lower: Some(Real(bound)),
            upper: None,
            passed: value >= bound,
        }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Criterion {
            name: name.into(),
            value: Real(value),
            comparator: Comparator::Within,
            lower: Some(Real(lo)),
            upper: Some(Real(hi)),
            passed: value >= lo && value <= hi,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value;
        match (self.comparator, self.lower, self.upper) {
            (Comparator::AtMost, _, Some(u)) => write!(f, "{} = {v} <= {u}", self.name),
            (Comparator::AtLeast, Some(l), _) => write!(f, "{} = {v} >= {l}", self.name),
            (_, Some(l), Some(u)) => write!(f, "{} = {v} in [{l}, {u}]", self.name),
            _ => write!(f, "{} = {v}", self.name),
        }
    }
}

/// Result of one localized-phase check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub description: String,
    pub parameters: serde_json::Value,
    pub metrics: BTreeMap<String, Real>,
    pub fitted_constants: BTreeMap<String, Fitted>,
    pub curves: BTreeMap<String, Curve>,
    pub criteria: Vec<Criterion>,
    pub passed: bool,
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn new(check_id: &str, description: &str, parameters: serde_json::Value) -> Self {
        CheckReport {
            check_id: check_id.into(),
            description: description.into(),
            parameters,
            metrics: BTreeMap::new(),
            fitted_constants: BTreeMap::new(),
            curves: BTreeMap::new(),
            criteria: Vec::new(),
            passed: false,
            skipped: None,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.into(), Real(value));
        self
    }

    pub fn fitted(&mut self, name: &str, value: f64, stderr: f64) -> &mut Self {
        self.fitted_constants.insert(name.into(), Fitted::new(value, stderr));
        self
    }

    pub fn curve(&mut self, name: &str, curve: Curve) -> &mut Self {
        self.curves.insert(name.into(), curve);
        self
    }

    pub fn criterion(&mut self, c: Criterion) -> &mut Self {
        self.criteria.push(c);
        self
    }

    /// Sets `passed` from the criteria; a report with no criteria fails.
    pub fn finish(mut self) -> Self {
        self.passed = self.skipped.is_none() && !self.criteria.is_empty() && self.criteria.iter().all(|c| c.passed);
        self
    }

    pub fn skip(mut self, reason: &str) -> Self {
        self.skipped = Some(reason.into());
        self.passed = false;
        self
    }

    pub fn failed(&self) -> bool {
        self.skipped.is_none() && !self.passed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed_scheme: String,
    pub master_seed: u64,
    pub checks: Vec<CheckReport>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Report {
    pub fn new(master_seed: u64, checks: Vec<CheckReport>) -> Self {
        let skipped = checks.iter().filter(|c| c.skipped.is_some()).count();
        let passed = checks.iter().filter(|c| c.passed).count();
        Report {
            seed_scheme: crate::model::SEED_SCHEME.into(),
            master_seed,
            failed: checks.len() - skipped - passed,
            passed,
            skipped,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}
