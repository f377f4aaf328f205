//! One row of a verification report.

use serde_json::{json, Value};

/// Acceptance rule of a check.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    /// `value <= tol`, where `tol` already carries the run's tolerance scale.
    AtMost(f64),
    /// `lo <= value <= hi`; not scaled.
    Within(f64, f64),
    /// Exact property, decided by the suite.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Descriptive tag of the relation being checked, or `plumbing`.
    pub anchor: &'static str,
    pub value: Option<f64>,
    pub bound: Bound,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, anchor: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            anchor,
            value: Some(value),
            bound: Bound::AtMost(tol),
            pass: value.is_finite() && value <= tol,
            note: None,
        }
    }

    pub fn within(
        name: impl Into<String>,
        anchor: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Self {
            name: name.into(),
            anchor,
            value: Some(value),
            bound: Bound::Within(lo, hi),
            pass: (lo..=hi).contains(&value),
            note: None,
        }
    }

    /// An exact property; `value` is a violation count or an exact residual, when one exists.
    pub fn exact(
        name: impl Into<String>,
        anchor: &'static str,
        ok: bool,
        value: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            anchor,
            value,
            bound: Bound::Exact,
            pass: ok,
            note: None,
        }
    }

    /// Exact check on a violation count.
    pub fn count(name: impl Into<String>, anchor: &'static str, violations: usize) -> Self {
        Self::exact(name, anchor, violations == 0, Some(violations as f64))
    }

    /// A check that could not be evaluated.
    pub fn error(
        name: impl Into<String>,
        anchor: &'static str,
        err: impl std::fmt::Display,
    ) -> Self {
        Self {
            name: name.into(),
            anchor,
            value: None,
            bound: Bound::Exact,
            pass: false,
            note: Some(err.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn tolerance_json(&self) -> Value {
        match self.bound {
            Bound::AtMost(t) => json!(t),
            Bound::Within(lo, hi) => json!([lo, hi]),
            Bound::Exact => json!(0),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "anchor": self.anchor,
            "value": self.value.filter(|v| v.is_finite()),
            "tolerance": self.tolerance_json(),
            "pass": self.pass,
            "note": self.note,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Check::at_most("a", "plumbing", 1e-9, 1e-8).pass);
        assert!(!Check::at_most("a", "plumbing", f64::NAN, 1e-8).pass);
        assert!(!Check::within("r", "plumbing", 4.6, 3.5, 4.5).pass);
        assert!(!Check::count("c", "plumbing", 2).pass);
        let j = Check::within("r", "plumbing", 4.0, 3.5, 4.5).to_json();
        assert_eq!(j["tolerance"], json!([3.5, 4.5]));
        assert_eq!(
            Check::error("e", "plumbing", "boom").to_json()["value"],
            Value::Null
        );
    }
}
