//! Structured results of identity checks and their JSON / markdown forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Exact rational / rational-function equality.
    Exact,
    /// Floating-point residual against a tolerance.
    Numeric,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Stable identifier, e.g. `sphere.master.n7.N3`.
    pub id: String,
    /// Short name of the relation being verified.
    pub relation: String,
    pub params: BTreeMap<String, String>,
    pub mode: CheckMode,
    pub passed: bool,
    /// Scaled residual (numeric mode only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl CheckReport {
    pub fn exact(id: impl Into<String>, relation: impl Into<String>, passed: bool) -> Self {
        CheckReport {
            id: id.into(),
            relation: relation.into(),
            params: BTreeMap::new(),
            mode: CheckMode::Exact,
            passed,
            residual: None,
            tolerance: None,
            lhs: None,
            rhs: None,
            detail: None,
        }
    }

    /// Numeric check; passes iff `residual <= tolerance` (NaN fails).
    pub fn numeric(
        id: impl Into<String>,
        relation: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        CheckReport {
            mode: CheckMode::Numeric,
            residual: Some(residual),
            tolerance: Some(tolerance),
            ..Self::exact(id, relation, residual <= tolerance)
        }
    }

    /// Exact equality of two displayable values.
    pub fn equality<T: PartialEq + std::fmt::Display>(
        id: impl Into<String>,
        relation: impl Into<String>,
        lhs: &T,
        rhs: &T,
    ) -> Self {
        Self::exact(id, relation, lhs == rhs).with_sides(lhs, rhs)
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_sides(mut self, lhs: &impl std::fmt::Display, rhs: &impl std::fmt::Display) -> Self {
        self.lhs = Some(lhs.to_string());
        self.rhs = Some(rhs.to_string());
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// A failed report for an operation that errored before comparing.
    pub fn errored(id: impl Into<String>, relation: impl Into<String>, err: &crate::Error) -> Self {
        Self::exact(id, relation, false).with_detail(format!("error: {err}"))
    }
}

/// A batch of checks plus run metadata.
///
/// Everything except `timing` is a deterministic function of the run
/// configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantitiesReport {
    pub metadata: BTreeMap<String, String>,
    pub checks: Vec<CheckReport>,
    #[serde(default)]
    pub timing: Timing,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds since the Unix epoch at report creation.
    pub generated_at: u64,
    /// Wall-clock seconds per suite.
    pub suites: BTreeMap<String, f64>,
}

impl QuantitiesReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckReport>) {
        self.checks.extend(checks);
    }

    /// Sort checks by id, then parameters, so parallel execution gives a
    /// stable order.
    pub fn finalize(&mut self) {
        self.checks.sort_by(|a, b| (&a.id, &a.params).cmp(&(&b.id, &b.params)));
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Verification report\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "- **{k}**: {v}");
        }
        let _ = writeln!(
            out,
            "\n{} checks, {} passed, {} failed.\n",
            self.checks.len(),
            self.passed(),
            self.failed()
        );
        let _ = writeln!(out, "| id | relation | parameters | mode | residual | tolerance | result |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for c in &self.checks {
            let params = c
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(", ");
            let fmt_opt = |x: Option<f64>| x.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                c.id,
                c.relation,
                params,
                match c.mode {
                    crate::report::CheckMode::Exact => "exact",
                    crate::report::CheckMode::Numeric => "numeric",
                },
                fmt_opt(c.residual),
                fmt_opt(c.tolerance),
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_skeleton() {
        let r = QuantitiesReport::new();
        let json = r.to_json();
        let back = QuantitiesReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert!(r.all_passed());
        assert!(r.to_markdown().contains("| id | relation |"));
    }

    #[test]
    fn one_row_per_check() {
        let mut r = QuantitiesReport::new();
        r.extend([
            CheckReport::numeric("b", "rel", 1e-9, 1e-6).param("n", 4),
            CheckReport::exact("a", "rel", false),
        ]);
        r.finalize();
        assert_eq!(r.checks[0].id, "a");
        assert_eq!(r.failed(), 1);
        let md = r.to_markdown();
        assert_eq!(md.lines().filter(|l| l.starts_with("| a ") || l.starts_with("| b ")).count(), 2);
        assert!(md.contains("n=4"));
        assert!(!CheckReport::numeric("x", "r", f64::NAN, 1.0).passed);
    }
}
