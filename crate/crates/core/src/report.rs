//! Verification records shared by every check.
//!
//! Each check is stated as `lhs <= rhs` up to an additive slack budget; the
//! achieved slack is `rhs - lhs` and the check passes when it is at least
//! `-slack_budget`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The inequality being checked, written out as a formula.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack_budget: f64,
    pub achieved_slack: f64,
    pub passed: bool,
    /// For checks that are meant to fail (counterexamples).
    pub expected_fail: bool,
    pub witness: Option<String>,
    pub seeds: Vec<u64>,
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn new(name: &str, anchor: &str, lhs: f64, rhs: f64, slack_budget: f64) -> Self {
        let achieved = rhs - lhs;
        CheckResult {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            slack_budget,
            achieved_slack: achieved,
            passed: achieved >= -slack_budget,
            expected_fail: false,
            witness: None,
            seeds: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// A check whose outcome is a boolean rather than an inequality.
    pub fn flag(name: &str, anchor: &str, ok: bool) -> Self {
        let mut c = CheckResult::new(name, anchor, 0.0, if ok { 0.0 } else { -1.0 }, 0.0);
        c.passed = ok;
        c
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expected_fail = true;
        self
    }

    /// Whether the outcome matches what the check expects.
    pub fn as_expected(&self) -> bool {
        self.passed != self.expected_fail
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// True when every check behaved as expected.
    pub fn all_as_expected(&self) -> bool {
        self.checks.iter().all(CheckResult::as_expected)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.as_expected())
    }

    /// The check with the smallest achieved slack relative to its budget.
    pub fn tightest(&self) -> Option<&CheckResult> {
        self.checks.iter().min_by(|a, b| {
            (a.achieved_slack + a.slack_budget).total_cmp(&(b.achieved_slack + b.slack_budget))
        })
    }

    /// One CSV row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "name,anchor,lhs,rhs,slack_budget,achieved_slack,passed,expected_fail,witness\n",
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{:?},{:?},{:?},{:?},{},{},{}\n",
                csv_field(&c.name),
                csv_field(&c.anchor),
                c.lhs,
                c.rhs,
                c.slack_budget,
                c.achieved_slack,
                c.passed,
                c.expected_fail,
                csv_field(c.witness.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_sign_convention() {
        let ok = CheckResult::new("a", "x <= y", 1.0, 2.0, 0.0);
        assert!(ok.passed);
        assert_eq!(ok.achieved_slack, 1.0);
        let close = CheckResult::new("b", "x <= y", 2.05, 2.0, 0.1);
        assert!(close.passed);
        let bad = CheckResult::new("c", "x <= y", 3.0, 2.0, 0.1);
        assert!(!bad.passed);
        assert!(bad.clone().expecting_failure().as_expected());
    }

    #[test]
    fn csv_quotes_commas() {
        let mut r = VerificationReport::new();
        r.push(CheckResult::new("a", "f(x, y) <= 1", 0.0, 1.0, 0.0));
        assert!(r.to_csv().contains("\"f(x, y) <= 1\""));
    }
}
