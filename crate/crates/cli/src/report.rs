use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Envelope for every command's output.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Value,
    pub outputs: Value,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed − expected| ≤ tolerance`
    Eq,
    /// `computed ≥ expected`
    AtLeast,
}

/// One comparison of a computed value against its closed form.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub example: String,
    pub m: usize,
    pub d: usize,
    pub check: String,
    pub computed: f64,
    pub expected: f64,
    /// Closed form of `expected`, e.g. `2/3`.
    pub expected_label: String,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    pub fn eq(example: &str, (m, d): (usize, usize), check: impl Into<String>, computed: f64, expected: f64, label: impl Into<String>, tolerance: f64) -> Self {
        Self {
            example: example.into(),
            m,
            d,
            check: check.into(),
            computed,
            expected,
            expected_label: label.into(),
            relation: Relation::Eq,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    pub fn at_least(example: &str, (m, d): (usize, usize), check: impl Into<String>, computed: f64, bound: f64) -> Self {
        Self {
            example: example.into(),
            m,
            d,
            check: check.into(),
            computed,
            expected: bound,
            expected_label: format!(">= {bound:e}"),
            relation: Relation::AtLeast,
            tolerance: 0.0,
            pass: computed >= bound,
        }
    }

    pub fn flag(example: &str, md: (usize, usize), check: impl Into<String>, value: bool) -> Self {
        Self::eq(example, md, check, f64::from(u8::from(value)), 1.0, "true", 0.0)
    }
}

pub fn rows_table(rows: &[Row]) -> String {
    let check_w = rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
    let label_w = rows.iter().map(|r| r.expected_label.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<13} {:>2} {:>2}  {:<check_w$}  {:>14}  {:<label_w$}  result", "example", "m", "d", "check", "computed", "expected");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<13} {:>2} {:>2}  {:<check_w$}  {:>14.6}  {:<label_w$}  {}",
            r.example,
            r.m,
            r.d,
            r.check,
            r.computed,
            r.expected_label,
            if r.pass { "ok" } else { "MISMATCH" }
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} checks, {} mismatches", rows.len(), failed);
    out
}

/// `a/b` in lowest terms.
pub fn fraction(a: u64, b: u64) -> String {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(a, b).max(1);
    if b / g == 1 {
        format!("{}", a / g)
    } else {
        format!("{}/{}", a / g, b / g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_reduce() {
        assert_eq!(fraction(4, 6), "2/3");
        assert_eq!(fraction(8, 10), "4/5");
        assert_eq!(fraction(3, 3), "1");
        assert_eq!(fraction(0, 5), "0");
    }

    #[test]
    fn row_relations() {
        assert!(Row::eq("x", (2, 2), "c", 0.5, 0.5 + 1e-12, "1/2", 1e-9).pass);
        assert!(!Row::eq("x", (2, 2), "c", 0.5, 0.6, "3/5", 1e-9).pass);
        assert!(Row::at_least("x", (2, 2), "c", 0.2, 1e-3).pass);
        assert!(!Row::flag("x", (2, 2), "c", false).pass);
    }
}
