//! Acceptance criteria, each checked against an independent oracle or a
//! published closed form.

mod criteria;
pub mod oracle;

use std::fmt::Write;
use std::time::{Duration, Instant};

pub use criteria::CRITERIA;

/// Accumulates individual comparisons for one criterion.
#[derive(Debug, Default)]
pub struct Checker {
    checks: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Checker {
    /// `|got − want| ≤ tol`.
    pub fn close(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        self.checks += 1;
        let err = (got - want).abs();
        if err.is_nan() || err > tol {
            self.failures
                .push(format!("{}: got {got}, want {want} (tol {tol:e})", label()));
        } else {
            self.worst = self.worst.max(err);
        }
    }

    /// `got ≤ bound + tol`.
    pub fn at_most(&mut self, label: impl FnOnce() -> String, got: f64, bound: f64, tol: f64) {
        self.checks += 1;
        if got.is_nan() || got > bound + tol {
            self.failures
                .push(format!("{}: {got} exceeds {bound} (tol {tol:e})", label()));
        }
    }

    pub fn holds(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.failures.push(msg);
    }

    fn summary(&self) -> String {
        match self.failures.first() {
            None => format!("{} checks, max error {:.1e}", self.checks, self.worst),
            Some(first) => format!(
                "{} of {} checks failed; first: {first}",
                self.failures.len(),
                self.checks
            ),
        }
    }
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    /// Wall-clock budget, when the criterion states one.
    pub budget: Option<Duration>,
    pub check: fn(&mut Checker),
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        );
        s
    }
}

pub fn run_criterion(c: &Criterion) -> CriterionResult {
    let mut checker = Checker::default();
    let start = Instant::now();
    (c.check)(&mut checker);
    let elapsed = start.elapsed();
    let mut detail = checker.summary();
    let mut passed = checker.failures.is_empty() && checker.checks > 0;
    if let Some(budget) = c.budget {
        if elapsed > budget {
            passed = false;
            detail.push_str(&format!("; exceeded time budget of {:.0} s", budget.as_secs_f64()));
        }
    }
    CriterionResult {
        id: c.id,
        title: c.title,
        passed,
        detail,
        elapsed,
    }
}

pub fn run_suite() -> Vec<CriterionResult> {
    CRITERIA.iter().map(run_criterion).collect()
}
