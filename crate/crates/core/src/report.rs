use std::fmt;

use crate::qcalc::Scalar;
use crate::sparse::SparseOperator;

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check: String,
    /// Largest absolute entry of the residual; exactly 0 for an exact pass.
    pub max_violation: f64,
    pub passed: bool,
    /// Number of entries, columns or configurations examined.
    pub checked: usize,
    pub note: String,
}

impl CheckReport {
    /// Exact check: passes iff the residual vanishes identically.
    pub fn exact(check: impl Into<String>, residual_is_zero: bool, max_violation: f64, checked: usize) -> Self {
        Self {
            check: check.into(),
            max_violation,
            passed: residual_is_zero,
            checked,
            note: String::new(),
        }
    }

    /// Floating check against an absolute tolerance.
    pub fn within(check: impl Into<String>, max_violation: f64, tol: f64, checked: usize) -> Self {
        Self {
            check: check.into(),
            max_violation,
            passed: max_violation <= tol,
            checked,
            note: String::new(),
        }
    }

    pub fn skipped(check: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            max_violation: 0.0,
            passed: true,
            checked: 0,
            note: format!("skipped: {}", why.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.note.starts_with("skipped")
    }

    /// Merge several reports into one (all must pass).
    pub fn combine(check: impl Into<String>, parts: &[CheckReport]) -> Self {
        let failed: Vec<&str> = parts.iter().filter(|p| !p.passed).map(|p| p.check.as_str()).collect();
        Self {
            check: check.into(),
            max_violation: parts.iter().map(|p| p.max_violation).fold(0.0, f64::max),
            passed: failed.is_empty(),
            checked: parts.iter().map(|p| p.checked).sum(),
            note: if failed.is_empty() { String::new() } else { format!("failed: {}", failed.join(";")) },
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (max violation {:e}, {} checked)",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            self.max_violation,
            self.checked
        )?;
        if !self.note.is_empty() {
            write!(f, " [{}]", self.note)?;
        }
        Ok(())
    }
}

/// Compare two operators: exact equality for exact scalars, a relative
/// `1e-9` tolerance for floats.
pub fn operator_equality<S: Scalar>(check: impl Into<String>, a: &SparseOperator<S>, b: &SparseOperator<S>) -> CheckReport {
    let d = a.sub(b);
    let v = d.max_abs();
    let checked = a.nnz().max(b.nnz());
    if S::EXACT {
        CheckReport::exact(check, d.is_zero(), v, checked)
    } else {
        let scale = a.max_abs().max(b.max_abs()).max(1.0);
        CheckReport::within(check, v, 1e-9 * scale, checked)
    }
}

/// Compare two vectors with the same policy as [`operator_equality`].
pub fn vector_equality<S: Scalar>(check: impl Into<String>, a: &[S], b: &[S]) -> CheckReport {
    assert_eq!(a.len(), b.len());
    let mut v: f64 = 0.0;
    let mut zero = true;
    let mut scale: f64 = 1.0;
    for (x, y) in a.iter().zip(b) {
        let d = x.clone() - y.clone();
        if !d.is_zero() {
            zero = false;
        }
        v = v.max(d.abs().as_f64());
        scale = scale.max(x.abs().as_f64()).max(y.abs().as_f64());
    }
    if S::EXACT {
        CheckReport::exact(check, zero, v, a.len())
    } else {
        CheckReport::within(check, v, 1e-9 * scale, a.len())
    }
}
