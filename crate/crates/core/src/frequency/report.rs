use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Not evaluated, e.g. because the frequency is undefined at the radius.
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skip",
        }
    }
}

/// Outcome of one check. `margin = rhs - lhs`; the check passes when
/// `margin >= -tolerance`. Identities are recorded as `lhs = |a - b|`,
/// `rhs = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub status: Status,
    pub radius: Option<f64>,
    pub metadata: Vec<(String, f64)>,
    pub note: String,
}

impl VerificationReport {
    /// The inequality `lhs <= rhs` up to `tolerance`.
    pub fn inequality(check: &str, lhs: f64, rhs: f64, tolerance: f64) -> VerificationReport {
        let margin = rhs - lhs;
        let status = if margin >= -tolerance { Status::Pass } else { Status::Fail };
        VerificationReport {
            check: check.to_string(),
            lhs,
            rhs,
            margin,
            tolerance,
            status,
            radius: None,
            metadata: Vec::new(),
            note: String::new(),
        }
    }

    /// The identity `a = b` up to `tolerance`.
    pub fn identity(check: &str, a: f64, b: f64, tolerance: f64) -> VerificationReport {
        VerificationReport::inequality(check, math::abs(a - b), 0.0, tolerance)
            .with_meta("lhs_value", a)
            .with_meta("rhs_value", b)
    }

    pub fn skipped(check: &str, note: impl Into<String>) -> VerificationReport {
        VerificationReport {
            status: Status::Skipped,
            note: note.into(),
            ..VerificationReport::inequality(check, f64::NAN, f64::NAN, 0.0)
        }
    }

    pub fn failed(check: &str, note: impl Into<String>) -> VerificationReport {
        VerificationReport { status: Status::Fail, ..VerificationReport::skipped(check, note) }
    }

    pub fn at(mut self, r: f64) -> VerificationReport {
        self.radius = Some(r);
        self
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> VerificationReport {
        self.metadata.push((key.to_string(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> VerificationReport {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed_check(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn meta(&self, key: &str) -> Option<f64> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}
