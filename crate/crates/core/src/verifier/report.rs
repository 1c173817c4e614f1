use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            "inconclusive" => Ok(Status::Inconclusive),
            other => Err(Error::Parse(format!("unknown status '{other}'"))),
        }
    }
}

/// Outcome of one check on one input.
///
/// For inequalities `margin = rhs - lhs` and the check passes iff
/// `margin >= -tolerance`; for identities `margin = |lhs - rhs|` and it passes
/// iff `margin <= tolerance`. Ratio checks store the last ratio of a sequence
/// in `lhs` and the largest earlier ratio in `rhs`, with
/// `tolerance = 0.05 rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub dim: usize,
    pub family: String,
    #[serde(with = "super::nonfinite")]
    pub lhs: f64,
    #[serde(with = "super::nonfinite")]
    pub rhs: f64,
    #[serde(with = "super::nonfinite")]
    pub margin: f64,
    pub status: Status,
    #[serde(with = "super::nonfinite")]
    pub tolerance: f64,
    pub runtime_ms: u64,
}

/// Relative slack granted to explicit-constant inequalities.
pub const INEQUALITY_REL_SLACK: f64 = 1e-8;
/// Growth allowed between the last ratio and the running maximum.
pub const RATIO_SLACK: f64 = 0.05;

impl CheckReport {
    fn base(check_id: &str, dim: usize, family: &str) -> Self {
        CheckReport {
            check_id: check_id.to_string(),
            dim,
            family: family.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            status: Status::Inconclusive,
            tolerance: 0.0,
            runtime_ms: 0,
        }
    }

    /// `lhs <= rhs` up to `1e-8 scale + tol`, where `scale` is the magnitude
    /// of the quantities the two sides were computed from.
    pub(crate) fn inequality(check_id: &str, dim: usize, family: &str, lhs: f64, rhs: f64, scale: f64, tol: f64) -> Self {
        let tolerance = INEQUALITY_REL_SLACK * scale.abs().max(lhs.abs()).max(rhs.abs()) + tol;
        let margin = rhs - lhs;
        let status = if !margin.is_finite() {
            Status::Inconclusive
        } else if margin >= -tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            lhs,
            rhs,
            margin,
            status,
            tolerance,
            ..Self::base(check_id, dim, family)
        }
    }

    /// `|lhs - rhs| <= tol (1 + |rhs|)`.
    pub(crate) fn identity(check_id: &str, dim: usize, family: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let tolerance = tol * (1.0 + rhs.abs());
        let margin = (lhs - rhs).abs();
        let status = if !margin.is_finite() {
            Status::Inconclusive
        } else if margin <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            lhs,
            rhs,
            margin,
            status,
            tolerance,
            ..Self::base(check_id, dim, family)
        }
    }

    /// Boundedness of a ratio sequence: the last ratio may exceed the maximum
    /// of the earlier ones by at most 5%.
    pub(crate) fn ratio(check_id: &str, dim: usize, family: &str, ratios: &[f64]) -> Self {
        let Some((&last, prev)) = ratios.split_last() else {
            return Self::base(check_id, dim, family);
        };
        let running = prev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rhs = if prev.is_empty() { last } else { running };
        let tolerance = RATIO_SLACK * rhs.abs();
        let margin = rhs - last;
        let finite = ratios.iter().all(|r| r.is_finite());
        let status = if !finite {
            Status::Fail
        } else if margin >= -tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            lhs: last,
            rhs,
            margin,
            status,
            tolerance,
            ..Self::base(check_id, dim, family)
        }
    }

    pub(crate) fn inconclusive(check_id: &str, dim: usize, family: &str) -> Self {
        Self::base(check_id, dim, family)
    }

    pub(crate) fn failed(check_id: &str, dim: usize, family: &str) -> Self {
        CheckReport {
            status: Status::Fail,
            ..Self::base(check_id, dim, family)
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `margin` relative to the size of the compared quantities.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE)
    }

    /// Equality of everything except the runtime.
    pub fn same_outcome(&self, other: &CheckReport) -> bool {
        let bits = |a: f64, b: f64| a.to_bits() == b.to_bits();
        self.check_id == other.check_id
            && self.dim == other.dim
            && self.family == other.family
            && bits(self.lhs, other.lhs)
            && bits(self.rhs, other.rhs)
            && bits(self.margin, other.margin)
            && self.status == other.status
            && bits(self.tolerance, other.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_semantics() {
        assert!(CheckReport::inequality("x", 2, "", 1.0, 1.0 + 1e-12, 1.0, 0.0).passed());
        assert!(CheckReport::inequality("x", 2, "", 1.0 + 5e-9, 1.0, 1.0, 0.0).passed());
        assert!(!CheckReport::inequality("x", 2, "", 1.0 + 5e-8, 1.0, 1.0, 0.0).passed());
        let r = CheckReport::inequality("x", 2, "", f64::NAN, 1.0, 1.0, 0.0);
        assert_eq!(r.status, Status::Inconclusive);
    }

    #[test]
    fn identity_semantics() {
        assert!(CheckReport::identity("x", 2, "", 2.0, 2.0 + 1e-6, 1e-6).passed());
        assert!(!CheckReport::identity("x", 2, "", 2.0, 2.01, 1e-6).passed());
    }

    #[test]
    fn ratio_semantics() {
        assert!(CheckReport::ratio("x", 2, "", &[1.0, 1.2, 1.1, 1.25]).passed());
        assert!(!CheckReport::ratio("x", 2, "", &[1.0, 1.1, 1.3]).passed());
        assert!(!CheckReport::ratio("x", 2, "", &[1.0, f64::INFINITY]).passed());
    }
}
