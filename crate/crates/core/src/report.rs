//! Shared result records: extended reals and condition reports.

use serde::{Serialize, Serializer};

use crate::geom::{Ball, Point};

/// A nonnegative quantity that may be infinite. Divergence is an answer, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Divergent,
}

impl Extended {
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            Extended::Finite(v)
        } else {
            Extended::Divergent
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn is_divergent(&self) -> bool {
        !self.is_finite()
    }

    /// Finite value or `+inf`.
    pub fn value(&self) -> f64 {
        match self {
            Extended::Finite(v) => *v,
            Extended::Divergent => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(*v),
            Extended::Divergent => None,
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Where a grid supremum (or infimum) was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extremal {
    None,
    Radius { r: f64 },
    Pair { r: f64, t: f64 },
    Ball { center: Point, radius: f64 },
    CenterRadius { center: Point, r: f64 },
}

impl From<Ball> for Extremal {
    fn from(b: Ball) -> Self {
        Extremal::Ball {
            center: b.center,
            radius: b.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: String,
    pub holds: bool,
    pub empirical_c: Extended,
    pub extremal: Extremal,
    pub stable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Per-grid-point values `(parameter, value)` behind the supremum, when kept.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<(f64, f64)>,
}

impl ConditionReport {
    pub fn new(
        id: impl Into<String>,
        holds: bool,
        empirical_c: Extended,
        extremal: Extremal,
        stable: bool,
    ) -> Self {
        let holds = holds && empirical_c.is_finite();
        ConditionReport {
            id: id.into(),
            holds,
            empirical_c,
            extremal,
            stable,
            note: None,
            profile: Vec::new(),
        }
    }

    pub fn with_profile(mut self, profile: Vec<(f64, f64)>) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_serializes() {
        assert_eq!(
            serde_json::to_string(&Extended::Finite(1.5)).unwrap(),
            "1.5"
        );
        assert_eq!(
            serde_json::to_string(&Extended::Divergent).unwrap(),
            "\"divergent\""
        );
        assert!(Extended::from_f64(f64::INFINITY).is_divergent());
    }

    #[test]
    fn holds_implies_finite() {
        let r = ConditionReport::new("x", true, Extended::Divergent, Extremal::None, true);
        assert!(!r.holds);
    }
}
