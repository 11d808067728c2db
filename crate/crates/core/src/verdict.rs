use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Inside,
    Boundary,
    Outside,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Inside => "inside",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        }
    }

    /// Signed code used in dense grids: 1 inside, 0 boundary, -1 outside.
    pub fn code(self) -> i8 {
        match self {
            Region::Inside => 1,
            Region::Boundary => 0,
            Region::Outside => -1,
        }
    }
}

/// Region classification with a signed margin.
///
/// `margin` is the smallest normalized slack over all active conditions;
/// negative means violated. `violated` lists the identifiers of every
/// condition with a negative slack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T> {
    pub region: Region,
    pub margin: T,
    pub violated: Vec<String>,
    /// Set when `B` was too small to rescale by `sqrt(B)` and interlacing was
    /// checked on the unscaled critical points.
    pub degenerate_scaling: bool,
}

impl<T: Scalar> Verdict<T> {
    /// Builds a verdict from named, already normalized slacks.
    pub fn from_slacks(slacks: &[Slack<T>], boundary_tol: f64) -> Self {
        let margin = slacks
            .iter()
            .map(|s| s.value)
            .fold(T::infinity(), |a, b| if b < a || b.is_nan() { b } else { a });
        let margin = if margin.is_infinite() { T::zero() } else { margin };
        let violated = slacks
            .iter()
            .filter(|s| s.value < T::zero() || s.value.is_nan())
            .map(|s| s.name.to_string())
            .collect();
        Self {
            region: region_of(margin, boundary_tol),
            margin,
            violated,
            degenerate_scaling: false,
        }
    }
}

pub(crate) fn region_of<T: Scalar>(margin: T, boundary_tol: f64) -> Region {
    if margin.is_nan() {
        Region::Outside
    } else if margin.abs() <= T::lit(boundary_tol) {
        Region::Boundary
    } else if margin > T::zero() {
        Region::Inside
    } else {
        Region::Outside
    }
}

/// One normalized inequality slack.
#[derive(Debug, Clone, PartialEq)]
pub struct Slack<T> {
    pub name: String,
    pub value: T,
}

impl<T> Slack<T> {
    pub fn new(name: impl Into<String>, value: T) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_slack_decides() {
        let v = Verdict::from_slacks(
            &[Slack::new("a", 0.5f64), Slack::new("b", -0.25), Slack::new("c", 2.0)],
            1e-9,
        );
        assert_eq!(v.region, Region::Outside);
        assert_eq!(v.margin, -0.25);
        assert_eq!(v.violated, vec!["b".to_string()]);
    }

    #[test]
    fn boundary_band() {
        let v = Verdict::from_slacks(&[Slack::new("a", 5e-10f64)], 1e-9);
        assert_eq!(v.region, Region::Boundary);
        assert!(v.violated.is_empty());
        let v = Verdict::from_slacks(&[Slack::new("a", -5e-10f64)], 1e-9);
        assert_eq!(v.region, Region::Boundary);
        assert_eq!(v.violated.len(), 1);
    }
}
