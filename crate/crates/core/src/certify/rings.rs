//! Components of the plane minus the circles `{w(r) = 0}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::rat::{format_rat, rat_serde, to_f64};
use crate::exactalg::{nonnegative_roots_isolated, Rat, RatPoly, RootInterval};

/// A boundary radius: an exact value, an isolating interval for an
/// irrational root of `w`, or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Radius {
    Exact {
        #[serde(with = "rat_serde")]
        value: Rat,
    },
    Interval {
        #[serde(with = "rat_serde")]
        lo: Rat,
        #[serde(with = "rat_serde")]
        hi: Rat,
    },
    Infinity,
}

impl Radius {
    fn from_root(iv: &RootInterval) -> Self {
        if iv.is_exact() {
            Radius::Exact { value: iv.lo.clone() }
        } else {
            Radius::Interval { lo: iv.lo.clone(), hi: iv.hi.clone() }
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Radius::Infinity)
    }

    pub fn approx(&self) -> f64 {
        match self {
            Radius::Exact { value } => to_f64(value),
            Radius::Interval { lo, hi } => 0.5 * (to_f64(lo) + to_f64(hi)),
            Radius::Infinity => f64::INFINITY,
        }
    }

    /// Largest rational certainly not above the radius.
    pub fn lower(&self) -> Option<&Rat> {
        match self {
            Radius::Exact { value } => Some(value),
            Radius::Interval { lo, .. } => Some(lo),
            Radius::Infinity => None,
        }
    }

    /// Smallest rational certainly not below the radius.
    pub fn upper(&self) -> Option<&Rat> {
        match self {
            Radius::Exact { value } => Some(value),
            Radius::Interval { hi, .. } => Some(hi),
            Radius::Infinity => None,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Exact { value } => write!(f, "{}", format_rat(value)),
            Radius::Interval { lo, hi } => write!(f, "~{:.10}", 0.5 * (to_f64(lo) + to_f64(hi))),
            Radius::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WSign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclePrediction {
    /// Simply connected component.
    None,
    AtMostOne,
    ExactlyOneIfNoCriticalPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn from_w_sign(s: WSign) -> Self {
        match s {
            WSign::Negative => Stability::Stable,
            WSign::Positive => Stability::Unstable,
        }
    }
}

/// One component of `ℝ² \ {w(r) = 0}`. `index` 0 is the disc around the
/// origin (present only when `w(0) ≠ 0`); rings are numbered from 1 outwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub index: usize,
    pub inner_radius: Radius,
    pub outer_radius: Radius,
    pub w_sign: WSign,
    #[serde(with = "rat_serde")]
    pub sample: Rat,
    pub contains_critical_points: Membership,
    pub cycle_prediction: CyclePrediction,
    pub stability_if_exists: Option<Stability>,
}

impl RingReport {
    pub fn is_disc(&self) -> bool {
        self.index == 0
    }

    pub fn is_bounded(&self) -> bool {
        !self.outer_radius.is_infinite()
    }

    /// Whether the point at distance `rho` from the origin lies in the open
    /// component. Points within the enclosure of a boundary count as inside
    /// so that membership errs towards `yes`.
    pub fn contains_radius(&self, rho: f64) -> bool {
        let lo = match &self.inner_radius {
            Radius::Exact { value } if self.is_disc() && value.is_zero() => -1.0,
            r => r.lower().map(to_f64).unwrap_or(0.0),
        };
        let hi = self.outer_radius.upper().map(to_f64).unwrap_or(f64::INFINITY);
        match &self.inner_radius {
            Radius::Exact { .. } => rho > lo && rho <= hi,
            _ => rho >= lo && rho <= hi,
        }
    }

    /// A cycle is guaranteed in this ring.
    pub fn cycle_guaranteed(&self) -> bool {
        self.cycle_prediction == CyclePrediction::ExactlyOneIfNoCriticalPoints
            && self.contains_critical_points == Membership::No
    }
}

/// Ring decomposition of the plane by the non-negative roots of `w`.
pub fn ring_decomposition(w: &RatPoly) -> Vec<RingReport> {
    let width = Rat::new(BigInt::one(), BigInt::one() << 40usize);
    let roots: Vec<RootInterval> =
        nonnegative_roots_isolated(w).unwrap_or_default().into_iter().map(|iv| iv.refined(&width)).collect();
    let m_plus = roots.len();

    let mut bounds: Vec<Radius> = Vec::with_capacity(m_plus + 2);
    let has_disc = !w.coeff(0).is_zero();
    if has_disc {
        bounds.push(Radius::Exact { value: Rat::zero() });
    }
    bounds.extend(roots.iter().map(Radius::from_root));
    bounds.push(Radius::Infinity);

    let mut out = Vec::with_capacity(bounds.len() - 1);
    for (n, pair) in bounds.windows(2).enumerate() {
        let (inner, outer) = (&pair[0], &pair[1]);
        let index = if has_disc { n } else { n + 1 };
        let sample = interior_sample(inner, outer);
        let value = w.eval(&sample);
        debug_assert!(!value.is_zero());
        let w_sign = if value.is_negative() { WSign::Negative } else { WSign::Positive };
        let (cycle_prediction, stability_if_exists) = if index == 0 {
            (CyclePrediction::None, None)
        } else if index >= 2 && !outer.is_infinite() {
            (CyclePrediction::ExactlyOneIfNoCriticalPoints, Some(Stability::from_w_sign(w_sign)))
        } else {
            (CyclePrediction::AtMostOne, Some(Stability::from_w_sign(w_sign)))
        };
        out.push(RingReport {
            index,
            inner_radius: inner.clone(),
            outer_radius: outer.clone(),
            w_sign,
            sample,
            contains_critical_points: Membership::Unknown,
            cycle_prediction,
            stability_if_exists,
        });
    }
    out
}

// Rational strictly between the enclosures of two consecutive boundaries.
fn interior_sample(inner: &Radius, outer: &Radius) -> Rat {
    let lo = inner.upper().cloned().unwrap_or_else(Rat::zero);
    match outer.lower() {
        Some(hi) => (&lo + hi) / Rat::from_integer(2.into()),
        None => lo + Rat::one(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::{int, rat};

    #[test]
    fn worked_system_rings() {
        let w = RatPoly::new(vec![int(0), int(0), rat(-79, 16), int(0), int(2)]);
        let rings = ring_decomposition(&w);
        assert_eq!(rings.len(), 2);
        let r0 = (79.0f64 / 32.0).sqrt();
        assert_eq!(rings[0].index, 1);
        assert_eq!(rings[0].inner_radius, Radius::Exact { value: int(0) });
        assert!((rings[0].outer_radius.approx() - r0).abs() < 1e-10);
        assert_eq!(rings[0].w_sign, WSign::Negative);
        assert_eq!(rings[0].stability_if_exists, Some(Stability::Stable));
        assert_eq!(rings[1].w_sign, WSign::Positive);
        assert_eq!(rings[1].stability_if_exists, Some(Stability::Unstable));
        assert!(rings[1].outer_radius.is_infinite());
        assert_eq!(rings[0].outer_radius, rings[1].inner_radius);
    }

    #[test]
    fn example_4_rings() {
        let w = RatPoly::from_i64s(&[0, 0, -11, 0, 12, 0, -3]);
        let rings = ring_decomposition(&w);
        assert_eq!(rings.len(), 3);
        let a = (2.0 - 3f64.sqrt() / 3.0).sqrt();
        let b = (2.0 + 3f64.sqrt() / 3.0).sqrt();
        assert!((rings[0].outer_radius.approx() - a).abs() < 1e-10);
        assert!((rings[1].outer_radius.approx() - b).abs() < 1e-10);
        assert_eq!(
            rings.iter().map(|r| r.w_sign).collect::<Vec<_>>(),
            [WSign::Negative, WSign::Positive, WSign::Negative]
        );
        assert_eq!(rings[1].cycle_prediction, CyclePrediction::ExactlyOneIfNoCriticalPoints);
        assert_eq!(rings[0].cycle_prediction, CyclePrediction::AtMostOne);
        assert_eq!(rings[2].cycle_prediction, CyclePrediction::AtMostOne);
    }

    #[test]
    fn disc_when_w_nonzero_at_origin() {
        let rings = ring_decomposition(&RatPoly::from_i64s(&[-1, 0, 1]));
        assert_eq!(rings.len(), 2);
        assert!(rings[0].is_disc());
        assert_eq!(rings[0].cycle_prediction, CyclePrediction::None);
        assert_eq!(rings[0].stability_if_exists, None);
        assert_eq!(rings[1].index, 1);
        assert_eq!(rings[1].inner_radius, Radius::Exact { value: int(1) });
        assert_eq!(rings[1].w_sign, WSign::Positive);
        assert!(rings[0].contains_radius(0.0));
        assert!(!rings[1].contains_radius(1.0));
    }

    #[test]
    fn membership_by_radius() {
        let w = RatPoly::from_i64s(&[0, 0, -11, 0, 12, 0, -3]);
        let rings = ring_decomposition(&w);
        assert!(!rings[0].contains_radius(0.0));
        assert!(rings[0].contains_radius(0.5));
        assert!(rings[1].contains_radius(1.414));
        assert!(rings[2].contains_radius(100.0));
    }
}
