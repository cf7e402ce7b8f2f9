//! Floating-point cross-checks of a certificate: limit cycles from Poincaré
//! return maps, critical points, and flow direction across circles.
//!
//! Nothing here is rigorous. Certificates never depend on the probe.

mod circle;
mod critical;
pub mod csv_out;
pub mod ode;
mod poincare;

use thiserror::Error;

use crate::exactalg::{nonnegative_roots_isolated, RatPoly};

pub use circle::{circle_transversality, Flow, Transversality};
pub use critical::{critical_points, resultant_degree, CriticalPoint, PointStatus};
pub use ode::{integrate, Field, Trajectory};
pub use poincare::{
    choose_section_angle, find_cycles, scan_cycles, time_reversed, CycleFinding, CycleScan, Displacement,
    Return, ReturnMap,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("trajectory escaped to r = {r} at t = {t}")]
    Escape { t: f64, r: f64 },
    #[error("no return to the section from r = {r0}")]
    NoReturn { r0: f64 },
    #[error("angular velocity vanished at the section near r = {r}")]
    SectionTangency { r: f64 },
    #[error("every candidate section ray meets a critical point")]
    NonTransversalSection,
    #[error("P and Q share a common factor; the resultant vanishes")]
    DegenerateResultant,
    #[error("{0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    /// Relative and absolute local error tolerance.
    pub tol: f64,
    /// Time limit for one return.
    pub t_max: f64,
    /// Number of displacement samples.
    pub samples: usize,
    /// Trajectories beyond `escape_factor · r_max` count as escaped.
    pub escape_factor: f64,
    /// Width at which bracketed fixed points stop being refined.
    pub root_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { tol: 1e-11, t_max: 400.0, samples: 400, escape_factor: 4.0, root_tol: 1e-8 }
    }
}

/// `2 · (1 + largest non-negative root of w)`, so the unbounded ring is probed.
pub fn default_r_max(w: &RatPoly) -> f64 {
    let largest = nonnegative_roots_isolated(w)
        .ok()
        .and_then(|roots| roots.last().cloned())
        .map(|iv| iv.refined(&crate::exactalg::rat::rat(1, 1 << 30)).approx())
        .unwrap_or(0.0);
    2.0 * (1.0 + largest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_search_radius() {
        let w = RatPoly::from_i64s(&[0, 0, -3, 0, 1]);
        assert!((default_r_max(&w) - 2.0 * (1.0 + 3f64.sqrt())).abs() < 1e-9);
        assert_eq!(default_r_max(&RatPoly::from_i64s(&[1, 0, 1])), 2.0);
    }
}
