//! Direction of the flow across a circle `x² + y² = r²`.

use serde::Serialize;

use crate::bipoly::SystemSpec;
use crate::exactalg::rat::to_f64;
use crate::exactalg::Rat;
use crate::polarize::to_polar;

use super::ProbeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flow {
    Inward,
    Outward,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transversality {
    pub flow: Flow,
    /// Decided by the exact L1 test rather than by sampling.
    pub rigorous: bool,
}

const SAMPLES: usize = 4096;

/// Sign of `ṙ = R(r, θ)` on the circle of radius `r`. The exact Fourier
/// coefficients of `R(r, ·)` decide it when `|a₀|` exceeds the sum of the
/// harmonic magnitudes; otherwise dense sampling gives a non-rigorous answer.
pub fn circle_transversality(sys: &SystemSpec, r: &Rat) -> Result<Transversality, ProbeError> {
    if *r <= Rat::from_integer(0.into()) {
        return Err(ProbeError::InvalidArgument("radius must be positive".into()));
    }
    let ps = to_polar(sys).map_err(|e| ProbeError::InvalidArgument(e.to_string()))?;
    let slice = ps.r_dot.at_radius(r);
    let zero = Rat::from_integer(0.into());
    if slice.l1_majorant() < zero {
        return Ok(Transversality { flow: Flow::Inward, rigorous: true });
    }
    if slice.l1_minorant() > zero {
        return Ok(Transversality { flow: Flow::Outward, rigorous: true });
    }
    let rf = to_f64(r);
    let (mut neg, mut pos) = (false, false);
    for i in 0..SAMPLES {
        let theta = std::f64::consts::TAU * i as f64 / SAMPLES as f64;
        let v = ps.r_dot.eval_f64(rf, theta);
        neg |= v < 0.0;
        pos |= v > 0.0;
    }
    let flow = match (neg, pos) {
        (true, false) => Flow::Inward,
        (false, true) => Flow::Outward,
        _ => Flow::Mixed,
    };
    Ok(Transversality { flow, rigorous: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::exactalg::rat::{int, rat};
    use crate::exactalg::RatPoly;
    use crate::polarize::rotational_system;

    #[test]
    fn rotational_circles() {
        let sys = rotational_system(&RatPoly::from_i64s(&[1, 0, -1]), &RatPoly::one());
        let t = circle_transversality(&sys, &int(2)).unwrap();
        assert_eq!(t, Transversality { flow: Flow::Inward, rigorous: true });
        let t = circle_transversality(&sys, &rat(1, 2)).unwrap();
        assert_eq!(t, Transversality { flow: Flow::Outward, rigorous: true });
    }

    #[test]
    fn worked_system_near_root_of_w() {
        let sys = corpus::system_1_3();
        // inside the inner cycle the flow points out, beyond the outer one it points out too
        let inner = circle_transversality(&sys, &rat(1, 2)).unwrap();
        assert_eq!(inner.flow, Flow::Outward);
        let far = circle_transversality(&sys, &int(3)).unwrap();
        assert_eq!(far.flow, Flow::Outward);
        // √(79/32) ≈ 1.5712 sits between the two cycles, where the flow points in
        let mid = circle_transversality(&sys, &rat(15712, 10000)).unwrap();
        assert_eq!(mid.flow, Flow::Inward);
    }
}
