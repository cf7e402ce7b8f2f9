//! Polar form `ṙ = R(r, θ)`, `θ̇ = Θ(r, θ)` of a planar system and its
//! θ-averaged radial polynomial.

use thiserror::Error;

use crate::bipoly::{BiPoly, BiPolyError, SystemSpec};
use crate::exactalg::RatPoly;
use crate::trigpoly::TrigRadialPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarizeError {
    #[error(transparent)]
    OriginNotSingular(#[from] BiPolyError),
    /// The θ-mean of `R/r` had an odd power of `r`; this is an arithmetic
    /// bug, never a property of the input.
    #[error("odd radial power in the averaged R/r")]
    OddPowerResidue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarSystem {
    /// `R = P cos θ + Q sin θ`
    pub r_dot: TrigRadialPoly,
    /// `Θ = (Q cos θ − P sin θ) / r`
    pub theta_dot: TrigRadialPoly,
    /// Total degree of the cartesian system.
    pub degree: u32,
}

pub fn to_polar(sys: &SystemSpec) -> Result<PolarSystem, PolarizeError> {
    if sys.p().terms().any(|(e, _)| *e == (0, 0)) || sys.q().terms().any(|(e, _)| *e == (0, 0)) {
        return Err(BiPolyError::OriginNotSingular.into());
    }
    let p = TrigRadialPoly::from_cartesian(sys.p());
    let q = TrigRadialPoly::from_cartesian(sys.q());
    let (c, s) = (TrigRadialPoly::cos_theta(), TrigRadialPoly::sin_theta());
    let r_dot = &(&p * &c) + &(&q * &s);
    let theta_dot = (&(&q * &c) - &(&p * &s)).div_r().map_err(|_| BiPolyError::OriginNotSingular)?;
    Ok(PolarSystem { r_dot, theta_dot, degree: sys.degree() })
}

/// The polynomial `p(s)` with `p(r²) = (1/2πr) ∫ R dθ`.
pub fn radial_average(ps: &PolarSystem) -> Result<RatPoly, PolarizeError> {
    let mean = ps.r_dot.theta_mean();
    debug_assert!(mean.coeff(0) == num_traits::Zero::zero());
    mean.shift_down(1).even_part_in_square().ok_or(PolarizeError::OddPowerResidue)
}

/// `ẋ = x u(x²+y²) − y v(x²+y²)`, `ẏ = x v(x²+y²) + y u(x²+y²)`, whose polar
/// form is `ṙ = r u(r²)`, `θ̇ = v(r²)`.
pub fn rotational_system(u: &RatPoly, v: &RatPoly) -> SystemSpec {
    let (ur, vr) = (BiPoly::radial(u), BiPoly::radial(v));
    let (x, y) = (BiPoly::x(), BiPoly::y());
    let p = &(&x * &ur) - &(&y * &vr);
    let q = &(&x * &vr) + &(&y * &ur);
    SystemSpec::new(p, q).expect("rotational systems vanish at the origin")
}
