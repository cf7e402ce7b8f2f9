//! Certification pipeline: Dulac pair, the function `M(r, θ, k, w)`, its
//! majorant `Φ`, and the ring decomposition with stability labels.

mod margin;
mod pair;
mod rings;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::bipoly::SystemSpec;
use crate::exactalg::{count_roots, negativity_witness, NegativityWitness, Rat, RatPoly, RootRange};
use crate::polarize::{radial_average, to_polar, PolarSystem, PolarizeError};
use crate::trigpoly::TrigRadialPoly;

pub use margin::{certification_margin, MarginReport, MarginRow};
pub use pair::{
    dulac_defect, is_dulac_pair, k_grid, multiple_positive_root, propose_pairs, DulacPair, PairProposal,
};
pub use rings::{ring_decomposition, CyclePrediction, Membership, Radius, RingReport, Stability, WSign};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("invalid system: {0}")]
    InvalidSystem(#[from] PolarizeError),
    #[error("invalid Dulac pair: {0}")]
    InvalidPair(String),
    #[error("no Dulac pair found after {tried} candidates{}", impossible_note(.impossible))]
    NoDulacPairFound {
        /// Set when `p` has a multiple positive root near this value, in which
        /// case no Dulac pair exists at all.
        impossible: Option<f64>,
        tried: usize,
    },
    #[error("perturbation monomial of degree {degree} outside [2, {max}]")]
    InvalidPerturbationDegrees { degree: u32, max: u32 },
    #[error("u must be nonconstant with simple real roots")]
    InvalidRotationalBase,
}

fn impossible_note(root: &Option<f64>) -> String {
    match root {
        Some(s) => format!(" (p has a multiple positive root at s = {s:.12}, so none exists)"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Defect,
    Phi,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Defect => "defect",
            Stage::Phi => "phi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotCertified { stage: Stage, reason: String },
}

/// Complete audit record of one certification run.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub system: SystemSpec,
    pub polar: PolarSystem,
    pub p: RatPoly,
    pub pair: DulacPair,
    pub defect: RatPoly,
    pub defect_witness: NegativityWitness,
    pub m: TrigRadialPoly,
    /// `(i, m_i)` with `m_i ≥ max_θ M_i(θ)`.
    pub m_i: Vec<(u32, Rat)>,
    pub phi: RatPoly,
    pub phi_witness: NegativityWitness,
    pub m_plus: usize,
    pub rings: Vec<RingReport>,
    /// Number of bounded rings holding a critical point, once known.
    pub critical_rings: Option<usize>,
    pub lower_bound: Option<usize>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// `m⁺` when certified.
    pub fn upper_bound(&self) -> Option<usize> {
        self.is_certified().then_some(self.m_plus)
    }

    /// Ring containing radius `rho`, if any.
    pub fn ring_at(&self, rho: f64) -> Option<&RingReport> {
        self.rings.iter().find(|r| r.contains_radius(rho))
    }
}

/// `M = R w′ − k (∂R/∂r + ∂Θ/∂θ + R/r) w`
pub fn build_m(ps: &PolarSystem, pair: &DulacPair) -> TrigRadialPoly {
    let r = &ps.r_dot;
    let w = TrigRadialPoly::from_radial(pair.w());
    let dw = TrigRadialPoly::from_radial(&pair.w().derivative());
    let r_over_r = r.div_r().expect("R vanishes at r = 0");
    let bracket = &(&r.d_dr() + &ps.theta_dot.d_dtheta()) + &r_over_r;
    let m = &(r * &dw) - &(&bracket * &w).scale(pair.k());
    let bound = ps.degree as usize + pair.degree() - 1;
    assert!(m.max_radial_power().is_none_or(|e| e as usize <= bound), "M exceeds radial degree n + d - 1");
    m
}

/// `(i, m_i)` slice majorants and `Φ(r) = Σ m_i rⁱ`.
pub fn phi_majorant(m: &TrigRadialPoly) -> (Vec<(u32, Rat)>, RatPoly) {
    let m_i = m.slices().iter().map(|(&i, s)| (i, s.l1_majorant())).filter(|(_, c)| !c.is_zero()).collect();
    (m_i, m.l1_majorant())
}

struct Evaluated {
    pair: DulacPair,
    defect: RatPoly,
    defect_witness: NegativityWitness,
    m: TrigRadialPoly,
    m_i: Vec<(u32, Rat)>,
    phi: RatPoly,
    phi_witness: NegativityWitness,
}

fn evaluate(ps: &PolarSystem, p: &RatPoly, pair: DulacPair) -> Evaluated {
    let defect = dulac_defect(p, pair.k(), pair.w());
    let defect_witness = negativity_witness(&defect);
    let m = build_m(ps, &pair);
    let (m_i, phi) = phi_majorant(&m);
    let phi_witness = negativity_witness(&phi);
    Evaluated { pair, defect, defect_witness, m, m_i, phi, phi_witness }
}

fn phi_passes(ps: &PolarSystem, pair: &DulacPair) -> bool {
    negativity_witness(&build_m(ps, pair).l1_majorant()).negative
}

/// Finds a pair passing both checks, else the first pair passing the defect
/// check. Candidates are scanned in parallel; the winner is always the
/// earliest one in priority order.
fn search_pair(ps: &PolarSystem, p: &RatPoly) -> Result<DulacPair, CertifyError> {
    let mut tried = 0;
    let mut first_verified: Option<DulacPair> = None;
    for max_den in [12, 48] {
        let candidates = match pair::propose_with_grid(p, max_den) {
            PairProposal::NoDulacPairPossible { root } => {
                return Err(CertifyError::NoDulacPairFound { impossible: Some(root), tried })
            }
            PairProposal::Candidates(c) => c,
        };
        if max_den > 12 {
            log::warn!("no certifying pair with denominators <= 12; widening k grid to 48");
        }
        tried += candidates.len();
        let verified: Vec<DulacPair> = candidates.into_par_iter().filter(|c| is_dulac_pair(p, c).0).collect();
        if let Some(found) = verified.par_iter().find_first(|c| phi_passes(ps, c)) {
            return Ok(found.clone());
        }
        if first_verified.is_none() {
            first_verified = verified.into_iter().next();
        }
    }
    first_verified.ok_or(CertifyError::NoDulacPairFound { impossible: None, tried })
}

/// Runs the full pipeline on `sys`, with `pair` if supplied or else the first
/// candidate that passes.
pub fn certify(sys: &SystemSpec, pair: Option<DulacPair>) -> Result<Certificate, CertifyError> {
    let ps = to_polar(sys)?;
    let p = radial_average(&ps)?;
    let pair = match pair {
        Some(pair) => pair,
        None => search_pair(&ps, &p)?,
    };
    let e = evaluate(&ps, &p, pair);
    let m_plus = count_roots(e.pair.w(), &RootRange::NonNegativeRay).unwrap_or(0);
    let rings = ring_decomposition(e.pair.w());
    let verdict = if !e.defect_witness.negative {
        Verdict::NotCertified {
            stage: Stage::Defect,
            reason: failure_reason("defect p_{k,w}", &e.defect_witness),
        }
    } else if !e.phi_witness.negative {
        Verdict::NotCertified { stage: Stage::Phi, reason: failure_reason("majorant Phi", &e.phi_witness) }
    } else {
        Verdict::Certified
    };
    Ok(Certificate {
        system: sys.clone(),
        polar: ps,
        p,
        pair: e.pair,
        defect: e.defect,
        defect_witness: e.defect_witness,
        m: e.m,
        m_i: e.m_i,
        phi: e.phi,
        phi_witness: e.phi_witness,
        m_plus,
        rings,
        critical_rings: None,
        lower_bound: None,
        verdict,
    })
}

fn failure_reason(what: &str, w: &NegativityWitness) -> String {
    use crate::exactalg::format_rat;
    if w.leading_coefficient.is_zero() {
        return format!("{what} is identically zero");
    }
    if w.positive_roots > 0 {
        format!("{what} has {} positive root(s)", w.positive_roots)
    } else if w.leading_coefficient > Rat::zero() {
        format!("{what} has positive leading coefficient {}", format_rat(&w.leading_coefficient))
    } else {
        format!("{what} is {} at r = {}", format_rat(&w.sample_value), format_rat(&w.sample))
    }
}

/// Marks rings holding one of `critical_points` and applies
/// `max(0, m⁺ − 2 − C)`, where `C` counts the bounded rings `R_1 … R_{m⁺−1}`
/// that hold a critical point. With no points the bound stays unknown.
pub fn lower_bound(cert: &mut Certificate, critical_points: &[(f64, f64)]) -> Option<usize> {
    if critical_points.is_empty() {
        for ring in &mut cert.rings {
            ring.contains_critical_points = Membership::Unknown;
        }
        cert.critical_rings = None;
        cert.lower_bound = None;
        return None;
    }
    for ring in &mut cert.rings {
        let hit = critical_points.iter().any(|&(x, y)| ring.contains_radius(x.hypot(y)));
        ring.contains_critical_points = if hit { Membership::Yes } else { Membership::No };
    }
    let c = cert
        .rings
        .iter()
        .filter(|r| !r.is_disc() && r.is_bounded() && r.index < cert.m_plus)
        .filter(|r| r.contains_critical_points == Membership::Yes)
        .count();
    cert.critical_rings = Some(c);
    cert.lower_bound = cert.is_certified().then(|| cert.m_plus.saturating_sub(2 + c));
    cert.lower_bound
}
