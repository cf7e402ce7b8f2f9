//! How far a rotational system can be perturbed while staying certified.

use num_traits::Signed;
use rayon::prelude::*;

use crate::bipoly::BiPoly;
use crate::exactalg::{count_roots, Rat, RatPoly, RootRange};
use crate::polarize::{radial_average, rotational_system, to_polar};

use super::{certify, dulac_defect, is_dulac_pair, k_grid, phi_passes, CertifyError, DulacPair, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct MarginRow {
    pub eps: Rat,
    pub certified: bool,
    /// Failing stage and reason when not certified.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    /// `k` found for the unperturbed system and reused for every `ε`.
    pub k: Rat,
    pub rows: Vec<MarginRow>,
    /// Largest `|ε|` in the grid that certified.
    pub largest_certified: Option<Rat>,
}

/// Certifies `rotational_system(u, v) + ε (P̃, Q̃)` for every `ε` in the grid
/// with the pair `(k, r²(u′(r²) + ε p̃′(r²)))`, `k` fixed by the `ε = 0` case.
pub fn certification_margin(
    u: &RatPoly,
    v: &RatPoly,
    pt: &BiPoly,
    qt: &BiPoly,
    eps_grid: &[Rat],
) -> Result<MarginReport, CertifyError> {
    let j = u.degree().filter(|&d| d > 0).ok_or(CertifyError::InvalidRotationalBase)? as u32;
    let max = 2 * j + 1;
    for (&(a, b), _) in pt.terms().chain(qt.terms()) {
        if a + b < 2 || a + b > max {
            return Err(CertifyError::InvalidPerturbationDegrees { degree: a + b, max });
        }
    }
    let simple =
        u.square_free().degree() == u.degree() && count_roots(u, &RootRange::RealLine).ok() == u.degree();
    if !simple {
        return Err(CertifyError::InvalidRotationalBase);
    }

    let base = rotational_system(u, v);
    let ps0 = to_polar(&base)?;
    let w0 = u.derivative().substitute_square().shift_up(2);
    let passing = |max_den: u32| -> Vec<Rat> {
        k_grid(max_den)
            .into_iter()
            .filter(|k| {
                let pair = DulacPair::new(k.clone(), w0.clone()).unwrap();
                is_dulac_pair(u, &pair).0 && phi_passes(&ps0, &pair)
            })
            .collect()
    };
    // A perturbation by quadratic monomials adds an ε r³ term to Φ, which
    // only a defect with a nonzero r² coefficient can absorb near r = 0.
    let absorbs = |k: &Rat| dulac_defect(u, k, &w0).coeff(2).is_negative();
    let k = [12, 48]
        .into_iter()
        .map(passing)
        .find(|ks| !ks.is_empty())
        .and_then(|ks| ks.iter().find(|k| absorbs(k)).or(ks.first()).cloned())
        .ok_or(CertifyError::NoDulacPairFound { impossible: None, tried: k_grid(48).len() })?;

    let rows: Vec<MarginRow> =
        eps_grid.par_iter().map(|eps| margin_row(&base, pt, qt, &k, eps)).collect::<Result<_, _>>()?;
    let largest_certified = rows.iter().filter(|r| r.certified).map(|r| r.eps.abs()).max();
    Ok(MarginReport { k, rows, largest_certified })
}

fn margin_row(
    base: &crate::bipoly::SystemSpec,
    pt: &BiPoly,
    qt: &BiPoly,
    k: &Rat,
    eps: &Rat,
) -> Result<MarginRow, CertifyError> {
    let sys = base.perturbed(eps, pt, qt).map_err(|e| CertifyError::InvalidSystem(e.into()))?;
    let p = radial_average(&to_polar(&sys)?)?;
    let w = p.derivative().substitute_square().shift_up(2);
    if w.is_zero() {
        return Ok(MarginRow { eps: eps.clone(), certified: false, reason: Some("w is zero".into()) });
    }
    let cert = certify(&sys, Some(DulacPair::new(k.clone(), w)?))?;
    let reason = match cert.verdict {
        Verdict::Certified => None,
        Verdict::NotCertified { stage, reason } => Some(format!("{}: {reason}", stage.name())),
    };
    Ok(MarginRow { eps: eps.clone(), certified: reason.is_none(), reason })
}
