//! Certificates as JSON documents, and their independent re-verification.
//!
//! Every polynomial is written as a coefficient list of rational strings,
//! lowest degree first. [`verify`] trusts nothing in the document except the
//! system itself: it recomputes the defect, `M`, the slice majorants and `Φ`,
//! and repeats both Sturm negativity checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{build_m, dulac_defect, phi_majorant, Certificate, DulacPair, RingReport, Verdict};
use crate::exactalg::rat::{format_rat, parse_rat};
use crate::exactalg::{count_roots, negativity_witness, NegativityWitness, Rat, RatPoly, RootRange};
use crate::polarize::{radial_average, to_polar};
use crate::sysfile::{SysFileError, SystemFile};
use crate::trigpoly::{FourierSlice, TrigRadialPoly};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Harmonic {
    pub j: u32,
    pub c: String,
}

/// `r^i (a0 + Σ cos_j cos jθ + Σ sin_j sin jθ)`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDoc {
    pub i: u32,
    pub a0: String,
    pub cos: Vec<Harmonic>,
    pub sin: Vec<Harmonic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorantDoc {
    pub i: u32,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum VerdictDoc {
    Certified,
    NotCertified { stage: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub defect: NegativityWitness,
    pub phi: NegativityWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub system: SystemFile,
    pub p: Vec<String>,
    pub k: String,
    pub w: Vec<String>,
    pub defect: Vec<String>,
    #[serde(rename = "M_slices")]
    pub m_slices: Vec<SliceDoc>,
    pub m_i: Vec<MajorantDoc>,
    pub phi: Vec<String>,
    pub m_plus: usize,
    pub rings: Vec<RingReport>,
    #[serde(rename = "C")]
    pub c: Option<usize>,
    pub upper_bound: Option<usize>,
    pub lower_bound: Option<usize>,
    pub verdict: VerdictDoc,
    pub sturm_witnesses: Witnesses,
    pub version: String,
    /// The only field that differs between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

fn slice_doc(i: u32, s: &FourierSlice) -> SliceDoc {
    let list = |m: &std::collections::BTreeMap<u32, Rat>| {
        m.iter().map(|(&j, c)| Harmonic { j, c: format_rat(c) }).collect()
    };
    SliceDoc { i, a0: format_rat(s.a0()), cos: list(s.cos_coeffs()), sin: list(s.sin_coeffs()) }
}

impl CertificateDoc {
    pub fn from_certificate(name: &str, cert: &Certificate, timing: Option<Timing>) -> Self {
        let verdict = match &cert.verdict {
            Verdict::Certified => VerdictDoc::Certified,
            Verdict::NotCertified { stage, reason } => {
                VerdictDoc::NotCertified { stage: stage.name().into(), reason: reason.clone() }
            }
        };
        CertificateDoc {
            system: SystemFile::from_system(name, &cert.system),
            p: cert.p.to_strings(),
            k: format_rat(cert.pair.k()),
            w: cert.pair.w().to_strings(),
            defect: cert.defect.to_strings(),
            m_slices: cert.m.slices().iter().map(|(&i, s)| slice_doc(i, s)).collect(),
            m_i: cert.m_i.iter().map(|(i, c)| MajorantDoc { i: *i, c: format_rat(c) }).collect(),
            phi: cert.phi.to_strings(),
            m_plus: cert.m_plus,
            rings: cert.rings.clone(),
            c: cert.critical_rings,
            upper_bound: cert.upper_bound(),
            lower_bound: cert.lower_bound,
            verdict,
            sturm_witnesses: Witnesses { defect: cert.defect_witness.clone(), phi: cert.phi_witness.clone() },
            version: VERSION.into(),
            timing,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == VerdictDoc::Certified
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate documents always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Malformed(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("system in certificate: {0}")]
    System(#[from] SysFileError),
    #[error("bad rational {0:?}")]
    Rational(String),
}

/// Outcome of re-checking a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub defect_negative: bool,
    pub phi_negative: bool,
    pub m_plus: usize,
    /// Every recomputed quantity equals the one written in the document.
    pub mismatches: Vec<&'static str>,
    /// Verdict implied by the recomputation.
    pub certified: bool,
    /// The recomputed verdict and bound agree with the document's.
    pub agrees: bool,
}

fn poly(items: &[String]) -> Result<RatPoly, VerifyError> {
    items
        .iter()
        .map(|s| parse_rat(s).map_err(|_| VerifyError::Rational(s.clone())))
        .collect::<Result<Vec<_>, _>>()
        .map(RatPoly::new)
}

fn rational(s: &str) -> Result<Rat, VerifyError> {
    parse_rat(s).map_err(|_| VerifyError::Rational(s.into()))
}

fn slices(doc: &[SliceDoc]) -> Result<TrigRadialPoly, VerifyError> {
    let mut items = Vec::with_capacity(doc.len());
    for s in doc {
        let mut slice = FourierSlice::constant(rational(&s.a0)?);
        for h in &s.cos {
            slice = &slice + &FourierSlice::cos(h.j, rational(&h.c)?);
        }
        for h in &s.sin {
            slice = &slice + &FourierSlice::sin(h.j, rational(&h.c)?);
        }
        items.push((s.i, slice));
    }
    Ok(TrigRadialPoly::from_slices(items))
}

/// Re-verifies a certificate from the document alone.
pub fn verify(doc: &CertificateDoc) -> Result<VerifyReport, VerifyError> {
    let sys = doc.system.resolve(&[])?.system;
    let (p, k, w) = (poly(&doc.p)?, rational(&doc.k)?, poly(&doc.w)?);
    let mut mismatches = Vec::new();

    let ps = to_polar(&sys).map_err(|e| VerifyError::Malformed(e.to_string()))?;
    let p_sys = radial_average(&ps).map_err(|e| VerifyError::Malformed(e.to_string()))?;
    if p_sys != p {
        mismatches.push("p");
    }
    let defect = dulac_defect(&p_sys, &k, &w);
    if defect != poly(&doc.defect)? {
        mismatches.push("defect");
    }
    let pair = DulacPair::new(k, w.clone()).map_err(|e| VerifyError::Malformed(e.to_string()))?;
    let m = build_m(&ps, &pair);
    if m != slices(&doc.m_slices)? {
        mismatches.push("M_slices");
    }
    let (m_i, phi) = phi_majorant(&m);
    let doc_m_i =
        doc.m_i.iter().map(|e| Ok((e.i, rational(&e.c)?))).collect::<Result<Vec<_>, VerifyError>>()?;
    if m_i != doc_m_i {
        mismatches.push("m_i");
    }
    if phi != poly(&doc.phi)? {
        mismatches.push("phi");
    }

    let defect_negative = negativity_witness(&defect).negative;
    let phi_negative = negativity_witness(&phi).negative;
    let m_plus = count_roots(&w, &RootRange::NonNegativeRay).unwrap_or(0);
    if m_plus != doc.m_plus {
        mismatches.push("m_plus");
    }
    let certified = defect_negative && phi_negative;
    let agrees = mismatches.is_empty()
        && certified == doc.is_certified()
        && doc.upper_bound == certified.then_some(m_plus);
    Ok(VerifyReport { defect_negative, phi_negative, m_plus, mismatches, certified, agrees })
}
