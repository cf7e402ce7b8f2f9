//! Sturm chains over ℚ: distinct real-root counting, sign certification on
//! the open positive ray and root isolation by bisection.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::RatPoly;
use super::rat::{int, rat_serde, sign, to_f64, Rat};
use super::ExactAlgError;

/// Signed remainder sequence of the square-free part of `source`.
#[derive(Debug, Clone)]
pub struct SturmChain {
    source: RatPoly,
    chain: Vec<RatPoly>,
}

/// Where to count roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootRange {
    /// `(a, b]`
    OpenClosed(Rat, Rat),
    /// `(0, ∞)`
    PositiveRay,
    /// `[0, ∞)`
    NonNegativeRay,
    /// `(−∞, ∞)`
    RealLine,
}

impl SturmChain {
    pub fn new(source: &RatPoly) -> Result<Self, ExactAlgError> {
        if source.is_zero() {
            return Err(ExactAlgError::ZeroPolynomial);
        }
        let sf = source.square_free();
        let mut chain = vec![sf.clone()];
        let mut prev = sf.clone();
        let mut cur = sf.derivative();
        while !cur.is_zero() {
            let rem = prev.div_rem(&cur).1;
            chain.push(cur.clone());
            prev = cur;
            cur = -rem;
        }
        Ok(SturmChain { source: source.clone(), chain })
    }

    pub fn source(&self) -> &RatPoly {
        &self.source
    }

    pub fn square_free(&self) -> &RatPoly {
        &self.chain[0]
    }

    pub fn chain(&self) -> &[RatPoly] {
        &self.chain
    }

    fn variations<I: IntoIterator<Item = Ordering>>(signs: I) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rat) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(p.leading().unwrap())))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            if p.degree().unwrap() % 2 == 1 {
                s.reverse()
            } else {
                s
            }
        }))
    }

    /// Distinct real roots of the source in `range`.
    pub fn count(&self, range: &RootRange) -> usize {
        match range {
            RootRange::OpenClosed(a, b) => {
                if a >= b {
                    0
                } else {
                    self.variations_at(a) - self.variations_at(b)
                }
            }
            RootRange::PositiveRay => self.variations_at(&Rat::zero()) - self.variations_at_pos_inf(),
            RootRange::NonNegativeRay => {
                let at_zero = usize::from(self.chain[0].eval(&Rat::zero()).is_zero());
                self.count(&RootRange::PositiveRay) + at_zero
            }
            RootRange::RealLine => self.variations_at_neg_inf() - self.variations_at_pos_inf(),
        }
    }
}

/// Distinct real roots of `p` in `range`.
pub fn count_roots(p: &RatPoly, range: &RootRange) -> Result<usize, ExactAlgError> {
    Ok(SturmChain::new(p)?.count(range))
}

/// Audit record of a negativity decision on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativityWitness {
    /// `m` such that `p = r^m · q` with `q(0) ≠ 0`.
    pub factored_power: usize,
    /// Distinct roots of `q` on `(0, ∞)`.
    pub positive_roots: usize,
    #[serde(with = "rat_serde")]
    pub sample: Rat,
    #[serde(with = "rat_serde")]
    pub sample_value: Rat,
    #[serde(with = "rat_serde")]
    pub leading_coefficient: Rat,
    pub negative: bool,
}

/// Decides whether `p(r) < 0` for every `r > 0`.
pub fn is_negative_on_positive_axis(p: &RatPoly) -> Result<(bool, NegativityWitness), ExactAlgError> {
    let m = p.valuation().ok_or(ExactAlgError::ZeroPolynomial)?;
    let q = p.shift_down(m);
    let positive_roots = count_roots(&q, &RootRange::PositiveRay)?;
    let sample = Rat::one();
    let sample_value = p.eval(&sample);
    let leading_coefficient = p.leading().unwrap().clone();
    let negative = positive_roots == 0 && sample_value.is_negative() && leading_coefficient.is_negative();
    Ok((
        negative,
        NegativityWitness {
            factored_power: m,
            positive_roots,
            sample,
            sample_value,
            leading_coefficient,
            negative,
        },
    ))
}

/// Like [`is_negative_on_positive_axis`], with the zero polynomial reported
/// as not negative instead of as an error.
pub fn negativity_witness(p: &RatPoly) -> NegativityWitness {
    match is_negative_on_positive_axis(p) {
        Ok((_, w)) => w,
        Err(_) => NegativityWitness {
            factored_power: 0,
            positive_roots: 0,
            sample: Rat::one(),
            sample_value: Rat::zero(),
            leading_coefficient: Rat::zero(),
            negative: false,
        },
    }
}

/// Closed interval `[lo, hi]` holding exactly one simple root of `poly`.
///
/// Either `lo == hi` (the root is that rational) or neither endpoint is a
/// root and `poly` changes sign across the interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
    poly: RatPoly,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Square-free polynomial the interval isolates a root of.
    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    /// Bisects until `width < max_width`.
    pub fn refine(&mut self, max_width: &Rat) {
        if self.is_exact() {
            return;
        }
        let lo_sign = sign(&self.poly.eval(&self.lo));
        while &self.width() >= max_width {
            let mid = self.midpoint();
            match sign(&self.poly.eval(&mid)) {
                Ordering::Equal => {
                    self.lo = mid.clone();
                    self.hi = mid;
                    return;
                }
                s if s == lo_sign => self.lo = mid,
                _ => self.hi = mid,
            }
        }
    }

    pub fn refined(mut self, max_width: &Rat) -> Self {
        self.refine(max_width);
        self
    }
}

/// Isolates every distinct real root of `p`, in increasing order.
pub fn real_roots_isolated(p: &RatPoly) -> Result<Vec<RootInterval>, ExactAlgError> {
    let chain = SturmChain::new(p)?;
    let sf = chain.square_free().clone();
    let total = chain.count(&RootRange::RealLine);
    if total == 0 {
        return Ok(Vec::new());
    }
    let lead = sf.leading().unwrap();
    let bound =
        sf.coeffs().iter().map(|c| (c / lead).abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a })
            + Rat::one();

    let mut out = Vec::with_capacity(total);
    let mut stack = vec![(-bound.clone(), bound, total)];
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(tighten(&chain, lo, hi)),
            _ => {
                let mid = (&lo + &hi) / int(2);
                let left = chain.count(&RootRange::OpenClosed(lo.clone(), mid.clone()));
                stack.push((mid.clone(), hi, n - left));
                stack.push((lo, mid, left));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

// Turns a half-open `(lo, hi]` with one root into a closed interval whose
// endpoints are not roots (or a degenerate exact one).
fn tighten(chain: &SturmChain, mut lo: Rat, mut hi: Rat) -> RootInterval {
    let sf = chain.square_free();
    loop {
        if sf.eval(&hi).is_zero() {
            return RootInterval { lo: hi.clone(), hi, poly: sf.clone() };
        }
        if !sf.eval(&lo).is_zero() {
            return RootInterval { lo, hi, poly: sf.clone() };
        }
        let mid = (&lo + &hi) / int(2);
        if chain.count(&RootRange::OpenClosed(lo.clone(), mid.clone())) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Distinct real roots in `[0, ∞)`, isolated and ordered.
pub fn nonnegative_roots_isolated(p: &RatPoly) -> Result<Vec<RootInterval>, ExactAlgError> {
    let zero = Rat::zero();
    let mut out = Vec::new();
    for mut iv in real_roots_isolated(p)? {
        if iv.hi < zero {
            continue;
        }
        if iv.lo < zero {
            if iv.poly.eval(&zero).is_zero() {
                iv.lo = zero.clone();
                iv.hi = zero.clone();
            } else {
                while iv.lo < zero && iv.hi > zero {
                    let w = iv.width() / int(2);
                    iv.refine(&w);
                }
                // p(0) ≠ 0, so a root enclosed in [lo, 0] is negative
                if iv.hi <= zero {
                    continue;
                }
            }
        }
        out.push(iv);
    }
    Ok(out)
}
