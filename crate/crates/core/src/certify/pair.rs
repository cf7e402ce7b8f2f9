//! Dulac pairs `(k, w)` of a radial polynomial `p(s)`: the defect
//! polynomial, its verification and candidate proposal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::rat::{int, rat_serde, to_f64};
use crate::exactalg::{negativity_witness, nonnegative_roots_isolated, NegativityWitness, Rat, RatPoly};

use super::CertifyError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DulacPair {
    #[serde(with = "rat_serde")]
    k: Rat,
    w: RatPoly,
}

impl DulacPair {
    pub fn new(k: Rat, w: RatPoly) -> Result<Self, CertifyError> {
        if !k.is_positive() {
            return Err(CertifyError::InvalidPair("k must be positive".into()));
        }
        if w.is_zero() {
            return Err(CertifyError::InvalidPair("w must be nonzero".into()));
        }
        Ok(DulacPair { k, w })
    }

    pub fn k(&self) -> &Rat {
        &self.k
    }

    pub fn w(&self) -> &RatPoly {
        &self.w
    }

    /// `d = deg w`
    pub fn degree(&self) -> usize {
        self.w.degree().unwrap()
    }
}

/// `p_{k,w}(r) = r p(r²) w'(r) − 2k (p(r²) + r² p'(r²)) w(r)`
pub fn dulac_defect(p: &RatPoly, k: &Rat, w: &RatPoly) -> RatPoly {
    let p_sq = p.substitute_square();
    let dp_sq = p.derivative().substitute_square();
    let first = &p_sq.shift_up(1) * &w.derivative();
    let bracket = &p_sq + &dp_sq.shift_up(2);
    let second = (&bracket * w).scale(&(int(2) * k));
    &first - &second
}

/// Whether `(k, w)` is a Dulac pair of `p`, with the Sturm audit of the defect.
pub fn is_dulac_pair(p: &RatPoly, pair: &DulacPair) -> (bool, NegativityWitness) {
    let w = negativity_witness(&dulac_defect(p, pair.k(), pair.w()));
    (w.negative, w)
}

/// Rationals `j/q ∈ (0, 2]` with `q ≤ max_den`, ordered by `|k − 1|`, ties
/// broken towards the smaller value.
pub fn k_grid(max_den: u32) -> Vec<Rat> {
    let mut ks: Vec<Rat> = (1..=max_den as i64)
        .flat_map(|q| {
            (1..=2 * q)
                .filter(move |j| j.gcd(&q) == 1)
                .map(move |j| Rat::new(BigInt::from(j), BigInt::from(q)))
        })
        .collect();
    ks.sort_by(|a, b| {
        let (da, db) = ((a - Rat::one()).abs(), (b - Rat::one()).abs());
        da.cmp(&db).then(a.cmp(b))
    });
    ks.dedup();
    ks
}

/// Result of [`propose_pairs`].
#[derive(Debug, Clone, PartialEq)]
pub enum PairProposal {
    /// Unverified candidates in priority order.
    Candidates(Vec<DulacPair>),
    /// `p` has a multiple positive root near `root`, so the defect of every
    /// pair vanishes at `√root` and no Dulac pair exists.
    NoDulacPairPossible { root: f64 },
}

/// Positive root of `gcd(p, p')`, if any.
pub fn multiple_positive_root(p: &RatPoly) -> Option<f64> {
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return None;
    }
    let tiny = Rat::new(BigInt::one(), BigInt::one() << 40usize);
    nonnegative_roots_isolated(&g)
        .ok()?
        .into_iter()
        .find(|iv| iv.hi.is_positive() && !(iv.is_exact() && iv.lo.is_zero()))
        .map(|iv| iv.refined(&tiny).approx())
}

/// Candidates `w = r² p'(r²)` over the `k` grid, followed by products
/// `Π (r² − α)` with `α` between consecutive non-negative roots of `p`.
pub fn propose_pairs(p: &RatPoly) -> PairProposal {
    propose_with_grid(p, 12)
}

pub(crate) fn propose_with_grid(p: &RatPoly, max_den: u32) -> PairProposal {
    if p.is_zero() {
        return PairProposal::Candidates(Vec::new());
    }
    if let Some(root) = multiple_positive_root(p) {
        return PairProposal::NoDulacPairPossible { root };
    }
    let mut out = Vec::new();
    let w_a = p.derivative().substitute_square().shift_up(2);
    if !w_a.is_zero() {
        for k in k_grid(max_den) {
            out.push(DulacPair { k, w: w_a.clone() });
        }
    }
    let w_b = midpoint_product(p);
    for k in [Rat::new(1.into(), 2.into()), Rat::one(), int(2)] {
        let pair = DulacPair { k, w: w_b.clone() };
        if !out.contains(&pair) {
            out.push(pair);
        }
    }
    PairProposal::Candidates(out)
}

// Π (r² − α) over α midway between consecutive points of {0} ∪ {positive roots of p},
// each α rounded to a short dyadic.
fn midpoint_product(p: &RatPoly) -> RatPoly {
    let tiny = Rat::new(BigInt::one(), BigInt::one() << 48usize);
    let mut marks = vec![0.0f64];
    if let Ok(roots) = nonnegative_roots_isolated(p) {
        marks.extend(
            roots
                .into_iter()
                .filter(|iv| iv.hi.is_positive())
                .map(|iv| iv.refined(&tiny).approx())
                .filter(|&x| x > 0.0),
        );
    }
    let mut w = RatPoly::one();
    for pair in marks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let gap = b - a;
        let mut bits = 4u32;
        while 2f64.powi(-(bits as i32)) > gap / 8.0 && bits < 60 {
            bits += 1;
        }
        let alpha = crate::exactalg::rat::from_f64_dyadic(0.5 * (a + b), bits);
        debug_assert!(to_f64(&alpha) > a && to_f64(&alpha) < b);
        w = &w * &RatPoly::new(vec![-alpha, Rat::zero(), Rat::one()]);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::rat;

    fn p_1_3() -> RatPoly {
        RatPoly::new(vec![int(4), rat(-79, 16), int(1)])
    }

    #[test]
    fn defect_of_worked_system() {
        let w = RatPoly::new(vec![int(0), int(0), rat(-79, 16), int(0), int(2)]);
        let d = dulac_defect(&p_1_3(), &rat(4, 5), &w);
        let expected = RatPoly::new(vec![
            int(0),
            int(0),
            rat(-79, 10),
            int(0),
            rat(-1287, 128),
            int(0),
            rat(237, 40),
            int(0),
            rat(-8, 5),
        ]);
        assert_eq!(d, expected);
        assert!(dulac_defect(&p_1_3(), &int(1), &RatPoly::zero()).is_zero());
    }

    #[test]
    fn defect_matches_q_k_for_derivative_choice() {
        // q_k(r) = 2r⁴(p p'' − k p'²)(r²) + 2(1−k) r² (p p')(r²)
        let p = RatPoly::from_i64s(&[6, -11, 6, -1]);
        let k = rat(7, 9);
        let (d1, d2) = (p.derivative(), p.derivative().derivative());
        let inner = &(&p * &d2) - &(&d1 * &d1).scale(&k);
        let q_k = &inner.substitute_square().shift_up(4).scale(&int(2))
            + &(&p * &d1).substitute_square().shift_up(2).scale(&(int(2) * (int(1) - &k)));
        let w = d1.substitute_square().shift_up(2);
        assert_eq!(dulac_defect(&p, &k, &w), q_k);
    }

    #[test]
    fn remark_examples_verify() {
        let lin = |a: i64| RatPoly::from_i64s(&[a, 1]);
        let p = &(&(&lin(-2) * &lin(-4)) * &RatPoly::from_i64s(&[4, 0, 1])) * &lin(3);
        let w = &RatPoly::from_i64s(&[-1, 0, 1]) * &RatPoly::from_i64s(&[-3, 0, 1]);
        for k in [rat(1, 2), int(1), int(2)] {
            let pair = DulacPair::new(k, w.clone()).unwrap();
            assert!(is_dulac_pair(&p, &pair).0);
        }

        let p = RatPoly::new(vec![int(-35), int(-36), rat(49, 2), rat(-14, 3), rat(1, 4)]);
        let pair = DulacPair::new(int(1), RatPoly::from_i64s(&[-8, 0, 1])).unwrap();
        assert!(is_dulac_pair(&p, &pair).0);
    }

    #[test]
    fn double_positive_root_has_no_pair() {
        let p = RatPoly::from_i64s(&[1, -2, 1]);
        let pair = DulacPair::new(int(1), RatPoly::new(vec![rat(-1, 2), int(0), int(1)])).unwrap();
        let (ok, _) = is_dulac_pair(&p, &pair);
        assert!(!ok);
        assert!(dulac_defect(&p, &int(1), pair.w()).eval(&int(1)).is_zero());
        match propose_pairs(&p) {
            PairProposal::NoDulacPairPossible { root } => assert!((root - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        // multiplicity times anything
        let p2 = &p * &RatPoly::from_i64s(&[3, 0, 0, 1]);
        assert!(matches!(propose_pairs(&p2), PairProposal::NoDulacPairPossible { .. }));
    }

    #[test]
    fn worked_system_candidates_include_k_four_fifths() {
        let PairProposal::Candidates(c) = propose_pairs(&p_1_3()) else { panic!() };
        let w = RatPoly::new(vec![int(0), int(0), rat(-79, 16), int(0), int(2)]);
        let target = DulacPair::new(rat(4, 5), w).unwrap();
        assert!(c.contains(&target));
        assert!(is_dulac_pair(&p_1_3(), &target).0);
        assert_eq!(c[0].k(), &int(1));
    }

    #[test]
    fn k_grid_shape() {
        let g = k_grid(12);
        assert_eq!(g[0], int(1));
        assert!(g.iter().all(|k| k.is_positive() && k <= &int(2)));
        assert!(g.contains(&rat(4, 5)) && g.contains(&rat(7, 10)) && g.contains(&rat(1, 12)));
        let mut sorted = g.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), g.len());
    }

    #[test]
    fn midpoint_heuristic_matches_remark() {
        let lin = |a: i64| RatPoly::from_i64s(&[a, 1]);
        let p = &(&(&lin(-2) * &lin(-4)) * &RatPoly::from_i64s(&[4, 0, 1])) * &lin(3);
        let w = &RatPoly::from_i64s(&[-1, 0, 1]) * &RatPoly::from_i64s(&[-3, 0, 1]);
        assert_eq!(midpoint_product(&p), w);

        let p = RatPoly::new(vec![int(-35), int(-36), rat(49, 2), rat(-14, 3), rat(1, 4)]);
        let w = midpoint_product(&p);
        assert_eq!(w.degree(), Some(2));
        let alpha = -to_f64(&w.coeff(0));
        assert!((5.5..=11.0).contains(&alpha), "{alpha}");
        assert!(is_dulac_pair(&p, &DulacPair::new(int(1), w).unwrap()).0);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(DulacPair::new(int(0), RatPoly::one()).is_err());
        assert!(DulacPair::new(int(1), RatPoly::zero()).is_err());
    }
}
