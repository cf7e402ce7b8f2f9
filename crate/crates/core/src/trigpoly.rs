//! Finite Fourier–radial expansions
//! `Σ_i r^i (a_i0 + Σ_j a_ij cos jθ + b_ij sin jθ)` with exact rational
//! coefficients.
//!
//! Polar forms of cartesian polynomials live here, together with θ-averaging
//! and the coefficient-sum (L1) majorant used to bound each slice uniformly
//! in θ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bipoly::BiPoly;
use crate::exactalg::{format_rat, rat::to_f64, Rat, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrigPolyError {
    #[error("slice r^0 is present, cannot divide by r")]
    NotDivisibleByR,
}

fn half() -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(2))
}

fn put(map: &mut BTreeMap<u32, Rat>, j: u32, c: Rat) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(j).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&j);
    }
}

/// Trigonometric polynomial `a0 + Σ_j (cos_j cos jθ + sin_j sin jθ)`.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct FourierSlice {
    a0: Rat,
    cos: BTreeMap<u32, Rat>,
    sin: BTreeMap<u32, Rat>,
}

impl FourierSlice {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        FourierSlice { a0: c, ..Self::default() }
    }

    pub fn cos(j: u32, c: Rat) -> Self {
        let mut s = Self::zero();
        s.add_cos(j as i64, c);
        s
    }

    pub fn sin(j: u32, c: Rat) -> Self {
        let mut s = Self::zero();
        s.add_sin(j as i64, c);
        s
    }

    pub fn a0(&self) -> &Rat {
        &self.a0
    }

    pub fn cos_coeffs(&self) -> &BTreeMap<u32, Rat> {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &BTreeMap<u32, Rat> {
        &self.sin
    }

    pub fn cos_coeff(&self, j: u32) -> Rat {
        if j == 0 {
            return self.a0.clone();
        }
        self.cos.get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn sin_coeff(&self, j: u32) -> Rat {
        self.sin.get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.cos.is_empty() && self.sin.is_empty()
    }

    pub fn max_harmonic(&self) -> u32 {
        self.cos.keys().chain(self.sin.keys()).copied().max().unwrap_or(0)
    }

    /// Harmonic indices present, including 0 when `a0 ≠ 0`.
    pub fn harmonics(&self) -> impl Iterator<Item = u32> + '_ {
        let zero = (!self.a0.is_zero()).then_some(0);
        zero.into_iter().chain(self.cos.keys().copied()).chain(self.sin.keys().copied())
    }

    // cos(−j) = cos j
    fn add_cos(&mut self, j: i64, c: Rat) {
        match j {
            0 => self.a0 += c,
            _ => put(&mut self.cos, j.unsigned_abs() as u32, c),
        }
    }

    // sin(−j) = −sin j, sin 0 = 0
    fn add_sin(&mut self, j: i64, c: Rat) {
        match j.signum() {
            0 => {}
            1 => put(&mut self.sin, j as u32, c),
            _ => put(&mut self.sin, j.unsigned_abs() as u32, -c),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FourierSlice {
            a0: &self.a0 * c,
            cos: self.cos.iter().map(|(j, v)| (*j, v * c)).collect(),
            sin: self.sin.iter().map(|(j, v)| (*j, v * c)).collect(),
        }
    }

    fn cos_terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        let zero = (!self.a0.is_zero()).then_some((0i64, &self.a0));
        zero.into_iter().chain(self.cos.iter().map(|(j, c)| (*j as i64, c)))
    }

    fn sin_terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.sin.iter().map(|(j, c)| (*j as i64, c))
    }

    /// `d/dθ`: `cos jθ → −j sin jθ`, `sin jθ → j cos jθ`.
    pub fn d_dtheta(&self) -> Self {
        let mut out = Self::zero();
        for (j, c) in &self.cos {
            out.add_sin(*j as i64, -(c * Rat::from_integer(BigInt::from(*j))));
        }
        for (j, c) in &self.sin {
            out.add_cos(*j as i64, c * Rat::from_integer(BigInt::from(*j)));
        }
        out
    }

    /// `a0 + Σ (|a_j| + |b_j|)`, an upper bound of the slice over all θ.
    pub fn l1_majorant(&self) -> Rat {
        self.cos.values().chain(self.sin.values()).fold(self.a0.clone(), |acc, c| acc + c.abs())
    }

    /// `a0 − Σ (|a_j| + |b_j|)`, a lower bound over all θ.
    pub fn l1_minorant(&self) -> Rat {
        self.cos.values().chain(self.sin.values()).fold(self.a0.clone(), |acc, c| acc - c.abs())
    }

    pub fn eval_f64(&self, theta: f64) -> f64 {
        let mut v = to_f64(&self.a0);
        for (j, c) in &self.cos {
            v += to_f64(c) * (*j as f64 * theta).cos();
        }
        for (j, c) in &self.sin {
            v += to_f64(c) * (*j as f64 * theta).sin();
        }
        v
    }
}

impl Add for &FourierSlice {
    type Output = FourierSlice;
    fn add(self, rhs: &FourierSlice) -> FourierSlice {
        let mut out = self.clone();
        for (j, c) in rhs.cos_terms() {
            out.add_cos(j, c.clone());
        }
        for (j, c) in rhs.sin_terms() {
            out.add_sin(j, c.clone());
        }
        out
    }
}

impl Neg for &FourierSlice {
    type Output = FourierSlice;
    fn neg(self) -> FourierSlice {
        self.scale(&-Rat::one())
    }
}

impl Mul for &FourierSlice {
    type Output = FourierSlice;
    fn mul(self, rhs: &FourierSlice) -> FourierSlice {
        let h = half();
        let mut out = FourierSlice::zero();
        for (a, ca) in self.cos_terms() {
            for (b, cb) in rhs.cos_terms() {
                // cos a cos b = ½[cos(a−b) + cos(a+b)]
                let c = &h * ca * cb;
                out.add_cos(a - b, c.clone());
                out.add_cos(a + b, c);
            }
            for (b, sb) in rhs.sin_terms() {
                // cos a sin b = ½[sin(a+b) − sin(a−b)]
                let c = &h * ca * sb;
                out.add_sin(a + b, c.clone());
                out.add_sin(a - b, -c);
            }
        }
        for (a, sa) in self.sin_terms() {
            for (b, cb) in rhs.cos_terms() {
                // sin a cos b = ½[sin(a+b) + sin(a−b)]
                let c = &h * sa * cb;
                out.add_sin(a + b, c.clone());
                out.add_sin(a - b, c);
            }
            for (b, sb) in rhs.sin_terms() {
                // sin a sin b = ½[cos(a−b) − cos(a+b)]
                let c = &h * sa * sb;
                out.add_cos(a - b, c.clone());
                out.add_cos(a + b, -c);
            }
        }
        out
    }
}

impl fmt::Debug for FourierSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FourierSlice({self})")
    }
}

impl fmt::Display for FourierSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.a0.is_zero() {
            parts.push(format_rat(&self.a0));
        }
        let harmonics: std::collections::BTreeSet<u32> =
            self.cos.keys().chain(self.sin.keys()).copied().collect();
        for j in harmonics {
            if let Some(c) = self.cos.get(&j) {
                parts.push(format!("{} cos {j}θ", format_rat(c)));
            }
            if let Some(c) = self.sin.get(&j) {
                parts.push(format!("{} sin {j}θ", format_rat(c)));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Σ_i r^i · slice_i(θ)` with no zero slices stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct TrigRadialPoly {
    slices: BTreeMap<u32, FourierSlice>,
}

impl TrigRadialPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_slice(0, FourierSlice::constant(Rat::one()))
    }

    pub fn from_slice(i: u32, s: FourierSlice) -> Self {
        let mut out = Self::zero();
        out.add_slice(i, s);
        out
    }

    pub fn from_slices<I: IntoIterator<Item = (u32, FourierSlice)>>(items: I) -> Self {
        let mut out = Self::zero();
        for (i, s) in items {
            out.add_slice(i, s);
        }
        out
    }

    /// θ-free expansion of a polynomial in `r`.
    pub fn from_radial(p: &RatPoly) -> Self {
        Self::from_slices(
            p.coeffs().iter().enumerate().map(|(i, c)| (i as u32, FourierSlice::constant(c.clone()))),
        )
    }

    /// `cos θ` (radial power 0).
    pub fn cos_theta() -> Self {
        Self::from_slice(0, FourierSlice::cos(1, Rat::one()))
    }

    /// `sin θ` (radial power 0).
    pub fn sin_theta() -> Self {
        Self::from_slice(0, FourierSlice::sin(1, Rat::one()))
    }

    fn add_slice(&mut self, i: u32, s: FourierSlice) {
        if s.is_zero() {
            return;
        }
        let merged = match self.slices.remove(&i) {
            Some(old) => &old + &s,
            None => s,
        };
        if !merged.is_zero() {
            self.slices.insert(i, merged);
        }
    }

    /// Exact expansion of `p(r cos θ, r sin θ)`.
    pub fn from_cartesian(p: &BiPoly) -> Self {
        let mut cos_pows = vec![FourierSlice::constant(Rat::one())];
        let mut sin_pows = vec![FourierSlice::constant(Rat::one())];
        let cos1 = FourierSlice::cos(1, Rat::one());
        let sin1 = FourierSlice::sin(1, Rat::one());
        let mut out = Self::zero();
        for (&(i, j), c) in p.terms() {
            while cos_pows.len() <= i as usize {
                let next = cos_pows.last().unwrap() * &cos1;
                cos_pows.push(next);
            }
            while sin_pows.len() <= j as usize {
                let next = sin_pows.last().unwrap() * &sin1;
                sin_pows.push(next);
            }
            let term = (&cos_pows[i as usize] * &sin_pows[j as usize]).scale(c);
            out.add_slice(i + j, term);
        }
        out
    }

    pub fn slices(&self) -> &BTreeMap<u32, FourierSlice> {
        &self.slices
    }

    pub fn slice(&self, i: u32) -> FourierSlice {
        self.slices.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn max_radial_power(&self) -> Option<u32> {
        self.slices.keys().next_back().copied()
    }

    pub fn min_radial_power(&self) -> Option<u32> {
        self.slices.keys().next().copied()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_slices(self.slices.iter().map(|(i, s)| (*i, s.scale(c))))
    }

    pub fn d_dr(&self) -> Self {
        Self::from_slices(
            self.slices
                .iter()
                .filter(|(i, _)| **i > 0)
                .map(|(i, s)| (i - 1, s.scale(&Rat::from_integer(BigInt::from(*i))))),
        )
    }

    pub fn d_dtheta(&self) -> Self {
        Self::from_slices(self.slices.iter().map(|(i, s)| (*i, s.d_dtheta())))
    }

    pub fn div_r(&self) -> Result<Self, TrigPolyError> {
        if self.slices.contains_key(&0) {
            return Err(TrigPolyError::NotDivisibleByR);
        }
        Ok(Self::from_slices(self.slices.iter().map(|(i, s)| (i - 1, s.clone()))))
    }

    pub fn mul_r(&self, m: u32) -> Self {
        Self::from_slices(self.slices.iter().map(|(i, s)| (i + m, s.clone())))
    }

    /// `(1/2π) ∫₀^{2π} t dθ` as a polynomial in `r`.
    pub fn theta_mean(&self) -> RatPoly {
        let deg = self.max_radial_power().unwrap_or(0) as usize;
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (i, s) in &self.slices {
            coeffs[*i as usize] = s.a0.clone();
        }
        RatPoly::new(coeffs)
    }

    /// `Σ_i m_i r^i` with `m_i` the L1 majorant of slice `i`; bounds `t(r, θ)`
    /// from above for every `r ≥ 0`.
    pub fn l1_majorant(&self) -> RatPoly {
        let deg = self.max_radial_power().unwrap_or(0) as usize;
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (i, s) in &self.slices {
            coeffs[*i as usize] = s.l1_majorant();
        }
        RatPoly::new(coeffs)
    }

    /// Collapses the radial variable at an exact radius.
    pub fn at_radius(&self, r: &Rat) -> FourierSlice {
        let mut out = FourierSlice::zero();
        for (i, s) in &self.slices {
            let mut rp = Rat::one();
            for _ in 0..*i {
                rp *= r;
            }
            out = &out + &s.scale(&rp);
        }
        out
    }

    pub fn eval_f64(&self, r: f64, theta: f64) -> f64 {
        let deg = self.max_radial_power().unwrap_or(0);
        let mut acc = 0.0;
        for i in (0..=deg).rev() {
            acc *= r;
            if let Some(s) = self.slices.get(&i) {
                acc += s.eval_f64(theta);
            }
        }
        acc
    }
}

impl Add for &TrigRadialPoly {
    type Output = TrigRadialPoly;
    fn add(self, rhs: &TrigRadialPoly) -> TrigRadialPoly {
        let mut out = self.clone();
        for (i, s) in &rhs.slices {
            out.add_slice(*i, s.clone());
        }
        out
    }
}

impl Sub for &TrigRadialPoly {
    type Output = TrigRadialPoly;
    fn sub(self, rhs: &TrigRadialPoly) -> TrigRadialPoly {
        self + &(-rhs)
    }
}

impl Neg for &TrigRadialPoly {
    type Output = TrigRadialPoly;
    fn neg(self) -> TrigRadialPoly {
        self.scale(&-Rat::one())
    }
}

impl Mul for &TrigRadialPoly {
    type Output = TrigRadialPoly;
    fn mul(self, rhs: &TrigRadialPoly) -> TrigRadialPoly {
        let mut out = TrigRadialPoly::zero();
        for (i, a) in &self.slices {
            for (j, b) in &rhs.slices {
                out.add_slice(i + j, a * b);
            }
        }
        out
    }
}

impl fmt::Debug for TrigRadialPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TrigRadialPoly({self})")
    }
}

impl fmt::Display for TrigRadialPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.slices.iter().map(|(i, s)| format!("r^{i}·({s})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::{int, rat};

    #[test]
    fn cartesian_examples() {
        let x = TrigRadialPoly::from_cartesian(&BiPoly::x());
        assert_eq!(x, TrigRadialPoly::from_slice(1, FourierSlice::cos(1, int(1))));

        let s = &(&BiPoly::x() * &BiPoly::x()) + &(&BiPoly::y() * &BiPoly::y());
        assert_eq!(
            TrigRadialPoly::from_cartesian(&s),
            TrigRadialPoly::from_slice(2, FourierSlice::constant(int(1)))
        );

        // x²y = r³(¼ sin θ + ¼ sin 3θ)
        let x2y = BiPoly::monomial(int(1), 2, 1);
        let t = TrigRadialPoly::from_cartesian(&x2y);
        let expected = TrigRadialPoly::from_slice(
            3,
            &FourierSlice::sin(1, rat(1, 4)) + &FourierSlice::sin(3, rat(1, 4)),
        );
        assert_eq!(t, expected);
        for k in 0..64 {
            let th = k as f64 * std::f64::consts::TAU / 64.0;
            let direct = 8.0 * th.cos().powi(2) * th.sin();
            assert!((t.eval_f64(2.0, th) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn product_identities() {
        let rc = TrigRadialPoly::from_slice(1, FourierSlice::cos(1, int(1)));
        let rs = TrigRadialPoly::from_slice(1, FourierSlice::sin(1, int(1)));
        assert_eq!(
            &rc * &rc,
            TrigRadialPoly::from_slice(
                2,
                &FourierSlice::constant(rat(1, 2)) + &FourierSlice::cos(2, rat(1, 2))
            )
        );
        assert_eq!(&rc * &TrigRadialPoly::one(), rc);
        assert_eq!(&rc * &rs, TrigRadialPoly::from_slice(2, FourierSlice::sin(2, rat(1, 2))));
        // sin² + cos² = 1
        let one = &(&rc * &rc) + &(&rs * &rs);
        assert_eq!(one, TrigRadialPoly::from_slice(2, FourierSlice::constant(int(1))));
    }

    #[test]
    fn derivatives() {
        let t = TrigRadialPoly::from_slice(2, FourierSlice::cos(2, int(1)));
        assert_eq!(t.d_dtheta(), TrigRadialPoly::from_slice(2, FourierSlice::sin(2, int(-2))));
        let t = TrigRadialPoly::from_slice(3, FourierSlice::sin(1, int(1)));
        assert_eq!(t.div_r().unwrap(), TrigRadialPoly::from_slice(2, FourierSlice::sin(1, int(1))));
        assert_eq!(TrigRadialPoly::one().div_r(), Err(TrigPolyError::NotDivisibleByR));
        // d/dr (r u(r²)) = u(r²) + 2r² u'(r²) with u = 1 − 3s + s²
        let u = RatPoly::from_i64s(&[1, -3, 1]);
        let ru = TrigRadialPoly::from_radial(&u.substitute_square().shift_up(1));
        let expected =
            &u.substitute_square() + &u.derivative().substitute_square().shift_up(2).scale(&int(2));
        assert_eq!(ru.d_dr(), TrigRadialPoly::from_radial(&expected));
    }

    #[test]
    fn theta_mean_examples() {
        let t = TrigRadialPoly::from_slice(3, FourierSlice::sin(3, int(1)));
        assert!(t.theta_mean().is_zero());
        let ru = RatPoly::from_i64s(&[0, 1, 0, -1]);
        assert_eq!(TrigRadialPoly::from_radial(&ru).theta_mean(), ru);
    }

    #[test]
    fn l1_examples() {
        // (1/75)(6cosθ + 9cos3θ − 15cos5θ − 2sinθ + 9sin3θ − 5sin5θ) r⁷
        let s = [
            FourierSlice::cos(1, int(6)),
            FourierSlice::cos(3, int(9)),
            FourierSlice::cos(5, int(-15)),
            FourierSlice::sin(1, int(-2)),
            FourierSlice::sin(3, int(9)),
            FourierSlice::sin(5, int(-5)),
        ]
        .iter()
        .fold(FourierSlice::zero(), |a, b| &a + b)
        .scale(&rat(1, 75));
        let t = TrigRadialPoly::from_slice(7, s);
        assert_eq!(t.l1_majorant(), RatPoly::monomial(rat(46, 75), 7));

        // (1/2560)(−25740 + 16432/5 cos2θ + 316 cos4θ) r⁴
        let s = (&(&FourierSlice::constant(int(-25740)) + &FourierSlice::cos(2, rat(16432, 5)))
            + &FourierSlice::cos(4, int(316)))
            .scale(&rat(1, 2560));
        let t = TrigRadialPoly::from_slice(4, s);
        assert_eq!(t.l1_majorant(), RatPoly::monomial(rat(-3459, 400), 4));

        let t = TrigRadialPoly::from_slice(2, FourierSlice::constant(int(-3)));
        assert_eq!(t.l1_majorant(), RatPoly::monomial(int(-3), 2));
    }

    #[test]
    fn eval_basics() {
        assert_eq!(TrigRadialPoly::one().eval_f64(3.0, 1.0), 1.0);
        let rc = TrigRadialPoly::from_slice(1, FourierSlice::cos(1, int(1)));
        assert_eq!(rc.eval_f64(2.0, 0.0), 2.0);
        assert_eq!(rc.at_radius(&int(2)), FourierSlice::cos(1, int(2)));
    }
}
