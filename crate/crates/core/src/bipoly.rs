//! Sparse bivariate polynomials over ℚ, the right-hand sides of planar
//! systems, and elimination of `y` by Sylvester resultants.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{format_rat, rat::to_f64, Rat, RatPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Map from exponent pair `(i, j)` (for `x^i y^j`) to a nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiPolyError {
    #[error("both polynomials are constant in y")]
    BothConstantInY,
    #[error("resultant of a zero polynomial")]
    ZeroInput,
    #[error("system has a constant term, so the origin is not a singular point")]
    OriginNotSingular,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        Self::from_terms([((i, j), c)])
    }

    pub fn x() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    /// Lifts a univariate polynomial into the named variable.
    pub fn from_univariate(p: &RatPoly, var: Var) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| {
            let k = k as u32;
            let e = match var {
                Var::X => (k, 0),
                Var::Y => (0, k),
            };
            (e, c.clone())
        }))
    }

    /// `u(x² + y²)`.
    pub fn radial(u: &RatPoly) -> Self {
        let s = &(&Self::x() * &Self::x()) + &(&Self::y() * &Self::y());
        u.coeffs().iter().rev().fold(Self::zero(), |acc, c| &(&acc * &s) + &Self::constant(c.clone()))
    }

    fn add_term(&mut self, e: (u32, u32), c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| if var == Var::X { i } else { j }).max()
    }

    /// Smallest total degree among stored monomials.
    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| (*e, a * c)))
    }

    pub fn partial(&self, var: Var) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(&(i, j), c)| {
            let (k, e) = match var {
                Var::X => (i, (i.wrapping_sub(1), j)),
                Var::Y => (j, (i, j.wrapping_sub(1))),
            };
            (k > 0).then(|| (e, c * Rat::from_integer(BigInt::from(k))))
        }))
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        (0..=self.degree_in(Var::Y).unwrap_or(0))
            .rev()
            .fold(Rat::zero(), |acc, j| acc * y + self.coeff_in_y(j).eval(x))
    }

    /// Horner evaluation in `y` over Horner evaluation in `x`.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let Some(dy) = self.degree_in(Var::Y) else {
            return 0.0;
        };
        let mut rows = vec![Vec::<f64>::new(); dy as usize + 1];
        for (&(i, j), c) in &self.terms {
            let row = &mut rows[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, 0.0);
            }
            row[i as usize] = to_f64(c);
        }
        rows.iter().rev().fold(0.0, |acc, row| acc * y + row.iter().rev().fold(0.0, |a, c| a * x + c))
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn coeff_in_y(&self, j: u32) -> RatPoly {
        let mut coeffs = Vec::new();
        for (&(i, jj), c) in &self.terms {
            if jj == j {
                if coeffs.len() <= i as usize {
                    coeffs.resize(i as usize + 1, Rat::zero());
                }
                coeffs[i as usize] = c.clone();
            }
        }
        RatPoly::new(coeffs)
    }

    /// `p(x0, y)` as a polynomial in `y`.
    pub fn specialize_x(&self, x0: &Rat) -> RatPoly {
        let dy = self.degree_in(Var::Y).unwrap_or(0);
        RatPoly::new((0..=dy).map(|j| self.coeff_in_y(j).eval(x0)).collect())
    }

    /// `p(x, y0)` as a polynomial in `x`.
    pub fn specialize_y(&self, y0: &Rat) -> RatPoly {
        let dx = self.degree_in(Var::X).unwrap_or(0);
        let mut coeffs = vec![Rat::zero(); dx as usize + 1];
        for (&(i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..j {
                t *= y0;
            }
            coeffs[i as usize] += t;
        }
        RatPoly::new(coeffs)
    }

    /// Compiles to a flat form for fast repeated floating-point evaluation.
    pub fn to_f64(&self) -> BiPolyF64 {
        BiPolyF64::new(self)
    }
}

/// Floating-point copy of a [`BiPoly`] with cached power tables.
#[derive(Debug, Clone)]
pub struct BiPolyF64 {
    terms: Vec<(f64, usize, usize)>,
    dx: usize,
    dy: usize,
}

impl BiPolyF64 {
    fn new(p: &BiPoly) -> Self {
        BiPolyF64 {
            terms: p.terms.iter().map(|(&(i, j), c)| (to_f64(c), i as usize, j as usize)).collect(),
            dx: p.degree_in(Var::X).unwrap_or(0) as usize,
            dy: p.degree_in(Var::Y).unwrap_or(0) as usize,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut xp = [1.0f64; 32];
        let mut yp = [1.0f64; 32];
        if self.dx < 32 && self.dy < 32 {
            for k in 1..=self.dx {
                xp[k] = xp[k - 1] * x;
            }
            for k in 1..=self.dy {
                yp[k] = yp[k - 1] * y;
            }
            self.terms.iter().map(|&(c, i, j)| c * xp[i] * yp[j]).sum()
        } else {
            self.terms.iter().map(|&(c, i, j)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
        }
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|((i, j), _)| (i + j, std::cmp::Reverse(*i)));
        for (n, (&(i, j), c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mono = match (i, j) {
                (0, 0) => String::new(),
                _ => {
                    let part = |v: &str, e: u32| match e {
                        0 => String::new(),
                        1 => v.to_string(),
                        e => format!("{v}^{e}"),
                    };
                    [part("x", i), part("y", j)]
                        .into_iter()
                        .filter(|s| !s.is_empty())
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            };
            if mono.is_empty() {
                write!(f, "{}", format_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{} {mono}", format_rat(&mag))?;
            }
        }
        Ok(())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(&-Rat::one())
    }
}

/// A planar polynomial vector field `ẋ = P, ẏ = Q` with a singular point at
/// the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    p: BiPoly,
    q: BiPoly,
}

impl SystemSpec {
    pub fn new(p: BiPoly, q: BiPoly) -> Result<Self, BiPolyError> {
        if !p.coeff(0, 0).is_zero() || !q.coeff(0, 0).is_zero() {
            return Err(BiPolyError::OriginNotSingular);
        }
        Ok(SystemSpec { p, q })
    }

    pub fn p(&self) -> &BiPoly {
        &self.p
    }

    pub fn q(&self) -> &BiPoly {
        &self.q
    }

    /// Total degree `n = max(deg P, deg Q)`.
    pub fn degree(&self) -> u32 {
        self.p.total_degree().unwrap_or(0).max(self.q.total_degree().unwrap_or(0))
    }

    /// `∂P/∂x + ∂Q/∂y`
    pub fn divergence(&self) -> BiPoly {
        &self.p.partial(Var::X) + &self.q.partial(Var::Y)
    }

    /// `(P, Q) + ε (P̃, Q̃)`
    pub fn perturbed(&self, eps: &Rat, pt: &BiPoly, qt: &BiPoly) -> Result<Self, BiPolyError> {
        Self::new(&self.p + &pt.scale(eps), &self.q + &qt.scale(eps))
    }
}

/// Resultant with respect to `y`, as a polynomial in `x`.
///
/// Determinant of the Sylvester matrix whose entries are polynomials in `x`,
/// computed by Bareiss fraction-free elimination.
pub fn resultant_y(p: &BiPoly, q: &BiPoly) -> Result<RatPoly, BiPolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(BiPolyError::ZeroInput);
    }
    let m = p.degree_in(Var::Y).unwrap() as usize;
    let n = q.degree_in(Var::Y).unwrap() as usize;
    if m == 0 && n == 0 {
        return Err(BiPolyError::BothConstantInY);
    }
    let size = m + n;
    let pc: Vec<RatPoly> = (0..=m).rev().map(|j| p.coeff_in_y(j as u32)).collect();
    let qc: Vec<RatPoly> = (0..=n).rev().map(|j| q.coeff_in_y(j as u32)).collect();
    let mut mat = vec![vec![RatPoly::zero(); size]; size];
    for row in 0..n {
        for (k, c) in pc.iter().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in qc.iter().enumerate() {
            mat[n + row][row + k] = c.clone();
        }
    }
    Ok(bareiss_det(mat))
}

/// Fraction-free determinant over ℚ[x].
pub fn bareiss_det(mut a: Vec<Vec<RatPoly>>) -> RatPoly {
    let n = a.len();
    if n == 0 {
        return RatPoly::one();
    }
    let mut negate = false;
    let mut prev = RatPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return RatPoly::zero();
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = RatPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
