//! The concrete systems the certifier is calibrated against: the worked
//! degree-5 system and the four parametric families, built exactly.

use crate::bipoly::{BiPoly, SystemSpec};
use crate::exactalg::rat::{int, rat};
use crate::exactalg::{Rat, RatPoly};
use crate::polarize::rotational_system;

fn with_extra(base: SystemSpec, dp: BiPoly, dq: BiPoly) -> SystemSpec {
    SystemSpec::new(base.p() + &dp, base.q() + &dq).expect("no constant terms added")
}

fn mono(c: &Rat, i: u32, j: u32) -> BiPoly {
    BiPoly::monomial(c.clone(), i, j)
}

/// The degree-5 system with exactly two limit cycles.
pub fn system_1_3() -> SystemSpec {
    let p = BiPoly::from_terms([
        ((0, 1), int(-1)),
        ((1, 0), int(4)),
        ((3, 0), rat(-49, 10)),
        ((1, 2), rat(-26, 5)),
        ((2, 2), rat(1, 5)),
        ((5, 0), int(1)),
        ((3, 2), int(2)),
        ((1, 4), int(1)),
    ]);
    let q = BiPoly::from_terms([
        ((1, 0), int(1)),
        ((0, 1), int(4)),
        ((2, 1), rat(-23, 5)),
        ((0, 3), int(-5)),
        ((1, 3), rat(-1, 5)),
        ((0, 4), rat(-2, 15)),
        ((4, 1), int(1)),
        ((2, 3), int(2)),
        ((0, 5), int(1)),
    ]);
    SystemSpec::new(p, q).unwrap()
}

/// `u = 1 − s`, `v = 1 + 2s` plus `a xy + b xy²` and `c y² + d x³`.
pub fn example1(a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> SystemSpec {
    with_extra(
        rotational_system(&RatPoly::from_i64s(&[1, -1]), &RatPoly::from_i64s(&[1, 2])),
        &mono(a, 1, 1) + &mono(b, 1, 2),
        &mono(c, 0, 2) + &mono(d, 3, 0),
    )
}

/// `u = (1 − s)(2 − s)`, `v = 1` plus `a x²y + b x²y²` and `c xy²`.
pub fn example2(a: &Rat, b: &Rat, c: &Rat) -> SystemSpec {
    with_extra(
        rotational_system(&RatPoly::from_i64s(&[2, -3, 1]), &RatPoly::one()),
        &mono(a, 2, 1) + &mono(b, 2, 2),
        mono(c, 1, 2),
    )
}

/// `u = (1 − s)(2 − s)`, `v = 1 − s` plus `a x⁴ + b x²y²`.
pub fn example3(a: &Rat, b: &Rat) -> SystemSpec {
    with_extra(
        rotational_system(&RatPoly::from_i64s(&[2, -3, 1]), &RatPoly::from_i64s(&[1, -1])),
        &mono(a, 4, 0) + &mono(b, 2, 2),
        BiPoly::zero(),
    )
}

/// `u = (1 − s)(2 − s)(3 − s)`, `v = 2 − s` plus `a x²y³`.
pub fn example4(a: &Rat) -> SystemSpec {
    with_extra(
        rotational_system(&RatPoly::from_i64s(&[6, -11, 6, -1]), &RatPoly::from_i64s(&[2, -1])),
        mono(a, 2, 3),
        BiPoly::zero(),
    )
}

/// The families at the parameter values used in the worked examples.
pub fn all_fixed() -> Vec<SystemSpec> {
    vec![
        system_1_3(),
        example1(&int(1), &rat(-1, 2), &int(1), &rat(1, 2)),
        example2(&rat(1, 8), &rat(1, 15), &rat(1, 20)),
        example3(&rat(1, 20), &rat(1, 15)),
        example4(&rat(1, 34)),
    ]
}
