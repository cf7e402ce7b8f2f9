//! Seeded randomized property suites shared by the `properties` tests and
//! the acceptance runner. Each check draws one instance from the generator
//! and returns a description of the first violation it sees.

#![allow(dead_code)]

use cyclecert::bipoly::{BiPoly, SystemSpec};
use cyclecert::certify::{build_m, dulac_defect, is_dulac_pair, k_grid, phi_majorant, propose_pairs};
use cyclecert::certify::{DulacPair, PairProposal};
use cyclecert::exactalg::rat::{int, rat, to_f64};
use cyclecert::exactalg::{count_roots, real_roots_isolated, Rat, RatPoly, RootRange};
use cyclecert::polarize::to_polar;
use cyclecert::trigpoly::{FourierSlice, TrigRadialPoly};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

pub const SUITES: &[(&str, Check)] = &[
    ("simple real roots give a negative p p'' - p'^2", real_rooted_discriminant),
    ("defect of r^2 p'(r^2) matches the closed form", defect_closed_form),
    ("defect is linear in w", defect_scaling),
    ("sturm counts match planted roots", sturm_counts),
    ("isolating intervals bracket planted roots", isolation_brackets),
    ("slice majorant bounds samples", slice_majorant_sound),
    ("polar form agrees with the cartesian one", cartesian_round_trip),
    ("double positive root rules out every pair", double_root_rejected),
    ("M matches its cartesian formula and stays below Phi", m_below_phi),
];

pub const INSTANCES: usize = 200;

/// Runs `n` instances with seeds derived from `seed`; the error names the
/// failing instance.
pub fn run(check: Check, seed: u64, n: usize) -> Result<(), String> {
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64));
        check(&mut rng).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(())
}

fn small_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn distinct_rats(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64, den: i64) -> Vec<Rat> {
    let mut out: Vec<Rat> = Vec::new();
    while out.len() < n {
        let q = rat(rng.gen_range(lo..=hi), rng.gen_range(1..=den));
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

fn nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let q = small_rat(rng, 9, 5);
        if !q.is_zero() {
            return q;
        }
    }
}

fn random_bipoly(rng: &mut ChaCha8Rng, max_terms: usize, min_deg: u32, max_deg: u32) -> BiPoly {
    let terms = rng.gen_range(1..=max_terms);
    BiPoly::from_terms((0..terms).map(|_| {
        let d = rng.gen_range(min_deg..=max_deg);
        let i = rng.gen_range(0..=d);
        ((i, d - i), small_rat(rng, 6, 4))
    }))
}

fn with_planted_roots(rng: &mut ChaCha8Rng) -> (RatPoly, Vec<Rat>) {
    let n = rng.gen_range(1..=5);
    let roots = distinct_rats(rng, n, -30, 30, 6);
    let mut p = RatPoly::from_roots(nonzero_rat(rng), &roots);
    if rng.gen_bool(0.5) {
        let twice = roots.choose(rng).unwrap().clone();
        p = &p * &RatPoly::from_roots(int(1), &[twice]);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let c = rat(rng.gen_range(1..=20), rng.gen_range(1..=4));
        p = &p * &RatPoly::new(vec![c, int(0), int(1)]);
    }
    (p, roots)
}

fn real_rooted_discriminant(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(2..=6);
    let roots = distinct_rats(rng, n, -20, 20, 5);
    let p = RatPoly::from_roots(nonzero_rat(rng), &roots);
    let (d1, d2) = (p.derivative(), p.derivative().derivative());
    let g = &(&p * &d2) - &(&d1 * &d1);
    let real = count_roots(&g, &RootRange::RealLine).map_err(|e| e.to_string())?;
    if real != 0 {
        return Err(format!("{} has {real} real roots", g.display("s")));
    }
    if !g.leading().is_some_and(|c| c.is_negative()) {
        return Err(format!("{} has a nonnegative leading coefficient", g.display("s")));
    }
    Ok(())
}

fn random_p(rng: &mut ChaCha8Rng) -> RatPoly {
    let n = rng.gen_range(1..=5);
    RatPoly::new((0..=n).map(|_| small_rat(rng, 9, 4)).collect())
}

fn defect_closed_form(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let p = random_p(rng);
    let k = rat(rng.gen_range(1..=24), rng.gen_range(1..=12));
    let w = p.derivative().substitute_square().shift_up(2);
    let (ps, dps, ddps) = (
        p.substitute_square(),
        p.derivative().substitute_square(),
        p.derivative().derivative().substitute_square(),
    );
    let inner = &(&ps * &ddps) - &(&dps * &dps).scale(&k);
    let expected =
        &inner.shift_up(4).scale(&int(2)) + &(&ps * &dps).shift_up(2).scale(&(int(2) * (int(1) - &k)));
    let got = dulac_defect(&p, &k, &w);
    if got != expected {
        return Err(format!(
            "p = {}, k = {k}: {} vs {}",
            p.display("s"),
            got.display("r"),
            expected.display("r")
        ));
    }
    Ok(())
}

fn defect_scaling(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let p = random_p(rng);
    let k = rat(rng.gen_range(1..=24), rng.gen_range(1..=12));
    let w = RatPoly::new((0..=rng.gen_range(0..6)).map(|_| small_rat(rng, 9, 4)).collect());
    let c = nonzero_rat(rng);
    if dulac_defect(&p, &k, &w.scale(&c)) != dulac_defect(&p, &k, &w).scale(&c) {
        return Err(format!("p = {}, w = {}, c = {c}", p.display("s"), w.display("r")));
    }
    Ok(())
}

fn sturm_counts(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (p, roots) = with_planted_roots(rng);
    let total = count_roots(&p, &RootRange::RealLine).map_err(|e| e.to_string())?;
    if total != roots.len() {
        return Err(format!("{}: {total} real roots, planted {}", p.display("x"), roots.len()));
    }
    for _ in 0..4 {
        let mut ab = [small_rat(rng, 40, 3), small_rat(rng, 40, 3)];
        ab.sort();
        let [a, b] = ab;
        let expected = roots.iter().filter(|r| **r > a && **r <= b).count();
        let got = count_roots(&p, &RootRange::OpenClosed(a.clone(), b.clone())).map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!("{} on ({a}, {b}]: {got}, planted {expected}", p.display("x")));
        }
    }
    Ok(())
}

fn isolation_brackets(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (p, mut roots) = with_planted_roots(rng);
    roots.sort();
    let ivs = real_roots_isolated(&p).map_err(|e| e.to_string())?;
    if ivs.len() != roots.len() {
        return Err(format!("{} intervals for {} roots", ivs.len(), roots.len()));
    }
    let sq = p.square_free();
    for (iv, r) in ivs.iter().zip(&roots) {
        if !(iv.lo <= *r && *r <= iv.hi) {
            return Err(format!("[{}, {}] misses {r}", iv.lo, iv.hi));
        }
        // plain bisection on the square-free part as the reference
        let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
        if lo != hi {
            let s_lo = sq.eval(&lo).is_positive();
            let eps = rat(1, 1 << 40);
            while &hi - &lo > eps {
                let mid = (&lo + &hi) / int(2);
                let v = sq.eval(&mid);
                if v.is_zero() {
                    lo = mid;
                    break;
                }
                if v.is_positive() == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        if (to_f64(&lo) - to_f64(r)).abs() > 1e-9 {
            return Err(format!("bisection gives {} for planted {r}", to_f64(&lo)));
        }
    }
    Ok(())
}

fn random_slice(rng: &mut ChaCha8Rng) -> FourierSlice {
    let mut s = FourierSlice::constant(small_rat(rng, 9, 4));
    for _ in 0..rng.gen_range(0..=6) {
        let j = rng.gen_range(1..=8);
        let c = small_rat(rng, 9, 4);
        let h = if rng.gen_bool(0.5) { FourierSlice::cos(j, c) } else { FourierSlice::sin(j, c) };
        s = &s + &h;
    }
    s
}

fn slice_majorant_sound(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = random_slice(rng);
    let (hi, lo) = (to_f64(&s.l1_majorant()), to_f64(&s.l1_minorant()));
    for _ in 0..10_000 {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let v = s.eval_f64(theta);
        if v > hi + 1e-9 * (1.0 + hi.abs()) || v < lo - 1e-9 * (1.0 + lo.abs()) {
            return Err(format!("value {v} at {theta} outside [{lo}, {hi}]"));
        }
    }
    Ok(())
}

fn cartesian_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let b = random_bipoly(rng, 8, 0, 6);
    let t = TrigRadialPoly::from_cartesian(&b);
    for _ in 0..5 {
        let r = rng.gen_range(0.0..2.5f64);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let scale: f64 = b.terms().map(|(&(i, j), c)| to_f64(c).abs() * r.powi((i + j) as i32)).sum();
        let (a, c) = (t.eval_f64(r, theta), b.eval_f64(x, y));
        if (a - c).abs() > 1e-9 * (1.0 + scale) {
            return Err(format!("at r = {r}, theta = {theta}: polar {a}, cartesian {c}"));
        }
    }
    Ok(())
}

fn double_root_rejected(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = rat(rng.gen_range(1..=30), rng.gen_range(1..=6));
    let q = loop {
        let q = RatPoly::new((0..=rng.gen_range(0..=3)).map(|_| small_rat(rng, 9, 4)).collect());
        if !q.is_zero() && !q.eval(&a).is_zero() {
            break q;
        }
    };
    let p = &RatPoly::from_roots(int(1), &[a.clone(), a.clone()]) * &q;
    if !matches!(propose_pairs(&p), PairProposal::NoDulacPairPossible { .. }) {
        return Err(format!("{}: proposal did not report impossibility", p.display("s")));
    }
    let ks = k_grid(12);
    for _ in 0..5 {
        let k = ks.choose(rng).unwrap().clone();
        let w = RatPoly::new((0..=rng.gen_range(1..6)).map(|_| small_rat(rng, 9, 4)).collect());
        if w.is_zero() {
            continue;
        }
        let pair = DulacPair::new(k, w).unwrap();
        if is_dulac_pair(&p, &pair).0 {
            return Err(format!("{} accepted {:?}", p.display("s"), pair));
        }
    }
    Ok(())
}

fn m_below_phi(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sys = loop {
        let (p, q) = (random_bipoly(rng, 5, 1, 4), random_bipoly(rng, 5, 1, 4));
        if let Ok(s) = SystemSpec::new(p, q) {
            break s;
        }
    };
    let k = k_grid(12).choose(rng).unwrap().clone();
    let w = loop {
        let w = RatPoly::new((0..=rng.gen_range(1..5)).map(|_| small_rat(rng, 9, 4)).collect());
        if !w.is_zero() {
            break w;
        }
    };
    let pair = DulacPair::new(k.clone(), w.clone()).unwrap();
    let ps = to_polar(&sys).map_err(|e| e.to_string())?;
    let m = build_m(&ps, &pair);
    let (_, phi) = phi_majorant(&m);
    let div = sys.divergence();
    let (kf, dw) = (to_f64(&k), w.derivative());
    for _ in 0..5 {
        let r = rng.gen_range(0.01..2.0f64);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let radial = (x * sys.p().eval_f64(x, y) + y * sys.q().eval_f64(x, y)) / r;
        let direct = radial * dw.eval_f64(r) - kf * div.eval_f64(x, y) * w.eval_f64(r);
        let got = m.eval_f64(r, theta);
        let scale = 1.0 + direct.abs() + got.abs() + phi.abs_coeffs().eval_f64(r);
        if (got - direct).abs() > 1e-9 * scale {
            return Err(format!("M = {got}, cartesian formula {direct} at r = {r}, theta = {theta}"));
        }
        if got > phi.eval_f64(r) + 1e-9 * scale {
            return Err(format!("M = {got} above Phi = {} at r = {r}", phi.eval_f64(r)));
        }
    }
    Ok(())
}
