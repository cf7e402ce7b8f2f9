mod support;

use support::{run, INSTANCES};

fn suite(name: &str, seed: u64) {
    let (_, check) = support::SUITES.iter().find(|(n, _)| *n == name).expect("known suite");
    if let Err(e) = run(*check, seed, INSTANCES) {
        panic!("{name}: {e}");
    }
}

#[test]
fn discriminant_of_real_rooted_p_is_negative() {
    suite("simple real roots give a negative p p'' - p'^2", 11);
}

#[test]
fn defect_closed_form() {
    suite("defect of r^2 p'(r^2) matches the closed form", 12);
}

#[test]
fn defect_is_linear_in_w() {
    suite("defect is linear in w", 13);
}

#[test]
fn sturm_counts_match_planted_roots() {
    suite("sturm counts match planted roots", 14);
}

#[test]
fn isolation_matches_bisection() {
    suite("isolating intervals bracket planted roots", 15);
}

#[test]
fn slice_majorant_is_sound() {
    suite("slice majorant bounds samples", 16);
}

#[test]
fn polar_form_round_trip() {
    suite("polar form agrees with the cartesian one", 17);
}

#[test]
fn double_positive_root_has_no_pair() {
    suite("double positive root rules out every pair", 18);
}

#[test]
fn m_matches_cartesian_formula_and_phi_bounds_it() {
    suite("M matches its cartesian formula and stays below Phi", 19);
}
