//! Return map on a ray `{θ = α, r > 0}` and the displacement scan.

use rayon::prelude::*;
use serde::Serialize;

use crate::bipoly::SystemSpec;
use crate::certify::Stability;

use super::ode::{Dopri5, Field, State};
use super::{critical_points, ProbeError, ProbeOptions};

const TWO_PI: f64 = std::f64::consts::TAU;

/// One completed revolution from the section back to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Return {
    pub r1: f64,
    pub period: f64,
    pub divergence_integral: f64,
    /// `+1` counterclockwise, `−1` clockwise.
    pub direction: i8,
}

/// Poincaré map of a fixed system on the ray at `angle`.
#[derive(Debug, Clone)]
pub struct ReturnMap {
    field: Field,
    angle: f64,
    opts: ProbeOptions,
    r_guard: f64,
}

impl ReturnMap {
    pub fn new(sys: &SystemSpec, angle: f64, opts: ProbeOptions, r_guard: f64) -> Self {
        ReturnMap { field: Field::new(sys), angle, opts, r_guard }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Integrates from `r0` on the section until the unwrapped angle has
    /// advanced by `±2π`.
    pub fn run(&self, r0: f64) -> Result<Return, ProbeError> {
        self.run_with_tol(r0, self.opts.tol)
    }

    pub fn run_with_tol(&self, r0: f64, tol: f64) -> Result<Return, ProbeError> {
        self.run_tracked(r0, tol, &mut None)
    }

    /// Like [`ReturnMap::run`], also recording the radius range of the arc.
    pub fn run_with_range(&self, r0: f64) -> Result<(Return, (f64, f64)), ProbeError> {
        let mut range = Some((r0, r0));
        let ret = self.run_tracked(r0, self.opts.tol, &mut range)?;
        Ok((ret, range.unwrap()))
    }

    fn run_tracked(&self, r0: f64, tol: f64, range: &mut Option<(f64, f64)>) -> Result<Return, ProbeError> {
        if !(r0 > 0.0) {
            return Err(ProbeError::InvalidArgument("r0 must be positive".into()));
        }
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let y0: State = [r0 * c, r0 * s, self.angle, 0.0];
        let phi_dot = self.field.rhs(&y0)[2];
        if phi_dot.abs() < 1e-12 {
            return Err(ProbeError::SectionTangency { r: r0 });
        }
        let dir = phi_dot.signum();
        let g = |st: &State| dir * (st[2] - self.angle) - TWO_PI;

        let mut ode = Dopri5::new(&self.field, 0.0, y0, tol);
        while ode.t < self.opts.t_max {
            let step = ode.next_step(f64::INFINITY)?;
            let r = step.y1[0].hypot(step.y1[1]);
            if r > self.r_guard {
                return Err(ProbeError::Escape { t: step.t1(), r });
            }
            if r < 1e-10 * r0.max(1e-300) {
                return Err(ProbeError::NoReturn { r0 });
            }
            let done = g(&step.y1) >= 0.0;
            if let Some((lo, hi)) = range.as_mut() {
                for i in 1..=8 {
                    let st = step.at(step.t0 + step.h * i as f64 / 8.0);
                    if done && g(&st) > 0.0 {
                        break;
                    }
                    let rr = st[0].hypot(st[1]);
                    *lo = lo.min(rr);
                    *hi = hi.max(rr);
                }
            }
            if !done {
                continue;
            }
            let (mut lo, mut hi) = (step.t0, step.t1());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(&step.at(mid)) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let st = step.at(t);
            if self.field.rhs(&st)[2].abs() < 1e-9 {
                return Err(ProbeError::SectionTangency { r: st[0].hypot(st[1]) });
            }
            return Ok(Return {
                r1: st[0].hypot(st[1]),
                period: t,
                divergence_integral: st[3],
                direction: dir as i8,
            });
        }
        Err(ProbeError::NoReturn { r0 })
    }

    /// `D(r) = Π(r) − r`, with escapes mapped to `+∞`.
    pub fn displacement(&self, r0: f64) -> Displacement {
        match self.run(r0) {
            Ok(ret) => Displacement::Value { d: ret.r1 - r0, direction: ret.direction },
            Err(ProbeError::Escape { .. }) => {
                let dir = self.field.rhs(&[r0 * self.angle.cos(), r0 * self.angle.sin(), 0.0, 0.0])[2];
                Displacement::Escaped { direction: dir.signum() as i8 }
            }
            Err(e) => Displacement::Failed(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Displacement {
    Value { d: f64, direction: i8 },
    Escaped { direction: i8 },
    Failed(String),
}

impl Displacement {
    /// Sign-bearing value for bracketing together with the rotation
    /// direction, or `None` when the sample is unusable.
    fn bracket_value(&self) -> Option<(f64, i8)> {
        match *self {
            Displacement::Value { d, direction } => Some((d, direction)),
            Displacement::Escaped { direction } => Some((f64::INFINITY, direction)),
            Displacement::Failed(_) => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.bracket_value().map(|(d, _)| d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleFinding {
    pub section_radius: f64,
    pub stability: Stability,
    pub return_derivative: f64,
    pub divergence_integral: f64,
    pub period_estimate: f64,
    /// Smallest and largest distance from the origin along the orbit.
    pub radius_range: (f64, f64),
    /// False when the finite difference fell below its noise floor; the
    /// derivative is then the floor (or its inverse), a bound rather than
    /// an estimate.
    pub derivative_resolved: bool,
    /// The return-map derivative and the divergence integral agree on
    /// stability.
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct CycleScan {
    pub section_angle: f64,
    pub samples: Vec<(f64, Displacement)>,
    pub findings: Vec<CycleFinding>,
}

/// Picks a section ray that no critical point other than the origin lies
/// on, rotating by golden-ratio multiples of a full turn.
pub fn choose_section_angle(points: &[(f64, f64)], r_max: f64) -> Result<f64, ProbeError> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for k in 0..=8 {
        let angle = (k as f64 * golden * TWO_PI) % TWO_PI;
        let blocked = points.iter().any(|&(x, y)| {
            let r = x.hypot(y);
            if r < 1e-9 || r > r_max {
                return false;
            }
            let d = (y.atan2(x) - angle).rem_euclid(TWO_PI);
            d.min(TWO_PI - d) < 1e-3
        });
        if !blocked {
            return Ok(angle);
        }
    }
    Err(ProbeError::NonTransversalSection)
}

/// Scans `D(r)` on log-spaced radii in `(0, r_max]` in both time
/// directions. Attracting brackets (`D` falling through zero between samples
/// rotating the same way) of the forward map are stable cycles; those of the
/// time-reversed map are unstable cycles. Each is refined by bisection.
pub fn scan_cycles(sys: &SystemSpec, r_max: f64, opts: &ProbeOptions) -> Result<CycleScan, ProbeError> {
    if !(r_max > 0.0) {
        return Err(ProbeError::InvalidArgument("r_max must be positive".into()));
    }
    let angle = match critical_points(sys, 2.0 * r_max) {
        Ok(pts) => {
            let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.x, p.y)).collect();
            choose_section_angle(&xy, r_max)?
        }
        Err(e) => {
            log::warn!("critical points unavailable ({e}); using the positive x-axis");
            0.0
        }
    };
    let guard = opts.escape_factor * r_max;
    let forward = ReturnMap::new(sys, angle, opts.clone(), guard);
    let backward = ReturnMap::new(&time_reversed(sys), angle, opts.clone(), guard);
    let n = opts.samples.max(2);
    let r_min = r_max * 1e-3;
    let radii: Vec<f64> = (0..n).map(|i| r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64)).collect();

    let (samples, mut findings) = scan_direction(&forward, &radii, false, opts);
    let (_, unstable) = scan_direction(&backward, &radii, true, opts);
    findings.extend(unstable);
    findings.sort_by(|a, b| a.section_radius.total_cmp(&b.section_radius));
    findings.dedup_by(|a, b| (a.section_radius - b.section_radius).abs() < 10.0 * opts.root_tol);
    Ok(CycleScan { section_angle: angle, samples, findings })
}

/// Cycles found by [`scan_cycles`].
pub fn find_cycles(
    sys: &SystemSpec,
    r_max: f64,
    opts: &ProbeOptions,
) -> Result<Vec<CycleFinding>, ProbeError> {
    Ok(scan_cycles(sys, r_max, opts)?.findings)
}

/// `(−P, −Q)`: the same orbits traversed backwards.
pub fn time_reversed(sys: &SystemSpec) -> SystemSpec {
    SystemSpec::new(-sys.p(), -sys.q()).expect("negation keeps the origin singular")
}

fn scan_direction(
    map: &ReturnMap,
    radii: &[f64],
    reversed: bool,
    opts: &ProbeOptions,
) -> (Vec<(f64, Displacement)>, Vec<CycleFinding>) {
    let samples: Vec<(f64, Displacement)> = radii.par_iter().map(|&r| (r, map.displacement(r))).collect();
    for (r, s) in &samples {
        if let Displacement::Failed(e) = s {
            log::debug!("sample r = {r} (reversed: {reversed}): {e}");
        }
    }
    let brackets: Vec<(f64, f64, f64, f64)> = samples
        .windows(2)
        .filter_map(|w| {
            let (ra, a) = (w[0].0, w[0].1.bracket_value()?);
            let (rb, b) = (w[1].0, w[1].1.bracket_value()?);
            (a.1 == b.1 && a.0 > 0.0 && b.0 <= 0.0).then_some((ra, a.0, rb, b.0))
        })
        .collect();
    let findings = brackets
        .par_iter()
        .filter_map(|&(ra, da, rb, db)| refine(map, ra, da, rb, db, reversed, opts))
        .collect();
    (samples, findings)
}

fn refine(
    map: &ReturnMap,
    mut a: f64,
    mut da: f64,
    mut b: f64,
    mut db: f64,
    reversed: bool,
    opts: &ProbeOptions,
) -> Option<CycleFinding> {
    let value = |r: f64| map.displacement(r).value();
    while b - a > opts.root_tol {
        let m = 0.5 * (a + b);
        let dm = value(m)?;
        if dm > 0.0 {
            a = m;
            da = dm;
        } else {
            b = m;
            db = dm;
        }
    }
    let r = if da.is_finite() && db.is_finite() && db != da {
        (a - da * (b - a) / (db - da)).clamp(a, b)
    } else {
        0.5 * (a + b)
    };
    let (ret, radius_range) = map.run_with_range(r).ok()?;
    if (ret.r1 - r).abs() > 1e-6 * r.max(1.0) {
        log::debug!("discarding discontinuity of D near r = {r}");
        return None;
    }
    let h = 1e-5 * r;
    let plus = map.run(r + h).ok()?.r1;
    let minus = map.run(r - h).ok()?.r1;
    // the return map is increasing, and differences below the integration
    // error carry no information
    let floor = 100.0 * opts.tol * r.max(1.0) / h;
    let raw = (plus - minus) / (2.0 * h);
    let derivative_resolved = raw > floor;
    let slope = raw.max(floor);
    let attracting = slope < 1.0;
    let (return_derivative, divergence_integral) =
        if reversed { (1.0 / slope, -ret.divergence_integral) } else { (slope, ret.divergence_integral) };
    let stability = if reversed { Stability::Unstable } else { Stability::Stable };
    let by_divergence = divergence_integral < 0.0;
    Some(CycleFinding {
        section_radius: r,
        stability,
        return_derivative,
        divergence_integral,
        period_estimate: ret.period,
        radius_range,
        derivative_resolved,
        consistent: attracting && by_divergence == !reversed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::RatPoly;
    use crate::polarize::rotational_system;

    fn unit_circle() -> SystemSpec {
        rotational_system(&RatPoly::from_i64s(&[1, 0, -1]), &RatPoly::one())
    }

    #[test]
    fn return_on_invariant_circle() {
        let map = ReturnMap::new(&unit_circle(), 0.0, ProbeOptions::default(), 100.0);
        let ret = map.run(1.0).unwrap();
        assert!((ret.r1 - 1.0).abs() < 1e-8);
        assert!((ret.period - TWO_PI).abs() < 1e-8);
        assert_eq!(ret.direction, 1);
        // div = 2u(r²) + 2r²u′(r²) = −4 on r = 1
        assert!((ret.divergence_integral + 4.0 * TWO_PI).abs() < 1e-6);
    }

    #[test]
    fn return_matches_closed_form() {
        let map = ReturnMap::new(&unit_circle(), 0.0, ProbeOptions::default(), 100.0);
        let r0: f64 = 0.5;
        let g = r0.powi(4) * (4.0 * TWO_PI).exp();
        let exact = (g / (1.0 - r0.powi(4) + g)).powf(0.25);
        assert!((map.run(r0).unwrap().r1 - exact).abs() < 1e-7);
    }

    #[test]
    fn rotated_section_and_clockwise_flow() {
        let sys = rotational_system(&RatPoly::from_i64s(&[1, 0, -1]), &RatPoly::from_i64s(&[-1]));
        let map = ReturnMap::new(&sys, 1.0, ProbeOptions::default(), 100.0);
        let ret = map.run(1.0).unwrap();
        assert_eq!(ret.direction, -1);
        assert!((ret.r1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unit_circle_cycle() {
        let found = find_cycles(&unit_circle(), 4.0, &ProbeOptions::default()).unwrap();
        assert_eq!(found.len(), 1);
        let c = &found[0];
        assert!((c.section_radius - 1.0).abs() < 1e-8, "{c:?}");
        assert_eq!(c.stability, Stability::Stable);
        assert!(c.consistent);
        assert!(c.return_derivative.abs() < 1e-4);
        assert!((c.divergence_integral + 4.0 * TWO_PI).abs() < 1e-5);
    }

    #[test]
    fn section_avoids_critical_points() {
        assert_eq!(choose_section_angle(&[(0.0, 0.0), (0.0, 1.0)], 3.0).unwrap(), 0.0);
        let a = choose_section_angle(&[(0.0, 0.0), (1.0, 0.0)], 3.0).unwrap();
        assert!(a > 0.1);
    }
}
