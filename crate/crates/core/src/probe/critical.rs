//! Critical points from the resultant in `y`: exact isolation of the
//! `x`-roots, then Newton refinement of candidate `y` values.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bipoly::{resultant_y, BiPoly, BiPolyError, SystemSpec, Var};
use crate::exactalg::rat::to_f64;
use crate::exactalg::{real_roots_isolated, Rat, RatPoly};

use super::ProbeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    OriginExact,
    RefinedNumeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    /// `max(|P|, |Q|)` at the point.
    pub residual: f64,
    pub status: PointStatus,
}

const RESIDUAL_MAX: f64 = 1e-10;
const Y_MERGE: f64 = 1e-3;

/// All critical points with `|x|, |y| ≤ bound`. The origin is always first.
pub fn critical_points(sys: &SystemSpec, bound: f64) -> Result<Vec<CriticalPoint>, ProbeError> {
    let res = match resultant_y(sys.p(), sys.q()) {
        Ok(r) if !r.is_zero() => r,
        Ok(_) | Err(BiPolyError::ZeroInput) => return Err(ProbeError::DegenerateResultant),
        Err(BiPolyError::BothConstantInY) => return critical_points_swapped(sys, bound),
        Err(e) => return Err(ProbeError::InvalidArgument(e.to_string())),
    };
    let newton = Newton::new(sys);
    let width = Rat::new(BigInt::one(), BigInt::one() << 64usize);
    let mut out = vec![CriticalPoint { x: 0.0, y: 0.0, residual: 0.0, status: PointStatus::OriginExact }];
    let xs = real_roots_isolated(&res).map_err(|_| ProbeError::DegenerateResultant)?;
    for iv in xs {
        let iv = iv.refined(&width);
        let xr = iv.midpoint();
        if to_f64(&xr).abs() > bound + 1.0 {
            continue;
        }
        let x0 = to_f64(&xr);
        let mut on_root: Vec<CriticalPoint> = Vec::new();
        for y0 in y_candidates(sys, &xr) {
            if let Some((x, y, residual)) = newton.solve(x0, y0) {
                // every critical point projects onto a root of the resultant
                let off_root = (x - x0).abs() > 1e-9 * (1.0 + x0.abs());
                if off_root || residual > RESIDUAL_MAX || x.abs() > bound || y.abs() > bound {
                    continue;
                }
                // Newton stalls short of degenerate points, leaving a ghost
                // beside the true one on the same vertical line
                match on_root.iter_mut().find(|p| (p.y - y).abs() < Y_MERGE * (1.0 + y.abs())) {
                    Some(p) if p.residual > residual => {
                        *p = CriticalPoint { x, y, residual, status: PointStatus::RefinedNumeric }
                    }
                    Some(_) => {}
                    None => {
                        on_root.push(CriticalPoint { x, y, residual, status: PointStatus::RefinedNumeric })
                    }
                }
            }
        }
        for p in on_root {
            if !out.iter().any(|q| (q.x - p.x).hypot(q.y - p.y) < 1e-7) {
                out.push(p);
            }
        }
    }
    out[1..].sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(out)
}

// When neither P nor Q depends on y, eliminate x instead.
fn critical_points_swapped(sys: &SystemSpec, bound: f64) -> Result<Vec<CriticalPoint>, ProbeError> {
    let swap = |b: &BiPoly| BiPoly::from_terms(b.terms().map(|(&(i, j), c)| ((j, i), c.clone())));
    let swapped = SystemSpec::new(swap(sys.p()), swap(sys.q()))
        .map_err(|e| ProbeError::InvalidArgument(e.to_string()))?;
    let mut pts = critical_points(&swapped, bound)?;
    for p in &mut pts {
        std::mem::swap(&mut p.x, &mut p.y);
    }
    Ok(pts)
}

/// Real roots in `y` of `P(x₀, ·)`, `Q(x₀, ·)` and their `y`-derivatives,
/// the last catching double roots that rounding of `x₀` may have split.
fn y_candidates(sys: &SystemSpec, x0: &Rat) -> Vec<f64> {
    let width = Rat::new(BigInt::one(), BigInt::one() << 64usize);
    let (gp, gq) = (sys.p().specialize_x(x0), sys.q().specialize_x(x0));
    let mut out = Vec::new();
    for h in [gp.clone(), gq.clone(), gp.derivative(), gq.derivative()] {
        if h.degree().unwrap_or(0) == 0 {
            continue;
        }
        if let Ok(roots) = real_roots_isolated(&h) {
            out.extend(roots.into_iter().map(|iv| iv.refined(&width).approx()));
        }
    }
    out
}

struct Newton {
    f: [BiPoly; 2],
    jac: [[BiPoly; 2]; 2],
}

impl Newton {
    fn new(sys: &SystemSpec) -> Self {
        let (p, q) = (sys.p().clone(), sys.q().clone());
        let jac = [[p.partial(Var::X), p.partial(Var::Y)], [q.partial(Var::X), q.partial(Var::Y)]];
        Newton { f: [p, q], jac }
    }

    fn residual(&self, x: f64, y: f64) -> f64 {
        self.f[0].eval_f64(x, y).abs().max(self.f[1].eval_f64(x, y).abs())
    }

    fn solve(&self, mut x: f64, mut y: f64) -> Option<(f64, f64, f64)> {
        // Newton crawls towards degenerate points, so keep an accurate start
        let start = self.residual(x, y);
        if start < 1e-13 {
            return Some((x, y, start));
        }
        for _ in 0..60 {
            let (f0, f1) = (self.f[0].eval_f64(x, y), self.f[1].eval_f64(x, y));
            if f0.abs().max(f1.abs()) < 1e-15 {
                break;
            }
            let a = self.jac[0][0].eval_f64(x, y);
            let b = self.jac[0][1].eval_f64(x, y);
            let c = self.jac[1][0].eval_f64(x, y);
            let d = self.jac[1][1].eval_f64(x, y);
            let det = a * d - b * c;
            if det.abs() < 1e-300 {
                break;
            }
            let dx = (d * f0 - b * f1) / det;
            let dy = (a * f1 - c * f0) / det;
            x -= dx;
            y -= dy;
            if !x.is_finite() || !y.is_finite() {
                return None;
            }
            if dx.abs().max(dy.abs()) < 1e-15 * (1.0 + x.abs().max(y.abs())) {
                break;
            }
        }
        Some((x, y, self.residual(x, y)))
    }
}

/// Degree of the resultant, for diagnostics.
pub fn resultant_degree(sys: &SystemSpec) -> Option<usize> {
    resultant_y(sys.p(), sys.q()).ok().and_then(|r: RatPoly| r.degree())
}
