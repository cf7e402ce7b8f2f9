//! Dormand–Prince 5(4) with dense output, on the augmented state
//! `(x, y, φ, ∫div)` where `φ` is the unwrapped polar angle.

use crate::bipoly::{SystemSpec, Var};
use crate::exactalg::rat::to_f64;

use super::ProbeError;

pub type State = [f64; 4];

/// Floating-point vector field sharing one power table between `P`, `Q`
/// and the divergence.
#[derive(Debug, Clone)]
pub struct Field {
    p: Vec<(f64, usize, usize)>,
    q: Vec<(f64, usize, usize)>,
    div: Vec<(f64, usize, usize)>,
    deg: usize,
}

impl Field {
    pub fn new(sys: &SystemSpec) -> Self {
        let flat = |b: &crate::bipoly::BiPoly| -> Vec<(f64, usize, usize)> {
            b.terms().map(|(&(i, j), c)| (to_f64(c), i as usize, j as usize)).collect()
        };
        let div = &sys.p().partial(Var::X) + &sys.q().partial(Var::Y);
        Field { p: flat(sys.p()), q: flat(sys.q()), div: flat(&div), deg: sys.degree() as usize }
    }

    /// `(P, Q, div)` at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        if self.deg >= 32 {
            let sum = |t: &[(f64, usize, usize)]| {
                t.iter().map(|&(c, i, j)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
            };
            return (sum(&self.p), sum(&self.q), sum(&self.div));
        }
        let mut xp = [1.0; 32];
        let mut yp = [1.0; 32];
        for k in 1..=self.deg {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        let sum = |t: &[(f64, usize, usize)]| t.iter().map(|&(c, i, j)| c * xp[i] * yp[j]).sum();
        (sum(&self.p), sum(&self.q), sum(&self.div))
    }

    pub fn rhs(&self, s: &State) -> State {
        let (x, y) = (s[0], s[1]);
        let (p, q, div) = self.eval(x, y);
        let rr = x * x + y * y;
        let phi_dot = if rr > 0.0 { (x * q - y * p) / rr } else { 0.0 };
        [p, q, phi_dot, div]
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Accepted step with its continuous extension.
#[derive(Debug, Clone)]
pub struct Step {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    rcont: [State; 5],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Dense output at `t ∈ [t0, t0 + h]`.
    pub fn at(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

/// Adaptive integrator; `next_step` advances by one accepted step.
pub struct Dopri5<'a> {
    field: &'a Field,
    pub t: f64,
    pub y: State,
    k1: State,
    h: f64,
    rtol: f64,
    atol: f64,
    pub steps: usize,
}

impl<'a> Dopri5<'a> {
    pub fn new(field: &'a Field, t0: f64, y0: State, tol: f64) -> Self {
        let k1 = field.rhs(&y0);
        let speed = k1[..3].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let h = (0.01 * tol.powf(0.2) / speed.max(1e-6)).clamp(1e-8, 0.1);
        Dopri5 { field, t: t0, y: y0, k1, h, rtol: tol, atol: tol, steps: 0 }
    }

    fn try_step(&self, h: f64) -> (State, [State; 7], f64) {
        let mut k = [[0.0; 4]; 7];
        k[0] = self.k1;
        let mut ys = self.y;
        for s in 1..7 {
            ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..4 {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = self.field.rhs(&ys);
        }
        let mut err = 0.0;
        for i in 0..4 {
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = self.atol + self.rtol * self.y[i].abs().max(ys[i].abs());
            err += (e / sc).powi(2);
        }
        (ys, k, (err / 4.0).sqrt())
    }

    pub fn next_step(&mut self, h_max: f64) -> Result<Step, ProbeError> {
        let mut rejects = 0;
        loop {
            let h = self.h.min(h_max);
            if !(h > 1e-14 * self.t.abs().max(1.0)) || rejects > 60 {
                return Err(ProbeError::StepFailure { t: self.t });
            }
            let (y1, k, err) = self.try_step(h);
            if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
                self.h = h * 0.1;
                rejects += 1;
                continue;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
            if err > 1.0 {
                self.h = h * fac.min(1.0);
                rejects += 1;
                continue;
            }
            let y0 = self.y;
            let r2 = sub(&y1, &y0);
            let mut r3 = [0.0; 4];
            let mut r4 = [0.0; 4];
            let mut r5 = [0.0; 4];
            for i in 0..4 {
                r3[i] = h * k[0][i] - r2[i];
                r4[i] = r2[i] - h * k[6][i] - r3[i];
                r5[i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
            }
            let step = Step { t0: self.t, h, y0, y1, rcont: [y0, r2, r3, r4, r5] };
            self.t += h;
            self.y = y1;
            self.k1 = k[6];
            self.h = h * if rejects > 0 { fac.min(1.0) } else { fac };
            self.steps += 1;
            return Ok(step);
        }
    }
}

fn sub(a: &State, b: &State) -> State {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Initial state for a start point: the angle component starts at `atan2`.
pub fn initial_state(x: f64, y: f64) -> State {
    [x, y, y.atan2(x), 0.0]
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<Step>,
}

impl Trajectory {
    /// `(t, x, y)` at every accepted step boundary.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        if let Some(s) = self.steps.first() {
            out.push((s.t0, s.y0[0], s.y0[1]));
        }
        out.extend(self.steps.iter().map(|s| (s.t1(), s.y1[0], s.y1[1])));
        out
    }

    pub fn end(&self) -> Option<State> {
        self.steps.last().map(|s| s.y1)
    }

    /// Dense output at any `t` inside the integrated range.
    pub fn at(&self, t: f64) -> Option<State> {
        let i = self.steps.partition_point(|s| s.t1() < t);
        self.steps.get(i).filter(|s| t >= s.t0).map(|s| s.at(t))
    }
}

/// Integrates from `(x0, y0)` over `[0, t_end]` with relative and absolute
/// tolerance `tol`, failing once the radius exceeds `r_guard`.
pub fn integrate(
    field: &Field,
    start: (f64, f64),
    t_end: f64,
    tol: f64,
    r_guard: f64,
) -> Result<Trajectory, ProbeError> {
    if !(tol > 0.0) {
        return Err(ProbeError::InvalidArgument("tol must be positive".into()));
    }
    let mut ode = Dopri5::new(field, 0.0, initial_state(start.0, start.1), tol);
    let mut steps = Vec::new();
    while ode.t < t_end {
        let step = ode.next_step(t_end - ode.t)?;
        let r = step.y1[0].hypot(step.y1[1]);
        steps.push(step);
        if r > r_guard {
            return Err(ProbeError::Escape { t: ode.t, r });
        }
    }
    Ok(Trajectory { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::BiPoly;
    use crate::exactalg::RatPoly;
    use crate::polarize::rotational_system;

    #[test]
    fn rigid_rotation_quarter_turn() {
        let sys = SystemSpec::new(-&BiPoly::y(), BiPoly::x()).unwrap();
        let f = Field::new(&sys);
        let tr = integrate(&f, (1.0, 0.0), std::f64::consts::FRAC_PI_2, 1e-12, 10.0).unwrap();
        let e = tr.end().unwrap();
        assert!(e[0].abs() < 1e-8 && (e[1] - 1.0).abs() < 1e-8, "{e:?}");
        assert!((e[2] - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
        let mid = tr.at(std::f64::consts::FRAC_PI_4).unwrap();
        assert!((mid[0] - mid[1]).abs() < 1e-8);
    }

    #[test]
    fn logistic_radius() {
        // u = 1 − s: ṙ = r(1 − r²) and r² is logistic with rate 2
        let sys = rotational_system(&RatPoly::from_i64s(&[1, -1]), &RatPoly::one());
        let f = Field::new(&sys);
        let r0: f64 = 0.5;
        let tr = integrate(&f, (r0, 0.0), 1.0, 1e-12, 10.0).unwrap();
        let e = tr.end().unwrap();
        let r2 = e[0] * e[0] + e[1] * e[1];
        let g = r0 * r0 * 2f64.exp();
        assert!((r2 - g / (1.0 - r0 * r0 + g)).abs() < 1e-7);

        // u = 1 − s²: ṙ = r(1 − r⁴) and r⁴ is logistic with rate 4
        let sys = rotational_system(&RatPoly::from_i64s(&[1, 0, -1]), &RatPoly::one());
        let f = Field::new(&sys);
        let tr = integrate(&f, (r0, 0.0), 1.0, 1e-12, 10.0).unwrap();
        let e = tr.end().unwrap();
        let r4 = (e[0] * e[0] + e[1] * e[1]).powi(2);
        let g = r0.powi(4) * 4f64.exp();
        assert!((r4 - g / (1.0 - r0.powi(4) + g)).abs() < 1e-7);
    }

    #[test]
    fn invariant_circle_persists() {
        let sys = rotational_system(&RatPoly::from_i64s(&[1, 0, -1]), &RatPoly::one());
        let f = Field::new(&sys);
        let tr = integrate(&f, (0.6, 0.8), 20.0, 1e-12, 10.0).unwrap();
        for (_, x, y) in tr.points() {
            assert!((x.hypot(y) - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn escape_is_reported() {
        // ṙ = r³ blows up from r = 1 at t = 1/2
        let sys = rotational_system(&RatPoly::from_i64s(&[0, 1]), &RatPoly::one());
        let f = Field::new(&sys);
        assert!(matches!(integrate(&f, (1.0, 0.0), 1.0, 1e-10, 50.0), Err(ProbeError::Escape { .. })));
    }
}
