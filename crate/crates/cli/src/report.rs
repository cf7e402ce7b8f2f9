//! Human-readable reports.

use std::fmt::Write;

use cyclecert::certify::{
    Certificate, CyclePrediction, MarginReport, Membership, RingReport, Stability, Verdict, WSign,
};
use cyclecert::exactalg::rat::format_rat;
use cyclecert::exactalg::Rat;
use cyclecert::probe::{CriticalPoint, CycleScan};

fn stability(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    }
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn ring_row(r: &RingReport) -> String {
    let sign = match r.w_sign {
        WSign::Positive => "+",
        WSign::Negative => "-",
    };
    let prediction = match r.cycle_prediction {
        CyclePrediction::None => "none",
        CyclePrediction::AtMostOne => "at most one",
        CyclePrediction::ExactlyOneIfNoCriticalPoints => "one if no critical points",
    };
    let crit = match r.contains_critical_points {
        Membership::Yes => "yes",
        Membership::No => "no",
        Membership::Unknown => "?",
    };
    format!(
        "  {:>5}  {:>16}  {:>16}  {:>4}  {:<26} {:<9} {}\n",
        r.index,
        r.inner_radius.to_string(),
        r.outer_radius.to_string(),
        sign,
        prediction,
        r.stability_if_exists.map_or("-", stability),
        crit
    )
}

pub fn certificate(name: &str, cert: &Certificate) -> String {
    let mut s = String::new();
    let sign = |b: bool| if b { "negative on (0, inf)" } else { "NOT negative on (0, inf)" };
    let _ = writeln!(s, "system: {name} (degree {})", cert.system.degree());
    let _ = writeln!(s, "p(s) = {}", cert.p.display("s"));
    let _ = writeln!(s, "k = {}", format_rat(cert.pair.k()));
    let _ = writeln!(s, "w(r) = {}", cert.pair.w().display("r"));
    let _ = writeln!(s, "p_kw(r) = {}\n  {}", cert.defect.display("r"), sign(cert.defect_witness.negative));
    let _ = writeln!(s, "Phi(r) = {}\n  {}", cert.phi.display("r"), sign(cert.phi_witness.negative));
    let _ = writeln!(s, "m+ = {}", cert.m_plus);
    let _ = writeln!(s, "rings:");
    let _ = writeln!(
        s,
        "  {:>5}  {:>16}  {:>16}  {:>4}  {:<26} {:<9} critical points",
        "index", "inner radius", "outer radius", "w", "cycles", "stability"
    );
    for r in &cert.rings {
        s.push_str(&ring_row(r));
    }
    match &cert.verdict {
        Verdict::Certified => {
            let cycles = plural(cert.m_plus, "limit cycle", "limit cycles");
            let _ = writeln!(s, "verdict: certified, at most {cycles}, all hyperbolic");
            if let Some(lb) = cert.lower_bound {
                let _ = writeln!(s, "guaranteed cycles (lower bound): {lb}");
            }
        }
        Verdict::NotCertified { stage, reason } => {
            let _ = writeln!(s, "verdict: not certified ({}): {reason}", stage.name());
        }
    }
    s
}

pub fn probe(
    name: &str,
    r_max: f64,
    scan: &CycleScan,
    points: &[CriticalPoint],
    cert: Option<&Certificate>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system: {name}");
    let _ = writeln!(s, "section angle {:.6} rad, radii up to {:.6}", scan.section_angle, r_max);
    let _ = writeln!(s, "critical points ({}):", points.len());
    for p in points {
        let _ = writeln!(
            s,
            "  ({:>12.8}, {:>12.8})  |x| = {:.6}  residual {:.1e}",
            p.x,
            p.y,
            p.x.hypot(p.y),
            p.residual
        );
    }
    let _ = writeln!(s, "cycles ({}):", scan.findings.len());
    for f in &scan.findings {
        let ring = cert.and_then(|c| c.ring_at(f.section_radius));
        let agreement = match ring {
            Some(r) if r.stability_if_exists == Some(f.stability) => format!("ring {} agrees", r.index),
            Some(r) => format!("ring {} DISAGREES", r.index),
            None => String::new(),
        };
        let _ = writeln!(
            s,
            "  cycle at radius {:.6} ({}), return derivative {}{:.3e}, divergence integral {:.6}, \
             period {:.4}, radius range [{:.6}, {:.6}] {}",
            f.section_radius,
            stability(f.stability),
            if f.derivative_resolved { "" } else { "beyond " },
            f.return_derivative,
            f.divergence_integral,
            f.period_estimate,
            f.radius_range.0,
            f.radius_range.1,
            agreement
        );
    }
    let _ = writeln!(
        s,
        "found {}, {}",
        plural(scan.findings.len(), "cycle", "cycles"),
        plural(points.len(), "critical point", "critical points")
    );
    s
}

pub struct SweepRow {
    pub value: Rat,
    pub outcome: Result<Certificate, String>,
}

pub fn sweep(name: &str, param: &str, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system: {name}, sweeping {param}");
    let _ = writeln!(s, "  {:>14}  {:<14} {:>5}  {:>8}  reason", param, "verdict", "bound", "k");
    let mut certified = Vec::new();
    for row in rows {
        let value = format_rat(&row.value);
        match &row.outcome {
            Ok(c) => {
                let (verdict, reason) = match &c.verdict {
                    Verdict::Certified => {
                        certified.push(row.value.clone());
                        ("certified", String::new())
                    }
                    Verdict::NotCertified { stage, reason } => {
                        ("not certified", format!("{}: {reason}", stage.name()))
                    }
                };
                let bound = c.upper_bound().map_or("-".into(), |b| b.to_string());
                let _ = writeln!(
                    s,
                    "  {:>14}  {:<14} {:>5}  {:>8}  {}",
                    value,
                    verdict,
                    bound,
                    format_rat(c.pair.k()),
                    reason
                );
            }
            Err(e) => {
                let _ = writeln!(s, "  {:>14}  {:<14} {:>5}  {:>8}  {}", value, "error", "-", "-", e);
            }
        }
    }
    match (certified.iter().min(), certified.iter().max()) {
        (Some(lo), Some(hi)) => {
            let _ = writeln!(
                s,
                "certified for {} of {} values, {param} in [{}, {}]",
                certified.len(),
                rows.len(),
                format_rat(lo),
                format_rat(hi)
            );
        }
        _ => {
            let _ = writeln!(s, "certified for none of {} values", rows.len());
        }
    }
    s
}

pub fn margin(name: &str, rep: &MarginReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system: {name}, perturbation sweep with k = {}", format_rat(&rep.k));
    let _ = writeln!(s, "  {:>14}  {:<14} reason", "eps", "verdict");
    for row in &rep.rows {
        let verdict = if row.certified { "certified" } else { "not certified" };
        let _ = writeln!(
            s,
            "  {:>14}  {:<14} {}",
            format_rat(&row.eps),
            verdict,
            row.reason.as_deref().unwrap_or("")
        );
    }
    let prefix = rep.rows.iter().skip_while(|r| r.certified).all(|r| !r.certified);
    match &rep.largest_certified {
        Some(m) => {
            let _ = writeln!(s, "largest certified |eps|: {}", format_rat(m));
        }
        None => {
            let _ = writeln!(s, "no value certified");
        }
    }
    let _ = writeln!(s, "passes form a prefix of the grid: {}", if prefix { "yes" } else { "no" });
    s
}
