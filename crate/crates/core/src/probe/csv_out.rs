//! CSV tables for external plotting.

use std::io::Write;

use super::{CycleFinding, Displacement, Trajectory};

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for (t, x, y) in traj.points() {
        w.serialize((t, x, y))?;
    }
    w.flush()?;
    Ok(())
}

/// Failed samples are skipped; escapes are written as `inf`.
pub fn write_displacement<W: Write>(out: W, samples: &[(f64, Displacement)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "displacement"])?;
    for (r, d) in samples {
        if let Some(v) = d.value() {
            w.write_record([r.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_findings<W: Write>(out: W, findings: &[CycleFinding]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["radius", "stability", "return_derivative", "divergence_integral"])?;
    for f in findings {
        let stability = match f.stability {
            crate::certify::Stability::Stable => "stable",
            crate::certify::Stability::Unstable => "unstable",
        };
        w.write_record([
            f.section_radius.to_string(),
            stability.to_string(),
            f.return_derivative.to_string(),
            f.divergence_integral.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
