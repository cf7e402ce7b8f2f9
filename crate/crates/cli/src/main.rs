//! `cyclecert`: certify, probe, sweep and verify planar polynomial systems.
//!
//! Exit codes: 0 certified (or completed), 1 not certified, 2 input error,
//! 3 integration failure.

mod grid;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cyclecert::certdoc::{verify, CertificateDoc, Timing};
use cyclecert::certify::{
    certification_margin, certify, lower_bound, Certificate, CertifyError, DulacPair, Stability,
};
use cyclecert::exactalg::{Rat, RatPoly};
use cyclecert::polarize::{radial_average, to_polar};
use cyclecert::probe::{
    self, critical_points, csv_out, default_r_max, integrate, scan_cycles, time_reversed, CriticalPoint,
    ProbeOptions,
};
use cyclecert::sysfile::{eval_expr, ResolvedSystem, SystemFile};

const CERTIFIED: u8 = 0;
const NOT_CERTIFIED: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INTEGRATION_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cyclecert",
    version,
    about = "Certified upper bounds on limit cycles of planar polynomial systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// System file (JSON).
    file: PathBuf,
    /// Override a parameter, e.g. `--set a=1/34`. Repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Search for (or check) a Dulac pair and report the certified bound.
    Certify {
        #[command(flatten)]
        input: Input,
        /// Exponent k of the Dulac pair; the file's or 1 if only --w is given.
        #[arg(long)]
        k: Option<String>,
        /// Coefficients of w(r), lowest degree first, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// Write the certificate document here.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// No report on stdout; the exit code carries the verdict.
        #[arg(long)]
        quiet: bool,
    },
    /// Locate limit cycles and critical points numerically.
    Probe {
        #[command(flatten)]
        input: Input,
        /// Largest radius scanned on the section.
        #[arg(long)]
        rmax: Option<f64>,
        /// Local error tolerance of the integrator.
        #[arg(long, default_value_t = ProbeOptions::default().tol)]
        tol: f64,
        /// Write displacement, findings and cycle orbits as CSV here.
        #[arg(long, value_name = "DIR")]
        csv: Option<PathBuf>,
    },
    /// Certify once per value of a parameter, or per perturbation size.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Parameter to vary.
        #[arg(long, requires = "grid")]
        param: Option<String>,
        /// `lo:hi:n` or a comma list of values.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Perturbation sizes for the file's rotational family.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "param")]
        eps_grid: Option<String>,
        /// Worker threads.
        #[arg(long, env = "CYCLECERT_JOBS")]
        jobs: Option<usize>,
    },
    /// Re-check a certificate document using exact arithmetic only.
    Verify {
        /// Certificate JSON written by `certify --json`.
        cert: PathBuf,
    },
}

/// A failure that maps to an exit code.
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure { code: INPUT_ERROR, message: message.to_string() }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify { input, k, w, json, quiet } => {
            cmd_certify(&input, k.as_deref(), w.as_deref(), json.as_deref(), quiet)
        }
        Command::Probe { input, rmax, tol, csv } => cmd_probe(&input, rmax, tol, csv.as_deref()),
        Command::Sweep { input, param, grid, eps_grid, jobs } => {
            cmd_sweep(&input, param.as_deref(), grid.as_deref(), eps_grid.as_deref(), jobs)
        }
        Command::Verify { cert } => cmd_verify(&cert),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(input: &Input) -> Result<(SystemFile, ResolvedSystem), Failure> {
    let file = SystemFile::load(&input.file).map_err(input_error)?;
    let overrides = input
        .set
        .iter()
        .map(|s| grid::parse_assignment(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input_error)?;
    let resolved = file.resolve(&overrides).map_err(input_error)?;
    Ok((file, resolved))
}

/// The pair from the flags, falling back on the file for whatever is missing.
fn flag_pair(sys: &ResolvedSystem, k: Option<&str>, w: Option<&str>) -> Result<Option<DulacPair>, Failure> {
    if k.is_none() && w.is_none() {
        return Ok(sys.pair.clone());
    }
    let k = match k {
        Some(text) => eval_expr(text, &sys.params).map_err(|e| input_error(format!("--k: {e}")))?,
        None => sys.pair.as_ref().map_or_else(|| Rat::from_integer(1.into()), |p| p.k().clone()),
    };
    let w = match w {
        Some(text) => RatPoly::new(
            text.split(',')
                .map(|c| eval_expr(c, &sys.params).map_err(|e| input_error(format!("--w: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => match &sys.pair {
            Some(p) => p.w().clone(),
            None => default_w(&sys.system).ok_or_else(|| input_error("p is constant; give --w"))?,
        },
    };
    DulacPair::new(k, w).map(Some).map_err(input_error)
}

/// `r² p′(r²)`, or `None` when `p` is constant.
fn default_w(sys: &cyclecert::bipoly::SystemSpec) -> Option<RatPoly> {
    let p = radial_average(&to_polar(sys).ok()?).ok()?;
    let w = p.derivative().substitute_square().shift_up(2);
    (!w.is_zero()).then_some(w)
}

/// Certifies, falling back on `k = 1, w = r² p′(r²)` when the search finds
/// nothing so that a failing certificate can still be reported.
fn run_certify(sys: &ResolvedSystem, pair: Option<DulacPair>) -> Result<Certificate, Failure> {
    match certify(&sys.system, pair) {
        Ok(cert) => Ok(cert),
        Err(CertifyError::NoDulacPairFound { impossible, tried }) => {
            let e = CertifyError::NoDulacPairFound { impossible, tried };
            log::warn!("{e}");
            let w = default_w(&sys.system)
                .ok_or(Failure { code: NOT_CERTIFIED, message: format!("{e}; p is constant") })?;
            let pair = DulacPair::new(Rat::from_integer(1.into()), w).expect("w is nonzero");
            certify(&sys.system, Some(pair)).map_err(input_error)
        }
        Err(e) => Err(input_error(e)),
    }
}

/// Critical points inside the search disc, as needed for ring membership.
fn annotate_critical_points(cert: &mut Certificate) -> Option<Vec<CriticalPoint>> {
    let bound = default_r_max(cert.pair.w());
    match critical_points(&cert.system, bound) {
        Ok(points) => {
            let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
            lower_bound(cert, &xy);
            Some(points)
        }
        Err(e) => {
            log::warn!("critical points unavailable: {e}");
            None
        }
    }
}

fn cmd_certify(
    input: &Input,
    k: Option<&str>,
    w: Option<&str>,
    json: Option<&Path>,
    quiet: bool,
) -> Result<u8, Failure> {
    let (_, sys) = load(input)?;
    let pair = flag_pair(&sys, k, w)?;
    let start = Instant::now();
    let mut cert = run_certify(&sys, pair)?;
    annotate_critical_points(&mut cert);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    if let Some(out) = json {
        let doc = CertificateDoc::from_certificate(&sys.name, &cert, Some(Timing { elapsed_ms }));
        std::fs::write(out, doc.to_json_pretty() + "\n")
            .map_err(|e| input_error(format!("cannot write {}: {e}", out.display())))?;
    }
    if !quiet {
        print!("{}", report::certificate(&sys.name, &cert));
    }
    if let cyclecert::certify::Verdict::NotCertified { stage, reason } = &cert.verdict {
        eprintln!("not certified at stage {}: {reason}", stage.name());
        return Ok(NOT_CERTIFIED);
    }
    Ok(CERTIFIED)
}

fn cmd_probe(input: &Input, rmax: Option<f64>, tol: f64, csv: Option<&Path>) -> Result<u8, Failure> {
    let (_, sys) = load(input)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(input_error("--tol must lie in (0, 1)"));
    }
    // the certificate, when one exists, supplies the search radius and the rings
    let cert = match certify(&sys.system, sys.pair.clone()) {
        Ok(c) if c.is_certified() => Some(c),
        _ => None,
    };
    let r_max = match rmax {
        Some(r) if r > 0.0 => r,
        Some(_) => return Err(input_error("--rmax must be positive")),
        None => cert
            .as_ref()
            .map(|c| c.pair.w().clone())
            .or_else(|| default_w(&sys.system))
            .map_or(4.0, |w| default_r_max(&w)),
    };
    let opts = ProbeOptions { tol, ..ProbeOptions::default() };
    let points = critical_points(&sys.system, 2.0 * r_max).unwrap_or_else(|e| {
        log::warn!("critical points unavailable: {e}");
        Vec::new()
    });
    let scan = scan_cycles(&sys.system, r_max, &opts)
        .map_err(|e| Failure { code: INTEGRATION_FAILURE, message: e.to_string() })?;
    print!("{}", report::probe(&sys.name, r_max, &scan, &points, cert.as_ref()));

    if let Some(dir) = csv {
        write_csv(dir, &sys, &scan, &opts, r_max)?;
    }
    Ok(CERTIFIED)
}

fn write_csv(
    dir: &Path,
    sys: &ResolvedSystem,
    scan: &probe::CycleScan,
    opts: &ProbeOptions,
    r_max: f64,
) -> Result<(), Failure> {
    let io = |e: &dyn std::fmt::Display| input_error(format!("writing CSV to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(&e))?;
    let create = |name: &str| std::fs::File::create(dir.join(name)).map_err(|e| io(&e));
    csv_out::write_displacement(create("displacement.csv")?, &scan.samples).map_err(|e| io(&e))?;
    csv_out::write_findings(create("findings.csv")?, &scan.findings).map_err(|e| io(&e))?;
    let forward = probe::Field::new(&sys.system);
    // unstable orbits are traced backwards in time, where they attract
    let backward = probe::Field::new(&time_reversed(&sys.system));
    let (c, s) = (scan.section_angle.cos(), scan.section_angle.sin());
    for (n, f) in scan.findings.iter().enumerate() {
        let start = (f.section_radius * c, f.section_radius * s);
        let guard = opts.escape_factor * r_max;
        let field = match f.stability {
            Stability::Stable => &forward,
            Stability::Unstable => &backward,
        };
        let traj = integrate(field, start, f.period_estimate, opts.tol, guard)
            .map_err(|e| Failure { code: INTEGRATION_FAILURE, message: e.to_string() })?;
        csv_out::write_trajectory(create(&format!("cycle_{}.csv", n + 1))?, &traj).map_err(|e| io(&e))?;
    }
    Ok(())
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(input_error("--jobs must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(input_error)
}

fn cmd_sweep(
    input: &Input,
    param: Option<&str>,
    grid_spec: Option<&str>,
    eps_grid: Option<&str>,
    jobs: Option<usize>,
) -> Result<u8, Failure> {
    let (file, base) = load(input)?;
    let pool = thread_pool(jobs)?;
    if let Some(spec) = eps_grid {
        let grid = grid::parse_grid(spec).map_err(input_error)?;
        let fam = base
            .rotational
            .as_ref()
            .ok_or_else(|| input_error("--eps-grid needs a file with a rotational block"))?;
        let rep = pool
            .install(|| certification_margin(&fam.u, &fam.v, &fam.pt, &fam.qt, &grid))
            .map_err(input_error)?;
        print!("{}", report::margin(&base.name, &rep));
        return Ok(if rep.largest_certified.is_some() { CERTIFIED } else { NOT_CERTIFIED });
    }

    let (Some(name), Some(spec)) = (param, grid_spec) else {
        return Err(input_error("sweep needs --param NAME --grid SPEC, or --eps-grid SPEC"));
    };
    if !base.params.contains_key(name) {
        return Err(input_error(format!("unknown parameter {name:?}")));
    }
    let grid = grid::parse_grid(spec).map_err(input_error)?;
    let fixed: Vec<(String, Rat)> =
        input.set.iter().map(|s| grid::parse_assignment(s)).collect::<Result<_, _>>().map_err(input_error)?;
    let rows: Vec<report::SweepRow> = pool.install(|| {
        grid.par_iter()
            .map(|value| {
                let mut overrides = fixed.clone();
                overrides.push((name.to_string(), value.clone()));
                let outcome = file
                    .resolve(&overrides)
                    .map_err(|e| e.to_string())
                    .and_then(|sys| certify(&sys.system, sys.pair).map_err(|e| e.to_string()));
                report::SweepRow { value: value.clone(), outcome }
            })
            .collect()
    });
    print!("{}", report::sweep(&base.name, name, &rows));
    let any = rows.iter().any(|r| matches!(&r.outcome, Ok(c) if c.is_certified()));
    Ok(if any { CERTIFIED } else { NOT_CERTIFIED })
}

fn cmd_verify(path: &Path) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let doc = CertificateDoc::from_json(&text).map_err(input_error)?;
    let rep = verify(&doc).map_err(input_error)?;
    println!("system: {}", doc.system.name);
    println!("defect negative on (0, inf): {}", rep.defect_negative);
    println!("Phi negative on (0, inf):    {}", rep.phi_negative);
    println!("m+ = {}", rep.m_plus);
    if !rep.mismatches.is_empty() {
        println!("recomputed values differ from the document: {}", rep.mismatches.join(", "));
    }
    let verdict = if rep.certified { "certified" } else { "not certified" };
    if rep.agrees {
        println!("verified: {verdict}, matching the document");
        Ok(if rep.certified { CERTIFIED } else { NOT_CERTIFIED })
    } else {
        println!("REJECTED: recomputation gives {verdict}, the document disagrees");
        Ok(NOT_CERTIFIED)
    }
}
