//! Batch verifications for great-circle fibration germs.
//!
//! Exit codes are stable per failure class:
//!   0  success, all requested checks passed
//!   2  command-line usage error (from the argument parser)
//!   3  input could not be read or parsed
//!   4  domain or validation error (bad matrix, invalid germ, n out of range)
//!   5  a requested verification check failed

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use greatcircle::contact::{
    alpha_coefficients, analyze, check_alpha_prime, contact_defect, d_alpha_fd_discrepancy,
    skew_part, ContactReport,
};
use greatcircle::forms::factorial;
use greatcircle::germ::{counterexample_germ, hopf_germ, GermSpec};
use greatcircle::io::{
    fmt_f64, germ_to_string, parse_germ, parse_scalar_matrix,
    skew_from_scalar_matrix,
};
use greatcircle::matrix::COMBINATORIAL_MAX_DIM;
use greatcircle::scalar::Scalar;
use greatcircle::Error;

const EXIT_PARSE: u8 = 3;
const EXIT_DOMAIN: u8 = 4;
const EXIT_CHECK: u8 = 5;

#[derive(Parser)]
#[command(
    name = "greatcircle",
    about = "Great-circle fibration germs: Pfaffians, twisting matrices, contact verdicts",
    version
)]
struct Cli {
    /// Output format: human text or one JSON object per line
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Pfaffian and determinant of a skew-symmetric matrix file
    Pfaffian { file: PathBuf },
    /// Eigenvalues of a square matrix file and the realness verdict
    Eigs { file: PathBuf },
    /// Build the Hopf germ and report its analysis
    Hopf {
        /// Half-dimension n (the sphere is S^(2n+1))
        #[arg(long)]
        n: usize,
        /// Chart radius (decimal or fraction), defaults to 1/10
        #[arg(long)]
        radius: Option<String>,
        /// Write the germ file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the fibration-without-contact germ (n >= 2) and report it
    Counterexample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        radius: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze a germ file: fibration and contact verdicts with witnesses
    Analyze { file: PathBuf },
    /// Sample circle pairs of a germ and report the minimum distance
    #[command(name = "tube-sample")]
    TubeSample {
        file: PathBuf,
        /// Sampling radius, defaults to the germ's chart radius
        #[arg(long)]
        radius: Option<f64>,
        /// Number of sampled pairs
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the full invariant suite on one germ file
    Validate { file: PathBuf },
}

struct Output {
    text: String,
    json: Vec<Value>,
}

impl Output {
    fn new() -> Self {
        Output {
            text: String::new(),
            json: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn record(&mut self, v: Value) {
        self.json.push(v);
    }

    fn print(&self, format: Format) {
        match format {
            Format::Text => print!("{}", self.text),
            Format::Json => {
                for v in &self.json {
                    println!("{v}");
                }
            }
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn check(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CHECK,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn complex_list_text(eigs: &[greatcircle::Complex<f64>]) -> String {
    eigs.iter()
        .map(|l| format!("({},{})", fmt_f64(l.re), fmt_f64(l.im)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn matrix_json(m: &greatcircle::Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::from((0..m.cols()).map(|j| m[(i, j)]).collect::<Vec<f64>>()))
        .collect();
    Value::from(rows)
}

fn report_json(r: &ContactReport) -> Value {
    json!({
        "command": "analyze",
        "n": r.n,
        "is_local_fibration": r.is_local_fibration,
        "is_contact_at_origin": r.is_contact_at_origin,
        "is_noncontact_fibration": r.is_noncontact_fibration(),
        "pfaffian_value": r.pfaffian_value,
        "contact_defect": r.contact_defect,
        "eigenvalues": r.eigenvalues.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>(),
        "twisting_matrix": matrix_json(&r.twisting),
        "skew_part": matrix_json(&r.skew_part.to_matrix()),
    })
}

fn with_radius(g: GermSpec, radius: &Option<String>) -> Result<GermSpec, Failure> {
    match radius {
        None => Ok(g),
        Some(text) => {
            let r = Scalar::parse(text)?;
            Ok(GermSpec::new(g.n(), g.twist_functions().to_vec(), r)?)
        }
    }
}

fn run_pfaffian(out: &mut Output, path: &PathBuf) -> Result<(), Failure> {
    let sm = parse_scalar_matrix(&read_input(path)?)?;
    let skew = skew_from_scalar_matrix(&sm)?;
    let dim = skew.dim();
    let det = skew.to_matrix().determinant()?;
    let nf = skew.pfaffian_normal_form();
    let combinatorial = if dim <= COMBINATORIAL_MAX_DIM {
        Some(skew.pfaffian_combinatorial()?)
    } else {
        None
    };
    let pf = combinatorial.unwrap_or(nf);
    let residual = pf * pf - det;
    out.line(format!("dim: {dim}"));
    if let Some(c) = combinatorial {
        out.line(format!("pfaffian_combinatorial: {}", fmt_f64(c)));
    }
    out.line(format!("pfaffian_normal_form: {}", fmt_f64(nf)));
    out.line(format!("pfaffian: {}", fmt_f64(pf)));
    out.line(format!("determinant: {}", fmt_f64(det)));
    out.line(format!("pf_squared_minus_det: {}", fmt_f64(residual)));
    out.record(json!({
        "command": "pfaffian",
        "dim": dim,
        "pfaffian_combinatorial": combinatorial,
        "pfaffian_normal_form": nf,
        "pfaffian": pf,
        "determinant": det,
        "pf_squared_minus_det": residual,
    }));
    Ok(())
}

fn run_eigs(out: &mut Output, path: &PathBuf) -> Result<(), Failure> {
    let m = parse_scalar_matrix(&read_input(path)?)?.to_matrix()?;
    let eigs = m.complex_eigenvalues()?;
    let has_real = m.has_real_eigenvalue()?;
    out.line(format!("dim: {}", m.rows()));
    out.line(format!("eigenvalues: {}", complex_list_text(&eigs)));
    out.line(format!("has_real_eigenvalue: {has_real}"));
    out.record(json!({
        "command": "eigs",
        "dim": m.rows(),
        "eigenvalues": eigs.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>(),
        "has_real_eigenvalue": has_real,
    }));
    Ok(())
}

fn run_family(
    out: &mut Output,
    germ: GermSpec,
    out_path: &Option<PathBuf>,
) -> Result<(), Failure> {
    if let Some(path) = out_path {
        let text = germ_to_string(&germ);
        // the file must round-trip through the parser before it is written
        parse_germ(&text)?;
        std::fs::write(path, &text).map_err(|e| Failure {
            code: EXIT_DOMAIN,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        out.line(format!("germ_file: {}", path.display()));
    }
    let report = analyze(&germ)?;
    out.text.push_str(&report.to_text());
    let mut j = report_json(&report);
    if let Some(path) = out_path {
        j["germ_file"] = Value::from(path.display().to_string());
    }
    out.record(j);
    Ok(())
}

fn run_analyze(out: &mut Output, path: &PathBuf) -> Result<(), Failure> {
    let germ = parse_germ(&read_input(path)?)?;
    let report = analyze(&germ)?;
    out.text.push_str(&report.to_text());
    out.record(report_json(&report));
    Ok(())
}

fn sample_ball(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(-radius..radius))
            .collect();
        if x.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return x;
        }
    }
}

fn run_tube_sample(
    out: &mut Output,
    path: &PathBuf,
    radius: Option<f64>,
    samples: usize,
    seed: u64,
) -> Result<(), Failure> {
    let germ = parse_germ(&read_input(path)?)?;
    let radius = radius.unwrap_or_else(|| germ.radius());
    if radius > germ.radius() {
        return Err(Error::Domain(format!(
            "sampling radius {radius} exceeds the germ's chart radius {}",
            germ.radius()
        ))
        .into());
    }
    let dim = 2 * germ.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_distance = f64::INFINITY;
    let mut argmin: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..samples {
        let x1 = sample_ball(&mut rng, dim, radius);
        let x2 = sample_ball(&mut rng, dim, radius);
        let d = germ.circle_min_distance(&x1, &x2)?;
        if d < min_distance {
            min_distance = d;
            argmin = Some((x1, x2));
        }
    }
    let (x1, x2) = argmin.ok_or_else(|| Failure {
        code: EXIT_DOMAIN,
        message: "samples must be positive".into(),
    })?;
    let coords = |x: &[f64]| {
        x.iter()
            .map(|v| fmt_f64(*v))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.line(format!("n: {}", germ.n()));
    out.line(format!("radius: {}", fmt_f64(radius)));
    out.line(format!("samples: {samples}"));
    out.line(format!("seed: {seed}"));
    out.line(format!("min_distance: {}", fmt_f64(min_distance)));
    out.line(format!("argmin_x1: {}", coords(&x1)));
    out.line(format!("argmin_x2: {}", coords(&x2)));
    out.record(json!({
        "command": "tube-sample",
        "n": germ.n(),
        "radius": radius,
        "samples": samples,
        "seed": seed,
        "min_distance": min_distance,
        "argmin_x1": x1,
        "argmin_x2": x2,
    }));
    Ok(())
}

fn run_validate(out: &mut Output, path: &PathBuf) -> Result<(), Failure> {
    let germ = parse_germ(&read_input(path)?)?;
    let mut failures: Vec<String> = Vec::new();
    let check = |out: &mut Output,
                     failures: &mut Vec<String>,
                     name: &str,
                     pass: bool,
                     detail: String| {
        out.line(format!(
            "check {name}: {} ({detail})",
            if pass { "pass" } else { "FAIL" }
        ));
        out.record(json!({
            "command": "validate",
            "check": name,
            "pass": pass,
            "detail": detail,
        }));
        if !pass {
            failures.push(name.to_string());
        }
    };

    // the one-form collapses to dt at the base point
    let a = alpha_coefficients(&germ, &vec![0.0; 2 * germ.n()], 0.0)?;
    let worst = a.dx.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    check(
        out,
        &mut failures,
        "alpha_is_dt_at_origin",
        worst <= 1e-12,
        format!("max |a_j(0,0)| = {}", fmt_f64(worst)),
    );

    // finite differences reproduce the closed-form d alpha
    let gap = d_alpha_fd_discrepancy(&germ)?;
    check(
        out,
        &mut failures,
        "d_alpha_finite_difference",
        gap <= 1e-6,
        format!("max discrepancy = {}", fmt_f64(gap)),
    );

    // the shortcut one-form agrees at the origin
    let prime = check_alpha_prime(&germ)?;
    check(
        out,
        &mut failures,
        "alpha_prime",
        prime,
        "shortcut form matches".into(),
    );

    // the exterior-power defect equals n! Pf(B) from the matrix routes
    let defect = contact_defect(&germ);
    let b = skew_part(&germ);
    let pf = if b.dim() <= COMBINATORIAL_MAX_DIM {
        b.pfaffian_combinatorial()?
    } else {
        b.pfaffian_normal_form()
    };
    let want = factorial(germ.n()) * pf;
    let tol = 1e-9 * want.abs().max(1.0);
    check(
        out,
        &mut failures,
        "pfaffian_consistency",
        (defect - want).abs() <= tol,
        format!(
            "forms route {} vs matrix route {}",
            fmt_f64(defect),
            fmt_f64(want)
        ),
    );

    let report = analyze(&germ)?;
    out.line(format!(
        "is_local_fibration: {}",
        report.is_local_fibration
    ));
    out.line(format!(
        "is_contact_at_origin: {}",
        report.is_contact_at_origin
    ));
    out.record(json!({
        "command": "validate",
        "is_local_fibration": report.is_local_fibration,
        "is_contact_at_origin": report.is_contact_at_origin,
    }));

    if failures.is_empty() {
        out.line("validate: all checks passed");
        Ok(())
    } else {
        let mut msg = String::from("validation checks failed:");
        for f in &failures {
            let _ = write!(msg, " {f}");
        }
        Err(Failure::check(msg))
    }
}

fn run(cli: &Cli, out: &mut Output) -> Result<(), Failure> {
    match &cli.command {
        Command::Pfaffian { file } => run_pfaffian(out, file),
        Command::Eigs { file } => run_eigs(out, file),
        Command::Hopf { n, radius, out: out_path } => {
            let germ = with_radius(hopf_germ(*n)?, radius)?;
            run_family(out, germ, out_path)
        }
        Command::Counterexample { n, radius, out: out_path } => {
            let germ = with_radius(counterexample_germ(*n)?, radius)?;
            run_family(out, germ, out_path)
        }
        Command::Analyze { file } => run_analyze(out, file),
        Command::TubeSample {
            file,
            radius,
            samples,
            seed,
        } => run_tube_sample(out, file, *radius, *samples, *seed),
        Command::Validate { file } => run_validate(out, file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output::new();
    match run(&cli, &mut out) {
        Ok(()) => {
            out.print(cli.format);
            ExitCode::SUCCESS
        }
        Err(f) => {
            // partial output (e.g. the failing check lines) still goes out
            out.print(cli.format);
            match cli.format {
                Format::Text => eprintln!("error: {}", f.message),
                Format::Json => println!("{}", json!({ "error": f.message })),
            }
            ExitCode::from(f.code)
        }
    }
}
