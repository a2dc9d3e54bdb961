//! Command-line front end for the `meroform` library.

mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meroform::basis::{representation_of, simple_pole_rep, solve_basis};
use meroform::coeff_engine::{
    assemble_coefficients, constant_term_identity, identity_check_m0, IdentityCheck, TruncatedSum, DEFAULT_NORM_BOUND,
};
use meroform::elliptic::{laurent_at, nonconforming_orders, PrincipalPart};
use meroform::json::{
    float_json, laurent_json, BasisInputJson, BasisRepresentationJson, ComplexJson, LaurentTermJson, PointJson,
    PrincipalPartJson,
};
use meroform::lattice::{enumerate_primitive, Field};
use meroform::numeric::{self, check_precision, parse_real, DEFAULT_PRECISION};
use meroform::qseries::oracle_coeffs;
use meroform::quasi::{quasi_coeffs_general, simple_pole_quasi_coeffs};
use meroform::special_values::{closed_value, EllipticPoint, PointTag};
use meroform::{Error, FormExpression};
use output::Format;
use rug::{Complex, Float, Rational};
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "meroform", version, about = "Fourier coefficients of meromorphic modular forms from lattice sums")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "MEROFORM_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: u32,

    /// Write the report here instead of stdout.
    #[arg(long = "out", global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SumArgs {
    /// Form expression, e.g. "E2^2/E10" or "1/E6^4".
    #[arg(long)]
    form: String,

    /// Coefficient indices: "a..b" (inclusive) or a single index.
    #[arg(long, default_value = "0..10", value_parser = parse_range)]
    m: (u64, u64),

    /// Largest ideal norm kept in the lattice sums.
    #[arg(long, default_value_t = DEFAULT_NORM_BOUND)]
    norm_bound: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fourier coefficients from the lattice-sum formulas.
    Coeffs {
        #[command(flatten)]
        sum: SumArgs,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
    },
    /// Exact rational coefficients from q-series arithmetic.
    Oracle {
        #[arg(long)]
        form: String,
        #[arg(long, default_value = "0..10", value_parser = parse_range)]
        m: (u64, u64),
    },
    /// Formula against exact coefficients; exits 3 when a relative error exceeds the tolerance.
    Verify {
        #[command(flatten)]
        sum: SumArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
    },
    /// The m = 0 lattice-sum identity for 1/E6^4.
    Identity {
        #[arg(long, default_value_t = 10_000)]
        norm_bound: u64,
        /// Check the identity implied by the constant term 1 instead of the stated one.
        #[arg(long)]
        corrected: bool,
    },
    /// Primitive ideals of Z[i] or Z[rho] up to a norm bound.
    Enumerate {
        #[arg(long, value_parser = parse_field)]
        field: Field,
        #[arg(long)]
        bound: u64,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
    },
    /// Laurent expansion of a form at i, rho or a point given by --tau.
    Expand {
        #[arg(long)]
        form: String,
        #[arg(long, default_value = "i", conflicts_with = "tau")]
        point: String,
        /// Generic point as "re,im".
        #[arg(long)]
        tau: Option<String>,
        /// Highest order kept.
        #[arg(long, default_value_t = 6)]
        depth: i64,
    },
    /// Basis representation from principal parts (JSON file or "-" for stdin) or from a form.
    Basis {
        #[arg(long, required_unless_present = "form", conflicts_with = "form")]
        input: Option<String>,
        #[arg(long)]
        form: Option<String>,
    },
    /// Closed-form values of E2, E4, E6, E10 at i and rho.
    Constants,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let bad = |_| format!("expected an index or a range a..b, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?)
        }
        None => {
            let a = s.trim().parse().map_err(bad)?;
            (a, a)
        }
    };
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn parse_field(s: &str) -> Result<Field, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Verify,
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Run = Result<(), Failure>;

#[derive(Serialize)]
struct ErrorReport {
    error: String,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Precision { .. } => "precision",
        Error::NotInvertible => "not_invertible",
        Error::Parse { .. } => "parse",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::OutsideRegion(_) => "outside_region",
        Error::VanishingOrder { .. } => "vanishing_order",
        Error::ReciprocalInTaylor => "reciprocal_in_taylor",
        Error::Nonconvergent { .. } => "nonconvergent",
        Error::Congruence { .. } => "congruence",
        Error::InconsistentTails { .. } => "inconsistent_tails",
        Error::NotSimplePole { .. } => "not_simple_pole",
        Error::VanishingNormalizer { .. } => "vanishing_normalizer",
        Error::MixedWeights(..) => "mixed_weights",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(e)) => {
            let report = ErrorReport { error: error_kind(&e).into(), message: e.to_string() };
            eprintln!("{}", serde_json::to_string(&report).expect("plain strings serialize"));
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn run(cli: &Cli) -> Run {
    let prec = cli.precision;
    check_precision(prec)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Coeffs { sum, output } => {
            let rows = coefficient_rows(sum, prec)?;
            output::table(&rows, *output, out)?;
        }
        Command::Oracle { form, m } => {
            let f = FormExpression::parse(form)?;
            let c = oracle_coeffs(&f, m.1 as usize)?;
            let vals: Vec<String> = c[m.0 as usize..].iter().map(Rational::to_string).collect();
            output::json(&vals, out)?;
        }
        Command::Verify { sum, tol, output } => {
            let rows = coefficient_rows(sum, prec)?;
            let mut pass = true;
            for r in &rows {
                let e = r.rel_err.as_deref().and_then(|s| s.parse::<f64>().ok());
                pass &= matches!(e, Some(e) if e <= *tol);
            }
            match output {
                Format::Json => output::json(&VerifyReport { form: sum.form.clone(), tol: *tol, pass, rows }, out)?,
                Format::Csv => output::table(&rows, Format::Csv, out)?,
            }
            eprintln!("{}", if pass { "pass" } else { "FAIL" });
            if !pass {
                return Err(Failure::Verify);
            }
        }
        Command::Identity { norm_bound, corrected } => {
            if *norm_bound < 100 {
                return Err(Failure::Usage("the identity check needs --norm-bound >= 100".into()));
            }
            let v = if *corrected {
                constant_term_identity(*norm_bound, prec)?
            } else {
                identity_check_m0(*norm_bound, prec)?
            };
            let allowed = Float::with_val(prec, &v.rhs * 1e-6).max(&v.tail_bound);
            let pass = v.abs_err <= allowed;
            output::json(&IdentityReport { check: v.to_strings(), norm_bound: *norm_bound, pass }, out)?;
            if !pass {
                return Err(Failure::Verify);
            }
        }
        Command::Enumerate { field, bound, output } => {
            let rows: Vec<IdealRow> = enumerate_primitive(*field, *bound)
                .into_iter()
                .map(|p| IdealRow { c: p.c, d: p.d, a: p.a, b: p.b, norm: p.norm })
                .collect();
            output::table(&rows, *output, out)?;
        }
        Command::Expand { form, point, tau, depth } => {
            let f = FormExpression::parse(form)?;
            let p = match tau {
                Some(t) => generic_point(t, prec)?,
                None => EllipticPoint::from_tag(parse_tag(point)?, prec)?,
            };
            let s = laurent_at(&f, &p, *depth, prec)?;
            let nonconforming = if p.tag == PointTag::Generic { Vec::new() } else { nonconforming_orders(&s, f.weight()) };
            let report = ExpandReport {
                form: f.to_string(),
                weight: f.weight(),
                point: PointJson::from_point(&p),
                terms: laurent_json(&s),
                principal_part: PrincipalPartJson::from_part(&PrincipalPart::from_series(&s.truncate(-1))),
                nonconforming_orders: nonconforming,
            };
            output::json(&report, out)?;
        }
        Command::Basis { input, form } => {
            let rep = match (input, form) {
                (_, Some(f)) => representation_of(&FormExpression::parse(f)?, prec)?,
                (Some(path), None) => {
                    let text = read_input(path)?;
                    let parsed: BasisInputJson =
                        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad basis input: {e}")))?;
                    let parts = parsed
                        .principal_parts
                        .iter()
                        .map(|p| p.to_part(prec))
                        .collect::<meroform::Result<Vec<_>>>()?;
                    solve_basis(&parts, parsed.k, prec)?
                }
                (None, None) => unreachable!("clap requires one of --input, --form"),
            };
            output::json(&BasisRepresentationJson::from_rep(&rep), out)?;
        }
        Command::Constants => {
            let mut rows = Vec::new();
            for tag in [PointTag::I, PointTag::Rho] {
                for w in [2u32, 4, 6, 10] {
                    rows.push(ConstantRow { point: tag.to_string(), weight: w, value: float_json(&closed_value(w, tag, prec)?) });
                }
            }
            output::json(&rows, out)?;
        }
    }
    Ok(())
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
    }
}

fn parse_tag(s: &str) -> Result<PointTag, Failure> {
    match s {
        "i" => Ok(PointTag::I),
        "rho" => Ok(PointTag::Rho),
        _ => Err(Failure::Usage(format!("unknown point {s:?}; use i, rho or --tau re,im"))),
    }
}

fn generic_point(s: &str, prec: u32) -> Result<EllipticPoint, Failure> {
    let (re, im) = s.split_once(',').ok_or_else(|| Failure::Usage(format!("expected re,im, got {s:?}")))?;
    let z = Complex::with_val(prec, (parse_real(prec, re.trim())?, parse_real(prec, im.trim())?));
    Ok(EllipticPoint::generic(z)?)
}

/// Coefficients `m.0..=m.1`, routed by the power of `E2`.
fn formula_coefficients(f: &FormExpression, m_max: u64, norm_bound: u64, prec: u32) -> meroform::Result<Vec<TruncatedSum>> {
    let (n, g) = f.split_e2_power()?;
    if n == 0 {
        return assemble_coefficients(&representation_of(&g, prec)?, m_max, norm_bound, prec);
    }
    match simple_pole_rep(&g, prec) {
        Ok(rep) if n + 1 < rep.k => simple_pole_quasi_coeffs(&rep, n, m_max, norm_bound, prec),
        _ => quasi_coeffs_general(&g, n, m_max, norm_bound, prec),
    }
}

#[derive(Serialize)]
struct CoeffRow {
    m: u64,
    value_re: String,
    value_im: String,
    tail_bound: String,
    oracle: Option<String>,
    rel_err: Option<String>,
}

fn coefficient_rows(sum: &SumArgs, prec: u32) -> Result<Vec<CoeffRow>, Failure> {
    if sum.norm_bound < 16 {
        return Err(Failure::Usage("--norm-bound must be at least 16".into()));
    }
    let f = FormExpression::parse(&sum.form)?;
    let (lo, hi) = sum.m;
    let sums = formula_coefficients(&f, hi, sum.norm_bound, prec)?;
    let exact = oracle_coeffs(&f, hi as usize).ok();
    Ok((lo..=hi)
        .map(|m| {
            let s = &sums[m as usize];
            let v = ComplexJson::from_complex(&s.value);
            let q = exact.as_ref().map(|e| &e[m as usize]);
            let rel_err = q.map(|q| {
                let x = Complex::with_val(prec, (Float::with_val(prec, q), 0));
                let e = numeric::rel_err(&s.value, &x);
                format!("{:.6e}", e.to_f64())
            });
            CoeffRow {
                m,
                value_re: v.re,
                value_im: v.im,
                tail_bound: float_json(&s.tail_bound),
                oracle: q.map(Rational::to_string),
                rel_err,
            }
        })
        .collect())
}

#[derive(Serialize)]
struct VerifyReport {
    form: String,
    tol: f64,
    pass: bool,
    rows: Vec<CoeffRow>,
}

#[derive(Serialize)]
struct IdentityReport {
    #[serde(flatten)]
    check: IdentityCheck,
    norm_bound: u64,
    pass: bool,
}

#[derive(Serialize)]
struct IdealRow {
    c: i64,
    d: i64,
    a: i64,
    b: i64,
    norm: i64,
}

#[derive(Serialize)]
struct ExpandReport {
    form: String,
    weight: i64,
    point: PointJson,
    terms: Vec<LaurentTermJson>,
    principal_part: PrincipalPartJson,
    nonconforming_orders: Vec<i64>,
}

#[derive(Serialize)]
struct ConstantRow {
    point: String,
    weight: u32,
    value: String,
}
