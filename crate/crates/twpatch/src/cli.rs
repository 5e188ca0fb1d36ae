//! `twpatch` command line: argument parsing, fixture lookup and report output.
//!
//! Exit codes: 0 when no certificate fails, 1 when one does, 2 for usage
//! errors and unreadable or malformed inputs.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::coeff::CoeffRing;
use crate::defring::{build_raunr, check_ideal_equality, theorem_three_pipeline};
use crate::grpring::{defect_certificates, GroupRingModule};
use crate::patch::{budget_from_env, embedded_system, run_patching, TWSystem};
use crate::qexp::{eisenstein, eta_quotient, HeckeSpace, Operator, QExpansion};
use crate::report::{Certificate, Report, Status};
use crate::{suite, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "twpatch", version, about = "Exact finite-level checks of Taylor–Wiles patching in weight one")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tor dimensions, defect and balancedness of a group-ring module (JSON file).
    Defect { file: PathBuf },
    /// Run the patching pipeline on a system bundle (JSON file or embedded name).
    PatchRun {
        bundle: String,
        #[arg(long)]
        depth: Option<u32>,
        /// Isomorphism-search budget; defaults to TWPATCH_BUDGET or 10^6.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Matrix of a Hecke operator on a space of q-expansions.
    Hecke {
        #[arg(long)]
        space: PathBuf,
        /// `T<l>`, `U<l>`, `theta` or `id`.
        #[arg(long)]
        op: String,
    },
    /// Print q-expansions.
    Qexp {
        #[command(subcommand)]
        kind: QexpKind,
    },
    /// Certificates for a deformation-ring fixture.
    DefringReport {
        #[arg(long, default_value = "special-fibre")]
        fixture: String,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Truncation degree.
        #[arg(long)]
        d: Option<u32>,
        /// Exponent of the coefficient ring Z/3^M (unramified fixtures only).
        #[arg(long = "M", default_value_t = 1)]
        m: u32,
    },
    /// The full acceptance battery.
    Suite,
}

#[derive(Subcommand, Debug)]
pub enum QexpKind {
    /// Eta quotient from `d:r` factors, e.g. `1:1 23:1`.
    Eta {
        #[arg(required = true)]
        factors: Vec<String>,
        #[arg(long, default_value_t = 20)]
        prec: usize,
        /// Modulus `p^M`.
        #[arg(long = "mod", default_value_t = 5)]
        modulus: u64,
    },
    /// Normalized Eisenstein series `E_k`.
    Eisenstein {
        k: u32,
        #[arg(long, default_value_t = 20)]
        prec: usize,
        #[arg(long = "mod", default_value_t = 5)]
        modulus: u64,
    },
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

const EMBEDDED_MODULES: &[(&str, &str)] = &[("O-over-S_q2.json", include_str!("../fixtures/O-over-S_q2.json"))];
const EMBEDDED_SPACES: &[(&str, &str)] = &[("hecke-eta23.json", include_str!("../fixtures/hecke-eta23.json"))];

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            Outcome { code: report.exit_code(), stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: error_json(&e) },
    }
}

fn error_json(e: &Error) -> String {
    let kind = match e {
        Error::InvalidRing(_) => "invalid_ring",
        Error::Dimension(_) => "dimension",
        Error::Mismatch(_) => "mismatch",
        Error::Parse(_) => "parse",
        Error::SizeLimit(_) => "size_limit",
        Error::Precision(_) => "precision",
        Error::NotInSpan(_) => "not_in_span",
        Error::Precondition(_) => "precondition",
        Error::Rejected(_) => "rejected",
    };
    let mut s = serde_json::to_string_pretty(&json!({"tool": "twpatch", "error": {"kind": kind, "message": e.to_string()}}))
        .expect("serializes");
    s.push('\n');
    s
}

/// Read `path`, or fall back to an embedded fixture with the same file name.
fn read_input(path: &Path, embedded: &[(&str, &str)]) -> Result<(String, &'static str)> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok((s, "file")),
        Err(e) => {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            embedded
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, src)| (src.to_string(), "embedded"))
                .ok_or_else(|| Error::Parse(format!("cannot read {}: {e}", path.display())))
        }
    }
}

fn ring_from_modulus(n: u64) -> Result<CoeffRing> {
    let p = (2..=n).find(|d| n % d == 0).ok_or_else(|| Error::InvalidRing(format!("modulus {n} is not a prime power")))?;
    let mut m = 0;
    let mut r = n;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    if r != 1 {
        return Err(Error::InvalidRing(format!("modulus {n} is not a prime power")));
    }
    CoeffRing::new(p, m)
}

fn series_certificate(name: &str, f: &QExpansion) -> Certificate {
    let r = f.ring;
    Certificate::new(
        name,
        Status::Pass,
        format!("coefficients of q^0..q^{} mod {}", f.prec(), r.modulus()),
        json!({
            "ring": {"p": r.p(), "M": r.m()},
            "weight": f.weight,
            "precision": f.prec(),
            "coefficients": f.coefficients.iter().map(|&a| r.signed(a)).collect::<Vec<_>>(),
        }),
    )
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Defect { file } => {
            let (src, source) = read_input(file, EMBEDDED_MODULES)?;
            let m = GroupRingModule::from_json(&src)?;
            let mut report = Report::new(json!({"command": "defect", "input": file.display().to_string(), "source": source}));
            report.extend(defect_certificates(&m));
            Ok(report)
        }
        Command::PatchRun { bundle, depth, budget } => {
            let path = Path::new(bundle);
            let sys = if path.is_file() {
                let src = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {bundle}: {e}")))?;
                TWSystem::from_json(&src, path.parent())?
            } else {
                embedded_system(bundle)?
            };
            let depth = depth.unwrap_or(sys.depth());
            let budget = budget.unwrap_or_else(budget_from_env);
            if depth == 0 || depth > sys.depth() {
                return Err(Error::Precondition(format!("depth {depth} outside 1..={}", sys.depth())));
            }
            Ok(run_patching(&sys, depth, budget).report)
        }
        Command::Hecke { space, op } => {
            let (src, source) = read_input(space, EMBEDDED_SPACES)?;
            let mut sp = HeckeSpace::from_json(&src)?;
            let operator = Operator::parse(op)?;
            let m = sp.operator_matrix(operator)?;
            let r = m.ring;
            let rows: Vec<Vec<i64>> = (0..m.rows).map(|i| m.row(i).iter().map(|&a| r.signed(a)).collect()).collect();
            let mut report = Report::new(json!({"command": "hecke", "space": space.display().to_string(), "op": op, "source": source}));
            report.push(Certificate::new(
                format!("matrix of {operator}"),
                Status::Pass,
                format!("action of {operator} on the basis (columns are images)"),
                json!({"ring": {"p": r.p(), "M": r.m()}, "dim": sp.dim(), "matrix": rows}),
            ));
            Ok(report)
        }
        Command::Qexp { kind } => match kind {
            QexpKind::Eta { factors, prec, modulus } => {
                let ring = ring_from_modulus(*modulus)?;
                let pairs = factors
                    .iter()
                    .map(|s| {
                        let (d, r) = s.split_once(':').ok_or_else(|| Error::Parse(format!("factor {s:?} is not d:r")))?;
                        let d = d.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                        let r = r.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{s}: {e}")))?;
                        Ok((d, r))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let f = eta_quotient(ring, &pairs, *prec)?;
                let mut report = Report::new(json!({"command": "qexp eta", "factors": factors, "prec": prec, "mod": modulus}));
                report.push(series_certificate("eta quotient", &f));
                Ok(report)
            }
            QexpKind::Eisenstein { k, prec, modulus } => {
                let ring = ring_from_modulus(*modulus)?;
                let f = eisenstein(*k, *prec, ring)?;
                let mut report = Report::new(json!({"command": "qexp eisenstein", "k": k, "prec": prec, "mod": modulus}));
                report.push(series_certificate(&format!("E_{k}"), &f));
                Ok(report)
            }
        },
        Command::DefringReport { fixture, p, d, m } => {
            let mut report = Report::new(json!({"command": "defring-report", "fixture": fixture, "p": p, "d": d, "M": m}));
            match fixture.as_str() {
                "special-fibre" => {
                    let t = theorem_three_pipeline(*p, d.unwrap_or(4))?;
                    report.extend(t.certificates);
                }
                "doubling-ideal" => {
                    report.extend(check_ideal_equality(*m, d.unwrap_or(3))?);
                }
                "raunr" => {
                    let d = d.unwrap_or(4);
                    let (ext, free) = build_raunr(*m, d)?;
                    report.push(Certificate::check(
                        "R̃^unr free of rank 2 over R^unr",
                        free,
                        "degreewise lengths of R̃^unr equal those of R^unr ⊕ R^unr·β",
                        json!({"M": m, "d": d, "len": ext.len()}),
                    ));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown fixture {other:?} (expected special-fibre, doubling-ideal or raunr)"
                    )))
                }
            }
            Ok(report)
        }
        Command::Suite => Ok(suite::run_suite()),
    }
}
