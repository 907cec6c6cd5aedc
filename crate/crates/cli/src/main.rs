use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccc_core::doc::{FamilyDocument, Kind};
use ccc_core::planner::{self, Recipe};
use ccc_core::{canonical_form, cosf_to_ccc, enlarge_ccc, Claim, MatrixSpec, SequenceFamily, Verifier};
use clap::{Parser, Subcommand};
use thiserror::Error;

/// Builds and checks cross Z-complementary sequence families and complete
/// complementary codes.
///
/// Exit status: 0 verified, 1 verification failure, 2 construction error,
/// 3 I/O, parse or usage error.
#[derive(Parser)]
#[command(name = "ccc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a recipe and write the resulting family.
    Gen {
        recipe: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Write the provenance log (JSON) to this path.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Check a family against a claim.
    Verify {
        family: PathBuf,
        /// `cosf:N`, `ccc` or `cs`; defaults to the document's claim.
        #[arg(long)]
        kind: Option<Claim>,
        /// Relative tolerance for approximate scalars.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Plan a recipe reaching the given lengths from an N×N base matrix.
    Plan {
        n: usize,
        #[arg(required = true)]
        lengths: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn an optimal N-CO-SF into an (N, N) CCC.
    Ccc {
        family: PathBuf,
        /// `dft:N`, `hadamard:N`, `identity:N`, or a JSON matrix file.
        matrix: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enlarge an (N, N) CCC with N unitary-like matrices of one dimension.
    Enlarge {
        family: PathBuf,
        #[arg(required = true)]
        matrices: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the zero-correlation zone width of a CCC.
    Zone { family: PathBuf },
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the canonical representative under reindexing.
    #[arg(long)]
    canonical: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Construction(#[from] ccc_core::Error),
    #[error("{0}")]
    NotVerified(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NotVerified(_) => 1,
            CliError::Construction(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read_family(path: &Path) -> Result<(SequenceFamily, Kind)> {
    let doc = FamilyDocument::from_json(&read(path)?).map_err(|e| parse_err(path, e))?;
    let family = doc.to_family().map_err(|e| parse_err(path, e))?;
    Ok((family, doc.kind()))
}

fn read_recipe(path: &Path) -> Result<Recipe> {
    Recipe::from_json(&read(path)?).map_err(|e| parse_err(path, e))
}

/// A matrix given inline (`dft:4`) or as a JSON file holding a matrix spec.
fn matrix_spec(arg: &str) -> Result<MatrixSpec> {
    match arg.parse::<MatrixSpec>() {
        Ok(spec) => Ok(spec),
        Err(e) if !Path::new(arg).is_file() => Err(parse_err(Path::new(arg), e)),
        Err(_) => {
            let path = Path::new(arg);
            serde_json::from_str(&read(path)?).map_err(|e| parse_err(path, e))
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    };
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(io_err),
        None => writeln!(io::stdout().lock(), "{text}").map_err(io_err),
    }
}

fn emit_family(f: &SequenceFamily, kind: Kind, out: &OutputArgs) -> Result<()> {
    let f = if out.canonical { canonical_form(f)? } else { f.clone() };
    write_output(out.output.as_deref(), &FamilyDocument::from_family(&f, kind).to_json())
}

/// Verifies the freshly built family and reports a one-line summary on stderr.
fn check_built(f: &SequenceFamily, claim: Claim) -> Result<()> {
    let report = Verifier::default().verify(f, claim)?;
    eprintln!(
        "({}, {}, {:?}) {claim}: {}",
        f.family_size(),
        f.set_size(),
        f.length_set(),
        if report.verified() { "verified" } else { "NOT verified" }
    );
    if report.verified() {
        Ok(())
    } else {
        Err(CliError::NotVerified(report.to_string()))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { recipe, out, log } => {
            let r = read_recipe(&recipe)?;
            let ex = planner::execute(&r)?;
            for record in &ex.log {
                eprintln!("{record}");
            }
            if let Some(path) = log {
                let text = ccc_core::doc::to_json_layout(&ex.log, usize::MAX);
                write_output(Some(&path), &text)?;
            }
            emit_family(&ex.family, Kind::Claim(ex.claim()), &out)?;
            if ex.verified() {
                Ok(())
            } else {
                Err(CliError::NotVerified("a construction stage failed verification".into()))
            }
        }
        Command::Verify {
            family,
            kind,
            tol,
            json,
        } => {
            let (f, doc_kind) = read_family(&family)?;
            let claim = match (kind, doc_kind) {
                (Some(c), _) | (None, Kind::Claim(c)) => c,
                (None, Kind::Raw) => {
                    return Err(parse_err(&family, "no claim in the document; pass --kind"));
                }
            };
            let report = match Verifier::new(tol).verify(&f, claim) {
                Ok(r) => r,
                Err(e) => return Err(CliError::NotVerified(format!("{claim}: {e}"))),
            };
            if json {
                write_output(None, &ccc_core::doc::to_json_layout(&report.to_json(), 4))?;
            } else {
                write_output(None, &report.to_string())?;
            }
            if report.verified() {
                Ok(())
            } else {
                Err(CliError::NotVerified(format!("{claim} not verified")))
            }
        }
        Command::Plan { n, lengths, output } => {
            let r = planner::plan(n, &lengths)?;
            write_output(output.as_deref(), &r.to_json())
        }
        Command::Ccc { family, matrix, out } => {
            let (f, _) = read_family(&family)?;
            let u = matrix_spec(&matrix)?.build()?;
            let c = cosf_to_ccc(&f, &u)?;
            emit_family(&c, Kind::Claim(Claim::Ccc), &out)?;
            check_built(&c, Claim::Ccc)
        }
        Command::Enlarge { family, matrices, out } => {
            let (f, _) = read_family(&family)?;
            let us = matrices
                .iter()
                .map(|m| Ok(matrix_spec(m)?.build()?))
                .collect::<Result<Vec<_>>>()?;
            let e = enlarge_ccc(&f, &us)?;
            emit_family(&e, Kind::Claim(Claim::Ccc), &out)?;
            check_built(&e, Claim::Ccc)
        }
        Command::Zone { family } => {
            let (f, _) = read_family(&family)?;
            let z = ccc_core::zccc_zone(&f)?;
            write_output(None, &z.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
