use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kopula::epd::{epd1_from_epd2, epd2_from_epd1, Epd1};
use kopula::families::verify_one_function;
use kopula::grid::{grid_rows, write_grid_csv, GridSpec};
use kopula::io::{build_from_config, read_table_csv, write_table_csv, EpdDocument, EpdKind, FamilySpec};
use kopula::oracle::run_oracle;
use kopula::phenomena::{renumber_epd1, PhenomenonMask};
use kopula::sampling::sample_epd;
use kopula::KopulaError;

const EXIT_PARSE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_AXIOM: u8 = 3;
const EXIT_ORACLE: u8 = 4;

#[derive(Parser)]
#[command(name = "kopula", version, about = "Eventological copulas: build, validate, export and sample event-set distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a distribution from a family, frame-parameter or correlation config.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Export terrace tables of a family over a hypercube grid as CSV.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 11)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample terraces of a distribution file with a seeded generator.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the 1-function axioms of a family on a grid.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 9)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compare fast kernels with reference evaluations on random instances.
    Oracle {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convert a distribution between the first and second kind.
    Mobius {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Renumber a distribution by a set-phenomenon.
    Renumber {
        #[arg(long)]
        config: PathBuf,
        /// Events kept as they are, e.g. "x0&x2"; "{}" complements all.
        #[arg(long)]
        keep: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<KopulaError> for Failure {
    fn from(e: KopulaError) -> Self {
        let code = match e {
            KopulaError::Parse(_) | KopulaError::Argument(_) | KopulaError::Context(_) => EXIT_PARSE,
            _ => EXIT_INFEASIBLE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_failure(message: String) -> Failure {
    Failure { code: EXIT_PARSE, message }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

/// Reads a distribution from JSON, or from CSV when the file ends in `.csv`.
fn read_document(path: &Path) -> Result<EpdDocument, Failure> {
    if path.extension().is_some_and(|e| e == "csv") {
        let file = fs::File::open(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
        let (ctx, values) = read_table_csv(file)?;
        return Ok(EpdDocument {
            n: ctx.n(),
            labels: ctx.labels().map(|l| l.to_vec()),
            kind: EpdKind::Epd1,
            values,
        });
    }
    Ok(EpdDocument::from_json(&read_text(path)?)?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let res = match out {
        Some(p) => fs::write(p, bytes),
        None => std::io::stdout().write_all(bytes),
    };
    res.map_err(|e| parse_failure(format!("cannot write output: {e}")))
}

fn emit_document(doc: &EpdDocument, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => emit(out, format!("{}\n", doc.to_json()).as_bytes()),
        Format::Csv => {
            let mut buf = Vec::new();
            write_table_csv(&doc.context()?, &doc.values, &mut buf)?;
            emit(out, &buf)
        }
    }
}

fn family_of(config: &Value) -> Result<(FamilySpec, Option<usize>), Failure> {
    let spec = FamilySpec::from_value(config)?;
    let n = match config.get("n") {
        Some(v) => Some(v.as_u64().ok_or_else(|| parse_failure("\"n\" must be a positive integer".into()))? as usize),
        None => None,
    };
    Ok((spec, n))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { config, out, format } => {
            let epd = build_from_config(&read_json(&config)?)?;
            emit_document(&EpdDocument::from_epd1(&epd), out.as_deref(), format)
        }
        Command::Grid { config, resolution, out } => {
            let cfg = read_json(&config)?;
            let (spec, n) = family_of(&cfg)?;
            let k = spec.build::<f64>(n)?;
            let n = k.n_events();
            let axes = match cfg.get("axes") {
                Some(v) => serde_json::from_value(v.clone()).map_err(|e| parse_failure(format!("axes: {e}")))?,
                None => (0..n).collect(),
            };
            let fixed = match cfg.get("fixed") {
                Some(v) => serde_json::from_value(v.clone()).map_err(|e| parse_failure(format!("fixed: {e}")))?,
                None => vec![0.5; n],
            };
            let rows = grid_rows(k.as_ref(), &GridSpec { resolution, axes, fixed })?;
            let flagged = rows.iter().filter(|r| r.flagged).count();
            if flagged > 0 {
                eprintln!("warning: {flagged} grid rows are negative or not normalized");
            }
            let mut buf = Vec::new();
            write_grid_csv(n, &rows, &mut buf)?;
            emit(out.as_deref(), &buf)
        }
        Command::Sample { config, n, seed, out } => {
            let epd = read_document(&config)?.to_epd1()?;
            let summary = sample_epd(&epd, n, seed)?;
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            emit(out.as_deref(), format!("{text}\n").as_bytes())
        }
        Command::Validate { config, resolution, tol } => {
            let (spec, n) = family_of(&read_json(&config)?)?;
            let k = spec.build::<f64>(n)?;
            let report = verify_one_function(k.as_ref(), resolution, tol)?;
            let offender = |o: &kopula::families::Offender<f64>| json!({"residual": o.residual, "point": o.point, "index": o.index});
            let out = json!({
                "family": k.name(),
                "points": report.points,
                "tol": tol,
                "clean": report.is_clean(),
                "nonnegativity": {"ok": report.nonnegative(), "worst": offender(&report.negativity)},
                "marginals": {"ok": report.marginals_hold(), "worst": offender(&report.marginal)},
                "normalization": {"ok": report.normalized(), "worst": offender(&report.normalization)},
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("report serializes"));
            if report.is_clean() {
                Ok(())
            } else {
                Err(Failure { code: EXIT_AXIOM, message: format!("{} is not a 1-function on the grid", k.name()) })
            }
        }
        Command::Oracle { n, trials, seed } => {
            let report = run_oracle(n, trials, seed)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_ORACLE,
                    message: format!("oracle discrepancy {:e}", report.max_diff()),
                })
            }
        }
        Command::Mobius { config, out, format } => {
            let doc = read_document(&config)?;
            let converted = match doc.kind {
                EpdKind::Epd1 => EpdDocument::from_epd2(&epd2_from_epd1(&doc.to_epd1()?)),
                EpdKind::Epd2 => EpdDocument::from_epd1(&epd1_from_epd2(&doc.to_epd2()?)?),
            };
            emit_document(&converted, out.as_deref(), format)
        }
        Command::Renumber { config, keep, out, format } => {
            let epd: Epd1<f64> = read_document(&config)?.to_epd1()?;
            let keep = epd.context().parse_subset(&keep)?;
            let renumbered = renumber_epd1(&epd, PhenomenonMask::new(keep));
            emit_document(&EpdDocument::from_epd1(&renumbered), out.as_deref(), format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
