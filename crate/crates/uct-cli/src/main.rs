//! `uct` — analyze atomic angular-density measures, construct type-minimizing
//! complements, and export the locally convex curve.
//!
//! Subcommands:
//!
//! - `analyze`  — full report: critical types, balance test, nests, complement.
//! - `minimize` — just the complement measure plus its verification block.
//! - `curve`    — the traced curve as SVG, CSV, or structured JSON.
//! - `verify`   — independently re-check a (base, complement) pair.
//! - `schema`   — describe the input document formats.
//!
//! Every output is deterministic byte for byte given the same input and
//! flags. Exit codes: 0 success, 1 domain rejection (irregular measure,
//! order out of range, failed construction or verification), 2 I/O or
//! format problems.

use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use uct::curve::{build_curve, enumerate_nests, export_curve, CurveError, Nest};
use uct::measures::{
    measure_to_json, order_to_json, parse_measure, AtomicMeasure, MeasureError, Order,
};
use uct::minimizer::{
    analyze, verify_type_minimizing, AnalyzeOptions, MinimizerError, SearchConfig,
};
use uct::tol::MINIMAX_TOL;
use uct::trigfun::h_from_measure;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

#[derive(Parser)]
#[command(name = "uct")]
#[command(about = "Critical zero/uniqueness types and type-minimizing complements \
                   of atomic angular densities")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the commands that run the construction pipeline.
#[derive(Args)]
struct SearchFlags {
    /// Base seed for the minimax search (and the cross-check)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Independent random restarts per atom count
    #[arg(long, default_value_t = 16)]
    restarts: usize,

    /// Acceptance tolerance for the search
    #[arg(long, default_value_t = MINIMAX_TOL)]
    tol: f64,

    /// Re-derive surgery results with the minimax search and record agreement
    #[arg(long)]
    cross_check: bool,
}

impl SearchFlags {
    fn options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            search: SearchConfig {
                seed: self.seed,
                restarts: self.restarts,
                tolerance: self.tol,
                ..SearchConfig::default()
            },
            cross_check: self.cross_check,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the full analysis report for a measure document
    Analyze {
        /// Input measure (JSON file, or "-" for stdin)
        input: String,
        #[command(flatten)]
        flags: SearchFlags,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the type-minimizing complement and its verification
    Minimize {
        /// Input measure (JSON file, or "-" for stdin)
        input: String,
        #[command(flatten)]
        flags: SearchFlags,
        /// Write the result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the locally convex curve (with its nests)
    Curve {
        /// Input measure (JSON file, or "-" for stdin)
        input: String,
        /// Output format
        #[arg(long, default_value = "svg", value_parser = ["svg", "csv", "json"])]
        format: String,
        /// Write the figure here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a {"base", "complement"} measure pair independently
    Verify {
        /// Input pair document (JSON file, or "-" for stdin)
        input: String,
        /// Pairwise type comparison tolerance
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the verification report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe the input document formats
    Schema,
}

/// Anything that stops a command, tagged with the exit code it maps to.
#[derive(Debug)]
enum CliError {
    /// Reading or writing a stream failed.
    Io { context: String, source: io::Error },
    /// The input document violates the measure format.
    Measure(MeasureError),
    /// The curve machinery rejected the input.
    Curve(CurveError),
    /// Construction or verification rejected the input.
    Minimizer(MinimizerError),
    /// A CLI-level input problem (mismatched pair orders, ...).
    Input(String),
}

impl CliError {
    /// 1 for domain rejections, 2 for I/O and format problems.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Measure(MeasureError::FormatError { .. }) => 2,
            CliError::Measure(_) => 1,
            CliError::Curve(CurveError::UnknownFormat(_)) => 2,
            CliError::Curve(_) => 1,
            CliError::Minimizer(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Measure(e) => write!(f, "{e}"),
            CliError::Curve(e) => write!(f, "{e}"),
            CliError::Minimizer(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Measure(e)
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Curve(e)
    }
}

impl From<MinimizerError> for CliError {
    fn from(e: MinimizerError) -> Self {
        CliError::Minimizer(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let color = io::stderr().is_terminal() && std::env::var_os("UCT_NO_COLOR").is_none();
            if color {
                eprintln!("\x1b[31merror:\x1b[0m {err}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Analyze { input, flags, out } => {
            let (rho, delta) = read_measure(&input)?;
            let report = analyze(&delta, &rho, &flags.options())?;
            emit(out.as_deref(), &pretty(&report.to_json()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { input, flags, out } => {
            let (rho, delta) = read_measure(&input)?;
            let report = analyze(&delta, &rho, &flags.options())?;
            let delta_star = report
                .delta_star
                .clone()
                .unwrap_or_else(AtomicMeasure::empty);
            let readable: Vec<Value> = delta_star
                .atoms()
                .iter()
                .map(|a| {
                    json!({
                        "angle": a.angle,
                        "angle_over_pi": a.angle / PI,
                        "mass": a.mass,
                    })
                })
                .collect();
            let doc = json!({
                "achieved": report.result.achieved,
                "atoms": readable,
                "delta_star": measure_to_json(&rho, &delta_star),
                "method": report.result.method.tag(),
                "target": report.result.target,
                "verification": serde_json::to_value(report.verification)
                    .expect("report encoding cannot fail"),
            });
            emit(out.as_deref(), &pretty(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve { input, format, out } => {
            let (rho, delta) = read_measure(&input)?;
            let h = h_from_measure(&delta, &rho).map_err(MinimizerError::from)?;
            let nests = enumerate_nests(&h)?;
            // Trace the full closed curve when the order's denominator
            // allows; the tracer caps the window at four stretched periods.
            let periods = match rho.rational() {
                Some((_, q)) => q.min(4),
                None => 1,
            };
            let window = (0.0, TAU * rho.value() * periods as f64);
            let polygon = build_curve(&h, window)?;
            let text = match format.as_str() {
                "json" => pretty(&curve_json(&rho, window, &polygon, &nests)),
                other => export_curve(&polygon, &nests, other)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, tol, out } => {
            let text = read_input(&input)?;
            let (rho, delta, delta_star) = parse_pair(&text)?;
            let report = verify_type_minimizing(&delta, &delta_star, &rho, tol)?;
            let doc = serde_json::to_value(report).expect("report encoding cannot fail");
            emit(out.as_deref(), &pretty(&doc))?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Schema => {
            emit(None, SCHEMA_TEXT)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Read a file, or stdin for `"-"`.
fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io {
                context: "reading stdin".to_string(),
                source,
            })?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("reading {path}"),
            source,
        })
    }
}

fn read_measure(path: &str) -> Result<(Order, AtomicMeasure), CliError> {
    let text = read_input(path)?;
    Ok(parse_measure(&text)?)
}

/// Parse the `verify` pair document: `{"base": <measure>, "complement":
/// <measure>}`, both full measure documents carrying the same order.
fn parse_pair(text: &str) -> Result<(Order, AtomicMeasure, AtomicMeasure), CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Input("expected a JSON object".to_string()))?;
    for key in obj.keys() {
        if key != "base" && key != "complement" {
            return Err(CliError::Input(format!(
                "unknown key {key:?} (allowed: base, complement)"
            )));
        }
    }
    let part = |key: &str| -> Result<(Order, AtomicMeasure), CliError> {
        let v = obj
            .get(key)
            .ok_or_else(|| CliError::Input(format!("missing required key {key:?}")))?;
        let text = serde_json::to_string(v).expect("re-encoding cannot fail");
        Ok(parse_measure(&text)?)
    };
    let (rho, delta) = part("base")?;
    let (rho_star, delta_star) = part("complement")?;
    if (rho.value() - rho_star.value()).abs() > 1e-12 {
        return Err(CliError::Input(format!(
            "base and complement carry different orders ({} vs {})",
            rho.value(),
            rho_star.value()
        )));
    }
    Ok((rho, delta, delta_star))
}

/// Structured JSON form of a traced curve window.
fn curve_json(
    rho: &Order,
    window: (f64, f64),
    polygon: &uct::curve::LocallyConvexPolygon,
    nests: &[Nest],
) -> Value {
    let vertices: Vec<Value> = polygon
        .vertices
        .iter()
        .map(|v| {
            json!({
                "sigma_from": v.sigma_from,
                "sigma_to": v.sigma_to,
                "x": v.point.x,
                "y": v.point.y,
            })
        })
        .collect();
    let edges: Vec<Value> = polygon
        .edges
        .iter()
        .map(|e| {
            json!({
                "from": [e.from.x, e.from.y],
                "length": e.length,
                "sigma": e.sigma,
                "to": [e.to.x, e.to.y],
            })
        })
        .collect();
    let nests: Vec<Value> = nests
        .iter()
        .map(|n| {
            json!({
                "alpha": n.alpha,
                "center": [n.center.x, n.center.y],
                "radius": n.radius,
            })
        })
        .collect();
    json!({
        "edges": edges,
        "nests": nests,
        "rho": order_to_json(rho),
        "vertices": vertices,
        "window": [window.0, window.1],
    })
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON encoding cannot fail");
    text.push('\n');
    text
}

/// Write to the given path, or stdout.
fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                context: "writing stdout".to_string(),
                source,
            }),
    }
}

const SCHEMA_TEXT: &str = r#"Input documents
===============

Measure (analyze, minimize, curve)
----------------------------------
A JSON object with exactly the keys "rho" and "atoms".

  rho    number > 1/2, or {"num": p, "den": q} for an exact rational p/q
  atoms  array of objects; each carries exactly one of
             "angle"         absolute angle in radians, or
             "angle_over_pi" the same angle divided by pi,
         and exactly one of
             "mass"           atom mass, or
             "mass_times_2pi" the same mass multiplied by 2 pi.

Angles are wrapped to [0, 2 pi); atoms at the same wrapped angle are fused;
zero-mass atoms are dropped. Unknown keys are rejected. At integer rho the
measure must satisfy the moment condition sum m_j exp(i rho t_j) = 0.

Example:
  {"rho": 2, "atoms": [{"angle": 0, "mass": 0.159},
                       {"angle_over_pi": 0.667, "mass_times_2pi": 1.0}]}

Pair (verify)
-------------
A JSON object with exactly the keys "base" and "complement", each a full
measure document as above. Both parts must carry the same order.

Outputs
=======
analyze   full report: sigma_Z, sigma_U, balance data, nests, complement,
          verification (sorted keys, stable bytes).
minimize  the complement alone: "delta_star" is itself a valid measure
          document; "atoms" restates its atoms with angle_over_pi fields;
          "verification" re-checks the construction independently.
curve     --format svg: standalone figure (curve, nests, axes)
          --format csv: rows kind,x,y,angle,length,radius
          --format json: vertices, edges, nests, window.
verify    the verification report; exit code 1 when the pair fails.

Exit codes: 0 success, 1 domain rejection, 2 I/O or format error.
"#;
