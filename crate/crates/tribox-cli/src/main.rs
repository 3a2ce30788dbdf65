//! `tribox` — generate, analyze, scan, and verify tripartite correlation
//! boxes from the command line.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 usage
//! error (including out-of-range parameter values).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use tribox::{
    analyze_box, analyze_family, analyze_state, scan, settings_by_name, verify_model, Family,
    TripartiteBox,
};

#[derive(Parser)]
#[command(
    name = "tribox",
    version,
    about = "Tripartite Bell/steering inequality toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Svetlichny,
    Mermin,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Svetlichny => Family::Svetlichny,
            FamilyArg::Mermin => Family::Mermin,
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Analytic correlation family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Named state: noisy-ghz (needs --v) or singlet-ext
    #[arg(long)]
    state: Option<String>,
    /// Named settings: svetlichny-optimal or ghz-paradox
    #[arg(long)]
    settings: Option<String>,
    /// Family visibility / state noise parameter
    #[arg(long)]
    v: Option<f64>,
    /// Read the box from a JSON or CSV file
    #[arg(long)]
    box_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family or state box to a file (or stdout)
    Gen {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full single-point analysis: no-signaling, inequalities, assemblages
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Violation tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sweep a family over a parameter grid and locate bound crossings
    Scan {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.0)]
        v_min: f64,
        #[arg(long, default_value_t = 1.0)]
        v_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the convex decomposition of a family at one parameter value
    Verify {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        v: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn write_output(text: &str, out: &Option<PathBuf>) -> tribox::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| tribox::Error::Parse {
            location: path.display().to_string(),
            reason: e.to_string(),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_box(path: &PathBuf) -> tribox::Result<TripartiteBox> {
    let text = std::fs::read_to_string(path).map_err(|e| tribox::Error::Parse {
        location: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        TripartiteBox::from_json(&text)
    } else {
        TripartiteBox::from_csv(&text)
    }
}

/// A source resolves either to a box directly or to state + settings.
enum Resolved {
    Box(TripartiteBox, String),
    State(tribox::DensityMatrix, tribox::MeasurementSettings, String),
    Family(Family, f64),
}

fn resolve(source: &SourceArgs) -> tribox::Result<Resolved> {
    let picked = [
        source.family.is_some(),
        source.state.is_some(),
        source.box_file.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if picked != 1 {
        return Err(tribox::Error::UnknownName {
            kind: "source",
            name: "exactly one of --family, --state, --box-file is required".into(),
        });
    }
    if let Some(family) = source.family {
        let v = source.v.ok_or(tribox::Error::OutOfRange {
            name: "v",
            value: f64::NAN,
            range: "required with --family",
        })?;
        return Ok(Resolved::Family(family.into(), v));
    }
    if let Some(state) = &source.state {
        let rho = tribox::scan::state_by_name(state, source.v)?;
        let settings_name = source.settings.as_deref().unwrap_or("svetlichny-optimal");
        let settings = settings_by_name(settings_name)?;
        let label = format!(
            "state {state}{} with {settings_name}",
            source.v.map(|v| format!(" v={v}")).unwrap_or_default()
        );
        return Ok(Resolved::State(rho, settings, label));
    }
    let path = source.box_file.as_ref().unwrap();
    let b = load_box(path)?;
    Ok(Resolved::Box(b, format!("box file {}", path.display())))
}

fn run(cli: Cli) -> tribox::Result<ExitCode> {
    match cli.command {
        Command::Gen {
            source,
            format,
            out,
        } => {
            let b = match resolve(&source)? {
                Resolved::Family(family, v) => tribox::scan::family_box(family, v)?,
                Resolved::State(rho, settings, _) => tribox::born_tripartite(&rho, &settings)?,
                Resolved::Box(b, _) => b,
            };
            let text = match format {
                FormatArg::Json => b.to_json(),
                FormatArg::Csv => b.to_csv(),
            };
            write_output(&text, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            source,
            format,
            out,
            tol,
        } => {
            let report = match resolve(&source)? {
                Resolved::Family(family, v) => analyze_family(family, v, tol)?,
                Resolved::State(rho, settings, label) => {
                    analyze_state(&rho, &settings, &label, tol)?
                }
                Resolved::Box(b, label) => analyze_box(&b, &label, tol)?,
            };
            let text = match format {
                FormatArg::Json => report.to_json(),
                FormatArg::Csv => report.to_csv(),
            };
            write_output(&text, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            family,
            v_min,
            v_max,
            steps,
            seed,
            tol,
            format,
            out,
        } => {
            let report = scan(family.into(), v_min, v_max, steps, seed, tol)?;
            print!("{}", report.region_strip());
            let text = match format {
                FormatArg::Json => report.to_json(),
                FormatArg::Csv => report.to_csv(),
            };
            // The strip already went to stdout; emit the machine-readable
            // payload only when a destination was requested.
            if let Some(path) = out {
                write_output(&text, &Some(path))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { family, v } => {
            let report = verify_model(family.into(), v)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}
