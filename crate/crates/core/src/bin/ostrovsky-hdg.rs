use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ostrovsky_hdg::experiments::{emit_outputs, run_experiment, ExperimentKind, Overrides, RunConfig};
use ostrovsky_hdg::Error;

/// HDG experiments for the Ostrovsky equation.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence table.
    Convergence(RunArgs),
    /// Petviashvili profile propagated by the HDG scheme.
    Soliton(RunArgs),
    /// Peakon and the beta -> 0 limit.
    PeakonLimit(RunArgs),
    /// Single run described by a configuration file.
    Custom(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $OSTROVSKY_HDG_OUT/<experiment> or ./output/<experiment>].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    theta: Option<f64>,
    /// Fixed time step (replaces any `dt_scale`).
    #[arg(long)]
    dt: Option<f64>,
    /// Polynomial degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Comma-separated element counts.
    #[arg(long, value_delimiter = ',')]
    elements: Option<Vec<usize>>,
    /// Dispersion coefficient; a comma-separated list for peakon-limit.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Option<Vec<f64>>,
    /// No progress output.
    #[arg(long)]
    quiet: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Petviashvili { .. } => 4,
        Error::Io { .. } | Error::Usage(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Convergence(a) => (ExperimentKind::Convergence, a),
        Command::Soliton(a) => (ExperimentKind::Soliton, a),
        Command::PeakonLimit(a) => (ExperimentKind::PeakonLimit, a),
        Command::Custom(a) => (ExperimentKind::Custom, a),
    };
    let quiet = args.quiet;
    match run(kind, args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if !quiet {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> ostrovsky_hdg::Result<u8> {
    let ov = Overrides {
        out: args.out,
        theta: args.theta,
        dt: args.dt,
        degree: args.degree,
        elements: args.elements,
        beta: args.beta,
    };
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            // the subcommand wins over a missing or different `kind`
            let text = force_kind(&text, kind)?;
            RunConfig::from_toml_str(&text, &ov)?
        }
        None => RunConfig::default_for(kind, &ov)?,
    };
    let quiet = args.quiet;
    let mut progress = |line: &str| {
        if !quiet {
            eprintln!("{line}");
        }
    };
    let results = run_experiment(&cfg, &mut progress)?;
    emit_outputs(&results, &cfg.output.dir)?;
    if !quiet {
        eprintln!("wrote {}", cfg.output.dir.display());
    }
    Ok(if results.failures.is_empty() { 0 } else { 3 })
}

fn force_kind(text: &str, kind: ExperimentKind) -> ostrovsky_hdg::Result<String> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
        key: "<config>".into(),
        message: e.message().to_string(),
    })?;
    if let Some(existing) = table.get("kind").and_then(|v| v.as_str()) {
        if existing != kind.name() {
            return Err(Error::Config {
                key: "kind".into(),
                message: format!("file declares `{existing}` but the subcommand is `{}`", kind.name()),
            });
        }
    }
    table.insert("kind".into(), toml::Value::String(kind.name().into()));
    Ok(table.to_string())
}
