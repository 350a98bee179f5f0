use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tubelab::cli::{apply_override, emit, run, ExperimentConfig, OutputFormat, EXIT_USAGE};
use tubelab::Error;

#[derive(Parser)]
#[command(
    name = "tubelab",
    version,
    about = "Volume densities, geodesic spheres and tubes on model spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        threads: Option<usize>,
        /// `dotted.path=value`, value parsed as JSON or taken as a string.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("tubelab: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let Command::Run {
        config,
        out,
        format,
        threads,
        overrides,
    } = cli.command;
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => return usage(format!("{config}: {e}")),
    };
    let mut doc: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return usage(format!("{config}: {e}")),
    };
    for o in &overrides {
        if let Err(e) = apply_override(&mut doc, o) {
            return usage(e);
        }
    }
    let cfg = match ExperimentConfig::from_value(doc) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return usage(e);
        }
    }
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e @ Error::Config(_))
        | Err(e @ Error::Parameter(_))
        | Err(e @ Error::Unsupported(_)) => return usage(e),
        Err(e) => {
            eprintln!("tubelab: {e}");
            return ExitCode::from(1);
        }
    };
    let format = format.unwrap_or(cfg.output.format);
    let path = out.or(cfg.output.path.clone());
    match emit(&outcome.report, format, path.as_deref()) {
        Ok(text) if path.is_none() => print!("{text}"),
        Ok(_) => {}
        Err(e) => {
            eprintln!("tubelab: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(outcome.status as u8)
}
