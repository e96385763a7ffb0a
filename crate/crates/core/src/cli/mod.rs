//! Command-line front end.

mod args;
mod config;
mod run;

use std::io::Write;

pub use args::Cli;
pub use config::{CheckKind, Command, ExperimentConfig, ModeName};
pub use run::{run, Outcome, SCHEMA};

use crate::tolerance::{parse_tolerance, TOL_ENV};

/// Exit code for unreadable or invalid configuration.
pub const EXIT_CONFIG: i32 = 2;

/// Parses, runs, prints, and returns the process exit code.
///
/// The JSON report goes to `--output` or stdout. A summability CSV without
/// a `--csv` path takes stdout instead. Human-readable lines go to stdout
/// when it is otherwise unused and to stderr when it is not.
pub fn main_entry(cli: Cli) -> i32 {
    if let Ok(raw) = std::env::var(TOL_ENV) {
        if parse_tolerance(&raw).is_none() {
            eprintln!("error: {TOL_ENV}={raw:?} is not a positive finite number");
            return EXIT_CONFIG;
        }
    }
    let base = match &cli.config {
        None => None,
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|raw| serde_json::from_str::<ExperimentConfig>(&raw).map_err(|e| e.to_string()))
        {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("error: config {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
    };
    let cfg = match cli.apply(base) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let stdout_free = cfg.output.is_some() && outcome.csv.is_none();
    let printed = if let Some(csv) = &outcome.csv {
        out.write_all(csv.as_bytes())
    } else if cfg.output.is_none() {
        serde_json::to_string_pretty(&outcome.report)
            .map_err(std::io::Error::other)
            .and_then(|s| writeln!(out, "{s}"))
    } else {
        Ok(())
    };
    let printed = printed.and_then(|_| {
        if stdout_free {
            out.write_all(outcome.text.as_bytes())
        } else {
            std::io::stderr().write_all(outcome.text.as_bytes())
        }
    });
    if let Err(e) = printed {
        eprintln!("error: writing output: {e}");
        return EXIT_CONFIG;
    }
    outcome.code
}
