//! Command-line flags. Scalars only; structured inputs come from files.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{CheckKind, Command, ExperimentConfig, ModeName};

#[derive(Debug, Parser)]
#[command(name = "contractum", version, about = "Checks and iterations for (alpha, beta)-contractions")]
pub struct Cli {
    /// JSON experiment config; flags given here override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for all randomized sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Path for the JSON report; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Debug, Args, Default)]
pub struct MapArgs {
    /// `corpus:<label>` or a map JSON file.
    #[arg(long = "map")]
    pub map: Option<String>,
    /// JSON file `{alpha, beta, gamma?, k?}`.
    #[arg(long)]
    pub controls: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Sampled (alpha, beta)-mapping, contraction, or Hausdorff check.
    CheckMap {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum)]
        check: Option<CheckKind>,
        #[arg(long)]
        sample_step: Option<f64>,
        #[arg(long)]
        random_points: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Runs the selection iteration from one or more starts.
    Iterate {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        x0: Vec<f64>,
        /// Additional seeded random starts.
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        eps_fp: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// JSON-lines trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Validates theorem hypotheses for a map and its controls.
    VerifyTheorem {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeName>,
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Majorant sequence for phi(t) = 1 - C t^p and its summability.
    Summability {
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verifies the three worked claims of the built-in example.
    ExampleCiric,
}

impl Sub {
    fn command(&self) -> Command {
        match self {
            Sub::CheckMap { .. } => Command::CheckMap,
            Sub::Iterate { .. } => Command::Iterate,
            Sub::VerifyTheorem { .. } => Command::VerifyTheorem,
            Sub::Summability { .. } => Command::Summability,
            Sub::ExampleCiric => Command::ExampleCiric,
        }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl Cli {
    /// Merges flags over `base`. The subcommand, when given, replaces the
    /// config's command.
    pub fn apply(self, base: Option<ExperimentConfig>) -> Result<ExperimentConfig, String> {
        let mut cfg = match (base, &self.command) {
            (Some(mut b), Some(sub)) => {
                b.command = sub.command();
                b
            }
            (Some(b), None) => b,
            (None, Some(sub)) => ExperimentConfig::new(sub.command()),
            (None, None) => return Err("no subcommand and no --config given".into()),
        };
        set(&mut cfg.seed, self.seed);
        set_opt(&mut cfg.output, self.output);
        let map_args = |cfg: &mut ExperimentConfig, m: MapArgs| {
            set_opt(&mut cfg.map_source, m.map);
            set_opt(&mut cfg.controls_source, m.controls);
        };
        match self.command {
            None | Some(Sub::ExampleCiric) => {}
            Some(Sub::CheckMap { map, check, sample_step, random_points, pairs }) => {
                map_args(&mut cfg, map);
                set(&mut cfg.check, check);
                set(&mut cfg.sample_step, sample_step);
                set(&mut cfg.random_points, random_points);
                set(&mut cfg.pairs, pairs);
            }
            Some(Sub::Iterate { map, x0, starts, eps_fp, max_steps, trace }) => {
                map_args(&mut cfg, map);
                if !x0.is_empty() {
                    cfg.x0 = x0;
                }
                set(&mut cfg.starts, starts);
                set(&mut cfg.stop.eps_fp, eps_fp);
                set(&mut cfg.stop.max_steps, max_steps);
                set_opt(&mut cfg.trace, trace);
            }
            Some(Sub::VerifyTheorem { map, mode, c, p }) => {
                map_args(&mut cfg, map);
                set_opt(&mut cfg.mode, mode);
                set_opt(&mut cfg.c, c);
                set_opt(&mut cfg.p, p);
            }
            Some(Sub::Summability { c, p, t0, n, csv }) => {
                set_opt(&mut cfg.c, c);
                set_opt(&mut cfg.p, p);
                set(&mut cfg.t0, t0);
                set(&mut cfg.n, n);
                set_opt(&mut cfg.csv, csv);
            }
        }
        Ok(cfg)
    }
}
