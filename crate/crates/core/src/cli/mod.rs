//! The `clex` command line: `split`, `train-static`, `aggregate`, `analyze`,
//! `sweep` and `report`, all driven by one [`RunConfig`].

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_aggregate, cmd_analyze, cmd_report, cmd_split, cmd_sweep, cmd_train_static, PeriodAggregation, SpaceEntry,
    SplitSummary, TrainManifest,
};
pub use config::{apply_override, is_config_key, RunConfig, SweepSettings};

use crate::embed::InitStrategy;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "clex",
    version,
    about = "Diachronic embeddings and semantic change evaluation",
    after_help = "Any config field can also be set with a dotted flag, e.g. --train.dim 300."
)]
pub struct Cli {
    /// JSON run config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Training threads (1 is deterministic).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split charters into period slices and select targets.
    Split,
    /// Train aligned static embeddings per period.
    TrainStatic {
        /// incremental, internal or external; the config's strategies when omitted.
        #[arg(long)]
        strategy: Vec<String>,
    },
    /// Average contextual records into one vector per word per period.
    Aggregate,
    /// Compare periods and evaluate against the change labels.
    Analyze,
    /// Evaluate a grid of embedding sizes and epoch counts.
    Sweep {
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Render report bundles as a self-contained HTML file.
    Report {
        #[arg(long)]
        bundle: Vec<PathBuf>,
        #[arg(long)]
        html: Option<PathBuf>,
    },
}

const CLAP_FLAGS: &[&str] = &["config", "threads", "seed", "out", "strategy", "bundle", "html", "help", "version"];

/// `(dotted key, raw value)` pairs in command-line order.
pub type Overrides = Vec<(String, String)>;

/// Pulls `--dotted.key value` / `--key=value` config overrides out of `args`,
/// leaving everything else for clap.
pub fn split_overrides(args: Vec<OsString>) -> Result<(Vec<OsString>, Overrides)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(flag) = arg.to_str().and_then(|a| a.strip_prefix("--")) else {
            rest.push(arg);
            continue;
        };
        let (key, inline) = match flag.split_once('=') {
            Some((k, v)) => (k, Some(v.to_string())),
            None => (flag, None),
        };
        if CLAP_FLAGS.contains(&key) || !is_config_key(key) {
            rest.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => iter
                .next()
                .and_then(|v| v.into_string().ok())
                .ok_or_else(|| Error::Usage(format!("--{key} needs a value")))?,
        };
        overrides.push((key.to_string(), value));
    }
    Ok((rest, overrides))
}

fn parse_strategy(name: &str) -> Result<InitStrategy> {
    name.parse()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: Vec<OsString>) -> Result<()> {
    let (rest, mut overrides) = split_overrides(args)?;
    let cli = Cli::try_parse_from(rest).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            std::process::exit(0)
        }
        _ => Error::Usage(e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()),
    })?;
    if let Some(t) = cli.threads {
        overrides.push(("train.threads".into(), t.to_string()));
    }
    if let Some(s) = cli.seed {
        overrides.push(("train.seed".into(), s.to_string()));
    }
    if let Some(o) = &cli.out {
        overrides.push(("out".into(), serde_json::to_string(o)?));
    }
    let config = RunConfig::load(cli.config.as_deref(), &overrides)?;

    match cli.command {
        Command::Split => {
            let s = cmd_split(&config)?;
            for (p, charters, tokens) in &s.periods {
                println!("{p}: {charters} charters, {tokens} tokens");
            }
            println!("{} excluded, {} targets", s.excluded, s.targets);
        }
        Command::TrainStatic { strategy } => {
            let strategies = if strategy.is_empty() {
                config.strategies.clone()
            } else {
                strategy.iter().map(|s| parse_strategy(s)).collect::<Result<_>>()?
            };
            for m in cmd_train_static(&config, &strategies)? {
                println!("{}: {} spaces", m.strategy, m.spaces.len());
            }
        }
        Command::Aggregate => {
            for (model, periods) in cmd_aggregate(&config)? {
                for p in periods {
                    println!("{model}/{}: {} words, {} occurrences", p.period, p.words, p.stats.occurrences);
                }
            }
        }
        Command::Analyze => {
            for m in cmd_analyze(&config)?.models {
                for t in &m.transitions {
                    let r = &t.metrics;
                    println!(
                        "{} {}: delta_mu {:.4} (p {:.2e})  rho {:.4} (p {:.2e})",
                        m.name, r.transition, r.delta_mu, r.t_p_value, r.rho, r.rho_p_value
                    );
                }
            }
        }
        Command::Sweep { strategy } => {
            let strategy = match strategy {
                Some(s) => parse_strategy(&s)?,
                None => config.sweep.strategy,
            };
            let bundle = cmd_sweep(&config, strategy)?;
            println!("{} sweep cells", bundle.sweeps.iter().map(|s| s.cells.len()).sum::<usize>());
        }
        Command::Report { bundle, html } => {
            println!("{}", cmd_report(&config, &bundle, html.as_deref())?.display());
        }
    }
    Ok(())
}

/// The single-line, machine-parseable form of an error.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(args: &[&str]) -> Vec<OsString> {
        args.iter().map(OsString::from).collect()
    }

    #[test]
    fn overrides_are_split_out() {
        let (rest, ov) =
            split_overrides(os(&["clex", "--out", "o", "train-static", "--train.dim", "50", "--labels=l.csv"])).unwrap();
        assert_eq!(rest, os(&["clex", "--out", "o", "train-static"]));
        assert_eq!(ov, vec![("train.dim".into(), "50".into()), ("labels".into(), "l.csv".into())]);
        assert!(split_overrides(os(&["clex", "split", "--train.dim"])).is_err());
    }

    #[test]
    fn unknown_strategy_is_usage_error() {
        let e = run(os(&["clex", "train-static", "--strategy", "sideways"])).unwrap_err();
        assert_eq!(e.kind(), "usage");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let e = run(os(&["clex", "split", "--bogus"])).unwrap_err();
        assert_eq!(e.kind(), "usage");
    }

    #[test]
    fn error_line_is_json() {
        let line = error_json(&Error::EmptyPeriodStream("ANG".into()));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["error"], "empty_period_stream");
        assert!(!line.contains('\n'));
    }
}
