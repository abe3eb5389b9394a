use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use mirror_born::cli::{default_out_dir, load_config, parse_config_with, run, Command, Overrides};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Packet,
    MirrorCheck,
    Born,
    Measure,
    TwoBall,
    Suite,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Packet => Command::Packet,
            Cmd::MirrorCheck => Command::MirrorCheck,
            Cmd::Born => Command::Born,
            Cmd::Measure => Command::Measure,
            Cmd::TwoBall => Command::TwoBall,
            Cmd::Suite => Command::Suite,
        }
    }
}

/// Mirror-image measurement model against the spectral Born rule.
#[derive(Debug, Parser)]
#[command(name = "mirror-born", version)]
struct Args {
    command: Cmd,
    /// JSON config file (optional for `suite`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let overrides = Overrides {
        command: Some(args.command.into()),
        seed: args.seed,
        tolerance: args.tolerance,
    };
    let cfg = match (&args.config, args.command) {
        (Some(path), _) => load_config(path, overrides),
        (None, Cmd::Suite) => parse_config_with("{}", overrides),
        (None, _) => {
            eprintln!("error: --config is required for `{}`", Command::from(args.command));
            return ExitCode::FAILURE;
        }
    };
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let out = args.out.unwrap_or_else(default_out_dir);
    match run(&cfg, &out) {
        Ok(summary) => {
            if let mirror_born::cli::Metrics::Suite(report) = &summary.metrics {
                for c in &report.criteria {
                    println!("{}", c.summary_line());
                }
            }
            println!("wrote {} files to {}", summary.artifacts.len(), out.display());
            match summary.suite_passed() {
                Some(false) => ExitCode::from(2),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
