//! Scenario runner for the gmech discrete mechanics library.
//!
//! ```text
//! gmech run <config.json> [--out DIR]
//! gmech compare <a.json> <b.json> --projection <id> [--out DIR]
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 I/O error. Log verbosity is controlled by the RUST_LOG environment
//! variable.

mod compare;
mod config;
mod output;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use log::info;

use config::RawConfig;
use scenario::RunError;

enum CliError {
    Usage(String),
    Config(String),
    Solver { step: usize, message: String },
    Io(String),
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(m) => CliError::Config(m),
            RunError::Solver { step, message } => CliError::Solver { step, message },
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Solver { .. } => 3,
            CliError::Io(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            CliError::Usage(m) => eprintln!("usage error: {m}"),
            CliError::Config(m) => eprintln!("configuration error: {m}"),
            CliError::Solver { step, message } => {
                eprintln!("solver failure at step {step}: {message}")
            }
            CliError::Io(m) => eprintln!("i/o error: {m}"),
        }
    }
}

const USAGE: &str = "usage:
  gmech run <config.json> [--out DIR]
  gmech compare <a.json> <b.json> --projection <id> [--out DIR]";

fn load_config(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse config {}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    let result = scenario::run_scenario(&cfg)?;

    // render everything before touching the filesystem
    let traj = output::trajectory_csv(&result);
    let diag = output::diagnostics_csv(&result, &cfg.diagnostics);
    let summary = output::summary_json(&output::summarize(&cfg.model, cfg.steps, &result));

    write_file(out_dir, &cfg.output.trajectory_csv, &traj)?;
    write_file(out_dir, &cfg.output.diagnostics_csv, &diag)?;
    write_file(out_dir, &cfg.output.summary_json, &summary)?;
    Ok(())
}

fn cmd_compare(
    a_path: &Path,
    b_path: &Path,
    projection: &str,
    out_dir: &Path,
) -> Result<(), CliError> {
    let a = load_config(a_path)?;
    let b = load_config(b_path)?;
    let outcome = compare::run_compare(&a, &b, projection)?;

    let mut summary = serde_json::to_string_pretty(&outcome.summary)
        .expect("compare summary serializes");
    summary.push('\n');
    write_file(out_dir, "discrepancy.csv", &outcome.discrepancy_csv)?;
    write_file(out_dir, "compare_summary.json", &summary)?;
    println!("max discrepancy: {:e}", outcome.summary.max_discrepancy);
    Ok(())
}

fn parse_out_dir(args: &[String]) -> Result<(Vec<String>, PathBuf), CliError> {
    let mut positional = Vec::new();
    let mut out = PathBuf::from(".");
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if arg == "--out" {
            let dir = it
                .next()
                .ok_or_else(|| CliError::Usage("--out requires a directory".into()))?;
            out = PathBuf::from(dir);
        } else if let Some(rest) = arg.strip_prefix("--out=") {
            out = PathBuf::from(rest);
        } else {
            positional.push(arg.clone());
        }
    }
    Ok((positional, out))
}

fn dispatch() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some((command, rest)) = args.split_first() else {
        return Err(CliError::Usage(USAGE.into()));
    };

    match command.as_str() {
        "run" => {
            let (positional, out) = parse_out_dir(rest)?;
            let [config] = positional.as_slice() else {
                return Err(CliError::Usage(USAGE.into()));
            };
            cmd_run(Path::new(config), &out)
        }
        "compare" => {
            let mut projection: Option<String> = None;
            let mut filtered = Vec::new();
            let mut it = rest.iter();
            while let Some(arg) = it.next() {
                if arg == "--projection" {
                    projection = Some(
                        it.next()
                            .ok_or_else(|| {
                                CliError::Usage("--projection requires an id".into())
                            })?
                            .clone(),
                    );
                } else if let Some(v) = arg.strip_prefix("--projection=") {
                    projection = Some(v.to_string());
                } else {
                    filtered.push(arg.clone());
                }
            }
            let (positional, out) = parse_out_dir(&filtered)?;
            let [a, b] = positional.as_slice() else {
                return Err(CliError::Usage(USAGE.into()));
            };
            let projection =
                projection.ok_or_else(|| CliError::Usage("--projection is required".into()))?;
            cmd_compare(Path::new(a), Path::new(b), &projection, &out)
        }
        other => Err(CliError::Usage(format!("unknown command '{other}'\n{USAGE}"))),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}
