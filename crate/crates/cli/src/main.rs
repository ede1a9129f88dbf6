use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

mod manifest;
mod tasks;

use manifest::{Manifest, PrecisionArg};
use tasks::{Outcome, Report, RunContext};

pub const SUMMARY_FILE: &str = "summary.csv";

const EXIT_FAILED: u8 = 1;
const EXIT_MANIFEST: u8 = 2;

#[derive(Parser)]
#[command(name = "besov-lab", version, about = "Run weight, kernel and multiplier experiments from a manifest")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task in a manifest and write its reports.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Overrides the manifest seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the manifest precision.
        #[arg(long, value_enum)]
        precision: Option<PrecisionArg>,
    },
    /// Print the built-in weight families and their known classification.
    ListWeights,
    /// Parse and validate a manifest without running it.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
}

struct TaskResult {
    id: String,
    kind: &'static str,
    output: String,
    status: &'static str,
    detail: String,
}

fn write_report(path: &Path, report: &Report) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    match report {
        Report::Csv { header, rows } => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Report::Json(v) => {
            let mut s = serde_json::to_string_pretty(v)?;
            s.push('\n');
            fs::write(path, s)?;
        }
    }
    Ok(())
}

fn run(m: &Manifest, out_dir: &Path) -> Result<bool> {
    let outcomes: Vec<Result<Outcome>> = m
        .tasks
        .par_iter()
        .map(|task| {
            let ctx = RunContext {
                seed: task.seed.unwrap_or(m.seed),
                precision: m.precision.into(),
            };
            tasks::run_task(task, &ctx)
        })
        .collect();
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut results = Vec::with_capacity(outcomes.len());
    for (task, outcome) in m.tasks.iter().zip(outcomes) {
        let (status, detail) = match outcome {
            Ok(o) => {
                write_report(&out_dir.join(&task.output), &o.report).with_context(|| format!("task {}: writing {}", task.id, task.output))?;
                let status = match (o.check_passed, task.expected_negative) {
                    (true, false) => "PASS",
                    (false, true) => "PASS_EXPECTED_NEGATIVE",
                    (true, true) => "FAIL_UNEXPECTED_POSITIVE",
                    (false, false) => "FAIL",
                };
                (status, o.detail)
            }
            Err(e) => ("ERROR", format!("{e:#}")),
        };
        results.push(TaskResult {
            id: task.id.clone(),
            kind: task.spec.kind(),
            output: task.output.clone(),
            status,
            detail,
        });
    }

    let mut w = csv::Writer::from_path(out_dir.join(SUMMARY_FILE))?;
    w.write_record(["id", "kind", "output", "status", "detail"])?;
    for r in &results {
        w.write_record([r.id.as_str(), r.kind, r.output.as_str(), r.status, r.detail.as_str()])?;
    }
    w.flush()?;

    let wid = results.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let wk = results.iter().map(|r| r.kind.len()).max().unwrap_or(4).max(4);
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:<wid$}  {:<wk$}  {:<24}  detail", "id", "kind", "status")?;
    for r in &results {
        writeln!(out, "{:<wid$}  {:<wk$}  {:<24}  {}", r.id, r.kind, r.status, r.detail)?;
    }
    let failed: Vec<&TaskResult> = results.iter().filter(|r| !r.status.starts_with("PASS")).collect();
    for r in &failed {
        eprintln!("task {} ({}) {}: {}", r.id, r.kind, r.status, r.detail);
    }
    writeln!(out, "{} of {} tasks passed", results.len() - failed.len(), results.len())?;
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListWeights => {
            let cat = besov_core::builtin_weights();
            println!("{}", serde_json::to_string_pretty(&cat).expect("catalog serializes"));
            ExitCode::SUCCESS
        }
        Command::Validate { manifest } => match manifest::load(&manifest) {
            Ok(m) => {
                println!("{}: {} tasks OK", manifest.display(), m.tasks.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_MANIFEST)
            }
        },
        Command::Run {
            manifest,
            out_dir,
            seed,
            precision,
        } => {
            let mut m = match manifest::load(&manifest) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_MANIFEST);
                }
            };
            if let Some(s) = seed {
                m.seed = s;
            }
            if let Some(p) = precision {
                m.precision = p;
            }
            match run(&m, &out_dir) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(EXIT_FAILED),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_FAILED)
                }
            }
        }
    }
}
