//! `rotator-lab`: command-line experiments on relativistic rotators.
//!
//! Each command writes `<out>/<command>.csv` and a JSON sidecar
//! `<out>/<command>.json`, prints a one-line verdict and exits with
//! 0 (as expected), 1 (check failed), 2 (config error) or 3 (degenerate Hessian).

mod commands;
mod config;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{exit, Failure, Outcome};
use config::{ExperimentConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "rotator-lab", version, about = "Numerical laboratory for relativistic rotators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tabulate the Casimir invariants PP and WW against Q
    Casimir,
    /// Scan random states for degeneracy of the velocity Hessian
    Hessian,
    /// Integrate the equations of motion and audit conservation laws
    Integrate,
    /// Two exact solutions with identical initial data and different futures
    Indeterminism,
    /// Solve the degeneracy ODE and compare with the closed-form family
    OdeF,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Casimir => "casimir",
            Command::Hessian => "hessian",
            Command::Integrate => "integrate",
            Command::Indeterminism => "indeterminism",
            Command::OdeF => "ode-f",
        }
    }

    fn run(self, cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
        match self {
            Command::Casimir => commands::casimir(cfg),
            Command::Hessian => commands::hessian(cfg),
            Command::Integrate => commands::integrate_cmd(cfg),
            Command::Indeterminism => commands::indeterminism(cfg),
            Command::OdeF => commands::ode_f(cfg),
        }
    }
}

fn write_outputs(dir: &Path, name: &str, csv: &str, sidecar: &serde_json::Value) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.csv")), csv)?;
    let mut text = serde_json::to_string_pretty(sidecar).expect("sidecar is valid JSON");
    text.push('\n');
    std::fs::write(dir.join(format!("{name}.json")), text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { exit::OK as u8 });
        }
    };
    let cfg = match ExperimentConfig::resolve(&cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    let name = cli.command.name();
    let started = Instant::now();
    let result = cli.command.run(&cfg);
    let duration = started.elapsed().as_secs_f64();

    let (outcome, error) = match result {
        Ok(o) => (Some(o), None),
        Err(f) => (f.partial, Some((f.code, f.message))),
    };
    let code = match (&outcome, &error) {
        (_, Some((c, _))) => *c,
        (Some(o), None) => o.code,
        (None, None) => unreachable!(),
    };
    if let Some(o) = &outcome {
        let sidecar = json!({
            "command": name,
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "duration_seconds": duration,
            "verdict": o.verdict,
            "exit_code": code,
            "summary": o.summary,
        });
        if let Err(e) = write_outputs(&cfg.out, name, &o.csv, &sidecar) {
            eprintln!("cannot write outputs to {}: {e}", cfg.out.display());
            return ExitCode::from(exit::CONFIG as u8);
        }
        println!("{}", o.verdict);
        println!("{}", serde_json::to_string(&o.summary).expect("summary is valid JSON"));
    }
    if let Some((_, msg)) = error {
        eprintln!("{name}: {msg}");
    }
    ExitCode::from(code as u8)
}
