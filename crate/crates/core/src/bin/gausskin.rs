use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gausskin_core::runner::{run, verify, CheckStatus, RunOptions};
use gausskin_core::scenario::{preset, Scenario, PRESET_NAMES};
use gausskin_core::Error;

#[derive(Parser)]
#[command(name = "gausskin", version, about = "Squeezed coherent state simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write its CSV series.
    Simulate {
        scenario: PathBuf,
        /// Override the scenario's step count.
        #[arg(long)]
        steps: Option<usize>,
        /// Directory for relative output paths.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compare the closed-form evolution against the Riccati and PDE oracles.
    Verify { scenario: PathBuf },
    /// Inspect the shipped presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Dump { name: String },
}

const USAGE: u8 = 2;
const CHECK_FAILED: u8 = 1;

fn tolerance_override() -> Result<Option<f64>, String> {
    match std::env::var("GAUSSKIN_TOL") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(format!("GAUSSKIN_TOL must be a positive number, got `{s}`")),
        },
    }
}

fn load(path: &PathBuf) -> Result<Scenario, ExitCode> {
    let tol = tolerance_override().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(USAGE)
    })?;
    let mut scenario = Scenario::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(USAGE)
    })?;
    if let Some(t) = tol {
        scenario.constants.tol = t;
    }
    Ok(scenario)
}

fn simulate(path: PathBuf, steps: Option<usize>, out_dir: Option<PathBuf>) -> ExitCode {
    let scenario = match load(&path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if steps == Some(0) {
        eprintln!("error: --steps must be >= 1");
        return ExitCode::from(USAGE);
    }
    let summary = match run(&scenario, &RunOptions { steps, out_dir }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CHECK_FAILED);
        }
    };
    let tol = scenario.constants.tol;
    let checks = [
        ("max symplecticity defect", summary.max_symplecticity_defect, tol),
        ("max joint entropy drift", summary.max_entropy_drift, tol),
        ("max relative purity drift", summary.max_purity_drift, 10.0 * tol),
    ];
    println!("scenario {} ({} steps to t = {})", scenario.name, summary.steps, scenario.t_end);
    let mut ok = true;
    for (label, value, limit) in checks {
        let pass = value <= limit;
        ok &= pass;
        println!(
            "  {label:<28} {value:.3e}  (limit {limit:.1e}) {}",
            if pass { "ok" } else { "EXCEEDED" }
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    }
}

fn verify_cmd(path: PathBuf) -> ExitCode {
    let scenario = match load(&path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = match verify(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CHECK_FAILED);
        }
    };
    println!("scenario {}", scenario.name);
    for c in &report.checks {
        match &c.status {
            CheckStatus::Skipped(why) => println!("  {:<20} skipped ({why})", c.name),
            s => println!(
                "  {:<20} {:.3e}  (limit {:.1e}) {}",
                c.name,
                c.metric,
                c.threshold,
                if *s == CheckStatus::Pass { "pass" } else { "FAIL" }
            ),
        }
    }
    match report.worst() {
        None => ExitCode::SUCCESS,
        Some(w) => {
            eprintln!("check failed: {} = {:.3e} exceeds {:.1e}", w.name, w.metric, w.threshold);
            ExitCode::from(CHECK_FAILED)
        }
    }
}

fn presets(action: PresetAction) -> ExitCode {
    // A closed pipe (e.g. `| head`) is not an error here.
    let mut out = std::io::stdout().lock();
    match action {
        PresetAction::List => {
            for name in PRESET_NAMES {
                let _ = writeln!(out, "{name}");
            }
            ExitCode::SUCCESS
        }
        PresetAction::Dump { name } => match preset(&name) {
            Ok(s) => {
                let _ = writeln!(out, "{}", s.to_json());
                ExitCode::SUCCESS
            }
            Err(Error::InvalidArgument(msg)) => {
                eprintln!("error: {msg}");
                ExitCode::from(USAGE)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(CHECK_FAILED)
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Simulate { scenario, steps, out_dir } => simulate(scenario, steps, out_dir),
        Command::Verify { scenario } => verify_cmd(scenario),
        Command::Presets { action } => presets(action),
    }
}
