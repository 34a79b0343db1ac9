use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eit_floquet::floquet::convergence_report;
use eit_floquet_cli::{
    emit, presets, resolve_scenario, run_scenario, validate_config, CliError, RunArtifacts, ScenarioConfig,
};
use serde::Serialize;

/// Weak-probe propagation through an EIT medium with a periodically chirped
/// control field. All quantities are in atomic units.
#[derive(Parser)]
#[command(name = "eitfloq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig2 … fig8) or a custom TOML scenario and write its tables.
    Run {
        #[arg(long)]
        scenario: String,
        /// Scenario file, read when the scenario is `custom`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario and list every problem found.
    Validate {
        #[arg(long, required_unless_present = "scenario")]
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
    },
    /// Compare output spectra across ladder truncations.
    Converge {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated `S` or `S:N` (ladder half-width, base-band samples).
        #[arg(long)]
        truncations: String,
        /// Depth to compare at; defaults to the scenario's z_end.
        #[arg(long)]
        z: Option<f64>,
    },
    /// Run every preset into `<out>/<name>/` and write `<out>/report.json`.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a preset as an editable TOML scenario.
    Show {
        #[arg(long)]
        scenario: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, config, out } => {
            let cfg = resolve_scenario(&scenario, config.as_deref())?;
            let artifacts = run_scenario(&scenario, &cfg)?;
            let files = emit(&artifacts, &out)?;
            print_run(&artifacts, &files);
            Ok(())
        }
        Command::Validate { config, scenario } => {
            let cfg = match (&config, &scenario) {
                (Some(path), _) => resolve_scenario("custom", Some(path))?,
                (None, Some(name)) => resolve_scenario(name, None)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let issues = validate_config(&cfg);
            for i in &issues {
                println!("{i}");
            }
            if issues.iter().any(|i| i.is_error()) {
                return Err(CliError::Validation(issues));
            }
            println!("ok");
            Ok(())
        }
        Command::Converge {
            scenario,
            config,
            truncations,
            z,
        } => converge(&scenario, config.as_deref(), &truncations, z),
        Command::Report { out } => report(&out),
        Command::Show { scenario } => {
            let p =
                presets::preset(&scenario).ok_or_else(|| CliError::Config(format!("unknown preset `{scenario}`")))?;
            println!("# {}: {}", p.name, p.summary);
            for (field, origin) in &p.sources {
                println!("#   {field}: {origin}");
            }
            print!("{}", p.config.to_toml());
            Ok(())
        }
    }
}

fn print_run(a: &RunArtifacts, files: &[PathBuf]) {
    println!("scenario {}", a.scenario);
    for s in &a.scalars {
        println!("  {:<28} {:>14.6e}   [{}]", s.name, s.value, s.formula);
    }
    for w in &a.warnings {
        println!("  warning: {w}");
    }
    println!("wrote {} files", files.len());
    for f in files {
        println!("  {}", f.display());
    }
}

fn converge(scenario: &str, config: Option<&Path>, list: &str, z: Option<f64>) -> Result<(), CliError> {
    let cfg: ScenarioConfig = resolve_scenario(scenario, config)?;
    let issues = validate_config(&cfg);
    if issues.iter().any(|i| i.is_error()) {
        return Err(CliError::Validation(issues));
    }
    let settings = eit_floquet_cli::parse_truncations(list, cfg.grid.n_omega)?;
    let control = cfg.control().map_err(CliError::Config)?;
    let probe = cfg.probe().map_err(CliError::Config)?;
    let z = z.unwrap_or(cfg.propagation.z_end);
    let report = convergence_report(&cfg.medium(), &control, &probe, z, &settings)?;
    println!("convergence at z = {z:e} (tolerance {:e})", report.tolerance);
    println!(
        "{:>12} {:>12} {:>8} {:>14} {:>14}  result",
        "coarse", "fine", "cells", "max|diff|", "relative"
    );
    for r in &report.rows {
        println!(
            "{:>12} {:>12} {:>8} {:>14.6e} {:>14.6e}  {}",
            format!("{}:{}", r.coarse.ladder, r.coarse.n_omega),
            format!("{}:{}", r.fine.ladder, r.fine.n_omega),
            r.compared_cells,
            r.max_abs_difference,
            r.relative_difference,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportEntry {
    scenario: &'static str,
    summary: String,
    sin2_theta: Option<f64>,
    oscillation_period: Option<f64>,
    overlap_abs: Option<f64>,
    files: usize,
    warnings: Vec<String>,
}

fn report(out: &Path) -> Result<(), CliError> {
    let mut entries = Vec::new();
    for name in presets::NAMES {
        let p = presets::preset(name).expect("listed preset");
        let artifacts = run_scenario(name, &p.config)?;
        let dir = out.join(name);
        let files = emit(&artifacts, &dir)?;
        println!("{name}: {} files in {}", files.len(), dir.display());
        entries.push(ReportEntry {
            scenario: name,
            summary: format!("{name}/{}", emit::SUMMARY_FILE),
            sin2_theta: artifacts.scalar("sin2_theta"),
            oscillation_period: artifacts.scalar("oscillation_period"),
            overlap_abs: artifacts.scalar("overlap_abs"),
            files: files.len(),
            warnings: artifacts.warnings,
        });
    }
    let path = out.join("report.json");
    let mut json = serde_json::to_string_pretty(&entries).expect("report is serialisable");
    json.push('\n');
    std::fs::write(&path, json).map_err(|e| CliError::io(path, e))
}
