//! Table and summary writers. Output depends only on the artifacts, so equal
//! runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use eit_floquet::floquet::ConvergenceReport;
use eit_floquet::Complex64;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::run::{EngineDiagnostics, PeakRow, RunArtifacts, Scalar, Series};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub kind: &'static str,
    /// Depth or time the table was taken at, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
}

#[derive(Serialize)]
struct ProbeSummary {
    omega10_re: f64,
    omega10_im: f64,
    tau: f64,
    chirp_depth: f64,
    chirp_frequency: f64,
    center_time: f64,
}

#[derive(Serialize)]
struct GridSummary {
    delta: f64,
    n_omega: usize,
    ladder: usize,
    d_omega: f64,
}

#[derive(Serialize)]
struct ConvergenceSummary {
    z: f64,
    tolerance: f64,
    all_pass: bool,
    rows: Vec<ConvergenceRowSummary>,
}

#[derive(Serialize)]
struct ConvergenceRowSummary {
    coarse_ladder: usize,
    coarse_n_omega: usize,
    fine_ladder: usize,
    fine_n_omega: usize,
    compared_cells: usize,
    max_abs_difference: f64,
    relative_difference: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PowerEntry {
    z: f64,
    spectral_power: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    config: &'a ScenarioConfig,
    probe: ProbeSummary,
    grid: GridSummary,
    scalars: &'a [Scalar],
    spectral_power: Vec<PowerEntry>,
    peaks: &'a [PeakRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<ConvergenceSummary>,
    diagnostics: &'a EngineDiagnostics,
    warnings: &'a [String],
    files: Vec<FileEntry>,
}

fn convergence_summary(r: &ConvergenceReport) -> ConvergenceSummary {
    ConvergenceSummary {
        z: r.z,
        tolerance: r.tolerance,
        all_pass: r.all_pass(),
        rows: r
            .rows
            .iter()
            .map(|row| ConvergenceRowSummary {
                coarse_ladder: row.coarse.ladder,
                coarse_n_omega: row.coarse.n_omega,
                fine_ladder: row.fine.ladder,
                fine_n_omega: row.fine.n_omega,
                compared_cells: row.compared_cells,
                max_abs_difference: row.max_abs_difference,
                relative_difference: row.relative_difference,
                pass: row.pass,
            })
            .collect(),
    }
}

fn complex_table(header: &str, rows: &[(f64, Complex64)]) -> String {
    let mut s = String::with_capacity(rows.len() * 100);
    s.push_str(header);
    s.push('\n');
    for (x, v) in rows {
        writeln!(s, "{x:.17e},{:.17e},{:.17e},{:.17e}", v.re, v.im, v.norm()).unwrap();
    }
    s
}

fn series<'a>(prefix: &str, items: &'a [Series]) -> Vec<(String, f64, &'a Series)> {
    items
        .iter()
        .enumerate()
        .map(|(k, s)| (format!("{prefix}{k:02}.csv"), s.at, s))
        .collect()
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes every selected table and `summary.json`; returns the written
/// paths, summary last.
pub fn emit(artifacts: &RunArtifacts, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: String, kind: &'static str, at: Option<f64>, body: String| -> Result<(), CliError> {
        write(out_dir, &name, &body)?;
        files.push(FileEntry { file: name, kind, at });
        Ok(())
    };

    for (name, at, s) in series("spectrum_z", &artifacts.spectra) {
        put(
            name,
            "spectrum",
            Some(at),
            complex_table("frequency_au,re,im,abs", &s.rows),
        )?;
    }
    for (name, at, s) in series("adiabatic_z", &artifacts.adiabatic) {
        put(
            name,
            "adiabatic",
            Some(at),
            complex_table("frequency_au,re,im,abs", &s.rows),
        )?;
    }
    for (name, at, s) in series("profile_z", &artifacts.profiles) {
        put(name, "profile", Some(at), complex_table("time_au,re,im,abs", &s.rows))?;
    }
    for (name, at, s) in series("snapshot_t", &artifacts.snapshots) {
        put(
            name,
            "snapshot",
            Some(at),
            complex_table("position_au,re,im,abs", &s.rows),
        )?;
    }
    if !artifacts.susceptibility.is_empty() {
        put(
            "susceptibility.csv".into(),
            "susceptibility",
            None,
            complex_table("frequency_au,re,im,abs", &artifacts.susceptibility),
        )?;
    }
    if !artifacts.eigenvalues.is_empty() {
        let mut s = String::from("omega_au,mode,re,im\n");
        for r in &artifacts.eigenvalues {
            writeln!(s, "{:.17e},{},{:.17e},{:.17e}", r.omega, r.mode, r.value.re, r.value.im).unwrap();
        }
        put("eigenvalues.csv".into(), "eigenvalues", None, s)?;
    }
    if let Some(report) = &artifacts.convergence {
        let mut s = String::from(
            "coarse_ladder,coarse_n_omega,fine_ladder,fine_n_omega,compared_cells,max_abs_difference,relative_difference,pass\n",
        );
        for r in &report.rows {
            writeln!(
                s,
                "{},{},{},{},{},{:.17e},{:.17e},{}",
                r.coarse.ladder,
                r.coarse.n_omega,
                r.fine.ladder,
                r.fine.n_omega,
                r.compared_cells,
                r.max_abs_difference,
                r.relative_difference,
                r.pass
            )
            .unwrap();
        }
        put("convergence.csv".into(), "convergence", Some(report.z), s)?;
    }

    let p = &artifacts.probe;
    let g = &artifacts.grid;
    let summary = Summary {
        scenario: &artifacts.scenario,
        config: &artifacts.config,
        probe: ProbeSummary {
            omega10_re: p.omega10.re,
            omega10_im: p.omega10.im,
            tau: p.tau,
            chirp_depth: p.chirp_depth,
            chirp_frequency: p.chirp_frequency,
            center_time: p.center_time,
        },
        grid: GridSummary {
            delta: g.delta,
            n_omega: g.n_omega,
            ladder: g.ladder,
            d_omega: g.d_omega(),
        },
        scalars: &artifacts.scalars,
        spectral_power: artifacts
            .spectral_power
            .iter()
            .map(|&(z, spectral_power)| PowerEntry { z, spectral_power })
            .collect(),
        peaks: &artifacts.peaks,
        convergence: artifacts.convergence.as_ref().map(convergence_summary),
        diagnostics: &artifacts.diagnostics,
        warnings: &artifacts.warnings,
        files: files.clone(),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary is serialisable");
    json.push('\n');
    write(out_dir, SUMMARY_FILE, &json)?;

    let mut paths: Vec<PathBuf> = files.iter().map(|f| out_dir.join(&f.file)).collect();
    paths.push(out_dir.join(SUMMARY_FILE));
    Ok(paths)
}
