//! Scenario execution: validated config in, tables and scalars out.

use eit_floquet::adiabatic::{oscillation_period, project_onto_optimal, Projection};
use eit_floquet::floquet::{
    convergence_report, reconstruct_time, susceptibility, ConvergenceReport, FloquetEngine, PropagationPath,
};
use eit_floquet::specfun::bessel_j;
use eit_floquet::{mixing_angle, Complex64, FloquetGrid, FloquetSpectrum, PhaseModulation, ProbePulseSpec};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::validate::validate_config;

/// A named scalar and the formula that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalar {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
}

/// Complex samples against one abscissa (frequency, time or position, a.u.)
/// taken at a fixed value of another.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub at: f64,
    pub rows: Vec<(f64, Complex64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRow {
    pub omega: f64,
    pub mode: usize,
    pub value: Complex64,
}

/// Output spectrum at `ω = -nΔ` against `|V| Ω₁₀ √π τ |J_n(g′)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakRow {
    pub z: f64,
    pub n: i64,
    pub frequency: f64,
    pub engine: f64,
    pub bessel: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EngineDiagnostics {
    pub columns: usize,
    pub expm_columns: usize,
    pub max_reconstruction_residual: f64,
    pub max_eigenvector_condition: f64,
    pub min_mode_imag: f64,
    pub absorbed_modes: usize,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub scenario: String,
    pub config: ScenarioConfig,
    /// Incoming pulse with the chirp depth resolved.
    pub probe: ProbePulseSpec,
    pub grid: FloquetGrid,
    /// One per `z_samples` entry, ascending frequency.
    pub spectra: Vec<Series>,
    /// Spectral power `Σ|Ω|² dω` at each `z_samples` entry.
    pub spectral_power: Vec<(f64, f64)>,
    pub profiles: Vec<Series>,
    /// One per `t_samples` entry, against position.
    pub snapshots: Vec<Series>,
    /// Adiabatic prediction for the projected component, per `z_samples`.
    pub adiabatic: Vec<Series>,
    pub eigenvalues: Vec<EigenRow>,
    pub susceptibility: Vec<(f64, Complex64)>,
    pub convergence: Option<ConvergenceReport>,
    pub peaks: Vec<PeakRow>,
    pub scalars: Vec<Scalar>,
    pub diagnostics: EngineDiagnostics,
    pub warnings: Vec<String>,
}

impl RunArtifacts {
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|s| s.name == name).map(|s| s.value)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn series_of(spectrum: &FloquetSpectrum, at: f64) -> Series {
    let grid = spectrum.grid();
    let rows = spectrum
        .flat()
        .into_iter()
        .enumerate()
        .map(|(k, v)| (grid.flat_frequency(k), v))
        .collect();
    Series { at, rows }
}

fn numerical(msg: String) -> CliError {
    CliError::Numerical(msg)
}

pub fn run_scenario(name: &str, cfg: &ScenarioConfig) -> Result<RunArtifacts, CliError> {
    let mut warnings = Vec::new();
    let issues = validate_config(cfg);
    if issues.iter().any(|i| i.is_error()) {
        return Err(CliError::Validation(issues));
    }
    warnings.extend(issues.iter().map(|i| i.to_string()));

    let medium = cfg.medium();
    let control = cfg.control().map_err(CliError::Config)?;
    let probe = cfg.probe().map_err(CliError::Config)?;
    let grid = cfg.grid()?;
    let theta = mixing_angle(medium.kappa2(), control.omega2)?;
    let prop = &cfg.propagation;
    let out = &cfg.outputs;

    let engine = FloquetEngine::new(&medium, &control, grid)?;
    let diagnostics = engine_diagnostics(&engine);
    if diagnostics.expm_columns > 0 {
        warnings.push(format!(
            "{} of {} columns fell back to the matrix exponential",
            diagnostics.expm_columns, diagnostics.columns
        ));
    }

    let input = engine.incoming(&probe)?;
    let mut outputs = Vec::with_capacity(prop.z_samples.len());
    let mut absorbed = 0;
    for &z in &prop.z_samples {
        let (spec, d) = engine.propagate_with_diagnostics(&input, z)?;
        if d.overflowed_modes > 0 {
            return Err(numerical(format!(
                "{} growing modes overflow at z = {z:e}",
                d.overflowed_modes
            )));
        }
        if !spec.is_finite() {
            return Err(numerical(format!("non-finite spectrum at z = {z:e}")));
        }
        absorbed += d.absorbed_modes;
        outputs.push(spec);
    }
    let spectral_power = prop
        .z_samples
        .iter()
        .zip(&outputs)
        .map(|(&z, s)| (z, s.spectral_power()))
        .collect();

    let projection = if out.projection {
        match control.phase {
            PhaseModulation::Sinusoidal { .. } => Some(project_onto_optimal(&probe, &control, &medium)?),
            PhaseModulation::GeneralPeriodic { .. } => {
                warnings.push("projection skipped: needs a sinusoidal control phase".into());
                None
            }
        }
    } else {
        None
    };

    let mut scalars = vec![
        Scalar {
            name: "kappa2",
            value: medium.kappa2(),
            formula: "kappa2 = N |d_ab|^2 omega1 / (2 eps0 hbar), eps0 = 1/(4 pi), hbar = 1",
        },
        Scalar {
            name: "tan2_theta",
            value: theta.tan2,
            formula: "tan2 = kappa2 / |omega2|^2",
        },
        Scalar {
            name: "sin2_theta",
            value: theta.sin2,
            formula: "sin2 = tan2 / (1 + tan2)",
        },
        Scalar {
            name: "cos2_theta",
            value: theta.cos2,
            formula: "cos2 = 1 / (1 + tan2)",
        },
        Scalar {
            name: "group_velocity",
            value: theta.group_velocity,
            formula: "v_g = c cos2",
        },
        Scalar {
            name: "probe_chirp_depth",
            value: probe.chirp_depth,
            formula: "g' as configured, or g sin2 when matched",
        },
    ];
    if let PhaseModulation::Sinusoidal { .. } = control.phase {
        scalars.push(Scalar {
            name: "oscillation_period",
            value: oscillation_period(&medium, &control)?,
            formula: "z0 = 2 pi c cos2 / Delta",
        });
    }
    scalars.extend([
        Scalar {
            name: "max_reconstruction_residual",
            value: diagnostics.max_reconstruction_residual,
            formula: "max over columns of max|U diag(lambda) U^-1 - N| / max|N|",
        },
        Scalar {
            name: "max_eigenvector_condition",
            value: diagnostics.max_eigenvector_condition,
            formula: "max over columns of cond_1(U)",
        },
    ]);

    let mut peaks = Vec::new();
    let mut adiabatic = Vec::new();
    if let Some(p) = &projection {
        scalars.extend(projection_scalars(p));
        peaks = peak_table(&probe, p, &grid, &prop.z_samples, &outputs);
        for &z in &prop.z_samples {
            adiabatic.push(series_of(&p.predicted_spectrum(z, &grid)?, z));
        }
    }

    let profiles = if out.profile {
        let times = linspace_window(cfg, &probe, theta.group_velocity);
        prop.z_samples
            .iter()
            .zip(&outputs)
            .map(|(&z, s)| Series {
                at: z,
                rows: times.iter().copied().zip(reconstruct_time(s, &times)).collect(),
            })
            .collect()
    } else {
        vec![]
    };

    let snapshots = if out.snapshot && !prop.t_samples.is_empty() {
        snapshots(&engine, &input, prop.z_end, prop.snapshot_points, &prop.t_samples)?
    } else {
        vec![]
    };

    let eigenvalues = if out.eigenvalues {
        engine
            .columns()
            .iter()
            .flat_map(|c| {
                c.eigenvalues().iter().enumerate().map(move |(mode, &value)| EigenRow {
                    omega: c.omega,
                    mode,
                    value,
                })
            })
            .collect()
    } else {
        vec![]
    };
    if out.eigenvalues && diagnostics.expm_columns > 0 {
        warnings.push("eigenvalue table omits columns without an eigendecomposition".into());
    }

    let chi = if out.susceptibility {
        (0..grid.cells())
            .map(|k| {
                let nu = grid.flat_frequency(k);
                susceptibility(nu, &medium, control.omega2).map(|c| (nu, c))
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![]
    };

    let convergence = if out.convergence {
        Some(convergence_report(
            &medium,
            &control,
            &probe,
            prop.z_end,
            &cfg.convergence_truncations(),
        )?)
    } else {
        None
    };

    let spectra = if out.spectrum {
        prop.z_samples
            .iter()
            .zip(&outputs)
            .map(|(&z, s)| series_of(s, z))
            .collect()
    } else {
        vec![]
    };

    Ok(RunArtifacts {
        scenario: name.to_string(),
        config: cfg.clone(),
        probe,
        grid,
        spectra,
        spectral_power,
        profiles,
        snapshots,
        adiabatic,
        eigenvalues,
        susceptibility: chi,
        convergence,
        peaks,
        scalars,
        diagnostics: EngineDiagnostics {
            absorbed_modes: absorbed,
            ..diagnostics
        },
        warnings,
    })
}

fn engine_diagnostics(engine: &FloquetEngine) -> EngineDiagnostics {
    let mut d = EngineDiagnostics {
        columns: engine.columns().len(),
        min_mode_imag: f64::INFINITY,
        ..Default::default()
    };
    for c in engine.columns() {
        if c.path() == PropagationPath::MatrixExponential {
            d.expm_columns += 1;
            continue;
        }
        d.max_reconstruction_residual = d.max_reconstruction_residual.max(c.reconstruction_residual());
        d.max_eigenvector_condition = d.max_eigenvector_condition.max(c.condition_number());
        for v in c.eigenvalues() {
            d.min_mode_imag = d.min_mode_imag.min(v.im);
        }
    }
    d
}

fn projection_scalars(p: &Projection) -> [Scalar; 4] {
    const V: &str = "V = <optimal|probe>, Gaussian-Bessel double sum over normalised pulses";
    [
        Scalar {
            name: "overlap_abs",
            value: p.coefficient.norm(),
            formula: V,
        },
        Scalar {
            name: "overlap_re",
            value: p.coefficient.re,
            formula: V,
        },
        Scalar {
            name: "overlap_im",
            value: p.coefficient.im,
            formula: V,
        },
        Scalar {
            name: "projection_residual",
            value: p.residual,
            formula: "sqrt(1 - |V|^2)",
        },
    ]
}

fn peak_table(
    probe: &ProbePulseSpec,
    p: &Projection,
    grid: &FloquetGrid,
    zs: &[f64],
    outputs: &[FloquetSpectrum],
) -> Vec<PeakRow> {
    let g = p.optimal.chirp_depth;
    let scale = p.coefficient.norm() * probe.spectral_peak();
    let n_max = g.abs().ceil() as i64 + 2;
    let mut rows = Vec::new();
    for (&z, spec) in zs.iter().zip(outputs) {
        for n in -n_max..=n_max {
            let frequency = -(n as f64) * grid.delta;
            let Some(value) = spec.at_frequency(frequency) else {
                continue;
            };
            let engine = value.norm();
            let bessel = scale * bessel_j(n, g).abs();
            rows.push(PeakRow {
                z,
                n,
                frequency,
                engine,
                bessel,
                ratio: engine / bessel,
            });
        }
    }
    rows
}

fn linspace_window(cfg: &ScenarioConfig, probe: &ProbePulseSpec, v_g: f64) -> Vec<f64> {
    let prop = &cfg.propagation;
    let [a, b] = prop.profile_window.unwrap_or([
        probe.center_time - 6.0 * probe.tau,
        probe.center_time + prop.z_end / v_g + 6.0 * probe.tau,
    ]);
    linspace(a, b, prop.profile_points)
}

fn snapshots(
    engine: &FloquetEngine,
    input: &FloquetSpectrum,
    z_end: f64,
    points: usize,
    times: &[f64],
) -> Result<Vec<Series>, CliError> {
    let positions = linspace(0.0, z_end, points);
    let prepared = engine.prepare(input)?;
    let mut columns: Vec<Vec<(f64, Complex64)>> = vec![Vec::with_capacity(points); times.len()];
    for &z in &positions {
        let spec = engine.propagate_prepared(&prepared, z)?;
        if !spec.is_finite() {
            return Err(numerical(format!("non-finite spectrum at z = {z:e}")));
        }
        for (col, v) in columns.iter_mut().zip(reconstruct_time(&spec, times)) {
            col.push((z, v));
        }
    }
    Ok(times
        .iter()
        .zip(columns)
        .map(|(&t, rows)| Series { at: t, rows })
        .collect())
}
