//! Scenario configuration (TOML, atomic units throughout).

use eit_floquet::floquet::Truncation;
use eit_floquet::{
    mixing_angle, Complex64, ControlFieldSpec, FloquetGrid, MediumParams, PhaseModulation, ProbePulseSpec,
};
use serde::{Deserialize, Serialize};

/// A complex number written either as a bare real or as `{ re, im }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Parts { re: f64, im: f64 },
}

impl ComplexValue {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

impl From<f64> for ComplexValue {
    fn from(re: f64) -> Self {
        ComplexValue::Real(re)
    }
}

/// Probe chirp depth: a number, or `"matched"` for `g sin²θ` at the
/// control's frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChirpDepth {
    Value(f64),
    Keyword(String),
}

impl Default for ChirpDepth {
    fn default() -> Self {
        ChirpDepth::Value(0.0)
    }
}

pub const MATCHED: &str = "matched";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub atom_density: f64,
    pub dipole_ab: f64,
    pub omega1: f64,
    pub gamma_ab: f64,
    pub gamma_cb: f64,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
}

impl MediumConfig {
    pub fn params(&self) -> MediumParams {
        MediumParams {
            atom_density: self.atom_density,
            dipole_ab: self.dipole_ab,
            omega1: self.omega1,
            gamma_ab: self.gamma_ab,
            gamma_cb: self.gamma_cb,
            delta1: self.delta1,
            delta2: self.delta2,
        }
    }
}

/// Sinusoidal phase `depth · sin(frequency · t)`, or a general periodic
/// phase given by its Fourier coefficients (`n = -n_max ..= n_max`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub omega2: ComplexValue,
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<ComplexValue>>,
}

impl ControlConfig {
    pub fn spec(&self) -> Result<ControlFieldSpec, String> {
        let phase = match (&self.depth, &self.coefficients) {
            (Some(depth), None) => PhaseModulation::Sinusoidal {
                depth: *depth,
                frequency: self.frequency,
            },
            (None, Some(coeffs)) => PhaseModulation::GeneralPeriodic {
                frequency: self.frequency,
                coefficients: coeffs.iter().map(ComplexValue::value).collect(),
            },
            (None, None) => PhaseModulation::Sinusoidal {
                depth: 0.0,
                frequency: self.frequency,
            },
            (Some(_), Some(_)) => return Err("give either depth or coefficients, not both".into()),
        };
        Ok(ControlFieldSpec {
            omega2: self.omega2.value(),
            phase,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub omega10: ComplexValue,
    pub tau: f64,
    #[serde(default)]
    pub chirp_depth: ChirpDepth,
    /// Defaults to the control frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chirp_frequency: Option<f64>,
    #[serde(default)]
    pub center_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationConfig {
    /// Sample length; snapshots cover `[0, z_end]`.
    pub z_end: f64,
    /// Depths at which spectra and time profiles are reported.
    pub z_samples: Vec<f64>,
    /// Times at which spatial snapshots are taken.
    #[serde(default)]
    pub t_samples: Vec<f64>,
    #[serde(default = "default_snapshot_points")]
    pub snapshot_points: usize,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
    /// Time window `[t_min, t_max]` of the profiles. Defaults to
    /// `[t₀ - 6τ, t₀ + z_end/v_g + 6τ]`, which holds the pulse at every depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_window: Option<[f64; 2]>,
}

fn default_snapshot_points() -> usize {
    401
}

fn default_profile_points() -> usize {
    4096
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_omega")]
    pub n_omega: usize,
    #[serde(default = "default_ladder")]
    pub ladder: usize,
}

fn default_n_omega() -> usize {
    512
}

fn default_ladder() -> usize {
    20
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_omega: default_n_omega(),
            ladder: default_ladder(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub spectrum: bool,
    /// Time-domain envelope at every `z_samples` depth.
    pub profile: bool,
    /// Spatial envelope at every `t_samples` time.
    pub snapshot: bool,
    pub susceptibility: bool,
    pub eigenvalues: bool,
    /// Overlap with the matched pulse and its adiabatic spectrum.
    pub projection: bool,
    pub convergence: bool,
    /// Ladder half-widths compared by the convergence table (same `n_omega`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convergence_ladders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub medium: MediumConfig,
    pub control: ControlConfig,
    pub probe: ProbeConfig,
    pub propagation: PropagationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serialisable")
    }

    pub fn medium(&self) -> MediumParams {
        self.medium.params()
    }

    pub fn control(&self) -> Result<ControlFieldSpec, String> {
        self.control.spec()
    }

    pub fn grid(&self) -> Result<FloquetGrid, eit_floquet::Error> {
        FloquetGrid::new(self.control.frequency, self.grid.n_omega, self.grid.ladder)
    }

    /// The incoming pulse with `"matched"` resolved against the medium and
    /// control.
    pub fn probe(&self) -> Result<ProbePulseSpec, String> {
        let frequency = self.probe.chirp_frequency.unwrap_or(self.control.frequency);
        let depth = match &self.probe.chirp_depth {
            ChirpDepth::Value(v) => *v,
            ChirpDepth::Keyword(k) if k == MATCHED => {
                let control = self.control()?;
                let g = match control.phase {
                    PhaseModulation::Sinusoidal { depth, .. } => depth,
                    PhaseModulation::GeneralPeriodic { .. } => {
                        return Err("a matched chirp needs a sinusoidal control phase".into())
                    }
                };
                let theta = mixing_angle(self.medium().kappa2(), control.omega2).map_err(|e| e.to_string())?;
                g * theta.sin2
            }
            ChirpDepth::Keyword(k) => return Err(format!("unknown chirp depth keyword {k:?}")),
        };
        Ok(ProbePulseSpec {
            omega10: self.probe.omega10.value(),
            tau: self.probe.tau,
            chirp_depth: depth,
            chirp_frequency: if depth == 0.0 { 0.0 } else { frequency },
            center_time: self.probe.center_time,
        })
    }

    pub fn convergence_truncations(&self) -> Vec<Truncation> {
        self.outputs
            .convergence_ladders
            .iter()
            .map(|&ladder| Truncation {
                ladder,
                n_omega: self.grid.n_omega,
            })
            .collect()
    }
}
