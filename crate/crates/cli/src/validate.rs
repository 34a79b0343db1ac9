//! Up-front configuration checks. Everything is collected, nothing is thrown.

use std::fmt;

use eit_floquet::floquet::POLE_GUARD;
use eit_floquet::{mixing_angle, Error, MediumParams};
use serde::Serialize;

use crate::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Issue {
    fn error(field: &str, message: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        }
    }

    fn warning(field: &str, message: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

/// Extra rungs beyond the chirp spread below which a warning is raised.
const TRUNCATION_MARGIN: f64 = 10.0;

pub fn validate_config(cfg: &ScenarioConfig) -> Vec<Issue> {
    let mut issues = Vec::new();
    let medium = cfg.medium();
    if let Err(e) = medium.validate() {
        issues.push(Issue::error("medium", e.to_string()));
    }

    let control = match cfg.control() {
        Ok(c) => c,
        Err(msg) => {
            issues.push(Issue::error("control", msg));
            check_sampling(cfg, &mut issues);
            return issues;
        }
    };
    if let Err(e) = control.validate() {
        issues.push(Issue::error("control", e.to_string()));
    }
    let theta = match mixing_angle(medium.kappa2(), control.omega2) {
        Ok(t) => Some(t),
        Err(e) => {
            issues.push(Issue::error("control.omega2", e.to_string()));
            None
        }
    };

    let probe = if theta.is_some() || !matches!(cfg.probe.chirp_depth, crate::config::ChirpDepth::Keyword(_)) {
        match cfg.probe() {
            Ok(p) => Some(p),
            Err(msg) => {
                issues.push(Issue::error("probe.chirp_depth", msg));
                None
            }
        }
    } else {
        None
    };
    if let Some(p) = &probe {
        if let Err(e) = p.validate() {
            issues.push(Issue::error("probe", e.to_string()));
        }
        if control.omega2.norm() > 0.0 {
            if let Some(w) = p.weak_probe_warning(&control) {
                issues.push(Issue::warning("probe.omega10", w));
            }
        }
    }

    match cfg.grid() {
        Err(e) => issues.push(Issue::error("grid", e.to_string())),
        Ok(grid) => {
            if let Some(p) = &probe {
                if p.validate().is_ok() {
                    if let Err(e) = grid.check_resolves(p) {
                        issues.push(Issue::error("grid", e.to_string()));
                    }
                }
                let spread = control.phase.spread().max(p.chirp_depth.abs());
                let wanted = (spread.ceil() + TRUNCATION_MARGIN) as usize;
                if grid.ladder < wanted {
                    issues.push(Issue::warning(
                        "grid.ladder",
                        format!(
                            "ladder half-width {} is below ceil(max(g, g')) + {} = {wanted}; check convergence",
                            grid.ladder, TRUNCATION_MARGIN
                        ),
                    ));
                }
            }
            if medium.validate().is_ok() && control.delta() > 0.0 {
                if let Some(omega) = two_photon_pole(&medium, control.delta(), &grid) {
                    issues.push(Issue::error(
                        "medium.gamma_cb",
                        Error::TwoPhotonPole { omega }.to_string(),
                    ));
                }
            }
        }
    }

    check_sampling(cfg, &mut issues);
    issues
}

/// With `γ_cb = 0` the Raman denominator `ω + mΔ + δ₁ - δ₂` must keep away
/// from zero on every base-band sample.
fn two_photon_pole(medium: &MediumParams, delta: f64, grid: &eit_floquet::FloquetGrid) -> Option<f64> {
    if medium.gamma_cb != 0.0 {
        return None;
    }
    let shift = medium.delta1 - medium.delta2;
    grid.base_freqs().into_iter().find(|&w| {
        let r = (w + shift) / delta;
        (r - r.round()).abs() * delta < POLE_GUARD * delta
    })
}

fn check_sampling(cfg: &ScenarioConfig, issues: &mut Vec<Issue>) {
    let prop = &cfg.propagation;
    if !(prop.z_end.is_finite() && prop.z_end >= 0.0) {
        issues.push(Issue::error("propagation.z_end", "must be finite and non-negative"));
    }
    for &z in &prop.z_samples {
        if !(z.is_finite() && z >= 0.0 && z <= prop.z_end) {
            issues.push(Issue::error(
                "propagation.z_samples",
                format!("z = {z:e} lies outside [0, z_end = {:e}]", prop.z_end),
            ));
        }
    }
    if prop.t_samples.iter().any(|t| !t.is_finite()) {
        issues.push(Issue::error("propagation.t_samples", "times must be finite"));
    }
    let out = &cfg.outputs;
    if out.snapshot && prop.snapshot_points < 2 {
        issues.push(Issue::error(
            "propagation.snapshot_points",
            "need at least two positions",
        ));
    }
    if out.profile && prop.profile_points < 2 {
        issues.push(Issue::error("propagation.profile_points", "need at least two times"));
    }
    if let Some([a, b]) = prop.profile_window {
        if !(a.is_finite() && b.is_finite() && a < b) {
            issues.push(Issue::error("propagation.profile_window", "need finite t_min < t_max"));
        }
    }
    if out.convergence {
        let ladders = &out.convergence_ladders;
        if ladders.len() < 2 {
            issues.push(Issue::error(
                "outputs.convergence_ladders",
                "need at least two ladder sizes",
            ));
        } else if ladders.windows(2).any(|w| w[0] >= w[1]) {
            issues.push(Issue::error(
                "outputs.convergence_ladders",
                "ladder sizes must increase",
            ));
        }
    }
}
