//! Named scenarios `fig2` … `fig8`.
//!
//! Every numeric field of a preset is listed in its `sources` table next to
//! the caption value it comes from, or marked as a grid or sampling choice.
//! A source keyed by a section name (`"medium"`) covers every field in it.

use crate::config::*;

pub const NAMES: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: ScenarioConfig,
    /// `(field path or section, origin)`.
    pub sources: Vec<(&'static str, &'static str)>,
}

impl Preset {
    /// Origin of a dotted field path, looking through enclosing sections.
    pub fn source_of(&self, field: &str) -> Option<&'static str> {
        let mut path = field;
        loop {
            if let Some((_, origin)) = self.sources.iter().find(|(k, _)| *k == path) {
                return Some(origin);
            }
            path = &path[..path.rfind('.')?];
        }
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    Some(match name {
        "fig2" => fig2(),
        "fig3" => fig3(),
        "fig4" => fig4(),
        "fig5" => fig5(),
        "fig6" => fig6(),
        "fig7" => fig7(),
        "fig8" => fig8(),
        _ => return None,
    })
}

const SOURCES_FIG2: [(&str, &str); 14] = [
    ("medium.atom_density", "fig2 caption: N = 2×10⁻¹³"),
    ("medium.dipole_ab", "fig2 caption: d_ab = 1"),
    ("medium.omega1", "fig2 caption: ω₁ = 10⁻¹"),
    ("medium.gamma_ab", "fig2 caption: γ_ab = 10⁻⁹"),
    ("medium.gamma_cb", "fig2 caption: γ_cb = 10⁻¹⁴"),
    ("medium.delta1", "fig2 caption: δ₁ = δ₂ = 0"),
    ("medium.delta2", "fig2 caption: δ₁ = δ₂ = 0"),
    ("control.omega2", "fig2 caption: Ω₂ = 10⁻⁸"),
    ("control.depth", "fig2 caption: g = 5"),
    ("control.frequency", "fig2 caption: Δ = 2×10⁻⁹"),
    ("probe.omega10", "fig2 caption: Ω₁₀ = 10⁻¹⁰"),
    ("probe.tau", "fig2 caption: τ = 8×10⁹"),
    ("probe.center_time", "pulse centred at t = 0"),
    ("grid", "default grid: N_ω = 512, S = 20"),
];

const SAMPLING: [(&str, &str); 2] = [
    ("propagation.snapshot_points", "sampling density of the snapshot tables"),
    ("propagation.profile_points", "default time grid: 4096 points"),
];

fn fig2_config() -> ScenarioConfig {
    ScenarioConfig {
        medium: MediumConfig {
            atom_density: 2e-13,
            dipole_ab: 1.0,
            omega1: 0.1,
            gamma_ab: 1e-9,
            gamma_cb: 1e-14,
            delta1: 0.0,
            delta2: 0.0,
        },
        control: ControlConfig {
            omega2: ComplexValue::Real(1e-8),
            frequency: 2e-9,
            depth: Some(5.0),
            coefficients: None,
        },
        probe: ProbeConfig {
            omega10: ComplexValue::Real(1e-10),
            tau: 8e9,
            chirp_depth: ChirpDepth::Value(0.0),
            chirp_frequency: None,
            center_time: 0.0,
        },
        propagation: PropagationConfig {
            z_end: 2e10,
            z_samples: vec![0.0, 2e10],
            t_samples: vec![],
            snapshot_points: 401,
            profile_points: 4096,
            profile_window: None,
        },
        grid: GridConfig::default(),
        outputs: OutputConfig {
            spectrum: true,
            profile: true,
            susceptibility: true,
            projection: true,
            ..OutputConfig::default()
        },
    }
}

fn with_sources(extra: &[(&'static str, &'static str)]) -> Vec<(&'static str, &'static str)> {
    // Scenario entries shadow the fig2 base.
    let mut out: Vec<_> = extra.to_vec();
    for (k, v) in SOURCES_FIG2.iter().chain(&SAMPLING) {
        if !out.iter().any(|(e, _)| e == k) {
            out.push((k, v));
        }
    }
    out
}

fn fig2() -> Preset {
    Preset {
        name: "fig2",
        summary: "Gaussian probe under a chirped control: Bessel-comb output spectrum",
        config: fig2_config(),
        sources: with_sources(&[
            ("probe.chirp_depth", "fig2 caption: incoming pulse is a Gaussian"),
            ("propagation.z_end", "fig2 caption: z = 2×10¹⁰"),
            ("propagation.z_samples", "fig2 caption: z = 0 and z = 2×10¹⁰"),
        ]),
    }
}

fn fig3() -> Preset {
    let mut config = fig2_config();
    config.propagation.t_samples = vec![0.0, 2e10, 4e10, 6e10, 1e11];
    config.propagation.z_samples = vec![];
    config.outputs = OutputConfig {
        snapshot: true,
        ..OutputConfig::default()
    };
    Preset {
        name: "fig3",
        summary: "Space snapshots of the fig2 pulse: multipeak near the entrance, single peak deeper in",
        config,
        sources: with_sources(&[
            ("probe.chirp_depth", "fig3 caption: the pulse of fig2"),
            ("propagation.z_end", "fig2 caption: sample length z = 2×10¹⁰"),
            (
                "propagation.t_samples",
                "fig3 caption: t = 0, 2×10¹⁰, 4×10¹⁰, 6×10¹⁰, 10¹¹",
            ),
        ]),
    }
}

fn fig4() -> Preset {
    let mut config = fig2_config();
    config.probe.chirp_depth = ChirpDepth::Keyword(MATCHED.into());
    Preset {
        name: "fig4",
        summary: "Matched chirped probe (depth g sin²θ, frequency Δ): spectrum nearly unchanged",
        config,
        sources: with_sources(&[
            ("probe.chirp_depth", "fig4 caption: chirp depth g sin²θ"),
            ("probe.chirp_frequency", "fig4: chirp frequency Δ of the control"),
            ("propagation.z_end", "fig4 caption: z = 2×10¹⁰"),
            ("propagation.z_samples", "fig4 caption: z = 0 and z = 2×10¹⁰"),
        ]),
    }
}

fn fig5() -> Preset {
    let mut config = fig2_config();
    config.probe.chirp_depth = ChirpDepth::Keyword(MATCHED.into());
    config.probe.chirp_frequency = Some(1.2e-9);
    config.propagation.z_end = 6e10;
    config.propagation.z_samples = vec![0.0, 1.2e10, 6e10];
    config.propagation.t_samples = vec![0.0, 1e11, 2e11, 3e11, 4e11, 5e11];
    config.outputs.snapshot = true;
    Preset {
        name: "fig5",
        summary: "Chirp depth g sin²θ at Δ′ = 1.2×10⁻⁹ ≠ Δ: peaks migrate from multiples of Δ′ to Δ",
        config,
        sources: with_sources(&[
            ("probe.chirp_depth", "fig5 caption: g′ = g sin²θ"),
            ("probe.chirp_frequency", "fig5 caption: Δ′ = 1.2×10⁻⁹"),
            // The caption's "δ=2×10{-9}" for the control is the chirp
            // frequency Δ = 2×10⁻⁹, not a detuning.
            (
                "control.frequency",
                "fig5 caption: control chirp frequency 2×10⁻⁹ (printed as δ)",
            ),
            ("propagation.z_end", "fig5 caption: z = 6×10¹⁰"),
            ("propagation.z_samples", "fig5 caption: z = 0, 1.2×10¹⁰, 6×10¹⁰"),
            (
                "propagation.t_samples",
                "fig5 snapshots: t = 0, 10¹¹, 2×10¹¹, 3×10¹¹, 4×10¹¹, 5×10¹¹",
            ),
        ]),
    }
}

fn fig6() -> Preset {
    let mut config = fig2_config();
    config.probe.tau = 1e9;
    config.propagation.z_end = 1e11;
    // Intermediate depths sample the narrowing along the sample.
    config.propagation.z_samples = vec![0.0, 2.5e10, 5e10, 1e11];
    config.outputs.projection = false;
    Preset {
        name: "fig6",
        summary: "Spectrally wide Gaussian (τ = 10⁹): Bessel comb with narrowed peaks",
        config,
        sources: with_sources(&[
            ("probe.tau", "fig6 caption: τ = 10⁹"),
            ("probe.chirp_depth", "fig6 caption: incoming Gaussian"),
            ("propagation.z_end", "fig6 caption: z = 10¹¹"),
            (
                "propagation.z_samples",
                "fig6 caption: z = 0, 10¹¹; 2.5×10¹⁰ and 5×10¹⁰ added to follow the narrowing",
            ),
        ]),
    }
}

fn fig7() -> Preset {
    let mut config = fig2_config();
    config.probe.tau = 1e9;
    config.probe.chirp_depth = ChirpDepth::Keyword(MATCHED.into());
    config.probe.chirp_frequency = Some(2e-9);
    config.propagation.z_end = 4e10;
    config.propagation.z_samples = vec![0.0, 8e9, 4e10];
    config.outputs.projection = false;
    Preset {
        name: "fig7",
        summary: "Spectrally wide matched chirp (τ = 10⁹): structures narrow, heights follow |J_n|",
        config,
        sources: with_sources(&[
            ("probe.tau", "fig7 caption: τ = 10⁹"),
            ("probe.chirp_depth", "fig7 caption: chirp depth g sin²θ (g = 5)"),
            ("probe.chirp_frequency", "fig7 caption: chirp frequency 2×10⁻⁹"),
            ("propagation.z_end", "fig7 caption: z = 4×10¹⁰"),
            ("propagation.z_samples", "fig7 caption: z = 0, 8×10⁹, 4×10¹⁰"),
        ]),
    }
}

/// `z₀ = 2πc cos²θ / Δ` for the fig8 parameters.
pub fn fig8_period() -> f64 {
    let cfg = fig8_base();
    let control = cfg.control().expect("valid preset");
    eit_floquet::adiabatic::oscillation_period(&cfg.medium(), &control).expect("valid preset")
}

fn fig8_base() -> ScenarioConfig {
    let mut config = fig2_config();
    // Printed as 3×10⁸; only 3×10⁻⁸ reproduces z₀ = 3.06×10⁹.
    config.control.omega2 = ComplexValue::Real(3e-8);
    config.probe.tau = 1e9;
    config.probe.chirp_depth = ChirpDepth::Keyword(MATCHED.into());
    config.probe.chirp_frequency = Some(2e-9);
    config
}

fn fig8() -> Preset {
    let mut config = fig8_base();
    let half = 0.5 * fig8_period();
    config.propagation.z_samples = (0..=6).map(|k| k as f64 * half).collect();
    config.propagation.z_end = 6.0 * half;
    config.outputs.projection = false;
    Preset {
        name: "fig8",
        summary: "Strong control (Ω₂ = 3×10⁻⁸): spectrum returns every z₀ and mirrors at odd z₀/2",
        config,
        sources: with_sources(&[
            ("control.omega2", "fig8 caption: Ω₂ = 3×10⁻⁸ (exponent sign restored)"),
            ("probe.tau", "fig8 caption: pulse as in fig6/fig7, τ = 10⁹"),
            ("probe.chirp_depth", "fig8: chirped as in fig7, depth g sin²θ"),
            ("probe.chirp_frequency", "fig7 caption: chirp frequency 2×10⁻⁹"),
            ("propagation.z_end", "fig8: 6 × z₀/2, z₀ = 2πc cos²θ/Δ"),
            (
                "propagation.z_samples",
                "fig8 caption: z = 4×1.53×10⁹, 5×1.53×10⁹; sampled at k·z₀/2 for k = 0..6",
            ),
        ]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_fields(value: &toml::Value, prefix: &str, out: &mut Vec<String>) {
        match value {
            toml::Value::Table(t) => {
                for (k, v) in t {
                    let path = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    numeric_fields(v, &path, out);
                }
            }
            toml::Value::Float(_) | toml::Value::Integer(_) => out.push(prefix.to_string()),
            toml::Value::Array(a)
                if a.iter()
                    .any(|v| matches!(v, toml::Value::Float(_) | toml::Value::Integer(_))) =>
            {
                out.push(prefix.to_string())
            }
            toml::Value::String(_) => out.push(prefix.to_string()),
            _ => {}
        }
    }

    #[test]
    fn every_numeric_parameter_has_a_source() {
        for name in NAMES {
            let p = preset(name).unwrap();
            let value: toml::Value = toml::from_str(&p.config.to_toml()).unwrap();
            let mut fields = Vec::new();
            numeric_fields(&value, "", &mut fields);
            for f in fields.iter().filter(|f| !f.starts_with("outputs")) {
                assert!(p.source_of(f).is_some(), "{name}: {f} has no recorded source");
            }
        }
    }

    #[test]
    fn presets_validate_and_round_trip() {
        for name in NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
            let issues = crate::validate::validate_config(&p.config);
            assert!(issues.iter().all(|i| !i.is_error()), "{name}: {issues:?}");
            assert_eq!(ScenarioConfig::from_toml(&p.config.to_toml()).unwrap(), p.config);
        }
        assert!(preset("fig9").is_none());
    }

    #[test]
    fn fig8_period_matches_its_caption() {
        assert!((fig8_period() / 3.06e9 - 1.0).abs() < 0.01);
        let z = preset("fig8").unwrap().config.propagation.z_samples;
        assert!((z[4] / (4.0 * 1.53e9) - 1.0).abs() < 0.01);
    }
}
