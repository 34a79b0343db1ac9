//! Scenario runner for the chirped-control EIT engine: TOML configs, named
//! presets, validation, execution and deterministic table output.

pub mod config;
pub mod emit;
pub mod error;
pub mod presets;
pub mod run;
pub mod validate;

use std::path::Path;

use eit_floquet::floquet::Truncation;

pub use config::ScenarioConfig;
pub use emit::emit;
pub use error::CliError;
pub use run::{run_scenario, RunArtifacts};
pub use validate::{validate_config, Issue};

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ScenarioConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// A preset by name, or `custom` read from `config`.
pub fn resolve_scenario(name: &str, config: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match (name, config) {
        ("custom", Some(path)) => load_config(path),
        ("custom", None) => Err(CliError::Config("scenario `custom` needs --config".into())),
        (_, Some(_)) => Err(CliError::Config(format!(
            "--config is only read for `custom`; write the preset out with `show --scenario {name}` and edit it"
        ))),
        (_, None) => presets::preset(name).map(|p| p.config).ok_or_else(|| {
            CliError::Config(format!(
                "unknown scenario `{name}`; expected one of {:?} or custom",
                presets::NAMES
            ))
        }),
    }
}

/// `"15,20"` or `"15:256,20:512"`: ladder half-width, optionally with the
/// base-band sample count (default `n_omega`).
pub fn parse_truncations(list: &str, n_omega: usize) -> Result<Vec<Truncation>, CliError> {
    let bad = |item: &str| CliError::Config(format!("bad truncation `{item}`; expected S or S:N"));
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (s, n) = match item.split_once(':') {
                Some((s, n)) => (s, n.parse().map_err(|_| bad(item))?),
                None => (item, n_omega),
            };
            Ok(Truncation {
                ladder: s.parse().map_err(|_| bad(item))?,
                n_omega: n,
            })
        })
        .collect()
}
