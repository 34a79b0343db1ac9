//! The `eitfloq` binary end to end on a small scenario.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eit_floquet::floquet::FloquetEngine;
use eit_floquet_cli::presets::preset;
use eit_floquet_cli::{run_scenario, ScenarioConfig};

const SMALL: &str = r#"
[medium]
atom_density = 2e-13
dipole_ab = 1.0
omega1 = 0.1
gamma_ab = 1e-9
gamma_cb = 1e-14

[control]
omega2 = 1e-8
frequency = 2e-9
depth = 2.0

[probe]
omega10 = { re = 6e-11, im = 8e-11 }
tau = 2e9
chirp_depth = "matched"

[propagation]
z_end = 1e10
z_samples = [0.0, 5e9, 1e10]
t_samples = [0.0, 5e10]
snapshot_points = 21
profile_points = 256

[grid]
n_omega = 64
ladder = 14

[outputs]
spectrum = true
profile = true
snapshot = true
susceptibility = true
eigenvalues = true
projection = true
convergence = true
convergence_ladders = [13, 14]
"#;

fn eitfloq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eitfloq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let r = eitfloq(&[
            "run",
            "--scenario",
            "custom",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let names = listing(&a);
    assert_eq!(names, listing(&b));
    for want in [
        "adiabatic_z02.csv",
        "convergence.csv",
        "eigenvalues.csv",
        "profile_z02.csv",
        "snapshot_t01.csv",
        "spectrum_z00.csv",
        "spectrum_z02.csv",
        "summary.json",
        "susceptibility.csv",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want} in {names:?}");
    }
    for n in &names {
        assert_eq!(
            fs::read(a.join(n)).unwrap(),
            fs::read(b.join(n)).unwrap(),
            "{n} differs"
        );
    }

    let spectrum = fs::read_to_string(a.join("spectrum_z01.csv")).unwrap();
    let mut lines = spectrum.lines();
    assert_eq!(lines.next(), Some("frequency_au,re,im,abs"));
    assert_eq!(lines.count(), 64 * 29);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(a.join("summary.json")).unwrap()).unwrap();
    let scalars = summary["scalars"].as_array().unwrap();
    assert!(scalars
        .iter()
        .all(|s| s["formula"].as_str().is_some_and(|f| !f.is_empty())));
    assert_eq!(summary["convergence"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn zero_length_sample_returns_the_input() {
    let mut cfg = ScenarioConfig::from_toml(SMALL).unwrap();
    cfg.propagation.z_end = 0.0;
    cfg.propagation.z_samples = vec![0.0];
    cfg.outputs = Default::default();
    cfg.outputs.spectrum = true;
    let a = run_scenario("custom", &cfg).unwrap();
    let engine = FloquetEngine::new(&cfg.medium(), &cfg.control().unwrap(), cfg.grid().unwrap()).unwrap();
    let input = engine.incoming(&cfg.probe().unwrap()).unwrap().flat();
    let got: Vec<_> = a.spectra[0].rows.iter().map(|(_, v)| *v).collect();
    assert_eq!(got, input);
}

#[test]
fn empty_selection_writes_only_the_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replace(&SMALL[SMALL.find("[outputs]").unwrap()..], "[outputs]\n");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let r = eitfloq(&[
        "run",
        "--scenario",
        "custom",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(listing(&out), vec!["summary.json"]);
}

#[test]
fn validation_failures_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();

    let ok = eitfloq(&["validate", "--scenario", "fig2"]);
    assert!(ok.status.success());
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "ok");

    // Spectrum wider than the grid: 1/τ > Δ N_ω / 2.
    let cfg = write_config(tmp.path(), &SMALL.replace("tau = 2e9", "tau = 5e6"));
    let r = eitfloq(&["validate", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("under-resolved spectrum"));

    let cfg = write_config(tmp.path(), &SMALL.replace("omega2 = 1e-8", "omega2 = 0.0"));
    let r = eitfloq(&["validate", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("undefined mixing angle"));

    // `run` refuses the same config before computing anything.
    let r = eitfloq(&[
        "run",
        "--scenario",
        "custom",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!tmp.path().join("x").exists());

    let r = eitfloq(&["run", "--scenario", "fig9", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn show_prints_a_loadable_preset() {
    let r = eitfloq(&["show", "--scenario", "fig8"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("exponent sign restored"));
    assert_eq!(
        ScenarioConfig::from_toml(&text).unwrap(),
        preset("fig8").unwrap().config
    );
}

#[test]
fn converge_reports_each_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let r = eitfloq(&[
        "converge",
        "--scenario",
        "custom",
        "--config",
        &cfg,
        "--truncations",
        "13,14,16:32",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = String::from_utf8(r.stdout).unwrap();
    assert_eq!(
        text.lines()
            .filter(|l| l.ends_with("PASS") || l.ends_with("FAIL"))
            .count(),
        2
    );
}
