use leakywire::error::Error;
use leakywire::runner::{cmd_check, cmd_spectrum, cmd_sweep, cmd_trial, cmd_validate, RunConfig};

const CONFIGS: [&str; 4] = [
    include_str!("../../../configs/corner.toml"),
    include_str!("../../../configs/line.toml"),
    include_str!("../../../configs/smoothed_corner.toml"),
    include_str!("../../../configs/decaying.toml"),
];

fn config(text: &str, dir: &tempfile::TempDir, extra: &[&str]) -> RunConfig {
    let mut overrides = vec![format!("output_dir={:?}", dir.path().display().to_string())];
    overrides.extend(extra.iter().map(|s| s.to_string()));
    RunConfig::from_toml_str(text, &overrides).unwrap()
}

fn header_and_rows(text: &str) -> (Vec<&str>, Vec<&str>) {
    text.lines().partition(|l| l.starts_with('#'))
}

#[test]
fn shipped_configs_parse() {
    for text in CONFIGS {
        let cfg = RunConfig::from_toml_str(text, &[]).unwrap();
        cfg.build_curve().unwrap();
    }
}

#[test]
fn bad_configs_map_to_exit_code_one() {
    let e = RunConfig::from_toml_str("alpha = 1.0\nbogus = 2\n[curve]\nkind = \"line\"\n", &[]).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    let e = RunConfig::from_toml_str(CONFIGS[0], &["alpha=-1".into()]).unwrap_err();
    assert!(matches!(e, Error::Config(_)) && e.exit_code() == 1);
    assert!(RunConfig::from_toml_str(CONFIGS[0], &["numerics.nodes=7".into()]).is_err());
}

#[test]
fn check_passes_on_a_corner_and_flags_a_fold() {
    let dir = tempfile::tempdir().unwrap();
    let ok = cmd_check(&config(CONFIGS[0], &dir, &[])).unwrap();
    assert_eq!(ok.exit_code, 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&ok.files[0]).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["command"], "check");
    assert_eq!(json["passed"], true);

    let folded = cmd_check(&config(CONFIGS[0], &dir, &["curve.phi=1.5707"])).unwrap();
    assert_eq!(folded.exit_code, 2);
}

#[test]
fn sweep_and_trial_write_csv_with_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        CONFIGS[0],
        &dir,
        &["sweep.points=6", "numerics.nodes=256", "numerics.half_length=20.0"],
    );
    let sweep = cmd_sweep(&cfg).unwrap();
    let text = std::fs::read_to_string(&sweep.files[0]).unwrap();
    let (header, rows) = header_and_rows(&text);
    assert!(header.iter().any(|l| l.contains("schema_version")));
    assert!(rows[0].starts_with("kappa"));
    assert_eq!(rows.len(), 7);

    let trial = cmd_trial(&cfg).unwrap();
    let text = std::fs::read_to_string(&trial.files[0]).unwrap();
    assert_eq!(header_and_rows(&text).1.len(), 14);
}

#[test]
fn spectrum_on_a_line_is_empty_and_validate_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(CONFIGS[1], &dir, &["numerics.nodes=256"]);
    let out = cmd_spectrum(&cfg).unwrap();
    assert_eq!(out.exit_code, 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out.files[0]).unwrap()).unwrap();
    assert_eq!(json["threshold"], -0.25);
    assert_eq!(json["states"].as_array().unwrap().len(), 0);

    let v = cmd_validate(&cfg).unwrap();
    assert!(v.summary.starts_with("verdict N/A"), "{}", v.summary);
}

#[test]
fn fixed_grid_spectrum_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        CONFIGS[0],
        &dir,
        &[
            "numerics.nodes=512",
            "numerics.half_length=60.0",
            "numerics.refine=false",
        ],
    );
    let first = std::fs::read(&cmd_spectrum(&cfg).unwrap().files[0]).unwrap();
    let second = std::fs::read(&cmd_spectrum(&cfg).unwrap().files[0]).unwrap();
    assert_eq!(first, second);
}
