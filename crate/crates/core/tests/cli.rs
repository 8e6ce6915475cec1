use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kronrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronrisk"))
        .args(args)
        .env_remove("KRONRISK_LOG")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn default_simulation_reproduces_bundled_panel() {
    let dir = tempfile::tempdir().unwrap();
    let o = kronrisk(&["simulate", "--output-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("seed: 20150101"));
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    assert_eq!(
        fs::read(dir.path().join("panel.csv")).unwrap(),
        fs::read(bundled.join("synthetic_panel.csv")).unwrap()
    );
    assert_eq!(
        fs::read(dir.path().join("true_model.json")).unwrap(),
        fs::read(bundled.join("synthetic_model.json")).unwrap()
    );
}

#[test]
fn seed_changes_the_panel() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--samples",
        "20",
        "--maturities",
        "3",
        "--countries",
        "2",
    ];
    let mut a_args = args.to_vec();
    a_args.extend(["--output-dir", p(a.path()), "--seed", "1"]);
    let mut b_args = args.to_vec();
    b_args.extend(["--output-dir", p(b.path()), "--seed", "2"]);
    assert_eq!(kronrisk(&a_args).status.code(), Some(0));
    assert_eq!(kronrisk(&b_args).status.code(), Some(0));
    let pa = fs::read_to_string(a.path().join("panel.csv")).unwrap();
    let pb = fs::read_to_string(b.path().join("panel.csv")).unwrap();
    assert_ne!(pa, pb);
    assert_eq!(pa.lines().count(), 1 + 21 * 3 * 2);
}

#[test]
fn missing_input_exits_two() {
    let o = kronrisk(&["estimate", "--input", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("input not found"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kronrisk(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        kronrisk(&["hedge", "--domain", "sideways"]).status.code(),
        Some(2)
    );
    assert_eq!(kronrisk(&["--help"]).status.code(), Some(0));
}

#[test]
fn strict_missing_data_exits_three_with_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gappy.csv");
    fs::write(
        &csv,
        "date,country,maturity_years,rate\n\
         2024-01-05,US,2,4.0\n2024-01-05,US,10,3.0\n\
         2024-01-12,US,2,\n2024-01-12,US,10,3.5\n\
         2024-01-19,US,2,4.2\n2024-01-19,US,10,3.4\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = kronrisk(&[
        "estimate",
        "--input",
        p(&csv),
        "--output-dir",
        p(&out),
        "--strict",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("2024-01-12") && err.contains("US"), "{err}");

    let o = kronrisk(&[
        "validate",
        "--input",
        p(&csv),
        "--output-dir",
        p(&out),
        "--strict",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = kronrisk(&["validate", "--input", p(&csv), "--output-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("missing cell"));

    // Without --strict the gap is forward-filled.
    let o = kronrisk(&["estimate", "--input", p(&csv), "--output-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("model.json").exists());
}

#[test]
fn malformed_panel_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "when,who,what\n1,2,3\n").unwrap();
    assert_eq!(
        kronrisk(&["estimate", "--input", p(&csv)]).status.code(),
        Some(3)
    );
}

#[test]
fn malformed_model_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("model.json");
    fs::write(&bad, "{\"sigma2\": 1.0}").unwrap();
    let o = kronrisk(&["minvar", "--input", p(&bad), "--output-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    fs::write(
        &bad,
        r#"{"sigma2": 1.0, "dims": [2, 2], "thetas": [[[0.9, 0.0], [0.0, 0.9]], [[0.5, 0.0], [0.0, 0.5]]]}"#,
    )
    .unwrap();
    let o = kronrisk(&["minvar", "--input", p(&bad), "--output-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn singular_model_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    fs::write(
        &model,
        r#"{"sigma2": 1.0, "dims": [2, 2], "thetas": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.0], [0.0, 0.5]]]}"#,
    )
    .unwrap();
    let o = kronrisk(&[
        "minvar",
        "--input",
        p(&model),
        "--output-dir",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("eigenvalue"), "{}", stderr(&o));
}

#[test]
fn strict_inconsistent_hedge_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    fs::write(
        &model,
        r#"{"sigma2": 1.0, "dims": [3, 2], "thetas": [[[0.6, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.1]], [[0.5, 0.0], [0.0, 0.5]]]}"#,
    )
    .unwrap();
    let args = [
        "hedge",
        "--input",
        p(&model),
        "--output-dir",
        p(dir.path()),
        "--index",
        "1",
        "--r",
        "1",
    ];
    let o = kronrisk(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("hedge.json")).unwrap()).unwrap();
    assert_eq!(report["consistent"], false);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(kronrisk(&strict).status.code(), Some(5));
}

#[test]
fn hedge_index_is_one_based() {
    let dir = tempfile::tempdir().unwrap();
    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_model.json");
    let o = kronrisk(&[
        "hedge",
        "--input",
        p(&model),
        "--output-dir",
        p(dir.path()),
        "--domain",
        "maturity",
        "--index",
        "3",
        "--r",
        "0",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("hedge_maturity.csv")).unwrap();
    let (label, w) = csv.lines().nth(3).unwrap().split_once(',').unwrap();
    assert_eq!(label, "3");
    assert!((w.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let o = kronrisk(&["hedge", "--input", p(&model), "--index", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kronrisk(&["hedge", "--input", p(&model), "--index", "16"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn factors_from_panel_with_domestic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let panel = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_panel.csv");
    let o = kronrisk(&[
        "factors",
        "--input",
        p(&panel),
        "--output-dir",
        p(dir.path()),
        "--domestic",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "variance_maturity.txt",
        "variance_maturity.csv",
        "variance_country.json",
        "loadings_maturity.csv",
        "loadings_country.csv",
        "domestic.txt",
        "domestic.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let domestic = fs::read_to_string(dir.path().join("domestic.txt")).unwrap();
    assert!(domestic.contains("Economy | Level | Slope | Curvature"));
    assert_eq!(
        domestic
            .lines()
            .filter(|l| l.contains(" | ") && !l.starts_with("Economy"))
            .count(),
        8
    );

    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_model.json");
    let o = kronrisk(&[
        "factors",
        "--input",
        p(&model),
        "--output-dir",
        p(dir.path()),
        "--domestic",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("from-config");
    fs::write(
        &cfg,
        format!(
            "output_dir = {:?}\nsamples = 10\nmaturities = 3\ncountries = 2\nseed = 5\n",
            p(&out)
        ),
    )
    .unwrap();
    let o = kronrisk(&["simulate", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let meta = fs::read_to_string(out.join("simulate.json")).unwrap();
    assert!(meta.contains("\"seed\": 5"));
    let o = kronrisk(&["simulate", "--config", p(&cfg), "--seed", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let meta = fs::read_to_string(out.join("simulate.json")).unwrap();
    assert!(meta.contains("\"seed\": 6"));

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(
        kronrisk(&["simulate", "--config", p(&cfg)]).status.code(),
        Some(2)
    );
}

#[test]
fn minvar_writes_consistent_weights() {
    let dir = tempfile::tempdir().unwrap();
    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_model.json");
    let o = kronrisk(&[
        "minvar",
        "--input",
        p(&model),
        "--output-dir",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("minvar.json")).unwrap()).unwrap();
    let full: Vec<f64> = v["full_weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(full.len(), 120);
    assert!((full.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(v["portfolio_variance"].as_f64().unwrap() > 0.0);
    let labels: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("minvar_full.json")).unwrap())
            .unwrap();
    assert_eq!(labels["labels"][0], "SF:1");
}
