use std::fs;
use std::path::Path;

use gmsk_wsn_cli::{run_from_args, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};

fn run(args: &[&str], out: &Path) -> i32 {
    let mut full = vec!["gmsk-wsn"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_from_args(full)
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(run_from_args(["gmsk-wsn", "--help"]), EXIT_OK);
    assert_eq!(run_from_args(["gmsk-wsn", "frobnicate"]), EXIT_USAGE);
    assert_eq!(run(&["energy-distance", "--variant", "sideways"], &out), EXIT_USAGE);
    assert_eq!(run(&["ber-sweep", "--codecs", "turbo"], &out), EXIT_USAGE);
    assert_eq!(run(&["codec-test", "--quick", "--inject-fault", "--codecs", "golay"], &out), EXIT_RUNTIME);
    assert_eq!(run(&["codec-test", "--quick", "--codecs", "golay"], &out), EXIT_OK);
}

#[test]
fn energy_distance_default_files() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["energy-distance"], tmp.path()), EXIT_OK);
    assert_eq!(
        file_names(tmp.path()),
        ["energy_crossover.csv", "energy_distance.csv", "energy_distance.gp", "energy_sensitivity.csv"]
    );
    let table = csv_rows(&tmp.path().join("energy_distance.csv"));
    assert_eq!(table[0].len(), 6);
    assert_eq!(table.len(), 1 + 200);
    let sens = csv_rows(&tmp.path().join("energy_sensitivity.csv"));
    assert_eq!(sens.len(), 1 + 6);
    assert_eq!(sens.iter().skip(1).filter(|r| r[7] == "1").count(), 1);
}

#[test]
fn single_codec_sweep_has_one_curve() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["ber-sweep", "--quick", "--codecs", "none"], tmp.path()), EXIT_OK);
    let names = file_names(tmp.path());
    assert_eq!(names.iter().filter(|n| n.starts_with("ber_") && n.ends_with(".csv")).count(), 3);
    assert!(names.contains(&"ber_none.csv".to_string()));
    let all = csv_rows(&tmp.path().join("ber_all.csv"));
    assert!(all.iter().skip(1).all(|r| r[1] == "none"));
    assert_eq!(all.len(), 1 + 11);
}

#[test]
fn one_trial_route_sim() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "variant = \"literal\"\n[route_sim]\ntrials = 1\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["route-sim", "--config", &cfg], &out), EXIT_OK);
    for mode in ["geometry", "replication"] {
        let rows = csv_rows(&out.join(format!("route_{mode}_literal.csv")));
        assert_eq!(rows[0], ["trial", "e_uncoded_J", "e_coded_J", "savings_fraction"]);
        assert_eq!(rows.len(), 3, "{mode}: header, one trial and the mean row");
        assert_eq!(rows[2][0], "mean");
        assert_eq!(rows[1][1..], rows[2][1..]);
    }
    assert_eq!(csv_rows(&out.join("deployment_trial0.csv")).len(), 1 + 20);
}

#[test]
fn variants_differ_only_by_time_stretch_without_codec_cost() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[power]\np_enc_mw = 0.0\np_dec_mw = 0.0\n[codec]\ng_code_db = 0.0\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(run(&["energy-distance", "--config", &cfg], &out), EXIT_OK);
    // Golay doubles the on-air time; the extra circuit energy per bit is
    // (P_tx + P_rx) · T_on / L.
    let stretch = 0.165 * 0.1 / 1e3;
    for row in csv_rows(&out.join("energy_distance.csv")).iter().skip(1) {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        let (u, literal, unscaled) = (v[1], v[2], v[3]);
        assert!((unscaled / u - 1.0).abs() < 1e-12, "d = {}", v[0]);
        assert!(((literal - u) / stretch - 1.0).abs() < 1e-9, "d = {}", v[0]);
    }
}

#[test]
fn config_error_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[ber_sweep]\nebno_step_db = -1.0\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["ber-sweep", "--config", &cfg], &out), EXIT_USAGE);
    assert!(!out.exists());

    let cfg = write_config(tmp.path(), "[radio]\nbogus = 1\n");
    assert_eq!(run(&["route-sim", "--config", &cfg], &out), EXIT_USAGE);
    assert!(!out.exists());
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.toml");
    let out = tmp.path().join("out");
    assert_eq!(run(&["energy-distance", "--config", missing.to_str().unwrap()], &out), EXIT_USAGE);
}
