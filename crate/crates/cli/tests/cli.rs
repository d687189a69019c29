use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ggkdv(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggkdv"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.display().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn assert_valid(schema_file: &str, doc: &Path) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs");
    let schema: Value =
        serde_json::from_str(&fs::read_to_string(root.join(schema_file)).unwrap()).unwrap();
    let value: Value = serde_json::from_str(&fs::read_to_string(doc).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{}: {errors:?}", doc.display());
}

#[test]
fn spectrum_has_two_rows_per_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggkdv(
        &["spectrum", "--preset", "resonant", "-n", "4", "--quiet"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("T0 = 12.566"));
    let (header, rows) = read_csv(&dir.path().join("spectrum.csv"));
    assert_eq!(
        header,
        ["k", "branch", "omega", "z1_re", "z1_im", "z2_re", "z2_im"]
    );
    assert_eq!(rows.len(), 18);
    for row in rows.iter().filter(|r| r[0] == "0") {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
    // 17 significant digits
    assert!(rows.iter().all(|r| r[2]
        .split('e')
        .next()
        .unwrap()
        .trim_start_matches('-')
        .len()
        == 18));
}

#[test]
fn generic_parameters_do_not_warn() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggkdv(&["gaps", "-n", "10"], dir.path());
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    assert_valid(
        "gaps_summary.schema.json",
        &dir.path().join("gaps_summary.json"),
    );
    let (_, rows) = read_csv(&dir.path().join("gaps.csv"));
    assert_eq!(rows.len(), 20);
}

#[test]
fn mean_violation_exits_two_without_a_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"command":"control","mode":"g_only","initial":"random","target":"zero"}"#,
    );
    let out = ggkdv(&["run", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("plan.json").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mean constraint"));
}

#[test]
fn admissible_single_control_writes_a_valid_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"N":3,"T":3.0,"mode":"f_only"}"#);
    let out = ggkdv(&["control", "--config", &cfg], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_valid("plan.schema.json", &dir.path().join("plan.json"));
    let plan: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert!(plan["g"].is_null() && plan["f"].is_array());
    let (header, rows) = read_csv(&dir.path().join("verify.csv"));
    assert_eq!(header, ["metric", "value"]);
    let metric = |name: &str| {
        rows.iter().find(|r| r[0] == name).unwrap()[1]
            .parse::<f64>()
            .unwrap()
    };
    assert!(metric("roundtrip_error") < 1e-6);
    assert!(metric("mean_v_drift") < 1e-10);
}

#[test]
fn ill_conditioned_operator_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"N":12,"T":0.05}"#);
    let out = ggkdv(&["control", "--config", &cfg], dir.path());
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!dir.path().join("plan.json").exists());
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"Nx":3}"#,
        r#"{"preset":"other"}"#,
        r#"{"a":-1.0}"#,
        r#"{"mode":"sideways"}"#,
        r#"{"command":"gaps"}"#,
        r#"{"initial":[[1,0]]}"#,
    ];
    for json in cases {
        let cfg = write_config(dir.path(), json);
        let out = ggkdv(&["control", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(4), "{json}");
    }
    let out = ggkdv(&["spectrum", "--preset", "flat"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    let out = ggkdv(&["run"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn resonant_window_sweep_gives_one_row_per_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"preset":"resonant","N":8,"windows_t0":[0.5,1.0,1.5]}"#,
    );
    let out = ggkdv(&["observe", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("observability.csv"));
    assert_eq!(
        header,
        ["N", "window_length", "mode", "alpha", "beta", "kernel_dim"]
    );
    assert_eq!(rows.len(), 3);
    let alpha: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(alpha[0] < alpha[1] && alpha[1] < alpha[2]);
}

#[test]
fn stabilize_summary_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = ggkdv(&["stabilize", "--quiet"], dir.path());
    assert!(out.status.success());
    assert_valid("stabilize.schema.json", &dir.path().join("stabilize.json"));
    let (header, rows) = read_csv(&dir.path().join("decay.csv"));
    assert_eq!(header, ["t", "energy", "log_energy"]);
    assert_eq!(rows.len(), 401);
}

#[test]
fn seeds_change_random_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(ggkdv(&["duality", "--seed", "1"], a.path())
        .status
        .success());
    assert!(ggkdv(&["duality", "--seed", "2"], b.path())
        .status
        .success());
    let read = |d: &Path| fs::read(d.join("duality.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn example_configs_validate_against_the_schema() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(&root).unwrap() {
        assert_valid("config.schema.json", &entry.unwrap().path());
    }
}
