use std::path::Path;
use std::process::{Command, Output};

fn mnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnlab"))
        .args(args)
        .env("MNLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn header_index(csv: &str, col: &str) -> usize {
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    header.split(',').position(|c| c == col).unwrap()
}

const ONE_ROW: &str = r#"
command = "hl-check"
[hl_check]
corpus = [{ family = "constant", re = 1.0 }]
exponents = [[1, 2]]
radii = [[0.5, 1.0]]
"#;

#[test]
fn hl_check_single_function_single_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", ONE_ROW);
    let out = mnlab(&["hl-check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema_version: 1\n# config: {"));
    let rows: Vec<_> = data_lines(&text).into_iter().filter(|l| l.starts_with("data,")).collect();
    assert_eq!(rows.len(), 1);
    let ci = header_index(&text, "constant_improved");
    let cc = header_index(&text, "constant_classical");
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert!(fields[ci].parse::<f64>().unwrap() <= 1.0 + 1e-6);
    assert!(fields[cc].parse::<f64>().unwrap() <= 1.0 + 1e-6);
    assert!(text.contains("summary,max,"));
}

#[test]
fn invalid_exponents_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[hl_check]\nexponents = [[2, 2]]\n");
    let out = mnlab(&["hl-check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p < q"));
}

#[test]
fn parse_errors_report_lines_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[weight_audit]\n\nweight = { kind = \"standard\", alpha = \"x\" }\n");
    let out = mnlab(&["weight-audit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_command_and_missing_config_exit_two() {
    assert_eq!(mnlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mnlab(&["hl-check", "--config", "/nonexistent/c.toml"]).status.code(), Some(2));
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", ONE_ROW);
    assert_eq!(mnlab(&["sharpness", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical_and_refine_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[multiplier]\ninstances = 12\ntrials = 20\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = mnlab(&["multiplier", "--config", &cfg, "--seed", "4", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let refined = mnlab(&["multiplier", "--config", &cfg, "--seed", "4", "--refine"]);
    let text = String::from_utf8(refined.stdout).unwrap();
    assert!(text.contains("\"refine\":true"));
    assert!(text.contains("\"seed\":4"));
}

#[test]
fn weight_audit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[weight_audit]\nweight = { kind = \"standard\", alpha = 1.0 }\n");
    let out = mnlab(&["weight-audit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!((v["report"]["audit"]["d_hat"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(v["report"]["audit"]["k"], 2);

    let cfg = write(
        dir.path(),
        "log.toml",
        "[weight_audit]\nexpect_doubling = true\nweight = { kind = \"log_power\", alpha = -1.0, beta = -2.0 }\n",
    );
    let out = mnlab(&["weight-audit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["audit"]["in_d_check"], false);
}

#[test]
fn paraproduct_identity_symbol() {
    let out = mnlab(&["paraproduct"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rep = &v["report"];
    assert_eq!(rep["case"], "a");
    assert!((rep["rho"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(rep["lower_bound"]["lower_bound"].as_f64().unwrap() >= 0.577);
    assert!(rep["ratios"]["rho_over_lower"].is_number());
}

#[test]
fn paraproduct_constant_symbol_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[paraproduct]\nsymbol = { family = \"constant\", re = 2.0 }\n");
    let out = mnlab(&["paraproduct", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["rho"]["value"], 0.0);
    assert_eq!(v["report"]["discrete"]["norm"], 0.0);
    assert_eq!(v["report"]["lower_bound"]["lower_bound"], 0.0);
}

#[test]
fn carleson_measure_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "mu.toml",
        "[nu]\nkind = \"weight\"\nweight = { kind = \"standard\", alpha = 0.0 }\n\n[[bands]]\nr_min = 0.0\nr_max = 1.0\ndensity = [1.0]\n",
    );
    let cfg = write(
        dir.path(),
        "c.toml",
        "[carleson]\nmeasure_file = \"mu.toml\"\ncorpus = [{ family = \"monomial\", n = 2 }]\nsequences = 2\nj_max = 3\n",
    );
    let out = mnlab(&["carleson", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_lines(&text).iter().filter(|l| !l.is_empty()).count(), 1 + 3);

    let cfg = write(dir.path(), "m.toml", "[carleson]\nmeasure_file = \"absent.toml\"\n");
    let out = mnlab(&["carleson", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.toml"));
}

#[test]
fn sharpness_rejects_p_other_than_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[sharpness]\np = 1.0\n");
    assert_eq!(mnlab(&["sharpness", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_mnlab"))
        .args(["weight-audit"])
        .env("MNLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
