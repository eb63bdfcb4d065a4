use std::fs;
use std::path::Path;

use assert_cmd::Command;
use predicates::str::contains;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::cargo_bin("ehrhart-dp").unwrap();
    cmd.env_remove("DP_EHRHART_CAP");
    cmd
}

fn stdout_of(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_of(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn tradeoff_values() {
    for (k, theta, want) in [
        ("2", "0.5", 8.0 / 3.0),
        ("3", "0.5", 72.0 / 13.0),
        ("2", "0.9", 3.6 / 0.19),
    ] {
        let out = stdout_of(&["tradeoff", "--k", k, "--theta", theta]);
        for form in ["ehrhart-series", "s-form", "legendre-corrected"] {
            let line = out
                .lines()
                .find(|l| l.trim_start().starts_with(form))
                .unwrap();
            let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
            assert!((v - want).abs() < 1e-9, "{form} K={k} θ={theta}: {v}");
        }
        assert!(out.contains("corollary-as-printed"));
    }
}

#[test]
fn tradeoff_rational_is_exact() {
    let out = stdout_of(&[
        "tradeoff", "--k", "3", "--theta", "1/2", "--mode", "rational",
    ]);
    assert!(out.contains("s-form                72/13"), "{out}");
}

#[test]
fn tradeoff_csv_sweep() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    bin()
        .args(["tradeoff", "--k", "4", "--thetas", "0.1,0.3,0.7"])
        .arg("--out")
        .arg(&path)
        .assert()
        .success();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "theta,dstar_ehrhart,dstar_sform,dstar_legendre_corrected,corollary_as_printed"
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    for r in rows {
        let v: Vec<f64> = r[1..4].iter().map(|x| x.parse().unwrap()).collect();
        assert!(
            (v[0] - v[1]).abs() < 1e-9 && (v[1] - v[2]).abs() < 1e-9,
            "{r:?}"
        );
        // 12 significant digits at most.
        let digits = r[2].chars().filter(char::is_ascii_digit).count();
        assert!(digits <= 13, "{}", r[2]);
    }
}

#[test]
fn verify_passes_and_poison_fails() {
    let report = json_of(&["verify"]);
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 5);
    assert_eq!(report["config"]["seed"], 0);
    bin()
        .args(["verify", "--poison-counts"])
        .assert()
        .code(1)
        .stderr(contains("face-counts"));
}

#[test]
fn lp_solve_three_cells() {
    let r = json_of(&["lp", "solve", "--n", "4", "--k", "3", "--theta", "0.5"]);
    assert_eq!(r["strong_duality"], true);
    let (p, d) = (num(&r["primal"]["objective"]), num(&r["dual"]["objective"]));
    assert!((p - d).abs() <= 1e-9);
}

#[test]
fn lp_solve_rational() {
    let r = json_of(&[
        "lp", "solve", "--n", "4", "--theta", "1/2", "--p", "1/2", "--mode", "rational",
    ]);
    assert_eq!(r["primal"]["objective"], "21/16");
    assert_eq!(r["gap"], "0");
}

#[test]
fn lp_certify_reports_and_exits_one_when_not_optimal() {
    // The closed-form K = 2 certificate is dual-infeasible at n = 8.
    let out = bin()
        .args(["lp", "certify", "--n", "8", "--theta", "0.5", "--p", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cert = &r["certificates"][0];
    assert_eq!(cert["dual_feasible"], false);
    assert_eq!(cert["primal_feasible"], true);
    assert!(cert["cs_violations"].as_u64().unwrap() > 0);
    let lp = num(&r["lp_reference"]["primal"]["objective"]);
    assert!(
        (lp - num(&cert["primal_obj"])).abs() < 1e-9,
        "the fold is LP-optimal at n = 8"
    );
}

#[test]
fn lp_certify_general_k_reports_both_readings() {
    let out = bin()
        .args(["lp", "certify", "--n", "4", "--k", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let readings: Vec<&str> = r["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["reading"].as_str().unwrap())
        .collect();
    assert_eq!(readings, ["printed", "halfspace"]);
}

#[test]
fn lp_export_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("lp{i}.txt")))
        .collect();
    for p in &paths {
        bin()
            .args(["lp", "export", "--n", "1", "--k", "2"])
            .arg("--out")
            .arg(p)
            .assert()
            .success();
    }
    let a = fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(a, fs::read_to_string(&paths[1]).unwrap());
    assert!(a.starts_with("min: "));
    assert_eq!(a.lines().filter(|l| l.starts_with("dp_")).count(), 4);
    let dual = stdout_of(&["lp", "export", "--n", "1", "--k", "2", "--dual"]);
    assert!(dual.starts_with("max: "));
}

#[test]
fn converge_columns() {
    let text = stdout_of(&[
        "converge", "--theta", "0.3", "--p", "0.5", "--ns", "10,20,40",
    ]);
    assert_eq!(
        text.lines().next().unwrap(),
        "n,mechanism_distortion,certificate_objective,limit,gap"
    );
    let rows = csv_rows(&text);
    let limit = 4.0 * 0.3 / (1.0 - 0.09);
    let gaps: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    for r in &rows {
        assert!((r[3].parse::<f64>().unwrap() - limit).abs() < 1e-9);
        assert!(!r[2].is_empty());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");

    let text = stdout_of(&["converge", "--k", "3", "--ns", "12,24"]);
    for r in csv_rows(&text) {
        assert!(r[2].is_empty());
        assert!((r[3].parse::<f64>().unwrap() - 72.0 / 13.0).abs() < 1e-9);
    }
    bin().args(["converge", "--ns", "201"]).assert().code(2);
}

#[test]
fn graph_counts() {
    let dot = stdout_of(&["graph", "--k", "2", "--n", "5"]);
    assert_eq!(dot.matches("label=").count(), 6);
    assert_eq!(dot.matches(" -- ").count(), 5);
    let dot = stdout_of(&["graph", "--k", "3", "--n", "5"]);
    assert_eq!(dot.matches("label=").count(), 21);
    // Handshake: half the sum of degrees, one edge per non-empty cell.
    assert_eq!(dot.matches(" -- ").count(), 45);
}

#[test]
fn capacity_and_override() {
    bin()
        .args(["graph", "--k", "5", "--n", "20"])
        .assert()
        .code(3)
        .stderr(contains("cap"));
    bin()
        .args(["graph", "--k", "3", "--n", "40"])
        .env("DP_EHRHART_CAP", "100000")
        .assert()
        .success();
    bin()
        .args(["graph", "--k", "3", "--n", "3"])
        .env("DP_EHRHART_CAP", "5")
        .assert()
        .code(3);
    bin()
        .args(["graph"])
        .env("DP_EHRHART_CAP", "lots")
        .assert()
        .code(2);
    bin()
        .args(["lp", "solve", "--n", "30", "--k", "3"])
        .assert()
        .code(3);
}

#[test]
fn usage_errors() {
    bin().args(["tradeoff", "--theta", "1.5"]).assert().code(2);
    bin().args(["tradeoff", "--k", "1"]).assert().code(2);
    bin()
        .args(["lp", "solve", "--p", "0.2,0.3,0.6", "--k", "3"])
        .assert()
        .code(2);
    bin().args(["nonsense"]).assert().code(2);
    bin()
        .args(["lp", "solve", "--mode", "decimal"])
        .assert()
        .code(2);
}

fn write_db(dir: &Path, rows: &[&str]) -> (std::path::PathBuf, std::path::PathBuf) {
    let schema = dir.join("schema.json");
    fs::write(
        &schema,
        r#"{"attributes":[{"name":"smoker","values":["yes","no"]}]}"#,
    )
    .unwrap();
    let records = dir.join("records.csv");
    fs::write(&records, format!("smoker\n{}\n", rows.join("\n"))).unwrap();
    (records, schema)
}

fn sanitize(records: &Path, schema: &Path, extra: &[&str]) -> std::process::Output {
    bin()
        .arg("sanitize")
        .arg("--records")
        .arg(records)
        .arg("--schema")
        .arg(schema)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn sanitize_is_reproducible_and_sums_to_n() {
    let dir = TempDir::new().unwrap();
    let rows = [
        "yes", "no", "no", "yes", "no", "no", "no", "yes", "no", "no",
    ];
    let (records, schema) = write_db(dir.path(), &rows);
    let a = sanitize(&records, &schema, &["--seed", "7"]);
    let b = sanitize(&records, &schema, &["--seed", "7"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let params: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(params["theta"], 0.5);
    assert_eq!(params["records"], 10);
    for seed in 0..20 {
        let out = sanitize(&records, &schema, &["--seed", &seed.to_string()]);
        let h: Value = serde_json::from_slice(&out.stdout).unwrap();
        let total: u64 = h["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert_eq!(total, 10);
    }

    let synth = dir.path().join("synthetic.csv");
    let out_json = dir.path().join("hist.json");
    let out = bin()
        .arg("sanitize")
        .arg("--records")
        .arg(&records)
        .arg("--schema")
        .arg(&schema)
        .arg("--records-out")
        .arg(&synth)
        .arg("--out")
        .arg(&out_json)
        .output()
        .unwrap();
    assert!(out.status.success());
    let h: Value = serde_json::from_str(&fs::read_to_string(&out_json).unwrap()).unwrap();
    let text = fs::read_to_string(&synth).unwrap();
    assert_eq!(text.lines().count(), 11);
    let yes = text.lines().filter(|l| *l == "yes").count() as u64;
    assert_eq!(yes, h["counts"][0].as_u64().unwrap());
}

#[test]
fn sanitize_tiny_theta_keeps_the_input() {
    let dir = TempDir::new().unwrap();
    let rows = ["yes", "no", "no", "yes", "no", "no", "no", "yes"];
    let (records, schema) = write_db(dir.path(), &rows);
    for seed in 0..200 {
        let out = sanitize(
            &records,
            &schema,
            &["--theta", "1e-6", "--seed", &seed.to_string()],
        );
        let h: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(h["counts"], serde_json::json!([3, 5]), "seed {seed}");
    }
}

#[test]
fn sanitize_errors() {
    let dir = TempDir::new().unwrap();
    let (records, schema) = write_db(dir.path(), &["yes", "maybe"]);
    let out = sanitize(&records, &schema, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maybe"));
    // Two records: the default ball leaves the simplex.
    let (records, schema) = write_db(dir.path(), &["yes", "no"]);
    let out = sanitize(&records, &schema, &["--radius-const", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest feasible radius"));
    let missing = dir.path().join("nope.csv");
    assert_eq!(sanitize(&missing, &schema, &[]).status.code(), Some(2));
}
