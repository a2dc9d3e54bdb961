use assert_cmd::Command;
use serde_json::Value;

fn meroform() -> Command {
    let mut c = Command::cargo_bin("meroform").unwrap();
    c.env_remove("MEROFORM_PRECISION");
    c
}

fn json(args: &[&str]) -> Value {
    let out = meroform().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_inverse_e10() {
    let out = meroform().args(["verify", "--form", "1/E10", "--m", "0..5", "--tol", "1e-8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_failure_exit_code() {
    // A tolerance no truncated sum can meet.
    let out = meroform()
        .args(["verify", "--form", "1/E10", "--m", "0..1", "--norm-bound", "100", "--tol", "1e-60"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_inverse_e6_fourth() {
    assert_eq!(json(&["oracle", "--form", "1/E6^4", "--m", "0..1"]), serde_json::json!(["1", "2016"]));
}

#[test]
fn enumerate_gaussian() {
    let v = json(&["enumerate", "--field", "gaussian", "--bound", "5"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["norm"], 1);
    let csv = meroform().args(["enumerate", "--field", "eisenstein", "--bound", "3", "--output", "csv"]).output().unwrap();
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "c,d,a,b,norm\n0,1,1,0,1\n1,1,1,0,3\n");
}

#[test]
fn coeffs_routes_quasi_forms() {
    for form in ["E2/E10", "E2 * E2 / E10", "E2/E6^4"] {
        let v = json(&["coeffs", "--form", form, "--m", "0..2", "--norm-bound", "2000"]);
        for row in v.as_array().unwrap() {
            let e: f64 = row["rel_err"].as_str().unwrap().parse().unwrap();
            assert!(e < 1e-8, "{form}: {row}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["coeffs", "--form", "1/E4", "--m", "0..3", "--norm-bound", "500"];
    let a = meroform().args(args).output().unwrap().stdout;
    let b = meroform().args(args).output().unwrap().stdout;
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["oracle", "--form", "1/(E4"],
        vec!["coeffs", "--form", "1/E10", "--precision", "32"],
        vec!["coeffs", "--form", "1/E10", "--m", "5..2"],
        vec!["coeffs", "--form", "1/E10", "--norm-bound", "8"],
        vec!["enumerate", "--field", "quaternion", "--bound", "5"],
        vec!["frobnicate"],
    ] {
        assert_eq!(meroform().args(&args).output().unwrap().status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn numerical_failure_is_structured() {
    // D(1/E10) is not modular, so its principal parts do not fit the basis.
    let out = meroform().args(["coeffs", "--form", "D(1/E10)", "--m", "0", "--norm-bound", "200"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "inconsistent_tails");
}

#[test]
fn precision_from_environment() {
    let out = meroform().env("MEROFORM_PRECISION", "32").args(["constants"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&meroform().env("MEROFORM_PRECISION", "64").arg("constants").output().unwrap().stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn basis_from_principal_parts() {
    let input = r#"{"k": 6, "principal_parts": [{"point": {"tag": "i"}, "orders": {"1": {"re": "0", "im": "0.5"}}}]}"#;
    let out = meroform().args(["basis", "--input", "-"]).write_stdin(input).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // residue i/2 over i/pi
    let a: f64 = v["terms"][0]["coeff"]["re"].as_str().unwrap().parse().unwrap();
    assert!((a - std::f64::consts::PI / 2.0).abs() < 1e-12);
}

#[test]
fn expand_reports_principal_part() {
    let v = json(&["expand", "--form", "1/E6^4", "--point", "i", "--depth", "0"]);
    assert_eq!(v["terms"][0]["order"], -4);
    assert_eq!(v["principal_part"]["orders"].as_object().unwrap().len(), 4);
    assert!(v["nonconforming_orders"].as_array().unwrap().is_empty());
    let g = json(&["expand", "--form", "E4", "--tau", "0.1,1.2", "--depth", "2"]);
    assert_eq!(g["point"]["tag"], "generic");
}

#[test]
fn identity_reports_both_forms() {
    let stated = meroform().args(["identity", "--norm-bound", "200"]).output().unwrap();
    assert_eq!(stated.status.code(), Some(3));
    let v = json(&["identity", "--norm-bound", "1000", "--corrected"]);
    assert_eq!(v["pass"], true);
}
