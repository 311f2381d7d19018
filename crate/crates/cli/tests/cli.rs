use std::path::Path;
use std::process::{Command, Output};

fn lownoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lownoise")).args(args).output().expect("binary runs")
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split_whitespace().map(String::from).collect();
    let rows = lines
        .map(|l| l.split_whitespace().map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn h(x: f64) -> f64 {
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

#[test]
fn depol_sweep_orders_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("depol.dat");
    let o = lownoise(&["sweep", "--family", "depol", "--pmin", "0", "--pmax", "0.1", "--steps", "21", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&out);
    assert_eq!(header, ["p", "d", "s", "bound"]);
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let bound = 8.0 / 9.0 * (6.0 + 2f64.sqrt()) * r[0] * r[0];
        assert!(r[1] <= r[2] + 1e-6, "{r:?}");
        assert!(r[2] <= bound + 1e-12, "{r:?}");
        assert!((r[3] - bound).abs() < 1e-12);
    }
    assert!((rows[10][1] - 0.0140600).abs() < 1e-6);
}

#[test]
fn xz_sweep_respects_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xz.dat");
    let o = lownoise(&["sweep", "--family", "xz", "--steps", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (_, rows) = table(&out);
    for r in &rows {
        let bound = 16.0 * r[0] * r[0] + 32.0 * r[0].powf(2.5);
        assert!(r[1] <= r[2] + 1e-6 && r[2] <= bound + 1e-4, "{r:?}");
    }
}

#[test]
fn sweep_starting_at_zero_has_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.dat");
    let o = lownoise(&["sweep", "--family", "depol", "--pmin", "0", "--pmax", "0.01", "--steps", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (_, rows) = table(&out);
    assert_eq!(rows.len(), 2);
    // The SDP column is zero up to the solver's duality gap.
    assert!(rows[0].iter().all(|v| v.abs() <= 1e-8), "{:?}", rows[0]);
}

#[test]
fn sweep_selects_methods_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dat");
    let b = dir.path().join("b.dat");
    for path in [&a, &b] {
        let o = lownoise(&["sweep", "--family", "xz", "--methods", "analytic,tuned", "--steps", "5", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let (header, _) = table(&a);
    assert_eq!(header, ["p", "s", "bound"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn out_of_domain_rows_become_nan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("poly.dat");
    let o = lownoise(&[
        "sweep", "--family", "pauli-poly", "--linear", "0.2,0.1,0.05", "--quadratic", "-0.5,1,0.3",
        "--pmax", "0.9", "--steps", "4", "--methods", "tuned", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let text = std::fs::read_to_string(&out).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.ends_with("NaN"), "{last}");
}

#[test]
fn sweep_usage_errors_exit_one() {
    for args in [
        vec!["sweep", "--family", "depol", "--pmin", "0.2", "--pmax", "0.1"],
        vec!["sweep", "--family", "depol", "--steps", "1"],
        vec!["sweep", "--family", "warp"],
        vec!["sweep", "--family", "generalized-pauli", "--methods", "tuned"],
        vec!["sweep", "--family", "pauli-poly", "--linear", "0.1,0.1"],
        vec!["sweep", "--family", "depol", "--gap-tol", "-1"],
        vec!["nonsense"],
    ] {
        let o = lownoise(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn curves_match_analytic_derivative() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.dat");
    let o = lownoise(&["curves", "--r", "1,2", "--pmin", "0.05", "--pmax", "0.5", "--steps", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = table(&out);
    assert_eq!(header, ["p", "g_r1", "dg_r1", "g_r2", "dg_r2"]);
    let last = rows.last().unwrap();
    assert!((last[0] - 0.5).abs() < 1e-12 && (last[1] - 0.5).abs() < 1e-12);
    let first = &rows[0];
    let g2 = |p: f64| -p * p * (p * p).log2();
    let fd = (g2(0.05 + 1e-6) - g2(0.05 - 1e-6)) / 2e-6;
    assert!((first[4] - fd).abs() < 1e-6);
}

#[test]
fn curves_reject_empty_exponents() {
    assert_eq!(lownoise(&["curves", "--r", ""]).status.code(), Some(1));
    assert_eq!(lownoise(&["curves"]).status.code(), Some(1));
    assert_eq!(lownoise(&["curves", "--r", "0.5"]).status.code(), Some(1));
}

#[test]
fn report_for_depolarizing_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("d.spec");
    std::fs::write(&spec, "kind: depolarizing\np: 0.01\n").unwrap();
    let o = lownoise(&["report", spec.to_str().unwrap(), "--format", "row"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    let lower: f64 = row[4].parse().unwrap();
    assert!((lower - (1.0 - h(0.01) - 0.01 * 3f64.log2())).abs() < 1e-6);
    assert_eq!(row[2], "sdp");
    assert_eq!(row[3], "4");

    let o = lownoise(&["report", spec.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("Q interval") && text.contains("P interval") && text.contains("(sdp)"));
    assert!(text.contains("local optimizer"));
}

#[test]
fn report_for_identity_pauli_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("id.spec");
    std::fs::write(&spec, "kind: pauli\np: (1, 0, 0, 0)\n").unwrap();
    let o = lownoise(&["report", spec.to_str().unwrap(), "--format", "row"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split_whitespace().filter_map(|v| v.parse().ok()).collect();
    for v in &row[row.len() - 4..] {
        assert!((v - 1.0).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn report_with_constructed_eta_and_kraus_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("k.spec");
    std::fs::write(&spec, "kind: kraus\ndimension: 2\nkraus: 0.99498743710662, 0; 0, 0.99498743710662\nkraus: 0, 0.1; 0.1, 0\n").unwrap();
    let o = lownoise(&["report", spec.to_str().unwrap(), "--eta", "0.001"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("(constructed)"));
}

#[test]
fn malformed_spec_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    std::fs::write(&spec, "kind: depolarizing\n# comment\np = oops\n").unwrap();
    let o = lownoise(&["report", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = lownoise(&["report", dir.path().join("missing.spec").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fail.dat");
    // A solver held to an unreachable gap cannot certify optimality.
    let o = lownoise(&[
        "sweep", "--family", "depol", "--pmin", "0.01", "--pmax", "0.02", "--steps", "2", "--methods", "sdp",
        "--gap-tol", "1e-300", "--feas-tol", "1e-300", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.exists());
}
