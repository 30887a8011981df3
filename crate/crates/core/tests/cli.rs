use std::fs;
use std::path::Path;

use mobius_center::cli::{self, EXIT_FLOW_FAILURE, EXIT_INVALID_CYCLE, EXIT_OK, EXIT_PROPERTY_FAILURE, EXIT_USAGE, EXIT_ZERO_VOLUME};
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mobius-center").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SQUARE: &str = r#"{
  "dim": 2,
  "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]],
  "facets": [
    {"indices": [0, 1]}, {"indices": [1, 2]}, {"indices": [2, 3]}, {"indices": [3, 0]}
  ]
}"#;

#[test]
fn centers_of_unit_square() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "square.json", SQUARE);
    let (code, out, _) = run(&["centers", &file]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "vol            1.00000000000e0\n\
         cm             5.00000000000e-1 5.00000000000e-1\n\
         ccm            5.00000000000e-1 5.00000000000e-1\n\
         m              5.00000000000e-1 5.00000000000e-1\n\
         residual_euler 0.00000000000e0\n"
    );
}

#[test]
fn broken_cycle_lists_violations() {
    let dir = TempDir::new().unwrap();
    let text = SQUARE.replace(r#"{"indices": [3, 0]}"#, r#"{"indices": [0, 3]}"#);
    let file = write(&dir, "open.json", &text);
    let (code, _, err) = run(&["centers", &file]);
    assert_eq!(code, EXIT_INVALID_CYCLE);
    assert!(err.contains("not a cycle"));
    assert_eq!(err.lines().filter(|l| l.starts_with("  ")).count(), 2);
}

#[test]
fn zero_volume_chain_exits_4() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1]],
        "facets": [{"indices": [0,1]}, {"indices": [1,0]}, {"indices": [1,2]}, {"indices": [2,1]}]}"#;
    let file = write(&dir, "flat.json", text);
    assert_eq!(run(&["centers", &file]).0, EXIT_ZERO_VOLUME);
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"dim\": 2");
    assert_eq!(run(&["centers", &bad]).0, EXIT_USAGE);
    assert_eq!(run(&["centers", "/nonexistent/poly.json"]).0, EXIT_USAGE);
    let out_of_range = write(&dir, "range.json", &SQUARE.replace("[3, 0]", "[3, 9]"));
    assert_eq!(run(&["centers", &out_of_range]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--dims", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["random", "--dim", "3", "--kind", "polygon", "--out", "x.json"]).0, EXIT_USAGE);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--seed", "9", "--trials", "3", "--dims", "2,3"];
    let (code, first, _) = run(&args);
    assert_eq!(code, EXIT_OK, "{first}");
    assert!(first.starts_with("verify seed=9 trials=3 dims=2,3\n"));
    assert!(first.contains("summary:"));
    assert_eq!(run(&args).1, first);
}

#[test]
fn verify_reports_failures_with_exit_1() {
    let (code, out, _) = run(&["verify", "--trials", "2", "--dims", "2", "--tol", "1e-300"]);
    assert_eq!(code, EXIT_PROPERTY_FAILURE);
    assert!(out.contains("FAIL"));
    assert!(out.contains("seed"));
}

#[test]
fn random_polytopes_round_trip_through_centers() {
    let dir = TempDir::new().unwrap();
    for (kind, dim) in [("polygon", "2"), ("crosspoly", "2"), ("crosspoly", "4")] {
        let path = dir.path().join(format!("{kind}{dim}.json"));
        let p = path.to_str().unwrap();
        let (code, _, err) = run(&["random", "--dim", dim, "--kind", kind, "--seed", "5", "--out", p]);
        assert_eq!(code, EXIT_OK, "{err}");
        let first = fs::read_to_string(&path).unwrap();
        run(&["random", "--dim", dim, "--kind", kind, "--seed", "5", "--out", p]);
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
        let (code, out, _) = run(&["centers", p]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 5);
    }
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,logvol,div_at_m"));
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn homothety_flow_is_linear_in_log_volume() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "square.json", SQUARE);
    let field = write(
        &dir,
        "field.json",
        r#"{"kind": "mobius", "A": [[0.5, 0], [0, 0.5]], "b": [0, 0], "c": [0, 0]}"#,
    );
    let csv = dir.path().join("traj.csv");
    let (code, _, err) = run(&["flow", &poly, &field, "--t", "1", "--steps", "10", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][0], 1.0);
    for row in &rows {
        assert!((row[1] - row[0]).abs() < 1e-6);
        assert!((row[2] - 1.0).abs() < 1e-12);
    }
    let snapshot = fs::read_to_string(dir.path().join("traj.final.json")).unwrap();
    let e = 0.5f64.exp();
    let (code, out, _) = run(&["centers", dir.path().join("traj.final.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{snapshot}");
    let vol: f64 = out.lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((vol - e * e).abs() < 1e-6);
}

#[test]
fn collapsing_flow_exits_5() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "square.json", SQUARE);
    let field = write(
        &dir,
        "field.json",
        r#"{"kind": "projective", "A": [[0, 0], [0, -1]], "b": [0, 0], "c": [0, 0]}"#,
    );
    let csv = dir.path().join("traj.csv");
    let (code, _, err) = run(&["flow", &poly, &field, "--t", "40", "--steps", "400", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_FLOW_FAILURE);
    assert!(err.contains("2"), "{err}");
    assert!(!csv.exists());
}

#[test]
fn invalid_mobius_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "square.json", SQUARE);
    let field = write(
        &dir,
        "field.json",
        r#"{"kind": "mobius", "A": [[1, 0], [0, 2]], "b": [0, 0], "c": [0, 0]}"#,
    );
    let csv = dir.path().join("traj.csv");
    let (code, _, _) = run(&["flow", &poly, &field, "--t", "1", "--steps", "4", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn centers_of_right_triangle() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "triangle.json",
        r#"{"dim": 2, "vertices": [[0,0],[1,0],[0,1]], "facets": [{"indices": [0,1]}, {"indices": [1,2]}, {"indices": [2,0]}]}"#,
    );
    let (code, out, _) = run(&["centers", &file]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ccm            5.00000000000e-1 5.00000000000e-1\n"), "{out}");
    assert!(out.contains("m              2.50000000000e-1 2.50000000000e-1\n"), "{out}");
}

fn flow_rows(field: &str, t: &str, steps: &str) -> Vec<Vec<f64>> {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "square.json", SQUARE);
    let field = write(&dir, "field.json", field);
    let csv = dir.path().join("traj.csv");
    let (code, _, err) = run(&["flow", &poly, &field, "--t", t, "--steps", steps, "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    csv_rows(&csv)
}

#[test]
fn unit_homothety_doubles_log_volume_rate() {
    let rows = flow_rows(r#"{"kind": "mobius", "A": [[1, 0], [0, 1]], "b": [0, 0], "c": [0, 0]}"#, "0.1", "64");
    assert_eq!(rows.len(), 65);
    for row in rows {
        assert!((row[1] - 2.0 * row[0]).abs() < 1e-12);
        assert!((row[2] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn zero_field_gives_constant_columns() {
    let rows = flow_rows(r#"{"kind": "mobius", "A": [[0, 0], [0, 0]], "b": [0, 0], "c": [0, 0]}"#, "1", "8");
    for row in rows {
        assert_eq!(row[1], 0.0);
        assert_eq!(row[2], 0.0);
    }
}

#[test]
fn strong_b_field_fails_with_a_time() {
    let dir = TempDir::new().unwrap();
    let poly = write(&dir, "square.json", SQUARE);
    let field = write(&dir, "field.json", r#"{"kind": "mobius", "A": [[0, 0], [0, 0]], "b": [-5, 0], "c": [0, 0]}"#);
    let csv = dir.path().join("traj.csv");
    let (code, _, err) = run(&["flow", &poly, &field, "--t", "10", "--steps", "1000", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_FLOW_FAILURE);
    assert!(err.contains("t = ") || err.contains("time"), "{err}");
}

#[test]
fn random_generator_contracts() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["random", "--dim", "2", "--kind", "polygon", "--seed", "7", "--out", p]).0, EXIT_OK);
    assert_eq!(run(&["centers", p]).0, EXIT_OK);
    assert_eq!(run(&["random", "--dim", "4", "--kind", "crosspoly", "--out", p]).0, EXIT_OK);
    let poly = mobius_center::SimplicialPolytope::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(poly.facets().len(), 16);
    assert!(poly.validate_cycle().is_empty());
    assert_eq!(run(&["random", "--dim", "1", "--kind", "crosspoly", "--out", p]).0, EXIT_USAGE);
}
