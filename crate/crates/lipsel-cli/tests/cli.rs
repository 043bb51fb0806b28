//! End-to-end tests of the `lipsel` binary: JSON in, JSON/CSV out, exit
//! codes 0 (success), 2 (the mathematics rejects the instance), 1 (input).

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lipsel() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lipsel"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const TWO_FLATS: &str = r#"{
  "schema_version": 1,
  "graph": {"edges": [[0, 1]], "weights": [1.0], "A": 1.0,
            "rho": [[0.0, 1.0], [1.0, 0.0]]},
  "map": {"flats": [{"base": [0.0, 0.0], "basis": [[1.0, 0.0]]},
                    {"base": [0.0, 1.0]}],
          "k": 1}
}"#;

#[test]
fn select_two_flats_matches_the_hand_optimum() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "select.json", TWO_FLATS);
    let out = lipsel().arg("select").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "select");
    let seminorm = doc["seminorm"].as_f64().unwrap();
    // The x-axis and the point (0, 1) are exactly one unit apart, so the
    // optimum is 1; the engine may exceed it only by round-off slack.
    assert!((1.0 - 1e-7..=1.0 + 1e-6).contains(&seminorm), "seminorm {seminorm}");
    let p0 = doc["points"][0].as_array().unwrap();
    let p1 = doc["points"][1].as_array().unwrap();
    assert!(p0[1].as_f64().unwrap().abs() <= 1e-9, "vertex 0 stays on the x-axis");
    assert_eq!(p1[0].as_f64().unwrap(), 0.0);
    assert_eq!(p1[1].as_f64().unwrap(), 1.0);
}

#[test]
fn whitney_affine_data_yields_a_zero_seminorm_jet() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "whitney.json",
        r#"{
          "schema_version": 1,
          "X": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
          "f": [1.0, 3.0, 4.0, 6.0],
          "omega": {"kind": "power", "alpha": 1.0}
        }"#,
    );
    let out = lipsel().arg("whitney").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!(doc["jet_seminorm"].as_f64().unwrap() <= 1e-7);
    for g in doc["jet"]["g"].as_array().unwrap() {
        assert!((g[0].as_f64().unwrap() - 2.0).abs() <= 1e-7);
        assert!((g[1].as_f64().unwrap() - 3.0).abs() <= 1e-7);
    }
}

#[test]
fn linsys_names_the_inconsistent_point_and_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "system.json",
        r#"{
          "schema_version": 1,
          "X": [[0.0], [1.0]],
          "A": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 0.0]]],
          "b": [[0.0, 0.0], [0.0, 1.0]],
          "omega": {"kind": "power", "alpha": 1.0}
        }"#,
    );
    let out = lipsel().arg("linsys").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"]["kind"], "inconsistent-system");
    assert_eq!(doc["error"]["point"], 1);
}

#[test]
fn zero_distance_vertices_with_disjoint_flats_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "disjoint.json",
        r#"{
          "schema_version": 1,
          "graph": {"edges": [[0, 1]], "weights": [0.0], "A": 1.0,
                    "rho": [[0.0, 0.0], [0.0, 0.0]]},
          "map": {"flats": [{"base": [0.0, 0.0], "basis": [[1.0, 0.0]]},
                            {"base": [0.0, 1.0], "basis": [[1.0, 0.0]]}],
                  "k": 1}
        }"#,
    );
    let out = lipsel().arg("select").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"]["kind"], "hypothesis-failure");
    let vertices = doc["error"]["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 2);
}

#[test]
fn malformed_json_reports_the_position_and_exits_one() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "broken.json", "{\n  \"graph\": [,]\n}");
    let out = lipsel().arg("select").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"]["kind"], "input");
    let detail = doc["error"]["detail"].as_str().unwrap();
    assert!(detail.contains("line 2"), "diagnostic was: {detail}");
    assert!(detail.contains("column"), "diagnostic was: {detail}");
}

#[test]
fn unsupported_schema_versions_exit_one() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "future.json",
        &TWO_FLATS.replace("\"schema_version\": 1", "\"schema_version\": 99"),
    );
    let out = lipsel().arg("select").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_bench_suites_exit_one() {
    let out = lipsel().args(["bench", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_bench_sizes_exit_one() {
    let out = lipsel()
        .args(["bench", "--suite", "finiteness", "--sizes"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_document_to_a_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "select.json", TWO_FLATS);
    let target = dir.path().join("result.json");
    let out = lipsel()
        .arg("select")
        .arg(&input)
        .arg("--output")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["command"], "select");
}

#[test]
fn extend_c11_interpolates_and_matches_the_hand_computed_midpoint() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "extend.json",
        r#"{
          "schema_version": 1,
          "X": [[0.0], [1.0]],
          "f": [0.0, 1.0],
          "g": [[1.0], [1.0]],
          "m": 1.0,
          "queries": {"points": [[0.5], [0.0], [1.0]]}
        }"#,
    );
    let out = lipsel().arg("extend-c11").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let results = doc["results"].as_array().unwrap();
    // Pieces with curvature c = 1 are w + w^2 and 1/2 + w^2; their common
    // tangent has slope 3/2 and touches at 1/4 and 3/4, so the envelope at
    // the midpoint is 11/16 and F(1/2) = 11/16 - 1/8 = 9/16 with F' = 1.
    // Data points must reproduce value and gradient exactly.
    for (idx, (want_v, want_g)) in
        [(0.5625, 1.0), (0.0, 1.0), (1.0, 1.0)].iter().enumerate()
    {
        let value = results[idx]["value"].as_f64().unwrap();
        assert!((value - want_v).abs() <= 1e-6, "value {value} at query {idx}");
        let grad = results[idx]["gradient"][0].as_f64().unwrap();
        assert!((grad - want_g).abs() <= 1e-6, "gradient {grad} at query {idx}");
    }
}

#[test]
fn kirszbraun_reproduces_the_data_at_its_own_points() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "kirszbraun.json",
        r#"{
          "schema_version": 1,
          "X": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
          "f": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
          "m": 1.0,
          "queries": {"points": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]}
        }"#,
    );
    let out = lipsel().arg("kirszbraun").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    let values = doc["values"].as_array().unwrap();
    let data = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    for (row, want) in values.iter().zip(data.iter()) {
        for (c, w) in row.as_array().unwrap().iter().zip(want.iter()) {
            assert!((c.as_f64().unwrap() - w).abs() <= 1e-6);
        }
    }
}

#[test]
fn select_cube_respects_radii_and_the_metric() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "cubes.json",
        r#"{
          "schema_version": 1,
          "space": {"dist": [[0.0, 1.0], [1.0, 0.0]]},
          "cubes": {"centers": [[0.0], [1.0]], "radii": [0.2, 0.2]}
        }"#,
    );
    let out = lipsel().arg("select-cube").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!(doc["seminorm"].as_f64().unwrap() <= 1.0 + 1e-9);
    let p0 = doc["points"][0][0].as_f64().unwrap();
    let p1 = doc["points"][1][0].as_f64().unwrap();
    assert!(p0.abs() <= 0.2 + 1e-9);
    assert!((p1 - 1.0).abs() <= 0.2 + 1e-9);
}

#[test]
fn oracle_reports_the_exact_optimum_with_a_witness() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "oracle.json", TWO_FLATS);
    let out = lipsel().arg("oracle").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["mode"], "optimal");
    let lambda = doc["lambda_star"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() <= 1e-7, "lambda_star {lambda}");
    assert!(doc["witness"].is_array());
}

#[test]
fn bench_output_is_byte_identical_for_equal_seeds() {
    let run = || {
        lipsel()
            .args(["bench", "--suite", "finiteness", "--sizes", "12", "--seed", "5"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}
