use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use solidtorus::generate;
use solidtorus::RawInstance;

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn solidtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solidtorus"))
        .args(args)
        .env_remove("SOLIDTORUS_CONFIG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = solidtorus(&["validate", path_str(&instance("one_vertex.json"))]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("verdict: admissible"));

    let exact = solidtorus(&["--exact", "validate", path_str(&instance("one_vertex.json"))]);
    assert_eq!(code(&exact), 0);

    let bad = solidtorus(&["validate", path_str(&instance("vertex_sum_violation.json"))]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("(ii)   FAIL"));

    let compressed = solidtorus(&["validate", path_str(&instance("one_vertex_compressed.json"))]);
    assert_eq!(code(&compressed), 2);
}

#[test]
fn malformed_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let full = std::fs::read_to_string(instance("one_vertex.json")).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &full[..full.len() / 2]).unwrap();
    for cmd in ["validate", "solve", "realize"] {
        let o = solidtorus(&[cmd, path_str(&cut)]);
        assert_eq!(code(&o), 1, "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    let missing = solidtorus(&["solve", path_str(&dir.path().join("none.json"))]);
    assert_eq!(code(&missing), 1);
}

#[test]
fn solve_reports_solution_or_certificate() {
    let o = solidtorus(&["solve", path_str(&instance("one_vertex.json"))]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "feasible");
    let theta: Vec<f64> = serde_json::from_value(v["theta"].clone()).unwrap();
    assert_eq!(theta.len(), 6);
    assert!(theta.iter().all(|&x| x > 0.0));
    assert!(v["residual"].as_f64().unwrap() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("space.json");
    let o = solidtorus(&["solve", path_str(&instance("one_vertex.json")), "--dump-solution-space", path_str(&dump)]);
    assert_eq!(code(&o), 0);
    let sp: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(sp["kernel"].as_array().unwrap().len(), 1);
    assert_eq!(sp["particular"].as_array().unwrap().len(), 6);

    let o = solidtorus(&["solve", path_str(&instance("one_vertex_compressed.json"))]);
    assert_eq!(code(&o), 3);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["certificate"]["condition"], "compression");
    assert_eq!(v["certificate"]["verified"], true);
    // Independent check of the witness weight against the instance data.
    let raw: Value =
        serde_json::from_str(&std::fs::read_to_string(instance("one_vertex_compressed.json")).unwrap()).unwrap();
    let alpha: Vec<f64> = serde_json::from_value(raw["alpha"].clone()).unwrap();
    let edges: Vec<usize> = serde_json::from_value(v["certificate"]["crossed_edges"].clone()).unwrap();
    let w: f64 = edges.iter().map(|&e| alpha[e]).sum();
    assert!(w <= raw["cone_angle"].as_f64().unwrap());
}

#[test]
fn realize_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("domain.svg");
    let json = dir.path().join("out.json");
    let p = instance("one_vertex.json");
    let o = solidtorus(&["realize", path_str(&p), "--svg", path_str(&svg), "--json", path_str(&json)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["volume"].as_f64().unwrap() > 0.0);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(written, v);

    let again = solidtorus(&["realize", path_str(&p)]);
    assert_eq!(again.stdout, o.stdout);

    let mirrored = stdout_json(&solidtorus(&["realize", path_str(&p), "--mirror"]));
    assert!((mirrored["volume"].as_f64().unwrap() - v["volume"].as_f64().unwrap()).abs() < 1e-9);

    let cusp = stdout_json(&solidtorus(&["realize", path_str(&instance("one_vertex_cusp.json"))]));
    assert!(cusp["core"]["cusp_shape"].is_array());

    let o = solidtorus(&["realize", path_str(&instance("one_vertex_compressed.json"))]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["certificate"]["condition"], "compression");
}

#[test]
fn sweep_is_even_and_concave() {
    let o = solidtorus(&["sweep", path_str(&instance("one_vertex.json")), "--k-range", "-0.6:0.6:13"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 13);
    let ks: Vec<f64> = rows.iter().map(|r| r[col("K")].parse().unwrap()).collect();
    let vol: Vec<f64> = rows.iter().map(|r| r[col("volume")].parse().unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
    for i in 0..13 {
        assert!((vol[i] - vol[12 - i]).abs() <= 1e-9);
        assert_eq!(rows[i][col("status")], "ok");
    }
    for w in vol.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-9);
    }
    let zero = &rows[6];
    assert!(zero[col("core_length")].is_empty());
    assert!(!zero[col("cusp_shape_re")].is_empty());
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "bound = 5\n").unwrap();
    let json = dir.path().join("r.json");
    let p = instance("one_vertex.json");
    let run = |extra: &[&str]| {
        let mut args = vec!["validate", path_str(&p), "--json", path_str(&json)];
        args.extend_from_slice(extra);
        let o =
            Command::new(env!("CARGO_BIN_EXE_solidtorus")).args(&args).env("SOLIDTORUS_CONFIG", &cfg).output().unwrap();
        assert_eq!(code(&o), 0);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        v["bound"].as_u64().unwrap()
    };
    assert_eq!(run(&[]), 5);
    assert_eq!(run(&["--bound", "7"]), 7);
    let default = solidtorus(&["validate", path_str(&p), "--json", path_str(&json)]);
    assert_eq!(code(&default), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["bound"], 12);

    std::fs::write(&cfg, "colour = 5\n").unwrap();
    let o = solidtorus(&["--config", path_str(&cfg), "validate", path_str(&p)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn selftest_passes() {
    let o = solidtorus(&["selftest", "--seed", "11"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn shipped_instances_are_canonical() {
    for name in ["one_vertex.json", "one_vertex_cusp.json", "one_vertex_compressed.json", "vertex_sum_violation.json"] {
        let text = std::fs::read_to_string(instance(name)).unwrap();
        assert_eq!(RawInstance::from_json(&text).unwrap().to_json(), text, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn instance_round_trip(seed in any::<u64>(), half in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tri, a, _) = generate::random_admissible(2 * half, &mut rng);
        let raw = tri.to_raw().with_angles(&a);
        let text = raw.to_json();
        let back = RawInstance::from_json(&text).unwrap();
        prop_assert_eq!(&back, &raw);
        prop_assert_eq!(back.to_json(), text);
    }
}
