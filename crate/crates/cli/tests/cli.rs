//! End-to-end runs of the `lorentz-metrics` binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lorentz-metrics"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const DISTANCE: &str = r#"{
    "version": 1,
    "experiment": "distance",
    "domain": {"special": {"type": "diamond", "a": [-1.0, 0.0], "b": [1.0, 0.0]}},
    "pairs": {"pairs": [[[0.0, -0.2], [0.1, 0.4]], [[-0.3, 0.0], [0.2, 0.1]]]},
    "mesh": {"k": 32},
    "outputs": {"csv": "rows.csv", "svg": "scene.svg"}
}"#;

fn values_without_wall_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
        .collect()
}

#[test]
fn distance_writes_bracketing_rows_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", DISTANCE);
    let out = dir.path().join("out");
    let st = bin().args(["distance", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,domain,metric,kind,x,y,z,w,value,mesh,seed,wall_ms"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for pair in rows.chunks(3) {
        let v = |kind: &str| -> f64 { pair.iter().find(|r| r[3] == kind).unwrap()[8].parse().unwrap() };
        assert!(v("lower") <= v("exact") + 1e-9);
        assert!(v("exact") <= v("upper") + 1e-9);
        assert!(pair.iter().all(|r| !r[9].is_empty() && r[6].is_empty() && r[7].is_empty()));
    }
    let svg = std::fs::read_to_string(out.join("scene.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn reruns_are_identical_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", DISTANCE);
    let mut runs = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let st = bin().args(["distance", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert!(st.success());
        runs.push(values_without_wall_time(&std::fs::read_to_string(out.join("rows.csv")).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn malformed_json_exits_two_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"version\": 1, \"experiment\": ");
    let out = dir.path().join("out");
    let st = bin().args(["distance", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_fields_and_wrong_subcommand_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let extra = DISTANCE.replacen("\"version\": 1,", "\"version\": 1, \"extra\": true,", 1);
    let cfg = write(dir.path(), "x.json", &extra);
    assert_eq!(bin().args(["distance", "--config"]).arg(&cfg).status().unwrap().code(), Some(2));
    let cfg = write(dir.path(), "d.json", DISTANCE);
    assert_eq!(bin().args(["compare", "--config"]).arg(&cfg).status().unwrap().code(), Some(2));
}

#[test]
fn invalid_domain_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = DISTANCE.replacen("\"b\": [1.0, 0.0]", "\"b\": [-2.0, 0.0]", 1);
    let cfg = write(dir.path(), "c.json", &text);
    let out = dir.path().join("out");
    let st = bin().args(["distance", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn degenerate_domain_exits_four_with_a_diagnostic_row() {
    // all of R^{1,1} contains complete lightlike lines, so its Markowitz pseudo-distance degenerates
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "version": 1,
        "experiment": "distance",
        "domain": {"graph": {"n": 1, "base": {"kind": "whole"}, "lower": {"kind": "infinite"}, "upper": {"kind": "infinite"},
                             "lipschitz_lower": 0.0, "lipschitz_upper": 0.0}},
        "pairs": {"pairs": [[[0.3, 0.0], [0.5, 0.1]]]},
        "metrics": ["markowitz_upper"],
        "mesh": {"k": 8},
        "outputs": {"csv": "rows.csv"}
    }"#;
    let cfg = write(dir.path(), "c.json", text);
    let out = dir.path().join("out");
    let st = bin().args(["distance", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(4));
    let csv = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.contains(",error,"), "{row}");
}

#[test]
fn hyperbolicity_on_the_slab_grows() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "version": 1,
        "experiment": "hyperbolicity",
        "domain": {"special": {"type": "spacelike_slab", "height": 0.5, "n": 2}},
        "points": {"scales": {"scales": [1.0, 2.0, 4.0, 8.0, 16.0], "per_scale": 16}},
        "mesh": {"k": 16},
        "sampler": {"quadruples": 100000},
        "outputs": {"csv": "h.csv"}
    }"#;
    let cfg = write(dir.path(), "c.json", text);
    let out = dir.path().join("out");
    let st = bin().args(["hyperbolicity", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("h.csv")).unwrap();
    let scales = csv.lines().filter(|l| l.contains("delta_hat@scale=")).count();
    assert_eq!(scales, 5);
    let verdict = csv.lines().find(|l| l.contains("growth_ratio:")).unwrap();
    assert!(verdict.contains("growth_ratio:growing"), "{verdict}");
    // per-scale rows carry the worst quadruple
    let first = csv.lines().find(|l| l.contains("delta_hat@scale=1,")).unwrap();
    let cols: Vec<&str> = first.split(',').collect();
    assert!(cols[4..8].iter().all(|c| c.split(';').count() == 3));
}

#[test]
fn acausality_reports_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "version": 1,
        "experiment": "acausality",
        "surface": {"function": {"kind": "cone", "center": [0.0, 0.0], "offset": 0.0, "slope": 0.25},
                    "lo": [-1.0, -1.0], "hi": [1.0, 1.0], "per_axis": 21},
        "outputs": {"csv": "a.csv"}
    }"#;
    let cfg = write(dir.path(), "c.json", text);
    let out = dir.path().join("out");
    let st = bin().args(["acausality", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("a.csv")).unwrap();
    let row = csv.lines().find(|l| l.contains("stably_acausal")).unwrap();
    let eps: f64 = row.split(',').nth(8).unwrap().parse().unwrap();
    assert!((eps - 3.0).abs() < 1e-6);
}

#[test]
fn thinness_rejects_slab_bigons_and_measures_cone_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "version": 1,
        "experiment": "thinness",
        "domain": {"special": {"type": "cone_future", "apex": [0.0, 0.0]}},
        "witnesses": [{"kind": "lightlike_boundary", "at": [0.0, 0.0], "dir": [1.0, 1.0]}],
        "levels": [0, 1],
        "mesh": {"k": 16},
        "outputs": {"csv": "t.csv"}
    }"#;
    let cfg = write(dir.path(), "c.json", text);
    let out = dir.path().join("out");
    let st = bin().args(["thinness", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    let csv = std::fs::read_to_string(out.join("t.csv")).unwrap();
    assert_eq!(st.code(), Some(0), "{csv}");
    assert_eq!(csv.lines().filter(|l| l.contains("triangle_defect")).count(), 2);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "version": 1,
        "experiment": "distance",
        "domain": {"special": {"type": "diamond", "a": [-1.0, 0.0], "b": [1.0, 0.0]}},
        "pairs": {"sample": {"count": 3}},
        "metrics": ["markowitz_exact"],
        "outputs": {"csv": "r.csv"}
    }"#
    .replace("markowitz_exact", "exact");
    let cfg = write(dir.path(), "c.json", &text);
    let read = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let st = bin()
            .args(["distance", "--seed", seed, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read_to_string(out.join("r.csv")).unwrap()
    };
    let (a, b) = (read("a", "1"), read("b", "2"));
    assert!(a.contains(",1,") && b.contains(",2,"));
    assert_ne!(values_without_wall_time(&a), values_without_wall_time(&b));
}
