use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use floorplan_core::heatmap::{blank_stack, decode_stack, encode_stack};
use floorplan_core::model::load;
use floorplan_core::pointcloud::{parse_cloud, FloorplanDomain};
use tempfile::TempDir;

fn floorplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floorplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = floorplan(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_one(dir: &Path, seed: u64) -> PathBuf {
    let out = dir.join("synth");
    ok(&["synth", "--seed", &seed.to_string(), "--density", "50", "--out", s(&out)]);
    out
}

fn files_with(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn synth_writes_a_triple_per_seed() {
    let t = TempDir::new().unwrap();
    let out = synth_one(t.path(), 0);
    assert!(out.join("plan_00000.json").is_file());
    assert!(out.join("scan_00000.ply").is_file());
    assert!(out.join("heatmap_00000.fhm").is_file());
    assert!(out.join("manifest.json").is_file());

    let many = t.path().join("many");
    ok(&["synth", "--seeds", "10", "--density", "5", "--jobs", "2", "--out", s(&many)]);
    assert_eq!(files_with(&many, "ply").len(), 10);
    assert_eq!(files_with(&many, "fhm").len(), 10);
    // 10 plans plus the manifest
    assert_eq!(files_with(&many, "json").len(), 11);
}

#[test]
fn malformed_config_names_the_key() {
    let t = TempDir::new().unwrap();
    let cfg = t.path().join("bad.toml");
    fs::write(&cfg, "room_count_mean = 5.0\nroom_cuont_std = 1.0\n").unwrap();
    let out = floorplan(&["synth", "--config", s(&cfg), "--out", s(&t.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("room_cuont_std"));

    fs::write(&cfg, "[noise]\ndropout_prob = 1.5\n").unwrap();
    let out = floorplan(&["synth", "--config", s(&cfg), "--out", s(&t.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dropout_prob"));

    let json = t.path().join("good.json");
    fs::write(&json, r#"{"seed": 4, "noise": {"jitter_px": 1.0}}"#).unwrap();
    ok(&["synth", "--config", s(&json), "--density", "1", "--out", s(&t.path().join("j"))]);
    assert!(t.path().join("j/plan_00004.json").is_file());
}

#[test]
fn missing_config_is_an_io_error() {
    let t = TempDir::new().unwrap();
    let out = floorplan(&["synth", "--config", "/nonexistent/c.toml", "--out", s(t.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_ply_is_rejected() {
    let t = TempDir::new().unwrap();
    let ply = t.path().join("empty.ply");
    fs::write(
        &ply,
        "ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\nproperty float z\nend_header\n",
    )
    .unwrap();
    let out = floorplan(&["project", s(&ply), "--out", s(&t.path().join("d.fhm"))]);
    assert!(!out.status.success());
    assert!(!t.path().join("d.fhm").exists());
}

#[test]
fn ply_parse_error_reports_the_line() {
    let t = TempDir::new().unwrap();
    let ply = t.path().join("bad.ply");
    fs::write(
        &ply,
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 two 3\n",
    )
    .unwrap();
    let out = floorplan(&["project", s(&ply), "--out", s(&t.path().join("d.fhm"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 8"));
}

/// Counts points by binning against the sidecar domain directly.
fn in_domain(points: &[[f64; 3]], d: &FloorplanDomain) -> usize {
    let n = d.resolution as f64;
    points
        .iter()
        .filter(|p| {
            let gx = ((p[0] - d.origin[0]) / d.scale).floor();
            let gy = ((p[1] - d.origin[1]) / d.scale).floor();
            (0.0..n).contains(&gx) && (0.0..n).contains(&gy)
        })
        .count()
}

#[test]
fn density_raster_sums_to_in_domain_count() {
    let t = TempDir::new().unwrap();
    let dir = synth_one(t.path(), 3);
    let ply = dir.join("scan_00003.ply");
    let out = t.path().join("density.fhm");
    ok(&["project", s(&ply), "--out", s(&out)]);

    let stack = decode_stack(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(stack.channels(), 1);
    assert_eq!(stack.names()[0], "density");
    let domain: FloorplanDomain =
        serde_json::from_slice(&fs::read(t.path().join("density.domain.json")).unwrap()).unwrap();
    let cloud = parse_cloud(&fs::read_to_string(&ply).unwrap()).unwrap();
    let expected = in_domain(cloud.positions(), &domain);
    let sum: f64 = stack.plane(0).iter().map(|&v| v as f64).sum();
    assert_eq!(sum, expected as f64);
    assert!(expected as f64 > 0.9 * cloud.len() as f64);
}

#[test]
fn subsample_is_applied_before_projection() {
    let t = TempDir::new().unwrap();
    let dir = synth_one(t.path(), 1);
    let ply = dir.join("scan_00001.ply");
    let out = t.path().join("d.fhm");
    ok(&["project", s(&ply), "--out", s(&out), "--subsample", "500"]);
    let stack = decode_stack(&fs::read(&out).unwrap()).unwrap();
    let sum: f64 = stack.plane(0).iter().map(|&v| v as f64).sum();
    assert!(sum <= 500.0 && sum > 400.0, "{sum}");
}

#[test]
fn ground_truth_stack_round_trips() {
    let t = TempDir::new().unwrap();
    let dir = t.path();
    let src = synth_one(dir, 7).join("plan_00007.json");
    let fhm = dir.join("gt.fhm");
    let svg = dir.join("gt.svg");
    ok(&["render", s(&src), "--out", s(&svg), "--heatmap", s(&fhm)]);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let plan = dir.join("rec.json");
    let lp = dir.join("rec.lp");
    ok(&["reconstruct", s(&fhm), "--out", s(&plan), "--dump-ip", s(&lp)]);
    let a = load(&fs::read(&src).unwrap()).unwrap();
    let b = load(&fs::read(&plan).unwrap()).unwrap();
    assert_eq!(a.corners.len(), b.corners.len());
    assert_eq!(a.walls.len(), b.walls.len());
    assert_eq!(a.rooms.len(), b.rooms.len());
    assert_eq!(a.openings.len(), b.openings.len());
    assert_eq!(a.icons.len(), b.icons.len());

    let lp = fs::read_to_string(&lp).unwrap();
    assert!(lp.contains("Maximize"));
    assert!(lp.contains("Subject To"));
    assert!(lp.contains("Binary"));
    assert!(lp.trim_end().ends_with("End"));

    let report = ok(&["evaluate", s(&plan), s(&src)]);
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.contains("line distance: 0.000 px"), "{text}");
}

#[test]
fn zero_stack_gives_an_empty_plan() {
    let t = TempDir::new().unwrap();
    let fhm = t.path().join("zero.fhm");
    fs::write(&fhm, encode_stack(&blank_stack(256))).unwrap();
    let plan = t.path().join("p.json");
    ok(&["reconstruct", s(&fhm), "--out", s(&plan)]);
    let p = load(&fs::read(&plan).unwrap()).unwrap();
    assert!(p.corners.is_empty() && p.walls.is_empty() && p.rooms.is_empty());
}

#[test]
fn corrupt_header_is_rejected() {
    let t = TempDir::new().unwrap();
    let fhm = t.path().join("bad.fhm");
    let mut bytes = encode_stack(&blank_stack(8));
    bytes[0] = b'X';
    fs::write(&fhm, bytes).unwrap();
    let out = floorplan(&["reconstruct", s(&fhm), "--out", s(&t.path().join("p.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!t.path().join("p.json").exists());
}

#[test]
fn identical_plans_score_perfectly() {
    let t = TempDir::new().unwrap();
    let plan = synth_one(t.path(), 2).join("plan_00002.json");
    let out = ok(&["evaluate", s(&plan), s(&plan)]);
    let text = String::from_utf8(out.stdout).unwrap();
    let (json, table) = text.split_at(text.rfind("}\n").expect("json precedes table") + 2);
    let report: serde_json::Value = serde_json::from_str(json).unwrap();
    for key in ["corner", "opening", "icon", "room"] {
        assert_eq!(report[key]["precision"], 1.0, "{key}");
        assert_eq!(report[key]["recall"], 1.0, "{key}");
    }
    assert_eq!(report["relationship"], 1.0);
    assert_eq!(report["line_distance"], 0.0);

    let header: Vec<&str> = table.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["wall", "door", "icon", "room", "relationship"]);
}

#[test]
fn missing_ground_truth_exits_2() {
    let t = TempDir::new().unwrap();
    let plan = synth_one(t.path(), 2).join("plan_00002.json");
    let out = floorplan(&["evaluate", s(&plan), "/nonexistent/gt.json"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = t.path().join("bad.json");
    fs::write(&bad, "{\"corners\": 3}").unwrap();
    let out = floorplan(&["evaluate", s(&plan), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(floorplan(&[]).status.code(), Some(2));
    assert_eq!(floorplan(&["reconstruct"]).status.code(), Some(2));
    assert_eq!(floorplan(&["bogus"]).status.code(), Some(2));
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with("manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn outputs_are_byte_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for t in [&a, &b] {
        let out = t.path().join("s");
        ok(&["synth", "--seed", "11", "--seeds", "3", "--density", "20", "--out", s(&out)]);
        let ply = out.join("scan_00012.ply");
        ok(&["project", s(&ply), "--out", s(&out.join("d.fhm")), "--subsample", "1000"]);
        let fhm = out.join("heatmap_00012.fhm");
        ok(&["reconstruct", s(&fhm), "--out", s(&out.join("r.json")), "--svg", s(&out.join("r.svg"))]);
        ok(&["extract", s(&fhm), "--out", s(&out.join("c.json"))]);
    }
    let (sa, sb) = (snapshot(&a.path().join("s")), snapshot(&b.path().join("s")));
    assert_eq!(sa.len(), 14);
    assert_eq!(sa, sb);
}

#[test]
fn manifest_records_the_run() {
    let t = TempDir::new().unwrap();
    let dir = synth_one(t.path(), 5);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "synth");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);

    let again = t.path().join("again");
    ok(&["synth", "--seed", "5", "--density", "50", "--out", s(&again)]);
    let m2: serde_json::Value = serde_json::from_slice(&fs::read(again.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config_hash"], m2["config_hash"]);

    let plan = dir.join("plan_00005.json");
    let svg = t.path().join("p.svg");
    ok(&["render", s(&plan), "--out", s(&svg)]);
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(t.path().join("p.svg.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "render");
    assert_eq!(m["inputs"][0], s(&plan));
}
