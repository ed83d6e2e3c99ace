use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ecm::cli::{RunManifest, MANIFEST};
use ecm::geometry::{benchmark_contour, read_contour_csv, regular_polygon, write_contour_csv, write_stl_ascii, write_stl_binary, ContourLayer, TriangleMesh};

fn ecm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecm"))
        .args(args)
        .env("ECM_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != MANIFEST)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

/// A small scenario so that analyses finish quickly.
fn small_scenario(dir: &Path, n: usize) -> PathBuf {
    let path = dir.join("scenario.json");
    let text = format!(
        r#"{{"scenario": {{"kind": "amplitude", "safe": [0.0, 0.05], "outlying": [0.1, 0.25]}},
            "n_samples": {n}, "seed": 5, "shape": {{"benchmark": {{"z": 1.0}}}}, "grid_size": 41}}"#
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn generate_writes_the_requested_grid_and_rereads_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = ecm(&["generate", "--shape", "benchmark", "--z", "1.0", "--grid", "1024", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2 + 1024);
    assert_eq!(read_contour_csv(&out).unwrap(), benchmark_contour(1.0, 1024).unwrap());
}

#[test]
fn generate_at_z_zero_collapses_the_scaled_sides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z0.csv");
    assert_eq!(code(&ecm(&["generate", "--z", "0", "--grid", "201", "--out", s(&out)])), 0);
    let c = read_contour_csv(&out).unwrap();
    // The two sides on x = 0.25√z lie on the axis, the corners included.
    let t: Vec<f64> = (0..201).map(|i| i as f64 / 200.0).collect();
    let on_side = |t: f64| (0.75..=0.775).contains(&t) || t >= 0.975 || t == 0.0;
    let mut checked = 0;
    for (i, &ti) in t.iter().enumerate() {
        if on_side(ti) {
            assert_eq!(c.x.values()[i], 0.0, "t = {ti}");
            checked += 1;
        }
    }
    assert!(checked >= 10);
    assert!(c.x.values().iter().all(|&x| x >= 0.0));
}

#[test]
fn generate_rejects_bad_z() {
    let dir = tempfile::tempdir().unwrap();
    let o = ecm(&["generate", "--z", "1.5", "--out", s(&dir.path().join("a.csv"))]);
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("a.csv").exists());
}

#[test]
fn slicing_a_cube_gives_the_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let stl = dir.path().join("cube.stl");
    let cube = TriangleMesh::extrude(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.0, 1.0).unwrap();
    fs::write(&stl, write_stl_ascii(&cube, "cube")).unwrap();
    let out = dir.path().join("mid.csv");
    let o = ecm(&["slice", s(&stl), "--z", "0.5", "--grid", "9", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = read_contour_csv(&out).unwrap();
    assert_eq!(c.z, 0.5);
    assert_eq!(c.x.values(), &[0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0, 0.0, 0.0]);
    assert_eq!(c.y.values(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0]);
}

#[test]
fn cylinder_slice_lies_on_the_generator_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let stl = dir.path().join("cyl.stl");
    let polygon = regular_polygon(2.0, 48);
    fs::write(&stl, write_stl_binary(&TriangleMesh::extrude(&polygon, -1.0, 1.0).unwrap())).unwrap();
    let out = dir.path().join("c.csv");
    assert_eq!(code(&ecm(&["slice", s(&stl), "--z", "0.25", "--grid", "300", "--out", s(&out)])), 0);
    let c = read_contour_csv(&out).unwrap();
    let apothem = 2.0 * (std::f64::consts::PI / 48.0).cos();
    for p in c.points() {
        let r = p[0].hypot(p[1]);
        // STL stores single precision.
        assert!(r <= 2.0 + 1e-6 && r >= apothem - 1e-6, "radius {r}");
    }
}

#[test]
fn slice_with_all_loops_writes_each_loop() {
    let dir = tempfile::tempdir().unwrap();
    let stl = dir.path().join("tube.stl");
    fs::write(&stl, write_stl_binary(&TriangleMesh::tube(1.0, 2.0, 32, 0.0, 1.0).unwrap())).unwrap();
    let out = dir.path().join("t.csv");
    let o = ecm(&["slice", s(&stl), "--z", "0.5", "--grid", "64", "--out", s(&out), "--all-loops"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("t_loop0.csv").exists());
    assert!(dir.path().join("t_loop1.csv").exists());
}

#[test]
fn missing_mesh_exits_2() {
    let o = ecm(&["slice", "/nonexistent/part.stl", "--z", "1", "--out", "/tmp/never.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("part.stl"));
}

#[test]
fn open_mesh_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cube = TriangleMesh::extrude(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.0, 1.0).unwrap();
    // Drop one wall triangle that the mid plane crosses.
    let wall = cube
        .triangles
        .iter()
        .position(|t| {
            let zs: Vec<f64> = t.iter().map(|&v| cube.vertices[v][2]).collect();
            zs.iter().any(|&z| z < 0.5) && zs.iter().any(|&z| z > 0.5)
        })
        .unwrap();
    cube.triangles.remove(wall);
    let stl = dir.path().join("open.stl");
    fs::write(&stl, write_stl_binary(&cube)).unwrap();
    let o = ecm(&["slice", s(&stl), "--z", "0.5", "--out", s(&dir.path().join("o.csv"))]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

fn circle_file(dir: &Path, n: usize) -> PathBuf {
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut x: Vec<f64> = t.iter().map(|t| 3.0 + 2.0 * (TAU * t).cos()).collect();
    let mut y: Vec<f64> = t.iter().map(|t| 2.0 * (TAU * t).sin()).collect();
    x[n - 1] = x[0];
    y[n - 1] = y[0];
    let path = dir.join("circle.csv");
    fs::write(&path, write_contour_csv(&ContourLayer::from_xy(0.2, x, y, true).unwrap())).unwrap();
    path
}

#[test]
fn fit_of_a_circle_with_one_harmonic_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle_file(dir.path(), 257);
    let out = dir.path().join("m.json");
    let o = ecm(&["fit", s(&input), "-k", "1", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rms: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("rms residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rms <= 1e-9, "{rms}");
}

/// Evaluates the stored coefficients directly.
fn series(c0: f64, cos: &[f64], sin: &[f64], t: f64) -> f64 {
    c0 + (0..cos.len()).map(|k| {
        let w = TAU * (k + 1) as f64 * t;
        cos[k] * w.cos() + sin[k] * w.sin()
    }).sum::<f64>()
}

#[test]
fn printed_residual_matches_recomputation_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let contour = dir.path().join("b.csv");
    assert_eq!(code(&ecm(&["generate", "--grid", "512", "--out", s(&contour)])), 0);
    let out = dir.path().join("m.json");
    let o = ecm(&["fit", s(&contour), "--k", "20", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let printed: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("rms residual = ")).unwrap().parse().unwrap();

    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(model["K"], 20);
    let v = |k: &str| -> Vec<f64> { model[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    let (a, b, c, d) = (v("a"), v("b"), v("c"), v("d"));
    let (a0, c0) = (model["a0"].as_f64().unwrap(), model["c0"].as_f64().unwrap());
    let layer = read_contour_csv(&contour).unwrap();
    let m = layer.grid_size() - 1;
    let ss: f64 = (0..m)
        .map(|i| {
            let t = i as f64 / m as f64;
            (series(a0, &a, &b, t) - layer.x.values()[i]).powi(2) + (series(c0, &c, &d, t) - layer.y.values()[i]).powi(2)
        })
        .sum();
    let recomputed = (ss / m as f64).sqrt();
    assert!((printed - recomputed).abs() <= 1e-12 * recomputed.max(1.0), "{printed} vs {recomputed}");
}

#[test]
fn fit_presets_use_their_basis_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let contour = dir.path().join("b.csv");
    assert_eq!(code(&ecm(&["generate", "--grid", "1024", "--out", s(&contour)])), 0);
    for (name, basis) in [("gear", 81), ("wheel", 149), ("logo", 21), ("tube", 51)] {
        let out = dir.path().join(format!("{name}.json"));
        let o = ecm(&["fit", s(&contour), "--preset", name, "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(2 * model["K"].as_u64().unwrap() + 1, basis);
    }
}

#[test]
fn underdetermined_fit_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle_file(dir.path(), 9);
    let o = ecm(&["fit", s(&input), "-k", "10", "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn fitted_model_feeds_generate() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle_file(dir.path(), 129);
    let model = dir.path().join("m.json");
    assert_eq!(code(&ecm(&["fit", s(&input), "-k", "3", "--out", s(&model)])), 0);
    let out = dir.path().join("g.csv");
    assert_eq!(code(&ecm(&["generate", "--model", s(&model), "--grid", "129", "--out", s(&out)])), 0);
    let (a, b) = (read_contour_csv(&input).unwrap(), read_contour_csv(&out).unwrap());
    assert_eq!(b.z, 0.2);
    for (p, q) in a.points().iter().zip(b.points()) {
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
    }
}

#[test]
fn simulate_is_reproducible_and_writes_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = ecm(&["simulate", "--preset", "benchmark-sim1", "--seed", "42", "--out", s(d)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa, fb);
    let contours = fa.keys().filter(|k| k.starts_with("sample_")).count();
    assert_eq!(contours, 150);
    let truth = String::from_utf8(fa["ground_truth.csv"].clone()).unwrap();
    let outliers = truth.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(outliers, 2);

    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(a.join(MANIFEST)).unwrap()).unwrap();
    assert_eq!(manifest.seed, Some(42));
    assert_eq!(manifest.outputs.len(), fa.len());
    for f in &manifest.outputs {
        let name = Path::new(&f.path).file_name().unwrap().to_string_lossy().into_owned();
        assert_eq!(f.sha256, ecm::cli::sha256_hex(&fa[&name]), "{name}");
    }
}

#[test]
fn bad_scenario_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = small_scenario(dir.path(), 3);
    let o = ecm(&["simulate", "--config", s(&path), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("n_samples"), "{}", stderr(&o));

    fs::write(&path, "{\n  \"scenario\": \n").unwrap();
    let o = ecm(&["simulate", "--config", s(&path), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn analyze_and_render_a_small_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scenario(dir.path(), 16);
    let data = dir.path().join("data");
    assert_eq!(code(&ecm(&["simulate", "--config", s(&cfg), "--out", s(&data)])), 0);
    let out = dir.path().join("out");
    let o = ecm(&["analyze", s(&data), "--lambda", "0.5", "--whisker-factor", "1.5", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("16 samples"));

    for coord in ["x", "y"] {
        let csv = fs::read_to_string(out.join(format!("report_{coord}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 1 + 16);
    }
    let merged = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(merged.lines().next().unwrap(), "index,file,x_outlier,y_outlier,outlier");
    for line in merged.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[4] == "1", f[2] == "1" || f[3] == "1");
    }

    let svgs: Vec<String> = files(&out).into_keys().filter(|k| k.ends_with(".svg")).collect();
    assert_eq!(svgs.len(), 6);
    let before = files(&out);
    for name in &svgs {
        let text = String::from_utf8(before[name].clone()).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }

    let o = ecm(&["render", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(files(&out), before);
    let again = dir.path().join("again");
    fs::create_dir(&again).unwrap();
    assert_eq!(code(&ecm(&["render", s(&out), "--out", s(&again)])), 0);
    for name in &svgs {
        assert_eq!(fs::read(again.join(name)).unwrap(), before[name], "{name}");
    }
}

#[test]
fn identical_contours_have_no_outliers() {
    let dir = tempfile::tempdir().unwrap();
    let text = write_contour_csv(&benchmark_contour(0.7, 65).unwrap());
    let paths: Vec<PathBuf> = (0..6).map(|i| dir.path().join(format!("c{i}.csv"))).collect();
    for p in &paths {
        fs::write(p, &text).unwrap();
    }
    let out = dir.path().join("out");
    let mut args = vec!["analyze"];
    args.extend(paths.iter().map(|p| s(p)));
    args.extend(["--out", s(&out)]);
    let o = ecm(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("outliers: []"), "{}", stdout(&o));
}

#[test]
fn grid_mismatch_exits_5_and_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![];
    for i in 0..5 {
        let n = if i == 3 { 33 } else { 65 };
        let p = dir.path().join(format!("c{i}.csv"));
        fs::write(&p, write_contour_csv(&benchmark_contour(0.1 * i as f64, n).unwrap())).unwrap();
        args.push(p);
    }
    let mut argv = vec!["analyze"];
    argv.extend(args.iter().map(|p| s(p)));
    let out = dir.path().join("out");
    argv.extend(["--out", s(&out)]);
    let o = ecm(&argv);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("c3.csv"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn too_few_contours_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    fs::write(&p, write_contour_csv(&benchmark_contour(1.0, 33).unwrap())).unwrap();
    let o = ecm(&["analyze", s(&p), s(&p), s(&p), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&o), 1);
}

#[test]
fn render_without_reports_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ecm(&["render", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("report_x.json"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ecm"))
        .args(["generate", "--out", s(&dir.path().join("a.csv"))])
        .env("ECM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("ECM_THREADS"));
}
