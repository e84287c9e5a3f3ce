use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lgbeam::analytic::eval_lg_mode;
use lgbeam::{fidelity, BeamParams, Complex64, ComplexField, Grid, ModeIndex};
use lgbeam_cli::fieldfile::{manifest_path, parse_manifest, read_field, write_field};
use lgbeam_cli::render::decode_pgm;
use tempfile::TempDir;

fn lgbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgbeam")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let tag = format!("{key}=");
    let start = text.find(&tag).unwrap_or_else(|| panic!("{key} missing in {text}")) + tag.len();
    let rest = &text[start..];
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    rest[..end].parse().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn eval_to(dir: &TempDir, name: &str, l: &str, p: &str, extra: &[&str]) -> (PathBuf, Output) {
    let path = dir.path().join(name);
    let mut args = vec!["eval", "--l", l, "--p", p, "--out", s(&path)];
    args.extend_from_slice(extra);
    for (flag, default) in [("--n", "128"), ("--extent", "8")] {
        if !extra.contains(&flag) {
            args.extend([flag, default]);
        }
    }
    let out = lgbeam(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    (path, out)
}

#[test]
fn eval_writes_file_and_reports_norm_and_oam() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.lgf");
    let out = lgbeam(&[
        "eval", "--l", "1", "--p", "0", "--k", "2", "--b", "1", "--z", "0", "--n", "256", "--extent", "8", "--out",
        s(&path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((value(&text, "norm") - 1.0).abs() < 1e-6, "{text}");
    assert!((value(&text, "oam") - 1.0).abs() < 1e-6, "{text}");

    let field = read_field(&path).unwrap();
    assert_eq!(field.grid().n(), 256);
    let manifest = std::fs::read_to_string(manifest_path(&path)).unwrap();
    let kv = parse_manifest(&manifest);
    assert!(kv.contains(&("format".into(), "LGF1".into())));
    assert!(kv.contains(&("n".into(), "256".into())));
    assert!(kv.contains(&("layout".into(), "row-major y,x".into())));

    let (_, fundamental) = eval_to(&dir, "f.lgf", "0", "0", &[]);
    assert!(value(&stdout(&fundamental), "oam").abs() < 1e-9);
}

#[test]
fn synthesize_matches_analytic_mode() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.lgf");
    let out = lgbeam(&["synthesize", "--l", "-2", "--p", "1", "--n", "128", "--out", s(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(value(&text, "fidelity") >= 0.999, "{text}");
    assert!((value(&text, "oam") + 2.0).abs() < 1e-6);
}

#[test]
fn zero_step_is_identity() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "2", "1", &[]);
    let dst = dir.path().join("b.lgf");
    let out = lgbeam(&["propagate", "--in", s(&src), "--dz", "0", "--out", s(&dst)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (a, b) = (read_field(&src).unwrap(), read_field(&dst).unwrap());
    assert!((fidelity(&a, &b).unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn fundamental_on_axis_amplitude_drops_by_sqrt2_at_rayleigh_range() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "0", "0", &["--extent", "12", "--n", "256"]);
    let dst = dir.path().join("b.lgf");
    let out = lgbeam(&["propagate", "--in", s(&src), "--dz", "0.25", "--steps", "4", "--out", s(&dst)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((value(&text, "on_axis_ratio") - FRAC_1_SQRT_2).abs() <= 1e-4, "{text}");
    assert!((value(&text, "norm_before") - value(&text, "norm_after")).abs() <= 1e-12);
    assert_eq!(read_field(&dst).unwrap().z(), 1.0);
}

#[test]
fn guard_trip_exits_4_with_hint() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "0", "0", &["--extent", "2.5", "--n", "64"]);
    let dst = dir.path().join("b.lgf");
    let out = lgbeam(&["propagate", "--in", s(&src), "--dz", "3", "--padding", "1", "--out", s(&dst)]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("hint:"));
    assert!(!dst.exists());
}

#[test]
fn decompose_single_mode() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "1", "0", &[]);
    let out = lgbeam(&["decompose", "--in", s(&src), "--lmax", "2", "--pmax", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().find(|l| l.split_whitespace().take(2).eq(["1", "0"])).unwrap();
    let power: f64 = row.split_whitespace().nth(4).unwrap().parse().unwrap();
    assert!(power >= 0.999, "{text}");
    assert!(text.contains("oam spectrum"));
}

#[test]
fn decompose_superposition_to_csv() {
    let dir = TempDir::new().unwrap();
    let params = BeamParams::default();
    let grid = Grid::new(128, 8.0).unwrap();
    let a = eval_lg_mode(ModeIndex::from_parts(-1, 2), &params, &grid, 0.0).unwrap();
    let b = eval_lg_mode(ModeIndex::from_parts(2, 0), &params, &grid, 0.0).unwrap();
    let (ca, cb) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8));
    let f = a.scale(ca).axpy(cb, &b).unwrap();
    let src = dir.path().join("sup.lgf");
    write_field(&src, &f).unwrap();
    let csv_path = dir.path().join("spec.csv");

    let out = lgbeam(&["decompose", "--in", s(&src), "--lmax", "3", "--pmax", "3", "--csv", s(&csv_path)]);
    assert!(out.status.success(), "{}", stderr(&out));

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["l", "p", "re", "im", "power"]);
    let rows: Vec<(i32, u32, f64, f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 28);
    let significant: Vec<_> = rows.iter().filter(|r| r.4 > 1e-6).collect();
    assert_eq!(significant.len(), 2);
    for &&(l, p, re, im, power) in &significant {
        let expected = match (l, p) {
            (-1, 2) => ca,
            (2, 0) => cb,
            other => panic!("unexpected row {other:?}"),
        };
        assert!((power - expected.norm_sqr()).abs() <= 1e-6);
        assert!((Complex64::new(re, im) - expected).norm() <= 1e-6);
    }
}

fn render(dir: &TempDir, src: &Path, what: &str) -> (usize, Vec<u16>) {
    let img = dir.path().join(format!("{what}.pgm"));
    let out = lgbeam(&["render", "--in", s(src), "--what", what, "--out", s(&img)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (w, h, px) = decode_pgm(&std::fs::read(&img).unwrap()).unwrap();
    assert_eq!(w, h);
    (w, px)
}

#[test]
fn render_ring_has_dark_centre() {
    let dir = TempDir::new().unwrap();
    // odd n puts a sample exactly on the axis
    let (src, _) = eval_to(&dir, "a.lgf", "1", "0", &["--n", "129"]);
    let (n, px) = render(&dir, &src, "intensity");
    let c = n / 2;
    assert_eq!(px[c * n + c], 0);
    assert_eq!(*px.iter().max().unwrap(), 65535);
    // peak on the ring r = w0/sqrt2, about 5.7 pixels out at this spacing
    let spacing = 16.0 / n as f64;
    let ring = (FRAC_1_SQRT_2 / spacing).round() as usize;
    for (dx, dy) in [(ring as i64, 0), (-(ring as i64), 0), (0, ring as i64), (0, -(ring as i64))] {
        let v = px[(c as i64 + dy) as usize * n + (c as i64 + dx) as usize];
        assert!(v > 60000, "{v}");
    }
}

#[test]
fn fundamental_phase_is_flat_at_waist() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "0", "0", &[]);
    let (_, px) = render(&dir, &src, "phase");
    assert!(px.iter().all(|&v| v == px[0]));
}

#[test]
fn second_order_vortex_winds_twice() {
    let dir = TempDir::new().unwrap();
    let (src, _) = eval_to(&dir, "a.lgf", "2", "0", &[]);
    let (n, px) = render(&dir, &src, "phase");
    let c = n as f64 / 2.0;
    for radius in [6.0, 10.0, 20.0] {
        let samples = 720;
        let at = |i: usize| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            // image rows run from top (largest y) down
            let col = (c + radius * t.cos()).floor() as usize;
            let row = (c - radius * t.sin()).floor() as usize;
            px[row * n + col] as f64 / 65535.0
        };
        let mut winding = 0.0;
        for i in 0..samples {
            let mut d = at((i + 1) % samples) - at(i);
            d -= d.round();
            winding += d;
        }
        assert!((winding - 2.0).abs() < 1e-9, "radius {radius}: {winding}");
    }
}

#[test]
fn field_file_round_trip_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let grid = Grid::new(5, 0.7).unwrap();
    let f = ComplexField::from_fn(grid, -0.3, BeamParams::new(3.1, 0.45).unwrap(), |x, y| {
        Complex64::new((x * 7.0).sin() / 3.0, y.powi(3) - 1e-300)
    })
    .unwrap();
    let path = dir.path().join("x.lgf");
    write_field(&path, &f).unwrap();
    let back = read_field(&path).unwrap();
    assert_eq!(back, f);
    for (a, b) in f.samples().iter().zip(back.samples()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.lgf");
    let out_path = dir.path().join("o.lgf");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["eval", "--l", "0", "--p", "0"], 2),
        (vec!["eval", "--l", "0", "--p", "-1", "--out", s(&out_path)], 2),
        (vec!["eval", "--l", "0", "--p", "0", "--b", "-1", "--out", s(&out_path)], 2),
        (vec!["eval", "--l", "0", "--p", "0", "--out", "/nonexistent-dir/x.lgf"], 3),
        (vec!["propagate", "--in", s(&missing), "--dz", "1", "--out", s(&out_path)], 3),
        (vec!["decompose", "--in", s(&missing), "--lmax", "-1", "--pmax", "2"], 2),
        (vec!["decompose", "--in", s(&missing), "--lmax", "1", "--pmax", "-3"], 2),
        (vec!["render", "--in", s(&missing), "--what", "phase", "--out", "x.png"], 2),
        (vec!["render", "--in", s(&missing), "--what", "colour", "--out", "x.pgm"], 2),
        (vec!["verify", "nonsense"], 2),
        (vec!["verify", "orthonormality", "--n", "32", "--extent", "1.5"], 1),
        (vec!["--help"], 0),
    ];
    for (args, code) in cases {
        let out = lgbeam(&args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", stderr(&out));
        if code != 0 {
            assert!(!stderr(&out).is_empty());
        }
    }
    let garbage = dir.path().join("junk.lgf");
    std::fs::write(&garbage, b"LGF2 not a field").unwrap();
    let out = lgbeam(&["render", "--in", s(&garbage), "--what", "phase", "--out", s(&dir.path().join("j.pgm"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_output_is_deterministic() {
    let args = ["verify", "index-map", "--n", "96", "--lmax", "2", "--pmax", "1"];
    let first = lgbeam(&args);
    let second = lgbeam(&args);
    assert!(first.status.success(), "{}", stdout(&first));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.contains("(l+p)/2"));
    assert!(text.lines().any(|l| l.ends_with("PASS")));
}
