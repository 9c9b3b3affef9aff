use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use radon_moments::io;

const UNIFORM: &str = r#"
output = "unused"

[phantom]
kind = "uniform"

[grids]
angles = 63
offsets = 513
margin = 1.1

[mollifier]
kernel = "bump"
epsilon = 0.05

[moments]
order = 4

[recon]
m = 2
n = 2
resolution = 16
"#;

const DISK_FBP: &str = r#"
output = "unused"

[phantom]
kind = "disk"

[grids]
angles = 90
offsets = 257
margin = 1.1
layout = "half"

[moments]
order = 2

[recon]
path = "fbp"
m = 1
n = 1
resolution = 32

[filter]
kind = "riesz"
"#;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }
}

fn radmom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radmom")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn assert_ok(o: &Output) {
    assert!(
        o.status.success(),
        "status {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status,
        stdout(o),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn printed_value(text: &str, label: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(label)).unwrap_or_else(|| panic!("no '{label}' in\n{text}"));
    line[label.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn project_preserves_mass_and_is_reproducible() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let a = w.path("a");
    let b = w.path("b");
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&a)]));
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&b)]));

    let sino = io::read_sinogram(&a.join("sinogram.csv")).unwrap();
    let dp = sino.offsets().spacing();
    for row in sino.rows() {
        let mass: f64 = row.iter().sum::<f64>() * dp;
        assert!((mass - 1.0).abs() < 1e-5, "row mass {mass}");
    }
    assert_eq!(
        fs::read(a.join("sinogram.csv")).unwrap(),
        fs::read(b.join("sinogram.csv")).unwrap()
    );
}

#[test]
fn narrow_offsets_are_a_coverage_error() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let o = radmom(&["project", "-c", s(&cfg), "--out", s(&w.path("o")), "--margin", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn moments_of_the_uniform_density() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let out = w.path("o");
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&out)]));
    let sino = out.join("sinogram.csv");
    let o = radmom(&["moments", "-c", s(&cfg), "--out", s(&out), "--sinogram", s(&sino)]);
    assert_ok(&o);
    assert!(stdout(&o).contains("condition estimate"));

    let table = io::read_moments(&out.join("moments.csv")).unwrap();
    assert_eq!(table.max_order(), 4);
    for a1 in 0..=4usize {
        for a2 in 0..=4 - a1 {
            let exact = 1.0 / ((a1 + 1) * (a2 + 1)) as f64;
            let got = table.get(a1, a2).unwrap();
            assert!((got - exact).abs() < 1e-5, "({a1},{a2}): {got} vs {exact}");
        }
    }
}

#[test]
fn order_zero_gives_a_single_entry() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let out = w.path("o");
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&out)]));
    let sino = out.join("sinogram.csv");
    assert_ok(&radmom(&[
        "moments", "-c", s(&cfg), "--out", s(&out), "--sinogram", s(&sino), "--order", "0",
    ]));
    let text = fs::read_to_string(out.join("moments.csv")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("a1")).collect();
    assert_eq!(data.len(), 1);
    assert!(data[0].starts_with("0,0,"));
}

#[test]
fn mollified_data_without_a_mollifier_is_misuse() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let out = w.path("o");
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&out)]));
    let sino = out.join("sinogram.csv");
    let o = radmom(&[
        "moments", "-c", s(&cfg), "--out", s(&out), "--sinogram", s(&sino), "--no-mollifier",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_files_are_format_errors() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let bad = w.path("bad.csv");
    fs::write(&bad, "# sinogram kind=raw angles=three\n1,2,3\n").unwrap();
    let o = radmom(&["moments", "-c", s(&cfg), "--out", s(&w.path("o")), "--sinogram", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&bad, "# moments K=1\na1,a2,value\n0,0,1\n").unwrap();
    let o = radmom(&["reconstruct", "-c", s(&cfg), "--out", s(&w.path("o")), "--moments", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_config_is_rejected() {
    let w = Workspace::new();
    let cfg = w.config("bad.toml", &UNIFORM.replace("[recon]", "[recon]\nbogus = 1"));
    let o = radmom(&["project", "-c", s(&cfg), "--out", s(&w.path("o"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconstruct_needs_enough_moments() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let moments = w.path("m.csv");
    fs::write(&moments, "# moments K=1\na1,a2,value\n0,0,1\n0,1,0.5\n1,0,0.5\n").unwrap();
    let o = radmom(&["reconstruct", "-c", s(&cfg), "--out", s(&w.path("o")), "--moments", s(&moments)]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn zero_moments_give_a_zero_image() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let moments = w.path("m.csv");
    let mut text = String::from("# moments K=4\na1,a2,value\n");
    for k in 0..=4usize {
        for a1 in (0..=k).rev() {
            text.push_str(&format!("{a1},{},0\n", k - a1));
        }
    }
    fs::write(&moments, text).unwrap();
    let out = w.path("o");
    assert_ok(&radmom(&["reconstruct", "-c", s(&cfg), "--out", s(&out), "--moments", s(&moments)]));
    let grid = io::read_recon_csv(&out.join("recon.csv")).unwrap();
    assert!(grid.values().iter().all(|&v| v == 0.0));
}

#[test]
fn moment_path_reports_error_within_bound() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let o = radmom(&["pipeline", "-c", s(&cfg), "--out", s(&w.path("o"))]);
    assert_ok(&o);
    let text = stdout(&o);
    let sup = printed_value(&text, "sup error:");
    let bound = printed_value(&text, "error bound:");
    assert!(sup <= bound);
    assert!(text.contains("check sup error ≤ bound: PASS"));
}

#[test]
fn fbp_path_reports_relative_error() {
    let w = Workspace::new();
    let cfg = w.config("d.toml", DISK_FBP);
    let o = radmom(&["pipeline", "-c", s(&cfg), "--out", s(&w.path("o"))]);
    assert_ok(&o);
    let rel = printed_value(&stdout(&o), "relative L2 error:");
    assert!(rel.is_finite() && rel < 0.5, "relative L2 {rel}");
    assert!(w.path("o/recon.pgm").exists());
}

#[test]
fn pipeline_equals_subcommands_and_is_deterministic() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let p1 = w.path("p1");
    let p2 = w.path("p2");
    let sub = w.path("sub");
    assert_ok(&radmom(&["pipeline", "-c", s(&cfg), "--out", s(&p1)]));
    assert_ok(&radmom(&["pipeline", "-c", s(&cfg), "--out", s(&p2)]));
    assert_ok(&radmom(&["project", "-c", s(&cfg), "--out", s(&sub)]));
    let sino = sub.join("sinogram.csv");
    assert_ok(&radmom(&["moments", "-c", s(&cfg), "--out", s(&sub), "--sinogram", s(&sino)]));
    let moments = sub.join("moments.csv");
    assert_ok(&radmom(&["reconstruct", "-c", s(&cfg), "--out", s(&sub), "--moments", s(&moments)]));

    for f in ["sinogram.csv", "moments.csv", "recon.csv", "recon.pgm"] {
        let a = fs::read(p1.join(f)).unwrap();
        assert_eq!(a, fs::read(p2.join(f)).unwrap(), "{f} differs between runs");
        assert_eq!(a, fs::read(sub.join(f)).unwrap(), "{f} differs from the subcommands");
    }
}

#[test]
fn noisy_run_reports_moment_deviation() {
    let w = Workspace::new();
    let cfg = w.config("u.toml", UNIFORM);
    let o = radmom(&[
        "pipeline", "-c", s(&cfg), "--out", s(&w.path("o")), "--sigma", "0.05", "--seed", "7", "--order", "2", "--m",
        "1", "--n", "1",
    ]);
    assert_ok(&o);
    let dev = printed_value(&stdout(&o), "moment deviation caused by noise:");
    assert!(dev > 0.0 && dev < 0.1, "deviation {dev}");
}

#[test]
fn selftest_runs_a_single_criterion() {
    let o = radmom(&["selftest", "--criterion", "2"]);
    assert_ok(&o);
    assert!(stdout(&o).contains("PASS"));
}
