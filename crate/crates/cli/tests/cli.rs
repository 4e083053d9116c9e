use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polybound"))
        .args(args)
        .env_remove("POLYBOUND_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn triangle_volume_and_vertices() {
    let tri = data("triangle.hrep");
    assert!(ok(&["volume", "--polytope", &tri]).starts_with("volume=1/2\n"));
    assert_eq!(
        ok(&["vertices", "--polytope", &tri]),
        "1 1  tight 0 1\n1 2  tight 0 2\n2 1  tight 1 2\n"
    );
}

#[test]
fn integrate_constant_gives_volume() {
    let out = ok(&[
        "integrate",
        "--poly",
        &data("one.poly"),
        "--polytope",
        &data("triangle.hrep"),
        "--k",
        "1",
        "--backend",
        "linear-forms",
    ]);
    assert!(out.contains("integral=1/2\n"), "{out}");
}

#[test]
fn integrate_with_handelman_shift() {
    let out = ok(&[
        "integrate",
        "--poly",
        &data("square_minus.poly"),
        "--polytope",
        &data("pm1.hrep"),
        "--backend",
        "handelman",
    ]);
    assert!(out.contains("s=1\n"), "{out}");
    assert!(out.contains("integral=8/3\n"), "{out}");
    let lf = ok(&[
        "integrate",
        "--poly",
        &data("square_minus.poly"),
        "--polytope",
        &data("pm1.hrep"),
        "--shift",
        "auto",
    ]);
    assert!(lf.contains("integral=8/3\n"), "{lf}");
}

#[test]
fn decompose_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.txt");
    let out = ok(&[
        "decompose",
        "--poly",
        &data("square_minus.poly"),
        "--polytope",
        &data("pm1.hrep"),
        "--t",
        "2",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert!(out.contains("s=1\n"));
    assert!(out.contains("handelman_terms=2\n"));
    let text = fs::read_to_string(&cert).unwrap();
    assert!(text.starts_with("t 2\ns 1\n"), "{text}");

    let xy = write(dir.path(), "xy.poly", "d 2\n1 1 1\n");
    let out = ok(&[
        "decompose",
        "--poly",
        xy.to_str().unwrap(),
        "--polytope",
        &data("triangle.hrep"),
    ]);
    assert!(out.contains("linear_form_terms=3\n"), "{out}");
}

#[test]
fn gridsum_reproduces_small_table() {
    let out = ok(&[
        "gridsum",
        "--poly",
        &data("bump.poly"),
        "--polytope",
        &data("interval.hrep"),
        "--k",
        "1",
        "--m",
        "1..15",
        "--digits",
        "6",
    ]);
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .take(15)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows[3], ["4", "3", "1.583333"]);
    assert_eq!(rows[9], ["10", "5", "1.800000"]);
    assert!(out.ends_with("L_k >= 1.791666 (k = 1)\n"));
}

#[test]
fn bounds_table_row() {
    let out = ok(&[
        "bounds",
        "--poly",
        &data("table1.poly"),
        "--polytope",
        &data("triangle.hrep"),
        "--k",
        "10",
        "--shift",
        "none",
        "--lipschitz",
        "536",
    ]);
    assert!(out.contains(">= 17.118438026569"), "{out}");
    assert!(out.contains("<= 47.689615853314"), "{out}");
}

#[test]
fn bounds_epsilon_prints_components() {
    let out = ok(&[
        "bounds",
        "--poly",
        &data("table1.poly"),
        "--polytope",
        &data("triangle.hrep"),
        "--epsilon",
        "0.1",
        "--upper",
        "27",
        "--lipschitz",
        "536",
        "--choose-only",
    ]);
    for v in ["-1.8992", "61.9577", "197.2277", "434.1099", "selected k=435"] {
        assert!(out.contains(v), "{v} missing:\n{out}");
    }
}

#[test]
fn constant_bounds_without_shift() {
    let dir = tempfile::tempdir().unwrap();
    let five = write(dir.path(), "five.poly", "d 2\n5 0 0\n");
    let out = ok(&[
        "bounds",
        "--poly",
        five.to_str().unwrap(),
        "--polytope",
        &data("triangle.hrep"),
        "--k",
        "3",
        "--shift",
        "none",
        "--format",
        "kv",
    ]);
    assert!(out.contains("L_k=5.000000000000\n"), "{out}");
    assert!(out.contains("U_k=none\n"), "{out}");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "bounds",
        "--poly",
        &data("table1.poly"),
        "--polytope",
        &data("triangle.hrep"),
        "--k",
        "2..6:2",
        "--format",
        "kv",
    ];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let threaded = Command::new(env!("CARGO_BIN_EXE_polybound"))
        .args(args)
        .env("POLYBOUND_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&threaded), first);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.poly", "d 2\n1 x 0\n");
    let out = run(&[
        "integrate",
        "--poly",
        bad.to_str().unwrap(),
        "--polytope",
        &data("triangle.hrep"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let bad_hrep = write(dir.path(), "bad.hrep", "2 1\n1\n");
    assert_eq!(
        run(&["volume", "--polytope", bad_hrep.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = run(&["volume", "--polytope", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(
        run(&[
            "bounds",
            "--poly",
            &data("table1.poly"),
            "--polytope",
            &data("triangle.hrep")
        ])
        .status
        .code(),
        Some(2)
    );
    let mismatch = run(&[
        "integrate",
        "--poly",
        &data("bump.poly"),
        "--polytope",
        &data("triangle.hrep"),
    ]);
    assert_eq!(mismatch.status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_polybound"))
        .args(["volume", "--polytope", &data("triangle.hrep")])
        .env("POLYBOUND_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn math_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let half_plane = write(dir.path(), "open.hrep", "1 2\n0 1 0\n");
    let out = run(&["volume", "--polytope", half_plane.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("polytope"));

    let sliver = write(dir.path(), "sliver.hrep", "2 1\n1/2 1\n-1/3 -1\n");
    let out = run(&[
        "gridsum",
        "--poly",
        &data("bump.poly"),
        "--polytope",
        sliver.to_str().unwrap(),
        "--k",
        "1",
        "--m",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gridsum"));
}
