use std::process::{Command, Output};

use wg_biharmonic::mesh::Mesh;
use wg_biharmonic::study::{parse_csv, CSV_HEADER};

fn wg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wg-biharm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn study_csv_has_header_and_orders() {
    let o = wg(&["study", "--levels", "2,4,8", "--format", "csv", "--no-timings"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), [2, 4, 8]);
    assert!(rows[0].orders.iter().all(Option::is_none));
    assert!(rows[2].orders.iter().all(Option::is_some));
    assert!(rows.iter().all(|r| r.solve_seconds == 0.0));
}

#[test]
fn study_output_is_reproducible() {
    let args = ["study", "--problem", "example2", "--levels", "2,4", "--format", "csv", "--no-timings"];
    let a = wg(&args);
    let b = wg(&[&args[..], &["--parallel"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn study_markdown_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.md");
    let o = wg(&["study", "--k", "3", "--mesh", "quad", "--levels", "2,4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("k = 3"));
    assert!(text.contains("| h |"));
}

#[test]
fn solve_reports_all_norms_and_dumps_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("a.txt");
    let o = wg(&["solve", "--n", "2", "--dump-matrix", dump.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    // 8 cells × 6 interior + 16 edges × (2 trace + 2 flux)
    assert!(text.starts_with("problem example1 k 2 cells 8 dofs 112"));
    assert_eq!(text.lines().filter(|l| l.contains("norm")).count(), 6);

    let dumped = std::fs::read_to_string(&dump).unwrap();
    for line in dumped.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 3);
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert!(j <= i && i < 112);
        f[2].parse::<f64>().unwrap();
    }
}

#[test]
fn solve_on_mesh_file_matches_builtin_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quads.mesh");
    Mesh::uniform_quads(3).unwrap().write(&path).unwrap();
    let from_file = wg(&["solve", "--mesh-file", path.to_str().unwrap(), "--problem", "example2", "--solver", "cg"]);
    let builtin = wg(&["solve", "--n", "3", "--mesh", "quad", "--problem", "example2", "--solver", "cg"]);
    assert!(from_file.status.success() && builtin.status.success());
    assert_eq!(from_file.stdout, builtin.stdout);
    assert!(stdout(&builtin).contains("iterations"));
}

#[test]
fn bad_input_exits_nonzero() {
    for args in [
        &["solve", "--problem", "nonsense"][..],
        &["solve", "--k", "1"],
        &["study", "--levels", "8,4"],
        &["study", "--format", "xml"],
        &["solve", "--solver", "lu"],
        &["solve", "--mesh-file", "/nonexistent/mesh.txt"],
    ] {
        let o = wg(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "), "{args:?}");
    }
}
