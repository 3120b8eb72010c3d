use std::fs;
use std::process::{Command, Output};

fn apx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn grid_file_shape_and_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.pts");
    let o = apx(&["gen-grid", "--m", "1", "--N", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("apx-points 1 dim=2 count=9\n"));
    assert_eq!(fs::read_to_string(dir.path().join("g.pts.prov")).unwrap().lines().count(), 9);

    let grid = dir.path().join("grid.pts");
    fs::write(&grid, "apx-points 1 dim=2 count=9\n1 1\n1 2\n1 3\n2 1\n2 2\n2 3\n3 1\n3 2\n3 3\n").unwrap();
    let o = apx(&["alpha", "--in", grid.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("alpha=6 "));
}

#[test]
fn verify_reports_violations_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sq.pts");
    fs::write(&p, "apx-points 1 dim=3 count=5\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n2 3 5\n").unwrap();
    let summary = dir.path().join("s.txt");
    let o = apx(&["verify", "--in", p.to_str().unwrap(), "--k", "4", "--summary", summary.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.starts_with("violations=1 subsets_checked=5 "));
    assert!(s.contains("violation subset=0,1,2,3 witness=1,-1,-1,1 normal=0,0,1 offset=0"));
    assert_eq!(fs::read_to_string(summary).unwrap(), s.lines().next().unwrap().to_string() + "\n");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(apx(&["gen-grid", "--N", "2", "--out", "x"]).status.code(), Some(2));
    assert_eq!(apx(&["gen-cube", "--m", "1", "--d", "5", "--out", "x"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.pts");
    fs::write(&p, "apx-points 1 dim=2 count=2\n# ok\n1 1\n1 x\n").unwrap();
    let o = apx(&["alpha", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn incidence_nullity_and_lemma_commands() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.pts");
    fs::write(&t, "apx-points 1 dim=2 count=3\n0 0\n1 0\n0 1\n").unwrap();
    let o = apx(&["incidence", "--in", t.to_str().unwrap(), "--d", "2", "--m", "1"]);
    assert_eq!(stdout(&o).trim(), "incident=false spec=N=2 d=2 m=1 witness={1} {2}");

    let f = dir.path().join("f.txt");
    fs::write(&f, "# A then B\n{1};{2};{1,2}\n{1};{2};{}\n").unwrap();
    let o = apx(&["nullity", "--families", f.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "nullity=0 rows=3 cols=3");

    let o = apx(&["lemma-check", "--name", "cube-identity", "--trials", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass=true"));
    assert_eq!(apx(&["lemma-check", "--name", "nope"]).status.code(), Some(2));
}
