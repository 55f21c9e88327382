//! Runs the `fitzcalc` binary end to end.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

const SIGN: &str = "\
operator:
  kind: finite_graph
  points: [[-1, -1], [0, 0], [1, 1]]
check:
  property: monotone
";

const VBAR: &str = "\
# flat segment over (0, 1)
operator:
  kind: flat
  region: (0, 1)
  wstar: [0]
regions:
  v: (0, 1)
  vbar: [0, 1]
check:
  property: identifies
  region: v
check:
  property: locates
  region: vbar
";

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("fitzcalc-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn fitzcalc(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fitzcalc")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn classify(dir: &Scratch, spec: &str) -> (i32, String) {
    let s = dir.file("run.spec", spec);
    let out = dir.path("run.txt");
    let (code, _) = fitzcalc(&["classify", "--spec", s.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (code, fs::read_to_string(out).unwrap())
}

#[test]
fn passing_spec_exits_zero() {
    let dir = Scratch::new("pass");
    let (code, report) = classify(&dir, SIGN);
    assert_eq!(code, 0, "{report}");
    assert!(report.starts_with("# fitzcalc classify\n"));
    assert!(report.contains("[check.01]\n"));
    assert!(report.contains("value = true"));
    assert!(report.contains("exit_code = 0"));
}

#[test]
fn failing_verdict_exits_one_with_witness() {
    let dir = Scratch::new("fail");
    let (code, report) = classify(&dir, VBAR);
    assert_eq!(code, 1, "{report}");
    let second = report.split("[check.02]").nth(1).unwrap();
    assert!(second.contains("status = fail"));
    assert!(second.contains("(0, 0)"));
    let first = report.split("[check.02]").next().unwrap();
    assert!(first.contains("status = pass"));
}

#[test]
fn malformed_spec_exits_two() {
    let dir = Scratch::new("bad");
    let (code, report) = classify(&dir, "operator:\n  kind: normal_cone_box\n  box: [2, 1]\n");
    assert_eq!(code, 2);
    assert!(report.contains("[error]"), "{report}");
    assert!(report.contains("line 3"), "{report}");
    let (code, _) = classify(&dir, "operator:\n  kind: flat\n  colour: red\n");
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fitzcalc(&["classify"]).0, 2);
    assert_eq!(fitzcalc(&["gallery", "--name", "nowhere", "--out", "-"]).0, 2);
    assert_eq!(fitzcalc(&["export", "--spec", "missing.spec", "--fn", "rho", "--grid", "5", "--out", "-"]).0, 2);
}

#[test]
fn gallery_to_stdout_is_deterministic() {
    let (c1, a) = fitzcalc(&["gallery", "--name", "vbar", "--out", "-"]);
    let (c2, b) = fitzcalc(&["gallery", "--name", "vbar", "--out", "-"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.contains("(0, 0)"));
}

#[test]
fn classify_reports_are_byte_identical() {
    let dir = Scratch::new("det");
    let (_, a) = classify(&dir, VBAR);
    let (_, b) = classify(&dir, VBAR);
    assert_eq!(a, b);
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|s| s.parse().unwrap()).collect()).collect()
}

#[test]
fn export_phi_of_flat_segment() {
    let dir = Scratch::new("phi");
    let spec = dir.file("flat.spec", "operator:\n  kind: flat\n  region: (-1, 1)\n  wstar: [0]\n");
    let out = dir.path("phi.csv");
    let (code, _) = fitzcalc(&[
        "export", "--spec", spec.to_str().unwrap(), "--fn", "phi", "--grid", "5", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("x,xstar,value\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 25);
    for row in r {
        assert_eq!(row[2], row[1].abs());
    }
}

#[test]
fn export_psi_of_sign_graph_dominates_coupling() {
    let dir = Scratch::new("psi");
    let text = format!("{SIGN}regions:\n  square: [-1, 1]\ngrid:\n  dual_bound: 1\n");
    let spec = dir.file("sign.spec", &text);
    let (code, csv) = fitzcalc(&[
        "export", "--spec", spec.to_str().unwrap(), "--fn", "psi", "--grid", "9", "--region", "square", "--out", "-",
    ]);
    assert_eq!(code, 0, "{csv}");
    let r = rows(&csv);
    assert_eq!(r.len(), 81);
    for row in r {
        assert!(row[2] >= row[0] * row[1] - 1e-9, "{row:?}");
    }
}
