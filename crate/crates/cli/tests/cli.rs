//! End-to-end tests of the `glc` binary: outputs, exit codes, `--out`
//! handling and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn glc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glc")).args(args).output().expect("glc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reduces_a_term() {
    let o = glc(&["lambda", "reduce", "--term", r"(\x.x) y"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "y\n");
}

#[test]
fn reduces_church_arithmetic_from_a_file() {
    let dir = TempDir::new().unwrap();
    let two = r"(\f.\x.f (f x))";
    let plus = r"(\m.\n.\f.\x.m f (n f x))";
    let t = write(&dir, "sum.lam", &format!("{plus} {two} {two}\n"));
    let o = glc(&["lambda", "reduce", "--in", &t]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let four = glc(&["lambda", "reduce", "--term", r"\f.\x.f (f (f (f x)))"]);
    assert_eq!(stdout(&o), stdout(&four));
}

#[test]
fn fuel_exhaustion_is_not_an_error() {
    let o = glc(&["lambda", "reduce", "--term", r"(\x.x x) (\x.x x)", "--fuel", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("FUEL_EXHAUSTED\n"), "{}", stdout(&o));
    let o = glc(&["lambda", "reduce", "--term", r"(\x.x x) (\x.x x)", "--fuel", "3", "--emit", "trace"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("# trace: beta=3"), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("# FUEL_EXHAUSTED\n"));
}

#[test]
fn encodes_and_checks_terms_and_graphs() {
    let dir = TempDir::new().unwrap();
    let o = glc(&["lambda", "encode", "--term", r"\x.x"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "node n0 LAM\nedge n0.vout n0.in\nedge n0.aout out:root\n");
    let g = write(&dir, "id.glf", &stdout(&o));
    let o = glc(&["lambda", "check", "--in", &g]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "LAMBDA-GRAPH\n"));
    let o = glc(&["lambda", "reduce", "--in", &g]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with(r"\"), "{}", stdout(&o));

    // The kink's variable path leaves through the OUT leaf.
    let o = glc(&["knot", "encode", "--pd", &fixture("kink_a.pd")]);
    let knot = write(&dir, "kink.glf", &stdout(&o));
    let o = glc(&["lambda", "check", "--in", &knot]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("NOT A LAMBDA-GRAPH\n"), "{}", stdout(&o));
    assert!(stdout(&o).contains("OUT leaf"), "{}", stdout(&o));
    let o = glc(&["lambda", "encode", "--term", r"\x.x", "--emit", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn r3a_script_costs_six_beta_moves() {
    let dir = TempDir::new().unwrap();
    let script = write(&dir, "r3.txt", "r3a n0 n2 n4\n");
    let out = dir.path().join("out.glf");
    let o = glc(&[
        "knot", "apply", "--pd", &fixture("r3a_lhs.pd"), "--script", &script, "--emit", "glf", "--out", path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# trace: beta=6 "), "{text}");
    assert!(text.starts_with("# crossing "), "{text}");

    let rhs = dir.path().join("rhs.glf");
    let o = glc(&["knot", "encode", "--pd", &fixture("r3a_rhs.pd"), "--out", path(&rhs)]);
    assert_eq!(code(&o), 0);
    let o = glc(&["graph", "iso", path(&out), path(&rhs)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("ISOMORPHIC\n"));

    // Signs ride along in the GLF comments, so the result decodes.
    let o = glc(&["knot", "decode", "--in", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("x +")).count(), 3);
}

#[test]
fn raw_beta_script_on_a_graph() {
    let dir = TempDir::new().unwrap();
    let lhs = dir.path().join("lhs.glf");
    glc(&["knot", "encode", "--pd", &fixture("r3a_lhs.pd"), "--out", path(&lhs)]);
    let o = glc(&["graph", "run", path(&lhs), "--script", &fixture("r3a.moves"), "--emit", "trace"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("BETA_")).count(), 6);
    assert!(stdout(&o).ends_with("# trace: beta=6 elim=0 add=0 steps=6\n"));
    // A raw expansion has no sign, so the result cannot be decoded to PD.
    let script = write(&dir, "raw.txt", "beta+ in:a in:b\n");
    let o = glc(&["knot", "apply", "--in", path(&lhs), "--script", &script]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sign"), "{}", stderr(&o));
}

#[test]
fn non_isomorphic_graphs_exit_one() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.glf");
    let h = dir.path().join("h.glf");
    glc(&["knot", "encode", "--pd", &fixture("trefoil.pd"), "--out", path(&t)]);
    glc(&["knot", "encode", "--pd", &fixture("hopf.pd"), "--out", path(&h)]);
    let o = glc(&["graph", "iso", path(&t), path(&h)]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT ISOMORPHIC\n");
    let o = glc(&["graph", "iso", path(&t), path(&t)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("n0 -> n0\n"));
}

#[test]
fn renders_dot() {
    let dir = TempDir::new().unwrap();
    let h = dir.path().join("h.glf");
    glc(&["knot", "encode", "--pd", &fixture("hopf.pd"), "--out", path(&h)]);
    let o = glc(&["graph", "render", path(&h)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["lambda", "encode"],
        vec!["lambda", "encode", "--term", "x", "--in", "f"],
        vec!["lambda", "encode", "--term", "x", "--emit", "pd"],
        vec!["lambda", "reduce", "--term", "x", "--fuel", "lots"],
        vec!["knot", "apply", "--pd", "missing.pd"],
        vec!["knot", "decode", "--in", "missing.glf", "--emit", "glf"],
        vec!["graph", "frobnicate"],
        vec!["selfcheck", "--filter", "no-such-criterion"],
        vec![],
    ] {
        let o = glc(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn domain_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.pd", "x + a b\n");
    let r1 = write(&dir, "r1.txt", "r1a- n0\n");
    for args in [
        vec!["lambda", "reduce", "--term", r"(\x."],
        vec!["lambda", "reduce", "--in", "/nonexistent/term.lam"],
        vec!["knot", "encode", "--pd", &bad],
        vec!["knot", "apply", "--pd", &fixture("trefoil.pd"), "--script", &r1],
    ] {
        let o = glc(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(stderr(&o).starts_with("glc: "), "{args:?}: {}", stderr(&o));
    }
    let o = glc(&["knot", "apply", "--pd", &fixture("trefoil.pd"), "--script", &r1]);
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}

#[test]
fn out_is_written_only_on_success() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("result.glf");
    let o = glc(&["lambda", "encode", "--term", r"(\x.", "--out", path(&out)]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());

    fs::write(&out, "keep me\n").unwrap();
    let r1 = write(&dir, "r1.txt", "r1a- n0\n");
    let o = glc(&["knot", "apply", "--pd", &fixture("trefoil.pd"), "--script", &r1, "--out", path(&out)]);
    assert_eq!(code(&o), 1);
    assert_eq!(fs::read_to_string(&out).unwrap(), "keep me\n");

    let o = glc(&["lambda", "encode", "--term", r"\x.x", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "");
    assert!(fs::read_to_string(&out).unwrap().starts_with("node n0 LAM"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2, "no temporary files left behind");
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let script = write(&dir, "moves.txt", "r1a+ in:a\nr2a+ in:b in:c\nr3a n0 n2 n4\n");
    let (lhs, fig8) = (fixture("r3a_lhs.pd"), fixture("figure_eight.pd"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["lambda", "reduce", "--term", r"(\n.\f.\x.f (n f x)) (\f.\x.f (f x))", "--emit", "glf"],
        vec!["knot", "apply", "--pd", &lhs, "--script", &script, "--emit", "pd"],
        vec!["knot", "encode", "--pd", &fig8, "--emit", "dot"],
        vec!["selfcheck", "--filter", "9"],
    ];
    for args in runs {
        let (a, b) = (glc(&args), glc(&args));
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn selfcheck_filter_runs_one_sector() {
    let o = glc(&["selfcheck", "--filter", "lambda"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[..3].iter().all(|l| l.starts_with("PASS ")));
    assert_eq!(lines[3], "3/3 criteria passed");
}
