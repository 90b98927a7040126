use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridhard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verifies_the_reference_solution() {
    let o = run(&[
        "knossos",
        "verify",
        s(&fixture("fig1.kno")),
        s(&fixture("fig2.sol")),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "verified");
}

#[test]
fn rejects_a_damaged_solution() {
    let dir = tempfile::tempdir().unwrap();
    let sol = std::fs::read_to_string(fixture("fig2.sol")).unwrap();
    let damaged = dir.path().join("bad.sol");
    // Flip one interior horizontal wall.
    let mut lines: Vec<String> = sol.lines().map(String::from).collect();
    let row = &mut lines[2];
    let flipped = if row.starts_with('-') { "." } else { "-" };
    row.replace_range(0..1, flipped);
    std::fs::write(&damaged, lines.join("\n") + "\n").unwrap();
    let o = run(&[
        "--porcelain",
        "knossos",
        "verify",
        s(&fixture("fig1.kno")),
        s(&damaged),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("status=rejected"));
}

#[test]
fn solves_the_hourglass_example() {
    for method in ["dp", "dfs"] {
        let o = run(&[
            "--porcelain",
            "hourglass",
            "solve",
            s(&fixture("fig3.hg")),
            "--method",
            method,
        ]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).contains("sum=53"));
    }
    let o = run(&[
        "hourglass",
        "verify",
        s(&fixture("fig3.hg")),
        s(&fixture("fig3_bold.path")),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn gadget_check_all_passes() {
    let o = run(&["gadget", "check", "--all"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), 9);
    assert_eq!(code(&run(&["gadget", "check", "wire"])), 0);
    assert_eq!(code(&run(&["gadget", "check", "no_such_gadget"])), 3);
}

#[test]
fn sat_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("f.cnf"), "p cnf 2 1\n1 2 0\n").unwrap();
    let o = run(&[
        "reduce",
        "sat2knossos",
        s(&p("f.cnf")),
        "-o",
        s(&p("f.kno")),
        "-m",
        s(&p("f.man")),
    ]);
    assert_eq!(code(&o), 0);

    let o = run(&[
        "synthesize",
        s(&p("f.man")),
        "--assign",
        "1=false,2=true",
        "-o",
        s(&p("f.sol")),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&run(&["knossos", "verify", s(&p("f.kno")), s(&p("f.sol"))])),
        0
    );
    let o = run(&[
        "--porcelain",
        "decode",
        "knossos",
        s(&p("f.man")),
        s(&p("f.sol")),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("assignment=1=false,2=true"));

    let o = run(&[
        "--porcelain",
        "synthesize",
        s(&p("f.man")),
        "--assign",
        "1=false,2=false",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("template=terminator_false"));
    assert_eq!(
        code(&run(&["synthesize", s(&p("f.man")), "--assign", "1=true"])),
        3
    );

    let o = run(&["knossos", "solve", s(&p("f.kno")), "-o", s(&p("g.sol"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&run(&["decode", "knossos", s(&p("f.man")), s(&p("g.sol"))])),
        0
    );
}

#[test]
fn unsatisfiable_formula_compiles_to_unsolvable_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("f.cnf"), "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    run(&[
        "reduce",
        "sat2knossos",
        s(&p("f.cnf")),
        "-o",
        s(&p("f.kno")),
        "-m",
        s(&p("f.man")),
    ]);
    let o = run(&["--porcelain", "knossos", "solve", s(&p("f.kno"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("status=unsolvable"));
}

#[test]
fn subset_sum_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("s.txt"), "12\n3 4 5 9\n").unwrap();
    let o = run(&[
        "reduce",
        "ss2hg",
        s(&p("s.txt")),
        "-o",
        s(&p("s.hg")),
        "-m",
        s(&p("s.man")),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["hourglass", "solve", s(&p("s.hg")), "-o", s(&p("s.path"))]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "--porcelain",
        "decode",
        "hourglass",
        s(&p("s.man")),
        s(&p("s.path")),
    ]);
    assert_eq!(code(&o), 0);
    let subset = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("subset=").map(String::from))
        .unwrap();
    let values = [3u64, 4, 5, 9];
    let sum: u64 = subset
        .split(',')
        .map(|i| values[i.parse::<usize>().unwrap() - 1])
        .sum();
    assert_eq!(sum, 12);

    std::fs::write(p("t.txt"), "2\n3 4\n").unwrap();
    run(&[
        "reduce",
        "ss2hg",
        s(&p("t.txt")),
        "-o",
        s(&p("t.hg")),
        "-m",
        s(&p("t.man")),
    ]);
    assert_eq!(code(&run(&["hourglass", "solve", s(&p("t.hg"))])), 1);
}

#[test]
fn oracle_reports_its_size_limit() {
    let o = run(&["knossos", "oracle", s(&fixture("fig1.kno"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&["bogus"])), 3);
    assert_eq!(code(&run(&["knossos", "solve"])), 3);
    assert_eq!(
        code(&run(&[
            "knossos",
            "verify",
            "/nonexistent/a",
            "/nonexistent/b"
        ])),
        3
    );
    assert_eq!(
        code(&run(&["hourglass", "solve", "x", "--method", "magic"])),
        3
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn generators_are_seeded() {
    let a = stdout(&run(&["generate", "cnf", "--seed", "7"]));
    let b = stdout(&run(&["generate", "cnf", "--seed", "7"]));
    let c = stdout(&run(&["generate", "cnf", "--seed", "8"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("p cnf 3 3"));
    let ss = stdout(&run(&["generate", "subsetsum", "--seed", "1", "--n", "5"]));
    assert_eq!(ss.lines().nth(1).unwrap().split_whitespace().count(), 5);
}

#[test]
fn reports_are_stable() {
    let hg = fixture("fig3.hg");
    let args = ["--porcelain", "hourglass", "solve", s(&hg)];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
