use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const P4: &str = "graph\na b\nb c\nc d\n";
const K4: &str = "graph\na b\na c\na d\nb c\nb d\nc d\n";
const BAD_TABLE: &str = "table 2 1 2\n00 0\n10 -1\n01 -1\n11 0\n";
const IDENTITY: &str = "gf2 3 3\n100\n010\n001\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.write("p4.txt", P4);
        ws.write("k4.txt", K4);
        ws.write("bad.txt", BAD_TABLE);
        ws.write("id.txt", IDENTITY);
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_cutrep"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn axioms_exit_codes() {
    let ws = Workspace::new();
    assert_eq!(code(&ws.run(&["axioms", "--graph", "p4.txt", "--func", "edgecut"])), 0);
    assert_eq!(code(&ws.run(&["axioms", "--matrix", "id.txt"])), 0);

    let bad = ws.run(&["axioms", "--table", "bad.txt"]);
    assert_eq!(code(&bad), 3);
    assert_eq!(stdout(&bad), "FAIL axiom=submodularity X={1} Y={2}\n");

    assert_eq!(code(&ws.run(&["axioms", "--graph", "missing.txt"])), 2);
    assert_eq!(code(&ws.run(&["axioms", "--matrix", "id.txt", "--func", "cutrank"])), 2);
    assert_eq!(code(&ws.run(&["axioms", "--graph", "id.txt"])), 2);
    assert_eq!(code(&ws.run(&["axioms"])), 2);
}

#[test]
fn encode_enumerate_member() {
    let ws = Workspace::new();
    let out = ws.run(&["encode", "--graph", "p4.txt", "--func", "edgecut", "-k", "1", "-o", "rep.txt"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let listed = ws.run(&["enumerate", "rep.txt"]);
    assert_eq!(code(&listed), 0);
    assert_eq!(stdout(&listed), "a\na,b\na,b,c\nb,c,d\nc,d\nd\n");

    let yes = ws.run(&["member", "rep.txt", "--set", "a,b"]);
    assert_eq!((code(&yes), stdout(&yes).as_str()), (0, "yes\n"));
    let no = ws.run(&["member", "rep.txt", "--set", "b"]);
    assert_eq!((code(&no), stdout(&no).as_str()), (1, "no\n"));
    assert_eq!(code(&ws.run(&["member", "rep.txt", "--set", "z"])), 2);

    assert_eq!(code(&ws.run(&["enumerate", "rep.txt", "--budget", "2"])), 4);
    ws.write("junk.txt", "{\"ground\": 3}");
    assert_eq!(code(&ws.run(&["enumerate", "junk.txt"])), 2);
}

#[test]
fn encode_is_deterministic() {
    let ws = Workspace::new();
    let base = ["encode", "--graph", "k4.txt", "--func", "cutrank", "-k", "1"];
    let first = ws.run(&[&base[..], &["-o", "one.txt"]].concat());
    let second = ws.run(&[&base[..], &["-o", "two.txt", "--jobs", "4"]].concat());
    assert_eq!(code(&first), 0);
    assert_eq!(code(&second), 0);
    assert_eq!(read(&ws.path("one.txt")), read(&ws.path("two.txt")));

    let a = ws.run(&base);
    let b = ws.run(&base);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), read(&ws.path("one.txt")));

    let bare = ws.run(&[&base[..], &["--no-provenance"]].concat());
    assert!(!stdout(&bare).contains("provenance"));
}

#[test]
fn stats_go_to_stderr() {
    let ws = Workspace::new();
    let out = ws.run(&["encode", "--graph", "p4.txt", "-k", "1", "-o", "rep.txt", "--stats"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("triples: "));
    assert!(err.contains("size bound: 1825"));
    assert!(err.contains("within bound: yes"));
}

#[test]
fn bisect_cases() {
    let ws = Workspace::new();
    let half = ws.run(&["bisect", "--graph", "p4.txt", "--func", "edgecut", "-k", "1", "--targets", "half"]);
    assert_eq!((code(&half), stdout(&half).as_str()), (0, "a,b\n"));

    let none = ws.run(&["bisect", "--graph", "k4.txt", "--func", "edgecut", "-k", "2", "--targets", "half"]);
    assert_eq!((code(&none), stdout(&none).as_str()), (1, "INFEASIBLE\n"));

    let empty = ws.run(&["bisect", "--graph", "p4.txt", "-k", "0", "--targets", "0", "--mode", "exact"]);
    assert_eq!((code(&empty), stdout(&empty).as_str()), (0, "\n"));

    let windowed = ws.run(&["bisect", "--graph", "p4.txt", "-k", "1", "--window", "c,d", "--targets", "1", "--mode", "exact"]);
    assert_eq!(code(&windowed), 0);
    assert_eq!(stdout(&windowed), "a,b,c\n");

    // Out-of-range targets are dropped with a warning.
    let clamped = ws.run(&["bisect", "--graph", "p4.txt", "-k", "1", "--targets", "9,-1"]);
    assert_eq!(stdout(&clamped), "INFEASIBLE\n");
    assert!(String::from_utf8(clamped.stderr).unwrap().contains("ignored"));

    assert_eq!(code(&ws.run(&["bisect", "--graph", "p4.txt", "-k", "1", "--targets", "two"])), 2);
    assert_eq!(code(&ws.run(&["bisect", "--graph", "p4.txt", "-k", "1", "--targets", "1", "--window", "q"])), 2);
}

#[test]
fn verify_cases() {
    let ws = Workspace::new();
    let ok = ws.run(&["verify", "--graph", "p4.txt", "--func", "edgecut", "-k", "1", "--suite", "all"]);
    assert_eq!(code(&ok), 0);
    let text = stdout(&ok);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.starts_with("CHECK ") && l.contains(" PASS instances=")));

    for bug in ["flip-arc-rule", "weak-marker-filter", "drop-dp-extend"] {
        let out = ws.run(&["verify", "--graph", "p4.txt", "--func", "edgecut", "-k", "1", "--suite", "all", "--seeded-bug", bug]);
        assert_eq!(code(&out), 5, "{bug}");
        assert!(stdout(&out).contains(" FAIL instances="));
    }

    assert_eq!(code(&ws.run(&["verify", "--graph", "p4.txt", "--suite", "nope"])), 2);
    let single = ws.run(&["verify", "--matrix", "id.txt", "-k", "0", "--suite", "encoding"]);
    assert_eq!(code(&single), 0);
    assert_eq!(stdout(&single), "CHECK encoding PASS instances=8\n");
}

#[test]
fn identical_runs_identical_output() {
    let ws = Workspace::new();
    let args = ["verify", "--graph", "k4.txt", "--func", "cutrank", "-k", "1", "--seed", "5"];
    assert_eq!(ws.run(&args).stdout, ws.run(&args).stdout);
}
