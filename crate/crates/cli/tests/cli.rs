use std::io::Write;
use std::process::{Command, Output, Stdio};

fn necs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn necs_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_necs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn series_prints_reversion_coefficients() {
    let o = necs(&["series", "--which", "A", "--terms", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n1\n3\n10\n39\n160\n691\n3081\n");
    let csv = stdout(&necs(&[
        "series", "--which", "M", "--terms", "4", "--format", "csv",
    ]));
    assert_eq!(csv, "k,coefficient\n1,1\n2,-1\n3,-1\n4,0\n");
    let phi = stdout(&necs(&["series", "--which", "phi", "--terms", "10"]));
    assert_eq!(
        phi.split_whitespace().collect::<Vec<_>>(),
        ["1", "1", "2", "3", "6", "9", "17", "28", "50", "83"]
    );
    let am = stdout(&necs(&["series", "--which", "Am:2", "--terms", "5"]));
    assert_eq!(am, "0\n1\n2\n6\n22\n");
}

#[test]
fn count_matches_golden_table() {
    let o = necs(&["count", "--max-size", "13", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("../../../data/table2.csv"));
}

#[test]
fn count_uses_cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let p = path.to_str().unwrap();
    let first = stdout(&necs(&["count", "--max-size", "10", "--cache", p]));
    assert!(path.exists());
    let second = stdout(&necs(&["count", "--max-size", "8", "--cache", p]));
    assert!(first.starts_with(&second));
    let via_env = Command::new(env!("CARGO_BIN_EXE_necs"))
        .args(["count", "--max-size", "6"])
        .env("NECS_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(via_env.status.success());
    assert!(dir.path().join("count-table.json").exists());
}

#[test]
fn lcm_values_and_lcm_table() {
    let t = stdout(&necs(&[
        "count",
        "--max-size",
        "8",
        "--lcm-values",
        "--format",
        "lines",
    ]));
    assert_eq!(
        t.split_whitespace().collect::<Vec<_>>(),
        ["1", "1", "2", "3", "6", "8", "15", "18"]
    );
    let csv = stdout(&necs(&["count", "--max-size", "3", "--lcm-max", "100"]));
    assert_eq!(csv, "k,m,l,count\n1,1,1,1\n2,2,2,1\n3,2,4,2\n3,3,3,1\n");
}

#[test]
fn enumeration_outputs() {
    let table = stdout(&necs(&["enumerate", "--size", "4", "--format", "table"]));
    assert_eq!(table, include_str!("../../../data/table1.tsv"));
    let n = stdout(&necs(&[
        "enumerate",
        "--size",
        "9",
        "--format",
        "count-only",
    ]));
    assert_eq!(n, "14095\n");
    let s = stdout(&necs(&[
        "enumerate",
        "--size",
        "7",
        "--canonical",
        "shift",
        "--format",
        "count-only",
    ]));
    assert_eq!(s, "75\n");
    let lines = stdout(&necs(&["enumerate", "--size", "3", "--gcd", "2"]));
    assert_eq!(lines.lines().count(), 2);
    let json = stdout(&necs(&["enumerate", "--size", "2", "--format", "json"]));
    assert_eq!(json, "[[0,2],[1,2]]\n");
}

#[test]
fn output_is_independent_of_workers() {
    let one = necs(&["--workers", "1", "enumerate", "--size", "7"]);
    let many = necs(&["--workers", "4", "enumerate", "--size", "7"]);
    assert_eq!(one.stdout, many.stdout);
    let one = necs(&["--workers", "1", "enumerate", "--size", "6", "--ecs"]);
    let many = necs(&["--workers", "4", "enumerate", "--size", "6", "--ecs"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn exact_cover_search_agrees_on_small_sizes() {
    let necs_lines = stdout(&necs(&["enumerate", "--size", "5"]));
    let ecs_lines = stdout(&necs(&["enumerate", "--size", "5", "--ecs"]));
    let mut a: Vec<&str> = necs_lines.lines().collect();
    let mut b: Vec<&str> = ecs_lines.lines().collect();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
    let capped = necs(&["enumerate", "--size", "5", "--ecs", "--max-modulus", "8"]);
    assert_eq!(capped.status.code(), Some(5));
}

#[test]
fn recognize_exit_codes() {
    let erdos = "0 mod 2\n0 mod 3\n1 mod 4\n5 mod 6\n7 mod 12\n";
    assert_eq!(
        necs_stdin(&["recognize", "-"], erdos).status.code(),
        Some(4)
    );
    let natural = necs_stdin(&["recognize", "-"], "[[1,4],[3,4],[0,6],[2,6],[4,6]]");
    assert_eq!(natural.status.code(), Some(0));
    assert!(stdout(&natural).contains("(2 (3 () () ()) (2 () ()))"));
    let odd = "[[0,6],[2,6],[1,10],[3,10],[5,10],[7,10],[4,15],[9,30],[10,30],[16,30],[22,30],[28,30],[29,30]]";
    assert_eq!(necs_stdin(&["recognize", "-"], odd).status.code(), Some(3));
    let capped = necs(&[
        "enumerate",
        "--size",
        "13",
        "--ecs",
        "--gcd-one",
        "--max-modulus",
        "30",
        "--format",
        "json",
    ]);
    assert_eq!(capped.status.code(), Some(5));
    assert_eq!(stdout(&capped).lines().count(), 30);
    assert!(stdout(&capped).lines().any(|l| l == odd));
    let garbage = necs_stdin(&["recognize", "-"], "1 mod\n");
    assert_eq!(garbage.status.code(), Some(2));
    assert_eq!(
        necs(&["recognize", "/nonexistent/file"]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(necs(&["bogus"]).status.code(), Some(2));
    assert_eq!(necs(&["count"]).status.code(), Some(2));
    assert_eq!(necs(&["count", "--max-size", "0"]).status.code(), Some(2));
    assert_eq!(necs(&["series", "--which", "Q"]).status.code(), Some(2));
    assert_eq!(
        necs(&["series", "--format", "table"]).status.code(),
        Some(2)
    );
    assert_eq!(
        necs(&["enumerate", "--size", "3", "--budget", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn asympt_prints_certified_constants() {
    let o = necs(&["asympt", "--digits", "30", "--identities"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("tau        0.322993913302833539981225646963"));
    assert!(text.contains("below 1e-30"));
    assert!(!text.contains("NOT below"));
    let json: serde_json::Value =
        serde_json::from_slice(&necs(&["asympt", "--digits", "20", "--format", "json"]).stdout)
            .unwrap();
    assert_eq!(json["digits"], 20);
    assert!(json["c"]["value"]
        .as_str()
        .unwrap()
        .starts_with("0.0809422941860973003"));
}

#[test]
fn poly_and_verify() {
    let o = necs(&["poly", "--n", "6", "--check-diffs", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row6: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("6,"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(row6, ["691", "654", "324", "94", "15", "1"]);
    assert!(!text.contains(",false"));
    let v = necs(&["verify", "--order", "20"]);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(!stdout(&v).contains("FAIL"));
}

#[test]
fn trees_and_chi() {
    assert_eq!(
        stdout(&necs(&["trees", "--size", "6", "--format", "count-only"])),
        "197\n"
    );
    let chi = stdout(&necs(&["trees", "--tree", "(2 () (3 () () ()))"]));
    assert_eq!(chi, "{<0,2>, <1,6>, <3,6>, <5,6>}\n");
    assert_eq!(necs(&["trees", "--tree", "(1 ())"]).status.code(), Some(2));
}
