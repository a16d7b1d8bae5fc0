use std::process::Command;

fn unlink(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_unlink"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn rational_commands() {
    let (code, out, _) = unlink(&["fraction", "4 1 4"]);
    assert_eq!(code, 0);
    assert!(out.contains("24/5"));
    assert!(out.contains("components  2"));
    assert!(out.contains("crossings   9"));

    let (code, out, _) = unlink(&["gap", "5 1 4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("u_M=3 u_BJ=2 delta=1\n"), "{out}");

    let (code, out, _) = unlink(&["gap", "5 1 4", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["delta_bj"], 1);

    assert_eq!(unlink(&["ubj", "2 5 1 5"]).1.lines().next(), Some("u_BJ=3"));
    assert!(unlink(&["udiag", "5 1 4"]).1.starts_with("u(D)=3 "));
    assert_eq!(unlink(&["gap", "1"]).1.trim(), "u_M=0 u_BJ=0 delta=0");
}

#[test]
fn equivalence_and_mirrors() {
    assert_eq!(unlink(&["equiv", "5 1 4", "4 1 5"]).0, 0);
    assert_eq!(unlink(&["equiv", "3", "-3"]).0, 0);
    assert_eq!(unlink(&["equiv", "3", "-3", "--strict"]).0, 1);
    assert_eq!(unlink(&["equiv", "3", "4"]).0, 1);
    assert_eq!(unlink(&["fraction", "-2 -1 -2"]).0, 0);
}

#[test]
fn pretzel_command() {
    let (code, out, _) = unlink(&["pretzel", "3,3,3"]);
    assert_eq!(code, 0);
    assert!(out.contains("u_BJ        3"));
    assert!(out.contains("u(D)        3"));
    // the determinant rule cannot decide P(-2,4,4), which the search meets
    assert_eq!(unlink(&["pretzel", "2,4,6", "--strict"]).0, 3);
    assert_eq!(unlink(&["pretzel", "2,4,6"]).0, 0);
    assert!(unlink(&["pretzel", "-1,3,3"])
        .1
        .contains("reduces to  rational"));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(unlink(&["fraction", "6*2"]).0, 2);
    assert_eq!(unlink(&["fraction", "4 x"]).0, 2);
    assert_eq!(unlink(&["pretzel", "3,3"]).0, 2);
    assert_eq!(unlink(&["verify"]).0, 2);
    assert_eq!(unlink(&["verify", "--families", "--grid", "k=oops"]).0, 2);
    let (code, _, err) = unlink(&["enumerate", "--crossings", "25"]);
    assert_eq!(code, 3);
    assert!(err.contains("25"));
}

#[test]
fn enumeration_output_is_deterministic() {
    let first = unlink(&["enumerate", "--crossings", "10", "--format", "csv"]);
    let second = unlink(&["enumerate", "--crossings", "10", "--format", "csv"]);
    assert_eq!(first.0, 0);
    assert_eq!(first.1, second.1);
    assert_eq!(first.1.lines().count(), 73);

    let (_, gapful, _) = unlink(&[
        "enumerate",
        "--crossings",
        "10",
        "--gap-only",
        "--format",
        "csv",
    ]);
    assert_eq!(
        gapful,
        "word,p,q_star,crossings,components,u_M,u_BJ,delta\n4 1 5,29,5,10,1,3,2,1\n"
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n11.json");
    let (code, out, _) = unlink(&[
        "enumerate",
        "--crossings",
        "11",
        "--gap-only",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!((code, out.as_str()), (0, ""));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn verify_commands() {
    let (code, out, _) = unlink(&["verify", "--section3"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.matches(", match").count(), 8);

    let (code, out, _) = unlink(&["verify", "--families", "--grid", "k=1..2"]);
    assert_eq!(code, 1);
    assert!(
        out.contains("table-1: 2 match, 0 mismatch, 0 skip"),
        "{out}"
    );
    assert!(out.contains("table-44 (suspect)"));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    let p = path.to_str().unwrap();
    let (code, out, _) = unlink(&["cache", "--warm", "9", "--save", p]);
    assert_eq!(code, 0);
    let saved = std::fs::read_to_string(&path).unwrap();
    assert!(out.contains(&format!("saved {} entries", saved.lines().count())));

    let (code, out, _) = unlink(&["cache", "--load", p]);
    assert_eq!(code, 0);
    assert!(out.contains(&format!("loaded {} entries", saved.lines().count())));

    let (code, out, _) = unlink(&["--cache-file", p, "gap", "4 1 4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("u_M=3 u_BJ=2 delta=1"));
    assert!(std::fs::read_to_string(&path).unwrap().lines().count() >= saved.lines().count());

    assert_eq!(
        unlink(&[
            "cache",
            "--load",
            dir.path().join("missing").to_str().unwrap()
        ])
        .0,
        2
    );
}
