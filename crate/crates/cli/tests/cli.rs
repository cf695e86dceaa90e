use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn pcpnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcpnet"))
        .args(args)
        .output()
        .expect("run pcpnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CHAIN_PCP: &str = "pcpnet\nvar A\nvar B <- A\nA : 1>0 (0.8)\nB | A=0 : 1>0 (0.4)\nB | A=1 : 1>0 (0.5)\n";
const CHAIN_DET: &str = "cpnet\nvar A\nvar B <- A\nA : 1>0\nB | A=0 : 0>1\nB | A=1 : 1>0\n";

#[test]
fn identical_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let pcp = write(dir.path(), "p.txt", CHAIN_PCP);
    let det = write(dir.path(), "d.txt", CHAIN_DET);
    let args = ["--from", "A=1,B=1", "--to", "A=1,B=1"];
    let out = pcpnet(&[&["dominance", pcp.as_str()], &args[..]].concat());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0\n");
    let out = pcpnet(&[&["dominance", det.as_str()], &args[..]].concat());
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn fpt_and_oracle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let gen = pcpnet(&[
        "gen", "--vars", "6", "--shape", "balanced", "--kind", "pcp", "--seed", "11",
    ]);
    assert!(gen.status.success());
    let file = write(dir.path(), "g.txt", &stdout(&gen));
    let pairs = [
        ("V0=1,V1=1,V2=1,V3=1,V4=1,V5=1", "V0=0,V1=1,V2=0,V3=1,V4=0,V5=1"),
        ("V0=0,V1=0,V2=0,V3=0,V4=0,V5=0", "V0=1,V1=1,V2=0,V3=0,V4=1,V5=0"),
        ("V0=1,V1=0,V2=1,V3=0,V4=1,V5=0", "V0=1,V1=0,V2=1,V3=1,V4=1,V5=0"),
    ];
    for (from, to) in pairs {
        let value = |method: &str| -> f64 {
            let out = pcpnet(&[
                "dominance",
                &file,
                "--from",
                from,
                "--to",
                to,
                "--method",
                method,
                "--json",
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
            assert_eq!(v["query"], "dominance");
            assert_eq!(v["method"], method);
            assert_eq!(v["slots"], 11);
            v["result"].as_f64().unwrap()
        };
        assert!((value("fpt") - value("oracle")).abs() <= 1e-9);
    }
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--vars", "12", "--shape", "star", "--kind", "pcp", "--seed", "7"];
    let a = pcpnet(&args);
    let b = pcpnet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("pcpnet\nvar V0\nvar V1 <- V0\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "p.txt", CHAIN_PCP);
    let bad = write(dir.path(), "bad.txt", "pcpnet\nvar A\nA : 1>0\n");
    let syntax = write(dir.path(), "syntax.txt", "pcpnet\nvar A\nA ; 1>0 (0.5)\n");

    assert_eq!(pcpnet(&["validate", &good]).status.code(), Some(0));
    assert_eq!(pcpnet(&["--help"]).status.code(), Some(0));
    assert_eq!(pcpnet(&["validate"]).status.code(), Some(1));
    assert_eq!(
        pcpnet(&["dominance", &good, "--from", "A=1", "--to", "A=1,B=0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pcpnet(&[
            "dominance",
            &good,
            "--from",
            "A=1,B=0",
            "--to",
            "A=1,B=1",
            "--method",
            "linear"
        ])
        .status
        .code(),
        Some(1)
    );

    let out = pcpnet(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(!err.contains("panicked"));

    let out = pcpnet(&["validate", &syntax]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 3"));

    assert_eq!(pcpnet(&["validate", "/nonexistent/file"]).status.code(), Some(2));

    // 13-variable chain: 25 slots, beyond the exhaustive oracle.
    let gen = pcpnet(&[
        "gen", "--vars", "13", "--shape", "chain", "--kind", "pcp", "--seed", "1",
    ]);
    let big = write(dir.path(), "big.txt", &stdout(&gen));
    let o: Vec<String> = (0..13).map(|i| format!("V{i}=1")).collect();
    let o2: Vec<String> = (0..13).map(|i| format!("V{i}={}", (i == 12) as u8)).collect();
    let out = pcpnet(&[
        "dominance",
        &big,
        "--from",
        &o.join(","),
        "--to",
        &o2.join(","),
        "--method",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pcpnet"))
        .args(["dominance", "-", "--from", "A=1,B=0", "--to", "A=0,B=0"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(CHAIN_PCP.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.8\n");
}

#[test]
fn deterministic_queries() {
    let dir = tempfile::tempdir().unwrap();
    let det = write(dir.path(), "d.txt", CHAIN_DET);
    let yes = pcpnet(&["dominance", &det, "--from", "A=1,B=1", "--to", "A=1,B=0"]);
    assert_eq!(stdout(&yes), "true\n");
    for method in ["oracle", "fpt", "linear"] {
        let no = pcpnet(&[
            "dominance",
            &det,
            "--from",
            "A=1,B=0",
            "--to",
            "A=1,B=1",
            "--method",
            method,
        ]);
        assert_eq!(stdout(&no), "false\n");
    }
    assert_eq!(stdout(&pcpnet(&["optimal", &det])), "A=1,B=1\n");
    assert_eq!(stdout(&pcpnet(&["optimal", &det, "--outcome", "A=1,B=1"])), "true\n");
}

#[test]
fn incomplete_completion() {
    let dir = tempfile::tempdir().unwrap();
    let inc = write(dir.path(), "i.txt", "cpnet incomplete\nvar A\nvar B <- A\nA : 0>1\n");
    for method in ["completion", "oracle"] {
        let out = pcpnet(&[
            "dominance",
            &inc,
            "--from",
            "A=0,B=1",
            "--to",
            "A=0,B=0",
            "--method",
            method,
        ]);
        assert_eq!(stdout(&out), "true\n");
    }
    let out = pcpnet(&["dominance", &inc, "--from", "A=1,B=1", "--to", "A=0,B=1"]);
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn optimal_and_condorcet() {
    let dir = tempfile::tempdir().unwrap();
    let pcp = write(dir.path(), "p.txt", CHAIN_PCP);
    assert_eq!(stdout(&pcpnet(&["optimal", &pcp])), "A=1,B=0\n0.4\n");
    assert_eq!(stdout(&pcpnet(&["optimal", &pcp, "--outcome", "A=0,B=0"])), "0.12\n");
    let json = stdout(&pcpnet(&["optimal", &pcp, "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["result"], "A=1,B=0");
    assert_eq!(v["probability"], 0.4);

    // B | A=1 is exactly 0.5, so both values of B tie at the threshold.
    assert_eq!(stdout(&pcpnet(&["condorcet", &pcp, "--all"])), "A=1,B=0\nA=1,B=1\n");
    assert_eq!(stdout(&pcpnet(&["condorcet", &pcp])), "A=1,B=0\n");
    assert_eq!(stdout(&pcpnet(&["condorcet", &pcp, "--outcome", "A=0,B=0"])), "false\n");
}

#[test]
fn aggregate_and_sample() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", CHAIN_DET);
    let b = write(
        dir.path(),
        "b.txt",
        "cpnet\nvar A\nvar B <- A\nA : 0>1\nB | A=0 : 0>1\nB | A=1 : 0>1\n",
    );
    let out_path = dir.path().join("agg.txt");
    let out = pcpnet(&["aggregate", &a, &b, "-o", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text,
        "pcpnet\nvar A\nvar B <- A\nA : 1>0 (0.5)\nB | A=0 : 1>0 (0)\nB | A=1 : 1>0 (0.5)\n"
    );

    let agg = out_path.to_str().unwrap();
    let s1 = pcpnet(&["sample", agg, "--seed", "5", "--count", "3"]);
    let s2 = pcpnet(&["sample", agg, "--seed", "5", "--count", "3"]);
    assert!(s1.status.success());
    assert_eq!(s1.stdout, s2.stdout);
    assert_eq!(stdout(&s1).matches("cpnet\n").count(), 3);

    let pcp = write(dir.path(), "p.txt", CHAIN_PCP);
    assert_eq!(pcpnet(&["aggregate", &pcp, "-o", "-"]).status.code(), Some(2));
}

#[test]
fn threads_flag() {
    let dir = tempfile::tempdir().unwrap();
    let pcp = write(dir.path(), "p.txt", CHAIN_PCP);
    let out = pcpnet(&[
        "--threads",
        "2",
        "dominance",
        &pcp,
        "--from",
        "A=1,B=1",
        "--to",
        "A=0,B=0",
        "--method",
        "oracle",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.56\n");
}
