use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab")).args(args).output().expect("spawn wlab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_writes_csv_to_stdout() {
    let out = wlab(&["eval", "--g", "triangle", "--alpha", "0.5", "--x", "0,0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,w");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
    // W(1/2) = 1/2 when every later phase is 0
    assert_eq!(lines[2], "5.0000000000000000e-1,5.0000000000000000e-1");
}

#[test]
fn constants_match_the_desk_check() {
    let out = wlab(&["constants", "--alpha", "0.5", "--b", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["l0"], 39);
    assert!((v["c_alpha"].as_f64().unwrap() - 28.689).abs() < 1e-3);
}

#[test]
fn invalid_values_exit_with_code_2() {
    for args in [
        &["eval", "--alpha", "1.5", "--x", "0.1"][..],
        &["eval", "--b", "1", "--x", "0.1"],
        &["eval", "--g", "nonsense", "--x", "0.1"],
        &["figure", "--resolution", "32", "--out", "/tmp/never.ppm"],
        &["levelset", "--y", "0", "--m-max", "2"],
        &["probe-run", "--coords", "32", "--probes", "1"],
    ] {
        let out = wlab(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("wlab: "), "{}", stderr(&out));
    }
}

#[test]
fn unparseable_flags_exit_with_code_2() {
    let out = wlab(&["eval", "--alpha", "half"]);
    assert_eq!(code(&out), 2);
    let out = wlab(&["no-such-command"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn io_failures_exit_with_code_4() {
    let out = wlab(&["eval", "--x", "0.1", "--out", "/nonexistent-dir/w.csv"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let out = wlab(&["eval", "--config", "/nonexistent-dir/c.json"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"g": "triangle", "alpha": 0.5, "x": [0.3]}"#).unwrap();
    let from_file = wlab(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    let flags = wlab(&["eval", "--g", "triangle", "--alpha", "0.5", "--x", "0.3"]);
    assert_eq!(from_file.stdout, flags.stdout);

    let overridden = wlab(&["eval", "--config", s(&cfg), "--alpha", "0.7"]);
    let direct = wlab(&["eval", "--g", "triangle", "--alpha", "0.7", "--x", "0.3"]);
    assert_eq!(overridden.stdout, direct.stdout);
    assert_ne!(overridden.stdout, from_file.stdout);
}

#[test]
fn config_accepts_function_objects() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"g": {"terms": [{"weight": 1.0, "kind": "triangle"}]}, "alpha": 0.5, "x": [0.5]}"#,
    )
    .unwrap();
    let object = wlab(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&object), 0, "{}", stderr(&object));
    let named = wlab(&["eval", "--g", "triangle", "--alpha", "0.5", "--x", "0.5"]);
    assert_eq!(object.stdout, named.stdout);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"alpha": 0.5, "bogus": 1}"#).unwrap();
    let out = wlab(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));

    fs::write(&cfg, r#"{"alpha": "half"}"#).unwrap();
    let out = wlab(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));

    fs::write(&cfg, "[1, 2]").unwrap();
    let out = wlab(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certify_replays_explicit_pairs() {
    let out = wlab(&["certify", "--alpha", "0.5", "--x", "8192", "--y", "8193", "--exponent", "46"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("1/1 certificates verified"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("index,x,y,ln_gap,k_xy,k_prime,i,"));

    let out = wlab(&["certify", "--alpha", "0.5", "--x", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn figure_writes_a_parseable_image() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("f.pgm");
    let meta = dir.path().join("f.json");
    let out = wlab(&["figure", "--shifts", "0", "--resolution", "64", "--out", s(&img), "--meta", s(&meta)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bytes = fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P5\n64 64\n255\n"));
    assert_eq!(bytes.len(), 13 + 64 * 64);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(&meta).unwrap()).unwrap();
    assert_eq!(m["format"], "P5");
}

#[test]
fn thread_count_does_not_change_probe_logs() {
    let run = |threads: &str| {
        wlab(&[
            "--threads", threads, "probe-run", "--alpha", "0.7", "--probes", "3", "--levels-per-probe", "2",
            "--m-max", "8", "--hist-samples", "2048", "--seed", "9",
        ])
    };
    let one = run("1");
    let three = run("3");
    assert_eq!(code(&one), 0, "{}", stderr(&one));
    assert_eq!(one.stdout, three.stdout);
    let lines: Vec<serde_json::Value> =
        String::from_utf8(one.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["probe_index"], i);
    }
    assert_eq!(code(&wlab(&["--threads", "0", "eval", "--x", "0.1"])), 2);
}
