use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn abelrd(args: &[&str]) -> Output {
    abelrd_env(args, &[])
}

fn abelrd_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_abelrd"));
    cmd.args(args).env_remove("ABELRD_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).to_string_lossy().into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn decompose_orders() {
    let o = abelrd(&["decompose", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("abelian groups of order 8: 3"), "{text}");
    for class in ["Z8", "Z4+Z2", "Z2^3"] {
        assert!(text.lines().any(|l| l.trim() == class), "{class} missing");
    }
    let v = json(&abelrd(&["decompose", "12", "--json"]));
    assert_eq!(v["decomposition"], "Z4+Z3");
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    let v = json(&abelrd(&["decompose", "4", "4", "--json"]));
    assert_eq!(v["decomposition"], "Z4^2");
    assert_eq!(abelrd(&["decompose", "1"]).status.code(), Some(2));
    assert_eq!(abelrd(&["decompose", "x"]).status.code(), Some(2));
}

#[test]
fn embed_lists_embeddings() {
    let o = abelrd(&["embed", &spec("xor_lossless.json"), "--group", "Z2", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let results = v[0]["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["group"], "Z2");
    assert_eq!(results[0]["embeddings"].as_array().unwrap().len(), 1);

    let auto = json(&abelrd(&["embed", &spec("xor_lossless.json")]));
    let groups: Vec<&str> = auto[0]["results"].as_array().unwrap().iter().map(|r| r["group"].as_str().unwrap()).collect();
    assert!(groups.contains(&"Z2") && groups.contains(&"Z2^2"), "{groups:?}");

    // three function values cannot come from a group of order two
    let dir = tempfile::tempdir().unwrap();
    let three = write(
        dir.path(),
        "three.json",
        r#"{"pmf": [[0.25, 0.25], [0.25, 0.25]], "distortion": {"preset": "hamming-on-function", "function": [[0, 1], [1, 2]]}}"#,
    );
    let o = abelrd(&["embed", three.to_str().unwrap(), "--group", "Z2", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)[0]["results"][0]["embeddings"].as_array().unwrap().is_empty());
    assert_eq!(abelrd(&["embed", three.to_str().unwrap(), "--group", "Q8"]).status.code(), Some(2));
}

#[test]
fn region_outputs() {
    let o = abelrd(&["region", &spec("xor_lossless.json"), "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "D,R1,R2,Rsum,group,permutation,options,channel_id,embedding,mode,problem");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let t1 = rows.iter().find(|r| r[9] == "theorem1").unwrap();
    assert_eq!(t1[3], "0.937991");
    let bt = rows.iter().find(|r| r[9] == "berger-tung").unwrap();
    assert_eq!(bt[3], "1.469");

    let o = abelrd(&["region", &spec("xor_lossless.json"), "--mode", "theorem1"]);
    let v = json(&o);
    assert_eq!(v["tool"], "abelrd");
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    assert!(v["problems"][0].get("berger_tung").is_none());

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = abelrd(&["region", &spec("xor_lossless.json"), "--out", "csv", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("D,R1"));
}

#[test]
fn region_table2_groups() {
    let v = json(&abelrd(&["region", &spec("table2.json"), "--mode", "theorem1"]));
    let best = &v["problems"][3]["theorem1"]["best_by_group"];
    assert!((best["Z4^2"]["sum_rate"].as_f64().unwrap() - 1.7815).abs() < 5e-4);
    assert!((best["Z2^3"]["sum_rate"].as_f64().unwrap() - 1.9395).abs() < 5e-4);
}

#[test]
fn region_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(abelrd(&["region", "/nonexistent/spec.json"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"pmf": [[0.5, 0.6]], "distortion": {"preset": "lossless"}}"#);
    assert_eq!(abelrd(&["region", bad.to_str().unwrap()]).status.code(), Some(2));
    let guard = write(
        dir.path(),
        "guard.json",
        r#"{"pmf": [[0.25, 0.25], [0.25, 0.25]], "distortion": {"preset": "lossless"},
            "groups": {"policy": "list", "groups": ["Z2^2"]}, "sweep": {"permutation_cap": 1}}"#,
    );
    let o = abelrd(&["region", guard.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource guard"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["region", &spec("table2.json"), "--out", "csv"];
    let one = abelrd_env(&args, &[("ABELRD_THREADS", "1")]);
    let three = abelrd_env(&args, &[("ABELRD_THREADS", "3")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(abelrd_env(&["decompose", "4"], &[("ABELRD_THREADS", "0")]).status.code(), Some(2));
    assert_eq!(abelrd_env(&["decompose", "4"], &[("ABELRD_THREADS", "many")]).status.code(), Some(2));
}

#[test]
fn simulate_checks() {
    let v = json(&abelrd(&["simulate", "--check", "lemma7", "--p", "2", "--r", "1", "--n", "3", "--seed", "1"]));
    let counts: Vec<u64> = v["entries"].as_array().unwrap().iter().map(|e| e["observed"].as_u64().unwrap()).collect();
    assert_eq!(counts, [6, 1]);
    assert_eq!(v["mode"], "exhaustive");

    let o = abelrd(&["simulate", "--check", "lemma8", "--p", "2", "--r", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["passed"], true);

    for check in ["lemma4", "lemma6"] {
        let o = abelrd(&["simulate", "--check", check, "--p", "2", "--r", "2", "--n", "2", "--k", "1", "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{check}");
        assert_eq!(json(&o)["max_deviation"], 0.0);
    }

    let o = abelrd(&["simulate", "--check", "km", "--n", "60", "--k", "40", "--trials", "50", "--matrix-seeds", "5", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["config"]["seed"], 7);
    assert!(v["summary"]["error_rate"].as_f64().unwrap() <= 0.1);

    // the spec supplies the pmf and the simulation config
    let o = abelrd(&["simulate", &spec("xor_lossless.json"), "--check", "km", "--n", "40", "--k", "30", "--trials", "20", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["config"]["matrix_seeds"], 20);

    assert_eq!(abelrd(&["simulate", "--check", "km"]).status.code(), Some(2), "seed is mandatory");
    assert_eq!(abelrd(&["simulate", "--check", "lemma8", "--p", "6", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--check", "cover", "--n", "12", "--k", "4", "--trials", "30", "--seed", "11"];
    let a = abelrd_env(&args, &[("ABELRD_THREADS", "1")]);
    let b = abelrd_env(&args, &[("ABELRD_THREADS", "2")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn envelope_command() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "one.csv", "D,Rsum\n0.2,1.5\n");
    assert_eq!(stdout(&abelrd(&["envelope", single.to_str().unwrap()])), "D,Rsum\n0.2,1.5\n");
    // the middle point is on the chord and the last is dominated
    let pts = write(dir.path(), "pts.csv", "D,Rsum,extra\n0,2,a\n0.1,1.5,b\n0.2,1,c\n0.3,1.2,d\n");
    assert_eq!(stdout(&abelrd(&["envelope", pts.to_str().unwrap()])), "D,Rsum\n0,2\n0.2,1\n");

    let region = abelrd(&["region", &spec("table2.json"), "--out", "csv"]);
    let csv = write(dir.path(), "region.csv", &stdout(&region));
    let o = abelrd(&["envelope", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() >= 2);

    let bad = write(dir.path(), "bad.csv", "D,Rsum\n0.1,abc\n");
    assert_eq!(abelrd(&["envelope", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = write(dir.path(), "missing.csv", "D,R\n0.1,1\n");
    assert_eq!(abelrd(&["envelope", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bundled_specs_round_trip() {
    for name in ["table2.json", "xor_lossy.json", "xor_lossless.json"] {
        let text = std::fs::read_to_string(spec(name)).unwrap();
        let parsed = abelrd::cli::SpecFile::parse(&text).unwrap();
        let again = abelrd::cli::SpecFile::parse(&parsed.canonical_json()).unwrap();
        assert_eq!(parsed, again, "{name}");
    }
}
