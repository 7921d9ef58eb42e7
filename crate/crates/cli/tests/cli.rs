use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use motlab::measures::{marginals_from_calls, CallQuoteCurve, Peacock};
use tempfile::TempDir;

const TWO_POINT: &str = r#"{"dim":1,"times":[0,1],"marginals":[
  {"points":[[1]],"weights":[1]},
  {"points":[[0],[2]],"weights":[0.5,0.5]}]}"#;

const REVERSED: &str = r#"{"dim":1,"times":[0,1],"marginals":[
  {"points":[[0],[2]],"weights":[0.5,0.5]},
  {"points":[[1]],"weights":[1]}]}"#;

const THREE_TIME: &str = r#"{"dim":1,"times":[0,0.5,1],"marginals":[
  {"points":[[2]],"weights":[1]},
  {"points":[[1],[2],[3]],"weights":[0.25,0.5,0.25]},
  {"points":[[0],[1],[2],[3],[4]],"weights":[0.125,0.1875,0.375,0.1875,0.125]}]}"#;

const ABS_INCREMENT: &str = r#"{"kind":"marginal_grid","times":[0,1],"func":{"fn":"abs_increment","from":0,"to":1}}"#;
const LATE_INCREMENT: &str =
    r#"{"kind":"marginal_grid","times":[0,0.5,1],"func":{"fn":"abs_increment","from":1,"to":2}}"#;
const TABLE: &str = r#"{"kind":"marginal_grid","times":[0,0.5,1],"func":{"fn":"table","default":0,"rows":[
  {"key":[[2],[1],[2]],"value":1},
  {"key":[[2],[3],[4]],"value":0.5},
  {"key":[[2],[3],[0]],"value":0.75}]}}"#;
const CALL_AT_ONE: &str =
    r#"{"kind":"marginal_grid","times":[1],"func":{"fn":"call","index":0,"coord":0,"strike":1}}"#;
const QUOTES: &str = r#"{"quotes":[
  {"maturity":0.5,"strikes":[0,1,2],"prices":[1,0.25,0],"spot":1},
  {"maturity":1,"strikes":[0,1,2],"prices":[1,0.5,0],"spot":1}]}"#;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn motlab(args: &[&str]) -> Output {
    motlab_env(args, &[])
}

fn motlab_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_motlab"));
    cmd.args(args).env_remove("MOTLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn bounds(o: &Output) -> (f64, f64) {
    let text = stdout(o);
    let get = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .map(|v| v.trim().parse().unwrap())
            .unwrap_or_else(|| panic!("no {key} in {text}"))
    };
    (get("lower "), get("upper "))
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn validate_accepts_peacock() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let o = motlab(&["validate", "--input", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn validate_reports_witness_strike() {
    let sb = Sandbox::new();
    let p = sb.file("rev.json", REVERSED);
    let out = sb.path("out");
    let o = motlab(&["validate", "--input", s(&p), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness strike: 1"), "{}", stdout(&o));
    let report = read_json(&out.join("validate.json"));
    assert_eq!(report["valid"], false);
    assert_eq!(report["violation"]["witness"]["CallStrike"]["strike"], 1.0);
}

#[test]
fn validate_calibrates_quotes() {
    let sb = Sandbox::new();
    let q = sb.file("quotes.json", QUOTES);
    let out = sb.path("out");
    let o = motlab(&["validate", "--input", s(&q), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let curves: Vec<CallQuoteCurve> = serde_json::from_value(read_json(&q)["quotes"].clone()).unwrap();
    let written: Peacock = serde_json::from_str(&std::fs::read_to_string(out.join("peacock.json")).unwrap()).unwrap();
    assert_eq!(written.times(), &[0.0, 0.5, 1.0]);
    assert_eq!(written.law(0).points(), &[vec![1.0]]);
    for (k, c) in curves.iter().enumerate() {
        assert_eq!(written.law(k + 1), &marginals_from_calls(c).unwrap());
    }
}

#[test]
fn validate_rejects_arbitrage_quotes() {
    let sb = Sandbox::new();
    let q = sb.file(
        "quotes.json",
        r#"{"quotes":[{"maturity":1,"strikes":[0,1,2],"prices":[1,0.7,0.2],"spot":1}]}"#,
    );
    assert_eq!(motlab(&["validate", "--input", s(&q)]).status.code(), Some(1));
}

#[test]
fn price_forced_coupling() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let x = sb.file("x.json", ABS_INCREMENT);
    for arith in ["float", "rational"] {
        let o = motlab(&["price", "--input", s(&p), "--payoff", s(&x), "--arith", arith]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(bounds(&o), (1.0, 1.0));
    }
}

#[test]
fn price_three_time_regression() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", THREE_TIME);
    for (payoff, want) in [(LATE_INCREMENT, (0.4375, 0.875)), (TABLE, (0.015625, 0.1875))] {
        let x = sb.file("x.json", payoff);
        let exact = bounds(&motlab(&["price", "--input", s(&p), "--payoff", s(&x), "--arith", "rational"]));
        assert_eq!(exact, want);
        let float = bounds(&motlab(&["price", "--input", s(&p), "--payoff", s(&x)]));
        assert!((float.0 - want.0).abs() < 1e-12 && (float.1 - want.1).abs() < 1e-12, "{float:?}");
    }
}

#[test]
fn price_missing_file_is_io_error() {
    let sb = Sandbox::new();
    let x = sb.file("x.json", ABS_INCREMENT);
    let o = motlab(&["price", "--input", s(&sb.path("absent.json")), "--payoff", s(&x)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn price_rejects_bad_flags() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let x = sb.file("x.json", ABS_INCREMENT);
    assert_eq!(motlab(&["price", "--input", s(&p), "--payoff", s(&x), "--mode", "loose"]).status.code(), Some(2));
    let lattice_rational = motlab(&["price", "--input", s(&p), "--payoff", s(&x), "--n", "2", "--arith", "rational"]);
    assert_eq!(lattice_rational.status.code(), Some(2));
}

#[test]
fn price_on_lattice_writes_certificates() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let x = sb.file("x.json", ABS_INCREMENT);
    let out = sb.path("out");
    let o = motlab(&["price", "--input", s(&p), "--payoff", s(&x), "--n", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (lo, hi) = bounds(&o);
    assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    let result = read_json(&out.join("price.json"));
    assert!(result["upper_certificate"].is_object());
    assert_eq!(read_json(&out.join("config.json"))["lattice"]["n"], 1);
}

#[test]
fn lattice_constant_path_has_zero_error() {
    let sb = Sandbox::new();
    let w = sb.file("w.json", r#"{"path":{"dim":1,"t0_value":[1],"jumps":[]}}"#);
    let out = sb.path("out");
    let o = motlab(&["lattice", "--input", s(&w), "--n", "2..5", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("lattice.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let cells: Vec<&str> = r.split(',').collect();
        assert_eq!(cells[2], "0");
        assert_eq!(&cells[6..], ["true", "true"]);
    }
}

#[test]
fn lattice_non_member_names_condition() {
    let sb = Sandbox::new();
    let w = sb.file(
        "w.json",
        r#"{"partition":{"times":[0,0.3,1],"values":[[1],[1.5],[1.5]],"marginal_idx":[0,2]}}"#,
    );
    let o = motlab(&["lattice", "--input", s(&w), "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("not a member") && text.contains("time step ending at index 1"), "{text}");
}

#[test]
fn lattice_error_decays() {
    let o = motlab(&["lattice", "--fixture", "sko_stopo", "--n", "3..7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rho = |path: &str, n: &str| -> f64 {
        text.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|c| c[0] == path && c[1] == n)
            .map(|c| c[2].parse().unwrap())
            .unwrap()
    };
    for path in ["0", "1", "2", "3"] {
        assert!(rho(path, "7") < rho(path, "3") / 4.0);
    }
}

#[test]
fn stability_zero_radius_rows() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", THREE_TIME);
    let x = sb.file("x.json", LATE_INCREMENT);
    let out = sb.path("out");
    let o = motlab(&["stability", "--input", s(&p), "--payoff", s(&x), "--radii", "0", "--seeds", "1..3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("stability.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("radius,seed,lower,upper,eps,status,w1_shift"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!((r[0], r[4], r[6]), ("0", "0", "0"));
    }
}

#[test]
fn stability_sweep_is_thread_independent() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", THREE_TIME);
    let x = sb.file("x.json", TABLE);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = sb.path(&format!("out{threads}"));
        let o = motlab_env(
            &["stability", "--input", s(&p), "--payoff", s(&x), "--seeds", "1..4", "--out", s(&out)],
            &[("MOTLAB_THREADS", threads)],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out.join("stability.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_thread_count_is_config_error() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let o = motlab_env(&["validate", "--input", s(&p)], &[("MOTLAB_THREADS", "zero")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dn_reaches_tree_value() {
    let sb = Sandbox::new();
    let t = sb.file("tree.json", r#"{"n":1,"dim":1,"times":[0,1],"radius":2,"j_max":1}"#);
    let x = sb.file("x.json", CALL_AT_ONE);
    let out = sb.path("out");
    let o = motlab(&["dn", "--input", s(&t), "--payoff", s(&x), "--n", "0,1,2,4", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("dn.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,value,expected_drift,gap_to_V0"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let summary = read_json(&out.join("dn.json"));
    assert!((values[3] - summary["v0"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn reruns_are_byte_identical() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", THREE_TIME);
    let x = sb.file("x.json", TABLE);
    let t = sb.file("tree.json", r#"{"n":1,"dim":1,"times":[0,0.5,1],"radius":2,"j_max":1}"#);
    let c = sb.file("c.json", CALL_AT_ONE);
    let runs: Vec<Vec<String>> = vec![
        vec!["price".into(), "--input".into(), s(&p).into(), "--payoff".into(), s(&x).into()],
        vec!["stability".into(), "--input".into(), s(&p).into(), "--payoff".into(), s(&x).into(), "--seeds".into(), "1..3".into()],
        vec!["dn".into(), "--input".into(), s(&t).into(), "--payoff".into(), s(&c).into()],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut snapshots = Vec::new();
        for rep in 0..2 {
            let out = sb.path(&format!("run{k}_{rep}"));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.extend(["--out", s(&out)]);
            let o = motlab(&full);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            assert!(files.iter().any(|f| f.0 == "config.json"));
            snapshots.push(files);
        }
        assert_eq!(snapshots[0], snapshots[1], "run {k}");
    }
}

#[test]
fn config_records_input_digests() {
    let sb = Sandbox::new();
    let p = sb.file("p.json", TWO_POINT);
    let out = sb.path("out");
    motlab(&["validate", "--input", s(&p), "--out", s(&out)]);
    let cfg = read_json(&out.join("config.json"));
    let digest = cfg["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.bytes().all(|b| b.is_ascii_hexdigit()));
}
