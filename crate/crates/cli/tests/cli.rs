use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn optsqueeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optsqueeze"))
        .args(args)
        .output()
        .expect("spawn optsqueeze")
}

fn ok(args: &[&str]) {
    let out = optsqueeze(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(args: &[&str]) -> i32 {
    optsqueeze(args).status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Columns of a headed CSV of floats.
fn columns(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_owned).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for rec in r.records() {
        for (c, v) in cols.iter_mut().zip(rec.unwrap().iter()) {
            c.push(v.parse().unwrap());
        }
    }
    (header, cols)
}

struct Scratch(tempfile::TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }
    fn at(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

#[test]
fn invalid_parameters_exit_2() {
    let d = Scratch::new();
    let out = d.at("g.csv");
    assert_eq!(code(&["spectral", "--state", "coherent", "--alpha", "nan", "-o", path(&out)]), 2);
    assert_eq!(code(&["spectral", "--n-lambda", "1000", "-o", path(&out)]), 2);
    assert_eq!(code(&["spectral", "--state", "file", "-o", path(&out)]), 2);
    assert_eq!(code(&["mc", "--state", "vacuum", "--samples", "100", "-o", path(&d.at("m.json"))]), 2);
    assert_eq!(
        code(&["sweep", "--family", "coherent", "--method", "optimal-povm", "--nbar", "16,4", "-o", path(&out)]),
        2
    );
    assert!(!out.exists());
}

#[test]
fn numerical_failures_exit_3() {
    let d = Scratch::new();
    let out = d.at("g.csv");
    let o = optsqueeze(&["spectral", "--lambda-halfwidth", "10", "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("chi"));
}

#[test]
fn missing_input_exits_4() {
    let d = Scratch::new();
    let missing = d.at("nope.csv");
    assert_eq!(
        code(&["spectral", "--state", "file", "--wavefunction", path(&missing), "-o", path(&d.at("g.csv"))]),
        4
    );
}

#[test]
fn absolute_frame_distribution_is_rejected_by_cost() {
    let d = Scratch::new();
    let dist = d.at("lnx.csv");
    ok(&["dist", "--strategy", "lnx", "--frame", "absolute", "-o", path(&dist)]);
    assert_eq!(json(&dist.with_extension("json"))["summary"]["captured"].as_f64().map(|c| c > 0.999), Some(true));
    assert_eq!(code(&["cost", "--kind", "ml", "--dist", path(&dist), "-o", path(&d.at("c.json"))]), 2);
}

#[test]
fn cost_of_distribution_file_matches_direct_cost() {
    let d = Scratch::new();
    let dist = d.at("p.csv");
    let (direct, from_file) = (d.at("direct.json"), d.at("file.json"));
    let state = ["--state", "coherent", "--alpha", "1"];
    ok(&[&["dist"][..], &state, &["-o", path(&dist)]].concat());
    ok(&[&["cost", "--kind", "fidelity"][..], &state, &["-o", path(&direct)]].concat());
    ok(&[&["cost", "--kind", "fidelity", "--dist", path(&dist)][..], &state, &["-o", path(&from_file)]].concat());
    let a = json(&direct)["expected_cost"].as_f64().unwrap();
    let b = json(&from_file)["expected_cost"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    assert!(a > 0.0 && a < 1.0);
}

#[test]
fn oracle_route_matches_default_route() {
    let d = Scratch::new();
    let (fft, mellin) = (d.at("fft.csv"), d.at("mellin.csv"));
    let state = ["--state", "displaced-squeezed", "--alpha", "1", "--z", "-0.5"];
    ok(&[&["spectral"][..], &state, &["-o", path(&fft)]].concat());
    ok(&[&["spectral", "--oracle"][..], &state, &["-o", path(&mellin)]].concat());
    let (h, a) = columns(&fft);
    let (_, b) = columns(&mellin);
    assert_eq!(h, ["mu", "g"]);
    assert_eq!(a[0], b[0]);
    let sup = a[1].iter().zip(&b[1]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-5, "{sup}");
    assert_eq!(json(&mellin.with_extension("json"))["metadata"]["route"], "mellin");
}

#[test]
fn wavefunction_file_round_trips() {
    let d = Scratch::new();
    let psi = d.at("psi.csv");
    let state = ["--state", "displaced-squeezed", "--alpha", "1.5", "--alpha-im", "0.5", "--z", "0.3"];
    ok(&[&["wavefunction"][..], &state, &["-o", path(&psi)]].concat());
    let (h, cols) = columns(&psi);
    assert_eq!(h, ["x", "re_psi", "im_psi"]);
    assert_eq!(cols[0].len(), 4096);

    let (from_state, from_file) = (d.at("a.csv"), d.at("b.csv"));
    ok(&[&["dist", "--t-halfwidth", "6"][..], &state, &["-o", path(&from_state)]].concat());
    ok(&["dist", "--t-halfwidth", "6", "--state", "file", "--wavefunction", path(&psi), "-o", path(&from_file)]);
    let (_, a) = columns(&from_state);
    let (_, b) = columns(&from_file);
    let sup = a[1].iter().zip(&b[1]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-6, "{sup}");
}

#[test]
fn malformed_wavefunction_file_exits_2() {
    let d = Scratch::new();
    let psi = d.at("psi.csv");
    std::fs::write(&psi, "x,re_psi,im_psi\n0,1,0\n1,1,0\n3,1,0\n").unwrap();
    assert_eq!(
        code(&["spectral", "--state", "file", "--wavefunction", path(&psi), "-o", path(&d.at("g.csv"))]),
        2
    );
    std::fs::write(&psi, "x,re,im\n0,1,0\n").unwrap();
    assert_eq!(
        code(&["spectral", "--state", "file", "--wavefunction", path(&psi), "-o", path(&d.at("g.csv"))]),
        2
    );
}

#[test]
fn sidecar_echoes_config_and_summary() {
    let d = Scratch::new();
    let out = d.at("p.csv");
    ok(&["dist", "--state", "coherent", "--alpha", "4", "--seed", "3", "-o", path(&out)]);
    let side = json(&out.with_extension("json"));
    assert_eq!(side["config"]["command"], "dist");
    assert_eq!(side["config"]["state"], "coherent");
    assert_eq!(side["config"]["alpha"], 4.0);
    assert_eq!(side["config"]["seed"], 3);
    assert_eq!(side["config"]["pipeline"]["t_points"], side["grid"]["n"]);
    let rmse = side["summary"]["rmse"].as_f64().unwrap();
    assert!((rmse - 0.125).abs() < 0.03 * 0.125, "{rmse}");
    let (h, cols) = columns(&out);
    assert_eq!(h, ["t", "p"]);
    assert_eq!(cols[0].len(), side["grid"]["n"].as_u64().unwrap() as usize);
}

#[test]
fn lnx_sidecar_reports_biased_mean() {
    let d = Scratch::new();
    let out = d.at("lnx.csv");
    ok(&["dist", "--strategy", "lnx", "-o", path(&out)]);
    let mean = json(&out.with_extension("json"))["summary"]["mean"].as_f64().unwrap();
    assert!((mean + 1.3285).abs() < 1e-2, "{mean}");
}

#[test]
fn json_format_writes_single_record() {
    let d = Scratch::new();
    let out = d.at("g.json");
    ok(&["spectral", "--format", "json", "-o", path(&out)]);
    let v = json(&out);
    let mu = v["data"]["mu"].as_array().unwrap();
    let g = v["data"]["g"].as_array().unwrap();
    assert_eq!(mu.len(), g.len());
    assert_eq!(v["config"]["format"], "json");
    // a csv run refuses a .json destination, which would clash with its sidecar
    assert_eq!(code(&["spectral", "-o", path(&out)]), 2);
}

#[test]
fn sweep_writes_table_and_fit() {
    let d = Scratch::new();
    let out = d.at("sweep.csv");
    ok(&[
        "sweep", "--family", "displaced-squeezed-optimal", "--method", "homodyne-mc",
        "--nbar", "4,16,64", "--samples", "20000", "--seed", "5", "-o", path(&out),
    ]);
    let (h, cols) = columns(&out);
    assert_eq!(h, ["nominal_nbar", "exact_nbar", "alpha", "z", "rmse", "bias"]);
    assert_eq!(cols[0], [4.0, 16.0, 64.0]);
    assert!(cols[4].windows(2).all(|w| w[1] < w[0]));
    let slope = json(&out.with_extension("json"))["fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.1, "{slope}");
}

#[test]
fn mc_record_is_seeded() {
    let d = Scratch::new();
    let (a, b, c) = (d.at("a.json"), d.at("b.json"), d.at("c.json"));
    let args = |seed: &'static str, out: &Path| {
        ok(&["mc", "--state", "coherent", "--alpha", "2", "--samples", "5000", "--seed", seed, "-o", path(out)]);
    };
    args("1", &a);
    args("1", &b);
    args("2", &c);
    let rmse = |p: &Path| json(p)["result"]["rmse"].as_f64().unwrap();
    assert_eq!(rmse(&a), rmse(&b));
    assert_ne!(rmse(&a), rmse(&c));
}

/// Shipped fixtures match what the current binary writes for the recorded
/// commands.
#[test]
fn golden_fixtures_are_current() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let commands = std::fs::read_to_string(root.join("golden/commands.txt")).unwrap();
    let d = Scratch::new();
    std::fs::create_dir(d.at("golden")).unwrap();
    let mut checked = 0;
    for line in commands.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let args: Vec<&str> = line.split_whitespace().collect();
        let out = Command::new(env!("CARGO_BIN_EXE_optsqueeze"))
            .args(&args)
            .current_dir(d.0.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{line}");
        let csv = *args.last().unwrap();
        for rel in [csv.to_owned(), csv.replace(".csv", ".json")] {
            let fresh = std::fs::read(d.at(&rel)).unwrap();
            let shipped = std::fs::read(root.join(&rel)).unwrap();
            assert!(fresh == shipped, "{rel} is stale; rerun scripts/golden.sh");
            checked += 1;
        }
    }
    assert_eq!(checked, 14);
}
