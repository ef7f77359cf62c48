use std::process::{Command, Output};

use racap_cli::{Cell, Table};
use serde_json::Value;

fn racap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_racap")).args(args).env_remove("RACAP_THREADS").output().unwrap()
}

fn table(args: &[&str]) -> Table {
    let out = racap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Table::read_csv(out.stdout.as_slice()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = racap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    racap(args).status.code().unwrap()
}

fn c(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

#[test]
fn bd_thresholds_two_users() {
    let t = table(&["thresholds", "--model", "bd", "--m", "2"]);
    assert_eq!(t.columns, ["k", "p", "rate"]);
    assert_eq!(t.rows[0], vec![Cell::Int(1), Cell::Num(0.5), Cell::Num(1.0)]);
    assert_eq!(t.get_param("model"), Some("bd"));
}

#[test]
fn poisson_first_boundary_is_one() {
    // λ/1 · e^{-λ} = λ/2 · e^{-λ}(1 + λ) gives λ = 1.
    let t = table(&["thresholds", "--model", "poisson", "--k-max", "1"]);
    assert_eq!(t.columns, ["k", "lambda", "rate"]);
    assert!((t.values("lambda").unwrap()[0] - 1.0).abs() < 1e-9);
}

#[test]
fn flag_errors_exit_two() {
    assert_eq!(code(&["thresholds", "--model", "bd"]), 2);
    assert_eq!(code(&["thresholds", "--model", "awgn", "--m", "4"]), 2);
    assert_eq!(code(&["thresholds", "--model", "poisson"]), 2);
    assert_eq!(code(&["thresholds", "--model", "bd", "--m", "4", "--snr-db", "3"]), 2);
    assert_eq!(code(&["thresholds", "--model", "nope", "--m", "4"]), 2);
    assert_eq!(code(&["throughput", "--model", "bd", "--m", "4", "--curves", ""]), 2);
    assert_eq!(code(&["throughput", "--model", "bd", "--m", "4", "--curves", "CSI"]), 2);
    assert_eq!(code(&["throughput", "--model", "bd", "--m", "4", "--grid", "0"]), 2);
    assert_eq!(code(&["region", "--n1", "1", "--n2", "1"]), 2);
    assert_eq!(code(&["region", "--n1", "1", "--n2", "1", "--check", "1,2"]), 2);
    assert_eq!(code(&["simulate", "--model", "bd", "--m", "4", "--p", "1.5"]), 2);
    assert_eq!(code(&["simulate", "--model", "bd", "--m", "4", "--p", "0.5", "--rate", "fast"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn awgn_four_user_curves() {
    let t = table(&["throughput", "--model", "awgn", "--m", "4", "--snr-db", "15"]);
    assert_eq!(t.columns, ["p", "T_lower", "T_upper", "CSI", "AD", "ML"]);
    assert_eq!(t.rows.len(), 100);
    let p = t.values("p").unwrap();
    assert!((p[0] - 0.01).abs() < 1e-15 && p[99] == 1.0);
    // Everyone is active at p = 1, so every curve is the 4-user sum capacity.
    let snr = 10f64.powf(1.5);
    let last = &t.rows[99];
    for cell in &last[1..] {
        assert!((cell.as_f64().unwrap() - c(4.0 * snr)).abs() < 1e-11, "{last:?}");
    }
}

#[test]
fn poisson_curves_peak_at_one_over_e() {
    let t = table(&["throughput", "--model", "poisson", "--grid", "500", "--lambda-max", "5"]);
    assert_eq!(t.columns, ["lambda", "T_poisson", "ALOHA"]);
    let aloha = t.values("ALOHA").unwrap();
    let tp = t.values("T_poisson").unwrap();
    let peak = aloha.iter().copied().fold(0.0, f64::max);
    assert!((peak - (-1f64).exp()).abs() < 1e-6);
    assert!(tp.iter().zip(&aloha).all(|(a, b)| a >= &(b - 1e-12)));
}

#[test]
fn bd_region_vertices_one_one() {
    // Dominant corners of {r1, r2 <= 1, r1 + r22 <= 1, r2 + r12 <= 1, r12 <= r1, r22 <= r2}.
    let t = table(&["region", "--n1", "1", "--n2", "1", "--vertices"]);
    assert_eq!(t.columns, ["vertex", "r1", "r2", "r12", "r22"]);
    let mut got: Vec<Vec<f64>> = t.rows.iter().map(|r| r[1..].iter().map(|c| c.as_f64().unwrap()).collect()).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(got, vec![vec![0.0, 1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0, 0.0]]);
}

#[test]
fn region_membership() {
    let t = table(&["region", "--n1", "2", "--n2", "1", "--check", "0,0,0,0"]);
    assert_eq!(t.rows[0][4], Cell::Text("inside".into()));
    let t = table(&["region", "--n1", "2", "--n2", "1", "--check", "2,1,1,1"]);
    assert_eq!(t.rows[0][4], Cell::Text("outside".into()));
    let t = table(&["region", "--snr1-db", "10", "--snr2-db", "0", "--check", "0,0,0,0"]);
    assert_eq!(t.columns, ["r1", "r2", "r12", "r22", "outer", "inner"]);
    assert_eq!(&t.rows[0][4..], &[Cell::Text("inside".into()), Cell::Text("inside".into())]);
}

#[test]
fn awgn_region_has_fourteen_vertices() {
    let t = table(&["region", "--snr1-db", "20", "--snr2-db", "10", "--vertices"]);
    assert_eq!(t.rows.len(), 14);
}

#[test]
fn gap_command() {
    let t = table(&["gap", "--snr1-db", "10", "--snr2-db", "10"]);
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0][4], Cell::Text("true".into()));
    assert!(t.values("max_distance").unwrap()[0] <= 3f64.sqrt() / 2.0);
    assert_eq!(code(&["gap", "--snr1-db", "0", "--snr2-db", "10"]), 2);
    let sweep = table(&["gap", "--sweep"]);
    // 11 dB values, pairs with P1 >= P2.
    assert_eq!(sweep.rows.len(), 66);
    assert!(sweep.rows.iter().all(|r| r[4] == Cell::Text("true".into())));
}

fn sim_row(v: &Value) -> &Value {
    &v["rows"][0]
}

#[test]
fn simulate_is_deterministic_and_matches_policy() {
    let args = ["simulate", "--model", "bd", "--m", "4", "--p", "0.35", "--slots", "400000", "--seed", "11"];
    let a = racap(&args);
    let b = racap(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let row = sim_row(&v);
    let (emp, se, ana) = (
        row["empirical_sum_rate"].as_f64().unwrap(),
        row["std_error"].as_f64().unwrap(),
        row["analytic"].as_f64().unwrap(),
    );
    // BD m = 4 at p = 0.35 uses rate 1/2 (p_1 = 1/4 < p <= p_2): one user
    // delivers 1/2, two deliver 1.
    let q: f64 = 0.35;
    let want = 0.5 * 4.0 * q * (1.0 - q).powi(3) + 6.0 * q * q * (1.0 - q).powi(2);
    assert!((ana - want).abs() < 1e-11, "{ana} vs {want}");
    assert!((emp - ana).abs() <= 4.0 * se);
    assert_eq!(v["extra"]["histogram"].as_array().unwrap().len(), 5);
}

#[test]
fn simulate_zero_activity() {
    let v = json(&["simulate", "--model", "awgn", "--snr-db", "10", "--m", "3", "--p", "0", "--slots", "1000"]);
    assert_eq!(sim_row(&v)["empirical_sum_rate"].as_f64(), Some(0.0));
    assert_eq!(sim_row(&v)["analytic"].as_f64(), Some(0.0));
}

#[test]
fn simulate_fixed_rate() {
    // Rate 1/3 on BD decodes up to three users.
    let v = json(&["simulate", "--model", "bd", "--m", "4", "--p", "0.5", "--rate", "0.333333333333", "--slots", "200000"]);
    let row = sim_row(&v);
    let want = (4.0 * 0.0625 + 2.0 * 6.0 * 0.0625 + 3.0 * 4.0 * 0.0625) * 0.333333333333;
    assert!((row["analytic"].as_f64().unwrap() - want).abs() < 1e-11);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["simulate", "--model", "awgn", "--snr-db", "15", "--m", "6", "--p", "0.4", "--slots", "300000", "--batch-size", "4096"];
    let run = |threads: &str| Command::new(env!("CARGO_BIN_EXE_racap")).args(args).env("RACAP_THREADS", threads).output().unwrap();
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("5").stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn output_file_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let out = racap(&["throughput", "--model", "bd", "--m", "5", "--grid", "10", "--output", csv_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let t = Table::read_csv(std::io::BufReader::new(std::fs::File::open(&csv_path).unwrap())).unwrap();
    assert_eq!(t.columns, ["p", "T", "ALOHA"]);

    let v = json(&["throughput", "--model", "bd", "--m", "5", "--grid", "10", "--format", "json"]);
    assert_eq!(v["command"], "throughput");
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    for (row, csv_row) in v["rows"].as_array().unwrap().iter().zip(&t.rows) {
        assert_eq!(row["T"].as_f64(), csv_row[1].as_f64());
    }
    let csv_sim = table(&["simulate", "--model", "bd", "--m", "3", "--p", "0.2", "--slots", "1000", "--format", "csv"]);
    assert_eq!(csv_sim.command, "simulate");
}

#[test]
fn every_csv_round_trips() {
    let cases: [&[&str]; 6] = [
        &["thresholds", "--model", "awgn", "--m", "25", "--snr-db", "20"],
        &["throughput", "--model", "awgn", "--m", "25", "--snr-db", "20", "--grid", "40", "--curves", "T_lower,T_upper,ALOHA"],
        &["throughput", "--model", "poisson", "--grid", "50"],
        &["region", "--snr1-db", "30", "--snr2-db", "-3", "--vertices"],
        &["gap", "--sweep"],
        &["simulate", "--model", "bd", "--m", "4", "--p", "0.3", "--slots", "5000", "--format", "csv"],
    ];
    for args in cases {
        let out = racap(args);
        assert!(out.status.success(), "{args:?}");
        let t = Table::read_csv(out.stdout.as_slice()).unwrap();
        let mut again = Vec::new();
        t.write_csv(&mut again).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), String::from_utf8(out.stdout).unwrap(), "{args:?}");
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
    }
}
