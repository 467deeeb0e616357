use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use packet_tunnel::transmission::{evaluate, BarrierQuery, Method};
use packet_tunnel::PacketShape;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packet-tunnel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("{v} is not a number"))
}

/// Parsed CSV rows as (header, records); `#` lines skipped.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn transmit_examples() {
    let v = json(&bin(&["transmit", "--A", "10", "--B", "1e-8", "--gamma", "2"]));
    assert!((f(&v["log10_T"]) + 10.0 / 10f64.ln()).abs() < 1e-4);
    for key in ["ln_T", "log10_T", "G", "y_star_numeric", "y_star_approx", "quad_error_ln", "planewave_ok", "method_used"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let v = json(&bin(&["transmit", "--A", "700", "--B", "0.1", "--gamma", "2", "--method", "saddle"]));
    assert!((f(&v["G"]) - 70.0).abs() < 1e-9);
    assert_eq!(v["low_confidence"], Value::Bool(true));
    assert_eq!(v["method_used"], "steepest_descent");

    let v = json(&bin(&["transmit", "--A", "700", "--B", "1e-4", "--gamma", "1", "--method", "auto"]));
    assert_eq!(v["method_used"], "bessel_gamma1");
}

#[test]
fn numbers_have_twelve_significant_digits() {
    let o = bin(&["transmit", "--A", "700", "--B", "1e-3", "--gamma", "2"]);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let line = text.lines().find(|l| l.contains("\"ln_T\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 12, "{number}");
    assert!((number.parse::<f64>().unwrap() + 579.6128).abs() < 1e-4);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bin(&["transmit", "--A", "10", "--B", "1e-8"])), 2);
    assert_eq!(code(&bin(&["transmit", "--A", "10", "--B", "1e-8", "--gamma", "2", "--method", "simpson"])), 2);
    assert_eq!(code(&bin(&["transmit", "--A", "-1", "--B", "1e-8", "--gamma", "2"])), 2);
    assert_eq!(code(&bin(&["transmit", "--A", "10", "--B", "1e-8", "--gamma", "20"])), 2);
    assert_eq!(code(&bin(&["transmit", "--A", "700", "--B", "1e-4", "--gamma", "2", "--method", "bessel"])), 2);
    assert_eq!(code(&bin(&["frobnicate"])), 2);
}

#[test]
fn sweep_log_grid_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = bin(&[
        "sweep", "--A", "700", "--gamma", "2", "--B-min", "1e-6", "--B-max", "10", "--B-count", "50", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let raw = fs::read(&out).unwrap();
    assert!(!raw.contains(&b'\r'));
    let text = String::from_utf8(raw).unwrap();
    assert!(text.starts_with("A,B,gamma,method,ln_T,log10_T,quad_error_ln,planewave_ok\n"));
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 50);
    let bs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let lns: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(bs.windows(2).all(|w| w[1] > w[0]));
    assert!(lns.windows(2).all(|w| w[1] > w[0]));
    assert!((bs[0] - 1e-6).abs() < 1e-18 && (bs[49] - 10.0).abs() < 1e-10);
}

#[test]
fn sweep_delta_limit_rows() {
    let o = bin(&["sweep", "--A", "10", "--gamma", "2", "--B", "1e-8,1e-7"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let ln_t: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!((ln_t + 10.0).abs() <= 1e-2);
    }
}

#[test]
fn sweep_row_order() {
    let o = bin(&["sweep", "--A", "50,20", "--gamma", "2,1", "--B", "1e-2,1e-3", "--method", "quad,saddle"]);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let keys: Vec<(f64, f64, f64, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[2].parse().unwrap(), c[1].parse().unwrap(), c[3].to_string())
        })
        .collect();
    assert_eq!(keys.len(), 16);
    // A in given order, then gamma in given order, then B ascending
    assert_eq!((keys[0].0, keys[0].1, keys[0].2), (50.0, 2.0, 1e-3));
    assert_eq!(keys[0].3, "quadrature");
    assert_eq!(keys[1].3, "steepest_descent");
    assert_eq!((keys[2].0, keys[2].1, keys[2].2), (50.0, 2.0, 1e-2));
    assert_eq!((keys[4].0, keys[4].1), (50.0, 1.0));
    assert_eq!(keys[8].0, 20.0);
}

#[test]
fn sweep_validation_and_io_errors() {
    assert_eq!(code(&bin(&["sweep", "--A", "700", "--gamma", "", "--B", "1e-3"])), 2);
    assert_eq!(code(&bin(&["sweep", "--A", "700", "--B", "1e-3"])), 2);
    assert_eq!(code(&bin(&["sweep", "--A", "700", "--gamma", "2", "--B-min", "1", "--B-max", "0.1"])), 2);
    assert_eq!(code(&bin(&["sweep", "--A", "700", "--gamma", "2", "--B-count", "1"])), 2);
    let o = bin(&["sweep", "--A", "700", "--gamma", "2", "--B", "1e-3", "-o", "/nonexistent/dir/x.csv"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn sweep_failed_points_keep_going() {
    // G < 1 puts the γ = 1 closed form out of regime at B = 1e-8
    let o = bin(&["sweep", "--A", "10", "--gamma", "1", "--B", "1e-8,1", "--method", "bessel"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[1].starts_with("1.00000000000e1,1.00000000000e-8,1.00000000000e0,bessel_gamma1,,,,"));
    assert!(lines[2].starts_with("# note: "));
    assert_eq!(lines[3].split(',').count(), 8);
    assert!(!lines[3].split(',').nth(4).unwrap().is_empty());
}

#[test]
fn sweep_is_deterministic_and_order_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str, format: &str| {
        let p = dir.path().join(name);
        let o = bin(&[
            "sweep", "--A", "100,700", "--gamma", "0.5,1,2,3", "--B-min", "1e-5", "--B-max", "1", "--B-count", "12",
            "--method", "quad,saddle,auto", "--threads", threads, "--format", format, "-o", p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        fs::read(p).unwrap()
    };
    let serial = run("a.csv", "1", "csv");
    assert_eq!(serial, run("b.csv", "1", "csv"));
    assert_eq!(serial, run("c.csv", "4", "csv"));
    assert_eq!(run("a.json", "1", "json"), run("b.json", "3", "json"));
}

#[test]
fn sweep_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rt.csv");
    let o = bin(&[
        "sweep", "--A", "50,700", "--gamma", "1,2,3", "--B-min", "1e-5", "--B-max", "1", "--B-count", "6", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["A", "B", "gamma", "method", "ln_T", "log10_T", "quad_error_ln", "planewave_ok"]);
    for r in rows {
        let p: Vec<f64> = r[..3].iter().map(|s| s.parse().unwrap()).collect();
        let ln_t: f64 = r[4].parse().unwrap();
        let err: f64 = r[6].parse().unwrap();
        let again = evaluate(&BarrierQuery::new(p[0], p[1], p[2], Method::Quadrature).unwrap()).unwrap();
        // the stated error plus half a unit in the 12th digit
        assert!((again.ln_t() - ln_t).abs() <= err + 5e-12 * ln_t.abs(), "{r:?}");
        assert!((r[5].parse::<f64>().unwrap() - ln_t / 10f64.ln()).abs() <= 1e-11 * ln_t.abs());
    }
}

#[test]
fn ratio_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ratio.csv");
    let o = bin(&[
        "ratio", "--A", "700", "--gamma", "1,2", "--B", "1e-5,1e-4,1e-3,1e-2,1e-1,1", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["A", "B", "gamma", "ln_T_quad", "ln_T_star", "R"]);
    assert_eq!(rows.len(), 12);
    let val = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    for r in rows.iter().filter(|r| val(r, 2) == 1.0) {
        let ratio = val(r, 5);
        assert!((0.95..=1.05).contains(&ratio), "{r:?}");
        // both logs carry 12 digits, so R is reproduced to about 1e-9 relative
        assert!((ratio / (val(r, 4) - val(r, 3)).exp() - 1.0).abs() <= 1e-8);
    }
    let at = |b: f64| rows.iter().find(|r| val(r, 2) == 2.0 && (val(r, 1) - b).abs() < 1e-12 * b).unwrap();
    // exact value from the high-precision quadrature reference
    assert!((val(at(1.0), 5) - 1.3396).abs() < 1e-3);
    assert!(val(at(1e-3), 5).ln().abs() > 10.0);
    let v = json(&bin(&["transmit", "--A", "700", "--B", "1e-3", "--gamma", "2", "--method", "saddle"]));
    assert_eq!(v["low_confidence"], Value::Bool(true));
}

#[test]
fn from_table() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.csv");
    fs::write(&tri, "# narrow triangle\ny,density\n0.9999995,0\n1,2e6\n1.0000005,0\n").unwrap();
    let v = json(&bin(&["from-table", "--file", tri.to_str().unwrap(), "--A", "10"]));
    assert!((f(&v["ln_T"]) + 10.0).abs() < 1e-4);
    assert_eq!(v["method_used"], "density_table");

    let gauss = dir.path().join("gauss.csv");
    let shape = PacketShape::new(2.0, 0.01).unwrap();
    let mut text = String::from("y,density\n");
    for i in 0..=30_000 {
        let y = 3.0 * i as f64 / 30_000.0;
        text += &format!("{y:e},{:e}\n", shape.log_density(y).exp());
    }
    fs::write(&gauss, text).unwrap();
    let table = json(&bin(&["from-table", "--file", gauss.to_str().unwrap(), "--A", "50"]));
    let exact = json(&bin(&["transmit", "--A", "50", "--B", "0.01", "--gamma", "2", "--method", "quad"]));
    assert!((f(&table["ln_T"]) - f(&exact["ln_T"])).abs() <= 1e-3);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "y,density\n0.5,1\n0.7,1\n0.6,1\n").unwrap();
    let o = bin(&["from-table", "--file", bad.to_str().unwrap(), "--A", "10"]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn physical_examples() {
    let v = json(&bin(&["physical", "--Z", "1", "--mass-amu", "2.013553212745", "--energy-eV", "1e4"]));
    assert!((f(&v["A"]) - 14.0).abs() < 0.1);
    assert!((f(&v["a_over_mc"]) - 0.04585).abs() < 1e-5);
    assert_eq!(v["relativistic_flag"], Value::Bool(false));
    let v = json(&bin(&["physical", "--Z", "1", "--mass-amu", "2.013553212745", "--energy-eV", "1"]));
    assert!((f(&v["A"]) - 1.4e3).abs() < 10.0);
    let reduced = json(&bin(&[
        "physical", "--Z", "1", "--mass-amu", "2.013553212745", "--energy-eV", "1", "--reduced-mass",
    ]));
    assert!((f(&reduced["A"]) / f(&v["A"]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    let o = bin(&["physical", "--Z", "1", "--mass-amu", "5.48579909065e-4", "--energy-eV", "1e6"]);
    assert_eq!(code(&o), 6);
}

#[test]
fn validate_fresh_build_passes() {
    let o = bin(&["validate"]);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    print!("{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 14);
    assert_eq!(code(&o), 0, "{text}");
}

#[test]
fn validate_exit_code_follows_report() {
    let o = bin(&["validate"]);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let any_fail = text.lines().any(|l| l.starts_with("FAIL"));
    assert_eq!(code(&o), if any_fail { 1 } else { 0 });
}

#[test]
fn validate_detects_beta_fault() {
    let o = bin(&["validate", "--beta-scale", "1.01"]);
    assert_eq!(code(&o), 1);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL  7b")), "{text}");
}

#[test]
fn validate_missing_oracle() {
    let o = bin(&["validate", "--oracle", "/nonexistent/oracle.csv"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("oracle data file") && err.contains("/nonexistent/oracle.csv"), "{err}");
}
