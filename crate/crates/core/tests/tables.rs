use packet_tunnel::packet::{DensityTable, PacketShape};
use packet_tunnel::transmission::{evaluate, ln_t_from_table, BarrierQuery, Evaluator, Method};
use packet_tunnel::validation::{run, Oracle, ValidationOptions};
use packet_tunnel::Error;

fn sampled(shape: &PacketShape, lo: f64, hi: f64, n: usize) -> String {
    let mut csv = String::from("# sampled packet\ny,density\n");
    for i in 0..=n {
        let y = lo + (hi - lo) * i as f64 / n as f64;
        csv += &format!("{y:.15e},{:.15e}\n", shape.log_density(y).exp());
    }
    csv
}

#[test]
fn sampled_gaussian_matches_quadrature() {
    let shape = PacketShape::new(2.0, 0.01).unwrap();
    let table = DensityTable::from_csv(sampled(&shape, 0.0, 3.0, 30_000).as_bytes()).unwrap();
    let r = ln_t_from_table(&table, 50.0).unwrap();
    let q = evaluate(&BarrierQuery::new(50.0, 0.01, 2.0, Method::Quadrature).unwrap()).unwrap();
    assert!((r.ln_t() - q.ln_t()).abs() <= 1e-3, "{} vs {}", r.ln_t(), q.ln_t());
    assert_eq!(r.method_used, Evaluator::DensityTable);
    assert!(!r.planewave_ok);
}

#[test]
fn malformed_tables_name_the_line() {
    let cases = [
        ("y,density\n0.5,1\n0.4,1\n", "line 3"),
        ("y,density\n0.5,1\n0.6,abc\n", "line 3"),
        ("# c\ny,density\n0.5,1\n0.6\n", "line 4"),
        ("p,rho\n0.5,1\n", "line 1"),
    ];
    for (text, needle) in cases {
        match DensityTable::from_csv(text.as_bytes()) {
            Err(Error::Format(msg)) => assert!(msg.contains(needle), "{msg} lacks {needle}"),
            other => panic!("expected a format error for {text:?}, got {other:?}"),
        }
    }
}

#[test]
fn validation_fault_injection() {
    let clean = run(&ValidationOptions::default()).unwrap();
    assert!(clean.get("7b").unwrap().passed);
    assert!(clean.get("4").unwrap().passed);
    let faulty = run(&ValidationOptions {
        beta_scale: 1.01,
        ..Default::default()
    })
    .unwrap();
    assert!(!faulty.get("7b").unwrap().passed);
    assert!(!faulty.all_passed());
}

#[test]
fn validation_missing_oracle() {
    let opts = ValidationOptions {
        oracle_path: Some("/nonexistent/oracle.csv".into()),
        ..Default::default()
    };
    let e = run(&opts).unwrap_err();
    assert!(e.to_string().contains("oracle data file"), "{e}");
}

#[test]
fn quadrature_matches_every_oracle_row() {
    for row in Oracle::embedded().rows() {
        let q = evaluate(&BarrierQuery::new(row.a, row.b, row.gamma, Method::Quadrature).unwrap()).unwrap();
        assert!(
            (q.ln_t() - row.ln_t).abs() <= 1e-5,
            "A = {}, B = {}, γ = {}: {} vs {}",
            row.a,
            row.b,
            row.gamma,
            q.ln_t(),
            row.ln_t
        );
    }
}
