use std::process::{Command, Output};

use genlame::elliptic::{jacobi_scd, EllipticModulus};
use genlame::gen_jacobi::integrate_first_order_system;
use genlame::ModulusPair;

fn genlame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genlame")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn eval_starts_at_initial_values() {
    let out = genlame(&["eval", "--k1", "0.8", "--k2", "0.3", "--grid", "0:5:11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("z,s,c,d1,d2,V\n0,0,1,1,1,0\n"), "{text}");
    assert_eq!(rows(&out).len(), 11);
}

#[test]
fn eval_reduces_to_sn_when_k2_vanishes() {
    let out = genlame(&["eval", "--k1", "0.8", "--k2", "0", "--grid", "-3:7:41"]);
    assert_eq!(out.status.code(), Some(0));
    let k = EllipticModulus::new(0.8).unwrap();
    for row in rows(&out) {
        let t = jacobi_scd(num(&row[0]), k).unwrap();
        assert!((num(&row[1]) - t.sn).abs() < 1e-12);
        assert!((num(&row[3]) - t.dn).abs() < 1e-12);
    }
}

#[test]
fn eval_matches_ode_oracle() {
    let out = genlame(&["eval", "--k1", "0.8", "--k2", "0.3", "--grid", "0.5:0.5:1"]);
    let row = &rows(&out)[0];
    let oracle = integrate_first_order_system(0.5, &ModulusPair::new(0.8, 0.3).unwrap(), 1e-3);
    for (i, v) in [oracle.s, oracle.c, oracle.d1, oracle.d2].into_iter().enumerate() {
        assert!((num(&row[i + 1]) - v).abs() < 1e-9);
    }
}

#[test]
fn numbers_round_trip() {
    let out = genlame(&["eval", "--grid", "0:5:7", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let csv_rows = rows(&genlame(&["eval", "--grid", "0:5:7"]));
    for (obj, row) in json.as_array().unwrap().iter().zip(&csv_rows) {
        for (key, cell) in ["z", "s", "c", "d1", "d2", "V"].iter().zip(row) {
            assert_eq!(obj[key].as_f64().unwrap(), num(cell), "{key}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let a = genlame(&["spectrum", "--format", "json"]);
    let b = genlame(&["spectrum", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn catalog_verifies_at_two_moduli() {
    for (k1, k2) in [("0.8", "0.3"), ("0.9", "0.1")] {
        let out = genlame(&["verify-catalog", "--k1", k1, "--k2", k2]);
        assert_eq!(out.status.code(), Some(0));
        let rows = rows(&out);
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().all(|r| r[9] == "true"));
    }
}

#[test]
fn shifted_energy_fails_verification() {
    let out = genlame(&["verify-catalog", "--energy-shift", "1e-3"]);
    assert_eq!(out.status.code(), Some(4));
    for row in rows(&out) {
        let r = num(&row[8]);
        assert!((r - 1e-3).abs() < 1e-6, "residual {r}");
        assert_eq!(row[9], "false");
    }
}

#[test]
fn spectrum_contains_catalog_energy() {
    let out = genlame(&["spectrum", "--params", "(3,0,2,2,2)", "--class", "odd-2pi"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(rows(&out).iter().any(|r| (num(&r[2]) - 1.73).abs() < 1e-8));
}

#[test]
fn free_particle_spectrum_is_squares() {
    let out = genlame(&["spectrum", "--params", "0,0,0,0,0", "--k1", "0", "--k2", "0", "--count", "4"]);
    for r in rows(&out) {
        let e = num(&r[2]);
        assert!((e.sqrt() - e.sqrt().round()).abs() < 1e-9, "{e}");
    }
}

#[test]
fn spectrum_ordering() {
    let rows = rows(&genlame(&["spectrum"]));
    let classes: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(classes.len(), 24);
    assert_eq!(classes[0], "even-pi");
    assert_eq!(classes[23], "even-2pi");
    for w in rows.windows(2).filter(|w| w[0][0] == w[1][0]) {
        assert!(num(&w[0][2]) <= num(&w[1][2]));
    }
}

#[test]
fn both_routes_find_the_same_fifteen() {
    let key = |r: &Vec<String>| r[..9].join(",");
    let fourier: Vec<String> = rows(&genlame(&["enumerate", "--route", "fourier"])).iter().map(key).collect();
    let series: Vec<String> = rows(&genlame(&["enumerate", "--route", "series"])).iter().map(key).collect();
    assert_eq!(fourier.len(), 15);
    assert_eq!(fourier, series);
    assert!(fourier.contains(&"15,0,6,6,12,1,4,4,s·d1·d2".to_string()));
}

#[test]
fn catalog_matches_enumeration() {
    let catalog: Vec<String> = rows(&genlame(&["catalog"])).iter().map(|r| r.join(",")).collect();
    let found: Vec<String> = rows(&genlame(&["enumerate"])).iter().map(|r| r[..9].join(",")).collect();
    assert_eq!(catalog, found);
}

#[test]
fn audit_reports_misprints() {
    let out = genlame(&["audit", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let findings = json.as_array().unwrap();
    assert_eq!(findings.len(), 6);
    assert!(findings.iter().all(|f| f["resolved_matches"] == true));
}

#[test]
fn exit_codes() {
    assert_eq!(genlame(&["eval", "--k1", "1.2"]).status.code(), Some(2));
    assert_eq!(genlame(&["eval", "--grid", "1:2"]).status.code(), Some(1));
    assert_eq!(genlame(&["spectrum", "--n", "4"]).status.code(), Some(1));
    assert_eq!(genlame(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(genlame(&["--help"]).status.code(), Some(0));
}

#[test]
fn diagnostics_are_one_line() {
    for args in [&["eval", "--k1", "1.2"][..], &["eval", "--grid", "x"][..], &["bogus"][..]] {
        let err = String::from_utf8(genlame(args).stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    }
}

#[test]
fn writes_to_file() {
    let path = std::env::temp_dir().join(format!("genlame-cli-{}.csv", std::process::id()));
    let out = genlame(&["catalog", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text.lines().count(), 16);
}
