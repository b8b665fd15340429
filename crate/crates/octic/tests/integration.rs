use std::process::Command;

use octic::arrangement::{catalog, lookup};
use octic::modforms::{registry, CoefficientSource};
use octic::verify::{verify_modularity, VerifyOptions};

fn octic(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_octic")).args(args).output().expect("run octic");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn rigid_sources_are_never_authoritative() {
    for e in registry() {
        assert!(
            !matches!(e.sources.first(), Some(CoefficientSource::RigidOctic(_))),
            "{} is backed first by a rigid octic",
            e.form
        );
    }
}

#[test]
fn rigid_rows_never_cite_their_own_arrangement() {
    for id in ["3", "19", "239"] {
        let rep = verify_modularity(&lookup(id).unwrap(), 61, &VerifyOptions::default()).unwrap();
        assert!(rep.all_match(), "{id}");
        let own = format!("rigid octic {id}");
        for row in &rep.rows {
            assert!(row.provenance.iter().all(|s| !s.contains(&own)), "{id} at {}: {:?}", row.p, row.provenance);
        }
    }
}

#[test]
fn every_catalog_arrangement_with_forms_verifies() {
    for arr in catalog().iter().filter(|a| a.wt4_form.is_some()) {
        let rep = verify_modularity(arr, 29, &VerifyOptions::default()).unwrap();
        assert!(rep.all_match(), "{}", arr.id);
        assert!(!rep.rows.is_empty(), "{}", arr.id);
    }
}

#[test]
fn cli_verify_formats() {
    let (code, csv) = octic(&["verify", "53", "--pmax", "31", "--format", "csv"]);
    assert_eq!(code, 0);
    let header = csv.lines().next().unwrap();
    assert!(header.contains("prime") && header.contains("match"), "{header}");
    let rows: Vec<&str> = csv.lines().skip(1).filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|l| l.contains(",true,")), "{csv}");

    let (code, json) = octic(&["verify", "269", "--pmax", "31", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v.to_string().contains("\"match\":true"));
}

#[test]
fn cli_calibrated_mode() {
    let (code, out) = octic(&["trace", "4a", "--pmax", "31", "--correction", "calibrated"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn cli_kummer_with_negative_lambda() {
    let (code, out) = octic(&["kummer", "--lambda", "-1", "--mu", "1/9", "--pmax", "31"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("twist"), "{out}");
}

#[test]
fn cli_errors_exit_with_two() {
    assert_eq!(octic(&["verify", "no-such-id"]).0, 2);
    assert_eq!(octic(&["count", "53", "--p", "9"]).0, 2);
}

#[test]
fn cli_count_matches_library() {
    let (code, out) = octic(&["count", "53", "--p", "7"]);
    assert_eq!(code, 0);
    let f = octic::counting::OcticForm::from_arrangement(&lookup("53").unwrap(), 7).unwrap();
    let c = octic::counting::count_projective_cover(&f).unwrap();
    assert!(out.contains(&c.n_total.to_string()), "{out}");
}
