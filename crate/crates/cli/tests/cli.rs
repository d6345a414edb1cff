use std::path::{Path, PathBuf};
use std::process::Command;

use matpoly_cli::{parse_input, run, Command as Cmd, Flags};
use matpoly_core::io::{polynomial_to_json, PolynomialFile};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn matpoly(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_matpoly"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_report(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = matpoly(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn expected(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn entries(m: &Value) -> Vec<(f64, f64)> {
    m.as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter())
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

fn same(a: &Value, b: &Value, eps: f64) -> bool {
    let (x, y) = (entries(a), entries(b));
    x.len() == y.len()
        && x.iter()
            .zip(&y)
            .all(|(p, q)| (p.0 - q.0).abs() <= eps && (p.1 - q.1).abs() <= eps)
}

fn strip(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn fixture_files_round_trip() {
    for name in ["example3", "example4", "example5", "example6"] {
        let text = std::fs::read_to_string(fixture(&format!("{name}.json"))).unwrap();
        let p = parse_input(&fixture(&format!("{name}.json"))).unwrap();
        assert_eq!(strip(&polynomial_to_json(&p)), strip(&text), "{name}");
        let file: PolynomialFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.k + 1, file.coefficients.len());
    }
    let p = parse_input(&fixture("example4.json")).unwrap();
    assert_eq!((p.rows(), p.cols(), p.degree()), (2, 2, 2));
}

#[test]
fn analyze_example6() {
    let r = json_report(&["analyze", fixture("example6.json").to_str().unwrap()]);
    let want = expected("example6.expected.json");
    assert_eq!(r["schema_version"], "1");
    assert_eq!(r["regularity"]["det_degree"], want["det_degree"]);
    let w = &r["payload"]["weierstrass"];
    assert_eq!(w["infinite"], want["infinite"]);
    let got = w["finite"].as_array().unwrap();
    let exp = want["finite"].as_array().unwrap();
    assert_eq!(got.len(), exp.len());
    for (g, e) in got.iter().zip(exp) {
        assert_eq!(g["partial_multiplicities"], e["partial_multiplicities"]);
        for c in 0..2 {
            let d = g["eigenvalue"][c].as_f64().unwrap() - e["eigenvalue"][c].as_f64().unwrap();
            assert!(d.abs() < 1e-8);
        }
    }
}

#[test]
fn example4_solvents_and_cosolvents() {
    let want = expected("example4.expected.json");
    let path = fixture("example4.json");
    let s = json_report(&["solvents", path.to_str().unwrap()]);
    assert_eq!(s["payload"]["count"], 1);
    assert!(same(&s["payload"]["items"][0]["matrix"], &want["solvents"][0], 1e-8));

    let c = json_report(&["cosolvents", path.to_str().unwrap()]);
    let items = c["payload"]["items"].as_array().unwrap();
    assert_eq!(items.len(), 3);
    for e in want["cosolvents"].as_array().unwrap() {
        let hit = items
            .iter()
            .find(|i| same(&i["matrix"], &e["matrix"], 1e-8))
            .expect("cosolvent present");
        assert_eq!(hit["nilpotent"], e["nilpotent"]);
    }
}

#[test]
fn example6_bisolvents_json() {
    let want = expected("example6.expected.json");
    let r = json_report(&["bisolvents", fixture("example6.json").to_str().unwrap()]);
    let items = r["payload"]["items"].as_array().unwrap();
    assert_eq!(items.len(), 2);
    for e in want["bisolvents"].as_array().unwrap() {
        assert!(items
            .iter()
            .any(|i| same(&i["s1"], &e["s1"], 1e-7) && same(&i["s2"], &e["s2"], 1e-7)));
    }
    for cmd in ["solvents", "cosolvents"] {
        let r = json_report(&[cmd, fixture("example6.json").to_str().unwrap()]);
        assert_eq!(r["payload"]["count"], 0);
    }
}

#[test]
fn example5_bisolvent_idempotents() {
    let want = &expected("example5.expected.json")["bisolvents_include"][0];
    let r = json_report(&["bisolvents", fixture("example5.json").to_str().unwrap()]);
    let item = r["payload"]["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| same(&i["s1"], &want["s1"], 1e-10) && same(&i["s2"], &want["s2"], 1e-10))
        .expect("bisolvent present")
        .clone();
    let mut pis = vec![item["pi"].clone()];
    pis.extend(item["alternatives"].as_array().unwrap().iter().cloned());
    for e in want["idempotents"].as_array().unwrap() {
        assert!(pis.iter().any(|p| same(p, e, 1e-10)));
    }
}

#[test]
fn reports_are_deterministic_and_finite() {
    for cmd in ["analyze", "pair", "solvents", "cosolvents", "bisolvents", "factor"] {
        for name in ["example4.json", "example6.json"] {
            let path = fixture(name);
            let args = [cmd, path.to_str().unwrap(), "--format", "json"];
            let (c1, a, _) = matpoly(&args);
            let (c2, b, _) = matpoly(&args);
            assert_eq!((c1, c2), (0, 0));
            assert_eq!(a, b, "{cmd} {name}");
            fn finite(v: &Value) -> bool {
                match v {
                    Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
                    Value::Array(a) => a.iter().all(finite),
                    Value::Object(o) => o.values().all(finite),
                    Value::Null => false,
                    _ => true,
                }
            }
            let v: Value = serde_json::from_str(&a).unwrap();
            assert!(finite(&v["payload"]), "{cmd} {name}");
        }
    }
}

#[test]
fn factor_atlas_of_example6() {
    let r = json_report(&["factor", fixture("example6.json").to_str().unwrap()]);
    let items = r["payload"]["items"].as_array().unwrap();
    assert_eq!(items.len(), 2);
    for i in items {
        assert!(i["max_rel_residual"].as_f64().unwrap() <= 1e-8);
        assert_eq!(i["quotient"]["k"], 1);
    }
}

#[test]
fn verify_companions() {
    let dir = tempfile::tempdir().unwrap();
    let p4 = fixture("example4.json");
    let solvent = dir.path().join("solvent.json");
    let s = json_report(&["solvents", p4.to_str().unwrap()]);
    std::fs::write(
        &solvent,
        serde_json::json!({"kind": "solvent", "matrix": s["payload"]["items"][0]["matrix"]}).to_string(),
    )
    .unwrap();
    let v = json_report(&["verify", p4.to_str().unwrap(), solvent.to_str().unwrap()]);
    assert_eq!(v["payload"]["pass"], true);

    let p6 = fixture("example6.json");
    let f = json_report(&["factor", p6.to_str().unwrap()]);
    let item = &f["payload"]["items"][0];
    let factor = dir.path().join("factor.json");
    std::fs::write(
        &factor,
        serde_json::json!({"kind": "factor", "coefficients": [item["constant"], item["lambda_coeff"]]})
            .to_string(),
    )
    .unwrap();
    let v = json_report(&["verify", p6.to_str().unwrap(), factor.to_str().unwrap()]);
    assert_eq!(v["payload"]["pass"], true);
    assert_eq!(v["payload"]["check"]["divides"], true);

    let bis = dir.path().join("bisolvent.json");
    let src = &item["source"];
    std::fs::write(
        &bis,
        serde_json::json!({"kind": "bisolvent", "s1": src["s1"], "s2": src["s2"], "pi": src["pi"]})
            .to_string(),
    )
    .unwrap();
    let v = json_report(&["verify", p6.to_str().unwrap(), bis.to_str().unwrap()]);
    assert_eq!(v["payload"]["pass"], true);
    assert_eq!(v["payload"]["solvent"], Value::Null);

    let pair = json_report(&["pair", p6.to_str().unwrap()]);
    let pf = &pair["payload"]["pair"];
    let pair_file = dir.path().join("pair.json");
    std::fs::write(
        &pair_file,
        serde_json::json!({"kind": "pair", "x": pf["x"], "y": pf["y"], "t": pf["t"], "z": pf["z"]})
            .to_string(),
    )
    .unwrap();
    let v = json_report(&["verify", p6.to_str().unwrap(), pair_file.to_str().unwrap()]);
    assert_eq!(v["payload"]["pass"], true);

    let rec = json_report(&["reconstruct", pair_file.to_str().unwrap()]);
    let poly = dir.path().join("rebuilt.json");
    std::fs::write(&poly, rec["payload"]["polynomial"].to_string()).unwrap();
    let a = json_report(&["analyze", poly.to_str().unwrap()]);
    assert_eq!(a["payload"]["weierstrass"]["infinite"], serde_json::json!([3]));
    assert_eq!(a["regularity"]["det_degree"], 3);
}

#[test]
fn pair_with_inversion() {
    let p4 = fixture("example4.json");
    let r = json_report(&["pair", p4.to_str().unwrap(), "--invert", "2,-2"]);
    assert_eq!(r["payload"]["pair"]["t"].as_array().unwrap().len(), 0);
    assert_eq!(r["payload"]["pair"]["z_blocks"].as_array().unwrap().len(), 3);
    assert_eq!(r["payload"]["check"]["rank_ok"], true);
}

#[test]
fn exit_codes_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let singular = dir.path().join("singular.json");
    std::fs::write(
        &singular,
        r#"{"n":2,"m":2,"k":1,"coefficients":[[[[0,0],[0,0]],[[0,0],[0,0]]],[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#,
    )
    .unwrap();
    assert_eq!(matpoly(&["analyze", singular.to_str().unwrap()]).0, 2);
    assert_eq!(matpoly(&["solvents", singular.to_str().unwrap()]).0, 2);

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, "{\"n\": 2,\n \"m\": 2, \"k\"").unwrap();
    let (code, _, err) = matpoly(&["analyze", truncated.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");

    assert_eq!(matpoly(&["analyze", "/nonexistent/file.json"]).0, 1);

    let constant = dir.path().join("constant.json");
    std::fs::write(&constant, r#"{"n":1,"m":1,"k":0,"coefficients":[[[[3,0]]]]}"#).unwrap();
    let r = json_report(&["analyze", constant.to_str().unwrap()]);
    assert_eq!(r["regularity"]["det_degree"], 0);
}

#[test]
fn enumeration_cap_warns() {
    let (code, out, err) = matpoly(&[
        "bisolvents",
        fixture("example6.json").to_str().unwrap(),
        "--max-enum",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["payload"]["truncated"], true);
    assert!(err.contains("truncated"));
}

#[test]
fn text_output() {
    let (code, out, _) = matpoly(&["solvents", fixture("example4.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("2.57143") && out.contains("-0.571429"), "{out}");
}

#[test]
fn library_run_matches_binary() {
    let flags = Flags {
        format: matpoly_cli::Format::Json,
        ..Flags::default()
    };
    let outcome = run(Cmd::Solvents, &fixture("example4.json"), &flags).unwrap();
    let path = fixture("example4.json");
    let (_, out, _) = matpoly(&["solvents", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(matpoly_cli::to_json(&outcome.report), out);
}
