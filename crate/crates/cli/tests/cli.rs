use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use amalgam_core::amalgam::{AmalgamGraph, AmalgamationSpec, ProvenanceJson};
use amalgam_core::ends::SeparatorList;
use amalgam_core::splitting::{FactorisationNode, SplitOutcome};
use amalgam_core::treedecomp::AxiomReport;
use serde::de::DeserializeOwned;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam")).args(args).current_dir(root()).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn result<T: DeserializeOwned>(path: &Path) -> (Value, T) {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let r = serde_json::from_value(v["result"].clone()).unwrap();
    (v["runConfig"].clone(), r)
}

#[test]
fn build_writes_path_dot_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = amalgam(&["build", "--spec", "fixtures/spec_dr.json", "-R", "3", "--seed", "0", "--dot", d]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dot = std::fs::read_to_string(dir.path().join("build.dot")).unwrap();
    assert!(dot.starts_with("// run: {\"command\":\"build\""));
    assert_eq!(dot.matches(" -- ").count(), 7);
    let (cfg, b): (Value, AmalgamGraph) = result(&dir.path().join("build.json"));
    assert_eq!(cfg["radius"], serde_json::json!([3]));
    assert_eq!((b.graph().n(), b.graph().edge_count()), (8, 7));
    assert!(b.ident_lengths.iter().all(|&l| l <= 1));
    let (_, prov): (Value, ProvenanceJson) = result(&dir.path().join("provenance.json"));
    assert_eq!(prov.len(), 8);
}

#[test]
fn verify_td_on_c6() {
    let o = amalgam(&["verify-td", "--graph", "fixtures/c6.json", "--td", "fixtures/td.json", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let report: AxiomReport = serde_json::from_value(v["result"].clone()).unwrap();
    assert!(report.violations.is_empty());
}

#[test]
fn violated_axioms_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let td = dir.path().join("td.json");
    std::fs::write(&td, r#"{"tree":{"n":2,"edges":[[0,1]]},"parts":{"0":[0,1,2],"1":[3,4,5]}}"#).unwrap();
    let o = amalgam(&["verify-td", "--graph", "fixtures/c6.json", "--td", td.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn roundtrips_recover_both_types() {
    for (spec, kind) in [("fixtures/spec_dr.json", 1), ("fixtures/spec_hnn.json", 2)] {
        let o = amalgam(&["roundtrip", "--spec", spec, "-R", "4", "--json"]);
        assert_eq!(code(&o), 0, "{spec}");
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["result"]["isomorphic"], true);
        let s: AmalgamationSpec = serde_json::from_value(v["result"]["spec"].clone()).unwrap();
        assert_eq!(u8::from(s.kind), kind);
    }
}

#[test]
fn schema_errors_carry_pointers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":3,"edges":[[0,1],[1,7]]}"#).unwrap();
    let o = amalgam(&["validate", "--graph", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/edges/1: endpoint out of range"));

    let mut spec: Value = serde_json::from_str(&std::fs::read_to_string(root().join("fixtures/spec_dr.json")).unwrap()).unwrap();
    spec["adhesions"]["2"] = serde_json::json!(["b"]);
    std::fs::write(&bad, spec.to_string()).unwrap();
    let o = amalgam(&["build", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/adhesions/2/0:"));
}

#[test]
fn missing_input_is_an_input_error() {
    assert_eq!(code(&amalgam(&["build"])), 2);
    assert_eq!(code(&amalgam(&["build", "--spec", "no/such/file.json"])), 2);
}

#[test]
fn truncated_separator_search_is_inconclusive() {
    let o = amalgam(&["separators", "--graph", "fixtures/c6.json", "-k", "2", "--cap", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn separators_and_factorisation_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&amalgam(&["separators", "--graph", "fixtures/c6.json", "-k", "2", "--out", d])), 0);
    let (_, list): (Value, SeparatorList) = result(&dir.path().join("separators.json"));
    assert_eq!(list.separators.len(), 9);

    let o = amalgam(&["factorise", "--spec", "fixtures/spec_tri.json", "-k", "1", "--out", d]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("finite: graph on 3 vertices"));
    let (_, tree): (Value, FactorisationNode) = result(&dir.path().join("factorisation.json"));
    assert_eq!(tree.leaves().len(), 2);

    assert_eq!(code(&amalgam(&["split", "--spec", "fixtures/spec_tri.json", "-R", "3", "--out", d])), 0);
    let (_, split): (Value, SplitOutcome) = result(&dir.path().join("split.json"));
    assert_eq!(split.spec().g1.n(), 3);
}

#[test]
fn ends_and_hyperbolicity_pass_on_fixtures() {
    let o = amalgam(&["ends", "--spec", "fixtures/spec_dr.json", "-k", "1", "-R", "3,4,5", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["accessibility"]["rows"].as_array().unwrap().len(), 3);
    assert_eq!(code(&amalgam(&["ends", "--spec", "fixtures/spec_dr.json", "-k", "0", "-R", "3"])), 1);

    let o = amalgam(&["hyperbolicity", "--spec", "fixtures/spec_tri.json", "-R", "2,3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 violation(s)"));
}
