use amalgam_core::fixtures::{spec_double_ray, spec_square_cactus, spec_triangles};
use amalgam_web::{delta_json, layout_json, separators_json};
use serde_json::Value;

fn spec(s: &amalgam_core::amalgam::AmalgamationSpec) -> String {
    serde_json::to_string(s).unwrap()
}

#[test]
fn double_ray_layout_is_a_path() {
    let v: Value = serde_json::from_str(&layout_json(&spec(&spec_double_ray()), 3, 0).unwrap()).unwrap();
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 8);
    assert_eq!(v["edges"].as_array().unwrap().len(), 7);
    assert_eq!(nodes.iter().filter(|n| n["boundary"] == true).count(), 2);
    for n in nodes {
        let (x, y) = (n["x"].as_f64().unwrap(), n["y"].as_f64().unwrap());
        assert!(x.hypot(y) <= 1.0 + 1e-9);
    }
}

#[test]
fn layout_is_deterministic() {
    let s = spec(&spec_triangles());
    assert_eq!(layout_json(&s, 2, 3).unwrap(), layout_json(&s, 2, 3).unwrap());
}

#[test]
fn cactus_delta_is_one() {
    let v: Value = serde_json::from_str(&delta_json(&spec(&spec_square_cactus()), 3, 0).unwrap()).unwrap();
    assert_eq!(v["delta"], 1);
    assert!(v["witness"].is_object());
}

#[test]
fn triangle_cut_vertices() {
    let v: Value = serde_json::from_str(&separators_json(&spec(&spec_triangles()), 1, 0, 1, 10_000).unwrap()).unwrap();
    // Four triangles glued at the root triangle's corners: those corners.
    let seps = v["separators"].as_array().unwrap();
    assert_eq!(seps.len(), 3);
    for s in seps {
        assert_eq!(s["vertices"].as_array().unwrap().len(), 1);
        assert_eq!(s["sides"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn bad_spec_is_reported() {
    let err = layout_json("{\"type\": 3}", 2, 0).unwrap_err();
    assert!(err.starts_with("spec:"));
}
