//! Browser demo bindings. Each export takes a spec as JSON text and returns
//! JSON text; the plain functions underneath are what the tests call.

use amalgam_core::amalgam::{build_amalgam, validate_spec, AmalgamGraph, AmalgamationSpec};
use amalgam_core::ends::tight_separators;
use amalgam_core::hyperbolicity::{delta_thin, TriangleWitness};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest build the page will draw.
pub const MAX_VERTICES: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub depth: usize,
    pub boundary: bool,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Layout {
    pub nodes: Vec<Node>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub tree_nodes: usize,
    pub max_ident_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaResult {
    pub delta: usize,
    pub inner_radius: usize,
    pub inner_size: usize,
    pub witness: Option<TriangleWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatorView {
    pub vertices: Vec<usize>,
    pub sides: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatorsResult {
    pub k: usize,
    pub truncated: bool,
    pub separators: Vec<SeparatorView>,
}

fn parse_and_build(spec: &str, radius: usize, seed: u64) -> Result<AmalgamGraph, String> {
    let s: AmalgamationSpec = serde_json::from_str(spec).map_err(|e| format!("spec: {e}"))?;
    let report = validate_spec(&s);
    if let Some(v) = report.violations.first() {
        return Err(format!("{}: {}", v.path, v.message));
    }
    let b = build_amalgam(&s, radius, seed).map_err(|e| e.to_string())?;
    if b.graph().n() > MAX_VERTICES {
        return Err(format!("build has {} vertices; the demo draws at most {MAX_VERTICES}", b.graph().n()));
    }
    Ok(b)
}

/// Radial layout of a BFS tree from the root: depth sets the radius and
/// each subtree gets an angular share proportional to its leaf count.
pub fn radial_layout(b: &AmalgamGraph) -> Layout {
    let g = b.graph();
    let n = g.n();
    let root = b.patch.root;
    let dist = g.bfs_distances(root);
    let mut children = vec![Vec::new(); n];
    let mut order = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                children[v].push(w);
                order.push(w);
            }
        }
    }
    let mut leaves = vec![0usize; n];
    for &v in order.iter().rev() {
        leaves[v] = children[v].iter().map(|&c| leaves[c]).sum::<usize>().max(1);
    }
    let max_depth = dist.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
    let mut span = vec![(0.0, std::f64::consts::TAU); n];
    for &v in &order {
        let (start, width) = span[v];
        let mut at = start;
        for &c in &children[v] {
            let w = width * leaves[c] as f64 / leaves[v] as f64;
            span[c] = (at, w);
            at += w;
        }
    }
    let nodes = (0..n)
        .map(|v| {
            let depth = dist[v].unwrap_or(0);
            let r = depth as f64 / max_depth;
            let (start, width) = span[v];
            let angle = start + width / 2.0;
            Node {
                id: v,
                x: r * angle.cos(),
                y: r * angle.sin(),
                depth,
                boundary: b.patch.is_boundary(v),
                label: g.labels().get(&v).cloned(),
            }
        })
        .collect();
    Layout {
        nodes,
        edges: g.edges().collect(),
        root,
        tree_nodes: b.tree.node_count(),
        max_ident_length: b.max_ident_length(),
    }
}

pub fn layout_json(spec: &str, radius: usize, seed: u64) -> Result<String, String> {
    let b = parse_and_build(spec, radius, seed)?;
    serde_json::to_string(&radial_layout(&b)).map_err(|e| e.to_string())
}

/// δ over triangles with corners in the largest ball around the root that
/// stays clear of the boundary.
pub fn delta_json(spec: &str, radius: usize, seed: u64) -> Result<String, String> {
    let b = parse_and_build(spec, radius, seed)?;
    let p = &b.patch;
    let inner = p.graph.ball(p.root, p.inner_radius);
    let report = delta_thin(&p.graph, &inner).map_err(|e| e.to_string())?;
    let out = DeltaResult {
        delta: report.delta,
        inner_radius: p.inner_radius,
        inner_size: inner.len(),
        witness: report.witness,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn separators_json(spec: &str, radius: usize, seed: u64, k: usize, cap: usize) -> Result<String, String> {
    let b = parse_and_build(spec, radius, seed)?;
    let list = tight_separators(b.graph(), k, cap);
    let out = SeparatorsResult {
        k,
        truncated: list.truncated,
        separators: list
            .separators
            .into_iter()
            .map(|s| SeparatorView {
                vertices: s.vertices,
                sides: s.sides,
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn build_layout(spec: &str, radius: usize, seed: u64) -> Result<String, JsValue> {
    js(layout_json(spec, radius, seed))
}

#[wasm_bindgen]
pub fn delta(spec: &str, radius: usize, seed: u64) -> Result<String, JsValue> {
    js(delta_json(spec, radius, seed))
}

#[wasm_bindgen]
pub fn separators(spec: &str, radius: usize, seed: u64, k: usize, cap: usize) -> Result<String, JsValue> {
    js(separators_json(spec, radius, seed, k, cap))
}
