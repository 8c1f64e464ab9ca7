use std::fmt::Write as _;
use std::path::Path;

use amalgam_core::amalgam::{
    build_amalgam, is_trivial, lifted_action, validate_spec, AmalgamGraph, AmalgamationSpec, DEFAULT_GROUP_CAP,
};
use amalgam_core::dot::{graph_to_dot, td_to_dot, DotStyle};
use amalgam_core::ends::{accessibility_probe, tight_separators, tree_end_degrees, AccessibilityTable, TreeEndDegree};
use amalgam_core::graph::{validate_graph, FiniteGraph};
use amalgam_core::hyperbolicity::{
    amalgam_hyperbolicity_experiment, delta_thin, factor_geodesic_certificates, ExperimentTable,
    FactorGeodesicReport,
};
use amalgam_core::iso::boundary_tolerant_isomorphic;
use amalgam_core::splitting::{
    stallings_split_spec, td_to_amalgamation, terminal_factorisation, FactorStatus, SplitError, DEFAULT_MAX_WORD,
};
use amalgam_core::treedecomp::{adhesion_subtree_diameters, check_connected_parts, geodesic_closure, verify_td};
use amalgam_core::TreeDecomposition;
use anyhow::{anyhow, Result};
use serde::Serialize;

use crate::io::{load, InputError, RunConfig, Sink};
use crate::{Command, Outcome};

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let mut sink = Sink::new(cfg);
    let (outcome, text) = match command {
        Command::Validate => validate(cfg, &mut sink)?,
        Command::Build => build(cfg, &mut sink)?,
        Command::VerifyTd => verify(cfg, &mut sink)?,
        Command::Closure => closure(cfg, &mut sink)?,
        Command::Split => split(cfg, &mut sink)?,
        Command::Factorise => factorise(cfg, &mut sink)?,
        Command::Ends => ends(cfg, &mut sink)?,
        Command::Separators => separators(cfg, &mut sink)?,
        Command::Hyperbolicity => hyperbolicity(cfg, &mut sink)?,
        Command::Roundtrip => roundtrip(cfg, &mut sink)?,
    };
    match (&sink.stdout_json, cfg.json) {
        (Some(json), true) => print!("{json}"),
        _ => print!("{text}"),
    }
    Ok(outcome)
}

fn require<'a>(path: &'a Option<std::path::PathBuf>, flag: &str, command: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| InputError(vec![format!("{command} needs --{flag}")]).into())
}

/// Loads a spec and rejects it with pointer diagnostics if it is invalid.
fn load_spec(cfg: &RunConfig) -> Result<AmalgamationSpec> {
    let path = require(&cfg.spec, "spec", &cfg.command)?;
    let s: AmalgamationSpec = load(path)?;
    let report = validate_spec(&s);
    if !report.is_valid() {
        let lines = report.violations.iter().map(|v| format!("{}: {}: {}", path.display(), v.path, v.message)).collect();
        return Err(InputError(lines).into());
    }
    Ok(s)
}

fn load_graph(cfg: &RunConfig) -> Result<FiniteGraph> {
    load(require(&cfg.graph, "graph", &cfg.command)?)
}

fn load_td(cfg: &RunConfig, g: &FiniteGraph) -> Result<TreeDecomposition> {
    let path = require(&cfg.td, "td", &cfg.command)?;
    let td: TreeDecomposition = load(path)?;
    if let Some((node, &v)) = td.parts().iter().enumerate().find_map(|(t, p)| p.iter().find(|&&v| v >= g.n()).map(|v| (t, v))) {
        return Err(InputError(vec![format!("{}: /parts/{node}: vertex {v} out of range for n = {}", path.display(), g.n())]).into());
    }
    Ok(td)
}

fn single_radius(cfg: &RunConfig) -> Result<usize> {
    match cfg.radius.as_slice() {
        [r] => Ok(*r),
        _ => Err(InputError(vec![format!("{} takes a single radius", cfg.command)]).into()),
    }
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ValidateResult {
    kind: &'static str,
    valid: bool,
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trivial: Option<bool>,
}

fn validate(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let result = if cfg.spec.is_some() {
        let path = require(&cfg.spec, "spec", "validate")?;
        let s: AmalgamationSpec = load(path)?;
        let report = validate_spec(&s);
        ValidateResult {
            kind: "spec",
            valid: report.is_valid(),
            violations: report.violations.iter().map(|v| format!("{}: {}", v.path, v.message)).collect(),
            trivial: Some(is_trivial(&s).trivial),
        }
    } else {
        let g = load_graph(cfg)?;
        let mut violations: Vec<String> = validate_graph(&g).violations.iter().map(ToString::to_string).collect();
        let kind = if cfg.td.is_some() {
            let td = load_td(cfg, &g)?;
            violations.extend(verify_td(&g, &td)?.violations.iter().map(|v| format!("{v:?}")));
            "td"
        } else {
            "graph"
        };
        ValidateResult {
            kind,
            valid: violations.is_empty(),
            violations,
            trivial: None,
        }
    };
    sink.json("validate.json", &result)?;
    let mut text = format!("{}: {}\n", result.kind, if result.valid { "valid" } else { "invalid" });
    for v in &result.violations {
        writeln!(text, "  {v}")?;
    }
    Ok((verdict(result.valid), text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BuildSummary {
    vertices: usize,
    edges: usize,
    boundary: usize,
    tree_nodes: usize,
    max_ident_length: usize,
    max_adhesion_subtree_diameter: usize,
    td_valid: bool,
}

fn build_dot(b: &AmalgamGraph) -> DotStyle {
    DotStyle {
        boundary: b.patch.boundary.clone(),
        ..DotStyle::default()
    }
}

fn build(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let s = load_spec(cfg)?;
    let radius = single_radius(cfg)?;
    let b = build_amalgam(&s, radius, cfg.seed)?;
    let report = verify_td(b.graph(), &b.induced_td)?;
    let summary = BuildSummary {
        vertices: b.graph().n(),
        edges: b.graph().edge_count(),
        boundary: b.patch.boundary.len(),
        tree_nodes: b.tree.node_count(),
        max_ident_length: b.max_ident_length(),
        max_adhesion_subtree_diameter: adhesion_subtree_diameters(&b.induced_td).iter().map(|d| d.diameter).max().unwrap_or(0),
        td_valid: report.is_valid(),
    };
    sink.json("build.json", &b)?;
    sink.json("provenance.json", &b.provenance_json())?;
    sink.json("summary.json", &summary)?;
    sink.dot("build.dot", &graph_to_dot(b.graph(), "build", &build_dot(&b)))?;
    sink.dot("td.dot", &td_to_dot(&b.induced_td, "induced_td"))?;
    let text = format!(
        "build R={radius} seed={}: {} vertices, {} edges, {} boundary, {} tree nodes\nidentification length ≤ {}, adhesion subtree diameter ≤ {}, induced decomposition {}\n",
        cfg.seed,
        summary.vertices,
        summary.edges,
        summary.boundary,
        summary.tree_nodes,
        summary.max_ident_length,
        summary.max_adhesion_subtree_diameter,
        if summary.td_valid { "valid" } else { "INVALID" }
    );
    Ok((verdict(summary.td_valid), text))
}

fn verify(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let g = load_graph(cfg)?;
    let td = load_td(cfg, &g)?;
    let report = verify_td(&g, &td)?;
    sink.json("verify-td.json", &report)?;
    let mut text = format!("{} violation(s)\n", report.violations.len());
    for v in &report.violations {
        writeln!(text, "  {v:?}")?;
    }
    Ok((verdict(report.is_valid()), text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClosureResult {
    td: TreeDecomposition,
    valid: bool,
    connected_parts: amalgam_core::treedecomp::ConnectedPartsReport,
}

fn closure(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let g = load_graph(cfg)?;
    let td = load_td(cfg, &g)?;
    let closed = geodesic_closure(&g, &td)?;
    let result = ClosureResult {
        valid: verify_td(&g, &closed)?.is_valid(),
        connected_parts: check_connected_parts(&g, &closed),
        td: closed,
    };
    sink.json("closure.json", &result)?;
    sink.dot("closure.dot", &td_to_dot(&result.td, "closure"))?;
    let added: usize = result.td.parts().iter().zip(td.parts()).map(|(a, b)| a.len() - b.len()).sum();
    let ok = result.valid && result.connected_parts.hypothesis_holds && result.connected_parts.consistent;
    let text = format!(
        "closure added {added} vertex slot(s) over {} parts; valid: {}, connected parts: {}\n",
        td.node_count(),
        result.valid,
        result.connected_parts.hypothesis_holds
    );
    Ok((verdict(ok), text))
}

fn split_outcome(e: &SplitError) -> Outcome {
    match e {
        SplitError::NoSplit { .. } | SplitError::Inconclusive { .. } => Outcome::Inconclusive,
        _ => Outcome::Fail,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SplitFailure {
    error: String,
}

fn split(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let s = load_spec(cfg)?;
    let radius = single_radius(cfg)?;
    match stallings_split_spec(&s, cfg.k, radius, cfg.seed, cfg.cap) {
        Ok(out) => {
            sink.json("split.json", &out)?;
            sink.dot("split.dot", &td_to_dot(&out.td, "split"))?;
            let f = out.spec();
            let text = format!(
                "split at separator {:?} (orbit of {}): type {}, adhesion {}, factors on {} and {} vertices\n",
                out.separator,
                out.orbit.len(),
                u8::from(f.kind),
                f.adhesion_size(),
                f.g1.n(),
                f.g2.as_ref().unwrap_or(&f.g1).n()
            );
            Ok((Outcome::Pass, text))
        }
        Err(e) => {
            sink.json("split.json", &SplitFailure { error: e.to_string() })?;
            Ok((split_outcome(&e), format!("{e}\n")))
        }
    }
}

fn factorise(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let s = load_spec(cfg)?;
    let radius = single_radius(cfg)?;
    let tree = terminal_factorisation(&s, cfg.k, radius, cfg.depth, cfg.seed, cfg.cap);
    sink.json("factorisation.json", &tree)?;
    let leaves = tree.leaves();
    let terminal = leaves.iter().all(|l| matches!(l.status, FactorStatus::Finite | FactorStatus::OneEndedAtScale));
    let mut text = tree.summary();
    writeln!(text, "{} leaves, height {}", leaves.len(), tree.height())?;
    Ok((if terminal { Outcome::Pass } else { Outcome::Inconclusive }, text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TreeEndRow {
    radius: usize,
    max_adhesion: usize,
    max_degree: usize,
    edges: Vec<TreeEndDegree>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EndsResult {
    accessibility: AccessibilityTable,
    tree_ends: Vec<TreeEndRow>,
}

fn ends(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let s = load_spec(cfg)?;
    let accessibility = accessibility_probe(&s, cfg.k, &cfg.radius, cfg.seed, cfg.cap)?;
    let mut tree_ends = Vec::new();
    for &radius in &cfg.radius {
        let b = build_amalgam(&s, radius, cfg.seed)?;
        let edges = tree_end_degrees(&b);
        tree_ends.push(TreeEndRow {
            radius,
            max_adhesion: edges.iter().map(|e| e.adhesion.len()).max().unwrap_or(0),
            max_degree: edges.iter().map(|e| e.degree).max().unwrap_or(0),
            edges,
        });
    }
    let result = EndsResult { accessibility, tree_ends };
    sink.json("ends.json", &result)?;
    let mut text = format!("accessibility at k={}\n{:>3} {:>7} {:>6} {:>9} {:>5}\n", cfg.k, "R", "regions", "pairs", "separated", "pass");
    for r in &result.accessibility.rows {
        writeln!(text, "{:>3} {:>7} {:>6} {:>9} {:>5}", r.radius, r.regions, r.pairs, r.separated_pairs, r.pass)?;
    }
    for t in &result.tree_ends {
        writeln!(text, "R={}: tree-end degree ≤ {} (largest adhesion {})", t.radius, t.max_degree, t.max_adhesion)?;
    }
    let degrees_ok = result.tree_ends.iter().all(|t| t.max_degree <= t.max_adhesion);
    let truncated = result.accessibility.rows.iter().any(|r| r.separators_truncated);
    let outcome = match (result.accessibility.pass() && degrees_ok, truncated) {
        (true, _) => Outcome::Pass,
        (false, true) => Outcome::Inconclusive,
        (false, false) => Outcome::Fail,
    };
    Ok((outcome, text))
}

fn separators(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let (g, boundary) = if cfg.spec.is_some() {
        let b = build_amalgam(&load_spec(cfg)?, single_radius(cfg)?, cfg.seed)?;
        (b.patch.graph, b.patch.boundary)
    } else {
        (load_graph(cfg)?, Vec::new())
    };
    let list = tight_separators(&g, cfg.k, cfg.cap);
    sink.json("separators.json", &list)?;
    if let Some(first) = list.separators.first() {
        let style = DotStyle {
            boundary,
            separator: first.vertices.clone(),
            regions: first.sides.clone(),
        };
        sink.dot("separators.dot", &graph_to_dot(&g, "separators", &style))?;
    }
    let mut text = format!("{} tight separator(s) of size ≤ {}{}\n", list.separators.len(), cfg.k, if list.truncated { " (truncated)" } else { "" });
    for sep in &list.separators {
        writeln!(text, "  {:?}: {} sides{}", sep.vertices, sep.sides.len(), if sep.minimal { "" } else { ", not minimal" })?;
    }
    Ok((if list.truncated { Outcome::Inconclusive } else { Outcome::Pass }, text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HyperbolicityResult {
    experiment: ExperimentTable,
    quasi_geodesics: Vec<(usize, FactorGeodesicReport)>,
}

fn hyperbolicity(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    if cfg.spec.is_none() {
        let g = load_graph(cfg)?;
        let all: Vec<usize> = (0..g.n()).collect();
        let report = delta_thin(&g, &all)?;
        sink.json("hyperbolicity.json", &report)?;
        return Ok((Outcome::Pass, format!("δ = {}\n", report.delta)));
    }
    let s = load_spec(cfg)?;
    let experiment = amalgam_hyperbolicity_experiment(&s, &cfg.radius, cfg.seed)?;
    let mut quasi_geodesics = Vec::new();
    for &radius in &cfg.radius {
        let b = build_amalgam(&s, radius, cfg.seed)?;
        quasi_geodesics.push((radius, factor_geodesic_certificates(&s, &b, cfg.cap)?));
    }
    let result = HyperbolicityResult { experiment, quasi_geodesics };
    sink.json("hyperbolicity.json", &result)?;
    let mut text = result.experiment.render();
    let mut violations = 0;
    for (radius, q) in &result.quasi_geodesics {
        violations += q.violations.len();
        writeln!(text, "R={radius}: {} factor geodesics, {} violation(s) of the ({}, 0) certificate", q.walks, q.violations.len(), q.gamma)?;
    }
    Ok((verdict(violations == 0), text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RoundtripResult {
    radius: usize,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<AmalgamationSpec>,
    isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

fn roundtrip(cfg: &RunConfig, sink: &mut Sink) -> Result<(Outcome, String)> {
    let s = load_spec(cfg)?;
    let radius = single_radius(cfg)?;
    let depth = radius.saturating_sub(1);
    let b = build_amalgam(&s, radius, cfg.seed)?;
    let a = lifted_action(&s, &b, DEFAULT_GROUP_CAP)?;
    let (outcome, result) = match td_to_amalgamation(&b.patch, &a, &b.induced_td, None, DEFAULT_MAX_WORD) {
        Ok(conv) => {
            let rebuilt = build_amalgam(&conv.spec, radius, cfg.seed).map_err(|e| anyhow!("rebuilding the recovered spec: {e}"))?;
            let iso = boundary_tolerant_isomorphic(&b.patch, &rebuilt.patch, depth)?;
            let reason = match &iso {
                amalgam_core::IsoOutcome::NotIsomorphic { reason } => Some(reason.clone()),
                _ => None,
            };
            let result = RoundtripResult {
                radius,
                depth,
                spec: Some(conv.spec),
                isomorphic: iso.is_isomorphic(),
                reason,
            };
            (verdict(result.isomorphic), result)
        }
        Err(e) => (
            split_outcome(&e),
            RoundtripResult {
                radius,
                depth,
                spec: None,
                isomorphic: false,
                reason: Some(e.to_string()),
            },
        ),
    };
    sink.json("roundtrip.json", &result)?;
    let text = match (&result.spec, result.isomorphic) {
        (Some(f), true) => format!(
            "recovered type {} spec with adhesion {}; rebuild is isomorphic to depth {depth}\n",
            u8::from(f.kind),
            f.adhesion_size()
        ),
        _ => format!("round trip failed: {}\n", result.reason.as_deref().unwrap_or("")),
    };
    Ok((outcome, text))
}
