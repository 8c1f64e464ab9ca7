//! Thin triangles, quasi-geodesic certificates and the hyperbolicity
//! experiment on amalgam builds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::amalgam::{build_amalgam, AmalgamError, AmalgamGraph, AmalgamationSpec};
use crate::error::GraphError;
use crate::geodesic::{all_geodesics, DistanceTable};
use crate::graph::FiniteGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangleWitness {
    pub corners: [usize; 3],
    /// Vertex of `p12` farthest from the other two sides.
    pub vertex: usize,
    pub p12: Vec<usize>,
    pub p23: Vec<usize>,
    pub p13: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HyperbolicityReport {
    pub delta: usize,
    pub witness: Option<TriangleWitness>,
    pub restricted_to: Vec<usize>,
}

/// Bottleneck values over the geodesics from `a` to `b`: `row[v]` is the
/// largest `min_w d(v, w)` a single geodesic can achieve. A dynamic program
/// over the geodesic interval, in order of distance from `a`.
fn bottleneck_row(g: &FiniteGraph, dt: &DistanceTable, a: usize, b: usize, scratch: &mut [usize], row: &mut [usize]) {
    let interval = dt.interval(a, b);
    let preds: Vec<Vec<usize>> = interval
        .iter()
        .map(|&w| g.neighbors(w).iter().copied().filter(|&p| dt.get(a, p) + 1 == dt.get(a, w)).collect())
        .collect();
    for (v, out) in row.iter_mut().enumerate() {
        for (i, &w) in interval.iter().enumerate() {
            let here = dt.get(v, w);
            scratch[w] = match i {
                0 => here,
                _ => preds[i].iter().map(|&p| scratch[p]).max().unwrap_or(0).min(here),
            };
        }
        *out = scratch[b];
    }
}

/// A geodesic from `a` to `b` achieving the bottleneck value for `v`.
fn bottleneck_path(g: &FiniteGraph, dt: &DistanceTable, v: usize, a: usize, b: usize) -> Vec<usize> {
    let mut best: HashMap<usize, (usize, Option<usize>)> = HashMap::new();
    for w in dt.interval(a, b) {
        let here = dt.get(v, w);
        if w == a {
            best.insert(w, (here, None));
            continue;
        }
        let da = dt.get(a, w);
        let from = g
            .neighbors(w)
            .iter()
            .filter(|&&p| dt.get(a, p) + 1 == da)
            .filter_map(|&p| best.get(&p).map(|&(val, _)| (val, p)))
            .max_by_key(|&(val, p)| (val, std::cmp::Reverse(p)));
        if let Some((val, p)) = from {
            best.insert(w, (val.min(here), Some(p)));
        }
    }
    let mut out = vec![b];
    let mut cur = b;
    while let Some(p) = best[&cur].1 {
        out.push(p);
        cur = p;
    }
    out.reverse();
    out
}

fn some_geodesic(g: &FiniteGraph, a: usize, b: usize) -> Vec<usize> {
    all_geodesics(g, a, b, 1).map(|l| l.paths.into_iter().next().unwrap_or_default()).unwrap_or_default()
}

/// Exact δ over triangles with corners in `inner`, maximised over every
/// choice of geodesic sides. For a vertex `v` of a side from `x1` to `x2`
/// the other two sides are chosen independently to stay as far from `v` as
/// possible, which a bottleneck search over each geodesic DAG finds.
pub fn delta_thin(g: &FiniteGraph, inner: &[usize]) -> Result<HyperbolicityReport, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if inner.is_empty() {
        return Err(GraphError::Schema("inner vertex set is empty".into()));
    }
    if let Some(&v) = inner.iter().find(|&&v| v >= g.n()) {
        return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let mut inner = inner.to_vec();
    inner.sort_unstable();
    inner.dedup();
    let dt = DistanceTable::new(g);
    let n = g.n();
    let intervals: Vec<Vec<Vec<usize>>> = inner.iter().map(|&x1| inner.iter().map(|&x2| dt.interval(x1, x2)).collect()).collect();
    let mut scratch = vec![0; n];
    let mut rows = vec![0; inner.len() * n];
    let mut delta = 0;
    let mut arg: Option<([usize; 3], usize)> = None;
    // The side from x1 to x2 is symmetric in its endpoints, so unordered
    // pairs suffice.
    for &x3 in &inner {
        for (i, &a) in inner.iter().enumerate() {
            bottleneck_row(g, &dt, a, x3, &mut scratch, &mut rows[i * n..(i + 1) * n]);
        }
        for (i1, &x1) in inner.iter().enumerate() {
            for (i2, &x2) in inner.iter().enumerate().skip(i1 + 1) {
                for &v in &intervals[i1][i2] {
                    let d = rows[i2 * n + v].min(rows[i1 * n + v]);
                    if d > delta || (arg.is_none() && d == delta) {
                        delta = d;
                        arg = Some(([x1, x2, x3], v));
                    }
                }
            }
        }
    }
    let witness = arg.map(|([x1, x2, x3], v)| {
        let mut p12 = some_geodesic(g, x1, v);
        p12.extend(some_geodesic(g, v, x2).into_iter().skip(1));
        TriangleWitness {
            corners: [x1, x2, x3],
            vertex: v,
            p12,
            p23: bottleneck_path(g, &dt, v, x2, x3),
            p13: bottleneck_path(g, &dt, v, x1, x3),
        }
    });
    Ok(HyperbolicityReport {
        delta,
        witness,
        restricted_to: inner,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuasiGeodesicCert {
    pub gamma: f64,
    pub c: f64,
    /// Walk positions with the largest ratio of walk to graph distance.
    pub worst_pair: Option<(usize, usize)>,
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum QuasiOutcome {
    Certificate(QuasiGeodesicCert),
    Violation {
        positions: (usize, usize),
        vertices: (usize, usize),
        walk_distance: usize,
        graph_distance: usize,
    },
}

impl QuasiOutcome {
    pub fn is_certificate(&self) -> bool {
        matches!(self, QuasiOutcome::Certificate(_))
    }
}

/// Checks `j - i ≤ γ·d(x_i, x_j) + c` for all walk positions `i < j`.
/// Reports the pair with the largest excess when the inequality fails.
pub fn quasi_geodesic_check(g: &FiniteGraph, walk: &[usize], gamma: f64, c: f64) -> Result<QuasiOutcome, GraphError> {
    for (i, &v) in walk.iter().enumerate() {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
        }
        if i > 0 && !g.has_edge(walk[i - 1], v) {
            return Err(GraphError::NotAWalk(i - 1, i));
        }
    }
    let dists: Vec<Vec<Option<usize>>> = walk.iter().map(|&v| g.bfs_distances(v)).collect();
    let mut worst: Option<((usize, usize), f64)> = None;
    let mut violation: Option<((usize, usize), f64, usize)> = None;
    for i in 0..walk.len() {
        for j in i + 1..walk.len() {
            let d = dists[i][walk[j]].ok_or(GraphError::NoPath(walk[i], walk[j]))?;
            let len = (j - i) as f64;
            let excess = len - (gamma * d as f64 + c);
            if excess > 1e-9 && violation.is_none_or(|(_, e, _)| excess > e) {
                violation = Some(((i, j), excess, d));
            }
            let ratio = if d == 0 { f64::INFINITY } else { len / d as f64 };
            if worst.is_none_or(|(_, r)| ratio > r) {
                worst = Some(((i, j), ratio));
            }
        }
    }
    if let Some(((i, j), _, d)) = violation {
        return Ok(QuasiOutcome::Violation {
            positions: (i, j),
            vertices: (walk[i], walk[j]),
            walk_distance: j - i,
            graph_distance: d,
        });
    }
    Ok(QuasiOutcome::Certificate(QuasiGeodesicCert {
        gamma,
        c,
        worst_pair: worst.map(|(p, _)| p),
        worst_ratio: worst.map_or(1.0, |(_, r)| r),
    }))
}

/// Largest in-factor distance between two vertices of one adhesion set.
pub fn adhesion_diameter(s: &AmalgamationSpec) -> usize {
    s.all_labels()
        .into_iter()
        .map(|k| {
            let g = s.graph(s.side_of_label(k));
            let x = s.adhesion(k);
            x.iter()
                .map(|&u| {
                    let d = g.bfs_distances(u);
                    x.iter().filter_map(|&v| d[v]).max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorGeodesicReport {
    pub gamma: f64,
    pub walks: usize,
    /// Pairs whose geodesic list was cut at the cap.
    pub truncated_pairs: usize,
    pub violations: Vec<(usize, Vec<usize>)>,
}

/// Every geodesic of every factor copy in the build, checked against the
/// `(max(1, γ'/2), 0)` certificate where `γ'` is the adhesion diameter.
pub fn factor_geodesic_certificates(s: &AmalgamationSpec, b: &AmalgamGraph, cap: usize) -> Result<FactorGeodesicReport, GraphError> {
    let gamma = (adhesion_diameter(s) as f64 / 2.0).max(1.0);
    let mut report = FactorGeodesicReport {
        gamma,
        walks: 0,
        truncated_pairs: 0,
        violations: Vec::new(),
    };
    for node in 0..b.tree.node_count() {
        let factor = s.graph(b.tree.side[node]);
        let to_build = b.copy_map(node);
        for x in 0..factor.n() {
            for y in x + 1..factor.n() {
                let list = all_geodesics(factor, x, y, cap)?;
                report.truncated_pairs += usize::from(list.truncated);
                for path in list.paths {
                    let walk: Vec<usize> = path.iter().map(|&v| to_build[v]).collect();
                    report.walks += 1;
                    if !quasi_geodesic_check(b.graph(), &walk, gamma, 0.0)?.is_certificate() {
                        report.violations.push((node, walk));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRow {
    pub radius: usize,
    pub delta_g1: usize,
    pub delta_g2: Option<usize>,
    pub adhesion_diameter: usize,
    /// `R - γ - 1`; `None` when negative.
    pub inner_radius: Option<usize>,
    pub inner_size: usize,
    pub delta_build: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub seed: u64,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    /// Aligned text rendering.
    pub fn render(&self) -> String {
        let mut out = format!("{:>3} {:>6} {:>6} {:>5} {:>5} {:>6} {:>8}\n", "R", "δ(G1)", "δ(G2)", "γ", "r", "|ball|", "δ(build)");
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        for r in &self.rows {
            out.push_str(&format!(
                "{:>3} {:>6} {:>6} {:>5} {:>5} {:>6} {:>8}\n",
                r.radius,
                r.delta_g1,
                opt(r.delta_g2),
                r.adhesion_diameter,
                opt(r.inner_radius),
                r.inner_size,
                opt(r.delta_build)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error("factor on side {0} is disconnected")]
    DisconnectedFactor(u8),
}

fn full_delta(g: &FiniteGraph) -> Result<usize, GraphError> {
    let all: Vec<usize> = (0..g.n()).collect();
    Ok(delta_thin(g, &all)?.delta)
}

/// δ of each factor and of the build's inner ball at every radius.
pub fn amalgam_hyperbolicity_experiment(s: &AmalgamationSpec, radii: &[usize], seed: u64) -> Result<ExperimentTable, HypError> {
    for side in 1..=s.side_count() {
        if !s.graph(side).is_connected() {
            return Err(HypError::DisconnectedFactor(side));
        }
    }
    let delta_g1 = full_delta(&s.g1)?;
    let delta_g2 = s.g2.as_ref().map(full_delta).transpose()?;
    let gamma = adhesion_diameter(s);
    let mut rows = Vec::new();
    for &radius in radii {
        let inner_radius = radius.checked_sub(gamma + 1);
        let (inner_size, delta_build) = match inner_radius {
            Some(r) => {
                let b = build_amalgam(s, radius, seed)?;
                let ball = b.graph().ball(b.patch.root, r);
                (ball.len(), Some(delta_thin(b.graph(), &ball)?.delta))
            }
            None => (0, None),
        };
        rows.push(ExperimentRow {
            radius,
            delta_g1,
            delta_g2,
            adhesion_diameter: gamma,
            inner_radius,
            inner_size,
            delta_build,
        });
    }
    Ok(ExperimentTable { seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn paths_are_zero_hyperbolic() {
        assert_eq!(delta_thin(&FiniteGraph::path(5), &all(5)).unwrap().delta, 0);
    }

    #[test]
    fn square_has_delta_one() {
        let r = delta_thin(&FiniteGraph::cycle(4), &all(4)).unwrap();
        assert_eq!(r.delta, 1);
        let w = r.witness.unwrap();
        let g = FiniteGraph::cycle(4);
        let dist = g.bfs_distances(w.vertex);
        let near = w.p23.iter().chain(&w.p13).filter_map(|&x| dist[x]).min().unwrap();
        assert_eq!(near, 1);
        assert!(w.p12.contains(&w.vertex));
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = FiniteGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(delta_thin(&g, &[0]), Err(GraphError::Disconnected));
    }

    #[test]
    fn geodesic_certificate() {
        let out = quasi_geodesic_check(&FiniteGraph::path(6), &[0, 1, 2, 3, 4, 5], 1.0, 0.0).unwrap();
        let QuasiOutcome::Certificate(cert) = out else { panic!() };
        assert_eq!(cert.worst_ratio, 1.0);
    }

    #[test]
    fn detour_violates() {
        let out = quasi_geodesic_check(&FiniteGraph::cycle(3), &[0, 1, 2], 1.0, 0.0).unwrap();
        assert_eq!(
            out,
            QuasiOutcome::Violation {
                positions: (0, 2),
                vertices: (0, 2),
                walk_distance: 2,
                graph_distance: 1
            }
        );
    }

    #[test]
    fn broken_walk_is_an_error() {
        assert_eq!(quasi_geodesic_check(&FiniteGraph::path(4), &[0, 2], 1.0, 0.0), Err(GraphError::NotAWalk(0, 1)));
    }
}
