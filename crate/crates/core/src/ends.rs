//! Ends at finite scale: tight separators, boundary-reaching regions,
//! disjoint-path counts and an accessibility probe.
//!
//! Nothing here claims an end exists. Every report carries the radius and
//! separator bound it was computed at.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::amalgam::{build_amalgam, AmalgamError, AmalgamGraph, AmalgamationSpec};
use crate::graph::FiniteGraph;
use crate::iso::Patch;

pub const DEFAULT_SEPARATOR_CAP: usize = 100_000;

/// A boundary vertex at distance at least this from a separator makes its
/// region deep. Shallower regions are corners cut off near the boundary.
pub const DEEP: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightSeparator {
    pub vertices: Vec<usize>,
    /// Components of `G - S` in which every vertex of `S` has a neighbour.
    pub sides: Vec<Vec<usize>>,
    /// No proper subset disconnects the graph.
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorList {
    pub k: usize,
    pub separators: Vec<TightSeparator>,
    pub candidates: usize,
    /// The candidate cap was hit; the list is a prefix.
    pub truncated: bool,
}

fn mask(n: usize, vs: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in vs {
        m[v] = true;
    }
    m
}

/// Components of `g - s` each of which every vertex of `s` touches.
pub fn full_components(g: &FiniteGraph, s: &[usize]) -> Vec<Vec<usize>> {
    let comps = g.components_avoiding(&mask(g.n(), s));
    let mut comp_of = vec![usize::MAX; g.n()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut touched = vec![0usize; comps.len()];
    for &v in s {
        let mut seen: Vec<usize> = g.neighbors(v).iter().map(|&w| comp_of[w]).filter(|&c| c != usize::MAX).collect();
        seen.sort_unstable();
        seen.dedup();
        for c in seen {
            touched[c] += 1;
        }
    }
    comps
        .into_iter()
        .zip(touched)
        .filter(|&(_, t)| t == s.len())
        .map(|(c, _)| c)
        .collect()
}

fn disconnects(g: &FiniteGraph, s: &[usize]) -> bool {
    g.components_avoiding(&mask(g.n(), s)).len() > 1
}

fn is_minimal(g: &FiniteGraph, s: &[usize]) -> bool {
    // Supersets of a separating set separate, so checking the maximal
    // proper subsets suffices.
    if s.len() == 1 {
        return true;
    }
    (0..s.len()).all(|skip| {
        let sub: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
        !disconnects(g, &sub) && is_minimal(g, &sub)
    })
}

/// Every vertex set of size at most `k` with two or more full components,
/// by size then lexicographically. Vertices of degree below 2 cannot be
/// in a tight separator and are skipped.
pub fn tight_separators(g: &FiniteGraph, k: usize, cap: usize) -> SeparatorList {
    let pool: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 2).collect();
    let mut out = SeparatorList {
        k,
        separators: Vec::new(),
        candidates: 0,
        truncated: false,
    };
    for size in 1..=k.min(pool.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if out.candidates == cap {
                out.truncated = true;
                return out;
            }
            out.candidates += 1;
            let s: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
            let sides = full_components(g, &s);
            if sides.len() >= 2 {
                out.separators.push(TightSeparator {
                    minimal: is_minimal(g, &s),
                    vertices: s,
                    sides,
                });
            }
            // Next combination in lexicographic order.
            let mut i = size;
            while i > 0 && idx[i - 1] == pool.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EndRegion {
    pub separator: Vec<usize>,
    pub vertices: Vec<usize>,
    pub reaches_boundary: bool,
    /// Largest distance from the separator to a boundary vertex of the
    /// region.
    pub boundary_depth: Option<usize>,
    pub scale: usize,
}

impl EndRegion {
    pub fn is_deep(&self) -> bool {
        self.boundary_depth.is_some_and(|d| d >= DEEP)
    }
}

/// Components of the patch minus `s`, flagged by whether they meet the
/// boundary.
pub fn ends_at_scale(p: &Patch, s: &[usize]) -> Vec<EndRegion> {
    let g = &p.graph;
    let dist = g.distances_from_set(s);
    g.components_avoiding(&mask(g.n(), s))
        .into_iter()
        .map(|vertices| {
            let boundary_depth = vertices.iter().filter(|&&v| p.is_boundary(v)).filter_map(|&v| dist[v]).max();
            let boundary_depth = if s.is_empty() {
                vertices.iter().any(|&v| p.is_boundary(v)).then_some(usize::MAX)
            } else {
                boundary_depth
            };
            EndRegion {
                separator: s.to_vec(),
                reaches_boundary: vertices.iter().any(|&v| p.is_boundary(v)),
                boundary_depth,
                vertices,
                scale: p.radius,
            }
        })
        .collect()
}

/// `s` leaves at least two deep regions.
pub fn distinguishes_at_scale(p: &Patch, s: &[usize]) -> bool {
    ends_at_scale(p, s).iter().filter(|r| r.is_deep()).count() >= 2
}

/// Unit-capacity max-flow on vertices, via vertex splitting.
struct VertexFlow {
    // Node 2v is v_in, 2v+1 is v_out; node 2n is the source, 2n+1 the sink.
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<(usize, i64)>,
}

impl VertexFlow {
    fn new(nodes: usize) -> Self {
        VertexFlow {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, c: i64) {
        self.adj[a].push((b, self.edges.len()));
        self.edges.push((b, c));
        self.adj[b].push((a, self.edges.len()));
        self.edges.push((a, 0));
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let mut flow = 0;
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            while let Some(x) = queue.pop_front() {
                if x == sink {
                    reached = true;
                    break;
                }
                for &(y, e) in &self.adj[x] {
                    if y != source && prev[y].is_none() && self.edges[e].1 > 0 {
                        prev[y] = Some(e);
                        queue.push_back(y);
                    }
                }
            }
            if !reached {
                return flow;
            }
            let mut y = sink;
            while let Some(e) = prev[y] {
                self.edges[e].1 -= 1;
                self.edges[e ^ 1].1 += 1;
                y = self.edges[e ^ 1].0;
            }
            flow += 1;
        }
    }
}

/// Maximum number of vertex-disjoint paths inside `region ∪ core` from
/// `core` to boundary vertices of the region. Every vertex, core included,
/// carries unit capacity, so the count never exceeds `|core|`.
pub fn end_degree_estimate(p: &Patch, region: &EndRegion, core: &[usize]) -> usize {
    if region.vertices.is_empty() {
        return 0;
    }
    let g = &p.graph;
    let n = g.n();
    let mut inside = mask(n, &region.vertices);
    for &c in core {
        inside[c] = true;
    }
    let in_region = mask(n, &region.vertices);
    let (source, sink) = (2 * n, 2 * n + 1);
    let mut f = VertexFlow::new(2 * n + 2);
    for v in (0..n).filter(|&v| inside[v]) {
        f.add(2 * v, 2 * v + 1, 1);
        for &w in g.neighbors(v) {
            if inside[w] {
                f.add(2 * v + 1, 2 * w, 1);
            }
        }
    }
    for &c in core {
        f.add(source, 2 * c, 1);
    }
    for v in (0..n).filter(|&v| in_region[v] && p.is_boundary(v)) {
        f.add(2 * v + 1, sink, 1);
    }
    f.max_flow(source, sink)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AccessibilityRow {
    pub radius: usize,
    /// Boundary-reaching components of the build minus the unit ball at
    /// the root.
    pub regions: usize,
    pub pairs: usize,
    pub separated_pairs: usize,
    /// First pair no separator of size at most `k` splits.
    pub unseparated: Option<(usize, usize)>,
    pub separators_truncated: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessibilityTable {
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<AccessibilityRow>,
}

impl AccessibilityTable {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn separates(g: &FiniteGraph, s: &[usize], a: &[usize], b: &[usize]) -> bool {
    let a: Vec<usize> = a.iter().copied().filter(|v| !s.contains(v)).collect();
    let b: Vec<usize> = b.iter().copied().filter(|v| !s.contains(v)).collect();
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let comps = g.components_avoiding(&mask(g.n(), s));
    let comp_of = |v: usize| comps.iter().position(|c| c.binary_search(&v).is_ok());
    a.iter().all(|&x| b.iter().all(|&y| comp_of(x) != comp_of(y)))
}

/// For each radius, every pair of boundary-reaching regions of
/// `build - B(root, 1)` must be split by a tight separator of size at most
/// `k`. The regions stand in for ends; their boundary vertices are what
/// has to be separated.
pub fn accessibility_probe(s: &AmalgamationSpec, k: usize, radii: &[usize], seed: u64, cap: usize) -> Result<AccessibilityTable, AmalgamError> {
    let mut rows = Vec::new();
    for &radius in radii {
        let b = build_amalgam(s, radius, seed)?;
        let p = &b.patch;
        let g = &p.graph;
        let ball = g.ball(p.root, 1);
        let regions: Vec<Vec<usize>> = ends_at_scale(p, &ball)
            .into_iter()
            .filter(|r| r.reaches_boundary)
            .map(|r| r.vertices.into_iter().filter(|&v| p.is_boundary(v)).collect())
            .collect();
        let list = tight_separators(g, k, cap);
        let mut pairs = 0;
        let mut separated_pairs = 0;
        let mut unseparated = None;
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                pairs += 1;
                if list.separators.iter().any(|t| separates(g, &t.vertices, &regions[i], &regions[j])) {
                    separated_pairs += 1;
                } else if unseparated.is_none() {
                    unseparated = Some((i, j));
                }
            }
        }
        rows.push(AccessibilityRow {
            radius,
            regions: regions.len(),
            pairs,
            separated_pairs,
            unseparated,
            separators_truncated: list.truncated,
            pass: unseparated.is_none(),
        });
    }
    Ok(AccessibilityTable { k, seed, rows })
}

/// Disjoint-path count into the far side of one tree edge of a build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeEndDegree {
    pub edge: (usize, usize),
    pub adhesion: Vec<usize>,
    pub regions: usize,
    /// Largest estimate over the boundary-reaching regions beyond the edge.
    pub degree: usize,
}

/// For every edge of the induced decomposition, orient it away from the
/// root node and count disjoint paths from the near part into each
/// boundary-reaching region of the build minus the adhesion set that lies
/// on the far side. Every such path crosses the adhesion set.
pub fn tree_end_degrees(b: &AmalgamGraph) -> Vec<TreeEndDegree> {
    let p = &b.patch;
    let td = &b.induced_td;
    let mut out = Vec::new();
    for (u, v) in td.tree().edges() {
        let (near, far) = if b.tree.depth[u] <= b.tree.depth[v] { (u, v) } else { (v, u) };
        let adhesion = td.adhesion(near, far);
        let (_, far_nodes) = td.sides(near, far);
        let mut far_side = vec![false; p.graph.n()];
        for &t in &far_nodes {
            for &x in td.part(t) {
                far_side[x] = true;
            }
        }
        let regions: Vec<EndRegion> = ends_at_scale(p, &adhesion)
            .into_iter()
            .filter(|r| r.reaches_boundary && r.vertices.iter().any(|&x| far_side[x]))
            .collect();
        let degree = regions.iter().map(|r| end_degree_estimate(p, r, td.part(near))).max().unwrap_or(0);
        out.push(TreeEndDegree {
            edge: (near, far),
            adhesion,
            regions: regions.len(),
            degree,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex_sets(l: &SeparatorList) -> Vec<Vec<usize>> {
        l.separators.iter().map(|s| s.vertices.clone()).collect()
    }

    #[test]
    fn double_ray_tree_ends_have_degree_one() {
        let b = build_amalgam(&crate::fixtures::spec_double_ray(), 3, 0).unwrap();
        let degrees = tree_end_degrees(&b);
        assert_eq!(degrees.len(), b.induced_td.tree().edge_count());
        assert!(degrees.iter().all(|d| d.degree == 1 && d.adhesion.len() == 1));
    }

    #[test]
    fn path_cut_vertices() {
        let l = tight_separators(&FiniteGraph::path(5), 1, DEFAULT_SEPARATOR_CAP);
        assert_eq!(vertex_sets(&l), vec![vec![1], vec![2], vec![3]]);
        assert!(l.separators.iter().all(|s| s.minimal && s.sides.len() == 2));
    }

    #[test]
    fn hexagon_separators() {
        let c6 = FiniteGraph::cycle(6);
        assert!(tight_separators(&c6, 1, DEFAULT_SEPARATOR_CAP).separators.is_empty());
        let pairs = vertex_sets(&tight_separators(&c6, 2, DEFAULT_SEPARATOR_CAP));
        assert_eq!(pairs.len(), 9);
        assert!(pairs.contains(&vec![0, 3]));
        assert!(!pairs.contains(&vec![0, 1]));
    }

    #[test]
    fn cap_truncates() {
        let l = tight_separators(&FiniteGraph::path(5), 1, 2);
        assert!(l.truncated);
        assert_eq!(vertex_sets(&l), vec![vec![1], vec![2]]);
    }

    #[test]
    fn non_minimal_tight_set() {
        // Pendant 4 hangs off 0; {0, 2} has full components {1} and {3}
        // but {0} alone already separates.
        let g = FiniteGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
        let l = tight_separators(&g, 2, DEFAULT_SEPARATOR_CAP);
        let s = l.separators.iter().find(|s| s.vertices == vec![0, 2]).unwrap();
        assert!(!s.minimal);
    }

    #[test]
    fn regions_of_a_path() {
        let p = Patch::new(FiniteGraph::path(9), vec![0, 8], 4, 4);
        let r = ends_at_scale(&p, &[4]);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| r.reaches_boundary && r.is_deep()));
        assert_eq!(ends_at_scale(&p, &[]).len(), 1);
        let cut = ends_at_scale(&p, &[0, 8]);
        assert!(cut.iter().all(|r| !r.reaches_boundary));
    }

    #[test]
    fn grid_core_has_four_strands() {
        let g = FiniteGraph::grid(5, 5);
        let boundary: Vec<usize> = (0..25).filter(|&v| v % 5 == 0 || v % 5 == 4 || !(5..20).contains(&v)).collect();
        let p = Patch::new(g, boundary, 12, 2);
        let region = ends_at_scale(&p, &[]).pop().unwrap();
        let core = p.graph.ball(12, 1);
        assert_eq!(end_degree_estimate(&p, &region, &core), 4);
        assert_eq!(end_degree_estimate(&p, &region, &[12]), 1);
    }

    #[test]
    fn empty_region_has_degree_zero() {
        let p = Patch::finite(FiniteGraph::path(3), 0);
        let empty = EndRegion {
            separator: vec![],
            vertices: vec![],
            reaches_boundary: false,
            boundary_depth: None,
            scale: 0,
        };
        assert_eq!(end_degree_estimate(&p, &empty, &[1]), 0);
    }
}
