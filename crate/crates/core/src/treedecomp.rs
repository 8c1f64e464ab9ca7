//! Tree-decompositions: axioms, geodesic closure, contraction and
//! basic-decomposition checks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::LocalAction;
use crate::graph::FiniteGraph;
use crate::iso::Patch;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("decomposition tree is not a tree")]
    NotATree,
    #[error("tree has {nodes} nodes but {parts} parts were given")]
    PartCount { nodes: usize, parts: usize },
    #[error("part {node} mentions vertex {vertex}, host graph has {n} vertices")]
    VertexOutOfRange { node: usize, vertex: usize, n: usize },
    #[error("host graph is disconnected; geodesic closure is undefined")]
    Disconnected,
    #[error("map {map} of action `{action}` sends part {node} onto a set that is not a part")]
    PartsNotPermuted { action: String, map: usize, node: usize },
    #[error("{0}")]
    Schema(String),
}

/// JSON form: `{ "tree": graph, "parts": { nodeId: [vertexIds] } }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdJson {
    pub tree: FiniteGraph,
    pub parts: BTreeMap<usize, Vec<usize>>,
}

/// A tree together with a vertex set (part) per node. Parts are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TdJson", into = "TdJson")]
pub struct TreeDecomposition {
    tree: FiniteGraph,
    parts: Vec<Vec<usize>>,
}

impl TryFrom<TdJson> for TreeDecomposition {
    type Error = TdError;

    fn try_from(raw: TdJson) -> Result<Self, TdError> {
        let nodes = raw.tree.n();
        if let Some((&bad, _)) = raw.parts.iter().find(|(&t, _)| t >= nodes) {
            return Err(TdError::Schema(format!("parts/{bad}: node out of range for a tree on {nodes} nodes")));
        }
        if let Some(t) = (0..nodes).find(|t| !raw.parts.contains_key(t)) {
            return Err(TdError::Schema(format!("parts/{t}: missing part")));
        }
        TreeDecomposition::new(raw.tree, raw.parts.into_values().collect())
    }
}

impl From<TreeDecomposition> for TdJson {
    fn from(td: TreeDecomposition) -> Self {
        TdJson {
            tree: td.tree,
            parts: td.parts.into_iter().enumerate().collect(),
        }
    }
}

impl TreeDecomposition {
    pub fn new(tree: FiniteGraph, mut parts: Vec<Vec<usize>>) -> Result<Self, TdError> {
        if !tree.is_tree() {
            return Err(TdError::NotATree);
        }
        if parts.len() != tree.n() {
            return Err(TdError::PartCount {
                nodes: tree.n(),
                parts: parts.len(),
            });
        }
        for p in &mut parts {
            p.sort_unstable();
            p.dedup();
        }
        Ok(TreeDecomposition { tree, parts })
    }

    pub fn single(n: usize) -> Self {
        TreeDecomposition {
            tree: FiniteGraph::empty(1),
            parts: vec![(0..n).collect()],
        }
    }

    pub fn tree(&self) -> &FiniteGraph {
        &self.tree
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part(&self, t: usize) -> &[usize] {
        &self.parts[t]
    }

    pub fn node_count(&self) -> usize {
        self.tree.n()
    }

    pub fn adhesion(&self, t1: usize, t2: usize) -> Vec<usize> {
        intersect(&self.parts[t1], &self.parts[t2])
    }

    /// Adhesion sets per tree edge, edges in lexicographic order.
    pub fn adhesions(&self) -> Vec<((usize, usize), Vec<usize>)> {
        self.tree.edges().map(|(a, b)| ((a, b), self.adhesion(a, b))).collect()
    }

    /// Nodes on the two sides of the tree edge `(t1, t2)`.
    pub fn sides(&self, t1: usize, t2: usize) -> (Vec<usize>, Vec<usize>) {
        let mut cut = vec![false; self.tree.n()];
        cut[t2] = true;
        let comps = self.tree.components_avoiding(&cut);
        let a: Vec<usize> = comps.into_iter().find(|c| c.contains(&t1)).unwrap_or_default();
        let mut in_a = vec![false; self.tree.n()];
        for &t in &a {
            in_a[t] = true;
        }
        let b = (0..self.tree.n()).filter(|&t| !in_a[t]).collect();
        (a, b)
    }

    fn check_vertices(&self, n: usize) -> Result<(), TdError> {
        for (node, p) in self.parts.iter().enumerate() {
            if let Some(&vertex) = p.iter().find(|&&v| v >= n) {
                return Err(TdError::VertexOutOfRange { node, vertex, n });
            }
        }
        Ok(())
    }

    /// Nodes whose part contains `v`.
    pub fn nodes_containing(&self, v: usize) -> Vec<usize> {
        (0..self.parts.len()).filter(|&t| self.parts[t].binary_search(&v).is_ok()).collect()
    }
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

fn tree_path(tree: &FiniteGraph, from: usize, to: usize) -> Vec<usize> {
    let mut target = vec![false; tree.n()];
    target[to] = true;
    tree.path_avoiding(from, &target, &vec![false; tree.n()]).expect("trees are connected")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum TdViolation {
    /// (T1)
    MissingVertex { vertex: usize },
    /// (T2)
    UncoveredEdge { edge: (usize, usize) },
    /// (T3): `vertex` lies in parts `t1` and `t2` but not in `t3`, which
    /// is on the tree path between them.
    BrokenSubtree { vertex: usize, t1: usize, t2: usize, t3: usize },
    /// A path between the two sides of `edge` avoiding its adhesion set.
    NotSeparating { edge: (usize, usize), path: Vec<usize> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub violations: Vec<TdViolation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks (T1)-(T3) and that every adhesion set separates its two sides.
pub fn verify_td(g: &FiniteGraph, td: &TreeDecomposition) -> Result<AxiomReport, TdError> {
    td.check_vertices(g.n())?;
    let mut violations = Vec::new();
    let mut covered = vec![false; g.n()];
    for p in &td.parts {
        for &v in p {
            covered[v] = true;
        }
    }
    violations.extend((0..g.n()).filter(|&v| !covered[v]).map(|vertex| TdViolation::MissingVertex { vertex }));
    for (u, v) in g.edges() {
        if !td.parts.iter().any(|p| p.binary_search(&u).is_ok() && p.binary_search(&v).is_ok()) {
            violations.push(TdViolation::UncoveredEdge { edge: (u, v) });
        }
    }
    for v in 0..g.n() {
        let nodes = td.nodes_containing(v);
        if !td.tree.induces_connected(&nodes) {
            let mut outside = vec![true; td.tree.n()];
            for &t in &nodes {
                outside[t] = false;
            }
            let reach = td.tree.components_avoiding(&outside);
            let first = reach.iter().find(|c| c.contains(&nodes[0])).unwrap();
            let t2 = *nodes.iter().find(|t| !first.contains(t)).unwrap();
            let path = tree_path(&td.tree, nodes[0], t2);
            let t3 = *path.iter().find(|&&t| outside[t]).unwrap();
            violations.push(TdViolation::BrokenSubtree { vertex: v, t1: nodes[0], t2, t3 });
        }
    }
    for ((t1, t2), x) in td.adhesions() {
        let (a, b) = td.sides(t1, t2);
        let mut blocked = vec![false; g.n()];
        for &v in &x {
            blocked[v] = true;
        }
        let mut target = vec![false; g.n()];
        for &t in &b {
            for &v in &td.parts[t] {
                target[v] = !blocked[v];
            }
        }
        let starts: BTreeSet<usize> = a.iter().flat_map(|&t| td.parts[t].iter().copied()).filter(|&v| !blocked[v]).collect();
        // One multi-source search: walk from the A side until B is met.
        if let Some(path) = multi_source_path(g, &starts, &target, &blocked) {
            violations.push(TdViolation::NotSeparating { edge: (t1, t2), path });
        }
    }
    Ok(AxiomReport { violations })
}

fn multi_source_path(g: &FiniteGraph, starts: &BTreeSet<usize>, target: &[bool], blocked: &[bool]) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; g.n()];
    let mut seen = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::new();
    for &s in starts {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        if target[v] {
            let mut path = vec![v];
            let mut cur = v;
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in g.neighbors(v) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Union of all geodesic intervals between pairs of `x`.
fn geodesic_hull(g: &FiniteGraph, x: &[usize]) -> Vec<usize> {
    let dists: Vec<Vec<Option<usize>>> = x.iter().map(|&u| g.bfs_distances(u)).collect();
    let mut hull: BTreeSet<usize> = x.iter().copied().collect();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = dists[i][x[j]].expect("closure requires a connected graph");
            for w in 0..g.n() {
                if let (Some(a), Some(b)) = (dists[i][w], dists[j][w]) {
                    if a + b == d {
                        hull.insert(w);
                    }
                }
            }
        }
    }
    hull.into_iter().collect()
}

/// Adds to each part every geodesic between two vertices of an adhesion
/// set (of the input decomposition) that the part contains. Single pass.
pub fn geodesic_closure(g: &FiniteGraph, td: &TreeDecomposition) -> Result<TreeDecomposition, TdError> {
    td.check_vertices(g.n())?;
    if !g.is_connected() {
        return Err(TdError::Disconnected);
    }
    let adhesion_sets: BTreeSet<Vec<usize>> = td.adhesions().into_iter().map(|(_, x)| x).filter(|x| x.len() > 1).collect();
    let hulls: Vec<(Vec<usize>, Vec<usize>)> = adhesion_sets.into_iter().map(|x| {
        let h = geodesic_hull(g, &x);
        (x, h)
    }).collect();
    let parts = td
        .parts
        .iter()
        .map(|p| {
            let mut grown: BTreeSet<usize> = p.iter().copied().collect();
            for (x, h) in &hulls {
                if is_subset(x, p) {
                    grown.extend(h.iter().copied());
                }
            }
            grown.into_iter().collect()
        })
        .collect();
    let closed = TreeDecomposition {
        tree: td.tree.clone(),
        parts,
    };
    debug_assert!(td.parts.iter().zip(&closed.parts).all(|(a, b)| is_subset(a, b)));
    Ok(closed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectedPartsReport {
    /// All adhesion sets induce connected subgraphs.
    pub hypothesis_holds: bool,
    pub disconnected_adhesions: Vec<((usize, usize), Vec<usize>)>,
    pub disconnected_parts: Vec<usize>,
    /// False only if the hypothesis holds and a part is still disconnected.
    pub consistent: bool,
}

pub fn check_connected_parts(g: &FiniteGraph, td: &TreeDecomposition) -> ConnectedPartsReport {
    let disconnected_adhesions: Vec<_> = td.adhesions().into_iter().filter(|(_, x)| !g.induces_connected(x)).collect();
    let disconnected_parts: Vec<usize> = (0..td.node_count()).filter(|&t| !g.induces_connected(&td.parts[t])).collect();
    let hypothesis_holds = disconnected_adhesions.is_empty() && g.is_connected();
    ConnectedPartsReport {
        hypothesis_holds,
        consistent: !hypothesis_holds || disconnected_parts.is_empty(),
        disconnected_adhesions,
        disconnected_parts,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub td: TreeDecomposition,
    /// Old node to new node.
    pub node_map: Vec<usize>,
}

/// Collapses each component of the tree minus the kept edges into one node
/// whose part is the union of the collapsed parts. New nodes are numbered
/// by their smallest old node.
pub fn contract_edges(td: &TreeDecomposition, keep: impl Fn(usize, usize) -> bool) -> Contraction {
    let nodes = td.node_count();
    let mut uf = UnionFind::new(nodes);
    let kept: Vec<(usize, usize)> = td
        .tree
        .edges()
        .filter(|&(a, b)| {
            let k = keep(a, b);
            if !k {
                uf.union(a, b);
            }
            k
        })
        .collect();
    let classes = uf.classes();
    let mut node_map = vec![0; nodes];
    let mut parts = Vec::with_capacity(classes.len());
    for (i, class) in classes.iter().enumerate() {
        let mut part = BTreeSet::new();
        for &t in class {
            node_map[t] = i;
            part.extend(td.parts[t].iter().copied());
        }
        parts.push(part.into_iter().collect());
    }
    let tree = FiniteGraph::from_edges(classes.len(), kept.iter().map(|&(a, b)| (node_map[a], node_map[b])))
        .expect("contracting a tree along a forest keeps it simple");
    Contraction {
        td: TreeDecomposition { tree, parts },
        node_map,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdhesionDiameter {
    pub adhesion: Vec<usize>,
    pub diameter: usize,
    /// Diameter above 2.
    pub flagged: bool,
}

/// For each distinct adhesion set `X`, the diameter of the subtree of nodes
/// whose parts contain `X`.
pub fn adhesion_subtree_diameters(td: &TreeDecomposition) -> Vec<AdhesionDiameter> {
    let sets: BTreeSet<Vec<usize>> = td.adhesions().into_iter().map(|(_, x)| x).collect();
    sets.into_iter()
        .map(|x| {
            let nodes: Vec<usize> = (0..td.node_count()).filter(|&t| is_subset(&x, &td.parts[t])).collect();
            let sub = td.tree.induced_subgraph(&nodes);
            let far = |s: usize| {
                let d = sub.bfs_distances(s);
                (0..sub.n()).filter_map(|v| d[v].map(|dv| (dv, v))).max().unwrap()
            };
            let (_, end) = far(0);
            let (diameter, _) = far(end);
            AdhesionDiameter {
                adhesion: x,
                diameter,
                flagged: diameter > 2,
            }
        })
        .collect()
}

/// Node maps induced on the tree by a vertex action, matching part images
/// by set equality. `None` where the map is undefined on the part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAction {
    pub node_maps: Vec<Vec<Option<usize>>>,
    /// Parts equal to an earlier part; images resolve to the lowest node.
    pub ambiguous_parts: usize,
}

pub fn induced_tree_action(td: &TreeDecomposition, a: &LocalAction) -> Result<TreeAction, TdError> {
    let mut index: BTreeMap<&[usize], usize> = BTreeMap::new();
    let mut ambiguous_parts = 0;
    for (t, p) in td.parts.iter().enumerate() {
        if index.contains_key(p.as_slice()) {
            ambiguous_parts += 1;
        } else {
            index.insert(p, t);
        }
    }
    let mut node_maps = Vec::with_capacity(a.maps.len());
    for (mi, m) in a.maps.iter().enumerate() {
        let mut nm = vec![None; td.node_count()];
        for (t, p) in td.parts.iter().enumerate() {
            if let Some(img) = m.image_of_set(p) {
                match index.get(img.as_slice()) {
                    Some(&t2) => nm[t] = Some(t2),
                    None => {
                        return Err(TdError::PartsNotPermuted {
                            action: a.name.clone(),
                            map: mi,
                            node: t,
                        })
                    }
                }
            }
        }
        node_maps.push(nm);
    }
    Ok(TreeAction {
        node_maps,
        ambiguous_parts,
    })
}

/// Orbits of the induced action on tree edges, each a sorted list of edges.
pub fn tree_edge_orbits(td: &TreeDecomposition, ta: &TreeAction) -> Vec<Vec<(usize, usize)>> {
    edge_orbits_among(ta, td.tree.edges().collect())
}

fn edge_orbits_among(ta: &TreeAction, edges: Vec<(usize, usize)>) -> Vec<Vec<(usize, usize)>> {
    let index: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut uf = UnionFind::new(edges.len());
    for nm in &ta.node_maps {
        for (i, &(a, b)) in edges.iter().enumerate() {
            if let (Some(x), Some(y)) = (nm[a], nm[b]) {
                if let Some(&j) = index.get(&(x.min(y), x.max(y))) {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.classes().into_iter().map(|c| c.into_iter().map(|i| edges[i]).collect()).collect()
}

/// Tree edges neither of whose parts meets the patch boundary.
pub fn interior_edges(patch: &Patch, td: &TreeDecomposition) -> Vec<(usize, usize)> {
    let clean = |t: usize| td.parts[t].iter().all(|&v| !patch.is_boundary(v));
    td.tree.edges().filter(|&(a, b)| clean(a) && clean(b)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicReport {
    pub scale: usize,
    /// Always true for finite data; reported for completeness.
    pub adhesions_finite: bool,
    pub max_adhesion: usize,
    /// Orbits among the interior tree edges; parts touching the boundary
    /// are only partly visible to a local action.
    pub interior_edges: usize,
    pub edge_orbits: usize,
    pub one_edge_orbit: bool,
    /// Some adhesion set has boundary vertices at distance at least `scale`
    /// on both of its sides.
    pub distinguishes_ends: bool,
    pub witness_edge: Option<(usize, usize)>,
    pub ambiguous_parts: usize,
    pub basic: bool,
}

/// Whether removing `x` leaves boundary vertices at distance at least
/// `scale` from `x` on both sides of the tree edge `(t1, t2)`.
pub fn splits_boundary(patch: &Patch, td: &TreeDecomposition, t1: usize, t2: usize, scale: usize) -> bool {
    let x = td.adhesion(t1, t2);
    let dist = patch.graph.distances_from_set(&x);
    let (a, b) = td.sides(t1, t2);
    let deep = |side: &[usize]| {
        side.iter().any(|&t| {
            td.parts[t].iter().any(|&v| patch.is_boundary(v) && x.binary_search(&v).is_err() && matches!(dist[v], Some(d) if d >= scale))
        })
    };
    deep(&a) && deep(&b)
}

pub fn is_basic(patch: &Patch, td: &TreeDecomposition, a: &LocalAction, scale: usize) -> Result<BasicReport, TdError> {
    td.check_vertices(patch.graph.n())?;
    let ta = induced_tree_action(td, a)?;
    let interior = interior_edges(patch, td);
    let interior_count = interior.len();
    let orbits = edge_orbits_among(&ta, interior);
    let max_adhesion = td.adhesions().iter().map(|(_, x)| x.len()).max().unwrap_or(0);
    let witness_edge = td.tree.edges().find(|&(t1, t2)| splits_boundary(patch, td, t1, t2, scale));
    let one_edge_orbit = orbits.len() == 1;
    let distinguishes_ends = witness_edge.is_some();
    Ok(BasicReport {
        scale,
        adhesions_finite: true,
        max_adhesion,
        interior_edges: interior_count,
        edge_orbits: orbits.len(),
        one_edge_orbit,
        distinguishes_ends,
        witness_edge,
        ambiguous_parts: ta.ambiguous_parts,
        basic: one_edge_orbit && distinguishes_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_tree() -> FiniteGraph {
        FiniteGraph::path(2)
    }

    fn c6_td() -> TreeDecomposition {
        TreeDecomposition::new(edge_tree(), vec![vec![0, 1, 2, 3], vec![3, 4, 5, 0]]).unwrap()
    }

    #[test]
    fn hexagon_two_parts_valid() {
        let td = c6_td();
        assert!(verify_td(&FiniteGraph::cycle(6), &td).unwrap().is_valid());
        assert_eq!(td.adhesion(0, 1), vec![0, 3]);
    }

    #[test]
    fn path_split_misses_edge() {
        let td = TreeDecomposition::new(edge_tree(), vec![vec![0, 1], vec![2, 3, 4]]).unwrap();
        let report = verify_td(&FiniteGraph::path(5), &td).unwrap();
        assert!(report.violations.contains(&TdViolation::UncoveredEdge { edge: (1, 2) }));
    }

    #[test]
    fn single_part_is_valid() {
        let g = FiniteGraph::grid(3, 3);
        assert!(verify_td(&g, &TreeDecomposition::single(9)).unwrap().is_valid());
    }

    #[test]
    fn broken_subtree_has_witness() {
        let td = TreeDecomposition::new(FiniteGraph::path(3), vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let report = verify_td(&FiniteGraph::cycle(3), &td).unwrap();
        assert!(report.violations.contains(&TdViolation::BrokenSubtree { vertex: 0, t1: 0, t2: 2, t3: 1 }));
        assert!(report.violations.iter().any(|v| matches!(v, TdViolation::NotSeparating { .. })));
    }

    #[test]
    fn non_tree_is_rejected() {
        assert_eq!(TreeDecomposition::new(FiniteGraph::cycle(3), vec![vec![]; 3]), Err(TdError::NotATree));
    }

    #[test]
    fn hexagon_closure_fills_both_parts() {
        let g = FiniteGraph::cycle(6);
        let closed = geodesic_closure(&g, &c6_td()).unwrap();
        assert_eq!(closed.parts(), &[vec![0, 1, 2, 3, 4, 5], vec![0, 1, 2, 3, 4, 5]]);
        assert!(verify_td(&g, &closed).unwrap().is_valid());
        assert!(g.induces_connected(&closed.adhesion(0, 1)));
    }

    #[test]
    fn closure_fixes_thin_adhesions() {
        let g = FiniteGraph::path(5);
        let singletons = TreeDecomposition::new(FiniteGraph::path(4), vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        assert_eq!(geodesic_closure(&g, &singletons).unwrap(), singletons);
        let c4 = FiniteGraph::cycle(4);
        let adjacent = TreeDecomposition::new(edge_tree(), vec![vec![0, 1, 2], vec![2, 3, 0]]).unwrap();
        assert!(verify_td(&c4, &adjacent).unwrap().is_valid());
        let closed = geodesic_closure(&c4, &adjacent).unwrap();
        assert_eq!(closed.parts(), &[vec![0, 1, 2, 3], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn closure_rejects_disconnected_host() {
        let g = FiniteGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(geodesic_closure(&g, &TreeDecomposition::single(4)), Err(TdError::Disconnected));
    }

    #[test]
    fn connected_parts_before_and_after_closure() {
        let g = FiniteGraph::cycle(6);
        let before = check_connected_parts(&g, &c6_td());
        assert!(!before.hypothesis_holds);
        assert_eq!(before.disconnected_adhesions, vec![((0, 1), vec![0, 3])]);
        let after = check_connected_parts(&g, &geodesic_closure(&g, &c6_td()).unwrap());
        assert!(after.hypothesis_holds && after.disconnected_parts.is_empty());
        let single = check_connected_parts(&g, &TreeDecomposition::single(6));
        assert!(single.hypothesis_holds && single.consistent);
    }

    #[test]
    fn contraction_cases() {
        let td = c6_td();
        assert_eq!(contract_edges(&td, |_, _| true).td, td);
        let all = contract_edges(&td, |_, _| false).td;
        assert_eq!(all.parts(), &[vec![0, 1, 2, 3, 4, 5]]);
        let three = TreeDecomposition::new(FiniteGraph::path(3), vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let c = contract_edges(&three, |a, b| (a, b) == (0, 1));
        assert_eq!(c.td.parts(), &[vec![0, 1], vec![1, 2, 3]]);
        assert_eq!(c.node_map, vec![0, 1, 1]);
        assert_eq!(c.td.adhesion(0, 1), vec![1]);
    }

    #[test]
    fn adhesion_diameters() {
        let one = TreeDecomposition::new(edge_tree(), vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(adhesion_subtree_diameters(&one)[0].diameter, 1);
        let repeated = TreeDecomposition::new(FiniteGraph::path(3), vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let d = adhesion_subtree_diameters(&repeated);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].diameter, 2);
        assert!(!d[0].flagged);
    }

    #[test]
    fn single_part_not_basic() {
        let patch = Patch::finite(FiniteGraph::path(4), 0);
        let r = is_basic(&patch, &TreeDecomposition::single(4), &LocalAction { name: "id".into(), maps: vec![] }, 1).unwrap();
        assert!(!r.basic && !r.distinguishes_ends);
    }

    #[test]
    fn finite_graph_has_no_end_split() {
        let patch = Patch::finite(FiniteGraph::path(5), 0);
        let td = TreeDecomposition::new(FiniteGraph::path(4), vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        let r = is_basic(&patch, &td, &LocalAction { name: "id".into(), maps: vec![] }, 1).unwrap();
        assert!(!r.distinguishes_ends);
        assert_eq!(r.edge_orbits, 3);
    }

    #[test]
    fn json_round_trip() {
        let td = c6_td();
        let s = serde_json::to_string(&td).unwrap();
        assert!(s.contains("\"parts\":{\"0\":[0,1,2,3]"));
        let back: TreeDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, td);
        let missing = r#"{"tree":{"n":2,"edges":[[0,1]]},"parts":{"0":[0]}}"#;
        assert!(serde_json::from_str::<TreeDecomposition>(missing).unwrap_err().to_string().contains("parts/1"));
    }
}
