//! Finite patches of infinite graphs and root-respecting isomorphism of
//! their balls.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::FiniteGraph;

/// A finite piece of a possibly infinite graph. Vertices outside `boundary`
/// have their full neighbourhood present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Patch {
    pub graph: FiniteGraph,
    pub boundary: Vec<usize>,
    pub root: usize,
    /// Radius the producer was asked for.
    pub radius: usize,
    /// Balls around `root` of this radius contain no boundary vertex.
    pub inner_radius: usize,
}

impl Patch {
    /// Patch with `inner_radius` derived from the boundary distance.
    pub fn new(graph: FiniteGraph, mut boundary: Vec<usize>, root: usize, radius: usize) -> Self {
        boundary.sort_unstable();
        boundary.dedup();
        let dist = graph.bfs_distances(root);
        let inner_radius = boundary
            .iter()
            .filter_map(|&b| dist[b])
            .min()
            .map_or(graph.n(), |d| d.saturating_sub(1));
        Patch {
            graph,
            boundary,
            root,
            radius,
            inner_radius,
        }
    }

    /// A finite graph viewed as a complete patch.
    pub fn finite(graph: FiniteGraph, root: usize) -> Self {
        let n = graph.n();
        Patch::new(graph, Vec::new(), root, n)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.graph.n()];
        for &b in &self.boundary {
            mask[b] = true;
        }
        mask
    }

    /// Ball around the root of radius `depth`, relabelled with the root at
    /// position 0; the second component maps local positions back.
    pub fn root_ball(&self, depth: usize) -> (FiniteGraph, Vec<usize>) {
        let dist = self.graph.bfs_distances(self.root);
        let mut vs: Vec<usize> = (0..self.graph.n())
            .filter(|&v| matches!(dist[v], Some(d) if d <= depth))
            .collect();
        vs.sort_by_key(|&v| (dist[v], v));
        (self.graph.induced_subgraph(&vs), vs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum IsoOutcome {
    /// Pairs (vertex of A, vertex of B), sorted.
    Isomorphic { mapping: Vec<(usize, usize)> },
    NotIsomorphic { reason: String },
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic { .. })
    }
}

/// Joint colour refinement of two graphs, seeded with BFS layer and degree.
/// Colours are canonical, so equal colours are comparable across graphs.
fn refine(a: &FiniteGraph, b: &FiniteGraph) -> (Vec<usize>, Vec<usize>) {
    let layers = |g: &FiniteGraph| g.bfs_distances(0).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect::<Vec<_>>();
    let (la, lb) = (layers(a), layers(b));
    let mut ca: Vec<usize> = Vec::new();
    let mut cb: Vec<usize> = Vec::new();
    let mut palette: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (g, l) in [(a, &la), (b, &lb)] {
        for v in 0..g.n() {
            let len = palette.len();
            palette.entry((l[v], g.degree(v))).or_insert(len);
        }
    }
    // Renumber so colour ids follow the sorted key order.
    let order: BTreeMap<(usize, usize), usize> = palette.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    ca.extend((0..a.n()).map(|v| order[&(la[v], a.degree(v))]));
    cb.extend((0..b.n()).map(|v| order[&(lb[v], b.degree(v))]));
    let mut classes = order.len();
    loop {
        let signature = |g: &FiniteGraph, c: &[usize], v: usize| {
            let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| c[w]).collect();
            nb.sort_unstable();
            (c[v], nb)
        };
        let sa: Vec<_> = (0..a.n()).map(|v| signature(a, &ca, v)).collect();
        let sb: Vec<_> = (0..b.n()).map(|v| signature(b, &cb, v)).collect();
        let keys: BTreeMap<&(usize, Vec<usize>), usize> = {
            let mut set: Vec<&(usize, Vec<usize>)> = sa.iter().chain(sb.iter()).collect();
            set.sort();
            set.dedup();
            set.into_iter().enumerate().map(|(i, k)| (k, i)).collect()
        };
        let na: Vec<usize> = sa.iter().map(|s| keys[s]).collect();
        let nbv: Vec<usize> = sb.iter().map(|s| keys[s]).collect();
        let new_classes = keys.len();
        ca = na;
        cb = nbv;
        if new_classes == classes {
            return (ca, cb);
        }
        classes = new_classes;
    }
}

struct Search<'a> {
    a: &'a FiniteGraph,
    b: &'a FiniteGraph,
    ca: &'a [usize],
    cb: &'a [usize],
    fwd: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    /// Vertices of `a` are local ids in BFS order, so every non-root vertex
    /// has an earlier neighbour whose image pins the candidates.
    fn extend(&mut self, v: usize) -> bool {
        if v == self.a.n() {
            return true;
        }
        let anchor = self.a.neighbors(v).iter().copied().find(|&w| w < v);
        let candidates: Vec<usize> = match anchor {
            Some(w) => self.b.neighbors(self.fwd[w]).to_vec(),
            None => (0..self.b.n()).collect(),
        };
        for c in candidates {
            if self.used[c] || self.cb[c] != self.ca[v] {
                continue;
            }
            let consistent = self.a.neighbors(v).iter().all(|&w| w >= v || self.b.has_edge(self.fwd[w], c))
                && self.b.neighbors(c).iter().filter(|&&z| self.used[z]).count()
                    == self.a.neighbors(v).iter().filter(|&&w| w < v).count();
            if !consistent {
                continue;
            }
            self.fwd[v] = c;
            self.used[c] = true;
            if self.extend(v + 1) {
                return true;
            }
            self.used[c] = false;
        }
        false
    }
}

/// Root-respecting isomorphism between the radius-`depth` balls of two
/// patches. Exhaustive backtracking in BFS order, pruned by colour
/// refinement; the first mapping in that order is returned.
pub fn boundary_tolerant_isomorphic(
    pa: &Patch,
    pb: &Patch,
    depth: usize,
) -> Result<IsoOutcome, GraphError> {
    let inner_radius = pa.inner_radius.min(pb.inner_radius);
    if depth > inner_radius {
        return Err(GraphError::DepthTooLarge { depth, inner_radius });
    }
    let (a, va) = pa.root_ball(depth);
    let (b, vb) = pb.root_ball(depth);
    if a.n() != b.n() {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: format!("balls have {} and {} vertices", a.n(), b.n()),
        });
    }
    if a.edge_count() != b.edge_count() {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: format!("balls have {} and {} edges", a.edge_count(), b.edge_count()),
        });
    }
    let (ca, cb) = refine(&a, &b);
    if ca[0] != cb[0] {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: "roots differ after refinement (degree or layer profile)".into(),
        });
    }
    let hist = |c: &[usize]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    if hist(&ca) != hist(&cb) {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: "refined colour histograms differ".into(),
        });
    }
    let mut search = Search {
        a: &a,
        b: &b,
        ca: &ca,
        cb: &cb,
        fwd: vec![usize::MAX; a.n()],
        used: vec![false; b.n()],
    };
    search.fwd[0] = 0;
    search.used[0] = true;
    if !search.extend(1) {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: "exhaustive search found no root-respecting isomorphism".into(),
        });
    }
    let mut mapping: Vec<(usize, usize)> = (0..a.n()).map(|i| (va[i], vb[search.fwd[i]])).collect();
    mapping.sort_unstable();
    Ok(IsoOutcome::Isomorphic { mapping })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_patches_map_identically() {
        let p = Patch::finite(FiniteGraph::cycle(6), 0);
        let out = boundary_tolerant_isomorphic(&p, &p, 3).unwrap();
        let IsoOutcome::Isomorphic { mapping } = out else {
            panic!("expected isomorphism")
        };
        assert!(mapping.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn path_end_against_cycle_fails() {
        let p5 = Patch::finite(FiniteGraph::path(5), 0);
        let c6 = Patch::finite(FiniteGraph::cycle(6), 0);
        assert!(!boundary_tolerant_isomorphic(&p5, &c6, 2).unwrap().is_isomorphic());
        assert!(!boundary_tolerant_isomorphic(&c6, &p5, 2).unwrap().is_isomorphic());
    }

    #[test]
    fn shifted_root_on_long_path() {
        let g = FiniteGraph::path(9);
        let a = Patch::new(g.clone(), vec![0, 8], 4, 4);
        let b = Patch::new(FiniteGraph::path(11), vec![0, 10], 5, 5);
        assert_eq!(a.inner_radius, 3);
        let out = boundary_tolerant_isomorphic(&a, &b, 3).unwrap();
        assert!(out.is_isomorphic());
        assert!(matches!(
            boundary_tolerant_isomorphic(&a, &b, 4),
            Err(GraphError::DepthTooLarge { .. })
        ));
    }

    #[test]
    fn cycles_of_different_girth_differ() {
        let a = Patch::finite(FiniteGraph::cycle(7), 0);
        let b = Patch::finite(FiniteGraph::cycle(8), 0);
        assert!(boundary_tolerant_isomorphic(&a, &b, 2).unwrap().is_isomorphic());
        assert!(!boundary_tolerant_isomorphic(&a, &b, 3).unwrap().is_isomorphic());
    }
}
