//! Shortest-path data and geodesic enumeration.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::FiniteGraph;

/// BFS layering from a source together with every geodesic predecessor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicDag {
    pub source: usize,
    /// `None` is an infinite distance.
    pub dist: Vec<Option<usize>>,
    pub predecessors: Vec<Vec<usize>>,
}

impl GeodesicDag {
    pub fn distance(&self, v: usize) -> Option<usize> {
        self.dist[v]
    }
}

pub fn shortest_path_data(g: &FiniteGraph, source: usize) -> Result<GeodesicDag, GraphError> {
    if source >= g.n() {
        return Err(GraphError::VertexOutOfRange {
            vertex: source,
            n: g.n(),
        });
    }
    let mut dist = vec![None; g.n()];
    let mut predecessors = vec![Vec::new(); g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in g.neighbors(v) {
            match dist[w] {
                None => {
                    dist[w] = Some(d + 1);
                    predecessors[w].push(v);
                    queue.push_back(w);
                }
                Some(dw) if dw == d + 1 => predecessors[w].push(v),
                _ => {}
            }
        }
    }
    for preds in &mut predecessors {
        preds.sort_unstable();
    }
    Ok(GeodesicDag {
        source,
        dist,
        predecessors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicList {
    pub paths: Vec<Vec<usize>>,
    /// Set when enumeration stopped at the cap.
    pub truncated: bool,
}

/// All geodesics from `u` to `v` in lexicographic order, at most `cap` of
/// them.
///
/// Walks the geodesic DAG rooted at `v` starting from `u`: every step
/// moves to a predecessor of the current vertex, i.e. one step closer to `v`.
pub fn all_geodesics(
    g: &FiniteGraph,
    u: usize,
    v: usize,
    cap: usize,
) -> Result<GeodesicList, GraphError> {
    if u >= g.n() {
        return Err(GraphError::VertexOutOfRange { vertex: u, n: g.n() });
    }
    let dag = shortest_path_data(g, v)?;
    if dag.dist[u].is_none() {
        return Err(GraphError::NoPath(u, v));
    }
    let mut out = GeodesicList {
        paths: Vec::new(),
        truncated: false,
    };
    let mut current = vec![u];
    extend_geodesics(&dag, &mut current, cap, &mut out);
    Ok(out)
}

fn extend_geodesics(dag: &GeodesicDag, current: &mut Vec<usize>, cap: usize, out: &mut GeodesicList) {
    if out.truncated {
        return;
    }
    let last = *current.last().unwrap();
    if last == dag.source {
        if out.paths.len() == cap {
            out.truncated = true;
        } else {
            out.paths.push(current.clone());
        }
        return;
    }
    for &p in &dag.predecessors[last] {
        current.push(p);
        extend_geodesics(dag, current, cap, out);
        current.pop();
        if out.truncated {
            return;
        }
    }
}

/// Dense all-pairs distances (`usize::MAX` for unreachable pairs).
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    data: Vec<usize>,
}

impl DistanceTable {
    pub fn new(g: &FiniteGraph) -> Self {
        let n = g.n();
        let mut data = vec![usize::MAX; n * n];
        for s in 0..n {
            for (v, d) in g.bfs_distances(s).into_iter().enumerate() {
                if let Some(d) = d {
                    data[s * n + v] = d;
                }
            }
        }
        DistanceTable { n, data }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> usize {
        self.data[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertices lying on some `u`-`v` geodesic (the geodesic interval),
    /// sorted by distance from `u`, ties by ID.
    pub fn interval(&self, u: usize, v: usize) -> Vec<usize> {
        let d = self.get(u, v);
        if d == usize::MAX {
            return Vec::new();
        }
        let mut out: Vec<usize> = (0..self.n)
            .filter(|&w| {
                let a = self.get(u, w);
                let b = self.get(w, v);
                a != usize::MAX && b != usize::MAX && a + b == d
            })
            .collect();
        out.sort_by_key(|&w| (self.get(u, w), w));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distances() {
        let dag = shortest_path_data(&FiniteGraph::path(5), 0).unwrap();
        assert_eq!(dag.dist[4], Some(4));
        assert_eq!(dag.predecessors[4], vec![3]);
    }

    #[test]
    fn cycle_antipode_has_two_predecessors() {
        let dag = shortest_path_data(&FiniteGraph::cycle(6), 0).unwrap();
        assert_eq!(dag.dist[3], Some(3));
        assert_eq!(dag.predecessors[3], vec![2, 4]);
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = FiniteGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let dag = shortest_path_data(&g, 0).unwrap();
        assert_eq!(dag.dist[2], None);
        assert_eq!(dag.dist[3], None);
        assert!(matches!(all_geodesics(&g, 0, 3, 10), Err(GraphError::NoPath(0, 3))));
    }

    #[test]
    fn out_of_range_source() {
        assert!(shortest_path_data(&FiniteGraph::path(3), 3).is_err());
    }

    #[test]
    fn cycle_geodesics_in_order() {
        let list = all_geodesics(&FiniteGraph::cycle(6), 0, 3, 10).unwrap();
        assert_eq!(list.paths, vec![vec![0, 1, 2, 3], vec![0, 5, 4, 3]]);
        assert!(!list.truncated);
    }

    #[test]
    fn path_geodesic_unique_and_degenerate_pair() {
        let list = all_geodesics(&FiniteGraph::path(5), 0, 4, 10).unwrap();
        assert_eq!(list.paths, vec![vec![0, 1, 2, 3, 4]]);
        let list = all_geodesics(&FiniteGraph::cycle(6), 0, 0, 10).unwrap();
        assert_eq!(list.paths, vec![vec![0]]);
    }

    #[test]
    fn cap_flags_truncation() {
        let list = all_geodesics(&FiniteGraph::cycle(6), 0, 3, 1).unwrap();
        assert_eq!(list.paths.len(), 1);
        assert!(list.truncated);
    }

    #[test]
    fn interval_of_square() {
        let t = DistanceTable::new(&FiniteGraph::cycle(4));
        assert_eq!(t.interval(0, 2), vec![0, 1, 3, 2]);
        assert_eq!(t.interval(0, 1), vec![0, 1]);
    }
}
