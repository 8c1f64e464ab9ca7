//! Simple undirected graphs on dense vertex IDs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Simple undirected graph with vertices `0..n`.
///
/// Neighbour lists are kept sorted; that makes equality and hashing
/// canonical. A value built through [`FiniteGraph::from_adjacency_unchecked`]
/// may violate the invariants and is meant to be fed to [`validate_graph`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct FiniteGraph {
    adj: Vec<Vec<usize>>,
    labels: BTreeMap<usize, String>,
}

impl FiniteGraph {
    pub fn empty(n: usize) -> Self {
        FiniteGraph {
            adj: vec![Vec::new(); n],
            labels: BTreeMap::new(),
        }
    }

    /// Builds a graph from an edge list. Self-loops and out-of-range
    /// endpoints are rejected, repeated edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = FiniteGraph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Wraps raw adjacency lists without normalising them.
    pub fn from_adjacency_unchecked(adj: Vec<Vec<usize>>) -> Self {
        FiniteGraph {
            adj,
            labels: BTreeMap::new(),
        }
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph edges are valid")
    }

    /// `w x h` grid, vertex `(x, y)` has ID `y * w + x`.
    pub fn grid(w: usize, h: usize) -> Self {
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w {
                    edges.push((v, v + 1));
                }
                if y + 1 < h {
                    edges.push((v, v + w));
                }
            }
        }
        Self::from_edges(w * h, edges).expect("grid edges are valid")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Inserts `uv`; returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v);
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Subgraph induced by `vertices` (in the given order); local vertex
    /// `i` corresponds to `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> FiniteGraph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut g = FiniteGraph::empty(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = local[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Connected components of the graph minus the `removed` vertices,
    /// each sorted, ordered by smallest vertex.
    pub fn components_avoiding(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = removed.to_vec();
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_avoiding(&vec![false; self.n()])
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components().len() == 1
    }

    /// Whether the vertex set `vs` induces a connected subgraph (the empty
    /// set counts as connected).
    pub fn induces_connected(&self, vs: &[usize]) -> bool {
        if vs.is_empty() {
            return true;
        }
        let mut inside = vec![false; self.n()];
        for &v in vs {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n()];
        seen[vs[0]] = true;
        let mut stack = vec![vs[0]];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == vs.len()
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.edge_count() + 1 == self.n() && self.is_connected()
    }

    /// BFS distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source BFS distances from a vertex set.
    pub fn distances_from_set(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices at distance at most `radius` from `center`, sorted.
    pub fn ball(&self, center: usize, radius: usize) -> Vec<usize> {
        self.bfs_distances(center)
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= radius))
            .map(|(v, _)| v)
            .collect()
    }

    /// Shortest path from `from` to any vertex in `targets`, avoiding
    /// `blocked`. Used to produce witnesses.
    pub fn path_avoiding(
        &self,
        from: usize,
        targets: &[bool],
        blocked: &[bool],
    ) -> Option<Vec<usize>> {
        if blocked[from] {
            return None;
        }
        let mut prev = vec![usize::MAX; self.n()];
        let mut seen = vec![false; self.n()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if targets[v] {
                let mut path = vec![v];
                let mut cur = v;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[v] {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// One broken representation invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SelfLoop { vertex: usize },
    AsymmetricEdge { from: usize, to: usize },
    NeighborOutOfRange { vertex: usize, neighbor: usize },
    DuplicateNeighbor { vertex: usize, neighbor: usize },
    UnsortedNeighbors { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { vertex } => write!(f, "self-loop at {vertex}"),
            Violation::AsymmetricEdge { from, to } => write!(f, "asymmetric edge ({from},{to})"),
            Violation::NeighborOutOfRange { vertex, neighbor } => {
                write!(f, "neighbor {neighbor} of {vertex} out of range")
            }
            Violation::DuplicateNeighbor { vertex, neighbor } => {
                write!(f, "parallel edge ({vertex},{neighbor})")
            }
            Violation::UnsortedNeighbors { vertex } => {
                write!(f, "neighbor list of {vertex} not sorted")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every symmetry, loop, duplicate and ordering violation.
pub fn validate_graph(g: &FiniteGraph) -> ValidationReport {
    let n = g.n();
    let mut violations = Vec::new();
    for v in 0..n {
        let ns = &g.adj[v];
        if ns.windows(2).any(|w| w[0] > w[1]) {
            violations.push(Violation::UnsortedNeighbors { vertex: v });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &w in ns {
            if w >= n {
                violations.push(Violation::NeighborOutOfRange {
                    vertex: v,
                    neighbor: w,
                });
                continue;
            }
            if !seen.insert(w) {
                violations.push(Violation::DuplicateNeighbor {
                    vertex: v,
                    neighbor: w,
                });
            }
            if w == v {
                violations.push(Violation::SelfLoop { vertex: v });
            } else if !g.adj[w].contains(&v) {
                violations.push(Violation::AsymmetricEdge { from: v, to: w });
            }
        }
    }
    ValidationReport { violations }
}

/// JSON form: `{ "n": int, "edges": [[u,v],...], "labels": {optional} }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl TryFrom<GraphJson> for FiniteGraph {
    type Error = GraphError;

    fn try_from(raw: GraphJson) -> Result<Self, Self::Error> {
        let mut g = FiniteGraph::empty(raw.n);
        for (i, [u, v]) in raw.edges.iter().copied().enumerate() {
            if u >= raw.n || v >= raw.n {
                return Err(GraphError::Schema(format!(
                    "edges/{i}: endpoint out of range for n = {}",
                    raw.n
                )));
            }
            if u == v {
                return Err(GraphError::Schema(format!("edges/{i}: self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        for (key, label) in raw.labels {
            let v: usize = key
                .parse()
                .map_err(|_| GraphError::Schema(format!("labels/{key}: key is not a vertex id")))?;
            if v >= raw.n {
                return Err(GraphError::Schema(format!("labels/{key}: vertex out of range")));
            }
            g.labels.insert(v, label);
        }
        Ok(g)
    }
}

impl From<FiniteGraph> for GraphJson {
    fn from(g: FiniteGraph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            labels: g
                .labels
                .iter()
                .map(|(v, l)| (v.to_string(), l.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_is_valid() {
        assert!(validate_graph(&FiniteGraph::path(5)).is_valid());
    }

    #[test]
    fn one_sided_edge_is_reported() {
        let g = FiniteGraph::from_adjacency_unchecked(vec![vec![1], vec![]]);
        let report = validate_graph(&g);
        assert_eq!(
            report.violations,
            vec![Violation::AsymmetricEdge { from: 0, to: 1 }]
        );
        assert_eq!(report.violations[0].to_string(), "asymmetric edge (0,1)");
    }

    #[test]
    fn loop_on_cycle_is_reported() {
        let mut adj: Vec<Vec<usize>> = (0..4)
            .map(|i| {
                let mut ns = vec![(i + 1) % 4, (i + 3) % 4];
                ns.sort_unstable();
                ns
            })
            .collect();
        adj[2] = vec![1, 2, 3];
        let report = validate_graph(&FiniteGraph::from_adjacency_unchecked(adj));
        assert_eq!(report.violations, vec![Violation::SelfLoop { vertex: 2 }]);
        assert_eq!(report.violations[0].to_string(), "self-loop at 2");
    }

    #[test]
    fn json_round_trip_keeps_labels() {
        let mut labels = BTreeMap::new();
        labels.insert(1, "b".to_string());
        let g = FiniteGraph::cycle(4).with_labels(labels);
        let text = serde_json::to_string(&g).unwrap();
        let back: FiniteGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn json_rejects_out_of_range_edge() {
        let err = serde_json::from_str::<FiniteGraph>(r#"{"n":2,"edges":[[0,2]]}"#).unwrap_err();
        assert!(err.to_string().contains("edges/0"));
    }

    #[test]
    fn grid_shape() {
        let g = FiniteGraph::grid(5, 5);
        assert_eq!(g.n(), 25);
        assert_eq!(g.edge_count(), 40);
        assert_eq!(g.degree(12), 4);
    }
}
