use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::spec::{validate_spec, AmalgamationSpec};
use super::tree::{build_tree_patch, LabelledTreePatch};
use super::AmalgamError;
use crate::graph::FiniteGraph;
use crate::iso::Patch;
use crate::treedecomp::TreeDecomposition;
use crate::unionfind::UnionFind;

/// A finite truncation of a tree amalgamation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AmalgamGraph {
    pub patch: Patch,
    pub tree: LabelledTreePatch,
    /// Per amalgam vertex, its identification class of `(node, local)` pairs.
    pub provenance: Vec<Vec<(usize, usize)>>,
    pub ident_lengths: Vec<usize>,
    pub induced_td: TreeDecomposition,
    /// Identification lengths above 2 occurred.
    pub long_identification: bool,
    pub collapsed_loops: usize,
    pub collapsed_parallels: usize,
    offsets: Vec<usize>,
    class_of: Vec<usize>,
}

/// Provenance export: `{ amalgamVertex: [[node, local], ...] }`.
pub type ProvenanceJson = BTreeMap<usize, Vec<(usize, usize)>>;

impl AmalgamGraph {
    pub fn graph(&self) -> &FiniteGraph {
        &self.patch.graph
    }

    /// Amalgam vertex of local vertex `x` in the copy at `node`.
    pub fn vertex(&self, node: usize, x: usize) -> usize {
        self.class_of[self.offsets[node] + x]
    }

    /// `id_t`: local vertices of the copy at `node` to amalgam vertices.
    pub fn copy_map(&self, node: usize) -> Vec<usize> {
        let len = self.offsets.get(node + 1).copied().unwrap_or(self.class_of.len()) - self.offsets[node];
        (0..len).map(|x| self.vertex(node, x)).collect()
    }

    pub fn provenance_json(&self) -> ProvenanceJson {
        self.provenance.iter().cloned().enumerate().collect()
    }

    /// Largest identification length.
    pub fn max_ident_length(&self) -> usize {
        self.ident_lengths.iter().copied().max().unwrap_or(0)
    }
}

/// Glues one copy of the appropriate factor to every node of a labelled
/// tree patch. Along an edge from `p` to `c` with labels `k = f(p→c)` and
/// `l = f(c→p)`, vertex `x` of the copy of `S_k` at `p` is identified with
/// `φ_{kl}(x)` at `c`.
pub fn build_amalgam(s: &AmalgamationSpec, radius: usize, seed: u64) -> Result<AmalgamGraph, AmalgamError> {
    let report = validate_spec(s);
    if !report.is_valid() {
        return Err(AmalgamError::InvalidSpec(report));
    }
    let tree = build_tree_patch(s, radius, seed);
    Ok(glue(s, tree))
}

fn glue(s: &AmalgamationSpec, tree: LabelledTreePatch) -> AmalgamGraph {
    let nodes = tree.node_count();
    let mut offsets = Vec::with_capacity(nodes);
    let mut total = 0;
    for t in 0..nodes {
        offsets.push(total);
        total += s.graph(tree.side[t]).n();
    }
    let mut bondings: BTreeMap<(usize, usize), BTreeMap<usize, usize>> = BTreeMap::new();
    let mut uf = UnionFind::new(total);
    for c in 1..nodes {
        let p = tree.parent[c].unwrap();
        let k = tree.label(p, c).unwrap();
        let l = tree.label(c, p).unwrap();
        let phi = bondings
            .entry((k, l))
            .or_insert_with(|| s.bonding(k, l).expect("validated spec bonds every legal pair"));
        for (&x, &y) in phi.iter() {
            uf.union(offsets[p] + x, offsets[c] + y);
        }
    }
    let classes = uf.classes();
    let mut class_of = vec![0; total];
    for (i, class) in classes.iter().enumerate() {
        for &e in class {
            class_of[e] = i;
        }
    }
    let node_of = |e: usize| offsets.partition_point(|&o| o <= e) - 1;
    let provenance: Vec<Vec<(usize, usize)>> = classes
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|&e| {
                    let t = node_of(e);
                    (t, e - offsets[t])
                })
                .collect()
        })
        .collect();

    // Edges shared by neighbouring copies are expected; a collapse is two
    // vertices or two edges of the same copy becoming one.
    let mut graph = FiniteGraph::empty(classes.len());
    let (mut collapsed_loops, mut collapsed_parallels) = (0, 0);
    for t in 0..nodes {
        let mut local = BTreeSet::new();
        for (x, y) in s.graph(tree.side[t]).edges() {
            let (a, b) = (class_of[offsets[t] + x], class_of[offsets[t] + y]);
            if a == b {
                collapsed_loops += 1;
            } else if !local.insert((a.min(b), a.max(b))) {
                collapsed_parallels += 1;
            } else {
                graph.add_edge(a, b);
            }
        }
    }

    let ident_lengths: Vec<usize> = provenance
        .iter()
        .map(|class| {
            let ns: BTreeSet<usize> = class.iter().map(|&(t, _)| t).collect();
            let ns: Vec<usize> = ns.into_iter().collect();
            let mut d = 0;
            for i in 0..ns.len() {
                for j in i + 1..ns.len() {
                    d = d.max(tree.distance(ns[i], ns[j]));
                }
            }
            d
        })
        .collect();

    let parts: Vec<Vec<usize>> = (0..nodes)
        .map(|t| (0..s.graph(tree.side[t]).n()).map(|x| class_of[offsets[t] + x]).collect())
        .collect();
    let induced_td = TreeDecomposition::new(tree.tree.clone(), parts).expect("the connecting tree is a tree");

    let mut boundary = BTreeSet::new();
    for t in 0..nodes {
        if !tree.is_leaf(t) {
            continue;
        }
        for &k in s.labels(tree.side[t]) {
            if tree.neighbor_by_label(t, k).is_none() {
                boundary.extend(s.adhesion(k).iter().map(|&x| class_of[offsets[t] + x]));
            }
        }
    }
    let root = class_of[0];
    let patch = Patch::new(graph, boundary.into_iter().collect(), root, tree.radius);
    AmalgamGraph {
        patch,
        long_identification: ident_lengths.iter().any(|&d| d > 2),
        tree,
        provenance,
        ident_lengths,
        induced_td,
        collapsed_loops,
        collapsed_parallels,
        offsets,
        class_of,
    }
}
