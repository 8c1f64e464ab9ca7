use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::AmalgamationSpec;
use crate::graph::FiniteGraph;

/// A directed tree edge with its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedLabel {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

/// Ball of radius `radius` around node 0 in the semiregular connecting
/// tree, with every directed edge labelled. Node IDs follow BFS order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledTreePatch {
    pub tree: FiniteGraph,
    pub side: Vec<u8>,
    pub depth: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub radius: usize,
    /// Outgoing edges per node as `(label, neighbour)`, sorted by label.
    pub out: Vec<Vec<(usize, usize)>>,
}

impl LabelledTreePatch {
    pub fn node_count(&self) -> usize {
        self.side.len()
    }

    pub fn is_leaf(&self, t: usize) -> bool {
        self.depth[t] == self.radius
    }

    pub fn label(&self, from: usize, to: usize) -> Option<usize> {
        self.out[from].iter().find(|&&(_, w)| w == to).map(|&(k, _)| k)
    }

    pub fn neighbor_by_label(&self, t: usize, k: usize) -> Option<usize> {
        self.out[t].iter().find(|&&(l, _)| l == k).map(|&(_, w)| w)
    }

    /// The star at `t`: outgoing label to the label of the reverse edge.
    pub fn star(&self, t: usize) -> BTreeMap<usize, usize> {
        self.out[t]
            .iter()
            .map(|&(k, w)| (k, self.label(w, t).expect("edges are labelled both ways")))
            .collect()
    }

    pub fn labels(&self) -> Vec<DirectedLabel> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(from, es)| es.iter().map(move |&(label, to)| DirectedLabel { from, to, label }))
            .collect()
    }

    /// Tree distance between two nodes via parent pointers.
    pub fn distance(&self, mut a: usize, mut b: usize) -> usize {
        let mut d = 0;
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
            d += 1;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
            d += 1;
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
            d += 2;
        }
        d
    }
}

/// Builds the labelled ball of radius `radius`. The root is on side 1.
/// Each node's outgoing labels are a seeded shuffle of its index set, and
/// the label of each reverse edge is drawn uniformly among the legal ones.
pub fn build_tree_patch(s: &AmalgamationSpec, radius: usize, seed: u64) -> LabelledTreePatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LabelledTreePatch {
        tree: FiniteGraph::empty(1),
        side: vec![1],
        depth: vec![0],
        parent: vec![None],
        radius,
        out: vec![Vec::new()],
    };
    let mut edges = Vec::new();
    let mut next = 0;
    while next < p.node_count() {
        let t = next;
        next += 1;
        if p.depth[t] == radius {
            continue;
        }
        let to_parent = p.parent[t].map(|q| p.label(t, q).unwrap());
        let mut labels: Vec<usize> = s.labels(p.side[t]).iter().copied().filter(|&k| Some(k) != to_parent).collect();
        labels.shuffle(&mut rng);
        for k in labels {
            let partners = s.partners(k);
            let back = partners[rng.gen_range(0..partners.len())];
            let c = p.node_count();
            p.side.push(s.other_side(p.side[t]));
            p.depth.push(p.depth[t] + 1);
            p.parent.push(Some(t));
            p.out.push(vec![(back, t)]);
            p.out[t].push((k, c));
            edges.push((t, c));
        }
    }
    for es in &mut p.out {
        es.sort_unstable();
    }
    p.tree = FiniteGraph::from_edges(p.node_count(), edges).expect("tree edges are simple");
    p
}
