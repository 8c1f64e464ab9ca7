//! Shipped example specs and a generator of random valid specs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::Action;
use crate::amalgam::{AmalgamationSpec, Bonding, SpecType};
use crate::graph::FiniteGraph;
use crate::treedecomp::TreeDecomposition;

fn named(g: FiniteGraph, names: &[&str]) -> FiniteGraph {
    g.with_labels(names.iter().enumerate().map(|(i, n)| (i, n.to_string())).collect())
}

fn k2() -> FiniteGraph {
    named(FiniteGraph::complete(2), &["a", "b"])
}

fn single(k: usize, l: usize, x: usize, y: usize) -> Bonding {
    Bonding { k, l, map: vec![(x, y)] }
}

/// Double ray: `K2 ∗ K2` with singleton adhesion sets `{a}, {b}` on both
/// sides and the swap acting on each factor.
pub fn spec_double_ray() -> AmalgamationSpec {
    AmalgamationSpec {
        kind: SpecType::One,
        g1: k2(),
        g2: Some(k2()),
        i1: vec![1, 2],
        i2: vec![3, 4],
        j: vec![],
        adhesions: BTreeMap::from([(1, vec![0]), (2, vec![1]), (3, vec![0]), (4, vec![1])]),
        bondings: vec![single(1, 3, 0, 0), single(1, 4, 0, 1), single(2, 3, 1, 0), single(2, 4, 1, 1)],
        actions: vec![Action::new("swap", vec![vec![1, 0]]), Action::new("swap", vec![vec![1, 0]])],
    }
}

/// Triangle cactus: `C3 ∗ C3` glued at single vertices, all nine bondings,
/// rotations acting on both factors.
pub fn spec_triangles() -> AmalgamationSpec {
    let c3 = || named(FiniteGraph::cycle(3), &["p", "q", "r"]);
    let mut bondings = Vec::new();
    for k in 1..=3 {
        for l in 4..=6 {
            bondings.push(single(k, l, k - 1, l - 4));
        }
    }
    AmalgamationSpec {
        kind: SpecType::One,
        g1: c3(),
        g2: Some(c3()),
        i1: vec![1, 2, 3],
        i2: vec![4, 5, 6],
        j: vec![],
        adhesions: (1..=6).map(|k| (k, vec![(k - 1) % 3])).collect(),
        bondings,
        actions: vec![
            Action::new("rotation", vec![vec![1, 2, 0]]),
            Action::new("rotation", vec![vec![1, 2, 0]]),
        ],
    }
}

/// `K2` amalgamated with itself along `a ↦ b`: the double ray as a Type 2
/// amalgamation with trivial group.
pub fn spec_hnn() -> AmalgamationSpec {
    AmalgamationSpec {
        kind: SpecType::Two,
        g1: k2(),
        g2: None,
        i1: vec![1, 2],
        i2: vec![],
        j: vec![1],
        adhesions: BTreeMap::from([(1, vec![0]), (2, vec![1])]),
        bondings: vec![single(1, 2, 0, 1)],
        actions: vec![Action::trivial("trivial")],
    }
}

/// Star `K_{1,4}` amalgamated with itself along edges `{c, l_k}`; the
/// result is the 4-regular tree.
pub fn spec_four_regular_tree() -> AmalgamationSpec {
    let star = named(
        FiniteGraph::from_edges(5, (1..5).map(|i| (0, i))).unwrap(),
        &["c", "l1", "l2", "l3", "l4"],
    );
    let mut bondings = Vec::new();
    for k in 1..=2 {
        for l in 3..=4 {
            bondings.push(Bonding { k, l, map: vec![(0, l), (k, 0)] });
        }
    }
    AmalgamationSpec {
        kind: SpecType::Two,
        g1: star,
        g2: None,
        i1: vec![1, 2, 3, 4],
        i2: vec![],
        j: vec![1, 2],
        adhesions: (1..=4).map(|k| (k, vec![0, k])).collect(),
        bondings,
        actions: vec![Action::new("leaf swaps", vec![vec![0, 2, 1, 3, 4], vec![0, 1, 2, 4, 3]])],
    }
}

/// Square cactus: `C4 ∗ C4` glued at opposite vertices, reflections acting.
pub fn spec_square_cactus() -> AmalgamationSpec {
    let c4 = || FiniteGraph::cycle(4);
    let mut bondings = Vec::new();
    for (k, x) in [(1, 0), (2, 2)] {
        for (l, y) in [(3, 0), (4, 2)] {
            bondings.push(single(k, l, x, y));
        }
    }
    let reflections = || Action::new("reflections", vec![vec![2, 1, 0, 3], vec![0, 3, 2, 1]]);
    AmalgamationSpec {
        kind: SpecType::One,
        g1: c4(),
        g2: Some(c4()),
        i1: vec![1, 2],
        i2: vec![3, 4],
        j: vec![],
        adhesions: BTreeMap::from([(1, vec![0]), (2, vec![2]), (3, vec![0]), (4, vec![2])]),
        bondings,
        actions: vec![reflections(), reflections()],
    }
}

/// `K1 ∗ K2` with both indices of the first factor on its only vertex.
/// Stars centred at the first factor have two legs with the same adhesion.
pub fn spec_double_ray_star() -> AmalgamationSpec {
    AmalgamationSpec {
        kind: SpecType::One,
        g1: named(FiniteGraph::empty(1), &["x"]),
        g2: Some(k2()),
        i1: vec![1, 2],
        i2: vec![3, 4],
        j: vec![],
        adhesions: BTreeMap::from([(1, vec![0]), (2, vec![0]), (3, vec![0]), (4, vec![1])]),
        bondings: vec![single(1, 3, 0, 0), single(1, 4, 0, 1), single(2, 3, 0, 0), single(2, 4, 0, 1)],
        actions: vec![Action::trivial("trivial"), Action::new("swap", vec![vec![1, 0]])],
    }
}

/// The shipped specs by file stem.
pub fn all_specs() -> Vec<(&'static str, AmalgamationSpec)> {
    vec![
        ("spec_dr", spec_double_ray()),
        ("spec_tri", spec_triangles()),
        ("spec_hnn", spec_hnn()),
        ("spec_t4", spec_four_regular_tree()),
        ("spec_c4", spec_square_cactus()),
    ]
}

/// Random connected graph on `n` vertices: a random spanning tree plus
/// extra edges with probability `p`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> FiniteGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = FiniteGraph::empty(n);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.add_edge(order[i], order[j]);
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random valid Type 1 spec with factors on at most `max_n` vertices and
/// at most `max_index` indices per side. Actions are trivial.
pub fn random_spec<R: Rng>(rng: &mut R, max_n: usize, max_index: usize) -> AmalgamationSpec {
    let n1 = rng.gen_range(1..=max_n);
    let n2 = rng.gen_range(1..=max_n);
    let size = rng.gen_range(1..=n1.min(n2).min(2));
    let g1 = random_connected_graph(rng, n1, 0.3);
    let g2 = random_connected_graph(rng, n2, 0.3);
    let c1 = rng.gen_range(1..=max_index);
    let c2 = rng.gen_range(1..=max_index);
    let i1: Vec<usize> = (1..=c1).collect();
    let i2: Vec<usize> = (c1 + 1..=c1 + c2).collect();
    let mut adhesions = BTreeMap::new();
    let sized: Vec<(usize, usize)> = i1.iter().map(|&k| (k, n1)).chain(i2.iter().map(|&k| (k, n2))).collect();
    for (k, n) in sized {
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        vs.sort_unstable();
        adhesions.insert(k, vs);
    }
    let mut bondings = Vec::new();
    for &k in &i1 {
        for &l in &i2 {
            let mut img = adhesions[&l].clone();
            img.shuffle(rng);
            bondings.push(Bonding {
                k,
                l,
                map: adhesions[&k].iter().copied().zip(img).collect(),
            });
        }
    }
    AmalgamationSpec {
        kind: SpecType::One,
        g1,
        g2: Some(g2),
        i1,
        i2,
        j: vec![],
        adhesions,
        bondings,
        actions: vec![],
    }
}

/// Random valid tree-decomposition of `g` over a random tree on `nodes`
/// nodes: every vertex gets a home node, and each edge `uv` adds `u` to
/// the parts on the tree path from `u`'s home to `v`'s.
pub fn random_td<R: Rng>(rng: &mut R, g: &FiniteGraph, nodes: usize) -> TreeDecomposition {
    let nodes = nodes.max(1);
    let tree = random_connected_graph(rng, nodes, 0.0);
    let home: Vec<usize> = (0..g.n()).map(|_| rng.gen_range(0..nodes)).collect();
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (v, &h) in home.iter().enumerate() {
        parts[h].push(v);
    }
    for (u, v) in g.edges() {
        let from = tree.bfs_distances(home[v]);
        let mut cur = home[u];
        while cur != home[v] {
            let d = from[cur].unwrap();
            cur = *tree.neighbors(cur).iter().find(|&&w| from[w] == Some(d - 1)).unwrap();
            parts[cur].push(u);
        }
    }
    TreeDecomposition::new(tree, parts).expect("random_connected_graph with p = 0 is a tree")
}
