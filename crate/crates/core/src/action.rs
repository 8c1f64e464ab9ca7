//! Group actions by graph automorphisms.
//!
//! Finite factor graphs carry [`Action`]s given by permutation generators.
//! Truncated patches of infinite graphs cannot carry genuine automorphisms,
//! so they carry [`LocalAction`]s: partial maps that are isomorphisms
//! between induced subgraphs wherever they are defined.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::FiniteGraph;
use crate::unionfind::UnionFind;

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `a ∘ b`: apply `b` first.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

fn check_bijection(p: &[usize], n: usize) -> Result<(), GraphError> {
    if p.len() != n {
        return Err(GraphError::WrongDomain {
            got: p.len(),
            expected: n,
        });
    }
    let mut hit = vec![false; n];
    for &y in p {
        if y >= n {
            return Err(GraphError::VertexOutOfRange { vertex: y, n });
        }
        if std::mem::replace(&mut hit[y], true) {
            return Err(GraphError::NotBijective(y));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub name: String,
    pub generators: Vec<Perm>,
}

impl Action {
    pub fn trivial(name: impl Into<String>) -> Self {
        Action {
            name: name.into(),
            generators: Vec::new(),
        }
    }

    pub fn new(name: impl Into<String>, generators: Vec<Perm>) -> Self {
        Action {
            name: name.into(),
            generators,
        }
    }

    /// Checks every generator; the first failure is returned with its witness.
    pub fn validate(&self, g: &FiniteGraph) -> Result<(), GraphError> {
        for (index, p) in self.generators.iter().enumerate() {
            if let AutomorphismCheck::Fail(w) = check_automorphism(g, p)? {
                return Err(GraphError::NotAutomorphism {
                    action: self.name.clone(),
                    index,
                    witness: w.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    EdgeToNonEdge,
    NonEdgeToEdge,
}

/// A vertex pair whose adjacency is not preserved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismWitness {
    pub pair: (usize, usize),
    pub image: (usize, usize),
    pub kind: WitnessKind,
}

impl std::fmt::Display for AutomorphismWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (what, image_what) = match self.kind {
            WitnessKind::EdgeToNonEdge => ("edge", "non-edge"),
            WitnessKind::NonEdgeToEdge => ("non-edge", "edge"),
        };
        write!(
            f,
            "{what} ({},{}) maps to {image_what} ({},{})",
            self.pair.0, self.pair.1, self.image.0, self.image.1
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AutomorphismCheck {
    Pass,
    Fail(AutomorphismWitness),
}

/// Edges must go to edges; since `perm` is a bijection on a finite vertex
/// set, that already forces non-edges onto non-edges.
pub fn check_automorphism(g: &FiniteGraph, perm: &[usize]) -> Result<AutomorphismCheck, GraphError> {
    check_bijection(perm, g.n())?;
    for (u, v) in g.edges() {
        let image = (perm[u], perm[v]);
        if !g.has_edge(image.0, image.1) {
            return Ok(AutomorphismCheck::Fail(AutomorphismWitness {
                pair: (u, v),
                image,
                kind: WitnessKind::EdgeToNonEdge,
            }));
        }
    }
    Ok(AutomorphismCheck::Pass)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub orbits: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, v: usize) -> &[usize] {
        self.orbits.iter().find(|o| o.contains(&v)).expect("every vertex lies in an orbit")
    }
}

/// Orbits as components of the Schreier graph of the generators.
pub fn orbits(g: &FiniteGraph, a: &Action) -> Result<OrbitPartition, GraphError> {
    a.validate(g)?;
    let mut uf = UnionFind::new(g.n());
    for p in &a.generators {
        for (x, &y) in p.iter().enumerate() {
            uf.union(x, y);
        }
    }
    Ok(OrbitPartition {
        orbits: uf.classes(),
    })
}

/// Elements of the group generated by `generators`, identity first, in
/// BFS order over words. `complete` is false when `cap` stopped the closure.
#[derive(Clone, Debug)]
pub struct GroupElements {
    pub elements: Vec<Perm>,
    pub complete: bool,
}

impl GroupElements {
    pub fn contains(&self, p: &[usize]) -> bool {
        self.elements.iter().any(|e| e == p)
    }
}

pub fn enumerate_group(n: usize, generators: &[Perm], cap: usize) -> GroupElements {
    let id = identity(n);
    let mut index: HashMap<Perm, usize> = HashMap::new();
    let mut elements = vec![id.clone()];
    index.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for gen in generators {
            let next = compose(gen, &elements[i]);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() >= cap {
                return GroupElements {
                    elements,
                    complete: false,
                };
            }
            index.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    GroupElements {
        elements,
        complete: true,
    }
}

/// Injective partial map on vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialMap {
    pub image: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn identity(n: usize) -> Self {
        PartialMap {
            image: (0..n).map(Some).collect(),
        }
    }

    pub fn from_perm(p: &[usize]) -> Self {
        PartialMap {
            image: p.iter().copied().map(Some).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, v: usize) -> Option<usize> {
        self.image.get(v).copied().flatten()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PartialMap) -> PartialMap {
        PartialMap {
            image: inner
                .image
                .iter()
                .map(|x| x.and_then(|y| self.apply(y)))
                .collect(),
        }
    }

    pub fn inverse(&self) -> PartialMap {
        let mut image = vec![None; self.image.len()];
        for (x, y) in self.image.iter().enumerate() {
            if let Some(y) = *y {
                image[y] = Some(x);
            }
        }
        PartialMap { image }
    }

    pub fn is_defined_on(&self, vs: &[usize]) -> bool {
        vs.iter().all(|&v| self.apply(v).is_some())
    }

    /// Sorted image of `vs` if the map is defined on all of it.
    pub fn image_of_set(&self, vs: &[usize]) -> Option<Vec<usize>> {
        let mut out = vs
            .iter()
            .map(|&v| self.apply(v))
            .collect::<Option<Vec<_>>>()?;
        out.sort_unstable();
        Some(out)
    }

    pub fn domain_size(&self) -> usize {
        self.image.iter().filter(|x| x.is_some()).count()
    }

    /// Whether the map is an isomorphism between the subgraphs induced by
    /// its domain and its image.
    pub fn is_partial_automorphism(&self, g: &FiniteGraph) -> bool {
        let mut hit = vec![false; g.n()];
        for y in self.image.iter().flatten() {
            if *y >= g.n() || std::mem::replace(&mut hit[*y], true) {
                return false;
            }
        }
        for (u, y) in self.image.iter().enumerate() {
            let Some(y) = *y else { continue };
            let mapped_neighbors = g
                .neighbors(u)
                .iter()
                .filter_map(|&w| self.apply(w))
                .collect::<Vec<_>>();
            if mapped_neighbors.iter().any(|&z| !g.has_edge(y, z)) {
                return false;
            }
            let image_neighbors = g.neighbors(y).iter().filter(|&&z| hit[z]).count();
            if image_neighbors != mapped_neighbors.len() {
                return false;
            }
        }
        true
    }
}

/// Partial automorphisms acting on a patch of an infinite graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalAction {
    pub name: String,
    pub maps: Vec<PartialMap>,
}

impl LocalAction {
    pub fn from_action(a: &Action) -> Self {
        LocalAction {
            name: a.name.clone(),
            maps: a.generators.iter().map(|p| PartialMap::from_perm(p)).collect(),
        }
    }

    /// Generators followed by their inverses.
    pub fn symmetric_generators(&self) -> Vec<PartialMap> {
        let mut out = self.maps.clone();
        out.extend(self.maps.iter().map(PartialMap::inverse));
        out
    }

    pub fn validate(&self, g: &FiniteGraph) -> Result<(), GraphError> {
        for (index, m) in self.maps.iter().enumerate() {
            if m.image.len() != g.n() {
                return Err(GraphError::WrongDomain {
                    got: m.image.len(),
                    expected: g.n(),
                });
            }
            if !m.is_partial_automorphism(g) {
                return Err(GraphError::NotAutomorphism {
                    action: self.name.clone(),
                    index,
                    witness: "partial map does not preserve adjacency on its domain".into(),
                });
            }
        }
        Ok(())
    }

    pub fn orbits(&self, n: usize) -> OrbitPartition {
        let mut uf = UnionFind::new(n);
        for m in &self.maps {
            for (x, y) in m.image.iter().enumerate() {
                if let Some(y) = y {
                    uf.union(x, *y);
                }
            }
        }
        OrbitPartition {
            orbits: uf.classes(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(n: usize) -> Perm {
        (0..n).map(|i| (i + 1) % n).collect()
    }

    #[test]
    fn rotation_of_square_is_transitive() {
        let a = Action::new("rot", vec![rotation(4)]);
        let o = orbits(&FiniteGraph::cycle(4), &a).unwrap();
        assert_eq!(o.orbits, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn identity_on_path_gives_singletons() {
        let a = Action::new("id", vec![identity(5)]);
        assert_eq!(orbits(&FiniteGraph::path(5), &a).unwrap().count(), 5);
    }

    #[test]
    fn path_reflection_orbits() {
        let a = Action::new("flip", vec![vec![4, 3, 2, 1, 0]]);
        let o = orbits(&FiniteGraph::path(5), &a).unwrap();
        assert_eq!(o.orbits, vec![vec![0, 4], vec![1, 3], vec![2]]);
    }

    #[test]
    fn shift_on_path_is_rejected_with_witness() {
        let check = check_automorphism(&FiniteGraph::path(5), &rotation(5)).unwrap();
        let AutomorphismCheck::Fail(w) = check else {
            panic!("shift is not an automorphism of P5")
        };
        assert_eq!(w.pair, (3, 4));
        assert_eq!(w.image, (4, 0));
        let a = Action::new("shift", vec![rotation(5)]);
        assert!(orbits(&FiniteGraph::path(5), &a).is_err());
    }

    #[test]
    fn hexagon_reflection_through_zero_and_three() {
        let refl = vec![0, 5, 4, 3, 2, 1];
        assert_eq!(
            check_automorphism(&FiniteGraph::cycle(6), &refl).unwrap(),
            AutomorphismCheck::Pass
        );
        assert_eq!(
            check_automorphism(&FiniteGraph::cycle(4), &rotation(4)).unwrap(),
            AutomorphismCheck::Pass
        );
    }

    #[test]
    fn wrong_domain_is_an_error() {
        assert!(matches!(
            check_automorphism(&FiniteGraph::cycle(4), &[0, 1, 2]),
            Err(GraphError::WrongDomain { .. })
        ));
    }

    #[test]
    fn dihedral_group_of_square() {
        let group = enumerate_group(4, &[rotation(4), vec![0, 3, 2, 1]], 100);
        assert!(group.complete);
        assert_eq!(group.elements.len(), 8);
        assert_eq!(group.elements[0], identity(4));
        let capped = enumerate_group(4, &[rotation(4), vec![0, 3, 2, 1]], 3);
        assert!(!capped.complete);
    }

    #[test]
    fn partial_shift_on_path() {
        let g = FiniteGraph::path(6);
        let shift = PartialMap {
            image: (0..6).map(|v| (v + 1 < 6).then_some(v + 1)).collect(),
        };
        assert!(shift.is_partial_automorphism(&g));
        let inv = shift.inverse();
        assert_eq!(inv.apply(0), None);
        assert_eq!(inv.after(&shift).apply(3), Some(3));
        assert_eq!(shift.image_of_set(&[1, 2]), Some(vec![2, 3]));
        assert_eq!(shift.image_of_set(&[4, 5]), None);
        let squash = PartialMap {
            image: vec![Some(0), Some(2), None, None, None, None],
        };
        assert!(!squash.is_partial_automorphism(&g));
    }
}
