use std::collections::VecDeque;

use super::build::AmalgamGraph;
use super::checks::{star_isomorphism, Pin, SpecGroups};
use super::spec::{AmalgamationSpec, SpecType};
use super::AmalgamError;
use crate::action::{identity, inverse, LocalAction, PartialMap, Perm};

/// An isomorphism between two builds of one spec, grown outward from a
/// pair of nodes one star at a time.
#[derive(Clone, Debug)]
pub struct Lift {
    pub node_map: Vec<Option<usize>>,
    /// Element of the factor group applied to the copy at each mapped node.
    pub elements: Vec<Option<Perm>>,
    /// Defined on vertices all of whose copies are mapped and whose image
    /// class is covered exactly.
    pub vertex_map: PartialMap,
}

/// Maps the copy at `start` in `a` to the copy at `target` in `b` through
/// `gamma`, then extends across every star whose centre is interior in both
/// builds. Children receive `γ_k⁻¹`, and each star is pinned on the edge
/// back to its parent so the extensions agree on shared vertices.
pub fn lift(
    s: &AmalgamationSpec,
    groups: &SpecGroups,
    a: &AmalgamGraph,
    b: &AmalgamGraph,
    start: usize,
    target: usize,
    gamma: Perm,
) -> Result<Lift, AmalgamError> {
    if a.tree.side[start] != b.tree.side[target] {
        return Err(AmalgamError::Internal(format!("nodes {start} and {target} lie on different sides")));
    }
    let na = a.tree.node_count();
    let mut node_map = vec![None; na];
    let mut elements: Vec<Option<Perm>> = vec![None; na];
    node_map[start] = Some(target);
    elements[start] = Some(gamma);
    let mut queue: VecDeque<(usize, Option<Pin>)> = VecDeque::from([(start, None)]);
    while let Some((t, pin)) = queue.pop_front() {
        let t2 = node_map[t].unwrap();
        if a.tree.is_leaf(t) || b.tree.is_leaf(t2) {
            continue;
        }
        let g = elements[t].clone().unwrap();
        let ell = a.tree.star(t);
        let ell2 = b.tree.star(t2);
        let iso = star_isomorphism(s, groups, a.tree.side[t], &ell, &ell2, &g, pin.as_ref())?;
        for &(k, w) in &a.tree.out[t] {
            let pk = iso.pi[&k];
            let w2 = b.tree.neighbor_by_label(t2, pk).expect("interior nodes realise every label");
            if let Some(existing) = node_map[w] {
                if existing != w2 {
                    return Err(AmalgamError::Internal(format!("star at {t} disagrees with its parent")));
                }
                continue;
            }
            node_map[w] = Some(w2);
            elements[w] = Some(inverse(&iso.gammas[&k]));
            let child_pin = Pin {
                k: ell[&k],
                k_prime: ell2[&pk],
                element: inverse(&g),
            };
            queue.push_back((w, Some(child_pin)));
        }
    }

    let mut image = vec![None; a.graph().n()];
    let b_sizes: Vec<usize> = b.provenance.iter().map(Vec::len).collect();
    for (u, class) in a.provenance.iter().enumerate() {
        let mut img = None;
        let mut ok = true;
        for &(t, x) in class {
            match (node_map[t], &elements[t]) {
                (Some(t2), Some(g)) => {
                    let v = b.vertex(t2, g[x]);
                    if img.is_some_and(|i| i != v) {
                        ok = false;
                    }
                    img = Some(v);
                }
                _ => ok = false,
            }
        }
        if ok {
            if let Some(v) = img {
                if b_sizes[v] == class.len() {
                    image[u] = Some(v);
                }
            }
        }
    }
    Ok(Lift {
        node_map,
        elements,
        vertex_map: PartialMap { image },
    })
}

/// Partial automorphisms of a build obtained by lifting: the copy at the
/// base node of each side is carried to every other node of that side, and
/// each generator of the factor group is lifted at its base node.
pub fn lifted_action(s: &AmalgamationSpec, build: &AmalgamGraph, cap: usize) -> Result<LocalAction, AmalgamError> {
    let groups = SpecGroups::new(s, cap);
    let tree = &build.tree;
    let mut bases = vec![(1u8, 0usize)];
    if s.kind == SpecType::One {
        if let Some(&(_, c)) = tree.out[0].first() {
            bases.push((2, c));
        }
    }
    let mut maps: Vec<PartialMap> = Vec::new();
    for (side, base) in bases {
        let n = s.graph(side).n();
        for x in 0..tree.node_count() {
            if tree.side[x] != side || x == base {
                continue;
            }
            maps.push(lift(s, &groups, build, build, base, x, identity(n))?.vertex_map);
        }
        for g in &s.action(side).generators {
            maps.push(lift(s, &groups, build, build, base, base, g.clone())?.vertex_map);
        }
    }
    maps.retain(|m| m.image.iter().enumerate().any(|(x, y)| matches!(y, Some(v) if *v != x)));
    maps.dedup();
    Ok(LocalAction {
        name: "lifted".into(),
        maps,
    })
}
