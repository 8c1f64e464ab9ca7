//! Splitting along basic tree-decompositions: edge orientation, conversion
//! to an amalgamation spec, separator-orbit decompositions and terminal
//! factorisations.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{enumerate_group, identity, Action, LocalAction, PartialMap, Perm};
use crate::amalgam::{
    action_preconditions, build_amalgam, is_trivial, lifted_action, validate_spec, AmalgamError, AmalgamationSpec, Bonding,
    SpecType, DEFAULT_GROUP_CAP,
};
use crate::ends::{distinguishes_at_scale, full_components, tight_separators};
use crate::graph::FiniteGraph;
use crate::iso::Patch;
use crate::treedecomp::{
    contract_edges, geodesic_closure, induced_tree_action, interior_edges, is_basic, tree_edge_orbits, verify_td, BasicReport,
    TdError, TreeDecomposition,
};

/// Longest product of generators searched for an element with prescribed
/// node images.
pub const DEFAULT_MAX_WORD: usize = 3;

/// Scale at which decompositions must distinguish boundary regions.
pub const BASIC_SCALE: usize = crate::ends::DEEP;

const POOL_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Td(#[from] TdError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error("decomposition is not basic: {0}")]
    NotBasic(String),
    #[error("({0}, {1}) is not a tree edge")]
    NotAnEdge(usize, usize),
    #[error("interior tree edge ({0}, {1}) is not an image of e0")]
    NotTransitive(usize, usize),
    #[error("inconclusive at adhesion set {adhesion:?}: {reason}")]
    Inconclusive { adhesion: Vec<usize>, reason: String },
    #[error("no split found at scale: no tight separator of size at most {k} leaves two deep regions at radius {radius}")]
    NoSplit { k: usize, radius: usize },
    #[error("separator orbit is not nested: {a:?} crosses {b:?}")]
    NonNestedOrbit { a: Vec<usize>, b: Vec<usize> },
    #[error("orbit decomposition failed: {0}")]
    Construction(String),
}

/// A product of action maps together with the tree nodes it sends the two
/// ends of `e0` to.
#[derive(Clone, Debug)]
struct Element {
    map: PartialMap,
    s: usize,
    t: usize,
}

struct Frame<'a> {
    td: &'a TreeDecomposition,
    index: BTreeMap<&'a [usize], usize>,
}

impl<'a> Frame<'a> {
    fn new(td: &'a TreeDecomposition) -> Self {
        let mut index = BTreeMap::new();
        for (t, p) in td.parts().iter().enumerate() {
            index.entry(p.as_slice()).or_insert(t);
        }
        Frame { td, index }
    }

    fn node_image(&self, m: &PartialMap, t: usize) -> Option<usize> {
        let img = m.image_of_set(self.td.part(t))?;
        self.index.get(img.as_slice()).copied()
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = a.iter().chain(b).copied().collect();
    set.into_iter().collect()
}

/// Products of at most `max_word` generators that are defined on both
/// parts of `e0` and carry them onto parts.
fn element_pool(frame: &Frame, a: &LocalAction, s: usize, t: usize, max_word: usize) -> Vec<Element> {
    let td = frame.td;
    let n = a.maps.first().map_or_else(|| td.parts().iter().flatten().max().map_or(0, |&m| m + 1), |m| m.image.len());
    let w0 = union(td.part(s), td.part(t));
    let gens = a.symmetric_generators();
    let start = Element {
        map: PartialMap::identity(n),
        s,
        t,
    };
    let mut seen: HashSet<PartialMap> = HashSet::from([start.map.clone()]);
    let mut pool = vec![start.clone()];
    let mut frontier = vec![start];
    for _ in 0..max_word {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &gens {
                let c = g.after(&e.map);
                if !c.is_defined_on(&w0) || seen.contains(&c) {
                    continue;
                }
                let (Some(cs), Some(ct)) = (frame.node_image(&c, s), frame.node_image(&c, t)) else {
                    continue;
                };
                seen.insert(c.clone());
                let el = Element { map: c, s: cs, t: ct };
                pool.push(el.clone());
                next.push(el);
                if pool.len() >= POOL_CAP {
                    return pool;
                }
            }
        }
        frontier = next;
    }
    pool
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeGamma {
    /// Positively oriented direction `(γ(s), γ(t))`.
    pub edge: (usize, usize),
    pub gamma: PartialMap,
    /// Obtained as `γ_{e'} ∘ δ_e` from an earlier edge rather than by search.
    pub composed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrientationData {
    pub e0: (usize, usize),
    pub positive: Vec<(usize, usize)>,
    pub negative: Vec<(usize, usize)>,
    pub gammas: Vec<EdgeGamma>,
    /// Type 1: the neighbours of `s`. Type 2: neighbours `u` of `s` with
    /// `(s, u)` positive.
    pub k: Vec<usize>,
    /// Type 1: the neighbours of `t`. Type 2: neighbours `u` of `s` with
    /// `(u, s)` positive.
    pub l: Vec<usize>,
    pub gamma_st: Option<PartialMap>,
    /// An edge inversion was found and only bipartition-preserving
    /// elements were kept.
    pub subgroup_reduced: bool,
    /// Edges touching the boundary that no element reached.
    pub unreached: Vec<(usize, usize)>,
}

impl OrientationData {
    pub fn gamma(&self, edge: (usize, usize)) -> Option<&PartialMap> {
        self.gammas.iter().find(|g| g.edge == edge).map(|g| &g.gamma)
    }

    pub fn kind(&self) -> SpecType {
        if self.gamma_st.is_some() {
            SpecType::Two
        } else {
            SpecType::One
        }
    }
}

fn tree_distances(td: &TreeDecomposition, from: usize) -> Vec<usize> {
    td.tree().bfs_distances(from).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect()
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Classifies every interior tree edge as the image of `e0 = (s, t)` in
/// one direction, assigning `γ_e` with `γ_e(e0) = e`. Edges at `s` and `t`
/// are found by search; the rest by induction from `e0` in BFS order,
/// `γ_e = γ_{e'} ∘ δ_e` where `δ_e` is the element found for the edge at
/// `s` or `t` that `γ_{e'}⁻¹` carries `e` to.
pub fn orient_edges(
    patch: &Patch,
    td: &TreeDecomposition,
    a: &LocalAction,
    e0: (usize, usize),
    max_word: usize,
) -> Result<OrientationData, SplitError> {
    let (s, t) = e0;
    if !td.tree().has_edge(s, t) {
        return Err(SplitError::NotAnEdge(s, t));
    }
    let report = is_basic(patch, td, a, BASIC_SCALE)?;
    if !report.basic {
        return Err(SplitError::NotBasic(basic_reason(&report)));
    }
    let frame = Frame::new(td);
    let mut pool = element_pool(&frame, a, s, t, max_word);
    let subgroup_reduced = pool.iter().any(|e| (e.s, e.t) == (t, s));
    if subgroup_reduced {
        let dist = tree_distances(td, s);
        pool.retain(|e| dist[e.s].is_multiple_of(2));
    }
    let gamma_st = pool.iter().find(|e| e.s == t).map(|e| e.map.clone());

    let find = |x: usize, y: usize| pool.iter().find(|e| (e.s, e.t) == (x, y)).map(|e| e.map.clone());
    let mut assigned: BTreeMap<(usize, usize), EdgeGamma> = BTreeMap::new();
    assigned.insert(
        edge_key(s, t),
        EdgeGamma {
            edge: (s, t),
            gamma: pool[0].map.clone(),
            composed: false,
        },
    );
    let base = |x: usize, y: usize, assigned: &mut BTreeMap<(usize, usize), EdgeGamma>| {
        if assigned.contains_key(&edge_key(x, y)) {
            return;
        }
        let hit = find(x, y).map(|g| ((x, y), g)).or_else(|| find(y, x).map(|g| ((y, x), g)));
        if let Some((edge, gamma)) = hit {
            assigned.insert(edge_key(x, y), EdgeGamma { edge, gamma, composed: false });
        }
    };
    for &u in td.tree().neighbors(s) {
        base(s, u, &mut assigned);
    }
    for &u in td.tree().neighbors(t) {
        base(u, t, &mut assigned);
    }
    let at_e0: BTreeMap<(usize, usize), EdgeGamma> = assigned.clone();

    let mut queue: VecDeque<(usize, usize)> = VecDeque::from([edge_key(s, t)]);
    let mut visited: BTreeSet<(usize, usize)> = BTreeSet::from([edge_key(s, t)]);
    while let Some((x, y)) = queue.pop_front() {
        let mut next: Vec<(usize, usize)> = Vec::new();
        for &v in &[x, y] {
            for &w in td.tree().neighbors(v) {
                let e = edge_key(v, w);
                if visited.insert(e) {
                    next.push(e);
                }
            }
        }
        next.sort_unstable();
        for e in next {
            queue.push_back(e);
            if assigned.contains_key(&e) {
                continue;
            }
            let Some(parent) = assigned.get(&(x, y)).cloned() else {
                continue;
            };
            let inv = parent.gamma.inverse();
            let composed = match (frame.node_image(&inv, e.0), frame.node_image(&inv, e.1)) {
                (Some(p), Some(q)) => at_e0.get(&edge_key(p, q)).and_then(|delta| {
                    let g = parent.gamma.after(&delta.gamma);
                    let (gs, gt) = (frame.node_image(&g, s)?, frame.node_image(&g, t)?);
                    (edge_key(gs, gt) == e).then_some(EdgeGamma {
                        edge: (gs, gt),
                        gamma: g,
                        composed: true,
                    })
                }),
                _ => None,
            };
            let found = composed.or_else(|| {
                let hit = find(e.0, e.1).map(|g| (e, g)).or_else(|| find(e.1, e.0).map(|g| ((e.1, e.0), g)));
                hit.map(|(edge, gamma)| EdgeGamma {
                    edge,
                    gamma,
                    composed: false,
                })
            });
            if let Some(g) = found {
                assigned.insert(e, g);
            }
        }
    }

    let interior: BTreeSet<(usize, usize)> = interior_edges(patch, td).into_iter().collect();
    let mut unreached = Vec::new();
    for e in td.tree().edges() {
        if !assigned.contains_key(&e) {
            if interior.contains(&e) {
                return Err(SplitError::NotTransitive(e.0, e.1));
            }
            unreached.push(e);
        }
    }
    let mut positive: Vec<(usize, usize)> = assigned.values().map(|g| g.edge).collect();
    positive.sort_unstable();
    let mut negative: Vec<(usize, usize)> = positive.iter().map(|&(x, y)| (y, x)).collect();
    negative.sort_unstable();
    let is_pos = |x: usize, y: usize| assigned.get(&edge_key(x, y)).is_some_and(|g| g.edge == (x, y));
    let (k, l) = if gamma_st.is_some() {
        let nb = td.tree().neighbors(s);
        (
            nb.iter().copied().filter(|&u| is_pos(s, u)).collect(),
            nb.iter().copied().filter(|&u| is_pos(u, s)).collect(),
        )
    } else {
        (td.tree().neighbors(s).to_vec(), td.tree().neighbors(t).to_vec())
    };
    Ok(OrientationData {
        e0,
        positive,
        negative,
        gammas: assigned.into_values().collect(),
        k,
        l,
        gamma_st,
        subgroup_reduced,
        unreached,
    })
}

fn basic_reason(r: &BasicReport) -> String {
    if !r.distinguishes_ends {
        format!("no adhesion set has deep boundary on both sides at scale {}", r.scale)
    } else {
        format!("{} orbits on {} interior tree edges", r.edge_orbits, r.interior_edges)
    }
}

/// Result of reading an amalgamation off a basic tree-decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Conversion {
    pub spec: AmalgamationSpec,
    pub orientation: OrientationData,
    pub basic: BasicReport,
    /// Distinct stabiliser elements found for each side.
    pub stabiliser_sizes: Vec<usize>,
}

struct LocalFrame {
    vertices: Vec<usize>,
    local: BTreeMap<usize, usize>,
}

impl LocalFrame {
    fn new(vs: &[usize]) -> Self {
        LocalFrame {
            vertices: vs.to_vec(),
            local: vs.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
        }
    }

    fn localize(&self, vs: &[usize]) -> Option<Vec<usize>> {
        let mut out: Vec<usize> = vs.iter().map(|v| self.local.get(v).copied()).collect::<Option<_>>()?;
        out.sort_unstable();
        Some(out)
    }

    fn restrict(&self, m: &PartialMap) -> Option<Perm> {
        self.vertices.iter().map(|&v| m.apply(v).and_then(|w| self.local.get(&w).copied())).collect()
    }
}

/// Elements fixing a node, restricted to its part, as generators of a
/// permutation group on local indices. Each is kept only if it enlarges
/// the group generated so far.
fn stabiliser(pool: &[Element], fixes: impl Fn(&Element) -> bool, frame: &LocalFrame) -> (Vec<Perm>, usize) {
    let n = frame.vertices.len();
    let id = identity(n);
    let mut found: Vec<Perm> = pool.iter().filter(|e| fixes(e)).filter_map(|e| frame.restrict(&e.map)).collect();
    found.sort();
    found.dedup();
    let total = found.len();
    let mut gens: Vec<Perm> = Vec::new();
    for p in found {
        if p == id {
            continue;
        }
        let group = enumerate_group(n, &gens, DEFAULT_GROUP_CAP);
        if !group.contains(&p) {
            gens.push(p);
        }
    }
    (gens, total)
}

/// Reads a Type 1 or Type 2 spec off a basic tree-decomposition. Adhesion
/// sets are `V_s ∩ V_u` in local coordinates and the bondings are
/// `φ_{kl} = id⁻¹ ∘ γ_l ∘ γ_k⁻¹ ∘ id_s`. Factor actions are the
/// stabilisers of `s` and `t` restricted to their parts.
///
/// With `e0 = None` the edges at the lowest node containing the patch
/// root are tried in order and the first that converts is used.
pub fn td_to_amalgamation(
    patch: &Patch,
    a: &LocalAction,
    td: &TreeDecomposition,
    e0: Option<(usize, usize)>,
    max_word: usize,
) -> Result<Conversion, SplitError> {
    let basic = is_basic(patch, td, a, BASIC_SCALE)?;
    if !basic.basic {
        return Err(SplitError::NotBasic(basic_reason(&basic)));
    }
    let candidates: Vec<(usize, usize)> = match e0 {
        Some(e) => vec![e],
        None => td
            .nodes_containing(patch.root)
            .into_iter()
            .flat_map(|s| td.tree().neighbors(s).iter().map(move |&t| (s, t)).collect::<Vec<_>>())
            .collect(),
    };
    let mut last = SplitError::Construction("no tree edge at the root".into());
    for e in candidates {
        match convert_at(patch, a, td, e, max_word, &basic) {
            Ok(c) => return Ok(c),
            Err(err) => last = err,
        }
    }
    Err(last)
}

fn convert_at(
    patch: &Patch,
    a: &LocalAction,
    td: &TreeDecomposition,
    e0: (usize, usize),
    max_word: usize,
    basic: &BasicReport,
) -> Result<Conversion, SplitError> {
    let (s, t) = e0;
    let orientation = orient_edges(patch, td, a, e0, max_word)?;
    let frame = Frame::new(td);
    let mut pool = element_pool(&frame, a, s, t, max_word);
    if orientation.subgroup_reduced {
        let dist = tree_distances(td, s);
        pool.retain(|e| dist[e.s].is_multiple_of(2));
    }
    let gamma = |x: usize, y: usize| -> Result<&PartialMap, SplitError> {
        orientation.gamma((x, y)).ok_or_else(|| SplitError::Inconclusive {
            adhesion: td.adhesion(x, y),
            reason: format!("no element carries e0 onto ({x}, {y})"),
        })
    };
    let fs = LocalFrame::new(td.part(s));
    let missing = |x: usize, y: usize| SplitError::Inconclusive {
        adhesion: td.adhesion(x, y),
        reason: "adhesion set leaves the part".into(),
    };
    let mut adhesions = BTreeMap::new();
    let mut bondings = Vec::new();
    let stabiliser_sizes;
    let spec = if orientation.gamma_st.is_none() {
        let ft = LocalFrame::new(td.part(t));
        let ks = &orientation.k;
        let ls = &orientation.l;
        let i1: Vec<usize> = (1..=ks.len()).collect();
        let i2: Vec<usize> = (ks.len() + 1..=ks.len() + ls.len()).collect();
        for (&k, &u) in i1.iter().zip(ks) {
            adhesions.insert(k, fs.localize(&td.adhesion(s, u)).ok_or_else(|| missing(s, u))?);
        }
        for (&l, &u) in i2.iter().zip(ls) {
            adhesions.insert(l, ft.localize(&td.adhesion(t, u)).ok_or_else(|| missing(t, u))?);
        }
        for (&k, &tk) in i1.iter().zip(ks) {
            let gk_inv = gamma(s, tk)?.inverse();
            for (&l, &sl) in i2.iter().zip(ls) {
                let gl = gamma(sl, t)?;
                let map = bonding_map(&adhesions[&k], &fs, &ft, &gk_inv, gl).ok_or_else(|| SplitError::Inconclusive {
                    adhesion: td.adhesion(s, tk),
                    reason: format!("bonding ({k}, {l}) is undefined on the patch"),
                })?;
                bondings.push(Bonding { k, l, map });
            }
        }
        let (g1, n1) = stabiliser(&pool, |e| e.s == s, &fs);
        let (g2, n2) = stabiliser(&pool, |e| e.t == t, &ft);
        stabiliser_sizes = vec![n1, n2];
        AmalgamationSpec {
            kind: SpecType::One,
            g1: patch.graph.induced_subgraph(&fs.vertices),
            g2: Some(patch.graph.induced_subgraph(&ft.vertices)),
            i1,
            i2,
            j: vec![],
            adhesions,
            bondings,
            actions: vec![
                Action::new("stabiliser", g1),
                Action::new("stabiliser", g2),
            ],
        }
    } else {
        let nb = td.tree().neighbors(s).to_vec();
        let labels: Vec<usize> = (1..=nb.len()).collect();
        let label_of: BTreeMap<usize, usize> = nb.iter().copied().zip(labels.iter().copied()).collect();
        for (&k, &u) in labels.iter().zip(&nb) {
            adhesions.insert(k, fs.localize(&td.adhesion(s, u)).ok_or_else(|| missing(s, u))?);
        }
        let j: Vec<usize> = orientation.k.iter().map(|u| label_of[u]).collect();
        for &tk in &orientation.k {
            let k = label_of[&tk];
            let gk_inv = gamma(s, tk)?.inverse();
            for &sl in &orientation.l {
                let l = label_of[&sl];
                let gl = gamma(sl, s)?;
                let map = bonding_map(&adhesions[&k], &fs, &fs, &gk_inv, gl).ok_or_else(|| SplitError::Inconclusive {
                    adhesion: td.adhesion(s, tk),
                    reason: format!("bonding ({k}, {l}) is undefined on the patch"),
                })?;
                bondings.push(Bonding { k, l, map });
            }
        }
        let (g1, n1) = stabiliser(&pool, |e| e.s == s, &fs);
        stabiliser_sizes = vec![n1];
        AmalgamationSpec {
            kind: SpecType::Two,
            g1: patch.graph.induced_subgraph(&fs.vertices),
            g2: None,
            i1: labels,
            i2: vec![],
            j,
            adhesions,
            bondings,
            actions: vec![Action::new("stabiliser", g1)],
        }
    };
    let report = validate_spec(&spec);
    if !report.is_valid() {
        return Err(SplitError::Inconclusive {
            adhesion: td.adhesion(s, t),
            reason: report.to_string(),
        });
    }
    action_preconditions(&spec, DEFAULT_GROUP_CAP).map_err(|reason| SplitError::Inconclusive {
        adhesion: td.adhesion(s, t),
        reason,
    })?;
    Ok(Conversion {
        spec,
        orientation,
        basic: basic.clone(),
        stabiliser_sizes,
    })
}

fn bonding_map(
    adhesion: &[usize],
    from: &LocalFrame,
    to: &LocalFrame,
    gk_inv: &PartialMap,
    gl: &PartialMap,
) -> Option<Vec<(usize, usize)>> {
    adhesion
        .iter()
        .map(|&x| {
            let v = gl.apply(gk_inv.apply(from.vertices[x])?)?;
            Some((x, *to.local.get(&v)?))
        })
        .collect()
}

/// Whether `b` meets two components of `g - a`, or `a` two of `g - b`.
pub fn crosses(g: &FiniteGraph, a: &[usize], b: &[usize]) -> bool {
    let one_way = |a: &[usize], b: &[usize]| {
        let mut removed = vec![false; g.n()];
        for &v in a {
            removed[v] = true;
        }
        let comps = g.components_avoiding(&removed);
        let hit: BTreeSet<usize> = b
            .iter()
            .filter(|v| !a.contains(v))
            .filter_map(|&v| comps.iter().position(|c| c.binary_search(&v).is_ok()))
            .collect();
        hit.len() > 1
    };
    one_way(a, b) || one_way(b, a)
}

/// Images of `sep` under the action that are again tight separators,
/// sorted.
pub fn separator_orbit(g: &FiniteGraph, a: &LocalAction, sep: &[usize]) -> Vec<Vec<usize>> {
    let gens = a.symmetric_generators();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([sep.to_vec()]);
    let mut queue = VecDeque::from([sep.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for m in &gens {
            if let Some(img) = m.image_of_set(&x) {
                if !seen.contains(&img) && full_components(g, &img).len() >= 2 {
                    seen.insert(img.clone());
                    queue.push_back(img);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Tree-decomposition cut out by a nested family of separators. Parts are
/// classes of edges not separated by any member; a separator with two
/// sides becomes a tree edge, one with more sides a node of its own.
pub fn orbit_decomposition(g: &FiniteGraph, family: &[Vec<usize>]) -> Result<TreeDecomposition, SplitError> {
    let comp_maps: Vec<Vec<usize>> = family
        .iter()
        .map(|sep| {
            let mut removed = vec![false; g.n()];
            for &v in sep {
                removed[v] = true;
            }
            let mut of = vec![usize::MAX; g.n()];
            for (i, c) in g.components_avoiding(&removed).iter().enumerate() {
                for &v in c {
                    of[v] = i;
                }
            }
            of
        })
        .collect();
    let signature = |u: usize, v: usize| -> Vec<Option<usize>> {
        comp_maps
            .iter()
            .map(|of| {
                if of[u] != usize::MAX {
                    Some(of[u])
                } else if of[v] != usize::MAX {
                    Some(of[v])
                } else {
                    None
                }
            })
            .collect()
    };
    let mut classes: Vec<(Vec<Option<usize>>, BTreeSet<usize>)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.sort_by_key(|&(u, v)| signature(u, v).iter().filter(|x| x.is_none()).count());
    for (u, v) in edges {
        let sig = signature(u, v);
        let matches = |c: &Vec<Option<usize>>| c.iter().zip(&sig).all(|(a, b)| a.is_none() || b.is_none() || a == b);
        match classes.iter_mut().find(|(c, _)| matches(c)) {
            Some((c, part)) => {
                for (slot, x) in c.iter_mut().zip(&sig) {
                    if slot.is_none() {
                        *slot = *x;
                    }
                }
                part.insert(u);
                part.insert(v);
            }
            None => classes.push((sig, BTreeSet::from([u, v]))),
        }
    }
    let mut parts: Vec<Vec<usize>> = classes.iter().map(|(_, p)| p.iter().copied().collect()).collect();
    parts.sort();
    parts.dedup();

    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    for (sep, of) in family.iter().zip(&comp_maps) {
        let mut by_side: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, p) in parts.iter().enumerate() {
            if !sep.iter().all(|v| p.binary_search(v).is_ok()) {
                continue;
            }
            for &x in p {
                if of[x] != usize::MAX && sep.iter().any(|&v| g.has_edge(v, x)) {
                    by_side.entry(of[x]).or_default().insert(i);
                }
            }
        }
        if let Some((side, nodes)) = by_side.iter().find(|(_, n)| n.len() > 1) {
            return Err(SplitError::Construction(format!(
                "separator {sep:?} meets {} parts on side {side}",
                nodes.len()
            )));
        }
        let touching: Vec<usize> = by_side.values().map(|n| *n.iter().next().unwrap()).collect();
        match touching.len() {
            0 | 1 => {
                return Err(SplitError::Construction(format!("separator {sep:?} bounds fewer than two parts")));
            }
            2 => tree_edges.push((touching[0], touching[1])),
            _ => {
                let hub = parts.len();
                parts.push(sep.clone());
                tree_edges.extend(touching.iter().map(|&p| (hub, p)));
            }
        }
    }
    tree_edges.sort_unstable();
    tree_edges.dedup();
    let tree = FiniteGraph::from_edges(parts.len(), tree_edges).map_err(|e| SplitError::Construction(e.to_string()))?;
    let td = TreeDecomposition::new(tree, parts).map_err(|_| SplitError::Construction("separators do not form a tree".into()))?;
    let report = verify_td(g, &td)?;
    if !report.is_valid() {
        return Err(SplitError::Construction(format!("{} axiom violations", report.violations.len())));
    }
    Ok(td)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitOutcome {
    pub k: usize,
    pub radius: usize,
    pub separator: Vec<usize>,
    pub orbit: Vec<Vec<usize>>,
    pub contracted_edges: usize,
    /// The decomposition handed to the conversion, after contraction and
    /// geodesic closure.
    pub td: TreeDecomposition,
    pub conversion: Conversion,
}

impl SplitOutcome {
    pub fn spec(&self) -> &AmalgamationSpec {
        &self.conversion.spec
    }
}

/// Splits a patch along the orbit of a tight separator of size at most
/// `k`. Candidates are tried nearest the root first; one whose orbit
/// crosses itself is skipped, and if every candidate crosses the first
/// crossing pair is reported.
pub fn stallings_split(patch: &Patch, a: &LocalAction, k: usize, cap: usize) -> Result<SplitOutcome, SplitError> {
    let g = &patch.graph;
    let dist = g.bfs_distances(patch.root);
    let mut candidates: Vec<Vec<usize>> = tight_separators(g, k, cap)
        .separators
        .into_iter()
        .map(|s| s.vertices)
        .filter(|s| distinguishes_at_scale(patch, s))
        .collect();
    if candidates.is_empty() {
        return Err(SplitError::NoSplit { k, radius: patch.radius });
    }
    candidates.sort_by_key(|s| (s.iter().filter_map(|&v| dist[v]).min(), s.len(), s.clone()));
    let mut first_failure = None;
    for sep in candidates {
        let orbit = separator_orbit(g, a, &sep);
        let crossing = orbit
            .iter()
            .enumerate()
            .find_map(|(i, x)| orbit[i + 1..].iter().find(|y| crosses(g, x, y)).map(|y| (x.clone(), y.clone())));
        if let Some((x, y)) = crossing {
            first_failure.get_or_insert(SplitError::NonNestedOrbit { a: x, b: y });
            continue;
        }
        match split_along(patch, a, k, &sep, orbit) {
            Ok(out) => return Ok(out),
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    Err(first_failure.expect("at least one candidate was tried"))
}

fn split_along(patch: &Patch, a: &LocalAction, k: usize, sep: &[usize], orbit: Vec<Vec<usize>>) -> Result<SplitOutcome, SplitError> {
    let g = &patch.graph;
    let td = orbit_decomposition(g, &orbit)?;
    let ta = induced_tree_action(&td, a)?;
    let orbits = tree_edge_orbits(&td, &ta);
    let main = orbits
        .iter()
        .position(|o| o.iter().any(|&(x, y)| td.adhesion(x, y) == sep))
        .ok_or_else(|| SplitError::Construction("chosen separator is not an adhesion set".into()))?;
    let interior: BTreeSet<(usize, usize)> = interior_edges(patch, &td).into_iter().collect();
    let in_main: BTreeSet<(usize, usize)> = orbits[main].iter().copied().collect();
    let contraction = contract_edges(&td, |x, y| {
        let e = edge_key(x, y);
        !interior.contains(&e) || in_main.contains(&e)
    });
    let contracted_edges = td.tree().edge_count() - contraction.td.tree().edge_count();
    let closed = geodesic_closure(g, &contraction.td)?;
    let conversion = td_to_amalgamation(patch, a, &closed, None, DEFAULT_MAX_WORD)?;
    if is_trivial(&conversion.spec).trivial {
        return Err(SplitError::Construction("split produced a trivial amalgamation".into()));
    }
    if conversion.spec.adhesion_size() > k {
        return Err(SplitError::Construction(format!(
            "adhesion {} exceeds the bound {k} after closure",
            conversion.spec.adhesion_size()
        )));
    }
    Ok(SplitOutcome {
        k,
        radius: patch.radius,
        separator: sep.to_vec(),
        orbit,
        contracted_edges,
        td: closed,
        conversion,
    })
}

/// Builds `s` at radius `radius` and splits the build under its
/// lifted action.
pub fn stallings_split_spec(s: &AmalgamationSpec, k: usize, radius: usize, seed: u64, cap: usize) -> Result<SplitOutcome, SplitError> {
    let b = build_amalgam(s, radius, seed)?;
    let a = lifted_action(s, &b, DEFAULT_GROUP_CAP)?;
    stallings_split(&b.patch, &a, k, cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorStatus {
    Finite,
    OneEndedAtScale,
    SplitFurther,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorisationNode {
    pub id: usize,
    pub depth: usize,
    pub status: FactorStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<FiniteGraph>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<AmalgamationSpec>,
    pub k: usize,
    pub radius: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub children: Vec<FactorisationNode>,
}

impl FactorisationNode {
    pub fn leaves(&self) -> Vec<&FactorisationNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Indented one-line-per-node summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        self.write_summary(&mut out);
        out
    }

    fn write_summary(&self, out: &mut String) {
        let what = match (&self.graph, &self.spec) {
            (Some(g), _) => format!("graph on {} vertices, {} edges", g.n(), g.edge_count()),
            (_, Some(s)) => format!("spec type {}, adhesion {}", u8::from(s.kind), s.adhesion_size()),
            _ => String::new(),
        };
        let status = serde_json::to_value(self.status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        out.push_str(&format!("{}#{} {status}: {what}", "  ".repeat(self.depth), self.id));
        if let Some(n) = &self.note {
            out.push_str(&format!(" ({n})"));
        }
        out.push('\n');
        for c in &self.children {
            c.write_summary(out);
        }
    }
}

/// Splits `s` at scale `(k, radius)` and then its factors, stopping at
/// finite factors, at factors with fewer than two deep regions, and at
/// `max_depth`.
pub fn terminal_factorisation(s: &AmalgamationSpec, k: usize, radius: usize, max_depth: usize, seed: u64, cap: usize) -> FactorisationNode {
    let mut next_id = 0;
    factor_node(s, k, radius, 0, max_depth, seed, cap, &mut next_id)
}

#[allow(clippy::too_many_arguments)]
fn factor_node(
    s: &AmalgamationSpec,
    k: usize,
    radius: usize,
    depth: usize,
    max_depth: usize,
    seed: u64,
    cap: usize,
    next_id: &mut usize,
) -> FactorisationNode {
    let id = *next_id;
    *next_id += 1;
    let mut node = FactorisationNode {
        id,
        depth,
        status: FactorStatus::Inconclusive,
        graph: None,
        spec: Some(s.clone()),
        k,
        radius,
        note: None,
        children: Vec::new(),
    };
    if depth >= max_depth {
        node.note = Some(format!("maximum depth {max_depth} reached"));
        return node;
    }
    match stallings_split_spec(s, k, radius, seed, cap) {
        Ok(out) => {
            node.status = FactorStatus::SplitFurther;
            node.note = Some(format!("separator {:?}, orbit of {}", out.separator, out.orbit.len()));
            let spec = out.spec();
            for side in 1..=spec.side_count() {
                let id = *next_id;
                *next_id += 1;
                node.children.push(FactorisationNode {
                    id,
                    depth: depth + 1,
                    status: FactorStatus::Finite,
                    graph: Some(spec.graph(side).clone()),
                    spec: None,
                    k,
                    radius,
                    note: None,
                    children: Vec::new(),
                });
            }
        }
        Err(SplitError::NoSplit { .. }) => {
            node.status = FactorStatus::OneEndedAtScale;
            node.note = Some(format!("fewer than two deep regions for separators of size at most {k}"));
        }
        Err(e) => node.note = Some(e.to_string()),
    }
    node
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn crossing_pairs_on_a_cycle() {
        let c6 = FiniteGraph::cycle(6);
        assert!(crosses(&c6, &[0, 3], &[1, 4]));
        assert!(!crosses(&c6, &[0, 2], &[3, 5]));
    }

    #[test]
    fn path_orbit_decomposition_is_edges() {
        let g = FiniteGraph::path(6);
        let family: Vec<Vec<usize>> = (1..5).map(|v| vec![v]).collect();
        let td = orbit_decomposition(&g, &family).unwrap();
        assert_eq!(td.parts(), &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]]);
    }

    #[test]
    fn star_separator_gets_a_hub() {
        let g = FiniteGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let td = orbit_decomposition(&g, &[vec![0]]).unwrap();
        assert_eq!(td.node_count(), 4);
        assert_eq!(td.part(3), &[0]);
        assert_eq!(td.tree().degree(3), 3);
    }

    #[test]
    fn max_depth_zero_is_inconclusive() {
        let root = terminal_factorisation(&spec_double_ray(), 1, 4, 0, 0, 1000);
        assert_eq!(root.status, FactorStatus::Inconclusive);
        assert!(root.children.is_empty());
    }
}
