use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::spec::AmalgamationSpec;
use super::AmalgamError;
use crate::action::{compose, enumerate_group, inverse, GroupElements, Perm};

/// Outcome of asking whether the amalgamation respects an automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Respects {
    /// `pi` permutes the index set of the side; `ell` records the index
    /// witnessing the defining equation for each `k`.
    Respects { pi: BTreeMap<usize, usize>, ell: BTreeMap<usize, usize> },
    /// No permutation exists; `k` has no feasible image left.
    Fails { k: usize },
}

fn maps_pointwise(s: &AmalgamationSpec, gamma: &[usize], k: usize, k2: usize, l: usize) -> bool {
    let (Some(a), Some(b)) = (s.bonding(k, l), s.bonding(k2, l)) else {
        return false;
    };
    a.iter().all(|(&x, &y)| b.get(&gamma[x]) == Some(&y))
}

fn same_set(s: &AmalgamationSpec, gamma: &[usize], k: usize, k2: usize) -> bool {
    let mut img: Vec<usize> = s.adhesion(k).iter().map(|&x| gamma[x]).collect();
    img.sort_unstable();
    let mut target = s.adhesion(k2).to_vec();
    target.sort_unstable();
    img == target
}

/// Searches for `π` with `φ_{kl} = φ_{π(k)l} ∘ γ` on `S_k` for some `l`
/// per `k`, by bipartite matching over the feasible `(k, π(k))` pairs.
pub fn respects_action(s: &AmalgamationSpec, gamma: &[usize], side: u8) -> Respects {
    let labels = s.labels(side).to_vec();
    let mut candidates: Vec<Vec<(usize, usize)>> = Vec::with_capacity(labels.len());
    for &k in &labels {
        let mut cands = Vec::new();
        let order = std::iter::once(k).chain(labels.iter().copied().filter(|&k2| k2 != k));
        for k2 in order {
            if !same_set(s, gamma, k, k2) {
                continue;
            }
            let shared = s.partners(k).into_iter().filter(|l| s.partners(k2).contains(l));
            if let Some(l) = shared.into_iter().find(|&l| maps_pointwise(s, gamma, k, k2, l)) {
                cands.push((k2, l));
            }
        }
        if cands.is_empty() {
            return Respects::Fails { k };
        }
        candidates.push(cands);
    }
    let index: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; labels.len()];
    fn augment(
        i: usize,
        candidates: &[Vec<(usize, usize)>],
        index: &BTreeMap<usize, usize>,
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &(k2, _) in &candidates[i] {
            let j = index[&k2];
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, candidates, index, owner, seen)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..labels.len() {
        let mut seen = vec![false; labels.len()];
        if !augment(i, &candidates, &index, &mut owner, &mut seen) {
            return Respects::Fails { k: labels[i] };
        }
    }
    let mut pi = BTreeMap::new();
    let mut ell = BTreeMap::new();
    for (j, o) in owner.iter().enumerate() {
        let i = o.expect("perfect matching");
        let k2 = labels[j];
        let l = candidates[i].iter().find(|c| c.0 == k2).unwrap().1;
        pi.insert(labels[i], k2);
        ell.insert(labels[i], l);
    }
    Respects::Respects { pi, ell }
}

/// Group elements per side, enumerated once with a cap.
#[derive(Clone, Debug)]
pub struct SpecGroups {
    groups: Vec<GroupElements>,
    pub cap: usize,
}

impl SpecGroups {
    pub fn new(s: &AmalgamationSpec, cap: usize) -> Self {
        let groups = (1..=s.side_count())
            .map(|side| enumerate_group(s.graph(side).n(), &s.action(side).generators, cap))
            .collect();
        SpecGroups { groups, cap }
    }

    pub fn side(&self, side: u8) -> &GroupElements {
        &self.groups[usize::from(side) - 1]
    }

    pub fn complete(&self) -> bool {
        self.groups.iter().all(|g| g.complete)
    }
}

/// An element `γ` of the group on the side of `l` with `φ_{kl} = γ ∘ φ_{kl'}`.
pub fn consistency_element(
    s: &AmalgamationSpec,
    groups: &SpecGroups,
    k: usize,
    l: usize,
    l2: usize,
) -> Option<Perm> {
    let a = s.bonding(k, l)?;
    let b = s.bonding(k, l2)?;
    let pairs: Vec<(usize, usize)> = a.iter().map(|(x, &y)| (b[x], y)).collect();
    groups
        .side(s.side_of_label(l))
        .elements
        .iter()
        .find(|g| pairs.iter().all(|&(from, to)| g[from] == to))
        .cloned()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConsistencyVerdict {
    Consistent,
    Inconsistent { k: usize, l: usize, l_prime: usize },
    /// The cap stopped enumeration before an element was found.
    Inconclusive { k: usize, l: usize, l_prime: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyWitness {
    pub k: usize,
    pub l: usize,
    pub l_prime: usize,
    pub element: Perm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub verdict: ConsistencyVerdict,
    pub witnesses: Vec<ConsistencyWitness>,
    pub group_orders: Vec<usize>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.verdict == ConsistencyVerdict::Consistent
    }
}

/// Checks that for every `k` and partner labels `l ≠ l'` some group
/// element carries `φ_{kl'}` to `φ_{kl}`.
pub fn consistency_check(s: &AmalgamationSpec, cap: usize) -> ConsistencyReport {
    let groups = SpecGroups::new(s, cap);
    let group_orders = (1..=s.side_count()).map(|side| groups.side(side).elements.len()).collect();
    let mut witnesses = Vec::new();
    for k in s.all_labels() {
        let partners = s.partners(k);
        for &l in &partners {
            for &l2 in &partners {
                if l == l2 {
                    continue;
                }
                match consistency_element(s, &groups, k, l, l2) {
                    Some(element) => witnesses.push(ConsistencyWitness { k, l, l_prime: l2, element }),
                    None => {
                        let verdict = if groups.side(s.side_of_label(l)).complete {
                            ConsistencyVerdict::Inconsistent { k, l, l_prime: l2 }
                        } else {
                            ConsistencyVerdict::Inconclusive { k, l, l_prime: l2, cap }
                        };
                        return ConsistencyReport { verdict, witnesses, group_orders };
                    }
                }
            }
        }
    }
    ConsistencyReport {
        verdict: ConsistencyVerdict::Consistent,
        witnesses,
        group_orders,
    }
}

/// Requested value of `π` and `γ_k` at one index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub k: usize,
    pub k_prime: usize,
    pub element: Perm,
}

/// An isomorphism `(γ, π, (γ_k))` between two legally labelled stars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarIso {
    pub gamma: Perm,
    pub pi: BTreeMap<usize, usize>,
    pub gammas: BTreeMap<usize, Perm>,
}

/// `φ_{k,ℓ(k)} = γ_k ∘ φ_{π(k),ℓ'(π(k))} ∘ γ` on `S_k`.
fn star_equation(
    s: &AmalgamationSpec,
    k: usize,
    lk: usize,
    pk: usize,
    lpk: usize,
    gamma_k: &[usize],
    gamma: &[usize],
) -> bool {
    let (Some(a), Some(b)) = (s.bonding(k, lk), s.bonding(pk, lpk)) else {
        return false;
    };
    a.iter().all(|(&x, &y)| b.get(&gamma[x]).is_some_and(|&z| gamma_k[z] == y))
}

fn check_star(s: &AmalgamationSpec, side: u8, ell: &BTreeMap<usize, usize>, what: &str) -> Result<(), AmalgamError> {
    let labels = s.labels(side);
    if ell.len() != labels.len() || labels.iter().any(|k| !ell.contains_key(k)) {
        return Err(AmalgamError::InvalidStar(format!("{what} is not defined exactly on the index set of side {side}")));
    }
    for (&k, &l) in ell {
        if !s.partners(k).contains(&l) {
            return Err(AmalgamError::InvalidStar(format!("{what} sends {k} to {l}, which is not a legal reverse label")));
        }
    }
    Ok(())
}

/// Extends `γ` to an isomorphism of the stars `ell` and `ell2` centred at
/// `side`: take `(π, ℓ̄)` from [`respects_action`], then compose the
/// consistency elements carrying `φ_{k ℓ̄(k)}` to `φ_{k ℓ(k)}` and
/// `φ_{π(k) ℓ'(π(k))}` to `φ_{π(k) ℓ̄(k)}`. A pin `(k̃, k̃', γ̃)` is honoured by
/// swapping two values of `π`. The result is checked pointwise.
pub fn star_isomorphism(
    s: &AmalgamationSpec,
    groups: &SpecGroups,
    side: u8,
    ell: &BTreeMap<usize, usize>,
    ell2: &BTreeMap<usize, usize>,
    gamma: &[usize],
    pin: Option<&Pin>,
) -> Result<StarIso, AmalgamError> {
    check_star(s, side, ell, "first star")?;
    check_star(s, side, ell2, "second star")?;
    let (mut pi, bar) = match respects_action(s, gamma, side) {
        Respects::Respects { pi, ell } => (pi, ell),
        Respects::Fails { k } => return Err(AmalgamError::NotRespected { side, k }),
    };
    let missing = |k: usize, l: usize, l2: usize| {
        if groups.side(s.side_of_label(l)).complete {
            AmalgamError::Inconsistent { k, l, l_prime: l2 }
        } else {
            AmalgamError::Inconclusive(format!("group cap {} reached looking for ({k}, {l}, {l2})", groups.cap))
        }
    };
    let element = |k: usize, l: usize, l2: usize| -> Result<Perm, AmalgamError> {
        if l == l2 {
            return Ok(crate::action::identity(s.graph(s.side_of_label(l)).n()));
        }
        consistency_element(s, groups, k, l, l2).ok_or_else(|| missing(k, l, l2))
    };
    let mut gammas = BTreeMap::new();
    for &k in s.labels(side) {
        let pk = pi[&k];
        let g1 = element(k, ell[&k], bar[&k])?;
        let g2 = element(pk, bar[&k], ell2[&pk])?;
        gammas.insert(k, compose(&g1, &g2));
    }

    if let Some(pin) = pin {
        let (kt, kt2) = (pin.k, pin.k_prime);
        if !ell.contains_key(&kt) || !ell2.contains_key(&kt2) {
            return Err(AmalgamError::InvalidPin(format!("pin ({kt}, {kt2}) names labels outside the stars")));
        }
        if !star_equation(s, kt, ell[&kt], kt2, ell2[&kt2], &pin.element, gamma) {
            return Err(AmalgamError::InvalidPin(format!(
                "pinned element does not satisfy the star equation at ({kt}, {kt2})"
            )));
        }
        if pi[&kt] != kt2 {
            let kt3 = *pi.iter().find(|(_, &v)| v == kt2).unwrap().0;
            let g_kt = gammas[&kt].clone();
            let g_kt3 = gammas[&kt3].clone();
            let delta = compose(&g_kt3, &compose(&inverse(&pin.element), &g_kt));
            let pkt = pi[&kt];
            pi.insert(kt3, pkt);
            pi.insert(kt, kt2);
            gammas.insert(kt3, delta);
        }
        gammas.insert(kt, pin.element.clone());
    }

    for &k in s.labels(side) {
        let pk = pi[&k];
        if !star_equation(s, k, ell[&k], pk, ell2[&pk], &gammas[&k], gamma) {
            return Err(AmalgamError::Internal(format!("star equation fails at k = {k}")));
        }
    }
    Ok(StarIso {
        gamma: gamma.to_vec(),
        pi,
        gammas,
    })
}
