use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::action::{check_automorphism, Action, AutomorphismCheck};
use crate::graph::FiniteGraph;

/// Type 1 amalgamates two factors, Type 2 amalgamates one graph with itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SpecType {
    One,
    Two,
}

impl TryFrom<u8> for SpecType {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(SpecType::One),
            2 => Ok(SpecType::Two),
            _ => Err(format!("type must be 1 or 2, got {v}")),
        }
    }
}

impl From<SpecType> for u8 {
    fn from(t: SpecType) -> u8 {
        match t {
            SpecType::One => 1,
            SpecType::Two => 2,
        }
    }
}

/// Bijection `φ_{kl}` between adhesion sets, as `(x, φ(x))` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bonding {
    pub k: usize,
    pub l: usize,
    pub map: Vec<(usize, usize)>,
}

/// Data of a tree amalgamation.
///
/// Type 1 uses `g1`/`g2`, index sets `i1`/`i2` and actions `[Γ1, Γ2]`.
/// Type 2 uses only `g1`, the index set `i1` with distinguished subset `j`,
/// and a single action. Labels are global: an adhesion set is looked up
/// by its label alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmalgamationSpec {
    #[serde(rename = "type")]
    pub kind: SpecType,
    pub g1: FiniteGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<FiniteGraph>,
    pub i1: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub i2: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub j: Vec<usize>,
    pub adhesions: BTreeMap<usize, Vec<usize>>,
    pub bondings: Vec<Bonding>,
    #[serde(default)]
    pub actions: Vec<Action>,
}

/// One problem found by [`validate_spec`], located by a JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecViolation {
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecReport {
    pub violations: Vec<SpecViolation>,
}

impl SpecReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(SpecViolation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl std::fmt::Display for SpecReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

impl AmalgamationSpec {
    /// Sides are 1 and 2; Type 2 only has side 1.
    pub fn graph(&self, side: u8) -> &FiniteGraph {
        match (self.kind, side) {
            (SpecType::One, 2) => self.g2.as_ref().expect("type 1 spec has g2"),
            _ => &self.g1,
        }
    }

    pub fn labels(&self, side: u8) -> &[usize] {
        match (self.kind, side) {
            (SpecType::One, 2) => &self.i2,
            _ => &self.i1,
        }
    }

    pub fn side_count(&self) -> u8 {
        match self.kind {
            SpecType::One => 2,
            SpecType::Two => 1,
        }
    }

    /// Side of the tree node at the head of an edge leaving a side-`side` node.
    pub fn other_side(&self, side: u8) -> u8 {
        match self.kind {
            SpecType::One => 3 - side,
            SpecType::Two => 1,
        }
    }

    pub fn side_of_label(&self, k: usize) -> u8 {
        if self.kind == SpecType::One && self.i2.contains(&k) {
            2
        } else {
            1
        }
    }

    pub fn in_j(&self, k: usize) -> bool {
        self.j.contains(&k)
    }

    /// Labels allowed on the reverse of an edge labelled `k`.
    pub fn partners(&self, k: usize) -> Vec<usize> {
        match self.kind {
            SpecType::One => {
                if self.i1.contains(&k) {
                    self.i2.clone()
                } else {
                    self.i1.clone()
                }
            }
            SpecType::Two => {
                let want = !self.in_j(k);
                self.i1.iter().copied().filter(|&l| self.in_j(l) == want).collect()
            }
        }
    }

    /// Whether `(k, l)` is the stored direction of a bonding pair.
    pub fn is_canonical_pair(&self, k: usize, l: usize) -> bool {
        match self.kind {
            SpecType::One => self.i1.contains(&k) && self.i2.contains(&l),
            SpecType::Two => self.in_j(k) && !self.in_j(l) && self.i1.contains(&l),
        }
    }

    /// Every ordered pair for which a bonding map must exist, canonical first.
    pub fn required_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &k in &self.i1 {
            for l in self.partners(k) {
                if self.is_canonical_pair(k, l) {
                    out.push((k, l));
                }
            }
        }
        out
    }

    pub fn adhesion(&self, k: usize) -> &[usize] {
        self.adhesions.get(&k).map_or(&[], Vec::as_slice)
    }

    pub fn adhesion_size(&self) -> usize {
        self.adhesions.values().next().map_or(0, Vec::len)
    }

    /// `φ_{kl}` as a map on vertex IDs, deriving inverses as needed.
    pub fn bonding(&self, k: usize, l: usize) -> Option<BTreeMap<usize, usize>> {
        if let Some(b) = self.bondings.iter().find(|b| b.k == k && b.l == l) {
            return Some(b.map.iter().copied().collect());
        }
        self.bondings
            .iter()
            .find(|b| b.k == l && b.l == k)
            .map(|b| b.map.iter().map(|&(x, y)| (y, x)).collect())
    }

    pub fn action(&self, side: u8) -> Action {
        let idx = match self.kind {
            SpecType::One => usize::from(side - 1),
            SpecType::Two => 0,
        };
        self.actions.get(idx).cloned().unwrap_or_else(|| Action::trivial(format!("trivial-{side}")))
    }

    pub fn all_labels(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.i1.iter().chain(&self.i2).copied().collect();
        v.sort_unstable();
        v
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Checks every structural invariant of a spec: index sets, equal adhesion
/// cardinalities, bijective bondings covering all required pairs, inverse
/// pairing, the Type 2 split of `I` by `J`, and the actions.
pub fn validate_spec(s: &AmalgamationSpec) -> SpecReport {
    let mut r = SpecReport::default();
    match s.kind {
        SpecType::One => {
            if s.g2.is_none() {
                r.push("/g2", "type 1 spec needs a second factor");
                return r;
            }
            if !s.j.is_empty() {
                r.push("/j", "only type 2 specs carry J");
            }
            if s.i1.is_empty() {
                r.push("/i1", "index set is empty");
            }
            if s.i2.is_empty() {
                r.push("/i2", "index set is empty");
            }
            for k in &s.i1 {
                if s.i2.contains(k) {
                    r.push("/i2", format!("label {k} occurs in both index sets"));
                }
            }
        }
        SpecType::Two => {
            if s.g2.is_some() {
                r.push("/g2", "type 2 spec has a single factor");
            }
            if !s.i2.is_empty() {
                r.push("/i2", "type 2 spec has a single index set");
            }
            for (n, k) in s.j.iter().enumerate() {
                if !s.i1.contains(k) {
                    r.push(format!("/j/{n}"), format!("label {k} is not in I"));
                }
            }
            if s.j.is_empty() || s.i1.iter().all(|k| s.in_j(*k)) {
                r.push("/j", "J and its complement in I must both be non-empty");
            }
        }
    }
    for (name, set) in [("i1", &s.i1), ("i2", &s.i2), ("j", &s.j)] {
        if set.iter().collect::<BTreeSet<_>>().len() != set.len() {
            r.push(format!("/{name}"), "repeated label");
        }
    }
    if !r.is_valid() {
        return r;
    }

    let labels = s.all_labels();
    for k in s.adhesions.keys() {
        if !labels.contains(k) {
            r.push(format!("/adhesions/{k}"), "adhesion set for an unknown label");
        }
    }
    let mut size = None;
    for &k in &labels {
        let Some(set) = s.adhesions.get(&k) else {
            r.push(format!("/adhesions/{k}"), "missing adhesion set");
            continue;
        };
        let n = s.graph(s.side_of_label(k)).n();
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            r.push(format!("/adhesions/{k}"), format!("vertex {v} out of range for a factor on {n} vertices"));
        }
        if sorted(set).windows(2).any(|w| w[0] == w[1]) {
            r.push(format!("/adhesions/{k}"), "repeated vertex");
        }
        match size {
            None => size = Some(set.len()),
            Some(sz) if sz != set.len() => r.push(
                format!("/adhesions/{k}"),
                format!("cardinality {} differs from {sz}", set.len()),
            ),
            _ => {}
        }
    }
    if !r.is_valid() {
        return r;
    }

    let required = s.required_pairs();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (n, b) in s.bondings.iter().enumerate() {
        let path = format!("/bondings/{n}");
        let canonical = s.is_canonical_pair(b.k, b.l);
        if !canonical && !s.is_canonical_pair(b.l, b.k) {
            r.push(&path, format!("({}, {}) is not a bondable label pair", b.k, b.l));
            continue;
        }
        let key = if canonical { (b.k, b.l) } else { (b.l, b.k) };
        let dom = sorted(&b.map.iter().map(|p| p.0).collect::<Vec<_>>());
        let img = sorted(&b.map.iter().map(|p| p.1).collect::<Vec<_>>());
        if dom != sorted(s.adhesion(b.k)) {
            r.push(format!("{path}/map"), format!("domain is not the adhesion set of {}", b.k));
        }
        if img != sorted(s.adhesion(b.l)) {
            r.push(format!("{path}/map"), format!("not a bijection onto the adhesion set of {}", b.l));
        }
        if let Some(&first) = seen.get(&key) {
            let here: BTreeMap<usize, usize> = if canonical {
                b.map.iter().copied().collect()
            } else {
                b.map.iter().map(|&(x, y)| (y, x)).collect()
            };
            let there = &s.bondings[first];
            let there: BTreeMap<usize, usize> = if there.k == key.0 {
                there.map.iter().copied().collect()
            } else {
                there.map.iter().map(|&(x, y)| (y, x)).collect()
            };
            if here != there {
                r.push(&path, format!("inverse of bonding {first} expected"));
            }
        } else {
            seen.insert(key, n);
        }
    }
    for (k, l) in required {
        if !seen.contains_key(&(k, l)) {
            r.push("/bondings", format!("missing bonding for ({k}, {l})"));
        }
    }

    let expected_actions = usize::from(s.side_count());
    if s.actions.len() > expected_actions {
        r.push("/actions", format!("at most {expected_actions} actions expected"));
    }
    for (n, a) in s.actions.iter().enumerate().take(expected_actions) {
        let g = s.graph(n as u8 + 1);
        for (gi, p) in a.generators.iter().enumerate() {
            let path = format!("/actions/{n}/generators/{gi}");
            match check_automorphism(g, p) {
                Ok(AutomorphismCheck::Pass) => {}
                Ok(AutomorphismCheck::Fail(w)) => r.push(path, w.to_string()),
                Err(e) => r.push(path, e.to_string()),
            }
        }
    }
    r
}

/// The sufficient triviality criterion: some factor has a single index
/// whose adhesion set is the whole factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialVerdict {
    pub trivial: bool,
    pub side: Option<u8>,
}

pub fn is_trivial(s: &AmalgamationSpec) -> TrivialVerdict {
    let side = (1..=s.side_count()).find(|&side| {
        let labels = s.labels(side);
        labels.len() == 1 && s.adhesion(labels[0]).len() == s.graph(side).n()
    });
    TrivialVerdict {
        trivial: side.is_some(),
        side,
    }
}
