//! Tree amalgamations: specs, labelled tree patches, builds, and the
//! respects/consistency conditions that make builds labelling-independent.

mod build;
mod checks;
mod lift;
mod spec;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_amalgam, AmalgamGraph, ProvenanceJson};
pub use checks::{
    consistency_check, consistency_element, respects_action, star_isomorphism, ConsistencyReport,
    ConsistencyVerdict, ConsistencyWitness, Pin, Respects, SpecGroups, StarIso,
};
pub use lift::{lift, lifted_action, Lift};
pub use spec::{
    is_trivial, validate_spec, AmalgamationSpec, Bonding, SpecReport, SpecType, SpecViolation, TrivialVerdict,
};
pub use tree::{build_tree_patch, DirectedLabel, LabelledTreePatch};

use crate::error::GraphError;
use crate::iso::{boundary_tolerant_isomorphic, IsoOutcome};

/// Default cap on enumerated group elements.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("invalid spec:\n{0}")]
    InvalidSpec(SpecReport),
    #[error("the amalgamation does not respect the automorphism on side {side}: no image for index {k}")]
    NotRespected { side: u8, k: usize },
    #[error("bonding maps from {k} to {l} and {l_prime} are not consistent")]
    Inconsistent { k: usize, l: usize, l_prime: usize },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid star labelling: {0}")]
    InvalidStar(String),
    #[error("invalid pin: {0}")]
    InvalidPin(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RelabelVerdict {
    Isomorphic { depth: usize },
    NotIsomorphic { depth: usize, reason: String },
    Inconclusive { reason: String },
}

/// Checks that a spec respects every generator and has consistent
/// bondings. Returns a reason when it does not.
pub fn action_preconditions(s: &AmalgamationSpec, cap: usize) -> Result<(), String> {
    for side in 1..=s.side_count() {
        for (i, g) in s.action(side).generators.iter().enumerate() {
            if let Respects::Fails { k } = respects_action(s, g, side) {
                return Err(format!("generator {i} on side {side} is not respected (index {k})"));
            }
        }
    }
    match consistency_check(s, cap).verdict {
        ConsistencyVerdict::Consistent => Ok(()),
        ConsistencyVerdict::Inconsistent { k, l, l_prime } => {
            Err(format!("bondings inconsistent at (k={k}, l={l}, l'={l_prime})"))
        }
        ConsistencyVerdict::Inconclusive { k, l, l_prime, cap } => {
            Err(format!("group cap {cap} reached at (k={k}, l={l}, l'={l_prime})"))
        }
    }
}

/// Builds a spec under two seeds and compares the balls of radius
/// `radius − 1` around the roots.
pub fn relabel_invariance(
    s: &AmalgamationSpec,
    radius: usize,
    seed_a: u64,
    seed_b: u64,
    cap: usize,
) -> Result<RelabelVerdict, AmalgamError> {
    if let Err(reason) = action_preconditions(s, cap) {
        return Ok(RelabelVerdict::Inconclusive { reason });
    }
    let a = build_amalgam(s, radius, seed_a)?;
    let b = build_amalgam(s, radius, seed_b)?;
    let depth = radius.saturating_sub(1);
    Ok(match boundary_tolerant_isomorphic(&a.patch, &b.patch, depth)? {
        IsoOutcome::Isomorphic { .. } => RelabelVerdict::Isomorphic { depth },
        IsoOutcome::NotIsomorphic { reason } => RelabelVerdict::NotIsomorphic { depth, reason },
    })
}
