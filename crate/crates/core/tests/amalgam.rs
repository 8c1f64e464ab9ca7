use std::collections::BTreeMap;

use amalgam_core::action::{identity, Action};
use amalgam_core::amalgam::*;
use amalgam_core::fixtures::*;
use amalgam_core::graph::FiniteGraph;
use amalgam_core::treedecomp::{adhesion_subtree_diameters, verify_td};

const CAP: usize = DEFAULT_GROUP_CAP;

fn is_path(g: &FiniteGraph) -> bool {
    g.is_tree() && (0..g.n()).all(|v| g.degree(v) <= 2)
}

#[test]
fn shipped_specs_validate() {
    for (name, s) in all_specs() {
        let r = validate_spec(&s);
        assert!(r.is_valid(), "{name}: {r}");
    }
    assert!(validate_spec(&spec_double_ray_star()).is_valid());
}

#[test]
fn unequal_adhesion_sizes_are_reported() {
    let mut s = spec_double_ray();
    s.adhesions.insert(2, vec![0, 1]);
    let r = validate_spec(&s);
    assert!(r.violations.iter().any(|v| v.path == "/adhesions/2" && v.message.contains("cardinality")));
}

#[test]
fn missing_and_non_bijective_bondings() {
    let mut s = spec_double_ray();
    s.bondings.pop();
    assert!(validate_spec(&s).violations.iter().any(|v| v.message.contains("missing bonding for (2, 4)")));
    let mut s = spec_four_regular_tree();
    s.bondings[0].map = vec![(0, 3), (1, 3)];
    assert!(!validate_spec(&s).is_valid());
}

#[test]
fn inverse_direction_must_agree() {
    let mut s = spec_double_ray();
    s.bondings.push(Bonding { k: 3, l: 1, map: vec![(0, 0)] });
    assert!(validate_spec(&s).is_valid());
    s.bondings.push(Bonding { k: 4, l: 1, map: vec![(0, 0)] });
    assert!(!validate_spec(&s).is_valid());
}

#[test]
fn type_two_needs_proper_j() {
    let mut s = spec_hnn();
    s.j = vec![1, 2];
    assert!(validate_spec(&s).violations.iter().any(|v| v.path == "/j"));
}

#[test]
fn non_automorphic_action_is_reported() {
    let mut s = spec_triangles();
    s.g1 = FiniteGraph::path(3);
    assert!(validate_spec(&s).violations.iter().any(|v| v.path.starts_with("/actions/0")));
}

#[test]
fn spec_json_round_trip() {
    for (_, s) in all_specs() {
        let text = serde_json::to_string(&s).unwrap();
        let back: AmalgamationSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
    let bad = r#"{"type":3,"g1":{"n":1,"edges":[]},"i1":[],"adhesions":{},"bondings":[]}"#;
    assert!(serde_json::from_str::<AmalgamationSpec>(bad).is_err());
}

#[test]
fn tree_patch_shapes() {
    let dr = build_tree_patch(&spec_double_ray(), 3, 0);
    assert_eq!(dr.node_count(), 7);
    assert!(is_path(&dr.tree));
    let tri = build_tree_patch(&spec_triangles(), 1, 0);
    assert_eq!(tri.node_count(), 4);
    assert_eq!(tri.tree.degree(0), 3);
    for (_, s) in all_specs() {
        assert_eq!(build_tree_patch(&s, 0, 7).node_count(), 1);
    }
}

#[test]
fn tree_patch_labels_are_legal() {
    for (name, s) in all_specs() {
        for seed in 0..4 {
            let t = build_tree_patch(&s, 3, seed);
            assert_eq!(t.side[0], 1);
            for v in 0..t.node_count() {
                let mut out: Vec<usize> = t.out[v].iter().map(|p| p.0).collect();
                out.sort_unstable();
                if !t.is_leaf(v) {
                    assert_eq!(out, s.labels(t.side[v]), "{name}: node {v}");
                }
                for &(k, w) in &t.out[v] {
                    let back = t.label(w, v).unwrap();
                    assert!(s.partners(k).contains(&back), "{name}: edge {v}->{w}");
                }
            }
        }
    }
}

#[test]
fn double_ray_build_is_a_path() {
    let b = build_amalgam(&spec_double_ray(), 3, 0).unwrap();
    assert_eq!(b.graph().n(), 8);
    assert!(is_path(b.graph()));
    for (class, &len) in b.provenance.iter().zip(&b.ident_lengths) {
        assert_eq!(len, usize::from(class.len() > 1));
    }
    assert_eq!(b.patch.boundary.len(), 2);
    assert_eq!(b.patch.inner_radius, 2);
}

#[test]
fn triangle_star_has_nine_vertices() {
    let b = build_amalgam(&spec_triangles(), 1, 0).unwrap();
    assert_eq!(b.graph().n(), 9);
    assert_eq!(b.graph().edge_count(), 12);
    assert_eq!(b.collapsed_loops + b.collapsed_parallels, 0);
}

#[test]
fn hnn_and_tree_builds() {
    let b = build_amalgam(&spec_hnn(), 3, 0).unwrap();
    assert!(is_path(b.graph()));
    assert_eq!(b.graph().n(), 8);
    let t = build_amalgam(&spec_four_regular_tree(), 2, 0).unwrap();
    assert!(t.graph().is_tree());
    let root = t.patch.root;
    assert_eq!(t.graph().degree(root), 4);
}

#[test]
fn induced_decompositions_are_valid() {
    for (name, s) in all_specs() {
        for r in 0..=4 {
            let b = build_amalgam(&s, r, 1).unwrap();
            let report = verify_td(b.graph(), &b.induced_td).unwrap();
            assert!(report.is_valid(), "{name} R={r}: {:?}", report.violations);
            assert!(!b.long_identification);
            assert!(adhesion_subtree_diameters(&b.induced_td).iter().all(|d| d.diameter <= 2));
        }
    }
}

#[test]
fn provenance_json_shape() {
    let b = build_amalgam(&spec_double_ray(), 1, 0).unwrap();
    let text = serde_json::to_string(&b.provenance_json()).unwrap();
    assert!(text.starts_with("{\"0\":[[0,0]"));
}

#[test]
fn triviality() {
    assert!(!is_trivial(&spec_double_ray()).trivial);
    assert!(!is_trivial(&spec_hnn()).trivial);
    let s = AmalgamationSpec {
        kind: SpecType::One,
        g1: FiniteGraph::complete(2),
        g2: Some(FiniteGraph::path(3)),
        i1: vec![1],
        i2: vec![2, 3],
        j: vec![],
        adhesions: BTreeMap::from([(1, vec![0, 1]), (2, vec![0, 1]), (3, vec![1, 2])]),
        bondings: vec![
            Bonding { k: 1, l: 2, map: vec![(0, 0), (1, 1)] },
            Bonding { k: 1, l: 3, map: vec![(0, 1), (1, 2)] },
        ],
        actions: vec![],
    };
    assert!(validate_spec(&s).is_valid());
    assert_eq!(is_trivial(&s), TrivialVerdict { trivial: true, side: Some(1) });
}

#[test]
fn swap_is_respected_with_transposition() {
    let s = spec_double_ray();
    let Respects::Respects { pi, .. } = respects_action(&s, &[1, 0], 1) else {
        panic!("swap must be respected")
    };
    assert_eq!(pi, BTreeMap::from([(1, 2), (2, 1)]));
    for (_, s) in all_specs() {
        for side in 1..=s.side_count() {
            let Respects::Respects { pi, .. } = respects_action(&s, &identity(s.graph(side).n()), side) else {
                panic!("identity is always respected")
            };
            assert!(pi.iter().all(|(k, v)| k == v));
        }
    }
}

#[test]
fn moving_an_adhesion_set_off_fails() {
    let mut s = spec_double_ray();
    s.g1 = FiniteGraph::path(3);
    s.adhesions.insert(1, vec![0]);
    s.adhesions.insert(2, vec![1]);
    s.bondings = vec![
        Bonding { k: 1, l: 3, map: vec![(0, 0)] },
        Bonding { k: 1, l: 4, map: vec![(0, 1)] },
        Bonding { k: 2, l: 3, map: vec![(1, 0)] },
        Bonding { k: 2, l: 4, map: vec![(1, 1)] },
    ];
    s.actions[0] = Action::new("flip", vec![vec![2, 1, 0]]);
    assert!(validate_spec(&s).is_valid());
    assert_eq!(respects_action(&s, &[2, 1, 0], 1), Respects::Fails { k: 1 });
}

#[test]
fn consistency_cases() {
    assert!(consistency_check(&spec_double_ray(), CAP).is_consistent());
    let mut s = spec_double_ray();
    s.actions[1] = Action::trivial("none");
    assert_eq!(
        consistency_check(&s, CAP).verdict,
        ConsistencyVerdict::Inconsistent { k: 1, l: 3, l_prime: 4 }
    );
    let mut single = spec_double_ray();
    single.i2 = vec![3];
    single.adhesions.remove(&4);
    single.bondings.retain(|b| b.l == 3);
    single.actions = vec![];
    assert!(validate_spec(&single).is_valid());
    let r = consistency_check(&single, CAP);
    assert!(r.verdict != ConsistencyVerdict::Inconsistent { k: 1, l: 3, l_prime: 3 });
    for (name, s) in all_specs() {
        assert!(consistency_check(&s, CAP).is_consistent(), "{name}");
    }
}

#[test]
fn consistency_cap_is_inconclusive() {
    let mut s = spec_triangles();
    s.actions[1] = Action::new("rotation", vec![vec![1, 2, 0]]);
    let r = consistency_check(&s, 1);
    assert!(matches!(r.verdict, ConsistencyVerdict::Inconclusive { .. }));
}

#[test]
fn equal_stars_map_identically() {
    let s = spec_double_ray();
    let groups = SpecGroups::new(&s, CAP);
    let ell = BTreeMap::from([(1, 3), (2, 4)]);
    let iso = star_isomorphism(&s, &groups, 1, &ell, &ell, &[0, 1], None).unwrap();
    assert!(iso.pi.iter().all(|(k, v)| k == v));
    assert!(iso.gammas.values().all(|g| g == &vec![0, 1]));
}

#[test]
fn swapped_stars_use_swaps() {
    let s = spec_double_ray();
    let groups = SpecGroups::new(&s, CAP);
    let ell = BTreeMap::from([(1, 3), (2, 4)]);
    let ell2 = BTreeMap::from([(1, 4), (2, 3)]);
    let iso = star_isomorphism(&s, &groups, 1, &ell, &ell2, &[0, 1], None).unwrap();
    assert_eq!(iso.pi, BTreeMap::from([(1, 1), (2, 2)]));
    assert!(iso.gammas.values().all(|g| g == &vec![1, 0]));
}

#[test]
fn pinned_star_moves_pi() {
    let s = spec_double_ray_star();
    let groups = SpecGroups::new(&s, CAP);
    let ell = BTreeMap::from([(1, 3), (2, 4)]);
    let ell2 = BTreeMap::from([(1, 4), (2, 3)]);
    let pin = Pin { k: 1, k_prime: 2, element: vec![0, 1] };
    let iso = star_isomorphism(&s, &groups, 1, &ell, &ell2, &[0], Some(&pin)).unwrap();
    assert_eq!(iso.pi[&1], 2);
    assert_eq!(iso.pi[&2], 1);
    assert_eq!(iso.gammas[&1], vec![0, 1]);
    assert_eq!(iso.gammas[&2], vec![0, 1]);
}

#[test]
fn pin_violating_the_star_equation_is_rejected() {
    let s = spec_double_ray_star();
    let groups = SpecGroups::new(&s, CAP);
    let ell = BTreeMap::from([(1, 3), (2, 4)]);
    let ell2 = BTreeMap::from([(1, 4), (2, 3)]);
    let pin = Pin { k: 1, k_prime: 1, element: vec![0, 1] };
    assert!(matches!(
        star_isomorphism(&s, &groups, 1, &ell, &ell2, &[0], Some(&pin)),
        Err(AmalgamError::InvalidPin(_))
    ));
}

#[test]
fn illegal_star_is_rejected() {
    let s = spec_hnn();
    let groups = SpecGroups::new(&s, CAP);
    let legal = BTreeMap::from([(1, 2), (2, 1)]);
    let illegal = BTreeMap::from([(1, 1), (2, 1)]);
    assert!(star_isomorphism(&s, &groups, 1, &legal, &legal, &[0, 1], None).is_ok());
    assert!(matches!(
        star_isomorphism(&s, &groups, 1, &illegal, &legal, &[0, 1], None),
        Err(AmalgamError::InvalidStar(_))
    ));
}

#[test]
fn relabelled_builds_agree() {
    let dr = relabel_invariance(&spec_double_ray(), 3, 0, 1, CAP).unwrap();
    assert_eq!(dr, RelabelVerdict::Isomorphic { depth: 2 });
    let tri = relabel_invariance(&spec_triangles(), 2, 0, 1, CAP).unwrap();
    assert_eq!(tri, RelabelVerdict::Isomorphic { depth: 1 });
    let mut s = spec_double_ray();
    s.actions[1] = Action::trivial("none");
    let RelabelVerdict::Inconclusive { reason } = relabel_invariance(&s, 3, 0, 1, CAP).unwrap() else {
        panic!("inconsistent spec must be inconclusive")
    };
    assert!(reason.contains("k=1, l=3, l'=4"));
}

#[test]
fn lifts_between_seeds_are_partial_isomorphisms() {
    for (name, s) in all_specs() {
        let groups = SpecGroups::new(&s, CAP);
        let a = build_amalgam(&s, 3, 0).unwrap();
        let b = build_amalgam(&s, 3, 5).unwrap();
        let l = lift(&s, &groups, &a, &b, 0, 0, identity(s.g1.n())).unwrap();
        let m = &l.vertex_map;
        assert_eq!(m.apply(a.patch.root), Some(b.patch.root), "{name}");
        for u in 0..a.graph().n() {
            for v in 0..a.graph().n() {
                if let (Some(x), Some(y)) = (m.apply(u), m.apply(v)) {
                    assert_eq!(a.graph().has_edge(u, v), b.graph().has_edge(x, y), "{name}: ({u},{v})");
                }
            }
        }
        let ball = a.graph().ball(a.patch.root, 1);
        assert!(m.is_defined_on(&ball), "{name}: lift misses the root ball");
    }
}

#[test]
fn lifted_action_is_transitive_on_root_copies() {
    let s = spec_double_ray();
    let b = build_amalgam(&s, 4, 0).unwrap();
    let a = lifted_action(&s, &b, CAP).unwrap();
    a.validate(b.graph()).unwrap();
    let orbits = a.orbits(b.graph().n());
    let root_orbit = orbits.orbit_of(b.patch.root);
    assert!(root_orbit.len() >= 6, "orbit {root_orbit:?}");
}
