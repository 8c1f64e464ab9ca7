use amalgam_core::action::{LocalAction, PartialMap};
use amalgam_core::amalgam::*;
use amalgam_core::fixtures::*;
use amalgam_core::graph::FiniteGraph;
use amalgam_core::iso::{boundary_tolerant_isomorphic, Patch};
use amalgam_core::splitting::*;
use amalgam_core::treedecomp::TreeDecomposition;

fn edge_parts(n: usize) -> TreeDecomposition {
    TreeDecomposition::new(FiniteGraph::path(n - 1), (0..n - 1).map(|i| vec![i, i + 1]).collect()).unwrap()
}

fn shift(n: usize, by: usize) -> PartialMap {
    PartialMap {
        image: (0..n).map(|v| (v + by < n).then_some(v + by)).collect(),
    }
}

fn reflection(n: usize, centre2: usize) -> PartialMap {
    PartialMap {
        image: (0..n).map(|v| centre2.checked_sub(v).filter(|&w| w < n)).collect(),
    }
}

fn round_trip(s: &AmalgamationSpec, radius: usize) -> (Conversion, bool) {
    let b = build_amalgam(s, radius, 0).unwrap();
    let a = lifted_action(s, &b, DEFAULT_GROUP_CAP).unwrap();
    let conv = td_to_amalgamation(&b.patch, &a, &b.induced_td, None, DEFAULT_MAX_WORD).unwrap();
    let rebuilt = build_amalgam(&conv.spec, radius, 0).unwrap();
    let iso = boundary_tolerant_isomorphic(&b.patch, &rebuilt.patch, radius - 1).unwrap();
    (conv, iso.is_isomorphic())
}

#[test]
fn double_ray_round_trip_is_type_one() {
    let (conv, iso) = round_trip(&spec_double_ray(), 4);
    assert!(iso);
    assert_eq!(conv.spec.kind, SpecType::One);
    assert_eq!(conv.spec.adhesion_size(), 1);
    assert_eq!(conv.spec.g1.n(), 2);
}

#[test]
fn hnn_round_trip_is_type_two() {
    let (conv, iso) = round_trip(&spec_hnn(), 4);
    assert!(iso);
    assert_eq!(conv.spec.kind, SpecType::Two);
    assert!(conv.orientation.gamma_st.is_some());
}

#[test]
fn triangle_round_trip() {
    let (conv, iso) = round_trip(&spec_triangles(), 4);
    assert!(iso);
    assert_eq!(conv.spec.kind, SpecType::One);
    assert_eq!(conv.spec.g1.edge_count(), 3);
    assert!(consistency_check(&conv.spec, DEFAULT_GROUP_CAP).is_consistent());
}

#[test]
fn other_fixtures_round_trip() {
    for s in [spec_four_regular_tree(), spec_square_cactus()] {
        assert!(round_trip(&s, 4).1);
    }
}

#[test]
fn one_step_shift_gives_type_two() {
    let p = Patch::new(FiniteGraph::path(10), vec![0, 9], 4, 4);
    let td = edge_parts(10);
    let a = LocalAction {
        name: "shift".into(),
        maps: vec![shift(10, 1)],
    };
    let o = orient_edges(&p, &td, &a, (3, 2), DEFAULT_MAX_WORD).unwrap();
    assert_eq!(o.kind(), SpecType::Two);
    assert_eq!((o.k.len(), o.l.len()), (1, 1));
    assert!(!o.subgroup_reduced);
    let interior = amalgam_core::treedecomp::interior_edges(&p, &td);
    for &(x, y) in &interior {
        let pos = o.positive.contains(&(x, y));
        let neg = o.positive.contains(&(y, x));
        assert!(pos ^ neg, "edge ({x},{y})");
    }
    let conv = td_to_amalgamation(&p, &a, &td, None, DEFAULT_MAX_WORD).unwrap();
    assert_eq!(conv.spec.kind, SpecType::Two);
    let rebuilt = build_amalgam(&conv.spec, 4, 0).unwrap();
    assert!(boundary_tolerant_isomorphic(&p, &rebuilt.patch, 3).unwrap().is_isomorphic());
}

#[test]
fn inversion_triggers_subgroup() {
    let p = Patch::new(FiniteGraph::path(11), vec![0, 10], 5, 5);
    let td = edge_parts(11);
    let a = LocalAction {
        name: "shift and flip".into(),
        maps: vec![shift(11, 1), reflection(11, 10)],
    };
    let o = orient_edges(&p, &td, &a, (4, 3), 4).unwrap();
    assert!(o.subgroup_reduced);
    assert_eq!(o.kind(), SpecType::One);
    assert_eq!((o.k.len(), o.l.len()), (2, 2));
    for (x, y) in amalgam_core::treedecomp::interior_edges(&p, &td) {
        assert!(o.positive.contains(&(x, y)) ^ o.positive.contains(&(y, x)));
    }
}

#[test]
fn finite_decompositions_are_not_basic() {
    let trivial = LocalAction {
        name: "trivial".into(),
        maps: vec![],
    };
    let p4 = Patch::finite(FiniteGraph::path(4), 0);
    let one_edge = TreeDecomposition::new(FiniteGraph::path(2), vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
    assert!(matches!(orient_edges(&p4, &one_edge, &trivial, (0, 1), 3), Err(SplitError::NotBasic(_))));
    let c6 = Patch::finite(FiniteGraph::cycle(6), 0);
    let td = TreeDecomposition::new(FiniteGraph::path(2), vec![vec![0, 1, 2, 3], vec![3, 4, 5, 0]]).unwrap();
    assert!(matches!(td_to_amalgamation(&c6, &trivial, &td, None, 3), Err(SplitError::NotBasic(_))));
}

#[test]
fn stallings_on_double_ray() {
    let out = stallings_split_spec(&spec_double_ray(), 1, 4, 0, 100_000).unwrap();
    assert_eq!(out.spec().adhesion_size(), 1);
    assert!(!is_trivial(out.spec()).trivial);
    assert!(out.spec().g1.n() == 2);
}

#[test]
fn stallings_on_triangles() {
    let out = stallings_split_spec(&spec_triangles(), 1, 3, 0, 100_000).unwrap();
    let s = out.spec();
    assert_eq!(s.adhesion_size(), 1);
    for side in 1..=s.side_count() {
        let g = s.graph(side);
        assert_eq!((g.n(), g.edge_count()), (3, 3));
    }
}

#[test]
fn grid_has_no_split() {
    let g = FiniteGraph::grid(5, 5);
    let boundary: Vec<usize> = (0..25).filter(|&v| v % 5 == 0 || v % 5 == 4 || !(5..20).contains(&v)).collect();
    let p = Patch::new(g, boundary, 12, 2);
    let a = LocalAction {
        name: "trivial".into(),
        maps: vec![],
    };
    assert_eq!(stallings_split(&p, &a, 2, 100_000), Err(SplitError::NoSplit { k: 2, radius: 2 }));
}

#[test]
fn factorisations_end_in_finite_graphs() {
    for (s, factor) in [(spec_triangles(), 3), (spec_double_ray(), 2)] {
        let root = terminal_factorisation(&s, 1, 4, 3, 0, 100_000);
        assert_eq!(root.status, FactorStatus::SplitFurther, "{}", root.summary());
        assert!(root.height() <= 3);
        for leaf in root.leaves() {
            assert_eq!(leaf.status, FactorStatus::Finite);
            assert_eq!(leaf.graph.as_ref().unwrap().n(), factor);
        }
    }
}
