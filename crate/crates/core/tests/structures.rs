use neatgames_core::budget::Budget;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::graph::{chromatic_number, SimpleGraph};
use neatgames_core::ra::{basic_matrices, index_blur, validate_ra_frame, BlurParams, RaAtomStructure};
use neatgames_core::rainbow::Colour;
use neatgames_core::split::{split_reds, theta_check};
use neatgames_core::{validate_ca_frame, CaAtomStructure, RainbowFrame, RainbowSignature};
use std::collections::BTreeSet;

#[test]
fn degenerate_and_full_set_frames_validate() {
    let one = build_full_set_structure(3, 1).unwrap();
    assert_eq!(one.len(), 1);
    for i in 0..3 {
        assert_eq!(one.cyl_pairs(i), vec![(0, 0)]);
    }
    assert!(validate_ca_frame(&CaAtomStructure::from(one)).is_valid());

    let f33 = build_full_set_structure(3, 3).unwrap();
    assert_eq!(f33.len(), 27);
    assert_eq!(f33.diag_members(0, 1).len(), 9);
    assert!(validate_ca_frame(&CaAtomStructure::from(f33)).is_valid());

    let f44 = build_full_set_structure(4, 4).unwrap();
    assert_eq!(f44.len(), 256);
    assert!(validate_ca_frame(&CaAtomStructure::from(f44)).is_valid());
}

#[test]
fn broken_transitivity_is_reported() {
    let f33 = build_full_set_structure(3, 3).unwrap();
    let (a, b) = *f33.cyl_pairs(0).iter().find(|(a, b)| a != b).unwrap();
    let rel: Vec<(usize, usize)> = f33
        .cyl_pairs(0)
        .into_iter()
        .filter(|&p| p != (a, b) && p != (b, a))
        .collect();
    let rep = validate_ca_frame(&CaAtomStructure::from(f33.with_cyl_pairs(0, &rel)));
    assert!(rep.mentions("c0 idempotence/transitivity"), "{rep}");
}

#[test]
fn pea43_palette() {
    let r = RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).unwrap();
    let names: BTreeSet<String> = r.palette().iter().map(|&c| r.colour_name(c)).collect();
    // edges are directed, so each red r_ij comes with its reverse r_ji
    let want: BTreeSet<String> = ["g1", "g0^1", "g0^2", "g0^3", "g0^4", "w0", "w1", "r01", "r02", "r12"]
        .into_iter()
        .chain(["r10", "r20", "r21"])
        .map(String::from)
        .collect();
    assert_eq!(names, want);
    let g = |s: &str| r.parse_colour(s).unwrap();
    assert!(r.triangle_is_forbidden(g("g0^1"), g("g0^2"), g("w0")));
    assert!(r.triangle_is_forbidden(g("g0^1"), g("g0^2"), g("g1")));
    assert!(!r.triangle_is_forbidden(g("g0^1"), g("g0^2"), g("r01")));
    // the point atom: all positions identified
    let point = r.atom_list().iter().filter(|&&a| r.kernel_of(a) == Some(&[0, 0, 0][..])).count();
    assert_eq!(point, 1);
    assert!(r.palette().iter().any(|c| matches!(c, Colour::Red { .. })));
}

#[test]
fn split_copies_follow_red_edges() {
    let base = RainbowFrame::new(RainbowSignature::pea(3, 2, 2)).unwrap();
    let split = split_reds(&base, 2).unwrap();
    let project = split.projector(&base).unwrap();
    for &a in base.atom_list() {
        let copies = split.atom_list().iter().filter(|&&b| project(b) == a).count();
        let reds = base.red_edge_count(a).unwrap();
        assert_eq!(copies, 2usize.pow(reds as u32), "{}", base.atom_name(a));
    }
    let same = split_reds(&base, 1).unwrap();
    assert_eq!(same.atom_list(), base.atom_list());
    let rep = theta_check(&base, &same).unwrap();
    assert!(rep.holds());
    assert_eq!(rep.split_atoms, rep.base_atoms);
}

#[test]
fn monk_structures() {
    let edge = RaAtomStructure::monk(&SimpleGraph::builtin("edge").unwrap(), 3);
    assert_eq!(edge.len(), 7);
    let (u0, v0) = (edge.index_of("(0,0)").unwrap(), edge.index_of("(1,0)").unwrap());
    assert!(edge.consistent(u0, v0, u0));
    assert!(!edge.consistent(u0, u0, u0));
    let tri = RaAtomStructure::monk(&SimpleGraph::builtin("two-triangles").unwrap(), 3);
    for ra in [&edge, &tri] {
        assert!(validate_ra_frame(ra).is_valid());
        for a in 0..ra.len() {
            assert!(ra.consistent(0, a, a));
        }
    }
}

#[test]
fn trivial_ra_matrices() {
    let ra = RaAtomStructure::from_table(vec!["Id".into()], &[0], vec![0], [(0, 0, 0)]).unwrap();
    assert!(validate_ra_frame(&ra).is_valid());
    let bm = basic_matrices(&ra, 3).unwrap();
    assert_eq!(bm.matrices, vec![vec![0; 9]]);
    assert!(bm.cylindric_basis);
}

#[test]
fn non_amalgamable_pattern_breaks_the_matrices() {
    // three diversity atoms and no diversity triples: a1;a1 = Id but a1;a2 = 0
    let names = ["Id", "a1", "a2", "a3"].map(String::from).to_vec();
    let mut triples = Vec::new();
    for x in 0..4 {
        triples.extend([(0, x, x), (x, 0, x), (x, x, 0)]);
    }
    let ra = RaAtomStructure::from_table(names, &[0], vec![0, 1, 2, 3], triples).unwrap();
    assert!(validate_ra_frame(&ra).mentions("associativity"));
    let bm = basic_matrices(&ra, 3).unwrap();
    assert!(!bm.cylindric_basis);
    assert!(bm.report.mentions("c0c1 commutativity"), "{}", bm.report);
}

#[test]
fn monk_matrices_form_a_cylindric_basis() {
    let ra = RaAtomStructure::monk(&SimpleGraph::builtin("edge").unwrap(), 3);
    let bm = basic_matrices(&ra, 3).unwrap();
    assert!(!bm.matrices.is_empty());
    assert!(bm.cylindric_basis);
}

#[test]
fn index_blur_examples() {
    assert!(index_blur(0, 1, 2));
    assert!(index_blur(2, 0, 1));
    assert!(index_blur(0, 0, 0));
    assert!(!index_blur(0, 1, 3));
    assert!(!index_blur(0, 0, 1));
}

#[test]
fn blur_structure() {
    let p = BlurParams { l: 2, i_size: 6, rows: 3 };
    let ra = RaAtomStructure::blur(&p, false).unwrap();
    assert_eq!(ra.len(), 1 + 3 * 15 * 2);
    assert!(validate_ra_frame(&ra).is_valid());
    for a in 0..ra.len() {
        assert!(ra.consistent(0, a, a));
    }
    // a row-0 atom with itself three times: E(0,0,0) holds but P is a single block
    let a = (1..ra.len()).find(|&a| ra.name(a).starts_with("a0[")).unwrap();
    assert!(!ra.consistent(a, a, a));
}

#[test]
fn chromatic_numbers() {
    let b = Budget::unlimited();
    assert_eq!(chromatic_number(&SimpleGraph::complete(3), &b).unwrap(), 3);
    let two_k4 = SimpleGraph::complete(4).disjoint_union(&SimpleGraph::complete(4));
    assert_eq!(chromatic_number(&two_k4, &b).unwrap(), 4);
    assert_eq!(chromatic_number(&SimpleGraph::cycle(5), &b).unwrap(), 3);
    assert_eq!(chromatic_number(&SimpleGraph::builtin("petersen").unwrap(), &b).unwrap(), 3);
    assert_eq!(chromatic_number(&SimpleGraph::empty(4), &b).unwrap(), 1);
}
