use neatgames_core::corpus::random_ca3_frames;
use neatgames_core::fullset::{build_full_set_structure, index_of_map};
use neatgames_core::hints::root_cone_atoms;
use neatgames_core::network::{
    apply_node_map, complete_network, graph_to_network, is_valid_network, network_to_graph, seed_networks, NodeMap,
};
use neatgames_core::{CaAtomStructure, Network, RainbowFrame, RainbowSignature};
use std::collections::BTreeMap;

fn f33() -> CaAtomStructure {
    CaAtomStructure::from(build_full_set_structure(3, 3).unwrap())
}

fn atom(u: &[usize]) -> u64 {
    index_of_map(3, u) as u64
}

#[test]
fn single_node_networks() {
    let s = f33();
    assert!(is_valid_network(&s, &Network::from_labels(3, 1, vec![atom(&[0, 0, 0])])));
    assert!(!is_valid_network(&s, &Network::from_labels(3, 1, vec![atom(&[0, 1, 0])])));
}

#[test]
fn completions_respect_constraints() {
    let s = f33();
    let bad = BTreeMap::from([(vec![0, 0, 1], atom(&[0, 1, 2]))]);
    assert!(complete_network(&s, 2, &bad).is_empty());
    let fixed = BTreeMap::from([(vec![0, 1, 2], atom(&[0, 1, 2]))]);
    let all = complete_network(&s, 3, &fixed);
    assert_eq!(all.len(), 1);
    assert!(is_valid_network(&s, &all[0]));
}

#[test]
fn one_node_completions_are_the_point_atoms() {
    for s in random_ca3_frames(3, 10, 6).into_iter().chain([f33()]) {
        let points = s
            .atoms()
            .into_iter()
            .filter(|&a| s.in_diag(a, 0, 1) && s.in_diag(a, 0, 2) && s.in_diag(a, 1, 2))
            .count();
        assert_eq!(complete_network(&s, 1, &BTreeMap::new()).len(), points);
    }
}

#[test]
fn node_maps() {
    let s = f33();
    let fixed = BTreeMap::from([(vec![0, 1, 2], atom(&[0, 1, 2]))]);
    let n = complete_network(&s, 3, &fixed).remove(0);
    assert_eq!(apply_node_map(&n, &NodeMap::identity(3)), n);
    let collapse = NodeMap {
        map: BTreeMap::from([(0, 0), (1, 1), (2, 1)]),
    };
    let m = apply_node_map(&n, &collapse);
    assert_eq!(m.size(), 2);
    assert!(is_valid_network(&s, &m));
    let empty = apply_node_map(&n, &NodeMap { map: BTreeMap::new() });
    assert_eq!(empty.size(), 0);
    assert!(is_valid_network(&s, &empty));
}

#[test]
fn rainbow_networks_and_graphs() {
    let s = CaAtomStructure::from(RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).unwrap());
    let r = s.as_rainbow().unwrap();
    for a in root_cone_atoms(r).into_iter().take(3) {
        let seeds = seed_networks(&s, a);
        assert_eq!(seeds.len(), 1);
        let n = &seeds[0];
        assert!(is_valid_network(&s, n));
        let g = network_to_graph(r, n).unwrap();
        assert_eq!(&graph_to_network(&g, &s).unwrap(), n);
    }
    // the fully identified atom is a single point
    let point = *r.atom_list().iter().find(|&&a| r.kernel_of(a) == Some(&[0, 0, 0][..])).unwrap();
    let seeds = seed_networks(&s, point);
    assert_eq!(seeds[0].size(), 1);
}
