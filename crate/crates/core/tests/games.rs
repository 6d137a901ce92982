use neatgames_core::budget::Budget;
use neatgames_core::canon::canonical_form;
use neatgames_core::corpus::random_ca3_frames;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::games::{
    forall_cert_from_policy, legal_demands, solve_game_with_budget, verify_strategy, GameSpec, Rounds, StrategyCert,
    Variant, Winner,
};
use neatgames_core::graph::{ef_pebble_game, SimpleGraph};
use neatgames_core::hints::{face_cone_policy, root_cone_atoms};
use neatgames_core::network::{complete_network, is_valid_network, Network};
use neatgames_core::{CaAtomStructure, RainbowFrame, RainbowSignature};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

fn one_atom() -> CaAtomStructure {
    CaAtomStructure::from(build_full_set_structure(3, 1).unwrap())
}

fn solve(s: &CaAtomStructure, v: Variant, m: usize, r: Rounds) -> (GameSpec, neatgames_core::games::Outcome) {
    let spec = GameSpec::new(v, m, r, s.clone()).unwrap();
    let o = solve_game_with_budget(&spec, &Budget::unlimited()).unwrap();
    (spec, o)
}

#[test]
fn trivial_frame_is_won_by_exists() {
    let s = one_atom();
    for m in 3..=5 {
        for r in [Rounds::Finite(0), Rounds::Finite(3), Rounds::Omega] {
            let (spec, o) = solve(&s, Variant::G, m, r);
            assert_eq!(o.winner, Winner::Exists, "m={m} {r}");
            verify_strategy(&spec, &o.certificate).unwrap();
        }
    }
}

#[test]
fn too_few_pebbles_is_an_invalid_spec() {
    assert!(GameSpec::new(Variant::G, 2, Rounds::Omega, one_atom()).is_err());
}

#[test]
fn full_set_frame_survives_the_game() {
    let s = CaAtomStructure::from(build_full_set_structure(3, 3).unwrap());
    let (spec, o) = solve(&s, Variant::G, 5, Rounds::Omega);
    assert_eq!(o.winner, Winner::Exists);
    verify_strategy(&spec, &o.certificate).unwrap();
}

fn small_forall_instance() -> (GameSpec, StrategyCert) {
    for s in random_ca3_frames(2024, 50, 6) {
        let (spec, o) = solve(&s, Variant::G, 3, Rounds::Omega);
        if o.winner == Winner::Forall {
            return (spec, o.certificate);
        }
    }
    panic!("corpus has no forall win at m=3");
}

#[test]
fn forcing_dag_with_a_missing_node_is_rejected() {
    let (spec, cert) = small_forall_instance();
    verify_strategy(&spec, &cert).unwrap();
    let StrategyCert::Forall { root_atom, nodes } = cert else { unreachable!() };
    for k in 0..nodes.len() {
        let mut cut = nodes.clone();
        cut.remove(k);
        let broken = StrategyCert::Forall { root_atom, nodes: cut };
        assert!(verify_strategy(&spec, &broken).is_err(), "node {k} was not needed");
    }
}

#[test]
fn exists_cert_with_a_missing_position_is_rejected() {
    let s = CaAtomStructure::from(build_full_set_structure(3, 2).unwrap());
    let (spec, o) = solve(&s, Variant::G, 4, Rounds::Omega);
    let StrategyCert::Exists { positions } = o.certificate else { panic!("expected exists") };
    let mut cut = positions.clone();
    cut.remove(0);
    assert!(verify_strategy(&spec, &StrategyCert::Exists { positions: cut }).is_err());
}

#[test]
fn face_cone_strategy_wins_on_pea43() {
    let s = CaAtomStructure::from(RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).unwrap());
    let spec = GameSpec::new(Variant::G, 6, Rounds::Omega, s.clone()).unwrap();
    let r = s.as_rainbow().unwrap();
    let root = root_cone_atoms(&r)[0];
    let cert = forall_cert_from_policy(&spec, root, &|p: &Network| face_cone_policy(r, p)).unwrap();
    verify_strategy(&spec, &cert).unwrap();
}

#[test]
fn ef_examples() {
    let (k4, k3) = (SimpleGraph::complete(4), SimpleGraph::complete(3));
    assert_eq!(ef_pebble_game(&k4, &k3, 4, 5), Winner::Forall);
    for rounds in [1, 5, 20] {
        assert_eq!(ef_pebble_game(&k4, &k3, 3, rounds), Winner::Exists);
    }
    for g in [SimpleGraph::cycle(5), SimpleGraph::builtin("petersen").unwrap(), k4.clone()] {
        assert_eq!(ef_pebble_game(&g, &g, 3, 6), Winner::Exists);
    }
}

#[test]
fn legal_demands_stay_in_range() {
    let s = CaAtomStructure::from(build_full_set_structure(3, 2).unwrap());
    let spec = GameSpec::new(Variant::F, 4, Rounds::Omega, s.clone()).unwrap();
    for n in complete_network(&s, 3, &BTreeMap::new()) {
        for d in legal_demands(&spec, &n) {
            assert!(d.tuple.iter().all(|&x| x < n.size()));
            assert!(s.contains(d.atom));
        }
    }
}

// ---- canonical forms against a brute-force isomorphism test ----

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn isomorphic(a: &Network, b: &Network) -> bool {
    a.size() == b.size() && permutations(a.size()).iter().any(|p| &a.relabel(p) == b)
}

/// Nonempty lists of networks of one size over one small corpus frame.
fn pool() -> &'static Vec<(CaAtomStructure, Vec<Network>)> {
    static POOL: OnceLock<Vec<(CaAtomStructure, Vec<Network>)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for s in random_ca3_frames(11, 6, 6) {
            for k in 1..=4 {
                let nets = complete_network(&s, k, &BTreeMap::new());
                if !nets.is_empty() && nets.len() < 5000 {
                    out.push((s.clone(), nets));
                }
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_decides_isomorphism(
        g in any::<prop::sample::Index>(),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        perm in any::<prop::sample::Index>(),
        shuffle in any::<bool>(),
    ) {
        let (s, all) = g.get(pool());
        let a = i.get(all);
        let perms = permutations(a.size());
        let b = if shuffle { a.relabel(perm.get(&perms)) } else { j.get(all).clone() };
        prop_assert!(is_valid_network(s, &b));
        let (ca, pa) = canonical_form(a);
        let (cb, _) = canonical_form(&b);
        prop_assert_eq!(&a.relabel(&pa), &ca);
        prop_assert_eq!(&canonical_form(&ca).0, &ca);
        prop_assert_eq!(ca == cb, isomorphic(a, &b));
    }
}
