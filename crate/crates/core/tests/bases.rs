use neatgames_core::bases::{
    all_networks_up_to, check_basis, check_hyperbasis, decide_m_square, find_basis, find_basis_scheduled,
    find_basis_with_budget, find_hyperbasis, hyperbasis_to_basis, HyperbasisOutcome,
};
use neatgames_core::budget::Budget;
use neatgames_core::canon::canonical_form;
use neatgames_core::corpus::random_ca3_frames;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::games::{canonical_seeds, legal_demands, responses, GameSpec, Rounds, Variant};
use neatgames_core::network::Network;
use neatgames_core::{CaAtomStructure, RainbowFrame, RainbowSignature};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::OnceLock;

fn full(n: usize, b: usize) -> CaAtomStructure {
    CaAtomStructure::from(build_full_set_structure(n, b).unwrap())
}

fn pea43() -> CaAtomStructure {
    CaAtomStructure::from(RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).unwrap())
}

fn corpus() -> &'static [CaAtomStructure] {
    static C: OnceLock<Vec<CaAtomStructure>> = OnceLock::new();
    C.get_or_init(|| random_ca3_frames(2024, 50, 6))
}

/// Naive greatest fixpoint over the game's own move rules.
fn naive_basis(s: &CaAtomStructure, m: usize) -> Option<BTreeSet<Network>> {
    let spec = GameSpec::new(Variant::G, m, Rounds::Omega, s.clone()).unwrap();
    let mut set: BTreeSet<Network> = all_networks_up_to(s, m, &Budget::unlimited())
        .unwrap()
        .into_iter()
        .map(|n| canonical_form(&n).0)
        .collect();
    loop {
        let dead: Vec<Network> = set
            .iter()
            .filter(|n| {
                legal_demands(&spec, n)
                    .iter()
                    .any(|d| responses(&spec, n, d).iter().all(|x| !set.contains(&canonical_form(x).0)))
            })
            .cloned()
            .collect();
        if dead.is_empty() {
            break;
        }
        for n in dead {
            set.remove(&n);
        }
    }
    let covered = s
        .atoms()
        .into_iter()
        .all(|a| canonical_seeds(s, a).iter().any(|x| set.contains(x)));
    covered.then_some(set)
}

#[test]
fn full_set_frame_has_a_five_dimensional_basis() {
    let s = full(3, 3);
    let b = find_basis(&s, 5).unwrap().expect("basis");
    check_basis(&s, &b).unwrap();
    assert!(decide_m_square(&s, 5).unwrap());
}

#[test]
fn pea43_has_no_six_dimensional_basis() {
    let s = pea43();
    assert!(find_basis(&s, 6).unwrap().is_none());
    assert!(!decide_m_square(&s, 6).unwrap());
}

#[test]
fn one_atom_frame_always_has_a_basis() {
    let s = full(3, 1);
    for m in 3..=6 {
        let b = find_basis(&s, m).unwrap().expect("basis");
        assert_eq!(b.len(), 1);
        check_basis(&s, &b).unwrap();
    }
}

#[test]
fn dimension_above_m_is_refused() {
    assert!(find_basis(&full(3, 2), 2).is_err());
}

#[test]
fn fixpoint_matches_naive_elimination() {
    for (f, s) in corpus().iter().take(20).enumerate() {
        for m in 3..=4 {
            let fast = find_basis_with_budget(s, m, &Budget::unlimited()).unwrap();
            let slow = naive_basis(s, m);
            match (&fast, &slow) {
                (Some(b), Some(set)) => {
                    let got: BTreeSet<Network> = b.networks.iter().cloned().collect();
                    assert_eq!(&got, set, "frame {f} m={m}");
                    check_basis(s, b).unwrap();
                }
                (None, None) => {}
                _ => panic!("frame {f} m={m}: fixpoint {} naive {}", fast.is_some(), slow.is_some()),
            }
        }
    }
}

#[test]
fn one_atom_hyperbasis_is_a_single_hypernetwork() {
    let s = full(3, 1);
    match find_hyperbasis(&s, 3, 1).unwrap() {
        HyperbasisOutcome::Found(hb) => {
            assert_eq!(hb.members.len(), 1);
            assert!(hb.members[0].hyperlabels.iter().all(|&l| l == 0));
            check_hyperbasis(&s, &hb).unwrap();
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn full_set_frame_has_a_four_dimensional_hyperbasis() {
    let s = full(3, 3);
    let HyperbasisOutcome::Found(hb) = find_hyperbasis(&s, 4, 2).unwrap() else { panic!("no hyperbasis") };
    check_hyperbasis(&s, &hb).unwrap();
    check_basis(&s, &hyperbasis_to_basis(&s, &hb)).unwrap();
}

#[test]
fn pea43_has_no_hyperbasis_at_six() {
    let out = find_hyperbasis(&pea43(), 6, 2).unwrap();
    assert!(matches!(out, HyperbasisOutcome::NoneAtBound { lambda_max: 2, .. }), "{out:?}");
}

#[test]
fn empty_alphabet_has_no_hyperbasis() {
    let out = find_hyperbasis(&full(3, 2), 3, 0).unwrap();
    assert!(matches!(out, HyperbasisOutcome::NoneAtBound { lambda_max: 0, .. }));
}

#[test]
fn hyperbases_restrict_to_bases() {
    for (f, s) in corpus().iter().take(12).enumerate() {
        for m in 3..=4 {
            if let HyperbasisOutcome::Found(hb) = find_hyperbasis(s, m, 1).unwrap() {
                let b = hyperbasis_to_basis(s, &hb);
                check_basis(s, &b).unwrap_or_else(|e| panic!("frame {f} m={m}: {e}"));
                assert!(find_basis(s, m).unwrap().is_some());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bases_are_antitone_in_m(f in 0usize..50, m in 3usize..=4) {
        let s = &corpus()[f];
        let bigger = find_basis(s, m + 1).unwrap().is_some();
        let smaller = find_basis(s, m).unwrap().is_some();
        prop_assert!(!bigger || smaller);
    }

    #[test]
    fn elimination_order_does_not_matter(f in 0usize..50, m in 3usize..=5, seed in any::<u64>()) {
        let s = &corpus()[f];
        let a = find_basis_with_budget(s, m, &Budget::unlimited()).unwrap();
        let b = find_basis_scheduled(s, m, seed, &Budget::unlimited()).unwrap();
        prop_assert_eq!(a, b);
    }
}
