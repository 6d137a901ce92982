use neatgames_core::corpus::random_ca3_frames;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::term::{check_inequality, eval_term, parse_term, Assignment, CheckMode, Term};
use neatgames_core::{ExplicitCa, SetOfAtoms};
use proptest::prelude::*;
use std::sync::OnceLock;

fn f33() -> &'static ExplicitCa {
    static F: OnceLock<ExplicitCa> = OnceLock::new();
    F.get_or_init(|| build_full_set_structure(3, 3).unwrap())
}

fn env(pairs: &[(&str, SetOfAtoms)]) -> Assignment {
    pairs.iter().map(|(v, x)| (v.to_string(), x.clone())).collect()
}

fn eval(e: &ExplicitCa, src: &str, a: &Assignment) -> SetOfAtoms {
    eval_term(e, &parse_term(src).unwrap(), a).unwrap()
}

#[test]
fn parser_examples() {
    assert_eq!(parse_term("d(0,1)").unwrap(), Term::Diag(0, 1));
    assert_eq!(parse_term("c(0 x").unwrap_err().offset, 4);
    let tau = parse_term("c(1, c(0,x) · s(1,0, c(1,y))) · c(1,x) · c(0,y)").unwrap();
    assert_eq!(tau.variables(), vec!["x".to_string(), "y".to_string()]);
    assert!(tau.is_monotone());
}

#[test]
fn diagonal_of_full_set() {
    let v = eval(f33(), "d(0,1)", &Assignment::new());
    assert_eq!(v.len(), 9);
    assert!(v.iter().all(|a| {
        let n = f33().name(a);
        n.as_bytes()[1] == n.as_bytes()[3]
    }));
}

#[test]
fn cylindrifiers_are_normal() {
    let e = f33();
    let x = env(&[("x", SetOfAtoms::empty(e.len()))]);
    assert!(eval(e, "c(0, x)", &x).is_empty());
    assert!(eval(e, "c(0, 0)", &Assignment::new()).is_empty());
}

#[test]
fn index_beyond_dimension_is_an_error() {
    assert!(eval_term(f33(), &parse_term("c(3, 1)").unwrap(), &Assignment::new()).is_err());
}

#[test]
fn cylindrifier_enlarges_a_singleton() {
    let rep = check_inequality(f33(), &parse_term("c(0,x)").unwrap(), &parse_term("x").unwrap(), CheckMode::AtomsOnly)
        .unwrap();
    assert!(!rep.holds);
    let cex = rep.counterexample.unwrap();
    assert_eq!(cex["x"].iter().map(|&a| f33().name(a)).collect::<Vec<_>>(), ["(0,0,0)"]);
}

#[test]
fn atoms_only_refuses_complements() {
    let t = parse_term("-x").unwrap();
    assert!(check_inequality(f33(), &t, &t, CheckMode::AtomsOnly).is_err());
}

#[test]
fn reflexivity_in_every_mode() {
    let e = build_full_set_structure(3, 2).unwrap();
    for src in ["c(0, x · -y) + d(1,2)", "s(0,2, c(1,x)) · y", "x"] {
        let t = parse_term(src).unwrap();
        for mode in [CheckMode::Exhaustive, CheckMode::Sampled { samples: 200, seed: 5 }] {
            assert!(check_inequality(&e, &t, &t, mode).unwrap().holds, "{src} {mode:?}");
        }
    }
}

#[test]
fn sampled_checks_are_reproducible() {
    let e = build_full_set_structure(3, 2).unwrap();
    let (l, r) = (parse_term("c(0,x)").unwrap(), parse_term("x + y").unwrap());
    let mode = CheckMode::Sampled { samples: 300, seed: 42 };
    assert_eq!(
        check_inequality(&e, &l, &r, mode).unwrap(),
        check_inequality(&e, &l, &r, mode).unwrap()
    );
}

fn corpus() -> &'static [ExplicitCa] {
    static C: OnceLock<Vec<ExplicitCa>> = OnceLock::new();
    C.get_or_init(|| {
        random_ca3_frames(99, 10, 6)
            .into_iter()
            .map(|s| s.to_explicit().unwrap())
            .chain([build_full_set_structure(3, 3).unwrap()])
            .collect()
    })
}

fn subset(w: usize, bits: u64) -> SetOfAtoms {
    SetOfAtoms::from_indices(w, (0..w).filter(|&a| bits >> (a % 64) & 1 == 1 && a < 64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn operators_are_completely_additive(f in 0usize..11, bits in any::<u64>(), i in 0usize..3, j in 0usize..3) {
        let e = &corpus()[f];
        let w = e.len();
        let x = subset(w, bits);
        for src in [format!("c({i}, x)"), format!("s({i},{j}, x)")] {
            let whole = eval(e, &src, &env(&[("x", x.clone())]));
            let mut parts = SetOfAtoms::empty(w);
            for a in x.iter() {
                parts.union_with(&eval(e, &src, &env(&[("x", SetOfAtoms::singleton(w, a))])));
            }
            prop_assert_eq!(whole, parts, "{}", src);
        }
    }

    #[test]
    fn cylindrifier_laws_on_valid_frames(f in 0usize..11, a in any::<prop::sample::Index>(), i in 0usize..3, j in 0usize..3) {
        let e = &corpus()[f];
        let w = e.len();
        let x = env(&[("x", SetOfAtoms::singleton(w, a.index(w)))]);
        let single = eval(e, "x", &x);
        let ci = eval(e, &format!("c({i}, x)"), &x);
        prop_assert!(single.is_subset(&ci));
        prop_assert_eq!(&eval(e, &format!("c({i}, c({i}, x))"), &x), &ci);
        prop_assert_eq!(
            eval(e, &format!("c({i}, c({j}, x))"), &x),
            eval(e, &format!("c({j}, c({i}, x))"), &x)
        );
    }
}
