//! Seeded random small CA_3 frames for cross-checking solvers.
//!
//! Atoms are drawn with a diagonal type (all coordinates equal, exactly one
//! pair equal, or all distinct) and the T_i classes are built so that the
//! diagonal axioms have a chance of holding; candidates are then filtered
//! through the full validator.

use crate::canon::canonical_form;
use crate::frame::{CaAtomStructure, ExplicitCa};
use crate::network::{complete_network, for_each_extension, Network};
use crate::validate::validate_ca_frame;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Equal,
    Pair(usize, usize),
    Distinct,
}

impl Kind {
    fn in_diag(self, i: usize, j: usize) -> bool {
        match self {
            Kind::Equal => true,
            Kind::Pair(p, q) => (p, q) == (i, j),
            Kind::Distinct => false,
        }
    }
}

fn candidate(rng: &mut ChaCha8Rng, max_atoms: usize) -> Option<ExplicitCa> {
    let ne = rng.gen_range(1..=2);
    let np = rng.gen_range(1..=2);
    let room = max_atoms.checked_sub(ne + 3 * np)?;
    let nd = rng.gen_range(0..=room);
    let mut kinds = vec![Kind::Equal; ne];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        kinds.extend(std::iter::repeat(Kind::Pair(i, j)).take(np));
    }
    kinds.extend(std::iter::repeat(Kind::Distinct).take(nd));
    let k = kinds.len();

    let mut classes = Vec::with_capacity(3);
    for i in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let (j, l) = (others[0], others[1]);
        let key = |p: usize, q: usize| (p.min(q), p.max(q));
        let mut lab = vec![usize::MAX; k];
        // atoms diagonal in the untouched pair sit with one of the equal atoms
        let eq: Vec<usize> = (0..k).filter(|&a| kinds[a] == Kind::Equal).collect();
        for (c, &a) in eq.iter().enumerate() {
            lab[a] = c;
        }
        let (oj, ol) = key(j, l);
        for a in 0..k {
            if kinds[a] != Kind::Equal && kinds[a].in_diag(oj, ol) {
                lab[a] = rng.gen_range(0..eq.len());
            }
        }
        // pair atoms moving coordinate i are matched up between the two sides
        let (a1, b1) = key(i, j);
        let (a2, b2) = key(i, l);
        let side1: Vec<usize> = (0..k).filter(|&a| kinds[a] != Kind::Equal && kinds[a].in_diag(a1, b1)).collect();
        let mut side2: Vec<usize> = (0..k).filter(|&a| kinds[a] != Kind::Equal && kinds[a].in_diag(a2, b2)).collect();
        side2.shuffle(rng);
        for (c, (&a, &b)) in side1.iter().zip(&side2).enumerate() {
            lab[a] = 100 + c;
            lab[b] = 100 + c;
        }
        let spread = side1.len().max(1) + rng.gen_range(0..=2);
        for l in lab.iter_mut().filter(|l| **l == usize::MAX) {
            *l = 100 + rng.gen_range(0..spread);
        }
        classes.push(lab);
    }
    let mut diag = BTreeMap::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        diag.insert((i, j), (0..k).filter(|&a| kinds[a].in_diag(i, j)).collect());
    }
    let names = (0..k).map(|a| format!("a{a}")).collect();
    ExplicitCa::from_classes(3, names, &classes, diag, None).ok()
}

/// Networks per size in the generated corpus stay below this.
pub const NETWORK_CAP: usize = 3000;

/// True when the canonical networks on up to `m` nodes, and the one-node
/// extensions of each, number fewer than `cap`.
pub fn networks_listable(s: &CaAtomStructure, m: usize, cap: usize) -> bool {
    let mut level: BTreeSet<Network> = complete_network(s, 1, &BTreeMap::new())
        .iter()
        .map(|n| canonical_form(n).0)
        .collect();
    for _ in 1..m {
        let mut next = BTreeSet::new();
        for n in &level {
            let mut seen = 0;
            let done = for_each_extension(s, n, &[], &mut |x| {
                seen += 1;
                next.insert(canonical_form(&x).0);
                seen < cap && next.len() < cap
            });
            if !done {
                return false;
            }
        }
        level = next;
    }
    true
}

/// `count` valid CA_3 frames with at most `max_atoms` atoms.
/// Frames whose networks on five nodes cannot be listed within
/// [`NETWORK_CAP`] are skipped. The same seed always gives the same list.
pub fn random_ca3_frames(seed: u64, count: usize, max_atoms: usize) -> Vec<CaAtomStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let Some(e) = candidate(&mut rng, max_atoms) else { continue };
        let s = CaAtomStructure::from(e);
        if validate_ca_frame(&s).is_valid() && networks_listable(&s, 5, NETWORK_CAP) {
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid_and_reproducible() {
        let a = random_ca3_frames(7, 20, 6);
        let b = random_ca3_frames(7, 20, 6);
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert!(x.atom_count() <= 6);
            assert_eq!(x.fingerprint(), y.fingerprint());
        }
    }
}
