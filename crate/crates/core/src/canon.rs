//! Canonical forms of networks under node renaming.

use crate::atoms::AtomId;
use crate::network::{tuple_of_rank, tuple_rank, Network};
use itertools::Itertools;

/// Canonical representative of `n` up to node renaming, and the renaming
/// `perm` (old node u becomes `perm[u]`) with `n.relabel(&perm)` equal to it.
pub fn canonical_form(n: &Network) -> (Network, Vec<usize>) {
    canonical_form_coloured(n, &vec![0; n.size()])
}

/// As [`canonical_form`], but renamings must preserve the node colours.
/// Colours are compared as given, so equal colour vectors are required for
/// two networks to share a canonical form.
pub fn canonical_form_coloured(n: &Network, colours: &[u32]) -> (Network, Vec<usize>) {
    let k = n.size();
    if k <= 1 {
        return (n.clone(), (0..k).collect());
    }
    let cells = refine(n, colours);
    // new position p is filled from cells in order
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&u| cells[u]);
    for (_, grp) in &order.into_iter().chunk_by(|&u| cells[u]) {
        groups.push(grp.collect());
    }
    let dim = n.dim();
    let total = n.tuple_count();
    let tuples: Vec<Vec<usize>> = (0..total).map(|r| tuple_of_rank(dim, k, r)).collect();

    let mut best: Option<(Vec<AtomId>, Vec<usize>)> = None;
    let mut inv = vec![0usize; k];
    let mut scratch = vec![0usize; dim];
    search(&groups, 0, 0, &mut inv, &mut |inv| {
        // compare the table relabelled by inv (new -> old) against the best so far
        let mut cand: Vec<AtomId> = Vec::with_capacity(total);
        let mut better = best.is_none();
        for (r, t) in tuples.iter().enumerate() {
            for (p, &x) in t.iter().enumerate() {
                scratch[p] = inv[x];
            }
            let lab = n.labels()[tuple_rank(k, &scratch)];
            if !better {
                let b = best.as_ref().unwrap().0[r];
                if lab > b {
                    return;
                }
                if lab < b {
                    better = true;
                }
            }
            cand.push(lab);
        }
        if better {
            best = Some((cand, inv.to_vec()));
        }
    });
    let (labels, inv) = best.unwrap();
    let mut perm = vec![0; k];
    for (new, &old) in inv.iter().enumerate() {
        perm[old] = new;
    }
    (Network::from_labels(dim, k, labels), perm)
}

fn search(groups: &[Vec<usize>], g: usize, pos: usize, inv: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        f(inv);
        return;
    }
    let grp = &groups[g];
    for p in grp.iter().copied().permutations(grp.len()) {
        for (q, &u) in p.iter().enumerate() {
            inv[pos + q] = u;
        }
        search(groups, g + 1, pos + grp.len(), inv, f);
    }
}

/// Colour refinement: repeatedly split nodes by the multiset of
/// (positions held, label, cells of the other entries) over their tuples.
fn refine(n: &Network, colours: &[u32]) -> Vec<usize> {
    let k = n.size();
    let dim = n.dim();
    let rank_cells = |sigs: &[Vec<u64>]| -> Vec<usize> {
        let mut distinct: Vec<&Vec<u64>> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        sigs.iter().map(|s| distinct.binary_search(&s).unwrap()).collect()
    };
    let init: Vec<Vec<u64>> = colours.iter().map(|&c| vec![c as u64]).collect();
    let mut cells = rank_cells(&init);
    loop {
        let count = cells.iter().max().map_or(0, |m| m + 1);
        let mut per_node: Vec<Vec<Vec<u64>>> = vec![Vec::new(); k];
        for r in 0..n.tuple_count() {
            let t = n.tuple(r);
            let lab = n.labels()[r];
            for u in 0..k {
                let mut mask = 0u64;
                for (p, &x) in t.iter().enumerate() {
                    if x == u {
                        mask |= 1 << p;
                    }
                }
                if mask == 0 {
                    continue;
                }
                let mut entry = Vec::with_capacity(dim + 2);
                entry.push(mask);
                entry.push(lab);
                entry.extend(t.iter().map(|&x| cells[x] as u64));
                per_node[u].push(entry);
            }
        }
        let sigs: Vec<Vec<u64>> = per_node
            .into_iter()
            .enumerate()
            .map(|(u, mut entries)| {
                entries.sort();
                let mut s = vec![cells[u] as u64];
                for e in entries {
                    s.push(u64::MAX);
                    s.extend(e);
                }
                s
            })
            .collect();
        let next = rank_cells(&sigs);
        let next_count = next.iter().max().map_or(0, |m| m + 1);
        cells = next;
        if next_count == count {
            return cells;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabelled_networks_share_a_form() {
        let labels: Vec<AtomId> = (0..27).map(|r| (r * 7 % 5) as AtomId).collect();
        let n = Network::from_labels(3, 3, labels);
        let (c, perm) = canonical_form(&n);
        assert_eq!(n.relabel(&perm), c);
        for p in (0..3).permutations(3) {
            let m = n.relabel(&p);
            assert_eq!(canonical_form(&m).0, c);
        }
    }
}
