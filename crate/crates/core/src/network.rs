//! Atomic networks: total labellings of n-tuples of nodes by atoms.
//!
//! Networks are strict: a tuple's label lies in E_ij exactly when the tuple
//! repeats a node at positions i and j. Nodes are always `0..size`.

use crate::atoms::{pairs, AtomId};
use crate::frame::{CaAtomStructure, ExplicitCa};
use crate::rainbow::{normalize_kernel, ColouredGraph, ExtConstraint, RainbowFrame};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Network {
    dim: usize,
    size: usize,
    labels: Vec<AtomId>,
}

/// Rank of a tuple over `size` nodes: sum of t[p] * size^(n-1-p).
pub fn tuple_rank(size: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| acc * size + x)
}

pub fn tuple_of_rank(dim: usize, size: usize, mut rank: usize) -> Vec<usize> {
    let mut t = vec![0; dim];
    for p in (0..dim).rev() {
        t[p] = rank % size;
        rank /= size;
    }
    t
}

impl Network {
    /// Panics if `labels` does not have `size^dim` entries.
    pub fn from_labels(dim: usize, size: usize, labels: Vec<AtomId>) -> Self {
        assert_eq!(labels.len(), size.pow(dim as u32), "label table length");
        Network { dim, size, labels }
    }

    pub fn empty(dim: usize) -> Self {
        Network {
            dim,
            size: 0,
            labels: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[AtomId] {
        &self.labels
    }

    pub fn tuple_count(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self, t: &[usize]) -> usize {
        tuple_rank(self.size, t)
    }

    pub fn tuple(&self, rank: usize) -> Vec<usize> {
        tuple_of_rank(self.dim, self.size, rank)
    }

    pub fn label(&self, t: &[usize]) -> AtomId {
        self.labels[self.rank(t)]
    }

    /// Subnetwork on `keep`; new node p is old node `keep[p]`.
    pub fn restrict(&self, keep: &[usize]) -> Network {
        let k = keep.len();
        let total = k.pow(self.dim as u32);
        let mut labels = Vec::with_capacity(total);
        for r in 0..total {
            let t = tuple_of_rank(self.dim, k, r);
            let old: Vec<usize> = t.iter().map(|&x| keep[x]).collect();
            labels.push(self.label(&old));
        }
        Network {
            dim: self.dim,
            size: k,
            labels,
        }
    }

    /// Renames nodes: old node u becomes `perm[u]`. `perm` must be a bijection.
    pub fn relabel(&self, perm: &[usize]) -> Network {
        let mut inv = vec![0; self.size];
        for (u, &p) in perm.iter().enumerate() {
            inv[p] = u;
        }
        self.restrict(&inv)
    }

    /// Drops node k, shifting higher nodes down.
    pub fn remove_node(&self, k: usize) -> Network {
        let keep: Vec<usize> = (0..self.size).filter(|&u| u != k).collect();
        self.restrict(&keep)
    }

    /// Node w with label(t[i -> w]) == a, if any.
    pub fn witness(&self, t: &[usize], i: usize, a: AtomId) -> Option<usize> {
        let mut u = t.to_vec();
        (0..self.size).find(|&w| {
            u[i] = w;
            self.label(&u) == a
        })
    }
}

/// Partial map between node sets; `map[u] = v` sends domain node u to v.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeMap {
    pub map: BTreeMap<usize, usize>,
}

impl NodeMap {
    pub fn identity(size: usize) -> Self {
        NodeMap {
            map: (0..size).map(|u| (u, u)).collect(),
        }
    }
}

/// N composed with θ. Domain nodes with the same image are identified, since a
/// strict network cannot keep them apart, so the result is N restricted to the
/// image of θ, with nodes ordered by their smallest preimage.
pub fn apply_node_map(n: &Network, theta: &NodeMap) -> Network {
    let mut image = Vec::new();
    for &v in theta.map.values() {
        assert!(v < n.size(), "node map range outside the network");
        if !image.contains(&v) {
            image.push(v);
        }
    }
    n.restrict(&image)
}

fn diag_pattern(dim: usize, t: &[usize]) -> u64 {
    let mut m = 0u64;
    for (k, (i, j)) in pairs(dim).enumerate() {
        if t[i] == t[j] {
            m |= 1 << k;
        }
    }
    m
}

fn atom_pattern(s: &CaAtomStructure, a: AtomId) -> u64 {
    let mut m = 0u64;
    for (k, (i, j)) in pairs(s.dim()).enumerate() {
        if s.in_diag(a, i, j) {
            m |= 1 << k;
        }
    }
    m
}

pub fn is_valid_network(s: &CaAtomStructure, n: &Network) -> bool {
    if n.dim() != s.dim() {
        return false;
    }
    let dim = n.dim();
    for r in 0..n.tuple_count() {
        let t = n.tuple(r);
        let a = n.labels[r];
        if !s.contains(a) || atom_pattern(s, a) != diag_pattern(dim, &t) {
            return false;
        }
        for p in 0..dim {
            let mut u = t.clone();
            for v in 0..n.size() {
                if v == t[p] {
                    continue;
                }
                u[p] = v;
                if !s.cyl_related(a, n.label(&u), p) {
                    return false;
                }
            }
        }
        if s.has_transpositions() {
            for (i, j) in pairs(dim) {
                let mut u = t.clone();
                u.swap(i, j);
                if s.transpose(a, i, j) != Some(n.label(&u)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Kernel tuple of an atom: position p gets the block of the first position it
/// is diagonal-linked to. `None` when the atom's diagonal pattern is not an
/// equivalence relation, in which case no strict network carries it.
pub fn kernel_tuple(s: &CaAtomStructure, a: AtomId) -> Option<Vec<usize>> {
    let n = s.dim();
    let mut k = vec![0usize; n];
    let mut next = 0;
    for p in 0..n {
        match (0..p).find(|&q| s.in_diag(a, q, p)) {
            Some(q) => k[p] = k[q],
            None => {
                k[p] = next;
                next += 1;
            }
        }
    }
    let ok = pairs(n).all(|(i, j)| (k[i] == k[j]) == s.in_diag(a, i, j));
    ok.then_some(k)
}

/// Networks on the blocks of `a`'s kernel whose kernel tuple is labelled `a`.
pub fn seed_networks(s: &CaAtomStructure, a: AtomId) -> Vec<Network> {
    if !s.contains(a) {
        return Vec::new();
    }
    let Some(k) = kernel_tuple(s, a) else {
        return Vec::new();
    };
    if let CaAtomStructure::Rainbow(r) = s {
        let at = r.decode(a).unwrap();
        return vec![graph_to_network_unchecked(r, &at.graph)];
    }
    let nb = k.iter().max().unwrap() + 1;
    let mut cons = BTreeMap::new();
    cons.insert(k, a);
    complete_network(s, nb, &cons)
}

/// All valid networks on `size` nodes extending `constraints`.
pub fn complete_network(s: &CaAtomStructure, size: usize, constraints: &BTreeMap<Vec<usize>, AtomId>) -> Vec<Network> {
    let mut out = Vec::new();
    for_each_completion(s, size, constraints, &mut |n| {
        out.push(n);
        true
    });
    out
}

/// Lazy form of [`complete_network`]; stops when `visit` returns false.
pub fn for_each_completion(
    s: &CaAtomStructure,
    size: usize,
    constraints: &BTreeMap<Vec<usize>, AtomId>,
    visit: &mut dyn FnMut(Network) -> bool,
) -> bool {
    let dim = s.dim();
    for (t, _) in constraints.iter() {
        if t.len() != dim || t.iter().any(|&x| x >= size) {
            return true;
        }
    }
    match s {
        CaAtomStructure::Explicit(e) => {
            let total = size.pow(dim as u32);
            let mut fixed = vec![None; total];
            for (t, &a) in constraints {
                if a as usize >= e.len() {
                    return true;
                }
                fixed[tuple_rank(size, t)] = Some(a as usize);
            }
            csp_complete(e, size, fixed, visit)
        }
        CaAtomStructure::Rainbow(r) => {
            let cons: Vec<(Vec<usize>, AtomId)> = constraints.iter().map(|(t, &a)| (t.clone(), a)).collect();
            fn rec(
                r: &RainbowFrame,
                g: ColouredGraph,
                size: usize,
                cons: &[(Vec<usize>, AtomId)],
                visit: &mut dyn FnMut(Network) -> bool,
            ) -> bool {
                if g.nodes() == size {
                    let n = graph_to_network_unchecked(r, &g);
                    if !r.excluded().is_empty() && n.labels().iter().any(|a| r.excluded().contains(a)) {
                        return true;
                    }
                    return visit(n);
                }
                let z = g.nodes();
                let here: Vec<(Vec<usize>, AtomId)> =
                    cons.iter().filter(|(t, _)| t.iter().max() == Some(&z)).cloned().collect();
                let Some(ec) = rainbow_constraint(r, &g, &here) else {
                    return true;
                };
                r.for_each_extension(&g, &ec, &mut |h| rec(r, h, size, cons, visit))
            }
            rec(r, ColouredGraph::empty(), size, &cons, visit)
        }
    }
}

/// Translates "label(t) = a" constraints on tuples through the new node z into
/// fixed edges and yellows. `None` if a constraint contradicts the graph or
/// another constraint, or its atom is not in the frame.
pub fn rainbow_constraint(r: &RainbowFrame, g: &ColouredGraph, cons: &[(Vec<usize>, AtomId)]) -> Option<ExtConstraint> {
    let z = g.nodes();
    let mut ec = ExtConstraint::free(z);
    for (t, a) in cons {
        if !r.contains(*a) {
            return None;
        }
        let at = r.decode(*a)?;
        let raw: Vec<u8> = t.iter().map(|&x| x as u8).collect();
        let (norm, order) = normalize_kernel(&raw);
        if norm != at.kernel {
            return None;
        }
        let nb = order.len();
        for b1 in 0..nb {
            for b2 in 0..nb {
                if b1 == b2 {
                    continue;
                }
                let (u, v) = (order[b1], order[b2]);
                let c = at.graph.colour_id(b1, b2);
                if u == z {
                    match ec.edges[v] {
                        None => ec.edges[v] = Some(c),
                        Some(c0) if c0 == c => {}
                        Some(_) => return None,
                    }
                } else if v != z && g.colour_id(u, v) != c {
                    return None;
                }
            }
        }
        for &(m, y) in at.graph.yellows() {
            let mut nm = 0u32;
            for (b, &u) in order.iter().enumerate() {
                if m & (1 << b) != 0 {
                    nm |= 1 << u;
                }
            }
            if nm & (1 << z) != 0 {
                match ec.yellows.iter().find(|&&(m0, _)| m0 == nm) {
                    None => ec.yellows.push((nm, y)),
                    Some(&(_, y0)) if y0 == y => {}
                    Some(_) => return None,
                }
            } else if g.yellow(nm) != Some(y) {
                return None;
            }
        }
        // a set inside the atom without a yellow must also lack one in g
        if nb + 1 >= r.dim() {
            for set in crate::rainbow::subsets_of_size(nb, r.dim() - 1) {
                if at.graph.yellow(set).is_some() {
                    continue;
                }
                let mut nm = 0u32;
                for (b, &u) in order.iter().enumerate() {
                    if set & (1 << b) != 0 {
                        nm |= 1 << u;
                    }
                }
                if nm & (1 << z) == 0 && g.yellow(nm).is_some() {
                    return None;
                }
            }
        }
    }
    Some(ec)
}

/// Valid one-node extensions of `n` (new node `n.size()`) meeting `constraints`,
/// each of whose tuples must contain the new node.
pub fn for_each_extension(
    s: &CaAtomStructure,
    n: &Network,
    constraints: &[(Vec<usize>, AtomId)],
    visit: &mut dyn FnMut(Network) -> bool,
) -> bool {
    let z = n.size();
    match s {
        CaAtomStructure::Explicit(e) => {
            let size = z + 1;
            let total = size.pow(n.dim() as u32);
            let mut fixed = vec![None; total];
            for r in 0..total {
                let t = tuple_of_rank(n.dim(), size, r);
                if t.iter().all(|&x| x < z) {
                    fixed[r] = Some(n.label(&t) as usize);
                }
            }
            for (t, a) in constraints {
                let r = tuple_rank(size, t);
                if (*a as usize) >= e.len() {
                    return true;
                }
                match fixed[r] {
                    None => fixed[r] = Some(*a as usize),
                    Some(b) if b == *a as usize => {}
                    Some(_) => return true,
                }
            }
            csp_complete(e, size, fixed, visit)
        }
        CaAtomStructure::Rainbow(r) => {
            let Some(g) = network_to_graph(r, n) else { return true };
            let Some(ec) = rainbow_constraint(r, &g, constraints) else {
                return true;
            };
            r.for_each_extension(&g, &ec, &mut |h| {
                let m = graph_to_network_unchecked(r, &h);
                if !r.excluded().is_empty() && m.labels().iter().any(|a| r.excluded().contains(a)) {
                    return true;
                }
                visit(m)
            })
        }
    }
}

pub fn has_extension(s: &CaAtomStructure, n: &Network, constraints: &[(Vec<usize>, AtomId)]) -> bool {
    if let CaAtomStructure::Rainbow(r) = s {
        if r.excluded().is_empty() {
            let Some(g) = network_to_graph(r, n) else { return false };
            return match rainbow_constraint(r, &g, constraints) {
                Some(ec) => r.has_extension(&g, &ec),
                None => false,
            };
        }
    }
    !for_each_extension(s, n, constraints, &mut |_| false)
}

struct Csp<'a> {
    e: &'a ExplicitCa,
    dim: usize,
    size: usize,
    labels: Vec<Option<usize>>,
    by_pattern: BTreeMap<u64, Vec<usize>>,
}

impl Csp<'_> {
    fn consistent(&self, r: usize, a: usize) -> bool {
        let t = tuple_of_rank(self.dim, self.size, r);
        let mut u = t.clone();
        for p in 0..self.dim {
            for v in 0..self.size {
                if v == t[p] {
                    continue;
                }
                u[p] = v;
                if let Some(b) = self.labels[tuple_rank(self.size, &u)] {
                    if !self.e.cyl_row(p, a).contains(b) {
                        return false;
                    }
                }
            }
            u[p] = t[p];
        }
        if self.e.has_transpositions() {
            for (i, j) in pairs(self.dim) {
                u.swap(i, j);
                let r2 = tuple_rank(self.size, &u);
                u.swap(i, j);
                let sa = self.e.transpose(a, i, j).unwrap();
                let other = if r2 == r { Some(a) } else { self.labels[r2] };
                if let Some(b) = other {
                    if b != sa {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, open: &[usize], visit: &mut dyn FnMut(Network) -> bool) -> bool {
        let Some((&r, rest)) = open.split_first() else {
            let labels = self.labels.iter().map(|x| x.unwrap() as AtomId).collect();
            return visit(Network::from_labels(self.dim, self.size, labels));
        };
        let t = tuple_of_rank(self.dim, self.size, r);
        let cands = self.by_pattern.get(&diag_pattern(self.dim, &t)).cloned().unwrap_or_default();
        for a in cands {
            if self.consistent(r, a) {
                self.labels[r] = Some(a);
                let go = self.solve(rest, visit);
                self.labels[r] = None;
                if !go {
                    return false;
                }
            }
        }
        true
    }
}

fn csp_complete(e: &ExplicitCa, size: usize, fixed: Vec<Option<usize>>, visit: &mut dyn FnMut(Network) -> bool) -> bool {
    let dim = e.dim();
    let mut by_pattern: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for a in 0..e.len() {
        let mut m = 0u64;
        for (k, (i, j)) in pairs(dim).enumerate() {
            if e.in_diag(a, i, j) {
                m |= 1 << k;
            }
        }
        by_pattern.entry(m).or_default().push(a);
    }
    let mut csp = Csp {
        e,
        dim,
        size,
        labels: vec![None; fixed.len()],
        by_pattern,
    };
    // check the fixed labels against each other first
    for (r, f) in fixed.iter().enumerate() {
        if let Some(a) = *f {
            let t = tuple_of_rank(dim, size, r);
            let ok = csp.by_pattern.get(&diag_pattern(dim, &t)).is_some_and(|v| v.contains(&a));
            if !ok || !csp.consistent(r, a) {
                return true;
            }
            csp.labels[r] = Some(a);
        }
    }
    let open: Vec<usize> = (0..fixed.len()).filter(|&r| fixed[r].is_none()).collect();
    csp.solve(&open, visit)
}

// ---- coloured graphs ------------------------------------------------------------

fn graph_to_network_unchecked(r: &RainbowFrame, g: &ColouredGraph) -> Network {
    let dim = r.dim();
    let size = g.nodes();
    let total = size.pow(dim as u32);
    let labels = (0..total)
        .map(|k| r.label_of_tuple(g, &tuple_of_rank(dim, size, k)))
        .collect();
    Network::from_labels(dim, size, labels)
}

/// Network whose tuple labels are the restrictions of `g`. Fails if `g` is not a
/// valid graph over the frame's signature.
pub fn graph_to_network(g: &ColouredGraph, s: &CaAtomStructure) -> Result<Network, String> {
    let r = s.as_rainbow().ok_or("graph_to_network needs a rainbow frame")?;
    if !r.graph_is_valid(g) {
        return Err("coloured graph violates a forbidden triangle, yellow or cone rule".into());
    }
    let n = graph_to_network_unchecked(r, g);
    if let Some(a) = n.labels().iter().find(|a| r.excluded().contains(a)) {
        return Err(format!("label {a} is not an atom of this frame"));
    }
    Ok(n)
}

/// Reads edge colours off tuples (u, v, u, ...) and yellows off tuples listing an
/// (n-1)-set followed by repeats of its first node.
pub fn network_to_graph(r: &RainbowFrame, n: &Network) -> Option<ColouredGraph> {
    let dim = r.dim();
    let k = n.size();
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            let mut t = vec![u; dim];
            t[1] = v;
            let at = r.decode(n.label(&t))?;
            if at.graph.nodes() != 2 {
                return None;
            }
            edges.push((u, v, r.colour(at.graph.colour_id(0, 1))));
        }
    }
    let mut yellows = Vec::new();
    if k + 1 >= dim {
        for set in crate::rainbow::subsets_of_size(k, dim - 1) {
            let nodes: Vec<usize> = (0..k).filter(|&u| set & (1 << u) != 0).collect();
            let mut t = nodes.clone();
            t.push(nodes[0]);
            let at = r.decode(n.label(&t))?;
            let full = (1u32 << (dim - 1)) - 1;
            if let Some(y) = at.graph.yellow(full) {
                let tints = (0..r.signature().greens.len())
                    .filter(|&b| y & (1 << b) != 0)
                    .map(|b| r.signature().greens[b])
                    .collect();
                yellows.push((nodes, tints));
            }
        }
    }
    r.build_graph(k, &edges, &yellows).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullset::build_full_set_structure;

    #[test]
    fn ranks_round_trip() {
        for r in 0..64 {
            assert_eq!(tuple_rank(4, &tuple_of_rank(3, 4, r)), r);
        }
    }

    #[test]
    fn full_set_completions_on_one_node() {
        let s: CaAtomStructure = build_full_set_structure(3, 3).unwrap().into();
        let c = complete_network(&s, 1, &BTreeMap::new());
        // one per constant map
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|n| is_valid_network(&s, n)));
    }
}
