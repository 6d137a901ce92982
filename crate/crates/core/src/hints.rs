//! Guided ∀ search for rainbow frames. ∀ only ever demands cones: a fresh
//! apex over a green-free base carrying a yellow, with a tint the base
//! admits but no existing apex realizes. The search is iterative deepening
//! over canonical positions; any proof it finds is an ordinary forcing DAG
//! and is checked like any other certificate.

use crate::atoms::AtomId;
use crate::budget::Budget;
use crate::canon::canonical_form;
use crate::frame::CaAtomStructure;
use crate::games::{
    for_each_response, has_response, responses, Demand, ForcingNode, GameSpec, Rounds, SolveError, StrategyCert,
    Target,
};
use crate::network::{network_to_graph, seed_networks, Network};
use crate::rainbow::{Colour, ColouredGraph, RainbowFrame};
use itertools::Itertools;
use std::collections::{HashMap, HashSet};

/// Responses beyond this many make a cone demand too expensive to expand.
const RESPONSE_CAP: usize = 50_000;

fn tint_values(r: &RainbowFrame, mask: u32) -> Vec<i64> {
    let a = &r.signature().greens;
    (0..a.len()).filter(|&b| mask & (1 << b) != 0).map(|b| a[b]).collect()
}

/// Atom of the cone over `base` (d0 first) with apex tint `tint`, if it is an atom.
pub fn cone_atom(r: &RainbowFrame, g: &ColouredGraph, base: &[usize], tint: u8) -> Option<AtomId> {
    let n = r.dim();
    let mut edges = Vec::new();
    for p in 0..base.len() {
        for q in p + 1..base.len() {
            edges.push((p, q, r.colour(g.colour_id(base[p], base[q]))));
        }
    }
    edges.push((n - 1, 0, Colour::Tint(tint)));
    for j in 1..n - 1 {
        edges.push((n - 1, j, Colour::Green(j as u8)));
    }
    let mask = base.iter().fold(0u32, |m, &u| m | (1 << u));
    let y = g.yellow(mask)?;
    let yellows = vec![((0..n - 1).collect::<Vec<_>>(), tint_values(r, y))];
    let h = r.build_graph(n, &edges, &yellows).ok()?;
    let kernel: Vec<u8> = (0..n as u8).collect();
    let a = r.encode(&kernel, &h);
    r.contains(a).then_some(a)
}

/// Tints of the apexes already standing over the ordered base.
fn present_tints(r: &RainbowFrame, g: &ColouredGraph, base: &[usize]) -> u32 {
    let mut out = 0u32;
    for z in 0..g.nodes() {
        if base.contains(&z) {
            continue;
        }
        let Colour::Tint(t) = r.colour(g.colour_id(z, base[0])) else { continue };
        let greens = base
            .iter()
            .enumerate()
            .skip(1)
            .all(|(j, &d)| r.colour(g.colour_id(z, d)) == Colour::Green(j as u8));
        if greens {
            out |= 1 << t;
        }
    }
    out
}

fn ordered_tints(allowed: u32, present: u32, width: usize) -> Vec<u8> {
    let all: Vec<u8> = (0..width as u8).filter(|&t| allowed & (1 << t) != 0).collect();
    if present == 0 {
        let mid = width as i64 / 2;
        let mut v = all;
        v.sort_by_key(|&t| ((t as i64 - mid).abs(), t));
        return v;
    }
    let lo = present.trailing_zeros() as u8;
    let hi = 31 - present.leading_zeros() as u8;
    let mut out: Vec<u8> = all.iter().copied().filter(|&t| t < lo).rev().collect();
    out.extend(all.iter().copied().filter(|&t| t > hi));
    out.extend(all.iter().copied().filter(|&t| t > lo && t < hi));
    out
}

/// Unwitnessed cone demands at a position, most promising first.
pub fn cone_demands(r: &RainbowFrame, pos: &Network) -> Vec<Demand> {
    let n = r.dim();
    let Some(g) = network_to_graph(r, pos) else { return Vec::new() };
    let width = r.signature().greens.len();
    let mut bases: Vec<(u32, Vec<usize>, u32)> = Vec::new();
    for &(mask, y) in g.yellows() {
        let nodes: Vec<usize> = (0..g.nodes()).filter(|&u| mask & (1 << u) != 0).collect();
        for order in nodes.iter().copied().permutations(n - 1) {
            let present = present_tints(r, &g, &order);
            bases.push((present, order, y));
        }
    }
    bases.sort_by_key(|(present, order, _)| (std::cmp::Reverse(present.count_ones()), order.clone()));
    let mut out = Vec::new();
    for (present, order, y) in bases {
        for t in ordered_tints(y & !present, present, width) {
            if let Some(a) = cone_atom(r, &g, &order, t) {
                let mut tuple = order.clone();
                tuple.push(order[0]);
                out.push(Demand {
                    tuple,
                    index: n - 1,
                    atom: a,
                    target: Target::Fresh,
                });
            }
        }
    }
    out
}

/// 0-cone root atoms, middle tint first.
pub fn root_cone_atoms(r: &RainbowFrame) -> Vec<AtomId> {
    let n = r.dim();
    let width = r.signature().greens.len();
    let mut edges = Vec::new();
    for p in 0..n - 1 {
        for q in p + 1..n - 1 {
            edges.push((p, q, Colour::White(0)));
        }
    }
    let yellows = vec![((0..n - 1).collect::<Vec<_>>(), r.signature().greens.clone())];
    let mut out = Vec::new();
    for t in ordered_tints((1u32 << width) - 1, 0, width) {
        let mut e = edges.clone();
        e.push((n - 1, 0, Colour::Tint(t)));
        for j in 1..n - 1 {
            e.push((n - 1, j, Colour::Green(j as u8)));
        }
        let Ok(h) = r.build_graph(n, &e, &yellows) else { continue };
        let kernel: Vec<u8> = (0..n as u8).collect();
        let a = r.encode(&kernel, &h);
        if r.contains(a) {
            out.push(a);
        }
    }
    out
}

struct Proof {
    demand: Demand,
    rank: u32,
    children: Vec<Network>,
}

struct Search<'a> {
    spec: &'a GameSpec,
    r: &'a RainbowFrame,
    budget: &'a Budget,
    won: HashMap<Network, Proof>,
    failed: HashSet<(Network, u32)>,
    visited: usize,
}

impl Search<'_> {
    fn prove(&mut self, pos: &Network, depth: u32) -> Result<Option<u32>, SolveError> {
        if let Some(p) = self.won.get(pos) {
            if p.rank <= depth {
                return Ok(Some(p.rank));
            }
        }
        if depth == 0 || pos.size() >= self.spec.pebbles || self.failed.contains(&(pos.clone(), depth)) {
            return Ok(None);
        }
        if self.budget.exhausted() {
            return Err(SolveError::Inconclusive("time budget exhausted in guided search".into()));
        }
        self.visited += 1;
        let demands = cone_demands(self.r, pos);
        for d in &demands {
            if !has_response(self.spec, pos, d) {
                self.won.insert(
                    pos.clone(),
                    Proof {
                        demand: d.clone(),
                        rank: 1,
                        children: Vec::new(),
                    },
                );
                return Ok(Some(1));
            }
        }
        if depth > 1 {
            for d in &demands {
                let mut kids: Vec<Network> = Vec::new();
                let mut over = false;
                for_each_response(self.spec, pos, d, &mut |m| {
                    kids.push(m);
                    if kids.len() > RESPONSE_CAP {
                        over = true;
                    }
                    !over
                });
                if over {
                    continue;
                }
                let mut kids: Vec<Network> = kids.iter().map(|m| canonical_form(m).0).collect();
                kids.sort();
                kids.dedup();
                let mut worst = 0;
                let mut ok = true;
                for k in &kids {
                    match self.prove(k, depth - 1)? {
                        Some(rk) => worst = worst.max(rk),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    self.won.insert(
                        pos.clone(),
                        Proof {
                            demand: d.clone(),
                            rank: worst + 1,
                            children: kids,
                        },
                    );
                    return Ok(Some(worst + 1));
                }
            }
        }
        self.failed.insert((pos.clone(), depth));
        Ok(None)
    }

    fn collect(&self, roots: &[Network]) -> Vec<ForcingNode> {
        let mut seen = HashSet::new();
        let mut stack: Vec<&Network> = roots.iter().collect();
        let mut nodes = Vec::new();
        while let Some(p) = stack.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            let proof = &self.won[p];
            nodes.push(ForcingNode {
                position: p.clone(),
                demand: proof.demand.clone(),
                rank: proof.rank,
            });
            stack.extend(proof.children.iter());
        }
        nodes.sort_by(|x, y| x.position.cmp(&y.position));
        nodes
    }
}

/// Looks for a ∀ win in which ∀ opens with a 0-cone and then only demands
/// cones. Returns the certificate and the number of positions expanded.
pub fn rainbow_forall_proof(spec: &GameSpec, budget: &Budget) -> Result<Option<(StrategyCert, usize)>, SolveError> {
    let CaAtomStructure::Rainbow(r) = &spec.structure else { return Ok(None) };
    let n = r.dim();
    if spec.pebbles < n {
        return Ok(None);
    }
    let mut max_depth = (spec.pebbles - n) as u32 + 1;
    if let Rounds::Finite(k) = spec.rounds {
        max_depth = max_depth.min(k);
    }
    let mut search = Search {
        spec,
        r,
        budget,
        won: HashMap::new(),
        failed: HashSet::new(),
        visited: 0,
    };
    let roots: Vec<(AtomId, Vec<Network>)> = root_cone_atoms(r)
        .into_iter()
        .map(|a| {
            let mut seeds: Vec<Network> = seed_networks(&spec.structure, a).iter().map(|s| canonical_form(s).0).collect();
            seeds.sort();
            seeds.dedup();
            (a, seeds)
        })
        .collect();
    for depth in 1..=max_depth {
        for (a, seeds) in &roots {
            let mut all = true;
            for s in seeds {
                if search.prove(s, depth)?.is_none() {
                    all = false;
                    break;
                }
            }
            if all && !seeds.is_empty() {
                let nodes = search.collect(seeds);
                return Ok(Some((StrategyCert::Forall { root_atom: *a, nodes }, search.visited)));
            }
        }
    }
    Ok(None)
}

/// Position-only ∀ policy: on the base 0..n-2 demand the cone with the least
/// admissible tint not yet present.
pub fn face_cone_policy(r: &RainbowFrame, pos: &Network) -> Option<Demand> {
    let n = r.dim();
    let g = network_to_graph(r, pos)?;
    let base: Vec<usize> = (0..n - 1).collect();
    let mask = (1u32 << (n - 1)) - 1;
    let y = g.yellow(mask)?;
    let present = present_tints(r, &g, &base);
    let width = r.signature().greens.len();
    for t in 0..width as u8 {
        if y & !present & (1 << t) == 0 {
            continue;
        }
        if let Some(a) = cone_atom(r, &g, &base, t) {
            let mut tuple = base.clone();
            tuple.push(0);
            return Some(Demand {
                tuple,
                index: n - 1,
                atom: a,
                target: Target::Fresh,
            });
        }
    }
    None
}

/// Follows a ∀ certificate from the root along responses of greatest rank and
/// reads the red labels forced on the apexes over node 0, in play order.
/// Entry p is the label of the p-th apex; labels come from reds between
/// consecutive apexes.
pub fn forced_red_labels(spec: &GameSpec, cert: &StrategyCert) -> Option<Vec<i64>> {
    let StrategyCert::Forall { root_atom, nodes } = cert else { return None };
    let r = spec.structure.as_rainbow()?;
    let by_pos: HashMap<&Network, &ForcingNode> = nodes.iter().map(|n| (&n.position, n)).collect();
    let mut pos = seed_networks(&spec.structure, *root_atom).into_iter().next()?;
    loop {
        let (c, perm) = canonical_form(&pos);
        let Some(node) = by_pos.get(&c) else { break };
        let mut inv = vec![0; perm.len()];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let d = node.demand.relabel(&inv);
        let next = responses(spec, &pos, &d)
            .into_iter()
            .max_by_key(|m| by_pos.get(&canonical_form(m).0).map_or(0, |n| n.rank));
        match next {
            Some(m) => pos = m,
            None => break,
        }
    }
    let g = network_to_graph(r, &pos)?;
    let apexes: Vec<usize> = (1..g.nodes())
        .filter(|&z| matches!(r.colour(g.colour_id(z, 0)), Colour::Tint(_)))
        .collect();
    let b = &r.signature().reds;
    let mut labels = Vec::new();
    for w in apexes.windows(2) {
        let Colour::Red { k, l, .. } = r.colour(g.colour_id(w[0], w[1])) else { return None };
        if labels.is_empty() {
            labels.push(b[k as usize]);
        }
        labels.push(b[l as usize]);
    }
    Some(labels)
}
