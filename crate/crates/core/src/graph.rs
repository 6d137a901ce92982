//! Simple graphs, exact chromatic number and the forth-only pebble game.

use crate::budget::Budget;
use crate::games::{SolveError, Winner};
use std::collections::HashMap;
use std::fmt;

/// Undirected loop-free graph on at most 64 vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Vec<u64>,
}

impl fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleGraph({} vertices, edges {:?})", self.len(), self.edges())
    }
}

impl SimpleGraph {
    pub const MAX_VERTICES: usize = 64;

    pub fn empty(n: usize) -> Self {
        assert!(n <= Self::MAX_VERTICES, "at most 64 vertices");
        SimpleGraph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, String> {
        if n > Self::MAX_VERTICES {
            return Err(format!("{n} vertices, at most 64 supported"));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(format!("edge ({u},{v}) outside {n} vertices"));
            }
            if u == v {
                return Err(format!("self-loop at {u}"));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let off = self.len();
        let mut g = Self::empty(off + other.len());
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off);
        }
        g
    }

    /// Named graphs: `edge`, `two-triangles`, `k<n>`, `c<n>`, `e<n>` (edgeless), `petersen`.
    pub fn builtin(name: &str) -> Option<SimpleGraph> {
        let num = |p: &str| name.strip_prefix(p).and_then(|s| s.parse::<usize>().ok());
        match name {
            "edge" | "single-edge" => Some(Self::complete(2)),
            "two-triangles" => Some(Self::complete(3).disjoint_union(&Self::complete(3))),
            "petersen" => {
                let mut e = Vec::new();
                for i in 0..5 {
                    e.push((i, (i + 1) % 5));
                    e.push((i, i + 5));
                    e.push((5 + i, 5 + (i + 2) % 5));
                }
                Self::from_edges(10, &e).ok()
            }
            _ => {
                if let Some(n) = num("k").or_else(|| num("K")) {
                    (n <= 64).then(|| Self::complete(n))
                } else if let Some(n) = num("c").or_else(|| num("C")) {
                    (3..=64).contains(&n).then(|| Self::cycle(n))
                } else if let Some(n) = num("e") {
                    (n <= 64).then(|| Self::empty(n))
                } else {
                    None
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbours(&self, u: usize) -> u64 {
        self.adj[u]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True when no two distinct vertices of `vs` are adjacent.
    pub fn is_independent(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(k, &u)| vs[k + 1..].iter().all(|&v| u == v || !self.has_edge(u, v)))
    }
}

fn greedy_clique(g: &SimpleGraph) -> usize {
    let n = g.len();
    let mut best = if n > 0 { 1 } else { 0 };
    for start in 0..n {
        let mut cand = g.neighbours(start);
        let mut size = 1;
        while cand != 0 {
            // pick the candidate with the most candidate neighbours
            let mut pick = cand.trailing_zeros() as usize;
            let mut score = 0;
            let mut c = cand;
            while c != 0 {
                let v = c.trailing_zeros() as usize;
                c &= c - 1;
                let s = (g.neighbours(v) & cand).count_ones();
                if s > score {
                    score = s;
                    pick = v;
                }
            }
            size += 1;
            cand &= g.neighbours(pick);
        }
        best = best.max(size);
    }
    best
}

/// Exact chromatic number by DSATUR branch and bound.
pub fn chromatic_number(g: &SimpleGraph, budget: &Budget) -> Result<usize, SolveError> {
    let n = g.len();
    if n == 0 {
        return Ok(0);
    }
    let lower = greedy_clique(g);
    let mut best = n + 1;
    let mut colour = vec![usize::MAX; n];
    let mut steps = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &SimpleGraph,
        colour: &mut Vec<usize>,
        used: usize,
        coloured: usize,
        best: &mut usize,
        lower: usize,
        budget: &Budget,
        steps: &mut u64,
    ) -> Result<(), SolveError> {
        let n = g.len();
        *steps += 1;
        if *steps % 4096 == 0 && budget.exhausted() {
            return Err(SolveError::Inconclusive("time budget exhausted in colouring search".into()));
        }
        if used >= *best || *best == lower {
            return Ok(());
        }
        if coloured == n {
            *best = used;
            return Ok(());
        }
        // most saturated uncoloured vertex, ties by degree
        let mut pick = usize::MAX;
        let mut key = (0, 0);
        for v in 0..n {
            if colour[v] != usize::MAX {
                continue;
            }
            let mut seen = 0u64;
            let mut nb = g.neighbours(v);
            while nb != 0 {
                let u = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if colour[u] != usize::MAX {
                    seen |= 1 << colour[u];
                }
            }
            let k = (seen.count_ones(), g.neighbours(v).count_ones());
            if pick == usize::MAX || k > key {
                pick = v;
                key = k;
            }
        }
        for c in 0..=used.min(n - 1) {
            let clash = {
                let mut nb = g.neighbours(pick);
                let mut hit = false;
                while nb != 0 {
                    let u = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    if colour[u] == c {
                        hit = true;
                        break;
                    }
                }
                hit
            };
            if clash {
                continue;
            }
            colour[pick] = c;
            let nu = if c == used { used + 1 } else { used };
            rec(g, colour, nu, coloured + 1, best, lower, budget, steps)?;
            colour[pick] = usize::MAX;
            if *best == lower {
                break;
            }
        }
        Ok(())
    }
    rec(g, &mut colour, 0, 0, &mut best, lower, budget, &mut steps)?;
    Ok(best)
}

/// Forth-only pebble game: each round ∀ places or moves one of `pebbles`
/// pebbles on `g1` and ∃ answers on `g2`; ∃ must keep the pebbled map a
/// partial isomorphism for `rounds` rounds.
pub fn ef_pebble_game(g1: &SimpleGraph, g2: &SimpleGraph, pebbles: usize, rounds: u32) -> Winner {
    let mut memo = HashMap::new();
    if exists_survives(g1, g2, pebbles, &mut Vec::new(), rounds, &mut memo) {
        Winner::Exists
    } else {
        Winner::Forall
    }
}

fn consistent(g1: &SimpleGraph, g2: &SimpleGraph, pos: &[(usize, usize)], u: usize, v: usize) -> bool {
    pos.iter()
        .all(|&(a, b)| (a == u) == (b == v) && (a == u || g1.has_edge(a, u) == g2.has_edge(b, v)))
}

fn exists_survives(
    g1: &SimpleGraph,
    g2: &SimpleGraph,
    pebbles: usize,
    pos: &mut Vec<(usize, usize)>,
    rounds: u32,
    memo: &mut HashMap<(Vec<(usize, usize)>, u32), bool>,
) -> bool {
    if rounds == 0 || pebbles == 0 {
        return true;
    }
    let mut key = pos.clone();
    key.sort_unstable();
    if let Some(&v) = memo.get(&(key.clone(), rounds)) {
        return v;
    }
    // ∀ either adds a pebble or lifts pebble p first
    let mut lifts: Vec<Option<usize>> = Vec::new();
    if pos.len() < pebbles {
        lifts.push(None);
    }
    lifts.extend((0..pos.len()).map(Some));
    let mut result = true;
    'forall: for lift in lifts {
        let mut rest = pos.clone();
        if let Some(p) = lift {
            rest.remove(p);
        }
        for u in 0..g1.len() {
            let mut answered = false;
            for v in 0..g2.len() {
                if consistent(g1, g2, &rest, u, v) {
                    rest.push((u, v));
                    let ok = exists_survives(g1, g2, pebbles, &mut rest, rounds - 1, memo);
                    rest.pop();
                    if ok {
                        answered = true;
                        break;
                    }
                }
            }
            if !answered {
                result = false;
                break 'forall;
            }
        }
    }
    memo.insert((key, rounds), result);
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chromatic_numbers_of_small_graphs() {
        let b = Budget::unlimited();
        assert_eq!(chromatic_number(&SimpleGraph::complete(3), &b).unwrap(), 3);
        assert_eq!(chromatic_number(&SimpleGraph::cycle(5), &b).unwrap(), 3);
        assert_eq!(chromatic_number(&SimpleGraph::cycle(6), &b).unwrap(), 2);
        let k4k4 = SimpleGraph::complete(4).disjoint_union(&SimpleGraph::complete(4));
        assert_eq!(chromatic_number(&k4k4, &b).unwrap(), 4);
        assert_eq!(chromatic_number(&SimpleGraph::builtin("petersen").unwrap(), &b).unwrap(), 3);
        assert_eq!(chromatic_number(&SimpleGraph::empty(4), &b).unwrap(), 1);
    }

    #[test]
    fn ef_on_complete_graphs() {
        let (k4, k3) = (SimpleGraph::complete(4), SimpleGraph::complete(3));
        assert_eq!(ef_pebble_game(&k4, &k3, 4, 5), Winner::Forall);
        assert_eq!(ef_pebble_game(&k4, &k3, 4, 3), Winner::Exists);
        assert_eq!(ef_pebble_game(&k4, &k3, 3, 20), Winner::Exists);
        assert_eq!(ef_pebble_game(&k4, &k4, 4, 6), Winner::Exists);
    }
}
