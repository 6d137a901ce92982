//! Atomic network games G^m_k and F^m: move rules, exact solving and
//! certificate checking.
//!
//! Rules as implemented:
//! * Initial round: ∀ picks an atom a, ∃ answers with a network on the blocks
//!   of a's kernel whose kernel tuple is labelled a. No such network: ∀ wins.
//! * A round of G^m: ∀ picks a tuple x, an index i and an atom a with
//!   N(x) T_i a that no existing node witnesses, and only while N has fewer
//!   than m nodes. ∃ adds a fresh node z with N(x[i -> z]) = a.
//! * A round of F^m: ∀ also names the target node k outside x (off i): a fresh
//!   node while N has fewer than m nodes, or any occupied node, which is then
//!   removed and re-added. Demands may already be witnessed.
//! * The rounds of G^m_k count the demands after the initial round.

use crate::atoms::AtomId;
use crate::budget::Budget;
use crate::canon::canonical_form;
use crate::frame::CaAtomStructure;
use crate::network::{for_each_extension, has_extension, is_valid_network, seed_networks, Network};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    G,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rounds {
    Finite(u32),
    Omega,
}

impl fmt::Display for Rounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rounds::Finite(k) => write!(f, "{k}"),
            Rounds::Omega => write!(f, "omega"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameSpec {
    pub variant: Variant,
    pub pebbles: usize,
    pub rounds: Rounds,
    pub structure: CaAtomStructure,
}

impl GameSpec {
    pub fn new(variant: Variant, pebbles: usize, rounds: Rounds, structure: CaAtomStructure) -> Result<Self, SolveError> {
        if pebbles < structure.dim() {
            return Err(SolveError::InvalidSpec(format!(
                "{pebbles} pebbles is fewer than the dimension {}",
                structure.dim()
            )));
        }
        if pebbles > 12 {
            return Err(SolveError::InvalidSpec("at most 12 pebbles are supported".into()));
        }
        Ok(GameSpec {
            variant,
            pebbles,
            rounds,
            structure,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Winner {
    Exists,
    Forall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Fresh,
    Node(usize),
}

/// A cylindrifier move: find a witness for `atom` at position `index` of `tuple`.
/// The tuple is normalized so that `tuple[index]` repeats the first other entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Demand {
    pub tuple: Vec<usize>,
    pub index: usize,
    pub atom: AtomId,
    pub target: Target,
}

impl Demand {
    /// The same demand after renaming node u to `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> Demand {
        Demand {
            tuple: self.tuple.iter().map(|&x| perm[x]).collect(),
            index: self.index,
            atom: self.atom,
            target: match self.target {
                Target::Fresh => Target::Fresh,
                Target::Node(k) => Target::Node(perm[k]),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcingNode {
    pub position: Network,
    pub demand: Demand,
    /// Number of rounds within which this demand forces a win; responses
    /// must lead to nodes of rank at most `rank - 1`.
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyCert {
    /// Safe set for ∃: canonical positions with the rounds still to survive
    /// (`None` for all rounds).
    Exists { positions: Vec<(Network, Option<u32>)> },
    /// Forcing DAG for ∀ rooted at the initial choice of atom.
    Forall { root_atom: AtomId, nodes: Vec<ForcingNode> },
}

impl StrategyCert {
    pub fn winner(&self) -> Winner {
        match self {
            StrategyCert::Exists { .. } => Winner::Exists,
            StrategyCert::Forall { .. } => Winner::Forall,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StrategyCert::Exists { positions } => positions.len(),
            StrategyCert::Forall { nodes, .. } => nodes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub positions: usize,
    pub method: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub winner: Winner,
    pub certificate: StrategyCert,
    pub stats: SolveStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid game: {0}")]
    InvalidSpec(String),
}

// ---- move rules ---------------------------------------------------------------------

fn first_other(i: usize) -> usize {
    if i == 0 {
        1
    } else {
        0
    }
}

/// `t` with position i overwritten by the first other entry.
pub fn normalize_tuple(t: &[usize], i: usize) -> Vec<usize> {
    let mut u = t.to_vec();
    u[i] = u[first_other(i)];
    u
}

fn room(spec: &GameSpec, pos: &Network) -> bool {
    pos.size() < spec.pebbles
}

/// All legal ∀ demands at `pos`, ordered by tuple rank, index, atom, target.
pub fn legal_demands(spec: &GameSpec, pos: &Network) -> Vec<Demand> {
    let s = &spec.structure;
    let n = s.dim();
    let mut out = Vec::new();
    if spec.variant == Variant::G && !room(spec, pos) {
        return out;
    }
    for r in 0..pos.tuple_count() {
        let t = pos.tuple(r);
        for i in 0..n {
            if t[i] != t[first_other(i)] {
                continue;
            }
            let lab = pos.labels()[r];
            for a in s.cyl_class(lab, i) {
                match spec.variant {
                    Variant::G => {
                        if pos.witness(&t, i, a).is_none() {
                            out.push(Demand {
                                tuple: t.clone(),
                                index: i,
                                atom: a,
                                target: Target::Fresh,
                            });
                        }
                    }
                    Variant::F => {
                        if room(spec, pos) {
                            out.push(Demand {
                                tuple: t.clone(),
                                index: i,
                                atom: a,
                                target: Target::Fresh,
                            });
                        }
                        for k in 0..pos.size() {
                            if !t.contains(&k) {
                                out.push(Demand {
                                    tuple: t.clone(),
                                    index: i,
                                    atom: a,
                                    target: Target::Node(k),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn demand_is_legal(spec: &GameSpec, pos: &Network, d: &Demand) -> bool {
    let s = &spec.structure;
    let n = s.dim();
    if d.tuple.len() != n || d.index >= n || d.tuple.iter().any(|&x| x >= pos.size()) {
        return false;
    }
    if d.tuple[d.index] != d.tuple[first_other(d.index)] {
        return false;
    }
    if !s.contains(d.atom) || !s.cyl_related(pos.label(&d.tuple), d.atom, d.index) {
        return false;
    }
    match (spec.variant, d.target) {
        (Variant::G, Target::Fresh) => room(spec, pos) && pos.witness(&d.tuple, d.index, d.atom).is_none(),
        (Variant::G, Target::Node(_)) => false,
        (Variant::F, Target::Fresh) => room(spec, pos),
        (Variant::F, Target::Node(k)) => k < pos.size() && !d.tuple.contains(&k),
    }
}

/// The network ∃ extends and the constraint tuple through the new node.
fn response_base(pos: &Network, d: &Demand) -> (Network, Vec<usize>) {
    let (base, mut t) = match d.target {
        Target::Fresh => (pos.clone(), d.tuple.clone()),
        Target::Node(k) => {
            let t = d.tuple.iter().map(|&x| if x > k { x - 1 } else { x }).collect();
            (pos.remove_node(k), t)
        }
    };
    t[d.index] = base.size();
    (base, t)
}

/// Every ∃ response to a legal demand (not canonicalized).
pub fn responses(spec: &GameSpec, pos: &Network, d: &Demand) -> Vec<Network> {
    let mut out = Vec::new();
    for_each_response(spec, pos, d, &mut |m| {
        out.push(m);
        true
    });
    out
}

pub fn for_each_response(spec: &GameSpec, pos: &Network, d: &Demand, visit: &mut dyn FnMut(Network) -> bool) -> bool {
    let (base, t) = response_base(pos, d);
    for_each_extension(&spec.structure, &base, &[(t, d.atom)], visit)
}

pub fn has_response(spec: &GameSpec, pos: &Network, d: &Demand) -> bool {
    let (base, t) = response_base(pos, d);
    has_extension(&spec.structure, &base, &[(t, d.atom)])
}

/// Canonical seeds ∃ may answer atom `a` with in the initial round.
pub fn canonical_seeds(s: &CaAtomStructure, a: AtomId) -> Vec<Network> {
    let mut v: Vec<Network> = seed_networks(s, a).iter().map(|n| canonical_form(n).0).collect();
    v.sort();
    v.dedup();
    v
}

// ---- exact solving ------------------------------------------------------------------

/// Rainbow frames up to this many atoms may fall back to the exhaustive solver.
pub const EXACT_RAINBOW_LIMIT: u64 = 30_000;

pub fn solve_game(spec: &GameSpec) -> Result<Outcome, SolveError> {
    solve_game_with_budget(spec, &Budget::from_env())
}

pub fn solve_game_with_budget(spec: &GameSpec, budget: &Budget) -> Result<Outcome, SolveError> {
    if let CaAtomStructure::Rainbow(r) = &spec.structure {
        if let Some((cert, visited)) = crate::hints::rainbow_forall_proof(spec, budget)? {
            return Ok(Outcome {
                winner: Winner::Forall,
                certificate: cert,
                stats: SolveStats {
                    positions: visited,
                    method: "guided cone search".into(),
                },
            });
        }
        if r.atom_count() > EXACT_RAINBOW_LIMIT {
            return Err(SolveError::Inconclusive(format!(
                "guided search found no ∀ win and {} atoms exceed the exhaustive limit",
                r.atom_count()
            )));
        }
    }
    solve_exhaustive(spec, budget)
}

/// Exhaustive solver that ignores any frame-specific guidance.
pub fn solve_exhaustive(spec: &GameSpec, budget: &Budget) -> Result<Outcome, SolveError> {
    match spec.rounds {
        Rounds::Omega => solve_omega(spec, budget),
        Rounds::Finite(k) => solve_finite(spec, k, budget),
    }
}

struct Arena {
    positions: Vec<Network>,
    index: HashMap<Network, usize>,
}

impl Arena {
    fn new() -> Self {
        Arena {
            positions: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn intern(&mut self, n: Network) -> (usize, bool) {
        if let Some(&id) = self.index.get(&n) {
            return (id, false);
        }
        let id = self.positions.len();
        self.index.insert(n.clone(), id);
        self.positions.push(n);
        (id, true)
    }
}

type Moves = Vec<(Demand, Vec<usize>)>;

fn expand(spec: &GameSpec, arena: &mut Arena, p: usize) -> Moves {
    let pos = arena.positions[p].clone();
    let mut moves = Vec::new();
    for d in legal_demands(spec, &pos) {
        let mut ids: Vec<usize> = Vec::new();
        for_each_response(spec, &pos, &d, &mut |m| {
            ids.push(arena.intern(canonical_form(&m).0).0);
            true
        });
        ids.sort_unstable();
        ids.dedup();
        moves.push((d, ids));
    }
    moves
}

fn all_atoms(s: &CaAtomStructure) -> Vec<AtomId> {
    s.atoms()
}

fn solve_omega(spec: &GameSpec, budget: &Budget) -> Result<Outcome, SolveError> {
    let s = &spec.structure;
    let mut arena = Arena::new();
    let mut roots: Vec<(AtomId, Vec<usize>)> = Vec::new();
    for a in all_atoms(s) {
        let ids = canonical_seeds(s, a).into_iter().map(|n| arena.intern(n).0).collect();
        roots.push((a, ids));
    }
    let mut moves: Vec<Moves> = Vec::new();
    let mut queue: VecDeque<usize> = (0..arena.positions.len()).collect();
    while let Some(p) = queue.pop_front() {
        if budget.exhausted() {
            return Err(SolveError::Inconclusive("time budget exhausted while exploring positions".into()));
        }
        if arena.positions.len() > budget.max_positions {
            return Err(SolveError::Inconclusive(format!(
                "more than {} positions",
                budget.max_positions
            )));
        }
        let before = arena.positions.len();
        let mv = expand(spec, &mut arena, p);
        if moves.len() <= p {
            moves.resize_with(p + 1, Vec::new);
        }
        moves[p] = mv;
        queue.extend(before..arena.positions.len());
    }
    let total = arena.positions.len();
    moves.resize_with(total, Vec::new);

    // backward propagation of ∀ wins
    let mut rank: Vec<Option<u32>> = vec![None; total];
    let mut choice: Vec<usize> = vec![usize::MAX; total];
    let mut pending: Vec<Vec<usize>> = moves.iter().map(|mv| mv.iter().map(|(_, r)| r.len()).collect()).collect();
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); total];
    for (p, mv) in moves.iter().enumerate() {
        for (d, (_, rs)) in mv.iter().enumerate() {
            for &q in rs {
                preds[q].push((p, d));
            }
        }
    }
    let mut work = VecDeque::new();
    for (p, mv) in moves.iter().enumerate() {
        if let Some(d) = mv.iter().position(|(_, rs)| rs.is_empty()) {
            rank[p] = Some(1);
            choice[p] = d;
            work.push_back(p);
        }
    }
    while let Some(q) = work.pop_front() {
        for &(p, d) in &preds[q] {
            pending[p][d] -= 1;
            if pending[p][d] == 0 && rank[p].is_none() {
                let r = 1 + moves[p][d].1.iter().map(|&x| rank[x].unwrap()).max().unwrap_or(0);
                rank[p] = Some(r);
                choice[p] = d;
                work.push_back(p);
            }
        }
    }

    let mut best: Option<(u32, AtomId, &Vec<usize>)> = None;
    for (a, ids) in &roots {
        if ids.iter().all(|&p| rank[p].is_some()) {
            let r = ids.iter().map(|&p| rank[p].unwrap()).max().unwrap_or(0);
            if best.is_none_or(|(br, _, _)| r < br) {
                best = Some((r, *a, ids));
            }
        }
    }
    let stats = SolveStats {
        positions: total,
        method: "exhaustive attractor".into(),
    };
    match best {
        Some((_, a, ids)) => {
            let mut nodes = Vec::new();
            let mut seen = HashSet::new();
            let mut stack: Vec<usize> = ids.clone();
            while let Some(p) = stack.pop() {
                if !seen.insert(p) {
                    continue;
                }
                let (d, rs) = &moves[p][choice[p]];
                nodes.push(ForcingNode {
                    position: arena.positions[p].clone(),
                    demand: d.clone(),
                    rank: rank[p].unwrap(),
                });
                stack.extend(rs.iter().copied());
            }
            nodes.sort_by(|x, y| x.position.cmp(&y.position));
            Ok(Outcome {
                winner: Winner::Forall,
                certificate: StrategyCert::Forall { root_atom: a, nodes },
                stats,
            })
        }
        None => {
            let mut positions: Vec<(Network, Option<u32>)> = (0..total)
                .filter(|&p| rank[p].is_none())
                .map(|p| (arena.positions[p].clone(), None))
                .collect();
            positions.sort();
            Ok(Outcome {
                winner: Winner::Exists,
                certificate: StrategyCert::Exists { positions },
                stats,
            })
        }
    }
}

struct Finite<'a> {
    spec: &'a GameSpec,
    budget: &'a Budget,
    arena: Arena,
    moves: HashMap<usize, Moves>,
    memo: HashMap<(usize, u32), Option<(u32, usize)>>,
}

impl Finite<'_> {
    fn moves(&mut self, p: usize) -> Moves {
        if let Some(m) = self.moves.get(&p) {
            return m.clone();
        }
        let m = expand(self.spec, &mut self.arena, p);
        self.moves.insert(p, m.clone());
        m
    }

    /// ∀'s rank and chosen demand at p with r rounds left, if ∀ wins.
    fn forall(&mut self, p: usize, r: u32) -> Result<Option<(u32, usize)>, SolveError> {
        if r == 0 {
            return Ok(None);
        }
        if let Some(&v) = self.memo.get(&(p, r)) {
            return Ok(v);
        }
        if self.budget.exhausted() || self.arena.positions.len() > self.budget.max_positions {
            return Err(SolveError::Inconclusive("budget exhausted in finite-round search".into()));
        }
        let mv = self.moves(p);
        let mut result = None;
        'd: for (d, (_, rs)) in mv.iter().enumerate() {
            let mut worst = 0;
            for &q in rs {
                match self.forall(q, r - 1)? {
                    Some((rq, _)) => worst = worst.max(rq),
                    None => continue 'd,
                }
            }
            result = Some((worst + 1, d));
            break;
        }
        self.memo.insert((p, r), result);
        Ok(result)
    }
}

fn solve_finite(spec: &GameSpec, k: u32, budget: &Budget) -> Result<Outcome, SolveError> {
    let s = &spec.structure;
    let mut st = Finite {
        spec,
        budget,
        arena: Arena::new(),
        moves: HashMap::new(),
        memo: HashMap::new(),
    };
    let mut roots = Vec::new();
    for a in all_atoms(s) {
        let ids: Vec<usize> = canonical_seeds(s, a).into_iter().map(|n| st.arena.intern(n).0).collect();
        roots.push((a, ids));
    }
    for (a, ids) in &roots {
        let mut all = true;
        for &p in ids {
            if st.forall(p, k)?.is_none() {
                all = false;
                break;
            }
        }
        if all {
            // collect the forcing DAG, one node per position (its smallest rank)
            let mut nodes: HashMap<usize, ForcingNode> = HashMap::new();
            let mut stack: Vec<(usize, u32)> = ids.iter().map(|&p| (p, k)).collect();
            let mut seen = HashSet::new();
            while let Some((p, r)) = stack.pop() {
                if !seen.insert((p, r)) {
                    continue;
                }
                let (rank, d) = st.forall(p, r)?.expect("won position");
                let mv = st.moves(p);
                let better = nodes.get(&p).is_none_or(|n| rank < n.rank);
                if better {
                    nodes.insert(
                        p,
                        ForcingNode {
                            position: st.arena.positions[p].clone(),
                            demand: mv[d].0.clone(),
                            rank,
                        },
                    );
                }
                for &q in &mv[d].1 {
                    stack.push((q, r - 1));
                }
            }
            let mut nodes: Vec<ForcingNode> = nodes.into_values().collect();
            nodes.sort_by(|x, y| x.position.cmp(&y.position));
            return Ok(Outcome {
                winner: Winner::Forall,
                certificate: StrategyCert::Forall { root_atom: *a, nodes },
                stats: SolveStats {
                    positions: st.arena.positions.len(),
                    method: "memoized and-or search".into(),
                },
            });
        }
    }
    // ∃ wins: close a safe set from one surviving seed per atom
    let mut safe: HashSet<(usize, u32)> = HashSet::new();
    let mut stack = Vec::new();
    for (_, ids) in &roots {
        let mut chosen = None;
        for &p in ids {
            if st.forall(p, k)?.is_none() {
                chosen = Some(p);
                break;
            }
        }
        stack.push((chosen.expect("∃ survives every atom"), k));
    }
    while let Some((p, r)) = stack.pop() {
        if !safe.insert((p, r)) || r == 0 {
            continue;
        }
        for (_, rs) in st.moves(p) {
            let mut found = None;
            for &q in &rs {
                if st.forall(q, r - 1)?.is_none() {
                    found = Some(q);
                    break;
                }
            }
            stack.push((found.expect("∃ has a surviving response"), r - 1));
        }
    }
    let mut positions: Vec<(Network, Option<u32>)> =
        safe.into_iter().map(|(p, r)| (st.arena.positions[p].clone(), Some(r))).collect();
    positions.sort();
    Ok(Outcome {
        winner: Winner::Exists,
        certificate: StrategyCert::Exists { positions },
        stats: SolveStats {
            positions: st.arena.positions.len(),
            method: "memoized and-or search".into(),
        },
    })
}

// ---- certificate checking -----------------------------------------------------------

/// Checks a certificate against the move rules alone. Positions are
/// re-canonicalized and every ∃ response is regenerated.
pub fn verify_strategy(spec: &GameSpec, cert: &StrategyCert) -> Result<(), String> {
    let s = &spec.structure;
    match cert {
        StrategyCert::Forall { root_atom, nodes } => {
            if !s.contains(*root_atom) {
                return Err(format!("root atom {root_atom} is not an atom"));
            }
            let mut by_pos: HashMap<Network, (u32, usize)> = HashMap::new();
            for (k, node) in nodes.iter().enumerate() {
                if node.rank == 0 {
                    return Err("rank 0 node".into());
                }
                let c = canonical_form(&node.position).0;
                let e = by_pos.entry(c).or_insert((node.rank, k));
                if node.rank < e.0 {
                    *e = (node.rank, k);
                }
            }
            let limit = match spec.rounds {
                Rounds::Finite(k) => k,
                Rounds::Omega => u32::MAX,
            };
            for seed in canonical_seeds(s, *root_atom) {
                match by_pos.get(&seed) {
                    Some(&(r, _)) if r <= limit => {}
                    Some(&(r, _)) => return Err(format!("seed needs {r} rounds, more than {limit}")),
                    None => return Err("a seed of the root atom has no forcing node".into()),
                }
            }
            for node in nodes {
                let pos = &node.position;
                if pos.dim() != s.dim() || pos.size() > spec.pebbles || !is_valid_network(s, pos) {
                    return Err("forcing node holds an invalid position".into());
                }
                if !demand_is_legal(spec, pos, &node.demand) {
                    return Err(format!("illegal demand {:?}", node.demand));
                }
                let mut err = None;
                for_each_response(spec, pos, &node.demand, &mut |m| {
                    let c = canonical_form(&m).0;
                    match by_pos.get(&c) {
                        Some(&(r, _)) if r < node.rank => true,
                        Some(&(r, _)) => {
                            err = Some(format!("response rank {r} not below {}", node.rank));
                            false
                        }
                        None => {
                            err = Some("an ∃ response escapes the forcing DAG".to_string());
                            false
                        }
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
            Ok(())
        }
        StrategyCert::Exists { positions } => {
            let mut safe: HashMap<Network, Option<u32>> = HashMap::new();
            for (p, r) in positions {
                let c = canonical_form(p).0;
                let e = safe.entry(c).or_insert(*r);
                *e = match (*e, *r) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(a.max(b)),
                };
            }
            let covers = |have: Option<u32>, need: Option<u32>| match (have, need) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(h), Some(n)) => h >= n,
            };
            let need_root = match spec.rounds {
                Rounds::Finite(k) => Some(k),
                Rounds::Omega => None,
            };
            if !s.is_enumerable() {
                return Err("frame too large to check atom coverage".into());
            }
            for a in s.atoms() {
                let ok = canonical_seeds(s, a)
                    .iter()
                    .any(|n| safe.get(n).is_some_and(|&h| covers(h, need_root)));
                if !ok {
                    return Err(format!("no safe answer to atom {}", s.atom_name(a)));
                }
            }
            for (p, r) in &safe {
                if p.size() > spec.pebbles || !is_valid_network(s, p) {
                    return Err("safe set holds an invalid position".into());
                }
                if *r == Some(0) {
                    continue;
                }
                let need = r.map(|x| x - 1);
                for d in legal_demands(spec, p) {
                    let mut ok = false;
                    for_each_response(spec, p, &d, &mut |m| {
                        let c = canonical_form(&m).0;
                        ok = safe.get(&c).is_some_and(|&h| covers(h, need));
                        !ok
                    });
                    if !ok {
                        return Err(format!("demand {d:?} has no safe response"));
                    }
                }
            }
            Ok(())
        }
    }
}

/// Builds a ∀ certificate by following `policy` from the seeds of `root_atom`.
/// The policy sees positions in play order (new nodes appended).
pub fn forall_cert_from_policy(
    spec: &GameSpec,
    root_atom: AtomId,
    policy: &dyn Fn(&Network) -> Option<Demand>,
) -> Result<StrategyCert, String> {
    fn go(
        spec: &GameSpec,
        pos: &Network,
        policy: &dyn Fn(&Network) -> Option<Demand>,
        done: &mut HashMap<Network, ForcingNode>,
        depth: usize,
    ) -> Result<u32, String> {
        let (c, perm) = canonical_form(pos);
        if let Some(n) = done.get(&c) {
            return Ok(n.rank);
        }
        if depth > 64 {
            return Err("policy does not terminate".into());
        }
        let d = policy(pos).ok_or("policy has no move")?;
        if !demand_is_legal(spec, pos, &d) {
            return Err(format!("policy demand {d:?} is illegal"));
        }
        let mut worst = 0;
        for m in responses(spec, pos, &d) {
            worst = worst.max(go(spec, &m, policy, done, depth + 1)?);
        }
        let node = ForcingNode {
            position: c.clone(),
            demand: d.relabel(&perm),
            rank: worst + 1,
        };
        done.insert(c, node);
        Ok(worst + 1)
    }
    let mut done = HashMap::new();
    for seed in seed_networks(&spec.structure, root_atom) {
        go(spec, &seed, policy, &mut done, 0)?;
    }
    let mut nodes: Vec<ForcingNode> = done.into_values().collect();
    nodes.sort_by(|x, y| x.position.cmp(&y.position));
    Ok(StrategyCert::Forall { root_atom, nodes })
}
