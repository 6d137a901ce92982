//! m-dimensional bases and bounded hyperbases over finite atom structures.
//!
//! A basis is found as the greatest fixpoint of an elimination operator on
//! the canonical valid networks with at most m nodes: a network survives while
//! every unwitnessed cylindrifier demand on it has a one-node extension that
//! also survives. Demands are only posed on networks with fewer than m nodes,
//! which is what keeps every network inside the m-node bound.

use crate::atoms::AtomId;
use crate::budget::Budget;
use crate::canon::canonical_form;
use crate::frame::CaAtomStructure;
use crate::games::{
    canonical_seeds, for_each_response, legal_demands, GameSpec, Rounds, SolveError, Variant, EXACT_RAINBOW_LIMIT,
};
use crate::network::{complete_network, for_each_extension, is_valid_network, tuple_of_rank, Network};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub m: usize,
    /// Canonical networks, sorted.
    pub networks: Vec<Network>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn contains(&self, n: &Network) -> bool {
        self.networks.binary_search(&canonical_form(n).0).is_ok()
    }
}

fn g_spec(s: &CaAtomStructure, m: usize) -> Result<GameSpec, SolveError> {
    GameSpec::new(Variant::G, m, Rounds::Omega, s.clone())
}

/// Every canonical valid network on 1..=m nodes, smallest first.
pub fn all_networks_up_to(s: &CaAtomStructure, m: usize, budget: &Budget) -> Result<Vec<Network>, SolveError> {
    let mut level: Vec<Network> = complete_network(s, 1, &BTreeMap::new())
        .iter()
        .map(|n| canonical_form(n).0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut all = level.clone();
    for _ in 1..m {
        let mut next = BTreeSet::new();
        for n in &level {
            if budget.exhausted() {
                return Err(SolveError::Inconclusive("time budget exhausted while listing networks".into()));
            }
            for_each_extension(s, n, &[], &mut |x| {
                next.insert(canonical_form(&x).0);
                true
            });
            if all.len() + next.len() > budget.max_positions {
                return Err(SolveError::Inconclusive(format!(
                    "more than {} networks on at most {m} nodes",
                    budget.max_positions
                )));
            }
        }
        level = next.into_iter().collect();
        all.extend(level.iter().cloned());
    }
    Ok(all)
}

/// The elimination problem: networks and, per network, each demand's responses.
struct Universe {
    nets: Vec<Network>,
    demands: Vec<Vec<Vec<u32>>>,
}

impl Universe {
    fn build(s: &CaAtomStructure, m: usize, budget: &Budget) -> Result<Universe, SolveError> {
        let spec = g_spec(s, m)?;
        let mut nets = all_networks_up_to(s, m, budget)?;
        nets.sort();
        let index: HashMap<&Network, u32> = nets.iter().enumerate().map(|(k, n)| (n, k as u32)).collect();
        let mut demands = Vec::with_capacity(nets.len());
        for n in &nets {
            if budget.exhausted() {
                return Err(SolveError::Inconclusive("time budget exhausted while listing demands".into()));
            }
            let mut ds = Vec::new();
            for d in legal_demands(&spec, n) {
                let mut ids = Vec::new();
                for_each_response(&spec, n, &d, &mut |x| {
                    ids.push(index[&canonical_form(&x).0]);
                    true
                });
                ids.sort_unstable();
                ids.dedup();
                ds.push(ids);
            }
            ds.sort();
            ds.dedup();
            demands.push(ds);
        }
        Ok(Universe { nets, demands })
    }

    fn unmet(&self, alive: &[bool], k: usize) -> bool {
        self.demands[k].iter().any(|rs| rs.iter().all(|&r| !alive[r as usize]))
    }

    /// Synchronous rounds: everything failing against the current set is
    /// removed at once, then the next round starts from the new set.
    fn fixpoint_rounds(&self) -> Vec<bool> {
        let mut alive = vec![true; self.nets.len()];
        loop {
            let dead: Vec<usize> = (0..self.nets.len()).filter(|&k| alive[k] && self.unmet(&alive, k)).collect();
            if dead.is_empty() {
                return alive;
            }
            for k in dead {
                alive[k] = false;
            }
        }
    }

    /// One network at a time, in a shuffled order each sweep.
    fn fixpoint_shuffled(&self, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alive = vec![true; self.nets.len()];
        let mut order: Vec<usize> = (0..self.nets.len()).collect();
        loop {
            order.shuffle(&mut rng);
            let mut changed = false;
            for &k in &order {
                if alive[k] && self.unmet(&alive, k) {
                    alive[k] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    fn into_basis(self, s: &CaAtomStructure, m: usize, alive: &[bool]) -> Option<Basis> {
        let networks: Vec<Network> = self
            .nets
            .into_iter()
            .zip(alive)
            .filter_map(|(n, &a)| a.then_some(n))
            .collect();
        let b = Basis { m, networks };
        covers_all_atoms(s, &b).then_some(b)
    }
}

fn covers_all_atoms(s: &CaAtomStructure, b: &Basis) -> bool {
    s.atoms()
        .into_iter()
        .all(|a| canonical_seeds(s, a).iter().any(|x| b.networks.binary_search(x).is_ok()))
}

fn check_size(s: &CaAtomStructure, m: usize) -> Result<(), SolveError> {
    if m < s.dim() {
        return Err(SolveError::InvalidSpec(format!("m = {m} is below the dimension {}", s.dim())));
    }
    Ok(())
}

/// A rainbow frame where the guided search already proves a ∀ win has no
/// basis, so the fixpoint is skipped there.
fn rainbow_shortcut(s: &CaAtomStructure, m: usize, budget: &Budget) -> Result<Option<()>, SolveError> {
    if let CaAtomStructure::Rainbow(r) = s {
        if crate::hints::rainbow_forall_proof(&g_spec(s, m)?, budget)?.is_some() {
            return Ok(Some(()));
        }
        if r.atom_count() > EXACT_RAINBOW_LIMIT {
            return Err(SolveError::Inconclusive(format!(
                "guided search found no ∀ win and {} atoms exceed the exhaustive limit",
                r.atom_count()
            )));
        }
    }
    Ok(None)
}

pub fn find_basis(s: &CaAtomStructure, m: usize) -> Result<Option<Basis>, SolveError> {
    find_basis_with_budget(s, m, &Budget::from_env())
}

pub fn find_basis_with_budget(s: &CaAtomStructure, m: usize, budget: &Budget) -> Result<Option<Basis>, SolveError> {
    check_size(s, m)?;
    if rainbow_shortcut(s, m, budget)?.is_some() {
        return Ok(None);
    }
    let u = Universe::build(s, m, budget)?;
    let alive = u.fixpoint_rounds();
    Ok(u.into_basis(s, m, &alive))
}

/// Same fixpoint reached through a seeded random elimination order, without
/// any rainbow shortcut.
pub fn find_basis_scheduled(s: &CaAtomStructure, m: usize, seed: u64, budget: &Budget) -> Result<Option<Basis>, SolveError> {
    check_size(s, m)?;
    let u = Universe::build(s, m, budget)?;
    let alive = u.fixpoint_shuffled(seed);
    Ok(u.into_basis(s, m, &alive))
}

pub fn decide_m_square(s: &CaAtomStructure, m: usize) -> Result<bool, SolveError> {
    Ok(find_basis(s, m)?.is_some())
}

/// Checks a basis from scratch: every member valid and on at most m nodes,
/// every atom seeded inside the set, and every demand on a member with room
/// to grow answered by a member.
pub fn check_basis(s: &CaAtomStructure, b: &Basis) -> Result<(), String> {
    let spec = g_spec(s, b.m).map_err(|e| e.to_string())?;
    let members: HashSet<&Network> = b.networks.iter().collect();
    for n in &b.networks {
        if n.size() == 0 || n.size() > b.m {
            return Err(format!("network with {} nodes outside 1..={}", n.size(), b.m));
        }
        if !is_valid_network(s, n) {
            return Err("member is not a valid network".into());
        }
    }
    for a in s.atoms() {
        if !canonical_seeds(s, a).iter().any(|x| members.contains(x)) {
            return Err(format!("atom {} is not covered", s.atom_name(a)));
        }
    }
    for n in &b.networks {
        for d in legal_demands(&spec, n) {
            let met = !for_each_response(&spec, n, &d, &mut |x| !members.contains(&canonical_form(&x).0));
            if !met {
                return Err(format!(
                    "demand {:?} index {} atom {} has no answer in the set",
                    d.tuple,
                    d.index,
                    s.atom_name(d.atom)
                ));
            }
        }
    }
    Ok(())
}

// ---- hyperbases -----------------------------------------------------------------------

/// Network on m node names in which distinct names may denote the same point,
/// plus a hyperlabel for every tuple of names whose length is not the dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypernetwork {
    pub network: Network,
    /// Indexed by [`hyper_tuples`] order; values are below the alphabet size.
    pub hyperlabels: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperbasis {
    pub m: usize,
    pub alphabet: usize,
    pub members: Vec<Hypernetwork>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperbasisOutcome {
    Found(Hyperbasis),
    /// No hyperbasis with at most `lambda_max` hyperlabels.
    NoneAtBound { lambda_max: usize, reason: String },
}

/// Tuples of names with length in 1..=m other than `dim`, shortest first.
pub fn hyper_tuples(dim: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for len in (1..=m).filter(|&l| l != dim) {
        out.extend((0..len).map(|_| 0..m).multi_cartesian_product());
    }
    out
}

/// Splits names into points: `Some((strict network on the points, point of
/// each name))` when the labels come from a strict network through a name map.
pub fn quotient(s: &CaAtomStructure, h: &Network) -> Option<(Network, Vec<usize>)> {
    let dim = h.dim();
    let m = h.size();
    // names u, v coincide when (u, v, v, ...) lies in E_01
    let mut point = vec![usize::MAX; m];
    let mut reps = Vec::new();
    for u in 0..m {
        for (p, &r) in reps.iter().enumerate() {
            let mut t = vec![u; dim];
            t[0] = r;
            if s.in_diag(h.label(&t), 0, 1) {
                point[u] = p;
                break;
            }
        }
        if point[u] == usize::MAX {
            point[u] = reps.len();
            reps.push(u);
        }
    }
    let strict = h.restrict(&reps);
    if !is_valid_network(s, &strict) {
        return None;
    }
    for r in 0..h.tuple_count() {
        let t = h.tuple(r);
        let p: Vec<usize> = t.iter().map(|&x| point[x]).collect();
        if h.labels()[r] != strict.label(&p) {
            return None;
        }
    }
    Some((strict, point))
}

fn restricted_growth(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(cur: &mut Vec<usize>, m: usize, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            rec(cur, m, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    rec(&mut Vec::new(), m, 0, &mut out);
    out
}

fn all_relabellings(n: &Network) -> Vec<Network> {
    let mut v: Vec<Network> = (0..n.size()).permutations(n.size()).map(|p| n.relabel(&p)).collect();
    v.sort();
    v.dedup();
    v
}

fn compose_names(n: &Network, point: &[usize]) -> Network {
    let dim = n.dim();
    let m = point.len();
    let total = m.pow(dim as u32);
    let labels = (0..total)
        .map(|r| {
            let t: Vec<usize> = tuple_of_rank(dim, m, r).iter().map(|&x| point[x]).collect();
            n.label(&t)
        })
        .collect();
    Network::from_labels(dim, m, labels)
}

/// Interns the labels of `h` on the tuples avoiding a set of names.
struct Keys {
    ranks: Vec<usize>,
    ids: HashMap<Vec<AtomId>, u32>,
}

impl Keys {
    fn new(dim: usize, m: usize, avoid: &[usize]) -> Self {
        let ranks = (0..m.pow(dim as u32))
            .filter(|&r| tuple_of_rank(dim, m, r).iter().all(|x| !avoid.contains(x)))
            .collect();
        Keys {
            ranks,
            ids: HashMap::new(),
        }
    }

    fn key(&mut self, h: &Network) -> u32 {
        let v: Vec<AtomId> = self.ranks.iter().map(|&r| h.labels()[r]).collect();
        let next = self.ids.len() as u32;
        *self.ids.entry(v).or_insert(next)
    }
}

struct HyperUniverse {
    dim: usize,
    m: usize,
    nets: Vec<Network>,
    /// key_one[k][h]: class of h under agreement off name k
    key_one: Vec<Vec<u32>>,
    /// key_two[(x, y)][h]: class under agreement off names x and y
    key_two: HashMap<(usize, usize), Vec<u32>>,
}

impl HyperUniverse {
    fn build(s: &CaAtomStructure, m: usize, budget: &Budget) -> Result<HyperUniverse, SolveError> {
        let dim = s.dim();
        let strict = all_networks_up_to(s, m, budget)?;
        let mut by_size: BTreeMap<usize, Vec<Network>> = BTreeMap::new();
        for n in &strict {
            by_size.entry(n.size()).or_default().extend(all_relabellings(n));
        }
        let mut nets = Vec::new();
        for rgs in restricted_growth(m) {
            let p = rgs.iter().max().unwrap() + 1;
            for n in by_size.get(&p).map(|v| v.as_slice()).unwrap_or(&[]) {
                nets.push(compose_names(n, &rgs));
                if nets.len() > budget.max_positions / 8 {
                    return Err(SolveError::Inconclusive(format!(
                        "more than {} hypernetworks on {m} names",
                        budget.max_positions / 8
                    )));
                }
            }
            if budget.exhausted() {
                return Err(SolveError::Inconclusive("time budget exhausted while listing hypernetworks".into()));
            }
        }
        let mut key_one = Vec::new();
        for k in 0..m {
            let mut keys = Keys::new(dim, m, &[k]);
            key_one.push(nets.iter().map(|h| keys.key(h)).collect());
        }
        let mut key_two = HashMap::new();
        for x in 0..m {
            for y in x + 1..m {
                let mut keys = Keys::new(dim, m, &[x, y]);
                key_two.insert((x, y), nets.iter().map(|h| keys.key(h)).collect());
            }
        }
        Ok(HyperUniverse {
            dim,
            m,
            nets,
            key_one,
            key_two,
        })
    }

    /// Indices failing the cylindrifier property against `alive`.
    fn cyl_failures(&self, s: &CaAtomStructure, alive: &[bool]) -> Vec<usize> {
        let (dim, m) = (self.dim, self.m);
        // available[k]: (class off k, tuple rank, atom) realised by a live member
        let mut available: Vec<HashSet<(u32, usize, AtomId)>> = vec![HashSet::new(); m];
        for (k, avail) in available.iter_mut().enumerate() {
            for (h, n) in self.nets.iter().enumerate() {
                if !alive[h] {
                    continue;
                }
                let c = self.key_one[k][h];
                for r in 0..n.tuple_count() {
                    if n.tuple(r).contains(&k) {
                        avail.insert((c, r, n.labels()[r]));
                    }
                }
            }
        }
        let mut bad = Vec::new();
        'nets: for (h, n) in self.nets.iter().enumerate() {
            if !alive[h] {
                continue;
            }
            for r in 0..n.tuple_count() {
                let t = n.tuple(r);
                for i in 0..dim {
                    let class = s.cyl_class(n.labels()[r], i);
                    for k in 0..m {
                        if (0..dim).any(|j| j != i && t[j] == k) {
                            continue;
                        }
                        let mut u = t.clone();
                        u[i] = k;
                        let ur = n.rank(&u);
                        let c = self.key_one[k][h];
                        if class.iter().any(|&b| !available[k].contains(&(c, ur, b))) {
                            bad.push(h);
                            continue 'nets;
                        }
                    }
                }
            }
        }
        bad
    }

    /// Indices M with some N ≡_{xy} M lacking an L with M ≡_x L ≡_y N.
    fn amalgamation_failures(&self, alive: &[bool]) -> Vec<usize> {
        let mut bad = vec![false; self.nets.len()];
        for x in 0..self.m {
            for y in 0..self.m {
                if x == y {
                    continue;
                }
                let kxy = &self.key_two[&(x.min(y), x.max(y))];
                let (kx, ky) = (&self.key_one[x], &self.key_one[y]);
                let mut pairs = HashSet::new();
                let mut groups: HashMap<u32, (BTreeSet<u32>, BTreeSet<u32>)> = HashMap::new();
                for h in (0..self.nets.len()).filter(|&h| alive[h]) {
                    pairs.insert((kx[h], ky[h]));
                    let g = groups.entry(kxy[h]).or_default();
                    g.0.insert(kx[h]);
                    g.1.insert(ky[h]);
                }
                for h in (0..self.nets.len()).filter(|&h| alive[h]) {
                    let (_, ys) = &groups[&kxy[h]];
                    if ys.iter().any(|&yv| !pairs.contains(&(kx[h], yv))) {
                        bad[h] = true;
                    }
                }
            }
        }
        (0..self.nets.len()).filter(|&h| bad[h]).collect()
    }

    fn fixpoint(&self, s: &CaAtomStructure, amalgamate: bool, budget: &Budget) -> Result<Vec<bool>, SolveError> {
        let mut alive = vec![true; self.nets.len()];
        loop {
            if budget.exhausted() {
                return Err(SolveError::Inconclusive("time budget exhausted in hyperbasis elimination".into()));
            }
            let mut dead = self.cyl_failures(s, &alive);
            if amalgamate {
                dead.extend(self.amalgamation_failures(&alive));
            }
            if dead.is_empty() {
                return Ok(alive);
            }
            for h in dead {
                alive[h] = false;
            }
        }
    }

    fn covers(&self, s: &CaAtomStructure, alive: &[bool]) -> bool {
        let first: Vec<usize> = (0..self.dim).collect();
        let mut seen = HashSet::new();
        for (h, n) in self.nets.iter().enumerate() {
            if alive[h] && self.dim <= self.m {
                seen.insert(n.label(&first));
            }
        }
        s.atoms().iter().all(|a| seen.contains(a))
    }
}

pub fn find_hyperbasis(s: &CaAtomStructure, m: usize, lambda_max: usize) -> Result<HyperbasisOutcome, SolveError> {
    find_hyperbasis_with_budget(s, m, lambda_max, &Budget::from_env())
}

/// Searches for a hyperbasis with at most `lambda_max` hyperlabels.
///
/// The one-label search is exact. A larger alphabet only relaxes the
/// amalgamation condition, so when the one-label fixpoint fails but the
/// cylindrifier-only fixpoint still covers every atom, bounds above one
/// are reported as inconclusive.
pub fn find_hyperbasis_with_budget(
    s: &CaAtomStructure,
    m: usize,
    lambda_max: usize,
    budget: &Budget,
) -> Result<HyperbasisOutcome, SolveError> {
    check_size(s, m)?;
    if lambda_max == 0 {
        return Ok(HyperbasisOutcome::NoneAtBound {
            lambda_max,
            reason: "an empty hyperlabel alphabet cannot label any hyperedge".into(),
        });
    }
    // a hyperbasis restricts to a basis, so no basis means no hyperbasis
    if find_basis_with_budget(s, m, budget)?.is_none() {
        return Ok(HyperbasisOutcome::NoneAtBound {
            lambda_max,
            reason: format!("there is no {m}-dimensional basis"),
        });
    }
    let u = HyperUniverse::build(s, m, budget)?;
    let cyl_only = u.fixpoint(s, false, budget)?;
    if !u.covers(s, &cyl_only) {
        return Ok(HyperbasisOutcome::NoneAtBound {
            lambda_max,
            reason: "the cylindrifier property alone already loses an atom".into(),
        });
    }
    let alive = u.fixpoint(s, true, budget)?;
    if u.covers(s, &alive) {
        let tuples = hyper_tuples(s.dim(), m).len();
        let members = u
            .nets
            .iter()
            .zip(&alive)
            .filter(|(_, &a)| a)
            .map(|(n, _)| Hypernetwork {
                network: n.clone(),
                hyperlabels: vec![0; tuples],
            })
            .collect();
        let hb = Hyperbasis {
            m,
            alphabet: 1,
            members,
        };
        check_hyperbasis(s, &hb).map_err(|e| SolveError::Inconclusive(format!("hyperbasis failed verification: {e}")))?;
        return Ok(HyperbasisOutcome::Found(hb));
    }
    if lambda_max == 1 {
        return Ok(HyperbasisOutcome::NoneAtBound {
            lambda_max,
            reason: "the one-label amalgamation fixpoint loses an atom".into(),
        });
    }
    Err(SolveError::Inconclusive(format!(
        "no one-label hyperbasis; alphabets of size 2..={lambda_max} were not decided"
    )))
}

/// Direct check of the hyperbasis conditions by pairwise comparison.
pub fn check_hyperbasis(s: &CaAtomStructure, hb: &Hyperbasis) -> Result<(), String> {
    let dim = s.dim();
    let m = hb.m;
    let tuples = hyper_tuples(dim, m);
    for h in &hb.members {
        if h.network.size() != m || h.network.dim() != dim {
            return Err("member has the wrong shape".into());
        }
        let Some((_, point)) = quotient(s, &h.network) else {
            return Err("member is not a network on its points".into());
        };
        if h.hyperlabels.len() != tuples.len() || h.hyperlabels.iter().any(|&l| l as usize >= hb.alphabet) {
            return Err("member has malformed hyperlabels".into());
        }
        // tuples naming the same points carry the same hyperlabel
        let mut seen: HashMap<Vec<usize>, u16> = HashMap::new();
        for (t, &l) in tuples.iter().zip(&h.hyperlabels) {
            let p: Vec<usize> = t.iter().map(|&x| point[x]).collect();
            if *seen.entry(p).or_insert(l) != l {
                return Err("hyperlabels break the congruence rule".into());
            }
        }
    }
    let first: Vec<usize> = (0..dim).collect();
    for a in s.atoms() {
        if !hb.members.iter().any(|h| h.network.label(&first) == a) {
            return Err(format!("atom {} is not covered", s.atom_name(a)));
        }
    }
    // labels and hyperlabels on the tuples avoiding some names
    let off = |h: &Hypernetwork, avoid: &[usize]| -> (Vec<AtomId>, Vec<u16>) {
        let n = &h.network;
        let labels = (0..n.tuple_count())
            .filter(|&r| n.tuple(r).iter().all(|v| !avoid.contains(v)))
            .map(|r| n.labels()[r])
            .collect();
        let hyper = tuples
            .iter()
            .zip(&h.hyperlabels)
            .filter(|(t, _)| t.iter().all(|v| !avoid.contains(v)))
            .map(|(_, &l)| l)
            .collect();
        (labels, hyper)
    };
    for k in 0..m {
        let mut groups: HashMap<(Vec<AtomId>, Vec<u16>), Vec<&Hypernetwork>> = HashMap::new();
        for h in &hb.members {
            groups.entry(off(h, &[k])).or_default().push(h);
        }
        for h in &hb.members {
            let group = &groups[&off(h, &[k])];
            let n = &h.network;
            for r in 0..n.tuple_count() {
                let t = n.tuple(r);
                for i in 0..dim {
                    // the moved node may not be one that stays in the tuple
                    if (0..dim).any(|j| j != i && t[j] == k) {
                        continue;
                    }
                    let mut u = t.clone();
                    u[i] = k;
                    for b in s.cyl_class(n.labels()[r], i) {
                        if !group.iter().any(|l| l.network.label(&u) == b) {
                            return Err(format!("cylindrifier demand {t:?} index {i} node {k} unmet"));
                        }
                    }
                }
            }
        }
    }
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let mut amalgams = HashSet::new();
            let mut groups: HashMap<_, (HashSet<_>, HashSet<_>)> = HashMap::new();
            for h in &hb.members {
                let (kx, ky) = (off(h, &[x]), off(h, &[y]));
                amalgams.insert((kx.clone(), ky.clone()));
                let g = groups.entry(off(h, &[x, y])).or_default();
                g.0.insert(kx);
                g.1.insert(ky);
            }
            for (xs, ys) in groups.values() {
                for kx in xs {
                    for ky in ys {
                        if !amalgams.contains(&(kx.clone(), ky.clone())) {
                            return Err(format!("no amalgam for names {x} and {y}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Forgets hyperlabels, collapses names to points and closes under
/// restriction to point subsets.
pub fn hyperbasis_to_basis(s: &CaAtomStructure, hb: &Hyperbasis) -> Basis {
    let mut out = BTreeSet::new();
    for h in &hb.members {
        let Some((strict, _)) = quotient(s, &h.network) else { continue };
        let p = strict.size();
        for mask in 1u32..(1 << p) {
            let keep: Vec<usize> = (0..p).filter(|&v| mask >> v & 1 == 1).collect();
            out.insert(canonical_form(&strict.restrict(&keep)).0);
        }
    }
    Basis {
        m: hb.m,
        networks: out.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullset::build_full_set_structure;

    #[test]
    fn full_set_frames_have_bases() {
        let s = CaAtomStructure::from(build_full_set_structure(3, 2).unwrap());
        for m in 3..=4 {
            let b = find_basis_with_budget(&s, m, &Budget::unlimited()).unwrap().expect("basis");
            check_basis(&s, &b).unwrap();
        }
    }

    #[test]
    fn growth_strings_count_partitions() {
        let bell = [1, 1, 2, 5, 15, 52];
        for (m, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(restricted_growth(m).len(), b);
        }
    }

    #[test]
    fn quotient_recovers_points() {
        let s = CaAtomStructure::from(build_full_set_structure(3, 3).unwrap());
        let b = all_networks_up_to(&s, 2, &Budget::unlimited()).unwrap();
        let two = b.iter().find(|n| n.size() == 2).unwrap();
        let h = compose_names(two, &[0, 1, 0, 1]);
        let (q, point) = quotient(&s, &h).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(point, vec![0, 1, 0, 1]);
    }
}
