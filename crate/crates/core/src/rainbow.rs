//! Rainbow atom structures. Atoms are coloured graphs on the blocks of a
//! partition of the n positions, packed into a `u64`; relations are computed
//! from the graphs on demand, so frames with billions of atoms stay implicit.

use crate::atoms::{pair_count, pair_index, pairs, AtomId};
use crate::frame::{explicit_from_faces, ExplicitCa, StructureError, ENUMERATION_LIMIT};
use crate::validate::{Scope, ValidationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RainbowSignature {
    pub dim: usize,
    /// Tint index set A, strictly increasing.
    pub greens: Vec<i64>,
    /// Red index set B, strictly increasing.
    pub reds: Vec<i64>,
    /// Number of copies of each red (1 = unsplit).
    pub copies: usize,
    /// Forbid (g0^i, g0^j, r_kl) unless {(i,k),(j,l)} is order preserving.
    pub order_rule: bool,
}

impl RainbowSignature {
    /// A = {1..greens}, B = {0..reds-1}.
    pub fn pea(dim: usize, greens: usize, reds: usize) -> Self {
        RainbowSignature {
            dim,
            greens: (1..=greens as i64).collect(),
            reds: (0..reds as i64).collect(),
            copies: 1,
            order_rule: false,
        }
    }

    /// Integer intervals A = [a_lo, a_hi], B = [b_lo, b_hi] with the order rule on.
    pub fn order_restricted(dim: usize, a_lo: i64, a_hi: i64, b_lo: i64, b_hi: i64) -> Self {
        RainbowSignature {
            dim,
            greens: (a_lo..=a_hi).collect(),
            reds: (b_lo..=b_hi).collect(),
            copies: 1,
            order_rule: true,
        }
    }

    pub fn with_copies(mut self, copies: usize) -> Self {
        self.copies = copies;
        self
    }

    fn check(&self) -> Result<(), StructureError> {
        if self.dim < 2 {
            return Err(StructureError::DimensionTooSmall(self.dim));
        }
        if self.dim > 8 {
            return Err(StructureError::Other(format!("rainbow dimension {} above supported maximum 8", self.dim)));
        }
        let increasing = |v: &[i64]| v.windows(2).all(|w| w[0] < w[1]);
        if self.greens.is_empty() || !increasing(&self.greens) {
            return Err(StructureError::Other("green index set must be nonempty and strictly increasing".into()));
        }
        if !increasing(&self.reds) {
            return Err(StructureError::Other("red index set must be strictly increasing".into()));
        }
        if self.greens.len() > 24 {
            return Err(StructureError::Other("at most 24 tints are supported".into()));
        }
        if self.copies == 0 {
            return Err(StructureError::Other("copies must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    /// g_j, 1 <= j <= n-2.
    Green(u8),
    /// g_0^a with a = A[index].
    Tint(u8),
    /// w_i, i <= n-2.
    White(u8),
    /// r_{B[k] B[l]}^t, oriented from the k-end to the l-end.
    Red { k: u8, l: u8, t: u8 },
}

impl Colour {
    pub fn is_green(self) -> bool {
        matches!(self, Colour::Green(_) | Colour::Tint(_))
    }

    pub fn rev(self) -> Colour {
        match self {
            Colour::Red { k, l, t } => Colour::Red { k: l, l: k, t },
            c => c,
        }
    }
}

/// Coloured graph on nodes `0..nodes`: a colour id per ordered pair of
/// distinct nodes and a tint mask per green-free (n-1)-set of nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColouredGraph {
    nodes: usize,
    col: Vec<u8>,
    yellows: Vec<(u32, u32)>,
}

const NO_COLOUR: u8 = u8::MAX;

impl ColouredGraph {
    pub fn empty() -> Self {
        ColouredGraph {
            nodes: 0,
            col: Vec::new(),
            yellows: Vec::new(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Colour id of the edge u -> v.
    pub fn colour_id(&self, u: usize, v: usize) -> u8 {
        self.col[u * self.nodes + v]
    }

    /// Tint mask on the node set `mask`, if it carries a yellow.
    pub fn yellow(&self, mask: u32) -> Option<u32> {
        self.yellows
            .binary_search_by_key(&mask, |&(m, _)| m)
            .ok()
            .map(|k| self.yellows[k].1)
    }

    pub fn yellows(&self) -> &[(u32, u32)] {
        &self.yellows
    }

    /// Subgraph on `order`, with new node p taken from old node `order[p]`.
    pub fn induced(&self, order: &[usize]) -> ColouredGraph {
        let k = order.len();
        let mut col = vec![NO_COLOUR; k * k];
        for (p, &u) in order.iter().enumerate() {
            for (q, &v) in order.iter().enumerate() {
                if p != q {
                    col[p * k + q] = self.colour_id(u, v);
                }
            }
        }
        let mut back = [usize::MAX; 32];
        for (p, &u) in order.iter().enumerate() {
            back[u] = p;
        }
        let mut yellows = Vec::new();
        for &(m, y) in &self.yellows {
            let mut nm = 0u32;
            let mut ok = true;
            let mut mm = m;
            while mm != 0 {
                let u = mm.trailing_zeros() as usize;
                mm &= mm - 1;
                if back[u] == usize::MAX {
                    ok = false;
                    break;
                }
                nm |= 1 << back[u];
            }
            if ok {
                yellows.push((nm, y));
            }
        }
        yellows.sort_unstable();
        ColouredGraph { nodes: k, col, yellows }
    }
}

struct Palette {
    colours: Vec<Colour>,
    index: HashMap<Colour, u8>,
    rev: Vec<u8>,
    green: Vec<bool>,
    forbidden: Vec<bool>,
}

impl Palette {
    fn id(&self, c: Colour) -> Option<u8> {
        self.index.get(&c).copied()
    }

    fn len(&self) -> usize {
        self.colours.len()
    }

    fn tri(&self, cxy: u8, cyz: u8, cxz: u8) -> bool {
        let p = self.len();
        self.forbidden[(cxy as usize * p + cyz as usize) * p + cxz as usize]
    }
}

/// Enumerates restricted growth strings of length n in lexicographic order.
fn all_rgs(n: usize) -> Vec<Vec<u8>> {
    fn rec(cur: &mut Vec<u8>, n: usize, max: u8, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lim = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=lim {
            cur.push(b);
            rec(cur, n, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, 0, &mut out);
    out
}

/// Renumbers blocks by first occurrence. Returns the normal form and, for each
/// new block, the old block it came from.
pub fn normalize_kernel(k: &[u8]) -> (Vec<u8>, Vec<usize>) {
    let mut map = [u8::MAX; 64];
    let mut order = Vec::new();
    let mut out = Vec::with_capacity(k.len());
    for &b in k {
        if map[b as usize] == u8::MAX {
            map[b as usize] = order.len() as u8;
            order.push(b as usize);
        }
        out.push(map[b as usize]);
    }
    (out, order)
}

fn bits_for(max_value: u64) -> u32 {
    64 - max_value.leading_zeros()
}

/// Decoded rainbow atom: the kernel (block of each position) and the graph on blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowAtom {
    pub kernel: Vec<u8>,
    pub graph: ColouredGraph,
}

/// Fixed parts of a one-node extension: colours of edges from the new node
/// to existing nodes and yellows on sets containing the new node.
#[derive(Clone, Debug, Default)]
pub struct ExtConstraint {
    pub edges: Vec<Option<u8>>,
    pub yellows: Vec<(u32, u32)>,
}

impl ExtConstraint {
    pub fn free(existing: usize) -> Self {
        ExtConstraint {
            edges: vec![None; existing],
            yellows: Vec::new(),
        }
    }
}

enum Sink<'a> {
    Visit(&'a mut dyn FnMut(ColouredGraph) -> bool),
    Count(u128),
    Exists,
}

pub struct RainbowFrame {
    sig: RainbowSignature,
    pal: Palette,
    rgs: Vec<Vec<u8>>,
    rgs_index: HashMap<Vec<u8>, u64>,
    bits_c: u32,
    bits_y: u32,
    full_mask: u32,
    excluded: BTreeSet<AtomId>,
    count: OnceLock<u64>,
    list: OnceLock<Vec<AtomId>>,
}

impl fmt::Debug for RainbowFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RainbowFrame({})", self.describe())
    }
}

impl RainbowFrame {
    pub fn new(sig: RainbowSignature) -> Result<Self, StructureError> {
        sig.check()?;
        let n = sig.dim;
        let mut colours = Vec::new();
        for j in 1..n.saturating_sub(1) {
            colours.push(Colour::Green(j as u8));
        }
        for a in 0..sig.greens.len() {
            colours.push(Colour::Tint(a as u8));
        }
        for i in 0..n - 1 {
            colours.push(Colour::White(i as u8));
        }
        for k in 0..sig.reds.len() {
            for l in 0..sig.reds.len() {
                if k != l {
                    for t in 0..sig.copies {
                        colours.push(Colour::Red {
                            k: k as u8,
                            l: l as u8,
                            t: t as u8,
                        });
                    }
                }
            }
        }
        if colours.len() >= NO_COLOUR as usize || sig.copies > 255 {
            return Err(StructureError::Other("too many colours".into()));
        }
        let index: HashMap<Colour, u8> = colours.iter().enumerate().map(|(i, &c)| (c, i as u8)).collect();
        let rev = colours.iter().map(|c| index[&c.rev()]).collect();
        let green = colours.iter().map(|c| c.is_green()).collect();
        let p = colours.len();
        let mut forbidden = vec![false; p * p * p];
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    forbidden[(x * p + y) * p + z] = triangle_forbidden(&sig, colours[x], colours[y], colours[z]);
                }
            }
        }
        let pal = Palette {
            colours,
            index,
            rev,
            green,
            forbidden,
        };
        let rgs = all_rgs(n);
        let rgs_index = rgs.iter().enumerate().map(|(i, r)| (r.clone(), i as u64)).collect();
        let bits_k = bits_for(rgs.len() as u64 - 1);
        let bits_c = bits_for(p as u64);
        let bits_y = sig.greens.len() as u32 + 1;
        let total = bits_k + bits_c * pair_count(n) as u32 + bits_y * n as u32;
        if total > 64 {
            return Err(StructureError::Other(format!(
                "atom code needs {total} bits; at most 64 are supported"
            )));
        }
        let full_mask = ((1u64 << sig.greens.len()) - 1) as u32;
        Ok(RainbowFrame {
            sig,
            pal,
            rgs,
            rgs_index,
            bits_c,
            bits_y,
            full_mask,
            excluded: BTreeSet::new(),
            count: OnceLock::new(),
            list: OnceLock::new(),
        })
    }

    /// Copy of this frame with some atoms removed. Only meant for negative tests.
    pub fn with_excluded(&self, excluded: impl IntoIterator<Item = AtomId>) -> Self {
        let mut f = RainbowFrame::new(self.sig.clone()).expect("signature already checked");
        f.excluded = self.excluded.iter().copied().chain(excluded).collect();
        f
    }

    pub fn signature(&self) -> &RainbowSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.dim
    }

    pub fn excluded(&self) -> &BTreeSet<AtomId> {
        &self.excluded
    }

    pub fn palette(&self) -> &[Colour] {
        &self.pal.colours
    }

    pub fn colour_id(&self, c: Colour) -> Option<u8> {
        self.pal.id(c)
    }

    pub fn colour(&self, id: u8) -> Colour {
        self.pal.colours[id as usize]
    }

    pub fn is_green_id(&self, id: u8) -> bool {
        self.pal.green[id as usize]
    }

    pub fn rev_id(&self, id: u8) -> u8 {
        self.pal.rev[id as usize]
    }

    pub fn full_tint_mask(&self) -> u32 {
        self.full_mask
    }

    pub fn describe(&self) -> String {
        format!(
            "rainbow;n={};A={:?};B={:?};T={};order={};excluded={:?}",
            self.sig.dim, self.sig.greens, self.sig.reds, self.sig.copies, self.sig.order_rule, self.excluded
        )
    }

    pub fn triangle_is_forbidden(&self, cxy: Colour, cyz: Colour, cxz: Colour) -> bool {
        match (self.pal.id(cxy), self.pal.id(cyz), self.pal.id(cxz)) {
            (Some(a), Some(b), Some(c)) => self.pal.tri(a, b, c),
            _ => true,
        }
    }

    // ---- graph construction -------------------------------------------------

    /// Builds a graph from an edge list (u, v, colour of u -> v) and yellows given
    /// as node sets with tint values from A. Returns an error for unknown colours.
    pub fn build_graph(
        &self,
        nodes: usize,
        edges: &[(usize, usize, Colour)],
        yellows: &[(Vec<usize>, Vec<i64>)],
    ) -> Result<ColouredGraph, StructureError> {
        if nodes > 31 {
            return Err(StructureError::Other("at most 31 nodes".into()));
        }
        let mut col = vec![NO_COLOUR; nodes * nodes];
        for &(u, v, c) in edges {
            if u >= nodes || v >= nodes || u == v {
                return Err(StructureError::Other(format!("bad edge ({u},{v})")));
            }
            let id = self
                .pal
                .id(c)
                .ok_or_else(|| StructureError::Other(format!("colour {} not in signature", self.colour_name(c))))?;
            col[u * nodes + v] = id;
            col[v * nodes + u] = self.pal.rev[id as usize];
        }
        for u in 0..nodes {
            for v in 0..nodes {
                if u != v && col[u * nodes + v] == NO_COLOUR {
                    return Err(StructureError::Other(format!("edge ({u},{v}) has no colour")));
                }
            }
        }
        let mut ys = Vec::new();
        for (set, tints) in yellows {
            let mut m = 0u32;
            for &u in set {
                if u >= nodes {
                    return Err(StructureError::Other(format!("yellow node {u} out of range")));
                }
                m |= 1 << u;
            }
            let mut y = 0u32;
            for t in tints {
                let idx = self
                    .sig
                    .greens
                    .iter()
                    .position(|a| a == t)
                    .ok_or_else(|| StructureError::Other(format!("tint {t} not in the green index set")))?;
                y |= 1 << idx;
            }
            ys.push((m, y));
        }
        ys.sort_unstable();
        Ok(ColouredGraph {
            nodes,
            col,
            yellows: ys,
        })
    }

    /// Tint of the cone with base `set` whose apex has edge colours `apex_col(d)`, if any.
    fn cone_tint(&self, set: u32, apex_col: impl Fn(usize) -> u8) -> Option<u8> {
        let n = self.sig.dim;
        let mut tint = None;
        let mut seen = 0u32;
        let mut m = set;
        while m != 0 {
            let d = m.trailing_zeros() as usize;
            m &= m - 1;
            match self.pal.colours[apex_col(d) as usize] {
                Colour::Tint(t) => {
                    if tint.is_some() {
                        return None;
                    }
                    tint = Some(t);
                }
                Colour::Green(j) => {
                    if seen & (1 << j) != 0 {
                        return None;
                    }
                    seen |= 1 << j;
                }
                _ => return None,
            }
        }
        let want: u32 = (1..n.saturating_sub(1)).fold(0, |acc, j| acc | (1 << j));
        if seen == want {
            tint
        } else {
            None
        }
    }

    /// Checks forbidden triangles, yellow totality on green-free (n-1)-sets and the cone rule.
    pub fn graph_is_valid(&self, g: &ColouredGraph) -> bool {
        let k = g.nodes;
        let n = self.sig.dim;
        if k > 31 || g.col.len() != k * k {
            return false;
        }
        for u in 0..k {
            for v in 0..k {
                if u == v {
                    continue;
                }
                let c = g.colour_id(u, v);
                if c as usize >= self.pal.len() || g.colour_id(v, u) != self.pal.rev[c as usize] {
                    return false;
                }
            }
        }
        for x in 0..k {
            for y in x + 1..k {
                for z in y + 1..k {
                    if self.pal.tri(g.colour_id(x, y), g.colour_id(y, z), g.colour_id(x, z)) {
                        return false;
                    }
                }
            }
        }
        if g.yellows.windows(2).any(|w| w[0].0 >= w[1].0) {
            return false;
        }
        let mut expected = Vec::new();
        if k + 1 >= n {
            for set in subsets_of_size(k, n - 1) {
                if self.green_free(g, set) {
                    expected.push(set);
                }
            }
        }
        if expected.len() != g.yellows.len() || expected.iter().zip(&g.yellows).any(|(a, b)| *a != b.0) {
            return false;
        }
        for &(set, y) in &g.yellows {
            if y & !self.full_mask != 0 {
                return false;
            }
            for apex in 0..k {
                if set & (1 << apex) != 0 {
                    continue;
                }
                if let Some(t) = self.cone_tint(set, |d| g.colour_id(apex, d)) {
                    if y & (1 << t) == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn green_free(&self, g: &ColouredGraph, set: u32) -> bool {
        let mut a = set;
        while a != 0 {
            let u = a.trailing_zeros() as usize;
            a &= a - 1;
            let mut b = a;
            while b != 0 {
                let v = b.trailing_zeros() as usize;
                b &= b - 1;
                if self.pal.green[g.colour_id(u, v) as usize] {
                    return false;
                }
            }
        }
        true
    }

    // ---- one-node extension ---------------------------------------------------

    /// Calls `visit` on every valid extension of `g` by node `g.nodes()` that
    /// meets `cons`, until it returns false. Returns false if stopped early.
    pub fn for_each_extension(
        &self,
        g: &ColouredGraph,
        cons: &ExtConstraint,
        visit: &mut dyn FnMut(ColouredGraph) -> bool,
    ) -> bool {
        let mut sink = Sink::Visit(visit);
        self.run_extension(g, cons, &mut sink)
    }

    pub fn count_extensions(&self, g: &ColouredGraph, cons: &ExtConstraint) -> u128 {
        let mut sink = Sink::Count(0);
        self.run_extension(g, cons, &mut sink);
        match sink {
            Sink::Count(c) => c,
            _ => unreachable!(),
        }
    }

    pub fn has_extension(&self, g: &ColouredGraph, cons: &ExtConstraint) -> bool {
        let mut sink = Sink::Exists;
        !self.run_extension(g, cons, &mut sink)
    }

    fn run_extension(&self, g: &ColouredGraph, cons: &ExtConstraint, sink: &mut Sink) -> bool {
        let k = g.nodes;
        if k >= 31 {
            return true;
        }
        let n = self.sig.dim;
        let mut by_max: Vec<Vec<(u32, u32)>> = vec![Vec::new(); k];
        for &(m, y) in &g.yellows {
            let top = 31 - m.leading_zeros() as usize;
            by_max[top].push((m, y));
        }
        // (n-2)-subsets S of old nodes, green-free inside; S + z is a candidate yellow set.
        let mut new_sets = Vec::new();
        if k + 2 >= n {
            for s in subsets_of_size(k, n - 2) {
                if self.green_free(g, s) {
                    new_sets.push(s);
                }
            }
        }
        for &(m, _) in &cons.yellows {
            if m & (1 << k) == 0 || m.count_ones() as usize != n - 1 || m >> (k + 1) != 0 {
                return true;
            }
            if !new_sets.contains(&(m & !(1 << k))) {
                return true;
            }
        }
        let mut st = ExtState {
            frame: self,
            g,
            cons,
            by_max,
            new_sets,
            assigned: vec![0; k],
        };
        st.assign(0, sink)
    }

    // ---- atoms --------------------------------------------------------------

    fn kernel_index(&self, k: &[u8]) -> u64 {
        self.rgs_index[k]
    }

    /// Packs a kernel and a graph on its blocks.
    pub fn encode(&self, kernel: &[u8], g: &ColouredGraph) -> AtomId {
        let n = self.sig.dim;
        let nb = g.nodes;
        let mut code = self.kernel_index(kernel);
        for (u, v) in pairs(n) {
            let slot = if v < nb { g.colour_id(u, v) as u64 + 1 } else { 0 };
            code = (code << self.bits_c) | slot;
        }
        for m in 0..n {
            let set = self.yellow_slot_set(nb, m);
            let slot = match set.and_then(|s| g.yellow(s)) {
                Some(y) => y as u64 + 1,
                None => 0,
            };
            code = (code << self.bits_y) | slot;
        }
        code
    }

    fn yellow_slot_set(&self, nb: usize, m: usize) -> Option<u32> {
        let n = self.sig.dim;
        if nb == n {
            Some(((1u32 << n) - 1) & !(1 << m))
        } else if nb + 1 == n && m == n - 1 {
            Some((1u32 << (n - 1)) - 1)
        } else {
            None
        }
    }

    /// Unpacks a code without checking graph validity.
    pub fn decode(&self, code: AtomId) -> Option<RainbowAtom> {
        let n = self.sig.dim;
        let mut c = code;
        let ymask = (1u64 << self.bits_y) - 1;
        let mut yslots = vec![0u64; n];
        for m in (0..n).rev() {
            yslots[m] = c & ymask;
            c >>= self.bits_y;
        }
        let cmask = (1u64 << self.bits_c) - 1;
        let pc = pair_count(n);
        let mut cslots = vec![0u64; pc];
        for p in (0..pc).rev() {
            cslots[p] = c & cmask;
            c >>= self.bits_c;
        }
        let kernel = self.rgs.get(c as usize)?.clone();
        let nb = *kernel.iter().max().unwrap() as usize + 1;
        let mut col = vec![NO_COLOUR; nb * nb];
        for (p, (u, v)) in pairs(n).enumerate() {
            let s = cslots[p];
            if v < nb {
                if s == 0 || s as usize > self.pal.len() {
                    return None;
                }
                let id = (s - 1) as u8;
                col[u * nb + v] = id;
                col[v * nb + u] = self.pal.rev[id as usize];
            } else if s != 0 {
                return None;
            }
        }
        let mut yellows = Vec::new();
        for m in 0..n {
            match self.yellow_slot_set(nb, m) {
                Some(set) => {
                    if yslots[m] != 0 {
                        yellows.push((set, (yslots[m] - 1) as u32));
                    }
                }
                None => {
                    if yslots[m] != 0 {
                        return None;
                    }
                }
            }
        }
        yellows.sort_unstable();
        Some(RainbowAtom {
            kernel,
            graph: ColouredGraph { nodes: nb, col, yellows },
        })
    }

    /// Kernel of a code without decoding the graph.
    pub fn kernel_of(&self, a: AtomId) -> Option<&[u8]> {
        let n = self.sig.dim;
        let shift = self.bits_c * pair_count(n) as u32 + self.bits_y * n as u32;
        self.rgs.get((a >> shift) as usize).map(|k| k.as_slice())
    }

    pub fn contains(&self, a: AtomId) -> bool {
        if self.excluded.contains(&a) {
            return false;
        }
        match self.decode(a) {
            Some(at) => self.encode(&at.kernel, &at.graph) == a && self.graph_is_valid(&at.graph),
            None => false,
        }
    }

    pub fn in_diag(&self, a: AtomId, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        match self.decode(a) {
            Some(at) => at.kernel[i] == at.kernel[j],
            None => false,
        }
    }

    /// Atom obtained by replacing the kernel by `k` (not necessarily normal)
    /// over graph `g`, whose node b is block b of `k`.
    fn atom_from_raw(&self, k: &[u8], g: &ColouredGraph) -> AtomId {
        let (norm, order) = normalize_kernel(k);
        if order.len() == g.nodes && order.iter().enumerate().all(|(p, &u)| p == u) {
            self.encode(&norm, g)
        } else {
            self.encode(&norm, &g.induced(&order))
        }
    }

    /// Key of the T_i class: position i is merged into the smallest other position.
    pub fn face_key(&self, a: AtomId, i: usize) -> AtomId {
        let Some(at) = self.decode(a) else { return u64::MAX };
        let j0 = if i == 0 { 1 } else { 0 };
        let mut k = at.kernel.clone();
        k[i] = k[j0];
        self.atom_from_raw(&k, &at.graph)
    }

    pub fn transpose(&self, a: AtomId, i: usize, j: usize) -> AtomId {
        if i == j {
            return a;
        }
        let n = self.sig.dim;
        if self.kernel_of(a).is_some_and(|k| k.len() == n && k[n - 1] as usize == n - 1) {
            return self.transpose_distinct(a, i, j);
        }
        let Some(at) = self.decode(a) else { return a };
        let mut k = at.kernel.clone();
        k.swap(i, j);
        self.atom_from_raw(&k, &at.graph)
    }

    // Transposition on the packed code when all n positions are distinct blocks.
    fn transpose_distinct(&self, a: AtomId, i: usize, j: usize) -> AtomId {
        let n = self.sig.dim;
        let pc = pair_count(n);
        let cmask = (1u64 << self.bits_c) - 1;
        let ymask = (1u64 << self.bits_y) - 1;
        let mut c = a;
        let mut ys = [0u64; 8];
        for m in (0..n).rev() {
            ys[m] = c & ymask;
            c >>= self.bits_y;
        }
        let mut cs = [0u64; 28];
        for p in (0..pc).rev() {
            cs[p] = c & cmask;
            c >>= self.bits_c;
        }
        let sw = |x: usize| if x == i { j } else if x == j { i } else { x };
        let mut code = c;
        for (u, v) in pairs(n) {
            let (x, y) = (sw(u), sw(v));
            let slot = if x < y {
                cs[pair_index(n, x, y)]
            } else {
                let s = cs[pair_index(n, y, x)];
                if s == 0 {
                    0
                } else {
                    self.pal.rev[(s - 1) as usize] as u64 + 1
                }
            };
            code = (code << self.bits_c) | slot;
        }
        for m in 0..n {
            code = (code << self.bits_y) | ys[sw(m)];
        }
        code
    }

    /// All atoms b with a T_i b, sorted.
    pub fn cyl_class(&self, a: AtomId, i: usize) -> Vec<AtomId> {
        let f = self.face_key(a, i);
        let Some(face) = self.decode(f) else { return Vec::new() };
        let nb = face.graph.nodes;
        let mut out = Vec::new();
        for b in 0..nb {
            let mut k = face.kernel.clone();
            k[i] = b as u8;
            if (0..self.sig.dim).any(|p| p != i && face.kernel[p] == b as u8) {
                out.push(self.atom_from_raw(&k, &face.graph));
            }
        }
        let mut k = face.kernel.clone();
        k[i] = nb as u8;
        self.for_each_extension(&face.graph, &ExtConstraint::free(nb), &mut |h| {
            out.push(self.atom_from_raw(&k, &h));
            true
        });
        out.retain(|x| !self.excluded.contains(x));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Visits every graph on `nodes` nodes (up to nothing: node order matters).
    pub fn for_each_graph(&self, nodes: usize, visit: &mut dyn FnMut(&ColouredGraph) -> bool) -> bool {
        fn rec(f: &RainbowFrame, g: &ColouredGraph, left: usize, visit: &mut dyn FnMut(&ColouredGraph) -> bool) -> bool {
            if left == 0 {
                return visit(g);
            }
            let cons = ExtConstraint::free(g.nodes);
            f.for_each_extension(g, &cons, &mut |h| rec(f, &h, left - 1, visit))
        }
        rec(self, &ColouredGraph::empty(), nodes, visit)
    }

    fn count_graphs(&self, nodes: usize) -> u128 {
        if nodes == 0 {
            return 1;
        }
        let mut total = 0u128;
        self.for_each_graph(nodes - 1, &mut |g| {
            total += self.count_extensions(g, &ExtConstraint::free(g.nodes));
            true
        });
        total
    }

    /// Number of atoms, computed combinatorially (no enumeration of the last node).
    pub fn atom_count(&self) -> u64 {
        *self.count.get_or_init(|| {
            let mut per_nb = HashMap::new();
            let mut total = 0u128;
            for k in &self.rgs {
                let nb = *k.iter().max().unwrap() as usize + 1;
                let c = *per_nb.entry(nb).or_insert_with(|| self.count_graphs(nb));
                total += c;
            }
            let total = total - self.excluded.iter().filter(|&&a| self.contains_ignoring_exclusion(a)).count() as u128;
            u64::try_from(total).unwrap_or(u64::MAX)
        })
    }

    fn contains_ignoring_exclusion(&self, a: AtomId) -> bool {
        match self.decode(a) {
            Some(at) => self.encode(&at.kernel, &at.graph) == a && self.graph_is_valid(&at.graph),
            None => false,
        }
    }

    /// Streams all atoms, grouped by block count. Returns false if stopped early.
    pub fn for_each_atom(&self, visit: &mut dyn FnMut(AtomId) -> bool) -> bool {
        let n = self.sig.dim;
        for nb in 1..=n {
            let kernels: Vec<&Vec<u8>> = self.rgs.iter().filter(|k| *k.iter().max().unwrap() as usize + 1 == nb).collect();
            if kernels.is_empty() {
                continue;
            }
            let mut codes: Vec<AtomId> = Vec::new();
            self.for_each_graph(nb, &mut |g| {
                codes.push(self.encode(kernels[0], g));
                true
            });
            codes.sort_unstable();
            // Codes for other kernels with the same block count differ only in the leading field.
            let shift = self.bits_c * pair_count(n) as u32 + self.bits_y * n as u32;
            for k in kernels {
                let base = self.kernel_index(k) << shift;
                for &c in &codes {
                    let a = base | (c & ((1u64 << shift) - 1));
                    if self.excluded.contains(&a) {
                        continue;
                    }
                    if !visit(a) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Sorted list of all atoms, cached. Panics above the enumeration limit.
    pub fn atom_list(&self) -> &[AtomId] {
        self.list.get_or_init(|| {
            assert!(
                self.atom_count() <= ENUMERATION_LIMIT,
                "rainbow frame with {} atoms is too large to enumerate",
                self.atom_count()
            );
            let mut v = Vec::with_capacity(self.atom_count() as usize);
            self.for_each_atom(&mut |a| {
                v.push(a);
                true
            });
            v.sort_unstable();
            v
        })
    }

    pub fn to_explicit(&self) -> Result<ExplicitCa, StructureError> {
        if self.atom_count() > 200_000 {
            return Err(StructureError::Other(format!(
                "rainbow frame with {} atoms is too large for explicit form",
                self.atom_count()
            )));
        }
        let atoms = self.atom_list().to_vec();
        let names = atoms.iter().map(|&a| self.atom_name(a)).collect();
        explicit_from_faces(
            self.sig.dim,
            &atoms,
            names,
            |a, i| self.face_key(a, i),
            |a, i, j| self.in_diag(a, i, j),
            Some(|a, i, j| self.transpose(a, i, j)),
        )
    }

    /// Projection into `target` forgetting red superscripts, as a function on
    /// codes. The two frames must share dimension and index sets.
    pub fn projector<'a>(&'a self, target: &'a RainbowFrame) -> Option<impl Fn(AtomId) -> AtomId + 'a> {
        if self.sig.dim != target.sig.dim || self.sig.greens != target.sig.greens || self.sig.reds != target.sig.reds {
            return None;
        }
        let mut table = vec![0u64; self.pal.len() + 1];
        for (id, &c) in self.pal.colours.iter().enumerate() {
            let mapped = match c {
                Colour::Red { k, l, .. } => Colour::Red { k, l, t: 0 },
                other => other,
            };
            table[id + 1] = target.pal.id(mapped)? as u64 + 1;
        }
        let n = self.sig.dim;
        let pc = pair_count(n);
        Some(move |a: AtomId| {
            let cmask = (1u64 << self.bits_c) - 1;
            let ybits = self.bits_y * n as u32;
            let ys = a & ((1u64 << ybits) - 1);
            let mut c = a >> ybits;
            let mut cs = [0u64; 28];
            for p in (0..pc).rev() {
                cs[p] = c & cmask;
                c >>= self.bits_c;
            }
            let mut code = c;
            for &slot in &cs[..pc] {
                code = (code << target.bits_c) | table.get(slot as usize).copied().unwrap_or(0);
            }
            (code << ybits) | ys
        })
    }

    /// Image of `a` in `target` after forgetting red superscripts.
    pub fn project_to(&self, a: AtomId, target: &RainbowFrame) -> Option<AtomId> {
        self.projector(target).map(|f| f(a))
    }

    /// Number of red edges in the graph of `a`.
    pub fn red_edge_count(&self, a: AtomId) -> Option<usize> {
        let at = self.decode(a)?;
        let k = at.graph.nodes;
        let mut n = 0;
        for u in 0..k {
            for v in u + 1..k {
                if matches!(self.pal.colours[at.graph.colour_id(u, v) as usize], Colour::Red { .. }) {
                    n += 1;
                }
            }
        }
        Some(n)
    }

    // ---- names --------------------------------------------------------------

    fn short_reds(&self) -> bool {
        self.sig.reds.iter().all(|&b| (0..=9).contains(&b))
    }

    pub fn colour_name(&self, c: Colour) -> String {
        match c {
            Colour::Green(j) => format!("g{j}"),
            Colour::Tint(t) => format!("g0^{}", self.sig.greens.get(t as usize).copied().unwrap_or(-999)),
            Colour::White(i) => format!("w{i}"),
            Colour::Red { k, l, t } => {
                let bk = self.sig.reds.get(k as usize).copied().unwrap_or(-999);
                let bl = self.sig.reds.get(l as usize).copied().unwrap_or(-999);
                let mut s = if self.short_reds() {
                    format!("r{bk}{bl}")
                } else {
                    format!("r({bk},{bl})")
                };
                if self.sig.copies > 1 {
                    s.push_str(&format!("^{t}"));
                }
                s
            }
        }
    }

    pub fn parse_colour(&self, s: &str) -> Option<Colour> {
        let c = if let Some(rest) = s.strip_prefix("g0^") {
            let a: i64 = rest.parse().ok()?;
            Colour::Tint(self.sig.greens.iter().position(|&x| x == a)? as u8)
        } else if let Some(rest) = s.strip_prefix('g') {
            Colour::Green(rest.parse().ok()?)
        } else if let Some(rest) = s.strip_prefix('w') {
            Colour::White(rest.parse().ok()?)
        } else if let Some(rest) = s.strip_prefix('r') {
            let (body, t) = match rest.split_once('^') {
                Some((b, t)) => (b, t.parse().ok()?),
                None => (rest, 0u8),
            };
            let (bk, bl): (i64, i64) = if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
                let (x, y) = inner.split_once(',')?;
                (x.trim().parse().ok()?, y.trim().parse().ok()?)
            } else {
                let ch: Vec<char> = body.chars().collect();
                if ch.len() != 2 {
                    return None;
                }
                (ch[0].to_digit(10)? as i64, ch[1].to_digit(10)? as i64)
            };
            let k = self.sig.reds.iter().position(|&x| x == bk)? as u8;
            let l = self.sig.reds.iter().position(|&x| x == bl)? as u8;
            Colour::Red { k, l, t }
        } else {
            return None;
        };
        self.pal.id(c).map(|_| c)
    }

    fn mask_name(&self, y: u32) -> String {
        let vals: Vec<String> = (0..self.sig.greens.len())
            .filter(|&t| y & (1 << t) != 0)
            .map(|t| self.sig.greens[t].to_string())
            .collect();
        format!("{{{}}}", vals.join(","))
    }

    /// For example "k012 e01=w0 e02=g0^1 e12=g1 y01={1,2,3,4}".
    pub fn atom_name(&self, a: AtomId) -> String {
        let Some(at) = self.decode(a) else {
            return format!("#{a}");
        };
        let mut parts = vec![format!(
            "k{}",
            at.kernel.iter().map(|b| b.to_string()).collect::<String>()
        )];
        let g = &at.graph;
        for u in 0..g.nodes {
            for v in u + 1..g.nodes {
                parts.push(format!("e{u}{v}={}", self.colour_name(self.colour(g.colour_id(u, v)))));
            }
        }
        for &(m, y) in &g.yellows {
            let blocks: String = (0..g.nodes).filter(|&u| m & (1 << u) != 0).map(|u| u.to_string()).collect();
            parts.push(format!("y{blocks}={}", self.mask_name(y)));
        }
        parts.join(" ")
    }

    pub fn parse_atom_name(&self, s: &str) -> Option<AtomId> {
        let mut it = s.split_whitespace();
        let k = it.next()?.strip_prefix('k')?;
        let kernel: Vec<u8> = k.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect::<Option<_>>()?;
        if kernel.len() != self.sig.dim || normalize_kernel(&kernel).0 != kernel {
            return None;
        }
        let nb = *kernel.iter().max()? as usize + 1;
        let mut edges = Vec::new();
        let mut yellows = Vec::new();
        for tok in it {
            let (lhs, rhs) = tok.split_once('=')?;
            if let Some(e) = lhs.strip_prefix('e') {
                let d: Vec<usize> = e.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>()?;
                if d.len() != 2 {
                    return None;
                }
                edges.push((d[0], d[1], self.parse_colour(rhs)?));
            } else if let Some(y) = lhs.strip_prefix('y') {
                let d: Vec<usize> = y.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>()?;
                let inner = rhs.strip_prefix('{')?.strip_suffix('}')?;
                let vals: Vec<i64> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(|v| v.parse().ok()).collect::<Option<_>>()?
                };
                yellows.push((d, vals));
            } else {
                return None;
            }
        }
        let g = self.build_graph(nb, &edges, &yellows).ok()?;
        let a = self.encode(&kernel, &g);
        self.contains(a).then_some(a)
    }

    // ---- networks and graphs --------------------------------------------------

    /// Atom labelling the tuple `t` of nodes of `g`.
    pub fn label_of_tuple(&self, g: &ColouredGraph, t: &[usize]) -> AtomId {
        let k: Vec<u8> = t.iter().map(|&x| x as u8).collect();
        self.atom_from_raw(&k, g)
    }

    /// Atom seeded by a coloured graph on blocks: kernel = identity on blocks
    /// padded by repeating block 0 when there are fewer blocks than positions.
    pub fn seed_tuple(&self, a: AtomId) -> Option<Vec<usize>> {
        self.decode(a).map(|at| at.kernel.iter().map(|&b| b as usize).collect())
    }

    // ---- sampled validation ---------------------------------------------------

    /// Random valid atom: random kernel, then a random graph built node by node.
    pub fn random_atom(&self, rng: &mut ChaCha8Rng) -> AtomId {
        let k = &self.rgs[rng.gen_range(0..self.rgs.len())];
        let nb = *k.iter().max().unwrap() as usize + 1;
        loop {
            let mut g = ColouredGraph::empty();
            let mut ok = true;
            for _ in 0..nb {
                match self.random_extension(&g, rng) {
                    Some(h) => g = h,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let a = self.encode(k, &g);
                if !self.excluded.contains(&a) {
                    return a;
                }
            }
        }
    }

    fn random_extension(&self, g: &ColouredGraph, rng: &mut ChaCha8Rng) -> Option<ColouredGraph> {
        for _ in 0..200 {
            let mut cons = ExtConstraint::free(g.nodes);
            for e in cons.edges.iter_mut() {
                *e = Some(rng.gen_range(0..self.pal.len()) as u8);
            }
            let mut found = Vec::new();
            self.for_each_extension(g, &cons, &mut |h| {
                found.push(h);
                found.len() < 64
            });
            if !found.is_empty() {
                return Some(found.swap_remove(rng.gen_range(0..found.len())));
            }
        }
        None
    }

    /// Checks the transposition and diagonal correspondents on random atoms.
    /// Cylindrifier relations are equivalences by construction (equality of face keys).
    pub fn validate_sampled(&self, samples: usize, seed: u64) -> ValidationReport {
        let mut rep = ValidationReport::new();
        rep.scope = Scope::Sampled { samples, seed };
        let n = self.sig.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let a = self.random_atom(&mut rng);
            let nm = self.atom_name(a);
            for (i, j) in pairs(n) {
                let s = self.transpose(a, i, j);
                if !self.contains(s) {
                    rep.push(format!("s{i}{j} closure"), nm.clone());
                }
                if self.transpose(s, i, j) != a {
                    rep.push(format!("s{i}{j} involution/permutation"), nm.clone());
                }
                if self.in_diag(a, i, j) && s != a {
                    rep.push(format!("s{i}{j} fixes d{i}{j}"), nm.clone());
                }
                for c in 0..n {
                    let c2 = if c == i { j } else if c == j { i } else { c };
                    // a T_c b with b obtained by moving position c onto each other block
                    let at = self.decode(a).unwrap();
                    for b in 0..at.graph.nodes {
                        let mut k = at.kernel.clone();
                        k[c] = b as u8;
                        if !(0..n).any(|p| p != c && at.kernel[p] == b as u8) {
                            continue;
                        }
                        let bb = self.atom_from_raw(&k, &at.graph);
                        if self.face_key(self.transpose(bb, i, j), c2) != self.face_key(s, c2) {
                            rep.push(format!("s{i}{j} cylindrifier transport c{c}"), nm.clone());
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    // the T_i class of a meets E_ij exactly in "position i moved onto j"
                    let at = self.decode(a).unwrap();
                    let mut k = at.kernel.clone();
                    k[i] = k[j];
                    let b = self.atom_from_raw(&k, &at.graph);
                    if !self.contains(b) || self.face_key(b, i) != self.face_key(a, i) {
                        rep.push(format!("c{i} diagonal uniqueness d{i}{j}"), nm.clone());
                    }
                }
            }
        }
        rep
    }
}

struct ExtState<'a> {
    frame: &'a RainbowFrame,
    g: &'a ColouredGraph,
    cons: &'a ExtConstraint,
    by_max: Vec<Vec<(u32, u32)>>,
    new_sets: Vec<u32>,
    assigned: Vec<u8>,
}

impl ExtState<'_> {
    /// Returns false when the sink asks to stop.
    fn assign(&mut self, w: usize, sink: &mut Sink) -> bool {
        let k = self.g.nodes;
        if w == k {
            return self.finish(sink);
        }
        let pal = &self.frame.pal;
        let range: Vec<u8> = match self.cons.edges.get(w).copied().flatten() {
            Some(c) => vec![c],
            None => (0..pal.len() as u8).collect(),
        };
        for c in range {
            // c is the colour of z -> w
            let cwz = pal.rev[c as usize];
            let mut ok = true;
            for w2 in 0..w {
                let cw2z = pal.rev[self.assigned[w2] as usize];
                if pal.tri(self.g.colour_id(w2, w), cwz, cw2z) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            self.assigned[w] = c;
            for &(set, y) in &self.by_max[w] {
                let assigned = &self.assigned;
                if let Some(t) = self.frame.cone_tint(set, |d| assigned[d]) {
                    if y & (1 << t) == 0 {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if !self.assign(w + 1, sink) {
                return false;
            }
        }
        true
    }

    fn finish(&mut self, sink: &mut Sink) -> bool {
        let k = self.g.nodes;
        let z = k;
        let f = self.frame;
        let pal = &f.pal;
        let mut options: Vec<(u32, Vec<u32>)> = Vec::new();
        let mut matched = 0usize;
        for &s in &self.new_sets {
            let mut free = true;
            let mut m = s;
            while m != 0 {
                let d = m.trailing_zeros() as usize;
                m &= m - 1;
                if pal.green[self.assigned[d] as usize] {
                    free = false;
                    break;
                }
            }
            let set = s | (1 << z);
            let fixed = self.cons.yellows.iter().find(|&&(m, _)| m == set).map(|&(_, y)| y);
            if !free {
                if fixed.is_some() {
                    return true;
                }
                continue;
            }
            let mut req = 0u32;
            for apex in 0..k {
                if s & (1 << apex) != 0 {
                    continue;
                }
                let g = self.g;
                let assigned = &self.assigned;
                let t = f.cone_tint(set, |d| if d == z { pal.rev[assigned[apex] as usize] } else { g.colour_id(apex, d) });
                if let Some(t) = t {
                    req |= 1 << t;
                }
            }
            match fixed {
                Some(y) => {
                    matched += 1;
                    if y & req != req || y & !f.full_mask != 0 {
                        return true;
                    }
                    options.push((set, vec![y]));
                }
                None => {
                    let rest = f.full_mask & !req;
                    match sink {
                        Sink::Visit(_) => {
                            let mut v = Vec::new();
                            let mut sub = rest;
                            loop {
                                v.push(sub | req);
                                if sub == 0 {
                                    break;
                                }
                                sub = (sub - 1) & rest;
                            }
                            v.reverse();
                            options.push((set, v));
                        }
                        _ => options.push((set, vec![0; 1usize << rest.count_ones()])),
                    }
                }
            }
        }
        if matched != self.cons.yellows.len() {
            return true;
        }
        match sink {
            Sink::Exists => false,
            Sink::Count(c) => {
                let mut prod = 1u128;
                for (_, o) in &options {
                    prod *= o.len() as u128;
                }
                *c += prod;
                true
            }
            Sink::Visit(visit) => {
                let nk = k + 1;
                let mut col = vec![NO_COLOUR; nk * nk];
                for u in 0..k {
                    for v in 0..k {
                        if u != v {
                            col[u * nk + v] = self.g.colour_id(u, v);
                        }
                    }
                    col[z * nk + u] = self.assigned[u];
                    col[u * nk + z] = pal.rev[self.assigned[u] as usize];
                }
                let mut idx = vec![0usize; options.len()];
                loop {
                    let mut yellows = self.g.yellows.clone();
                    for (p, (set, o)) in options.iter().enumerate() {
                        yellows.push((*set, o[idx[p]]));
                    }
                    let h = ColouredGraph {
                        nodes: nk,
                        col: col.clone(),
                        yellows,
                    };
                    if !visit(h) {
                        return false;
                    }
                    let mut p = options.len();
                    loop {
                        if p == 0 {
                            return true;
                        }
                        p -= 1;
                        idx[p] += 1;
                        if idx[p] < options[p].1.len() {
                            break;
                        }
                        idx[p] = 0;
                    }
                }
            }
        }
    }
}

/// Bitmasks of all `size`-subsets of `0..k`, in increasing numeric order.
pub fn subsets_of_size(k: usize, size: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..(1u32 << k)).filter(|m| m.count_ones() as usize == size).collect();
    out.sort_unstable();
    out
}

fn triangle_forbidden(sig: &RainbowSignature, cxy: Colour, cyz: Colour, cxz: Colour) -> bool {
    // nodes 0 = x, 1 = y, 2 = z
    let col = |a: usize, b: usize| -> Colour {
        match (a, b) {
            (0, 1) => cxy,
            (1, 0) => cxy.rev(),
            (1, 2) => cyz,
            (2, 1) => cyz.rev(),
            (0, 2) => cxz,
            (2, 0) => cxz.rev(),
            _ => unreachable!(),
        }
    };
    let edges = [cxy, cyz, cxz];
    if edges.iter().all(|c| c.is_green()) {
        return true;
    }
    let count = |f: &dyn Fn(Colour) -> bool| edges.iter().filter(|&&c| f(c)).count();
    for i in 1..sig.dim.saturating_sub(1) as u8 {
        if count(&|c| c == Colour::Green(i)) == 2 && count(&|c| c == Colour::White(i)) == 1 {
            return true;
        }
    }
    let tints = count(&|c| matches!(c, Colour::Tint(_)));
    if tints == 2 && count(&|c| c == Colour::White(0)) == 1 {
        return true;
    }
    if count(&|c| matches!(c, Colour::Red { .. })) == 3 {
        let (Colour::Red { k: k01, l: l01, .. }, Colour::Red { k: k12, l: l12, .. }, Colour::Red { k: k02, l: l02, .. }) =
            (col(0, 1), col(1, 2), col(0, 2))
        else {
            unreachable!()
        };
        if k01 != k02 || l01 != k12 || l12 != l02 {
            return true;
        }
    }
    if sig.order_rule && tints == 2 {
        for x0 in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&v| v != x0).collect();
            let (u, v) = (others[0], others[1]);
            if let (Colour::Tint(i), Colour::Tint(j), Colour::Red { k, l, .. }) = (col(x0, u), col(x0, v), col(u, v)) {
                if i == j {
                    return true;
                }
                let a_less = sig.greens[i as usize] < sig.greens[j as usize];
                let b_less = sig.reds[k as usize] < sig.reds[l as usize];
                if a_less != b_less {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_transposition_matches_graph_rebuild() {
        let f = RainbowFrame::new(RainbowSignature::pea(4, 2, 2).with_copies(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let a = f.random_atom(&mut rng);
            for (i, j) in pairs(4) {
                let at = f.decode(a).unwrap();
                let mut k = at.kernel.clone();
                k.swap(i, j);
                assert_eq!(f.transpose(a, i, j), f.atom_from_raw(&k, &at.graph));
            }
        }
    }

    #[test]
    fn rgs_counts_are_bell_numbers() {
        assert_eq!(all_rgs(3).len(), 5);
        assert_eq!(all_rgs(4).len(), 15);
        assert_eq!(all_rgs(3)[0], vec![0, 0, 0]);
    }

    #[test]
    fn small_signature_counts() {
        let f = RainbowFrame::new(RainbowSignature::pea(3, 1, 2)).unwrap();
        assert_eq!(f.atom_count(), 923);
        assert_eq!(f.atom_list().len(), 923);
        let f = RainbowFrame::new(RainbowSignature::pea(3, 2, 2)).unwrap();
        assert_eq!(f.atom_count(), 6222);
    }

    #[test]
    fn names_round_trip() {
        let f = RainbowFrame::new(RainbowSignature::pea(3, 2, 3)).unwrap();
        for &a in f.atom_list().iter().step_by(97) {
            let name = f.atom_name(a);
            assert_eq!(f.parse_atom_name(&name), Some(a), "{name}");
        }
    }

    #[test]
    fn two_tints_and_w0_are_forbidden() {
        let f = RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).unwrap();
        assert!(f.triangle_is_forbidden(Colour::Tint(0), Colour::White(0), Colour::Tint(1)));
        assert!(f.triangle_is_forbidden(Colour::Green(1), Colour::White(1), Colour::Green(1)));
        assert!(!f.triangle_is_forbidden(Colour::Tint(0), Colour::White(1), Colour::Green(1)));
    }
}
