//! Relation-algebra atom structures: explicit tables, Monk graph algebras,
//! blur structures, and basic matrices.
//!
//! `consistent(a, b, c)` reads as c ≤ a;b.

use crate::atoms::SetOfAtoms;
use crate::frame::{explicit_from_faces, ExplicitCa, StructureError};
use crate::graph::SimpleGraph;
use crate::validate::{validate_explicit, ValidationReport};
use itertools::Itertools;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlurParams {
    pub l: usize,
    pub i_size: usize,
    /// Number of rows i < T.
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripleRule {
    Table(BTreeSet<(usize, usize, usize)>),
    Monk { graph: SimpleGraph, colours: usize },
    Blur { params: BlurParams, include_p_outside: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BlurAtom {
    row: usize,
    w: u64,
    p: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaAtomStructure {
    names: Vec<String>,
    identity: SetOfAtoms,
    converse: Vec<usize>,
    rule: TripleRule,
    blur: Vec<BlurAtom>,
}

/// Some arrangement of i, j, k is an arithmetic progression.
pub fn index_blur(i: u64, j: u64, k: u64) -> bool {
    let mut v = [i, j, k];
    v.sort_unstable();
    v[1] - v[0] == v[2] - v[1]
}

impl RaAtomStructure {
    pub fn from_table(
        names: Vec<String>,
        identity: &[usize],
        converse: Vec<usize>,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, StructureError> {
        let k = names.len();
        if k == 0 {
            return Err(StructureError::NoAtoms);
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(StructureError::DuplicateName(n.clone()));
            }
        }
        if converse.len() != k {
            return Err(StructureError::WrongLength {
                place: "converse".into(),
                expected: k,
                found: converse.len(),
            });
        }
        let check = |place: &str, a: usize| {
            if a < k {
                Ok(())
            } else {
                Err(StructureError::AtomOutOfRange {
                    place: place.to_string(),
                    id: a,
                    count: k,
                })
            }
        };
        for &a in identity {
            check("identity", a)?;
        }
        for &a in &converse {
            check("converse", a)?;
        }
        let mut table = BTreeSet::new();
        for (a, b, c) in triples {
            check("triples", a)?;
            check("triples", b)?;
            check("triples", c)?;
            table.insert((a, b, c));
        }
        Ok(RaAtomStructure {
            names,
            identity: SetOfAtoms::from_indices(k, identity.iter().copied()),
            converse,
            rule: TripleRule::Table(table),
            blur: Vec::new(),
        })
    }

    /// Monk atom structure over `g`: Id plus (v, c) for every vertex and colour,
    /// all self-converse. Atom (v, c) has id 1 + v·colours + c.
    pub fn monk(graph: &SimpleGraph, colours: usize) -> Self {
        let mut names = vec!["Id".to_string()];
        for v in 0..graph.len() {
            for c in 0..colours {
                names.push(format!("({v},{c})"));
            }
        }
        let k = names.len();
        RaAtomStructure {
            names,
            identity: SetOfAtoms::singleton(k, 0),
            converse: (0..k).collect(),
            rule: TripleRule::Monk {
                graph: graph.clone(),
                colours,
            },
            blur: Vec::new(),
        }
    }

    /// Blur structure: Id plus a_i^{P,W} for rows i, l-subsets W of I and P ∈ W
    /// (P ∈ I with `include_p_outside`), ordered by i, W, P.
    pub fn blur(params: &BlurParams, include_p_outside: bool) -> Result<Self, StructureError> {
        if params.l == 0 || params.i_size < 3 * params.l || params.i_size > 64 {
            return Err(StructureError::Other(format!(
                "blur needs 1 <= l and 3l <= |I| <= 64, got l={} |I|={}",
                params.l, params.i_size
            )));
        }
        let mut names = vec!["Id".to_string()];
        let mut blur = vec![BlurAtom { row: 0, w: 0, p: 0 }];
        for row in 0..params.rows {
            for w in (0..params.i_size).combinations(params.l) {
                let mask = w.iter().fold(0u64, |m, &x| m | (1 << x));
                let ps: Vec<usize> = if include_p_outside { (0..params.i_size).collect() } else { w.clone() };
                for p in ps {
                    let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                    names.push(format!("a{row}[P={p},W={{{}}}]", ws.join(",")));
                    blur.push(BlurAtom { row, w: mask, p });
                }
            }
        }
        let k = names.len();
        Ok(RaAtomStructure {
            names,
            identity: SetOfAtoms::singleton(k, 0),
            converse: (0..k).collect(),
            rule: TripleRule::Blur {
                params: params.clone(),
                include_p_outside,
            },
            blur,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn identity(&self) -> &SetOfAtoms {
        &self.identity
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity.contains(a)
    }

    pub fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn converse_table(&self) -> &[usize] {
        &self.converse
    }

    pub fn rule(&self) -> &TripleRule {
        &self.rule
    }

    /// c ≤ a;b.
    pub fn consistent(&self, a: usize, b: usize, c: usize) -> bool {
        match &self.rule {
            TripleRule::Table(t) => t.contains(&(a, b, c)),
            TripleRule::Monk { graph, colours } => {
                if let Some(r) = self.identity_case(a, b, c) {
                    return r;
                }
                let vc = |x: usize| ((x - 1) / colours, (x - 1) % colours);
                let (va, ca) = vc(a);
                let (vb, cb) = vc(b);
                let (vz, cz) = vc(c);
                !(ca == cb && cb == cz && graph.is_independent(&[va, vb, vz]))
            }
            TripleRule::Blur { .. } => {
                if let Some(r) = self.identity_case(a, b, c) {
                    return r;
                }
                let (x, y, z) = (&self.blur[a], &self.blur[b], &self.blur[c]);
                if x.w & y.w & z.w == 0 {
                    return true;
                }
                let all_same = x.p == y.p && y.p == z.p;
                index_blur(x.row as u64, y.row as u64, z.row as u64) && !all_same
            }
        }
    }

    // Single self-converse identity atom 0, as in the rule-based families.
    fn identity_case(&self, a: usize, b: usize, c: usize) -> Option<bool> {
        if a == 0 {
            Some(b == c)
        } else if b == 0 {
            Some(a == c)
        } else if c == 0 {
            Some(a == b)
        } else {
            None
        }
    }

    /// All consistent triples, sorted.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if self.consistent(a, b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// The same structure with its triples listed explicitly.
    pub fn to_table(&self) -> RaAtomStructure {
        RaAtomStructure {
            names: self.names.clone(),
            identity: self.identity.clone(),
            converse: self.converse.clone(),
            rule: TripleRule::Table(self.triples().into_iter().collect()),
            blur: Vec::new(),
        }
    }

    /// Explicit copy with extra triples declared consistent.
    pub fn with_triples(&self, extra: &[(usize, usize, usize)]) -> RaAtomStructure {
        let mut t = self.to_table();
        if let TripleRule::Table(set) = &mut t.rule {
            set.extend(extra.iter().copied());
        }
        t
    }

    /// a;b as a set of atoms.
    pub fn compose(&self, a: usize, b: usize) -> SetOfAtoms {
        SetOfAtoms::from_indices(self.len(), (0..self.len()).filter(|&c| self.consistent(a, b, c)))
    }
}

/// Checks the converse, identity, cycle and associativity laws on atoms.
pub fn validate_ra_frame(s: &RaAtomStructure) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let k = s.len();
    let nm = |a: usize| s.name(a).to_string();
    for a in 0..k {
        if s.converse(s.converse(a)) != a {
            rep.push("converse involution", nm(a));
        }
    }
    for e in s.identity().iter() {
        if !s.is_identity(s.converse(e)) {
            rep.push("identity self-converse", nm(e));
        }
    }
    if s.identity().is_empty() {
        rep.push("identity law", "no identity atom");
    }
    let comp: Vec<Vec<SetOfAtoms>> = (0..k).map(|a| (0..k).map(|b| s.compose(a, b)).collect()).collect();
    for e in s.identity().iter() {
        for b in 0..k {
            for c in 0..k {
                if comp[e][b].contains(c) != (b == c) {
                    rep.push("identity law", format!("({}, {}, {})", nm(e), nm(b), nm(c)));
                }
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let x = comp[a][b].contains(c);
                let y = comp[s.converse(a)][c].contains(b);
                let z = comp[b][s.converse(c)].contains(s.converse(a));
                if x != y || x != z {
                    rep.push("cycle law", format!("({}, {}, {})", nm(a), nm(b), nm(c)));
                }
            }
        }
    }
    // (a;b);c = a;(b;c) on atoms
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let mut left = SetOfAtoms::empty(k);
                for x in comp[a][b].iter() {
                    left.union_with(&comp[x][c]);
                }
                let mut right = SetOfAtoms::empty(k);
                for y in comp[b][c].iter() {
                    right.union_with(&comp[a][y]);
                }
                if left != right {
                    rep.push("associativity", format!("({};{});{}", nm(a), nm(b), nm(c)));
                }
            }
        }
    }
    rep
}

pub struct BasicMatrices {
    pub frame: ExplicitCa,
    /// Matrices, row-major, one entry per (i, j).
    pub matrices: Vec<Vec<usize>>,
    /// The frame passes the CA validator.
    pub cylindric_basis: bool,
    pub report: ValidationReport,
}

/// Upper bound on the number of matrices built.
pub const MATRIX_LIMIT: usize = 2_000_000;

/// All m×m basic matrices over `ra` as a CA_m frame.
pub fn basic_matrices(ra: &RaAtomStructure, m: usize) -> Result<BasicMatrices, StructureError> {
    if m < 2 {
        return Err(StructureError::DimensionTooSmall(m));
    }
    let k = ra.len();
    let mut pair_order = Vec::new();
    for q in 0..m {
        for p in 0..q {
            pair_order.push((p, q));
        }
    }
    let comp: Vec<Vec<SetOfAtoms>> = (0..k).map(|a| (0..k).map(|b| ra.compose(a, b)).collect()).collect();
    let ids: Vec<usize> = ra.identity().to_vec();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut mat = vec![usize::MAX; m * m];
    // every triangle whose entries are all set must be consistent
    let ok_with = |mat: &[usize], p: usize, q: usize| -> bool {
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let (x, y, z) = (mat[i * m + j], mat[j * m + l], mat[i * m + l]);
                    let touches = [i, j, l].contains(&p) || [i, j, l].contains(&q);
                    if touches && x != usize::MAX && y != usize::MAX && z != usize::MAX && !comp[x][y].contains(z) {
                        return false;
                    }
                }
            }
        }
        true
    };
    #[allow(clippy::too_many_arguments)]
    fn diag(
        d: usize,
        m: usize,
        ids: &[usize],
        ra: &RaAtomStructure,
        mat: &mut Vec<usize>,
        pairs: &[(usize, usize)],
        ok: &dyn Fn(&[usize], usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), StructureError> {
        if d == m {
            return off(0, m, ra, mat, pairs, ok, out);
        }
        for &e in ids {
            mat[d * m + d] = e;
            if ok(mat, d, d) {
                diag(d + 1, m, ids, ra, mat, pairs, ok, out)?;
            }
            mat[d * m + d] = usize::MAX;
        }
        Ok(())
    }
    #[allow(clippy::too_many_arguments)]
    fn off(
        t: usize,
        m: usize,
        ra: &RaAtomStructure,
        mat: &mut Vec<usize>,
        pairs: &[(usize, usize)],
        ok: &dyn Fn(&[usize], usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), StructureError> {
        if t == pairs.len() {
            if out.len() >= MATRIX_LIMIT {
                return Err(StructureError::Other(format!("more than {MATRIX_LIMIT} basic matrices")));
            }
            out.push(mat.clone());
            return Ok(());
        }
        let (p, q) = pairs[t];
        for a in 0..ra.len() {
            mat[p * m + q] = a;
            mat[q * m + p] = ra.converse(a);
            if ok(mat, p, q) {
                off(t + 1, m, ra, mat, pairs, ok, out)?;
            }
        }
        mat[p * m + q] = usize::MAX;
        mat[q * m + p] = usize::MAX;
        Ok(())
    }
    diag(0, m, &ids, ra, &mut mat, &pair_order, &ok_with, &mut out)?;
    if out.is_empty() {
        return Err(StructureError::NoAtoms);
    }
    let index: HashMap<Vec<usize>, u64> = out.iter().enumerate().map(|(n, b)| (b.clone(), n as u64)).collect();
    let names: Vec<String> = out
        .iter()
        .map(|b| {
            let rows: Vec<String> = b.chunks(m).map(|r| r.iter().map(|&a| ra.name(a)).join(" ")).collect();
            format!("[{}]", rows.join("; "))
        })
        .collect();
    let atoms: Vec<u64> = (0..out.len() as u64).collect();
    // face key: the matrix with row and column i blanked, interned
    let mut faces: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut face_of = vec![vec![0u64; m]; out.len()];
    for (n, b) in out.iter().enumerate() {
        for i in 0..m {
            let mut f = b.clone();
            for j in 0..m {
                f[i * m + j] = usize::MAX;
                f[j * m + i] = usize::MAX;
            }
            let next = faces.len() as u64;
            face_of[n][i] = *faces.entry(f).or_insert(next);
        }
    }
    let transpose = |a: u64, i: usize, j: usize| {
        let b = &out[a as usize];
        let sw = |x: usize| {
            if x == i {
                j
            } else if x == j {
                i
            } else {
                x
            }
        };
        let mut c = vec![0; m * m];
        for p in 0..m {
            for q in 0..m {
                c[p * m + q] = b[sw(p) * m + sw(q)];
            }
        }
        index[&c]
    };
    let frame = explicit_from_faces(
        m,
        &atoms,
        names,
        |a, i| face_of[a as usize][i],
        |a, i, j| ra.is_identity(out[a as usize][i * m + j]),
        Some(transpose),
    )?;
    let report = validate_explicit(&frame);
    Ok(BasicMatrices {
        cylindric_basis: report.is_valid(),
        frame,
        matrices: out,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monk_single_edge() {
        let g = SimpleGraph::builtin("edge").unwrap();
        let ra = RaAtomStructure::monk(&g, 3);
        assert_eq!(ra.len(), 7);
        let u0 = ra.index_of("(0,0)").unwrap();
        let v0 = ra.index_of("(1,0)").unwrap();
        assert!(ra.consistent(u0, v0, u0));
        assert!(!ra.consistent(u0, u0, u0));
        for a in 0..7 {
            assert!(ra.consistent(0, a, a));
        }
        assert!(validate_ra_frame(&ra).is_valid());
    }

    #[test]
    fn trivial_ra_and_matrices() {
        let ra = RaAtomStructure::from_table(vec!["Id".into()], &[0], vec![0], [(0, 0, 0)]).unwrap();
        assert!(validate_ra_frame(&ra).is_valid());
        let bm = basic_matrices(&ra, 3).unwrap();
        assert_eq!(bm.matrices.len(), 1);
        assert!(bm.cylindric_basis);
    }

    #[test]
    fn injected_cycle_violation_is_reported() {
        let ra = RaAtomStructure::monk(&SimpleGraph::builtin("edge").unwrap(), 3);
        let (u0, u1) = (ra.index_of("(0,0)").unwrap(), ra.index_of("(0,1)").unwrap());
        let bad = ra.with_triples(&[(u0, u1, 0)]);
        let rep = validate_ra_frame(&bad);
        assert!(rep.mentions("cycle law"), "{rep}");
    }

    #[test]
    fn blur_count_and_rule() {
        let p = BlurParams { l: 2, i_size: 6, rows: 3 };
        let ra = RaAtomStructure::blur(&p, false).unwrap();
        assert_eq!(ra.len(), 91);
        let a = 1;
        assert!(!ra.consistent(a, a, a));
        assert!(ra.consistent(0, a, a));
    }
}
