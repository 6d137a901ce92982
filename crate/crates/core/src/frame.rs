use crate::atoms::{pair_count, pair_index, pairs, AtomId, SetOfAtoms};
use crate::rainbow::RainbowFrame;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;
use thiserror::Error;

/// Structural problems with an atom structure, as opposed to axiom violations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("structure has no atoms")]
    NoAtoms,
    #[error("duplicate atom name {0:?}")]
    DuplicateName(String),
    #[error("atom id {id} out of range in {place} (atom count {count})")]
    AtomOutOfRange { place: String, id: usize, count: usize },
    #[error("index {index} out of range in {place} (dimension {dim})")]
    IndexOutOfRange { place: String, index: usize, dim: usize },
    #[error("expected {expected} entries in {place}, found {found}")]
    WrongLength { place: String, expected: usize, found: usize },
    #[error("{place} is not a permutation of the atoms")]
    NotAPermutation { place: String },
    #[error("{0}")]
    Other(String),
}

/// Finite cylindric (or polyadic-equality) atom structure given by explicit relations.
#[derive(Clone, Debug)]
pub struct ExplicitCa {
    dim: usize,
    names: Vec<String>,
    cyl: Vec<Vec<SetOfAtoms>>,
    diag: Vec<SetOfAtoms>,
    transp: Option<Vec<Vec<u32>>>,
}

impl ExplicitCa {
    /// `cyl[i]` lists the pairs `(a, b)` of the relation T_i; `diag` maps `(i, j)`
    /// with `i < j` to the members of E_ij; `transp` maps `(i, j)` to the permutation S_ij.
    pub fn from_parts(
        dim: usize,
        names: Vec<String>,
        cyl: Vec<Vec<(usize, usize)>>,
        diag: BTreeMap<(usize, usize), Vec<usize>>,
        transp: Option<BTreeMap<(usize, usize), Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        if dim < 2 {
            return Err(StructureError::DimensionTooSmall(dim));
        }
        let count = names.len();
        if count == 0 {
            return Err(StructureError::NoAtoms);
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(StructureError::DuplicateName(n.clone()));
            }
        }
        if cyl.len() != dim {
            return Err(StructureError::WrongLength {
                place: "cyl".into(),
                expected: dim,
                found: cyl.len(),
            });
        }
        let check = |place: String, id: usize| {
            if id >= count {
                Err(StructureError::AtomOutOfRange { place, id, count })
            } else {
                Ok(())
            }
        };
        let mut rows = Vec::with_capacity(dim);
        for (i, rel) in cyl.iter().enumerate() {
            let mut r = vec![SetOfAtoms::empty(count); count];
            for &(a, b) in rel {
                check(format!("cyl[{i}]"), a)?;
                check(format!("cyl[{i}]"), b)?;
                r[a].insert(b);
            }
            rows.push(r);
        }
        let mut diag_sets = vec![SetOfAtoms::empty(count); pair_count(dim)];
        for (&(i, j), members) in &diag {
            for &x in [i, j].iter() {
                if x >= dim {
                    return Err(StructureError::IndexOutOfRange {
                        place: "diag".into(),
                        index: x,
                        dim,
                    });
                }
            }
            if i == j {
                return Err(StructureError::Other(format!(
                    "diag entry ({i},{i}) is implicit and must not be given"
                )));
            }
            let set = &mut diag_sets[pair_index(dim, i, j)];
            for &a in members {
                check(format!("diag[{i},{j}]"), a)?;
                set.insert(a);
            }
        }
        let transp = match transp {
            None => None,
            Some(map) => {
                let mut perms = vec![Vec::new(); pair_count(dim)];
                for (&(i, j), perm) in &map {
                    if i >= dim || j >= dim || i == j {
                        return Err(StructureError::IndexOutOfRange {
                            place: "transp".into(),
                            index: i.max(j),
                            dim,
                        });
                    }
                    if perm.len() != count {
                        return Err(StructureError::WrongLength {
                            place: format!("transp[{i},{j}]"),
                            expected: count,
                            found: perm.len(),
                        });
                    }
                    let mut hit = vec![false; count];
                    for &b in perm {
                        check(format!("transp[{i},{j}]"), b)?;
                        hit[b] = true;
                    }
                    if hit.iter().any(|h| !h) {
                        return Err(StructureError::NotAPermutation {
                            place: format!("transp[{i},{j}]"),
                        });
                    }
                    perms[pair_index(dim, i, j)] = perm.iter().map(|&b| b as u32).collect();
                }
                if let Some((i, j)) = pairs(dim).find(|&(i, j)| perms[pair_index(dim, i, j)].is_empty()) {
                    return Err(StructureError::Other(format!("transp[{i},{j}] missing")));
                }
                Some(perms)
            }
        };
        Ok(ExplicitCa {
            dim,
            names,
            cyl: rows,
            diag: diag_sets,
            transp,
        })
    }

    /// Builds T_i from class labels: `classes[i][a] == classes[i][b]` iff a T_i b.
    pub fn from_classes(
        dim: usize,
        names: Vec<String>,
        classes: &[Vec<usize>],
        diag: BTreeMap<(usize, usize), Vec<usize>>,
        transp: Option<BTreeMap<(usize, usize), Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        let count = names.len();
        let mut cyl = Vec::with_capacity(classes.len());
        for (i, lab) in classes.iter().enumerate() {
            if lab.len() != count {
                return Err(StructureError::WrongLength {
                    place: format!("classes[{i}]"),
                    expected: count,
                    found: lab.len(),
                });
            }
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (a, &c) in lab.iter().enumerate() {
                groups.entry(c).or_default().push(a);
            }
            let mut rel = Vec::new();
            for g in groups.values() {
                for &a in g {
                    for &b in g {
                        rel.push((a, b));
                    }
                }
            }
            cyl.push(rel);
        }
        Self::from_parts(dim, names, cyl, diag, transp)
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    /// Atoms b with a T_i b.
    pub fn cyl_row(&self, i: usize, a: usize) -> &SetOfAtoms {
        &self.cyl[i][a]
    }

    /// E_ij; E_ii is the full set.
    pub fn diag(&self, i: usize, j: usize) -> SetOfAtoms {
        if i == j {
            SetOfAtoms::full(self.len())
        } else {
            self.diag[pair_index(self.dim, i, j)].clone()
        }
    }

    pub fn in_diag(&self, a: usize, i: usize, j: usize) -> bool {
        i == j || self.diag[pair_index(self.dim, i, j)].contains(a)
    }

    pub fn has_transpositions(&self) -> bool {
        self.transp.is_some()
    }

    pub fn transpose(&self, a: usize, i: usize, j: usize) -> Option<usize> {
        if i == j {
            return Some(a);
        }
        self.transp
            .as_ref()
            .map(|t| t[pair_index(self.dim, i, j)][a] as usize)
    }

    /// Replaces T_i wholesale. Used for perturbation experiments.
    pub fn with_cyl_pairs(&self, i: usize, rel: &[(usize, usize)]) -> Self {
        let mut out = self.clone();
        let count = self.len();
        let mut rows = vec![SetOfAtoms::empty(count); count];
        for &(a, b) in rel {
            rows[a].insert(b);
        }
        out.cyl[i] = rows;
        out
    }

    pub fn cyl_pairs(&self, i: usize) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for a in 0..self.len() {
            for b in self.cyl[i][a].iter() {
                v.push((a, b));
            }
        }
        v
    }

    pub fn diag_members(&self, i: usize, j: usize) -> Vec<usize> {
        self.diag(i, j).to_vec()
    }

    pub fn transp_perm(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        self.transp
            .as_ref()
            .map(|t| t[pair_index(self.dim, i, j)].iter().map(|&b| b as usize).collect())
    }
}

/// A finite CA_n / PEA_n atom structure: either explicit relations or a rainbow
/// frame whose relations are computed from coloured graphs on demand.
#[derive(Clone, Debug)]
pub enum CaAtomStructure {
    Explicit(ExplicitCa),
    Rainbow(Arc<RainbowFrame>),
}

impl From<ExplicitCa> for CaAtomStructure {
    fn from(e: ExplicitCa) -> Self {
        CaAtomStructure::Explicit(e)
    }
}

impl From<RainbowFrame> for CaAtomStructure {
    fn from(r: RainbowFrame) -> Self {
        CaAtomStructure::Rainbow(Arc::new(r))
    }
}

/// Frames with at most this many atoms can be listed and converted to explicit form.
pub const ENUMERATION_LIMIT: u64 = 20_000_000;

impl CaAtomStructure {
    pub fn dim(&self) -> usize {
        match self {
            CaAtomStructure::Explicit(e) => e.dim,
            CaAtomStructure::Rainbow(r) => r.dim(),
        }
    }

    pub fn has_transpositions(&self) -> bool {
        match self {
            CaAtomStructure::Explicit(e) => e.has_transpositions(),
            CaAtomStructure::Rainbow(_) => true,
        }
    }

    pub fn atom_count(&self) -> u64 {
        match self {
            CaAtomStructure::Explicit(e) => e.len() as u64,
            CaAtomStructure::Rainbow(r) => r.atom_count(),
        }
    }

    pub fn is_enumerable(&self) -> bool {
        self.atom_count() <= ENUMERATION_LIMIT
    }

    /// All atoms in their canonical order. Panics on frames above the enumeration limit.
    pub fn atoms(&self) -> Vec<AtomId> {
        match self {
            CaAtomStructure::Explicit(e) => (0..e.len() as u64).collect(),
            CaAtomStructure::Rainbow(r) => r.atom_list().to_vec(),
        }
    }

    pub fn contains(&self, a: AtomId) -> bool {
        match self {
            CaAtomStructure::Explicit(e) => (a as usize) < e.len(),
            CaAtomStructure::Rainbow(r) => r.contains(a),
        }
    }

    pub fn atom_name(&self, a: AtomId) -> String {
        match self {
            CaAtomStructure::Explicit(e) => e.name(a as usize).to_string(),
            CaAtomStructure::Rainbow(r) => r.atom_name(a),
        }
    }

    pub fn atom_by_name(&self, name: &str) -> Option<AtomId> {
        match self {
            CaAtomStructure::Explicit(e) => e.index_of(name).map(|x| x as AtomId),
            CaAtomStructure::Rainbow(r) => r.parse_atom_name(name),
        }
    }

    pub fn in_diag(&self, a: AtomId, i: usize, j: usize) -> bool {
        match self {
            CaAtomStructure::Explicit(e) => e.in_diag(a as usize, i, j),
            CaAtomStructure::Rainbow(r) => r.in_diag(a, i, j),
        }
    }

    pub fn cyl_related(&self, a: AtomId, b: AtomId, i: usize) -> bool {
        match self {
            CaAtomStructure::Explicit(e) => e.cyl_row(i, a as usize).contains(b as usize),
            CaAtomStructure::Rainbow(r) => r.face_key(a, i) == r.face_key(b, i),
        }
    }

    /// Atoms b with a T_i b, in increasing id order.
    pub fn cyl_class(&self, a: AtomId, i: usize) -> Vec<AtomId> {
        match self {
            CaAtomStructure::Explicit(e) => e.cyl_row(i, a as usize).iter().map(|b| b as AtomId).collect(),
            CaAtomStructure::Rainbow(r) => r.cyl_class(a, i),
        }
    }

    pub fn transpose(&self, a: AtomId, i: usize, j: usize) -> Option<AtomId> {
        match self {
            CaAtomStructure::Explicit(e) => e.transpose(a as usize, i, j).map(|b| b as AtomId),
            CaAtomStructure::Rainbow(r) => Some(r.transpose(a, i, j)),
        }
    }

    /// Position of `a` in the canonical atom order.
    pub fn dense_index(&self, a: AtomId) -> Option<usize> {
        match self {
            CaAtomStructure::Explicit(e) => ((a as usize) < e.len()).then_some(a as usize),
            CaAtomStructure::Rainbow(r) => r.atom_list().binary_search(&a).ok(),
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitCa> {
        match self {
            CaAtomStructure::Explicit(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_rainbow(&self) -> Option<&RainbowFrame> {
        match self {
            CaAtomStructure::Rainbow(r) => Some(r),
            _ => None,
        }
    }

    /// Explicit copy of the frame; atom ids of the copy are dense positions.
    pub fn to_explicit(&self) -> Result<ExplicitCa, StructureError> {
        match self {
            CaAtomStructure::Explicit(e) => Ok(e.clone()),
            CaAtomStructure::Rainbow(r) => r.to_explicit(),
        }
    }

    /// Stable hash binding certificates and documents to this structure.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        match self {
            CaAtomStructure::Explicit(e) => {
                h.update(format!("explicit;dim={};atoms={};", e.dim, e.len()));
                for n in &e.names {
                    h.update(n.as_bytes());
                    h.update([0u8]);
                }
                for i in 0..e.dim {
                    h.update(format!("cyl{i}:"));
                    for a in 0..e.len() {
                        for b in e.cyl_row(i, a).iter() {
                            h.update(format!("{a},{b};"));
                        }
                    }
                }
                for (i, j) in pairs(e.dim) {
                    h.update(format!("diag{i}{j}:"));
                    for a in e.diag(i, j).iter() {
                        h.update(format!("{a};"));
                    }
                }
                if e.transp.is_some() {
                    for (i, j) in pairs(e.dim) {
                        h.update(format!("transp{i}{j}:"));
                        for b in e.transp_perm(i, j).unwrap() {
                            h.update(format!("{b};"));
                        }
                    }
                }
            }
            CaAtomStructure::Rainbow(r) => {
                h.update(r.describe());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Builds an explicit frame from enumerated atoms and a face function: a T_i b iff
/// `face(a, i) == face(b, i)`.
pub(crate) fn explicit_from_faces<F, D, S>(
    dim: usize,
    atoms: &[AtomId],
    names: Vec<String>,
    face: F,
    in_diag: D,
    transpose: Option<S>,
) -> Result<ExplicitCa, StructureError>
where
    F: Fn(AtomId, usize) -> u64,
    D: Fn(AtomId, usize, usize) -> bool,
    S: Fn(AtomId, usize, usize) -> AtomId,
{
    let index: HashMap<AtomId, usize> = atoms.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let mut classes = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut ids: HashMap<u64, usize> = HashMap::new();
        let lab: Vec<usize> = atoms
            .iter()
            .map(|&a| {
                let f = face(a, i);
                let next = ids.len();
                *ids.entry(f).or_insert(next)
            })
            .collect();
        classes.push(lab);
    }
    let mut diag = BTreeMap::new();
    for (i, j) in pairs(dim) {
        let members: Vec<usize> = atoms
            .iter()
            .enumerate()
            .filter(|(_, &a)| in_diag(a, i, j))
            .map(|(k, _)| k)
            .collect();
        diag.insert((i, j), members);
    }
    let transp = match transpose {
        None => None,
        Some(t) => {
            let mut map = BTreeMap::new();
            for (i, j) in pairs(dim) {
                let mut perm = Vec::with_capacity(atoms.len());
                for &a in atoms {
                    let b = t(a, i, j);
                    let k = *index.get(&b).ok_or_else(|| {
                        StructureError::Other(format!("transposition image of atom {a} is not an atom"))
                    })?;
                    perm.push(k);
                }
                map.insert((i, j), perm);
            }
            Some(map)
        }
    };
    ExplicitCa::from_classes(dim, names, &classes, diag, transp)
}
