//! Frame validation: each check below is the atom-level correspondent of one
//! CA_n / PEA_n axiom. Complex operations are completely additive, so checking
//! on atoms covers every element of the complex algebra.

use crate::atoms::{pairs, SetOfAtoms};
use crate::frame::{CaAtomStructure, ExplicitCa};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: String,
    pub witness: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every atom (pair, triple) was checked.
    Exhaustive,
    /// Only the given number of random atoms were checked.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub scope: Scope,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            violations: Vec::new(),
            scope: Scope::Exhaustive,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    /// Records a violation unless the axiom already has a witness.
    pub fn push(&mut self, axiom: impl Into<String>, witness: impl Into<String>) {
        let axiom = axiom.into();
        if !self.mentions(&axiom) {
            self.violations.push(Violation {
                axiom,
                witness: witness.into(),
            });
        }
    }
}

impl Default for ValidationReport {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")?;
        } else {
            for (k, v) in self.violations.iter().enumerate() {
                if k > 0 {
                    writeln!(f)?;
                }
                write!(f, "{}: {}", v.axiom, v.witness)?;
            }
        }
        if let Scope::Sampled { samples, seed } = self.scope {
            write!(f, " (sampled {samples} atoms, seed {seed})")?;
        }
        Ok(())
    }
}

/// Frames up to this size are converted to explicit form and checked exhaustively.
pub const EXHAUSTIVE_VALIDATION_LIMIT: u64 = 20_000;

pub fn validate_ca_frame(s: &CaAtomStructure) -> ValidationReport {
    match s {
        CaAtomStructure::Explicit(e) => validate_explicit(e),
        CaAtomStructure::Rainbow(r) => {
            if r.atom_count() <= EXHAUSTIVE_VALIDATION_LIMIT {
                match r.to_explicit() {
                    Ok(e) => validate_explicit(&e),
                    Err(err) => {
                        let mut rep = ValidationReport::new();
                        rep.push("structure", err.to_string());
                        rep
                    }
                }
            } else {
                r.validate_sampled(2000, 0x5eed)
            }
        }
    }
}

fn rel_rows(e: &ExplicitCa, i: usize) -> Vec<SetOfAtoms> {
    (0..e.len()).map(|a| e.cyl_row(i, a).clone()).collect()
}

fn compose(r: &[SetOfAtoms], s: &[SetOfAtoms]) -> Vec<SetOfAtoms> {
    r.iter()
        .map(|row| {
            let mut out = SetOfAtoms::empty(row.width());
            for b in row.iter() {
                out.union_with(&s[b]);
            }
            out
        })
        .collect()
}

pub fn validate_explicit(e: &ExplicitCa) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let n = e.dim();
    let k = e.len();
    let nm = |a: usize| e.name(a).to_string();
    let rows: Vec<Vec<SetOfAtoms>> = (0..n).map(|i| rel_rows(e, i)).collect();

    for i in 0..n {
        let r = &rows[i];
        // c_i x >= x
        if let Some(a) = (0..k).find(|&a| !r[a].contains(a)) {
            rep.push(format!("c{i} extensivity/reflexivity"), format!("atom {} not T{i}-related to itself", nm(a)));
        }
        // x . c_i y = 0 iff y . c_i x = 0
        'sym: for a in 0..k {
            for b in r[a].iter() {
                if !r[b].contains(a) {
                    rep.push(
                        format!("c{i} conjugation/symmetry"),
                        format!("{} T{i} {} but not conversely", nm(a), nm(b)),
                    );
                    break 'sym;
                }
            }
        }
        // c_i c_i x = c_i x
        'tr: for a in 0..k {
            for b in r[a].iter() {
                if !r[b].is_subset(&r[a]) {
                    let c = r[b].difference(&r[a]).iter().next().unwrap();
                    rep.push(
                        format!("c{i} idempotence/transitivity"),
                        format!("{} T{i} {} T{i} {} but not {} T{i} {}", nm(a), nm(b), nm(c), nm(a), nm(c)),
                    );
                    break 'tr;
                }
            }
        }
    }

    // c_i c_j x = c_j c_i x
    for (i, j) in pairs(n) {
        let ij = compose(&rows[i], &rows[j]);
        let ji = compose(&rows[j], &rows[i]);
        if let Some(a) = (0..k).find(|&a| ij[a] != ji[a]) {
            let diff = ij[a].difference(&ji[a]).union(&ji[a].difference(&ij[a]));
            let b = diff.iter().next().unwrap();
            rep.push(
                format!("c{i}c{j} commutativity"),
                format!("atoms {} and {} related by only one of T{i};T{j} and T{j};T{i}", nm(a), nm(b)),
            );
        }
    }

    // d_ij = c_k(d_ik . d_kj) for k distinct from i, j
    for (i, j) in pairs(n) {
        for kk in (0..n).filter(|&x| x != i && x != j) {
            let inter = e.diag(i, kk).intersection(&e.diag(kk, j));
            let mut img = SetOfAtoms::empty(k);
            for a in inter.iter() {
                img.union_with(&rows[kk][a]);
            }
            let dij = e.diag(i, j);
            if img != dij {
                let diff = img.difference(&dij).union(&dij.difference(&img));
                let a = diff.iter().next().unwrap();
                rep.push(
                    format!("d{i}{j} via c{kk}"),
                    format!("atom {} is in exactly one of E{i}{j} and T{kk}(E{i}{kk} & E{kk}{j})", nm(a)),
                );
            }
        }
    }

    // c_i(d_ij . x) . c_i(d_ij . -x) = 0
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let dij = e.diag(i, j);
            'uniq: for a in 0..k {
                let hit = rows[i][a].intersection(&dij);
                if hit.len() > 1 {
                    let v = hit.to_vec();
                    rep.push(
                        format!("c{i} diagonal uniqueness d{i}{j}"),
                        format!("T{i}-class of {} holds E{i}{j} atoms {} and {}", nm(a), nm(v[0]), nm(v[1])),
                    );
                    break 'uniq;
                }
            }
        }
    }

    if e.has_transpositions() {
        validate_transpositions(e, &rows, &mut rep);
    }
    rep
}

fn swap(i: usize, j: usize, x: usize) -> usize {
    if x == i {
        j
    } else if x == j {
        i
    } else {
        x
    }
}

fn validate_transpositions(e: &ExplicitCa, rows: &[Vec<SetOfAtoms>], rep: &mut ValidationReport) {
    let n = e.dim();
    let k = e.len();
    let nm = |a: usize| e.name(a).to_string();
    for (i, j) in pairs(n) {
        let s = |a: usize| e.transpose(a, i, j).unwrap();
        if let Some(a) = (0..k).find(|&a| s(s(a)) != a) {
            rep.push(format!("s{i}{j} involution/permutation"), format!("S{i}{j} S{i}{j} {} != {}", nm(a), nm(a)));
        }
        if let Some(a) = (0..k).find(|&a| e.in_diag(a, i, j) && s(a) != a) {
            rep.push(format!("s{i}{j} fixes d{i}{j}"), format!("atom {} in E{i}{j} moved to {}", nm(a), nm(s(a))));
        }
        for (p, q) in pairs(n) {
            let (p2, q2) = (swap(i, j, p), swap(i, j, q));
            if let Some(a) = (0..k).find(|&a| e.in_diag(a, p, q) != e.in_diag(s(a), p2, q2)) {
                rep.push(
                    format!("s{i}{j} diagonal transport d{p}{q}"),
                    format!("atom {} vs image {}", nm(a), nm(s(a))),
                );
            }
        }
        for c in 0..n {
            let c2 = swap(i, j, c);
            'tr: for a in 0..k {
                for b in 0..k {
                    if rows[c][a].contains(b) != rows[c2][s(a)].contains(s(b)) {
                        rep.push(
                            format!("s{i}{j} cylindrifier transport c{c}"),
                            format!("pair {}, {} vs images under S{i}{j}", nm(a), nm(b)),
                        );
                        break 'tr;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if i == j || j == l || i == l {
                    continue;
                }
                let bad = (0..k).find(|&a| {
                    let x = e.transpose(a, i, j).unwrap();
                    let x = e.transpose(x, j, l).unwrap();
                    let x = e.transpose(x, i, j).unwrap();
                    x != e.transpose(a, i, l).unwrap()
                });
                if let Some(a) = bad {
                    rep.push(format!("s{i}{j} s{j}{l} group law"), format!("atom {}", nm(a)));
                }
            }
        }
    }
}
