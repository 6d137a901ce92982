//! Cylindric terms over the complex algebra of an explicit frame.
//!
//! Grammar, loosest first:
//! ```text
//! join := meet ('+' meet)*
//! meet := unary (('·' | '*') unary)*
//! unary := ('-' | '−') unary | atom
//! atom := '0' | '1' | 'd(' i ',' j ')' | 'c(' i ',' join ')'
//!       | 's(' i ',' j ',' join ')' | 'sT(' i ',' j ',' join ')'
//!       | ident | '(' join ')'
//! ```
//! `s(i,j,t)` is the substitution c_j(d_ij · t), the maps u with u[j := u_i]
//! in t; `sT(i,j,t)` swaps positions
//! i and j and needs a frame with transpositions.

use crate::atoms::SetOfAtoms;
use crate::frame::ExplicitCa;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Diag(usize, usize),
    Var(String),
    Neg(Box<Term>),
    Cyl(usize, Box<Term>),
    Subst(usize, usize, Box<Term>),
    Swap(usize, usize, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("frame has no transpositions")]
    NoTranspositions,
    #[error("{0}")]
    Unsupported(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an index");
        }
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("index too large")
        })
    }

    fn join(&mut self) -> Result<Term, ParseError> {
        let mut t = self.meet()?;
        while self.eat('+') {
            t = Term::Join(Box::new(t), Box::new(self.meet()?));
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<Term, ParseError> {
        let mut t = self.unary()?;
        while self.eat('·') || self.eat('*') {
            t = Term::Meet(Box::new(t), Box::new(self.unary()?));
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if self.eat('-') || self.eat('−') {
            return Ok(Term::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let t = self.join()?;
                self.expect(')')?;
                Ok(t)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Term::One)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let word = &self.src[start..self.pos];
                let save = self.pos;
                let call = self.eat('(');
                if !call {
                    self.pos = save;
                    return Ok(Term::Var(word.to_string()));
                }
                match word {
                    "d" => {
                        let i = self.index()?;
                        self.expect(',')?;
                        let j = self.index()?;
                        self.expect(')')?;
                        Ok(Term::Diag(i, j))
                    }
                    "c" => {
                        let i = self.index()?;
                        self.expect(',')?;
                        let t = self.join()?;
                        self.expect(')')?;
                        Ok(Term::Cyl(i, Box::new(t)))
                    }
                    "s" | "sT" => {
                        let i = self.index()?;
                        self.expect(',')?;
                        let j = self.index()?;
                        self.expect(',')?;
                        let t = Box::new(self.join()?);
                        self.expect(')')?;
                        Ok(if word == "s" { Term::Subst(i, j, t) } else { Term::Swap(i, j, t) })
                    }
                    _ => {
                        self.pos = start;
                        self.err(format!("unknown operator {word}"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let t = p.join()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

impl std::str::FromStr for Term {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

impl Term {
    fn prec(&self) -> u8 {
        match self {
            Term::Join(..) => 0,
            Term::Meet(..) => 1,
            Term::Neg(_) => 2,
            _ => 3,
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.iter().any(|x: &String| x == v) {
                out.push(v.to_string());
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Term::Var(v) => f(v),
            Term::Neg(t) | Term::Cyl(_, t) | Term::Subst(_, _, t) | Term::Swap(_, _, t) => t.visit_vars(f),
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            _ => {}
        }
    }

    pub fn occurrences(&self, var: &str) -> usize {
        let mut k = 0;
        self.visit_vars(&mut |v| {
            if v == var {
                k += 1
            }
        });
        k
    }

    /// No complement anywhere, so the term is monotone in every variable.
    pub fn is_monotone(&self) -> bool {
        match self {
            Term::Neg(_) => false,
            Term::Cyl(_, t) | Term::Subst(_, _, t) | Term::Swap(_, _, t) => t.is_monotone(),
            Term::Meet(a, b) | Term::Join(a, b) => a.is_monotone() && b.is_monotone(),
            _ => true,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, t: &Term, min: u8| {
            if t.prec() < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Diag(i, j) => write!(f, "d({i},{j})"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Neg(t) => {
                write!(f, "-")?;
                side(f, t, 2)
            }
            Term::Cyl(i, t) => write!(f, "c({i}, {t})"),
            Term::Subst(i, j, t) => write!(f, "s({i},{j}, {t})"),
            Term::Swap(i, j, t) => write!(f, "sT({i},{j}, {t})"),
            Term::Meet(a, b) => {
                side(f, a, 1)?;
                write!(f, " · ")?;
                side(f, b, 2)
            }
            Term::Join(a, b) => {
                side(f, a, 0)?;
                write!(f, " + ")?;
                side(f, b, 1)
            }
        }
    }
}

pub type Assignment = BTreeMap<String, SetOfAtoms>;

fn cyl(e: &ExplicitCa, i: usize, x: &SetOfAtoms) -> SetOfAtoms {
    let mut out = SetOfAtoms::empty(e.len());
    for a in x.iter() {
        out.union_with(e.cyl_row(i, a));
    }
    out
}

pub fn eval_term(e: &ExplicitCa, t: &Term, env: &Assignment) -> Result<SetOfAtoms, EvalError> {
    let n = e.dim();
    let w = e.len();
    let check = |i: usize| {
        if i < n {
            Ok(())
        } else {
            Err(EvalError::Index { index: i, dim: n })
        }
    };
    Ok(match t {
        Term::Zero => SetOfAtoms::empty(w),
        Term::One => SetOfAtoms::full(w),
        Term::Diag(i, j) => {
            check(*i)?;
            check(*j)?;
            e.diag(*i, *j)
        }
        Term::Var(v) => {
            let x = env.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
            if x.width() != w {
                return Err(EvalError::Unsupported(format!("value of {v} has the wrong width")));
            }
            x.clone()
        }
        Term::Neg(t) => eval_term(e, t, env)?.complement(),
        Term::Cyl(i, t) => {
            check(*i)?;
            cyl(e, *i, &eval_term(e, t, env)?)
        }
        Term::Subst(i, j, t) => {
            check(*i)?;
            check(*j)?;
            let x = eval_term(e, t, env)?;
            if i == j {
                x
            } else {
                cyl(e, *j, &x.intersection(&e.diag(*i, *j)))
            }
        }
        Term::Swap(i, j, t) => {
            check(*i)?;
            check(*j)?;
            let x = eval_term(e, t, env)?;
            if i == j {
                x
            } else {
                let mut out = SetOfAtoms::empty(w);
                for a in x.iter() {
                    out.insert(e.transpose(a, *i, *j).ok_or(EvalError::NoTranspositions)?);
                }
                out
            }
        }
        Term::Meet(a, b) => eval_term(e, a, env)?.intersection(&eval_term(e, b, env)?),
        Term::Join(a, b) => eval_term(e, a, env)?.union(&eval_term(e, b, env)?),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Variables range over single atoms; needs monotone terms.
    AtomsOnly,
    /// Every assignment of subsets.
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// What a positive answer covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckScope {
    AllAssignments,
    AtomAssignments,
    SampledAssignments { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityReport {
    pub holds: bool,
    pub scope: CheckScope,
    pub checked: u64,
    /// Assignment (as atom index sets) falsifying lhs ≤ rhs.
    pub counterexample: Option<BTreeMap<String, Vec<usize>>>,
}

/// Exhaustive checks stop above this many assignments.
pub const EXHAUSTIVE_ASSIGNMENT_LIMIT: u128 = 1 << 22;

/// Decides lhs ≤ rhs in the complex algebra of `e`.
///
/// In atoms-only mode a positive answer covers all assignments when the
/// left side uses each variable once (it then distributes over unions in
/// every variable and the right side is monotone); otherwise it covers
/// atom-valued assignments only.
pub fn check_inequality(e: &ExplicitCa, lhs: &Term, rhs: &Term, mode: CheckMode) -> Result<InequalityReport, EvalError> {
    let mut vars = lhs.variables();
    for v in rhs.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let w = e.len();
    let mut checked = 0u64;
    let mut test = |env: &Assignment| -> Result<Option<BTreeMap<String, Vec<usize>>>, EvalError> {
        checked += 1;
        let l = eval_term(e, lhs, env)?;
        let r = eval_term(e, rhs, env)?;
        if l.is_subset(&r) {
            Ok(None)
        } else {
            Ok(Some(env.iter().map(|(k, v)| (k.clone(), v.to_vec())).collect()))
        }
    };
    let (scope, cex) = match mode {
        CheckMode::AtomsOnly => {
            if !lhs.is_monotone() || !rhs.is_monotone() {
                return Err(EvalError::Unsupported("atoms-only checking needs complement-free terms".into()));
            }
            let linear = vars.iter().all(|v| lhs.occurrences(v) <= 1);
            let mut cex = None;
            let mut idx = vec![0usize; vars.len()];
            if w > 0 || vars.is_empty() {
                loop {
                    let env: Assignment = vars
                        .iter()
                        .zip(&idx)
                        .map(|(v, &a)| (v.clone(), SetOfAtoms::singleton(w, a)))
                        .collect();
                    if let Some(c) = test(&env)? {
                        cex = Some(c);
                        break;
                    }
                    if !advance(&mut idx, w) {
                        break;
                    }
                }
            }
            let scope = if linear {
                CheckScope::AllAssignments
            } else {
                CheckScope::AtomAssignments
            };
            (scope, cex)
        }
        CheckMode::Exhaustive => {
            let total = 1u128.checked_shl((w * vars.len()) as u32).unwrap_or(u128::MAX);
            if w * vars.len() >= 128 || total > EXHAUSTIVE_ASSIGNMENT_LIMIT {
                return Err(EvalError::Unsupported(format!(
                    "2^{} assignments exceed the exhaustive limit",
                    w * vars.len()
                )));
            }
            let mut cex = None;
            for code in 0..total {
                let env: Assignment = vars
                    .iter()
                    .enumerate()
                    .map(|(p, v)| {
                        let bits = (code >> (p * w)) & ((1u128 << w) - 1);
                        (v.clone(), SetOfAtoms::from_indices(w, (0..w).filter(|&a| bits & (1 << a) != 0)))
                    })
                    .collect();
                if let Some(c) = test(&env)? {
                    cex = Some(c);
                    break;
                }
            }
            (CheckScope::AllAssignments, cex)
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cex = None;
            for _ in 0..samples {
                let env: Assignment = vars
                    .iter()
                    .map(|v| (v.clone(), SetOfAtoms::from_indices(w, (0..w).filter(|_| rng.gen_bool(0.5)))))
                    .collect();
                if let Some(c) = test(&env)? {
                    cex = Some(c);
                    break;
                }
            }
            (CheckScope::SampledAssignments { samples }, cex)
        }
    };
    Ok(InequalityReport {
        holds: cex.is_none(),
        scope,
        checked,
        counterexample: cex,
    })
}

fn advance(idx: &mut [usize], w: usize) -> bool {
    for x in idx.iter_mut().rev() {
        *x += 1;
        if *x < w {
            return true;
        }
        *x = 0;
    }
    false
}

/// Builds an assignment from atom names per variable.
pub fn assignment_from_names(e: &ExplicitCa, vars: &BTreeMap<String, Vec<String>>) -> Result<Assignment, String> {
    let mut env = Assignment::new();
    for (v, names) in vars {
        let mut set = BTreeSet::new();
        for n in names {
            set.insert(e.index_of(n).ok_or_else(|| format!("unknown atom {n}"))?);
        }
        env.insert(v.clone(), SetOfAtoms::from_indices(e.len(), set));
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullset::build_full_set_structure;

    #[test]
    fn parse_print_round_trip() {
        for src in [
            "c(1, c(0,x) · s(1,0, c(1,y))) · c(1,x) · c(0,y)",
            "-(x + y) * d(0,1)",
            "sT(0,2, -x) + 0 + 1",
        ] {
            let t = parse_term(src).unwrap();
            let again = parse_term(&t.to_string()).unwrap();
            assert_eq!(t, again, "{src}");
        }
    }

    #[test]
    fn precedence_and_errors() {
        let t = parse_term("-x + y · z").unwrap();
        let want = Term::Join(
            Box::new(Term::Neg(Box::new(Term::Var("x".into())))),
            Box::new(Term::Meet(Box::new(Term::Var("y".into())), Box::new(Term::Var("z".into())))),
        );
        assert_eq!(t, want);
        let e = parse_term("c(0 x").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_term("x +").is_err());
        assert!(parse_term("q(1, x)").is_err());
    }

    #[test]
    fn substitution_on_full_set() {
        // s(0,1) sends X to the maps u with u[1 := u[0]] in X
        let e = build_full_set_structure(2, 2).unwrap();
        let env: Assignment = [("x".to_string(), SetOfAtoms::singleton(4, 0))].into();
        let v = eval_term(&e, &parse_term("s(0,1,x)").unwrap(), &env).unwrap();
        let names: Vec<&str> = v.iter().map(|a| e.name(a)).collect();
        assert_eq!(names, vec!["(0,0)", "(0,1)"]);
    }

    #[test]
    fn approximate_witness_composes() {
        let e = build_full_set_structure(3, 3).unwrap();
        let vars = BTreeMap::from([
            ("x".to_string(), vec!["(0,1,0)".to_string()]),
            ("y".to_string(), vec!["(1,0,0)".to_string()]),
        ]);
        let env = assignment_from_names(&e, &vars).unwrap();
        let t = parse_term("c(1, c(0,x) · s(1,0, c(1,y))) · c(1,x) · c(0,y)").unwrap();
        let v = eval_term(&e, &t, &env).unwrap();
        let names: Vec<&str> = v.iter().map(|a| e.name(a)).collect();
        assert_eq!(names, vec!["(0,0,0)"]);
    }
}
