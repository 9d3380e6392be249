//! Multi-sorted syntax over the sorts `R0..Rn`.
//!
//! The language has a constant `0` of sort `R0`, embeddings `f_i: R0 -> Ri`,
//! retractions `g_i: Ri -> R0` and one strict order `<_i` per ordered sort.
//! Terms are well-sorted by construction when built through [`Term::f`] and
//! [`Term::g`] checked against a sort count with [`Term::check`].

mod normalize;
mod parse;
mod print;
mod substructure;

pub use normalize::normalize_term;
pub use parse::{parse_formula, parse_formula_with, parse_term, SortContext};
pub use substructure::{generated_substructure, SubstructureTable};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::SyntaxError;

/// A sort index. `Sort(0)` is the unordered base sort, `Sort(i)` for `i >= 1`
/// carries the order `<_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Sort(pub usize);

impl Sort {
    pub const BASE: Sort = Sort(0);

    pub fn is_base(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Zero,
    Var(Var),
    /// `f_i(t)` with `t: R0`, result in `Ri`.
    F(usize, Box<Term>),
    /// `g_i(t)` with `t: Ri`, result in `R0`.
    G(usize, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn f(i: usize, t: Term) -> Term {
        Term::F(i, Box::new(t))
    }

    pub fn g(i: usize, t: Term) -> Term {
        Term::G(i, Box::new(t))
    }

    /// Sort of the term assuming it is well-sorted.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Zero | Term::G(..) => Sort::BASE,
            Term::Var(v) => v.sort,
            Term::F(i, _) => Sort(*i),
        }
    }

    /// Checks well-sortedness for `n` ordered sorts and returns the sort.
    pub fn check(&self, n: usize) -> Result<Sort, SyntaxError> {
        match self {
            Term::Zero => Ok(Sort::BASE),
            Term::Var(v) => {
                if v.sort.0 > n {
                    return Err(SyntaxError::sort(self, format!("sort {} out of range (n = {n})", v.sort)));
                }
                Ok(v.sort)
            }
            Term::F(i, t) => {
                if *i == 0 || *i > n {
                    return Err(SyntaxError::sort(self, format!("no symbol f{i} for n = {n}")));
                }
                let s = t.check(n)?;
                if s != Sort::BASE {
                    return Err(SyntaxError::sort(
                        t,
                        format!("f{i} expects an argument of sort R0, found {s}"),
                    ));
                }
                Ok(Sort(*i))
            }
            Term::G(i, t) => {
                if *i == 0 || *i > n {
                    return Err(SyntaxError::sort(self, format!("no symbol g{i} for n = {n}")));
                }
                let s = t.check(n)?;
                if s != Sort(*i) {
                    return Err(SyntaxError::sort(
                        t,
                        format!("g{i} expects an argument of sort R{i}, found {s}"),
                    ));
                }
                Ok(Sort::BASE)
            }
        }
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Zero => false,
            Term::Var(v) => v == x,
            Term::F(_, t) | Term::G(_, t) => t.contains_var(x),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Zero => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::F(_, t) | Term::G(_, t) => t.vars_into(out),
        }
    }

    pub fn substitute(&self, x: &Var, by: &Term) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Var(v) if v == x => by.clone(),
            Term::Var(_) => self.clone(),
            Term::F(i, t) => Term::F(*i, Box::new(t.substitute(x, by))),
            Term::G(i, t) => Term::G(*i, Box::new(t.substitute(x, by))),
        }
    }

    /// Replaces every occurrence of the subterm `pat` by `by`, outermost first.
    pub fn replace(&self, pat: &Term, by: &Term) -> Term {
        if self == pat {
            return by.clone();
        }
        match self {
            Term::Zero | Term::Var(_) => self.clone(),
            Term::F(i, t) => Term::F(*i, Box::new(t.replace(pat, by))),
            Term::G(i, t) => Term::G(*i, Box::new(t.replace(pat, by))),
        }
    }

    /// Adds the sorts of all subterms to `out`.
    pub fn sorts_into(&self, out: &mut BTreeSet<Sort>) {
        out.insert(self.sort());
        match self {
            Term::F(_, t) | Term::G(_, t) => t.sorts_into(out),
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Zero => true,
            Term::Var(_) => false,
            Term::F(_, t) | Term::G(_, t) => t.is_closed(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// Disequality; primitive on `R0`, shorthand on ordered sorts.
    Neq(Term, Term),
    /// `t <_i s`.
    Lt(usize, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn not(phi: Formula) -> Formula {
        Formula::Not(Box::new(phi))
    }

    pub fn exists(x: Var, body: Formula) -> Formula {
        Formula::Exists(x, Box::new(body))
    }

    pub fn forall(x: Var, body: Formula) -> Formula {
        Formula::Forall(x, Box::new(body))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::And(vec![
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn and_all(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::True,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    pub fn or_all(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::False,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..) | Formula::Neq(..) | Formula::Lt(..)
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Neq(..) | Formula::Lt(..) => true,
            Formula::Not(p) => p.is_quantifier_free(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Not(p) => p.quantifier_depth(),
            Formula::And(ps) | Formula::Or(ps) => {
                ps.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.quantifier_depth(),
            _ => 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out, &mut Vec::new());
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<Var>, bound: &mut Vec<Var>) {
        let add_term = |t: &Term, out: &mut BTreeSet<Var>| {
            let mut vs = BTreeSet::new();
            t.vars_into(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Lt(_, a, b) => {
                add_term(a, out);
                add_term(b, out);
            }
            Formula::Not(p) => p.free_vars_into(out, bound),
            Formula::And(ps) | Formula::Or(ps) => {
                for p in ps {
                    p.free_vars_into(out, bound);
                }
            }
            Formula::Implies(a, b) => {
                a.free_vars_into(out, bound);
                b.free_vars_into(out, bound);
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                bound.push(x.clone());
                body.free_vars_into(out, bound);
                bound.pop();
            }
        }
    }

    /// All variables, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.vars_into(&mut out));
        self.visit_binders(&mut |x| {
            out.insert(x.clone());
        });
        out
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Lt(_, a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(p) => p.visit_terms(f),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.visit_terms(f)),
            Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.visit_terms(f),
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::Not(p) => p.visit_binders(f),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.visit_binders(f)),
            Formula::Implies(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                f(x);
                b.visit_binders(f);
            }
            _ => {}
        }
    }

    /// Ordered sorts `i >= 1` that occur anywhere: in subterms, order symbols
    /// or binders.
    pub fn ordered_sorts(&self) -> BTreeSet<usize> {
        let mut sorts = BTreeSet::new();
        self.visit_terms(&mut |t| t.sorts_into(&mut sorts));
        self.visit_binders(&mut |x| {
            sorts.insert(x.sort);
        });
        let mut out: BTreeSet<usize> = sorts.into_iter().map(|s| s.0).filter(|&i| i > 0).collect();
        self.collect_lt_sorts(&mut out);
        out
    }

    fn collect_lt_sorts(&self, out: &mut BTreeSet<usize>) {
        match self {
            Formula::Lt(i, ..) => {
                out.insert(*i);
            }
            Formula::Not(p) => p.collect_lt_sorts(out),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_lt_sorts(out)),
            Formula::Implies(a, b) => {
                a.collect_lt_sorts(out);
                b.collect_lt_sorts(out);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.collect_lt_sorts(out),
            _ => {}
        }
    }

    /// Capture-avoiding substitution of a free variable. Binders that would
    /// capture a variable of `by` are renamed.
    pub fn substitute(&self, x: &Var, by: &Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(x, by), b.substitute(x, by)),
            Formula::Neq(a, b) => Formula::Neq(a.substitute(x, by), b.substitute(x, by)),
            Formula::Lt(i, a, b) => Formula::Lt(*i, a.substitute(x, by), b.substitute(x, by)),
            Formula::Not(p) => Formula::not(p.substitute(x, by)),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.substitute(x, by)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.substitute(x, by)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(x, by), b.substitute(x, by)),
            Formula::Exists(y, body) | Formula::Forall(y, body) => {
                let rebuild = |v: Var, b: Formula| match self {
                    Formula::Exists(..) => Formula::exists(v, b),
                    _ => Formula::forall(v, b),
                };
                if y == x {
                    return self.clone();
                }
                if by.contains_var(y) {
                    let mut taken = self.all_vars();
                    by.vars_into(&mut taken);
                    taken.insert(x.clone());
                    let fresh = fresh_var(&y.name, y.sort, &taken);
                    let renamed = body.substitute(y, &Term::Var(fresh.clone()));
                    rebuild(fresh, renamed.substitute(x, by))
                } else {
                    rebuild(y.clone(), body.substitute(x, by))
                }
            }
        }
    }

    /// Maps every term (not under binders' own variable positions) through `f`.
    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Neq(a, b) => Formula::Neq(f(a), f(b)),
            Formula::Lt(i, a, b) => Formula::Lt(*i, f(a), f(b)),
            Formula::Not(p) => Formula::not(p.map_terms(f)),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.map_terms(f)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.map_terms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Exists(x, b) => Formula::exists(x.clone(), b.map_terms(f)),
            Formula::Forall(x, b) => Formula::forall(x.clone(), b.map_terms(f)),
        }
    }

    /// Sort-checks every atom for `n` ordered sorts.
    pub fn check(&self, n: usize) -> Result<(), SyntaxError> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                let (sa, sb) = (a.check(n)?, b.check(n)?);
                if sa != sb {
                    return Err(SyntaxError::sort(
                        b,
                        format!("equation between sorts {sa} and {sb}"),
                    ));
                }
                Ok(())
            }
            Formula::Lt(i, a, b) => {
                if *i == 0 || *i > n {
                    return Err(SyntaxError::sort(a, format!("no order <{i} for n = {n}")));
                }
                for t in [a, b] {
                    let s = t.check(n)?;
                    if s != Sort(*i) {
                        return Err(SyntaxError::sort(t, format!("<{i} expects sort R{i}, found {s}")));
                    }
                }
                Ok(())
            }
            Formula::Not(p) => p.check(n),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().try_for_each(|p| p.check(n)),
            Formula::Implies(a, b) => {
                a.check(n)?;
                b.check(n)
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                if x.sort.0 > n {
                    return Err(SyntaxError::sort(
                        &Term::Var(x.clone()),
                        format!("sort {} out of range (n = {n})", x.sort),
                    ));
                }
                b.check(n)
            }
        }
    }

    /// Universal closure over the free variables, in sorted order.
    pub fn universal_closure(&self) -> Formula {
        self.free_vars()
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, v| Formula::forall(v, acc))
    }
}

/// A variable named after `base` that does not occur in `taken`.
pub fn fresh_var(base: &str, sort: Sort, taken: &BTreeSet<Var>) -> Var {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|k| Var::new(format!("{stem}_{k}"), sort))
        .find(|v| !taken.iter().any(|t| t.name == v.name))
        .expect("unbounded name supply")
}
