//! Quantifier elimination and the decision procedure.
//!
//! Each quantifier is removed innermost first. The quantifier-free body is
//! brought into disjunctive normal form over normalized literals and
//! [`eliminate_one`] removes the variable from each conjunct:
//!
//! * `x: R0`: an equation `x = t` or `f_i(x) = u` pins `x` (the latter under
//!   the image guard `f_i(g_i(u)) = u`); otherwise only per-sort bounds on
//!   `f_i(x)` remain and the conjunct is satisfiable iff every lower bound is
//!   below every upper bound in the same sort, since any product of nonempty
//!   open intervals has (infinitely many) points in the base sort.
//! * `x: Ri`: split on whether `x` lies in the image of `f_i`. In the image
//!   `x = f_i(y)` and we recurse on `y: R0`. Off the image `g_i(x) = 0`, so
//!   only order constraints on `x` itself survive, and co-density of the
//!   image makes nonempty bound intervals sufficient.
//!
//! Disequalities on `R0` never block satisfiability once `x` is confined to
//! a nonempty multi-interval and are dropped.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{normalize_term, Formula, Sort, Term, Var};

/// Atomic constraint over normalized terms. `Eq` and `Neq` keep their
/// operands in ascending term order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Literal {
    Eq(Term, Term),
    /// Only ever on `R0`; disequality on ordered sorts is split into two
    /// strict inequalities.
    Neq(Term, Term),
    Lt(usize, Term, Term),
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Simp {
    True,
    False,
    Lit(Literal),
}

impl Literal {
    fn eq(a: &Term, b: &Term) -> Simp {
        let (a, b) = (normalize_term(a), normalize_term(b));
        if a == b {
            Simp::True
        } else if a <= b {
            Simp::Lit(Literal::Eq(a, b))
        } else {
            Simp::Lit(Literal::Eq(b, a))
        }
    }

    fn neq(a: &Term, b: &Term) -> Simp {
        match Literal::eq(a, b) {
            Simp::True => Simp::False,
            Simp::Lit(Literal::Eq(a, b)) => Simp::Lit(Literal::Neq(a, b)),
            _ => unreachable!(),
        }
    }

    fn lt(i: usize, a: &Term, b: &Term) -> Simp {
        let (a, b) = (normalize_term(a), normalize_term(b));
        if a == b {
            Simp::False
        } else {
            Simp::Lit(Literal::Lt(i, a, b))
        }
    }

    fn map(&self, f: &impl Fn(&Term) -> Term) -> Simp {
        match self {
            Literal::Eq(a, b) => Literal::eq(&f(a), &f(b)),
            Literal::Neq(a, b) => Literal::neq(&f(a), &f(b)),
            Literal::Lt(i, a, b) => Literal::lt(*i, &f(a), &f(b)),
        }
    }

    pub fn mentions(&self, x: &Var) -> bool {
        match self {
            Literal::Eq(a, b) | Literal::Neq(a, b) | Literal::Lt(_, a, b) => {
                a.contains_var(x) || b.contains_var(x)
            }
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Literal::Eq(a, b) => Formula::Eq(a.clone(), b.clone()),
            Literal::Neq(a, b) => Formula::Neq(a.clone(), b.clone()),
            Literal::Lt(i, a, b) => Formula::Lt(*i, a.clone(), b.clone()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// A conjunction of literals with no boolean structure.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LiteralConjunct(pub Vec<Literal>);

impl LiteralConjunct {
    /// Adds a literal; returns false if the conjunct became unsatisfiable.
    fn push(&mut self, s: Simp) -> bool {
        match s {
            Simp::True => true,
            Simp::False => false,
            Simp::Lit(l) => {
                let clash = match &l {
                    Literal::Eq(a, b) => self.0.contains(&Literal::Neq(a.clone(), b.clone())),
                    Literal::Neq(a, b) => self.0.contains(&Literal::Eq(a.clone(), b.clone())),
                    Literal::Lt(i, a, b) => self.0.contains(&Literal::Lt(*i, b.clone(), a.clone())),
                };
                if clash {
                    return false;
                }
                if !self.0.contains(&l) {
                    self.0.push(l);
                }
                true
            }
        }
    }

    /// Rewrites every term; `None` if some literal became false.
    fn map(&self, f: impl Fn(&Term) -> Term) -> Option<LiteralConjunct> {
        let mut out = LiteralConjunct::default();
        for l in &self.0 {
            if !out.push(l.map(&f)) {
                return None;
            }
        }
        Some(out)
    }

    fn substitute(&self, x: &Var, by: &Term) -> Option<LiteralConjunct> {
        self.map(|t| t.substitute(x, by))
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(self.0.iter().map(Literal::to_formula).collect())
    }
}

/// Disjunctive normal form of a quantifier-free formula (`positive = false`
/// gives the DNF of its negation).
pub fn dnf(phi: &Formula, positive: bool) -> Vec<LiteralConjunct> {
    fn single(s: Simp) -> Vec<LiteralConjunct> {
        let mut c = LiteralConjunct::default();
        if c.push(s) {
            vec![c]
        } else {
            vec![]
        }
    }
    fn either(a: Simp, b: Simp) -> Vec<LiteralConjunct> {
        let mut out = single(a);
        out.extend(single(b));
        out
    }
    fn product(parts: Vec<Vec<LiteralConjunct>>) -> Vec<LiteralConjunct> {
        let mut acc = vec![LiteralConjunct::default()];
        for part in parts {
            let mut next = Vec::new();
            for c in &acc {
                'alt: for d in &part {
                    let mut merged = c.clone();
                    for l in &d.0 {
                        if !merged.push(Simp::Lit(l.clone())) {
                            continue 'alt;
                        }
                    }
                    if !next.contains(&merged) {
                        next.push(merged);
                    }
                }
            }
            acc = next;
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
    fn union(parts: Vec<Vec<LiteralConjunct>>) -> Vec<LiteralConjunct> {
        let mut out: Vec<LiteralConjunct> = Vec::new();
        for c in parts.into_iter().flatten() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
    match (phi, positive) {
        (Formula::True, true) | (Formula::False, false) => vec![LiteralConjunct::default()],
        (Formula::True, false) | (Formula::False, true) => vec![],
        (Formula::Eq(a, b), true) => single(Literal::eq(a, b)),
        (Formula::Neq(a, b), false) => single(Literal::eq(a, b)),
        (Formula::Eq(a, b), false) | (Formula::Neq(a, b), true) => match a.sort() {
            Sort(0) => single(Literal::neq(a, b)),
            Sort(i) => either(Literal::lt(i, a, b), Literal::lt(i, b, a)),
        },
        (Formula::Lt(i, a, b), true) => single(Literal::lt(*i, a, b)),
        (Formula::Lt(i, a, b), false) => either(Literal::lt(*i, b, a), Literal::eq(a, b)),
        (Formula::Not(p), pos) => dnf(p, !pos),
        (Formula::And(ps), true) | (Formula::Or(ps), false) => {
            product(ps.iter().map(|p| dnf(p, positive)).collect())
        }
        (Formula::Or(ps), true) | (Formula::And(ps), false) => {
            union(ps.iter().map(|p| dnf(p, positive)).collect())
        }
        (Formula::Implies(a, b), true) => union(vec![dnf(a, false), dnf(b, true)]),
        (Formula::Implies(a, b), false) => product(vec![dnf(a, true), dnf(b, false)]),
        (Formula::Exists(..) | Formula::Forall(..), _) => {
            panic!("dnf called on a quantified formula")
        }
    }
}

/// Removes every quantifier. The result is negation-free, quantifier-free and
/// its free variables are among those of `phi`.
pub fn eliminate(phi: &Formula) -> Formula {
    simplify(&eliminate_inner(phi))
}

fn eliminate_inner(phi: &Formula) -> Formula {
    match phi {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Neq(..) | Formula::Lt(..) => phi.clone(),
        Formula::Not(p) => Formula::not(eliminate_inner(p)),
        Formula::And(ps) => Formula::And(ps.iter().map(eliminate_inner).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(eliminate_inner).collect()),
        Formula::Implies(a, b) => Formula::implies(eliminate_inner(a), eliminate_inner(b)),
        Formula::Exists(x, body) => exists_qf(x, &eliminate_inner(body)),
        Formula::Forall(x, body) => {
            Formula::not(exists_qf(x, &Formula::not(eliminate_inner(body))))
        }
    }
}

fn mentions(phi: &Formula, x: &Var) -> bool {
    let mut hit = false;
    phi.visit_terms(&mut |t| hit |= t.contains_var(x));
    hit
}

/// `exists x. body` for quantifier-free `body`. The quantifier is pushed
/// through disjunctions and past conjuncts without `x` before the matrix is
/// put in disjunctive normal form.
fn exists_qf(x: &Var, body: &Formula) -> Formula {
    match simplify(body) {
        Formula::Or(ps) => join(false, ps.iter().map(|p| exists_qf(x, p)).collect()),
        Formula::And(ps) => {
            let (with_x, without): (Vec<Formula>, Vec<Formula>) = ps.into_iter().partition(|p| mentions(p, x));
            if without.is_empty() {
                exists_dnf(x, &Formula::And(with_x))
            } else {
                let mut parts = without;
                parts.push(exists_qf(x, &Formula::and_all(with_x)));
                join(true, parts)
            }
        }
        other if !mentions(&other, x) => other,
        other => exists_dnf(x, &other),
    }
}

fn exists_dnf(x: &Var, body: &Formula) -> Formula {
    let mut disjuncts = Vec::new();
    for conj in dnf(body, true) {
        let out = if conj.0.iter().any(|l| l.mentions(x)) {
            eliminate_one(x, &conj)
        } else {
            conj.to_formula()
        };
        match out {
            Formula::True => return Formula::True,
            Formula::False => {}
            other => {
                if !disjuncts.contains(&other) {
                    disjuncts.push(other)
                }
            }
        }
    }
    Formula::or_all(disjuncts)
}

/// Quantifier-free equivalent of `exists x. conj`.
pub fn eliminate_one(x: &Var, conj: &LiteralConjunct) -> Formula {
    if x.sort.is_base() {
        eliminate_base(x, conj)
    } else {
        eliminate_ordered(x, conj)
    }
}

fn is_var(t: &Term, x: &Var) -> bool {
    matches!(t, Term::Var(v) if v == x)
}

fn is_image_of_var(t: &Term, x: &Var) -> Option<usize> {
    match t {
        Term::F(i, inner) if is_var(inner, x) => Some(*i),
        _ => None,
    }
}

fn substituted(conj: &LiteralConjunct, x: &Var, by: &Term) -> Formula {
    conj.substitute(x, by)
        .map_or(Formula::False, |c| c.to_formula())
}

fn eliminate_base(x: &Var, conj: &LiteralConjunct) -> Formula {
    // x = t pins x
    for l in &conj.0 {
        if let Literal::Eq(a, b) = l {
            if is_var(a, x) && !b.contains_var(x) {
                return substituted(conj, x, b);
            }
            if is_var(b, x) && !a.contains_var(x) {
                return substituted(conj, x, a);
            }
        }
    }
    // f_i(x) = u pins x to g_i(u) when u is in the image of f_i
    for l in &conj.0 {
        if let Literal::Eq(a, b) = l {
            let found = match (is_image_of_var(a, x), is_image_of_var(b, x)) {
                (Some(i), None) => Some((i, b)),
                (None, Some(i)) => Some((i, a)),
                _ => None,
            };
            if let Some((i, u)) = found {
                if let Term::F(j, t) = u {
                    debug_assert_eq!(*j, i);
                    return substituted(conj, x, t);
                }
                let gu = Term::g(i, u.clone());
                let guard = Formula::Eq(Term::f(i, gu.clone()), u.clone());
                return match substituted(conj, x, &gu) {
                    Formula::False => Formula::False,
                    rest => Formula::And(vec![guard, rest]),
                };
            }
        }
    }
    order_bounds(x, conj, |t| is_image_of_var(t, x))
}

/// Collects `l <_i T` / `T <_i u` where `sort_of_target(T)` recognizes the
/// eliminated position, keeps x-free literals, drops disequalities on x and
/// emits `l <_i u` for every bound pair.
fn order_bounds(x: &Var, conj: &LiteralConjunct, sort_of_target: impl Fn(&Term) -> Option<usize>) -> Formula {
    let mut out = LiteralConjunct::default();
    let mut lower: Vec<(usize, Term)> = Vec::new();
    let mut upper: Vec<(usize, Term)> = Vec::new();
    for l in &conj.0 {
        if !l.mentions(x) {
            if !out.push(Simp::Lit(l.clone())) {
                return Formula::False;
            }
            continue;
        }
        match l {
            Literal::Lt(i, a, b) => match (sort_of_target(a), sort_of_target(b)) {
                (None, Some(_)) => lower.push((*i, a.clone())),
                (Some(_), None) => upper.push((*i, b.clone())),
                _ => unreachable!("unexpected occurrence of {x} in {l}"),
            },
            Literal::Neq(..) => {}
            Literal::Eq(..) => unreachable!("equation on {x} should have been substituted: {l}"),
        }
    }
    let sorts: BTreeSet<usize> = lower.iter().chain(upper.iter()).map(|(i, _)| *i).collect();
    for i in sorts {
        for (_, lo) in lower.iter().filter(|(s, _)| *s == i) {
            for (_, hi) in upper.iter().filter(|(s, _)| *s == i) {
                if !out.push(Literal::lt(i, lo, hi)) {
                    return Formula::False;
                }
            }
        }
    }
    out.to_formula()
}

fn eliminate_ordered(x: &Var, conj: &LiteralConjunct) -> Formula {
    let i = x.sort.0;
    let x_term = Term::Var(x.clone());
    // Case A: x = f_i(y)
    let y = Var::new(format!("{}#pre", x.name), Sort::BASE);
    let case_a = match conj.substitute(x, &Term::f(i, Term::Var(y.clone()))) {
        None => Formula::False,
        Some(c) if c.0.iter().any(|l| l.mentions(&y)) => eliminate_base(&y, &c),
        Some(c) => c.to_formula(),
    };
    // Case B: x outside the image, so g_i(x) = 0
    let g_x = Term::g(i, x_term.clone());
    let case_b = match conj.map(|t| t.replace(&g_x, &Term::Zero)) {
        None => Formula::False,
        Some(c) => eliminate_off_image(x, i, &c),
    };
    simplify(&Formula::Or(vec![case_a, case_b]))
}

fn eliminate_off_image(x: &Var, i: usize, conj: &LiteralConjunct) -> Formula {
    for l in &conj.0 {
        if let Literal::Eq(a, b) = l {
            let u = if is_var(a, x) {
                b
            } else if is_var(b, x) {
                a
            } else {
                continue;
            };
            if matches!(u, Term::F(..)) {
                return Formula::False;
            }
            // u is an R_i variable; x := u provided u is off the image
            let image_of_u = Term::f(i, Term::g(i, u.clone()));
            let guard = Formula::Or(vec![
                Formula::Lt(i, image_of_u.clone(), u.clone()),
                Formula::Lt(i, u.clone(), image_of_u),
            ]);
            return match substituted(conj, x, u) {
                Formula::False => Formula::False,
                rest => Formula::And(vec![guard, rest]),
            };
        }
    }
    order_bounds(x, conj, |t| if is_var(t, x) { Some(i) } else { None })
}

/// Constant folding, flattening and negation pushing. Atoms are normalized;
/// the result contains no `Not` and no `Implies`.
pub fn simplify(phi: &Formula) -> Formula {
    nnf(phi, true)
}

fn lit_formula(s: Simp) -> Formula {
    match s {
        Simp::True => Formula::True,
        Simp::False => Formula::False,
        Simp::Lit(l) => l.to_formula(),
    }
}

fn nnf(phi: &Formula, positive: bool) -> Formula {
    match (phi, positive) {
        (Formula::True, true) | (Formula::False, false) => Formula::True,
        (Formula::True, false) | (Formula::False, true) => Formula::False,
        (Formula::Eq(a, b), true) | (Formula::Neq(a, b), false) => lit_formula(Literal::eq(a, b)),
        (Formula::Eq(a, b), false) | (Formula::Neq(a, b), true) => match a.sort() {
            Sort(0) => lit_formula(Literal::neq(a, b)),
            Sort(i) => join(false, vec![lit_formula(Literal::lt(i, a, b)), lit_formula(Literal::lt(i, b, a))]),
        },
        (Formula::Lt(i, a, b), true) => lit_formula(Literal::lt(*i, a, b)),
        (Formula::Lt(i, a, b), false) => {
            join(false, vec![lit_formula(Literal::lt(*i, b, a)), lit_formula(Literal::eq(a, b))])
        }
        (Formula::Not(p), pos) => nnf(p, !pos),
        (Formula::And(ps), pos) => join(pos, ps.iter().map(|p| nnf(p, pos)).collect()),
        (Formula::Or(ps), pos) => join(!pos, ps.iter().map(|p| nnf(p, pos)).collect()),
        (Formula::Implies(a, b), true) => join(false, vec![nnf(a, false), nnf(b, true)]),
        (Formula::Implies(a, b), false) => join(true, vec![nnf(a, true), nnf(b, false)]),
        (Formula::Exists(x, b), true) => Formula::exists(x.clone(), nnf(b, true)),
        (Formula::Exists(x, b), false) => Formula::forall(x.clone(), nnf(b, false)),
        (Formula::Forall(x, b), true) => Formula::forall(x.clone(), nnf(b, true)),
        (Formula::Forall(x, b), false) => Formula::exists(x.clone(), nnf(b, false)),
    }
}

/// Builds a conjunction (`conj = true`) or disjunction with unit/zero
/// folding, flattening of the same connective and de-duplication.
fn join(conj: bool, items: Vec<Formula>) -> Formula {
    let (unit, zero) = if conj {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut out: Vec<Formula> = Vec::new();
    for item in items {
        let parts = match item {
            Formula::And(ps) if conj => ps,
            Formula::Or(ps) if !conj => ps,
            other => vec![other],
        };
        for p in parts {
            if p == zero {
                return zero;
            }
            if p != unit && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    if conj {
        Formula::and_all(out)
    } else {
        Formula::or_all(out)
    }
}

/// Truth value of a closed quantifier-free formula. Closed normal terms are
/// `0` and `f_i(0)`, one per sort, so every closed atom is decided by syntax.
pub fn eval_closed(phi: &Formula) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => normalize_term(a) == normalize_term(b),
        Formula::Neq(a, b) => normalize_term(a) != normalize_term(b),
        Formula::Lt(..) => false,
        Formula::Not(p) => !eval_closed(p),
        Formula::And(ps) => ps.iter().all(eval_closed),
        Formula::Or(ps) => ps.iter().any(eval_closed),
        Formula::Implies(a, b) => !eval_closed(a) || eval_closed(b),
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("eval_closed expects a quantifier-free formula")
        }
    }
}

/// Decides a sentence. Returns `None` if `sigma` has free variables.
pub fn decide(sigma: &Formula) -> Option<bool> {
    if !sigma.free_vars().is_empty() {
        return None;
    }
    let qf = eliminate(sigma);
    debug_assert!(qf.free_vars().is_empty());
    Some(eval_closed(&qf))
}

/// Whether `phi` and `psi` are equivalent in every model.
pub fn equivalent(phi: &Formula, psi: &Formula) -> bool {
    let closed = Formula::iff(phi.clone(), psi.clone()).universal_closure();
    decide(&closed).expect("universal closure is a sentence")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_formula_with, SortContext};

    fn p(s: &str) -> Formula {
        parse_formula(s, 2).unwrap()
    }

    fn ctx(pairs: &[(&str, usize)]) -> SortContext {
        pairs.iter().map(|(k, s)| (k.to_string(), Sort(*s))).collect()
    }

    #[test]
    fn simultaneous_bounds_reduce_to_per_sort_nonemptiness() {
        let phi = p("exists x:R0. a <1 f1(x) & f1(x) <1 b & c <2 f2(x) & f2(x) <2 d");
        let out = eliminate(&phi);
        assert_eq!(out.to_string(), "(a <1 b) & (c <2 d)");
        assert!(equivalent(&out, &p("a <1 b & c <2 d")));
    }

    #[test]
    fn witness_by_equation() {
        let phi = parse_formula_with("exists x:R0. x = y", 2, &ctx(&[("y", 0)])).unwrap();
        assert_eq!(eliminate(&phi), Formula::True);
    }

    #[test]
    fn ordered_variable_with_retraction_constraint() {
        let phi = p("exists x:R1. a <1 x & x <1 b & g1(x) = 0");
        let out = eliminate(&phi);
        assert!(out.is_quantifier_free());
        assert!(equivalent(&out, &p("a <1 b")), "got {out}");
    }

    #[test]
    fn injectivity_pins_the_witness() {
        let conj = LiteralConjunct(vec![Literal::Eq(
            Term::f(1, Term::var("x", Sort(0))),
            Term::f(1, Term::Zero),
        )]);
        assert_eq!(eliminate_one(&Var::new("x", Sort(0)), &conj), Formula::True);
    }

    #[test]
    fn disequality_does_not_block_an_interval() {
        let phi = p("exists x:R0. a <1 f1(x) & f1(x) <1 b & x != 0");
        assert_eq!(eliminate(&phi).to_string(), "a <1 b");
    }

    #[test]
    fn non_image_points_exist_below_anything() {
        let phi = p("exists x:R1. x <1 a & ~(f1(g1(x)) = x)");
        assert_eq!(eliminate(&phi), Formula::True);
    }

    #[test]
    fn decide_examples() {
        assert_eq!(decide(&p("forall a:R1. forall b:R1. a <1 b -> exists c:R1. a <1 c & c <1 b")), Some(true));
        assert_eq!(decide(&p("exists x:R0. f1(x) = f1(0) & x != 0")), Some(false));
        assert_eq!(decide(&p("exists x:R1. g1(x) = 0 & ~(x = f1(0))")), Some(true));
        assert_eq!(decide(&p("forall a:R1. exists b:R1. a <1 b")), Some(true));
        assert_eq!(decide(&p("exists a:R1. forall b:R1. ~(b <1 a)")), Some(false));
        assert_eq!(decide(&p("x = x")), None);
    }

    #[test]
    fn equivalence_examples() {
        let c = ctx(&[("x", 0), ("y", 0)]);
        assert!(equivalent(
            &parse_formula_with("x = y", 2, &c).unwrap(),
            &parse_formula_with("y = x", 2, &c).unwrap()
        ));
        assert!(equivalent(&p("a <1 b"), &p("~(b <1 a) & ~(a = b)")));
        assert!(equivalent(&p("exists x:R0. a <1 f1(x)"), &Formula::True));
        assert!(!equivalent(&p("a <1 b"), &p("b <1 a")));
    }

    #[test]
    fn quantifier_free_input_is_returned_equivalent() {
        let phi = p("~(a <1 b) | (c = d -> g1(a) = 0)");
        let out = eliminate(&phi);
        assert!(equivalent(&phi, &out));
    }

    #[test]
    fn image_equation_emits_guard() {
        let phi = p("exists x:R0. f1(x) = a & x != 0");
        let out = eliminate(&phi);
        assert!(equivalent(&out, &p("f1(g1(a)) = a & g1(a) != 0")), "got {out}");
    }

    #[test]
    fn off_image_equation_emits_negated_guard() {
        let phi = p("exists x:R1. x = a & g1(x) = 0 & f2(g1(x)) = f2(0)");
        let out = eliminate(&phi);
        // either a is off the image, or a = f1(0)
        assert!(equivalent(&out, &p("g1(a) = 0")), "got {out}");
    }

    #[test]
    fn free_variables_are_preserved() {
        let phi = p("forall x:R2. exists y:R0. (f2(y) <2 x | x = a) & g1(b) != y");
        let out = eliminate(&phi);
        assert!(out.free_vars().is_subset(&phi.free_vars()));
    }
}
