//! Test-point evaluation of arbitrary formulas.
//!
//! For `exists x. body` under an assignment of the other free variables, let
//! `P` be the substructure generated by their values. Every atom of `body`
//! compares a term in `x` against a point of `P` (bound variables of `body`
//! are handled recursively in the same way), so by injectivity of the `f_i`
//! the truth of `body` depends only on which cell of the arrangement of `P`
//! the tuple `(f_1(x), ..., f_n(x))` (or `x` itself for an ordered sort)
//! falls into. The candidates are therefore:
//!
//! * `x: R0`: the base points of `P`, plus one sampled point per product of
//!   open gaps;
//! * `x: Ri`: the points of `P` in sort `i`, one non-image point per gap of
//!   sort `i`, and `f_i(y)` for one sampled `y` per product of open gaps.
//!
//! Sorts the body never mentions are left unconstrained. This semantics is
//! independent of the elimination procedure and serves as its oracle.

use crate::error::SemanticError;
use crate::syntax::{Formula, Term, Var};

use super::{odometer, Arrangement, Assignment, Model, MultiInterval};

pub fn eval<M: Model>(model: &mut M, phi: &Formula, asg: &Assignment<M::Elem>) -> Result<bool, SemanticError> {
    if let Some(v) = phi.free_vars().into_iter().find(|v| !asg.contains_key(v)) {
        return Err(SemanticError::PartialAssignment(v.to_string()));
    }
    let mut asg = asg.clone();
    Ok(ev(model, phi, &mut asg))
}

/// Evaluation restricted to quantifier-free formulas (no sampling happens).
pub fn eval_qf<M: Model>(model: &mut M, phi: &Formula, asg: &Assignment<M::Elem>) -> Result<bool, SemanticError> {
    if !phi.is_quantifier_free() {
        return Err(SemanticError::NotQuantifierFree);
    }
    eval(model, phi, asg)
}

pub fn term_value<M: Model + ?Sized>(model: &M, t: &Term, asg: &Assignment<M::Elem>) -> Result<M::Elem, SemanticError> {
    Ok(match t {
        Term::Zero => model.zero(),
        Term::Var(v) => asg
            .get(v)
            .cloned()
            .ok_or_else(|| SemanticError::PartialAssignment(v.to_string()))?,
        Term::F(i, a) => model.apply_f(*i, &term_value(model, a, asg)?),
        Term::G(i, a) => model.apply_g(*i, &term_value(model, a, asg)?),
    })
}

fn tv<M: Model>(model: &M, t: &Term, asg: &Assignment<M::Elem>) -> M::Elem {
    term_value(model, t, asg).expect("assignment covers the formula")
}

fn ev<M: Model>(model: &mut M, phi: &Formula, asg: &mut Assignment<M::Elem>) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => tv(model, a, asg) == tv(model, b, asg),
        Formula::Neq(a, b) => tv(model, a, asg) != tv(model, b, asg),
        Formula::Lt(i, a, b) => {
            let (x, y) = (tv(model, a, asg), tv(model, b, asg));
            model.compare(*i, &x, &y).is_lt()
        }
        Formula::Not(p) => !ev(model, p, asg),
        Formula::And(ps) => ps.iter().all(|p| ev(model, p, asg)),
        Formula::Or(ps) => ps.iter().any(|p| ev(model, p, asg)),
        Formula::Implies(a, b) => !ev(model, a, asg) || ev(model, b, asg),
        Formula::Exists(x, body) => quantifier(model, x, body, asg, true),
        Formula::Forall(x, body) => quantifier(model, x, body, asg, false),
    }
}

/// Returns `exists x. body` when `existential`, else `forall x. body`, by
/// scanning the test points until one decides the quantifier.
fn quantifier<M: Model>(model: &mut M, x: &Var, body: &Formula, asg: &mut Assignment<M::Elem>, existential: bool) -> bool {
    let n = model.sorts();
    let params: Vec<M::Elem> = body
        .free_vars()
        .into_iter()
        .filter(|v| v != x)
        .map(|v| asg[&v].clone())
        .collect();
    let arr = Arrangement::of(model, &params);
    let mut relevant = body.ordered_sorts();
    if !x.sort.is_base() {
        relevant.insert(x.sort.0);
    }
    let relevant: Vec<usize> = relevant.into_iter().filter(|&i| i <= n).collect();

    let saved = asg.remove(x);
    let mut decided = None;
    let try_candidate = |model: &mut M, asg: &mut Assignment<M::Elem>, c: M::Elem| {
        asg.insert(x.clone(), c);
        let v = ev(model, body, asg);
        asg.remove(x);
        v == existential
    };

    let fixed: Vec<M::Elem> = if x.sort.is_base() {
        arr.base.clone()
    } else {
        arr.points(x.sort.0).to_vec()
    };
    for c in fixed {
        if try_candidate(model, asg, c) {
            decided = Some(existential);
            break;
        }
    }

    if decided.is_none() && !x.sort.is_base() {
        let i = x.sort.0;
        for k in 0..arr.gap_count(i) {
            let snap = model.snapshot();
            let c = model.sample_interval(i, &arr.gap(i, k), false, &[]);
            let hit = try_candidate(model, asg, c);
            model.restore(snap);
            if hit {
                decided = Some(existential);
                break;
            }
        }
    }

    if decided.is_none() {
        let dims: Vec<usize> = relevant.iter().map(|&i| arr.gap_count(i)).collect();
        for tuple in odometer(&dims) {
            let mut cell = MultiInterval::full(n);
            for (&i, &k) in relevant.iter().zip(&tuple) {
                *cell.sort_mut(i) = arr.gap(i, k);
            }
            let snap = model.snapshot();
            let y = model.sample_multi_interval(&cell, &arr.base);
            let c = if x.sort.is_base() { y } else { model.apply_f(x.sort.0, &y) };
            let hit = try_candidate(model, asg, c);
            model.restore(snap);
            if hit {
                decided = Some(existential);
                break;
            }
        }
    }

    if let Some(v) = saved {
        asg.insert(x.clone(), v);
    }
    decided.unwrap_or(!existential)
}
