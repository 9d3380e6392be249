//! Seeded generators for random formulas and assignments.

use rand::{Rng, RngCore};

use crate::model::{term_value, Assignment, Model};
use crate::qe::eliminate;
use crate::syntax::{fresh_var, Formula, Sort, Term, Var};

#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub n: usize,
    pub max_free: usize,
    pub max_depth: usize,
    /// Connective nesting below each quantifier.
    pub max_size: usize,
}

impl FormulaShape {
    pub fn new(n: usize) -> Self {
        FormulaShape {
            n,
            max_free: 3,
            max_depth: 2,
            max_size: 3,
        }
    }
}

fn random_sort(n: usize, rng: &mut dyn RngCore) -> Sort {
    Sort(rng.random_range(0..=n))
}

/// A term of `sort` over `scope`, at most `fuel` symbols deep.
pub fn random_term(n: usize, sort: Sort, scope: &[Var], fuel: usize, rng: &mut dyn RngCore) -> Term {
    let vars: Vec<&Var> = scope.iter().filter(|v| v.sort == sort).collect();
    if sort.is_base() {
        let roll = rng.random_range(0..10);
        if roll < 2 || (fuel == 0 && vars.is_empty()) {
            return Term::Zero;
        }
        if (roll < 6 || fuel == 0) && !vars.is_empty() {
            return Term::Var(vars[rng.random_range(0..vars.len())].clone());
        }
        if fuel == 0 {
            return Term::Zero;
        }
        let i = rng.random_range(1..=n);
        Term::g(i, random_term(n, Sort(i), scope, fuel - 1, rng))
    } else {
        let i = sort.0;
        if !vars.is_empty() && (fuel == 0 || rng.random_bool(0.6)) {
            return Term::Var(vars[rng.random_range(0..vars.len())].clone());
        }
        let arg = if fuel == 0 { Term::Zero } else { random_term(n, Sort::BASE, scope, fuel - 1, rng) };
        Term::f(i, arg)
    }
}

fn random_atom(n: usize, scope: &[Var], rng: &mut dyn RngCore) -> Formula {
    // favour sorts that have variables in scope
    let sort = if !scope.is_empty() && rng.random_bool(0.7) {
        scope[rng.random_range(0..scope.len())].sort
    } else {
        random_sort(n, rng)
    };
    let a = random_term(n, sort, scope, 2, rng);
    let b = random_term(n, sort, scope, 2, rng);
    if !sort.is_base() && rng.random_bool(0.6) {
        Formula::Lt(sort.0, a, b)
    } else if rng.random_bool(0.8) {
        Formula::Eq(a, b)
    } else {
        Formula::Neq(a, b)
    }
}

fn random_body(shape: &FormulaShape, scope: &mut Vec<Var>, depth: usize, size: usize, counter: &mut usize, rng: &mut dyn RngCore) -> Formula {
    let roll = rng.random_range(0..10);
    if depth > 0 && roll < 4 {
        *counter += 1;
        let x = Var::new(format!("y{counter}"), random_sort(shape.n, rng));
        scope.push(x.clone());
        let body = random_body(shape, scope, depth - 1, shape.max_size, counter, rng);
        scope.pop();
        return if rng.random_bool(0.5) { Formula::exists(x, body) } else { Formula::forall(x, body) };
    }
    if size == 0 || roll < 6 {
        return random_atom(shape.n, scope, rng);
    }
    let a = random_body(shape, scope, depth, size - 1, counter, rng);
    let b = random_body(shape, scope, depth, size - 1, counter, rng);
    match rng.random_range(0..7) {
        0 | 1 => Formula::And(vec![a, b]),
        2 | 3 => Formula::Or(vec![a, b]),
        4 => Formula::implies(a, b),
        5 => Formula::not(a),
        _ => Formula::Not(Box::new(Formula::And(vec![a, b]))),
    }
}

/// A random formula with at most `max_free` free variables and quantifier
/// depth at most `max_depth`.
pub fn random_formula(shape: &FormulaShape, rng: &mut dyn RngCore) -> Formula {
    let k = rng.random_range(0..=shape.max_free);
    let mut scope: Vec<Var> = (0..k).map(|j| Var::new(format!("x{j}"), random_sort(shape.n, rng))).collect();
    let mut counter = 0;
    let phi = random_body(shape, &mut scope, shape.max_depth, shape.max_size, &mut counter, rng);
    debug_assert!(phi.quantifier_depth() <= shape.max_depth);
    phi
}

/// A random sentence (no free variables).
pub fn random_sentence(shape: &FormulaShape, rng: &mut dyn RngCore) -> Formula {
    let shape = FormulaShape { max_free: 0, ..shape.clone() };
    random_formula(&shape, rng)
}

/// Random values for the free variables of `phi`.
pub fn random_assignment<M: Model>(model: &mut M, phi: &Formula, rng: &mut dyn RngCore) -> Assignment<M::Elem> {
    phi.free_vars()
        .into_iter()
        .map(|v| {
            let e = model.random_element(v.sort, rng);
            (v, e)
        })
        .collect()
}

/// A random quantifier-free formula over the variables in `scope`.
pub fn random_qf_formula(n: usize, scope: &[Var], size: usize, rng: &mut dyn RngCore) -> Formula {
    let shape = FormulaShape {
        n,
        max_free: scope.len(),
        max_depth: 0,
        max_size: size,
    };
    let mut scope = scope.to_vec();
    let mut counter = 0;
    random_body(&shape, &mut scope, 0, size, &mut counter, rng)
}

/// Rewrites one randomly chosen subformula with `f` (or the root when no
/// other candidate is picked).
fn rewrite_somewhere(phi: &Formula, rng: &mut dyn RngCore, f: &dyn Fn(&Formula) -> Option<Formula>) -> Formula {
    let descend = rng.random_bool(0.5);
    let children = match phi {
        Formula::And(ps) | Formula::Or(ps) if descend && !ps.is_empty() => Some(ps),
        _ => None,
    };
    if let Some(ps) = children {
        let k = rng.random_range(0..ps.len());
        let mut ps = ps.clone();
        ps[k] = rewrite_somewhere(&ps[k], rng, f);
        return match phi {
            Formula::And(_) => Formula::And(ps),
            _ => Formula::Or(ps),
        };
    }
    f(phi).unwrap_or_else(|| phi.clone())
}

/// An equivalent presentation of the set `{x : phi(x, params)}`: the same
/// set, written differently and possibly over different parameters.
/// Transformations: double negation, De Morgan, conjunction with a
/// parameter-only tautology, naming a derived parameter, adding an unused
/// parameter, and re-deriving the matrix through quantifier elimination.
pub fn equivalent_presentation<M: Model>(
    model: &mut M,
    phi: &Formula,
    x: &Var,
    params: &Assignment<M::Elem>,
    rng: &mut dyn RngCore,
) -> (Formula, Assignment<M::Elem>) {
    let n = model.sorts();
    let mut phi = phi.clone();
    let mut params = params.clone();
    let steps = rng.random_range(1..=3);
    for _ in 0..steps {
        let mut taken = phi.all_vars();
        taken.extend(params.keys().cloned());
        taken.insert(x.clone());
        match rng.random_range(0..6) {
            0 => phi = rewrite_somewhere(&phi, rng, &|p| Some(Formula::not(Formula::not(p.clone())))),
            1 => {
                phi = rewrite_somewhere(&phi, rng, &|p| match p {
                    Formula::And(ps) => Some(Formula::not(Formula::Or(ps.iter().cloned().map(Formula::not).collect()))),
                    Formula::Or(ps) => Some(Formula::not(Formula::And(ps.iter().cloned().map(Formula::not).collect()))),
                    _ => None,
                })
            }
            2 => {
                let scope: Vec<Var> = params.keys().cloned().collect();
                let atom = random_atom(n, &scope, rng);
                let taut = Formula::Or(vec![atom.clone(), Formula::not(atom)]);
                phi = if rng.random_bool(0.5) {
                    Formula::And(vec![phi, taut])
                } else {
                    Formula::And(vec![taut, phi])
                };
            }
            3 => {
                // name a derived parameter and use it in place of its term
                let scope: Vec<Var> = params.keys().cloned().collect();
                if scope.is_empty() {
                    continue;
                }
                let sort = random_sort(n, rng);
                let t = random_term(n, sort, &scope, 2, rng);
                let q = fresh_var("q", sort, &taken);
                let value = term_value(model, &t, &params).expect("parameters cover the term");
                params.insert(q.clone(), value);
                phi = phi.map_terms(&|s| s.replace(&t, &Term::Var(q.clone())));
            }
            4 => {
                let sort = random_sort(n, rng);
                let q = fresh_var("u", sort, &taken);
                let value = model.random_element(sort, rng);
                params.insert(q, value);
            }
            _ => {
                let z = fresh_var("z", x.sort, &taken);
                let inner = phi.substitute(x, &Term::Var(z.clone()));
                let wrapped = Formula::exists(z.clone(), Formula::And(vec![Formula::Eq(Term::Var(z), Term::Var(x.clone())), inner]));
                phi = eliminate(&wrapped);
            }
        }
    }
    if !phi.free_vars().contains(x) {
        let xt = Term::Var(x.clone());
        phi = Formula::And(vec![phi, Formula::Eq(xt.clone(), xt)]);
    }
    (phi, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_shape_and_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=3 {
            let shape = FormulaShape::new(n);
            for _ in 0..300 {
                let phi = random_formula(&shape, &mut rng);
                phi.check(n).unwrap();
                assert!(phi.quantifier_depth() <= 2);
                assert!(phi.free_vars().len() <= 3);
            }
        }
    }

    #[test]
    fn sentences_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(random_sentence(&FormulaShape::new(2), &mut rng).free_vars().is_empty());
        }
    }
}
