//! Canonical codes for definable unary sets and functions.
//!
//! A subset of `R0` is coded by its canonical decomposition. A subset `E` of
//! an ordered sort `R_k` splits into its image part, pulled back to `R0`
//! through `f_k` and coded there, and its non-image part. On non-image points
//! `g_k` is constantly `0`, so the non-image part is a finite union of
//! intervals and points of the order `<_k` with generated endpoints; it is
//! coded by its maximal runs and isolated points.
//!
//! A unary function `h` is coded by the regions on which `h(x)` equals one of
//! the canonical terms in `x`, and by the regions on which it takes each of
//! finitely many generated values. Regions are taken in a fixed priority
//! order (constants, then terms in `x`, then values) so they partition the
//! domain.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::defsets::{arrangement, canonical_decomposition};
use crate::error::SemanticError;
use crate::model::{eval, eval_qf, render_endpoint, Arrangement, Assignment, Endpoint, Interval, Model, MultiInterval};
use crate::qe::eliminate;
use crate::syntax::{fresh_var, Formula, Sort, Term, Var};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaseCode<E> {
    pub e0: Vec<E>,
    pub intervals: Vec<MultiInterval<E>>,
}

/// Non-image part of a subset of an ordered sort.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LineCode<E> {
    /// Maximal open intervals whose non-image points all lie in the set.
    pub runs: Vec<Interval<E>>,
    /// Members outside every run.
    pub points: Vec<E>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetCode<E> {
    Base(BaseCode<E>),
    Ordered {
        sort: usize,
        image: BaseCode<E>,
        non_image: LineCode<E>,
    },
}

impl<E: Clone> SetCode<E> {
    pub fn sort(&self) -> Sort {
        match self {
            SetCode::Base(_) => Sort::BASE,
            SetCode::Ordered { sort, .. } => Sort(*sort),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SetCode::Base(b) => b.is_empty(),
            SetCode::Ordered { image, non_image, .. } => image.is_empty() && non_image.runs.is_empty() && non_image.points.is_empty(),
        }
    }

    /// Every element occurring in the code, in serialization order.
    pub fn coordinates(&self) -> Vec<E> {
        let mut out = Vec::new();
        let push_iv = |out: &mut Vec<E>, iv: &Interval<E>| {
            out.extend(iv.lo.point().cloned());
            out.extend(iv.hi.point().cloned());
        };
        let base = |out: &mut Vec<E>, b: &BaseCode<E>| {
            out.extend(b.e0.iter().cloned());
            for mi in &b.intervals {
                for iv in &mi.0 {
                    push_iv(out, iv);
                }
            }
        };
        match self {
            SetCode::Base(b) => base(&mut out, b),
            SetCode::Ordered { image, non_image, .. } => {
                base(&mut out, image);
                for iv in &non_image.runs {
                    push_iv(&mut out, iv);
                }
                out.extend(non_image.points.iter().cloned());
            }
        }
        out
    }

    /// The code with every element replaced.
    pub fn map<F: Clone>(&self, f: &impl Fn(&E) -> F) -> SetCode<F> {
        let iv = |iv: &Interval<E>| Interval::new(iv.lo.map(f), iv.hi.map(f));
        let base = |b: &BaseCode<E>| BaseCode {
            e0: b.e0.iter().map(f).collect(),
            intervals: b.intervals.iter().map(|mi| MultiInterval(mi.0.iter().map(iv).collect())).collect(),
        };
        match self {
            SetCode::Base(b) => SetCode::Base(base(b)),
            SetCode::Ordered { sort, image, non_image } => SetCode::Ordered {
                sort: *sort,
                image: base(image),
                non_image: LineCode {
                    runs: non_image.runs.iter().map(iv).collect(),
                    points: non_image.points.iter().map(f).collect(),
                },
            },
        }
    }

    pub fn to_json<M: Model<Elem = E>>(&self, model: &M) -> Value {
        let ep = |e: &Endpoint<E>| render_endpoint(model, e);
        let base = |b: &BaseCode<E>| {
            json!({
                "e0": b.e0.iter().map(|e| model.render(e)).collect::<Vec<_>>(),
                "intervals": b.intervals.iter().map(|mi| {
                    mi.0.iter().map(|iv| json!([ep(&iv.lo), ep(&iv.hi)])).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
            })
        };
        match self {
            SetCode::Base(b) => {
                let mut v = base(b);
                v["sort"] = json!(0);
                v
            }
            SetCode::Ordered { sort, image, non_image } => json!({
                "sort": sort,
                "image": base(image),
                "non_image": {
                    "runs": non_image.runs.iter().map(|iv| json!([ep(&iv.lo), ep(&iv.hi)])).collect::<Vec<_>>(),
                    "points": non_image.points.iter().map(|e| model.render(e)).collect::<Vec<_>>(),
                },
            }),
        }
    }
}

impl<E> BaseCode<E> {
    pub fn is_empty(&self) -> bool {
        self.e0.is_empty() && self.intervals.is_empty()
    }
}

/// The unique free variable of `phi` outside `params`.
pub fn set_variable<E>(phi: &Formula, params: &Assignment<E>) -> Result<Var, SemanticError> {
    let rest: Vec<Var> = phi.free_vars().into_iter().filter(|v| !params.contains_key(v)).collect();
    match rest.as_slice() {
        [x] => Ok(x.clone()),
        _ => Err(SemanticError::BadFreeVariable {
            expected: "any sort".into(),
            found: if rest.is_empty() {
                "none".into()
            } else {
                rest.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            },
        }),
    }
}

fn taken_names<E>(phi: &Formula, params: &Assignment<E>) -> BTreeSet<Var> {
    let mut taken = phi.all_vars();
    taken.extend(params.keys().cloned());
    taken
}

fn base_code<M: Model>(model: &mut M, phi: &Formula, params: &Assignment<M::Elem>) -> Result<BaseCode<M::Elem>, SemanticError> {
    let set = arrangement(model, phi, params)?;
    let dec = canonical_decomposition(model, &set);
    Ok(BaseCode {
        e0: dec.e0,
        intervals: dec.intervals,
    })
}

/// Canonical code of `{x : phi(x, params)}` for quantifier-free `phi`.
pub fn code_set<M: Model>(model: &mut M, phi: &Formula, params: &Assignment<M::Elem>) -> Result<SetCode<M::Elem>, SemanticError> {
    if !phi.is_quantifier_free() {
        return Err(SemanticError::NotQuantifierFree);
    }
    let x = set_variable(phi, params)?;
    let k = match x.sort {
        Sort(0) => return Ok(SetCode::Base(base_code(model, phi, params)?)),
        Sort(k) => k,
    };
    // image part, pulled back to R0
    let y = fresh_var("y", Sort::BASE, &taken_names(phi, params));
    let pulled = phi.substitute(&x, &Term::f(k, Term::Var(y.clone())));
    let image = if pulled.free_vars().contains(&y) {
        base_code(model, &pulled, params)?
    } else {
        // x does not occur: the image part is all or nothing
        let all = eval_qf(model, &pulled, params)?;
        BaseCode {
            e0: vec![],
            intervals: if all { vec![MultiInterval::full(model.sorts())] } else { vec![] },
        }
    };
    let non_image = line_code(model, phi, &x, params);
    Ok(SetCode::Ordered { sort: k, image, non_image })
}

fn line_code<M: Model>(model: &mut M, phi: &Formula, x: &Var, params: &Assignment<M::Elem>) -> LineCode<M::Elem> {
    let k = x.sort.0;
    let values: Vec<M::Elem> = params.values().cloned().collect();
    let arr = Arrangement::of(model, &values);
    let pts = arr.points(k).to_vec();
    let holds = |model: &mut M, e: M::Elem| {
        let mut asg = params.clone();
        asg.insert(x.clone(), e);
        eval(model, phi, &asg).expect("assignment covers the formula")
    };
    let gap_in: Vec<bool> = (0..arr.gap_count(k))
        .map(|g| {
            let snap = model.snapshot();
            let rep = model.sample_interval(k, &arr.gap(k, g), false, &pts);
            let v = holds(model, rep);
            model.restore(snap);
            v
        })
        .collect();
    let wildcard: Vec<bool> = pts.iter().map(|p| model.in_image(k, p)).collect();
    let point_in: Vec<bool> = pts.iter().zip(&wildcard).map(|(p, &w)| !w && holds(model, p.clone())).collect();

    let mut runs = Vec::new();
    let mut interior = vec![false; pts.len()];
    let mut g = 0;
    while g < gap_in.len() {
        if !gap_in[g] {
            g += 1;
            continue;
        }
        let start = g;
        // point g separates gap g from gap g + 1
        while g + 1 < gap_in.len() && gap_in[g + 1] && (point_in[g] || wildcard[g]) {
            interior[g] = true;
            g += 1;
        }
        runs.push(arr.span(k, start, g));
        g += 1;
    }
    let points = pts
        .iter()
        .enumerate()
        .filter(|(j, _)| point_in[*j] && !interior[*j])
        .map(|(_, p)| p.clone())
        .collect();
    LineCode { runs, points }
}

/// Formula in `x` defined by a code, whose coordinates become fresh
/// parameters named `{prefix}{k}`; returns the formula and their values.
pub fn code_formula<E: Clone>(code: &SetCode<E>, x: &Var, prefix: &str, sort_of: &impl Fn(&E) -> Sort) -> (Formula, Assignment<E>) {
    let mut asg = Assignment::new();
    let mut param = |e: &E| {
        let v = Var::new(format!("{prefix}{}", asg.len()), sort_of(e));
        asg.insert(v.clone(), e.clone());
        Term::Var(v)
    };
    fn in_interval<E>(i: usize, t: &Term, iv: &Interval<E>, param: &mut impl FnMut(&E) -> Term) -> Formula {
        let mut parts = Vec::new();
        if let Endpoint::At(lo) = &iv.lo {
            parts.push(Formula::Lt(i, param(lo), t.clone()));
        }
        if let Endpoint::At(hi) = &iv.hi {
            parts.push(Formula::Lt(i, t.clone(), param(hi)));
        }
        Formula::and_all(parts)
    }
    let base = |b: &BaseCode<E>, y: &Term, param: &mut dyn FnMut(&E) -> Term| {
        let mut param = |e: &E| param(e);
        let mut alts: Vec<Formula> = b.e0.iter().map(|e| Formula::Eq(y.clone(), param(e))).collect();
        for mi in &b.intervals {
            alts.push(Formula::and_all(
                mi.0.iter()
                    .enumerate()
                    .filter(|(_, iv)| !iv.is_full())
                    .map(|(s, iv)| in_interval(s + 1, &Term::f(s + 1, y.clone()), iv, &mut param))
                    .collect(),
            ));
        }
        Formula::or_all(alts)
    };
    let xt = Term::Var(x.clone());
    let phi = match code {
        SetCode::Base(b) => base(b, &xt, &mut param),
        SetCode::Ordered { sort, image, non_image } => {
            let k = *sort;
            let gx = Term::g(k, xt.clone());
            let is_image = Formula::Eq(Term::f(k, gx.clone()), xt.clone());
            let image_part = Formula::And(vec![is_image.clone(), base(image, &gx, &mut param)]);
            let mut alts: Vec<Formula> = non_image.runs.iter().map(|iv| in_interval(k, &xt, iv, &mut param)).collect();
            alts.extend(non_image.points.iter().map(|p| Formula::Eq(xt.clone(), param(p))));
            let non_image_part = Formula::And(vec![Formula::not(is_image), Formula::or_all(alts)]);
            Formula::Or(vec![image_part, non_image_part])
        }
    };
    (phi, asg)
}

/// Truth of `phi` under `asg` after eliminating its quantifiers.
fn holds_via_qe<M: Model>(model: &mut M, phi: &Formula, asg: &Assignment<M::Elem>) -> Result<bool, SemanticError> {
    eval_qf(model, &eliminate(phi), asg)
}

/// Whether the code, expanded back into a formula, defines the same set as
/// `phi`.
pub fn round_trip<M: Model>(model: &mut M, code: &SetCode<M::Elem>, phi: &Formula, params: &Assignment<M::Elem>) -> Result<bool, SemanticError> {
    let x = set_variable(phi, params)?;
    let sort_of = |e: &M::Elem| model.sort_of(e);
    let (back, mut asg) = code_formula(code, &x, "code_", &sort_of);
    asg.extend(params.iter().map(|(k, v)| (k.clone(), v.clone())));
    holds_via_qe(model, &Formula::forall(x, Formula::iff(phi.clone(), back)), &asg)
}

/// Totality and uniqueness of `y` given `x`, under `params`.
pub fn check_function<M: Model>(
    model: &mut M,
    phi: &Formula,
    x: &Var,
    y: &Var,
    params: &Assignment<M::Elem>,
) -> Result<bool, SemanticError> {
    let y2 = fresh_var(&y.name, y.sort, &taken_names(phi, params));
    let total = Formula::forall(x.clone(), Formula::exists(y.clone(), phi.clone()));
    let unique = Formula::forall(
        x.clone(),
        Formula::forall(
            y.clone(),
            Formula::forall(
                y2.clone(),
                Formula::implies(
                    Formula::And(vec![phi.clone(), phi.substitute(y, &Term::Var(y2.clone()))]),
                    Formula::Eq(Term::Var(y.clone()), Term::Var(y2)),
                ),
            ),
        ),
    );
    holds_via_qe(model, &Formula::And(vec![total, unique]), params)
}

/// Canonical terms of sort `j` in one variable of sort `i`: constants first.
pub fn canonical_terms(x: &Var, j: usize) -> Vec<Term> {
    let xt = Term::Var(x.clone());
    let mut out = vec![if j == 0 { Term::Zero } else { Term::f(j, Term::Zero) }];
    match (x.sort.0, j) {
        (0, 0) => out.push(xt),
        (0, j) => out.push(Term::f(j, xt)),
        (i, 0) => out.push(Term::g(i, xt)),
        (i, j) => {
            if i == j {
                out.push(xt.clone());
            }
            out.push(Term::f(j, Term::g(i, xt)));
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermRegion<E> {
    pub term: Term,
    pub code: SetCode<E>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueRegion<E> {
    pub value: E,
    pub code: SetCode<E>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunctionCode<E> {
    pub domain: Sort,
    pub codomain: Sort,
    /// One region per canonical term, in priority order.
    pub term_regions: Vec<TermRegion<E>>,
    /// Nonempty regions of constant generated value, in the order of values.
    pub value_regions: Vec<ValueRegion<E>>,
}

impl<E: Clone> FunctionCode<E> {
    pub fn regions(&self) -> impl Iterator<Item = &SetCode<E>> {
        self.term_regions.iter().map(|r| &r.code).chain(self.value_regions.iter().map(|r| &r.code))
    }

    pub fn to_json<M: Model<Elem = E>>(&self, model: &M) -> Value {
        json!({
            "domain": self.domain.0,
            "codomain": self.codomain.0,
            "term_regions": self.term_regions.iter().map(|r| json!({
                "term": r.term.to_string(),
                "region": r.code.to_json(model),
            })).collect::<Vec<_>>(),
            "value_regions": self.value_regions.iter().map(|r| json!({
                "value": model.render(&r.value),
                "region": r.code.to_json(model),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Canonical code of the function `x |-> y` defined by `phi(x, y, params)`.
pub fn code_function<M: Model>(
    model: &mut M,
    phi: &Formula,
    x: &Var,
    y: &Var,
    params: &Assignment<M::Elem>,
) -> Result<FunctionCode<M::Elem>, SemanticError> {
    let extra: Vec<Var> = phi.free_vars().into_iter().filter(|v| v != x && v != y && !params.contains_key(v)).collect();
    if !extra.is_empty() {
        return Err(SemanticError::PartialAssignment(extra[0].to_string()));
    }
    if !check_function(model, phi, x, y, params)? {
        return Err(SemanticError::NotAFunction);
    }
    let j = y.sort.0;
    let mut claimed: Vec<Formula> = Vec::new();
    let mut term_regions = Vec::new();
    for t in canonical_terms(x, j) {
        let agree = phi.substitute(y, &t);
        let region = Formula::And(vec![agree.clone(), Formula::not(Formula::or_all(claimed.clone()))]);
        let code = code_region(model, &region, x, params)?;
        term_regions.push(TermRegion { term: t, code });
        claimed.push(agree);
    }
    // remaining values are generated by the parameters
    let taken = taken_names(phi, params);
    let z = fresh_var("value", y.sort, &taken);
    let values: Vec<M::Elem> = params.values().cloned().collect();
    let arr = Arrangement::of(model, &values);
    let candidates: Vec<M::Elem> = if j == 0 { arr.base.clone() } else { arr.points(j).to_vec() };
    let mut value_regions = Vec::new();
    for a in candidates {
        let agree = phi.substitute(y, &Term::Var(z.clone()));
        let region = Formula::And(vec![agree, Formula::not(Formula::or_all(claimed.clone()))]);
        let mut asg = params.clone();
        asg.insert(z.clone(), a.clone());
        let qf = eliminate(&region);
        let code = code_set_qf_with(model, &qf, x, &asg)?;
        if !code.is_empty() {
            value_regions.push(ValueRegion { value: a, code });
        }
    }
    // exhaustiveness: every x lies in a term region or takes a generated value
    let mut ex_asg = params.clone();
    let mut alts = claimed.clone();
    for (k, r) in value_regions.iter().enumerate() {
        let zk = Var::new(format!("{}_{k}", z.name), y.sort);
        ex_asg.insert(zk.clone(), r.value.clone());
        alts.push(phi.substitute(y, &Term::Var(zk)));
    }
    if !holds_via_qe(model, &Formula::forall(x.clone(), Formula::or_all(alts)), &ex_asg)? {
        return Err(SemanticError::ExhaustivenessFailure);
    }
    Ok(FunctionCode {
        domain: x.sort,
        codomain: y.sort,
        term_regions,
        value_regions,
    })
}

fn code_region<M: Model>(model: &mut M, region: &Formula, x: &Var, params: &Assignment<M::Elem>) -> Result<SetCode<M::Elem>, SemanticError> {
    code_set_qf_with(model, &eliminate(region), x, params)
}

/// `code_set` for a quantifier-free formula in which `x` may have been
/// eliminated away (constant truth value).
fn code_set_qf_with<M: Model>(model: &mut M, qf: &Formula, x: &Var, params: &Assignment<M::Elem>) -> Result<SetCode<M::Elem>, SemanticError> {
    let used = qf.free_vars();
    let params: Assignment<M::Elem> = params.iter().filter(|(v, _)| used.contains(*v)).map(|(v, e)| (v.clone(), e.clone())).collect();
    if used.contains(x) {
        return code_set(model, qf, &params);
    }
    // x does not occur: the region is everything or nothing
    let xt = Term::Var(x.clone());
    let whole = if eval_qf(model, qf, &params)? {
        Formula::Eq(xt.clone(), xt)
    } else {
        Formula::Neq(xt.clone(), xt)
    };
    code_set(model, &whole, &Assignment::new())
}

/// Checks that the regions of a function code are pairwise disjoint and
/// cover the domain, by expanding them back into formulas.
pub fn verify_partition<M: Model>(model: &mut M, code: &FunctionCode<M::Elem>) -> Result<(), String> {
    let x = Var::new("x", code.domain);
    let mut formulas = Vec::new();
    let mut asg = Assignment::new();
    for (k, region) in code.regions().enumerate() {
        let sort_of = |e: &M::Elem| model.sort_of(e);
        let (f, a) = code_formula(region, &x, &format!("r{k}_"), &sort_of);
        formulas.push(f);
        asg.extend(a);
    }
    let err = |e: SemanticError| e.to_string();
    for a in 0..formulas.len() {
        for b in a + 1..formulas.len() {
            let overlap = Formula::exists(x.clone(), Formula::And(vec![formulas[a].clone(), formulas[b].clone()]));
            if holds_via_qe(model, &overlap, &asg).map_err(err)? {
                return Err(format!("regions {a} and {b} overlap"));
            }
        }
    }
    let cover = Formula::forall(x.clone(), Formula::or_all(formulas));
    if !holds_via_qe(model, &cover, &asg).map_err(err)? {
        return Err("regions do not cover the domain".into());
    }
    Ok(())
}

/// Checks each region of a function code against the defining formula:
/// on a term region `phi(x, t(x))` holds, on a value region `phi(x, a)`.
pub fn verify_regions<M: Model>(
    model: &mut M,
    code: &FunctionCode<M::Elem>,
    phi: &Formula,
    x: &Var,
    y: &Var,
    params: &Assignment<M::Elem>,
) -> Result<(), String> {
    let err = |e: SemanticError| e.to_string();
    for (k, r) in code.term_regions.iter().enumerate() {
        let sort_of = |e: &M::Elem| model.sort_of(e);
        let (f, mut asg) = code_formula(&r.code, x, &format!("t{k}_"), &sort_of);
        asg.extend(params.iter().map(|(a, b)| (a.clone(), b.clone())));
        let claim = Formula::forall(x.clone(), Formula::implies(f, phi.substitute(y, &r.term)));
        if !holds_via_qe(model, &claim, &asg).map_err(err)? {
            return Err(format!("term region {} does not agree with {}", k, r.term));
        }
    }
    for (k, r) in code.value_regions.iter().enumerate() {
        let sort_of = |e: &M::Elem| model.sort_of(e);
        let (f, mut asg) = code_formula(&r.code, x, &format!("v{k}_"), &sort_of);
        asg.extend(params.iter().map(|(a, b)| (a.clone(), b.clone())));
        let val = Var::new(format!("value_{k}"), y.sort);
        asg.insert(val.clone(), r.value.clone());
        let claim = Formula::forall(x.clone(), Formula::implies(f, phi.substitute(y, &Term::Var(val))));
        if !holds_via_qe(model, &claim, &asg).map_err(err)? {
            return Err(format!("value region {k} does not agree with its value"));
        }
    }
    Ok(())
}
