//! Randomized instantiation of the five axioms against a backend.
//!
//! Universal prefixes are filled with random elements; existential
//! conclusions are discharged by the backend's samplers and every witness is
//! re-checked with exact comparisons.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{interval_contains, Endpoint, Interval, Model, MultiInterval};
use crate::syntax::Sort;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: u8,
    pub trials: usize,
    pub failures: usize,
    /// A few rendered witnesses for the existential parts.
    pub witnesses: Vec<String>,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom {}: {} trials, {} failures", self.axiom, self.trials, self.failures)?;
        for w in &self.witnesses {
            write!(f, "\n  witness {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("axiom {axiom} fails at trial {trial}: {instance}")]
pub struct AxiomFailure {
    pub axiom: u8,
    pub trial: usize,
    pub instance: String,
}

const KEPT_WITNESSES: usize = 3;

pub fn axiom_check<M: Model>(model: &mut M, axiom: u8, trials: usize, seed: u64) -> Result<AxiomReport, AxiomFailure> {
    assert!((1..=5).contains(&axiom), "axioms are numbered 1..=5");
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (axiom as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut witnesses = Vec::new();
    for trial in 0..trials {
        let snap = model.snapshot();
        let outcome = match axiom {
            1 => order_axiom(model, &mut rng),
            2 => injectivity_axiom(model, &mut rng),
            3 => retraction_axiom(model, &mut rng),
            4 => density_axiom(model, &mut rng),
            _ => approximation_axiom(model, &mut rng),
        };
        model.restore(snap);
        match outcome {
            Ok(Some(w)) if witnesses.len() < KEPT_WITNESSES => witnesses.push(w),
            Ok(_) => {}
            Err(instance) => return Err(AxiomFailure { axiom, trial, instance }),
        }
    }
    Ok(AxiomReport {
        axiom,
        trials,
        failures: 0,
        witnesses,
    })
}

type Outcome = Result<Option<String>, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_sort<M: Model>(model: &M, rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(1..=model.sorts())
}

/// Two distinct elements of sort `i`, returned in increasing order.
fn ordered_pair<M: Model>(model: &mut M, i: usize, rng: &mut ChaCha8Rng) -> (M::Elem, M::Elem) {
    let a = model.random_element(Sort(i), rng);
    let mut b = model.random_element(Sort(i), rng);
    if a == b {
        b = model.sample_interval(i, &Interval::above(&a), rng.random(), &[]);
    }
    if model.compare(i, &a, &b).is_lt() {
        (a, b)
    } else {
        (b, a)
    }
}

fn order_axiom<M: Model>(model: &mut M, rng: &mut ChaCha8Rng) -> Outcome {
    let i = random_sort(model, rng);
    let s = Sort(i);
    let (a, b, c) = (
        model.random_element(s, rng),
        model.random_element(s, rng),
        model.random_element(s, rng),
    );
    let r = |m: &M, e: &M::Elem| m.render(e);
    check(model.compare(i, &a, &a) == Ordering::Equal, || format!("<{i} not irreflexive at {}", r(model, &a)))?;
    for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
        let xy = model.compare(i, x, y);
        check(xy == model.compare(i, y, x).reverse(), || {
            format!("<{i} not antisymmetric on {}, {}", r(model, x), r(model, y))
        })?;
        check((xy == Ordering::Equal) == (x == y), || {
            format!("<{i} not total/extensional on {}, {}", r(model, x), r(model, y))
        })?;
    }
    for (x, y, z) in [(&a, &b, &c), (&a, &c, &b), (&b, &a, &c), (&b, &c, &a), (&c, &a, &b), (&c, &b, &a)] {
        if model.compare(i, x, y).is_lt() && model.compare(i, y, z).is_lt() {
            check(model.compare(i, x, z).is_lt(), || {
                format!("<{i} not transitive on {}, {}, {}", r(model, x), r(model, y), r(model, z))
            })?;
        }
    }
    let (lo, hi) = ordered_pair(model, i, rng);
    let mid = model.sample_interval(i, &Interval::between(&lo, &hi), rng.random(), &[]);
    check(model.compare(i, &lo, &mid).is_lt() && model.compare(i, &mid, &hi).is_lt(), || {
        format!("density: {} not strictly between {} and {}", r(model, &mid), r(model, &lo), r(model, &hi))
    })?;
    let above = model.sample_interval(i, &Interval::above(&a), rng.random(), &[]);
    let below = model.sample_interval(i, &Interval::below(&a), rng.random(), &[]);
    check(model.compare(i, &a, &above).is_lt(), || format!("no point above {}", r(model, &a)))?;
    check(model.compare(i, &below, &a).is_lt(), || format!("no point below {}", r(model, &a)))?;
    Ok(Some(format!("R{i}: {} < {} < {}", r(model, &lo), r(model, &mid), r(model, &hi))))
}

fn injectivity_axiom<M: Model>(model: &mut M, rng: &mut ChaCha8Rng) -> Outcome {
    let i = random_sort(model, rng);
    let x = model.random_element(Sort::BASE, rng);
    let y = if rng.random_bool(0.2) { x.clone() } else { model.random_element(Sort::BASE, rng) };
    let (fx, fy) = (model.apply_f(i, &x), model.apply_f(i, &y));
    check(model.sort_of(&fx) == Sort(i), || format!("f{i} lands in {}", model.sort_of(&fx)))?;
    check((fx == fy) == (x == y), || {
        format!("f{i} not injective on {}, {}", model.render(&x), model.render(&y))
    })?;
    Ok(None)
}

fn retraction_axiom<M: Model>(model: &mut M, rng: &mut ChaCha8Rng) -> Outcome {
    let i = random_sort(model, rng);
    let y = model.random_element(Sort(i), rng);
    let gy = model.apply_g(i, &y);
    let back = model.apply_f(i, &gy);
    check((back == y) == model.in_image(i, &y), || {
        format!("in_image disagrees with f{i}(g{i}(y)) = y at {}", model.render(&y))
    })?;
    if !model.in_image(i, &y) {
        check(gy == model.zero(), || format!("g{i} of non-image {} is not 0", model.render(&y)))?;
    }
    let x = model.random_element(Sort::BASE, rng);
    check(model.apply_g(i, &model.apply_f(i, &x)) == x, || {
        format!("g{i}(f{i}(x)) != x at {}", model.render(&x))
    })?;
    Ok(None)
}

fn density_axiom<M: Model>(model: &mut M, rng: &mut ChaCha8Rng) -> Outcome {
    let i = random_sort(model, rng);
    let (lo, hi) = ordered_pair(model, i, rng);
    let iv = Interval::between(&lo, &hi);
    let img = model.sample_interval(i, &iv, true, &[]);
    let off = model.sample_interval(i, &iv, false, &[]);
    check(interval_contains(model, i, &iv, &img) && model.in_image(i, &img), || {
        format!("image sample {} misplaced", model.render(&img))
    })?;
    check(model.apply_f(i, &model.apply_g(i, &img)) == img, || "image sample not fixed by f.g".into())?;
    check(interval_contains(model, i, &iv, &off) && !model.in_image(i, &off), || {
        format!("non-image sample {} misplaced", model.render(&off))
    })?;
    check(model.apply_g(i, &off) == model.zero(), || "non-image sample not sent to 0".into())?;
    Ok(Some(format!(
        "R{i} ({}, {}): image {}, non-image {}",
        model.render(&lo),
        model.render(&hi),
        model.render(&img),
        model.render(&off)
    )))
}

fn approximation_axiom<M: Model>(model: &mut M, rng: &mut ChaCha8Rng) -> Outcome {
    let n = model.sorts();
    let mut target = MultiInterval::full(n);
    for i in 1..=n {
        let (lo, hi) = ordered_pair(model, i, rng);
        let iv = match rng.random_range(0..6) {
            0 => Interval::above(&lo),
            1 => Interval::below(&hi),
            _ => Interval::between(&lo, &hi),
        };
        *target.sort_mut(i) = iv;
    }
    let x = model.sample_multi_interval(&target, &[]);
    check(model.sort_of(&x) == Sort::BASE, || "multi-interval sample not in R0".into())?;
    for i in 1..=n {
        let fx = model.apply_f(i, &x);
        check(interval_contains(model, i, target.sort(i), &fx), || {
            let iv = target.sort(i);
            format!(
                "f{i}({}) = {} outside ({}, {})",
                model.render(&x),
                model.render(&fx),
                render_ep(model, &iv.lo),
                render_ep(model, &iv.hi)
            )
        })?;
    }
    Ok(Some(model.render(&x)))
}

fn render_ep<M: Model>(model: &M, e: &Endpoint<M::Elem>) -> String {
    super::render_endpoint(model, e)
}
