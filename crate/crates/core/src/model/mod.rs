//! The model-backend contract and the machinery shared by all backends:
//! open intervals with infinite endpoints, multi-intervals, arrangements of
//! a generated substructure, the test-point evaluator and randomized axiom
//! checks.

mod axioms;
mod eval;

pub use axioms::{axiom_check, AxiomFailure, AxiomReport};
pub use eval::{eval, eval_qf, term_value};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::RngCore;

use crate::error::SemanticError;
use crate::syntax::{Sort, Var};

/// Variable assignment; keys are sort-tagged so lookups are sort-respecting.
pub type Assignment<E> = BTreeMap<Var, E>;

/// An exact model of the theory for a fixed number of ordered sorts.
///
/// Elements are compared only within one instance and one sort. The sampling
/// operations realize the existential axioms: every nonempty open interval
/// contains image and non-image points, and every product of nonempty open
/// intervals contains the images of some base point.
pub trait Model {
    type Elem: Clone + Eq + Hash + Debug;
    type Snapshot;

    fn backend_name(&self) -> &'static str;
    /// Number of ordered sorts `n`.
    fn sorts(&self) -> usize;
    fn sort_of(&self, e: &Self::Elem) -> Sort;
    fn zero(&self) -> Self::Elem;
    fn compare(&self, i: usize, a: &Self::Elem, b: &Self::Elem) -> Ordering;
    fn apply_f(&self, i: usize, x: &Self::Elem) -> Self::Elem;
    fn apply_g(&self, i: usize, y: &Self::Elem) -> Self::Elem;
    fn in_image(&self, i: usize, y: &Self::Elem) -> bool;

    /// A base point whose `i`-th image lies in `target[i]` for every `i`,
    /// avoiding `exclude`.
    fn sample_multi_interval(&mut self, target: &MultiInterval<Self::Elem>, exclude: &[Self::Elem]) -> Self::Elem;

    /// A point of sort `i` strictly inside `within`, in or out of the image of
    /// `f_i` as requested, avoiding `exclude`.
    fn sample_interval(
        &mut self,
        i: usize,
        within: &Interval<Self::Elem>,
        want_image: bool,
        exclude: &[Self::Elem],
    ) -> Self::Elem;

    fn random_element(&mut self, sort: Sort, rng: &mut dyn RngCore) -> Self::Elem;

    fn snapshot(&self) -> Self::Snapshot;
    fn restore(&mut self, snapshot: Self::Snapshot);

    fn render(&self, e: &Self::Elem) -> String;
    fn parse_element(&mut self, sort: Sort, text: &str) -> Result<Self::Elem, SemanticError>;
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Endpoint<E> {
    NegInf,
    At(E),
    PosInf,
}

impl<E> Endpoint<E> {
    pub fn point(&self) -> Option<&E> {
        match self {
            Endpoint::At(e) => Some(e),
            _ => None,
        }
    }

    pub fn map<F>(&self, f: impl FnOnce(&E) -> F) -> Endpoint<F> {
        match self {
            Endpoint::NegInf => Endpoint::NegInf,
            Endpoint::At(e) => Endpoint::At(f(e)),
            Endpoint::PosInf => Endpoint::PosInf,
        }
    }
}

/// Total order on endpoints of sort `i`.
pub fn compare_endpoints<M: Model + ?Sized>(model: &M, i: usize, a: &Endpoint<M::Elem>, b: &Endpoint<M::Elem>) -> Ordering {
    use Endpoint::*;
    match (a, b) {
        (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
        (NegInf, _) | (_, PosInf) => Ordering::Less,
        (_, NegInf) | (PosInf, _) => Ordering::Greater,
        (At(x), At(y)) => model.compare(i, x, y),
    }
}

pub fn render_endpoint<M: Model + ?Sized>(model: &M, e: &Endpoint<M::Elem>) -> String {
    match e {
        Endpoint::NegInf => "-inf".into(),
        Endpoint::PosInf => "+inf".into(),
        Endpoint::At(x) => model.render(x),
    }
}

/// Open interval `(lo, hi)` in one ordered sort.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval<E> {
    pub lo: Endpoint<E>,
    pub hi: Endpoint<E>,
}

impl<E> Interval<E> {
    pub fn full() -> Self {
        Interval {
            lo: Endpoint::NegInf,
            hi: Endpoint::PosInf,
        }
    }

    pub fn new(lo: Endpoint<E>, hi: Endpoint<E>) -> Self {
        Interval { lo, hi }
    }

    pub fn is_full(&self) -> bool {
        matches!((&self.lo, &self.hi), (Endpoint::NegInf, Endpoint::PosInf))
    }
}

impl<E: Clone> Interval<E> {
    pub fn above(e: &E) -> Self {
        Interval::new(Endpoint::At(e.clone()), Endpoint::PosInf)
    }

    pub fn below(e: &E) -> Self {
        Interval::new(Endpoint::NegInf, Endpoint::At(e.clone()))
    }

    pub fn between(a: &E, b: &E) -> Self {
        Interval::new(Endpoint::At(a.clone()), Endpoint::At(b.clone()))
    }
}

pub fn interval_nonempty<M: Model + ?Sized>(model: &M, i: usize, iv: &Interval<M::Elem>) -> bool {
    compare_endpoints(model, i, &iv.lo, &iv.hi) == Ordering::Less
}

pub fn interval_contains<M: Model + ?Sized>(model: &M, i: usize, iv: &Interval<M::Elem>, e: &M::Elem) -> bool {
    let at = Endpoint::At(e.clone());
    compare_endpoints(model, i, &iv.lo, &at) == Ordering::Less
        && compare_endpoints(model, i, &at, &iv.hi) == Ordering::Less
}

/// `{x in R0 : f_i(x) in self.0[i-1] for all i}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiInterval<E>(pub Vec<Interval<E>>);

impl<E> MultiInterval<E> {
    pub fn full(n: usize) -> Self {
        MultiInterval((0..n).map(|_| Interval::full()).collect())
    }

    /// The interval for ordered sort `i` (1-based).
    pub fn sort(&self, i: usize) -> &Interval<E> {
        &self.0[i - 1]
    }

    pub fn sort_mut(&mut self, i: usize) -> &mut Interval<E> {
        &mut self.0[i - 1]
    }
}

pub fn multi_interval_contains<M: Model + ?Sized>(model: &M, mi: &MultiInterval<M::Elem>, x: &M::Elem) -> bool {
    (1..=mi.0.len()).all(|i| interval_contains(model, i, mi.sort(i), &model.apply_f(i, x)))
}

/// Evaluated closure `<A>` of a finite set of elements under `0`, `f_i`, `g_i`.
pub fn generated_elements<M: Model + ?Sized>(model: &M, gens: &[M::Elem]) -> Vec<M::Elem> {
    let n = model.sorts();
    let mut seen: Vec<M::Elem> = Vec::new();
    let mut set = std::collections::HashSet::new();
    let mut work: Vec<M::Elem> = vec![model.zero()];
    work.extend(gens.iter().cloned());
    while let Some(e) = work.pop() {
        if !set.insert(e.clone()) {
            continue;
        }
        match model.sort_of(&e) {
            Sort(0) => work.extend((1..=n).map(|j| model.apply_f(j, &e))),
            Sort(i) => work.push(model.apply_g(i, &e)),
        }
        seen.push(e);
    }
    seen
}

/// Position of an element relative to a sorted endpoint list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SortCell {
    /// Equal to the `k`-th endpoint.
    Point(usize),
    /// Strictly between endpoint `k-1` and endpoint `k` (with `-inf`/`+inf`
    /// beyond the ends); there are `len + 1` gaps.
    Gap(usize),
}

/// The evaluated substructure generated by some parameters: its base-sort
/// points and, per ordered sort, its strictly sorted points.
#[derive(Clone, Debug)]
pub struct Arrangement<E> {
    pub base: Vec<E>,
    /// `endpoints[i - 1]` is sorted by `<_i`.
    pub endpoints: Vec<Vec<E>>,
}

impl<E: Clone + Eq + Hash + Debug> Arrangement<E> {
    pub fn of<M: Model<Elem = E> + ?Sized>(model: &M, params: &[E]) -> Self {
        let n = model.sorts();
        let all = generated_elements(model, params);
        let mut base = Vec::new();
        let mut endpoints: Vec<Vec<E>> = vec![Vec::new(); n];
        for e in all {
            match model.sort_of(&e) {
                Sort(0) => base.push(e),
                Sort(i) => endpoints[i - 1].push(e),
            }
        }
        for (k, list) in endpoints.iter_mut().enumerate() {
            list.sort_by(|a, b| model.compare(k + 1, a, b));
        }
        // base points in the order of their first image, a definable order
        if n > 0 {
            base.sort_by(|a, b| model.compare(1, &model.apply_f(1, a), &model.apply_f(1, b)));
        }
        Arrangement { base, endpoints }
    }

    pub fn sorts(&self) -> usize {
        self.endpoints.len()
    }

    pub fn points(&self, i: usize) -> &[E] {
        &self.endpoints[i - 1]
    }

    pub fn gap_count(&self, i: usize) -> usize {
        self.endpoints[i - 1].len() + 1
    }

    /// Gap `k` of sort `i` as an open interval.
    pub fn gap(&self, i: usize, k: usize) -> Interval<E> {
        let pts = self.points(i);
        let lo = if k == 0 { Endpoint::NegInf } else { Endpoint::At(pts[k - 1].clone()) };
        let hi = if k == pts.len() { Endpoint::PosInf } else { Endpoint::At(pts[k].clone()) };
        Interval::new(lo, hi)
    }

    /// Open interval spanning gaps `first..=last` of sort `i`.
    pub fn span(&self, i: usize, first: usize, last: usize) -> Interval<E> {
        Interval::new(self.gap(i, first).lo, self.gap(i, last).hi)
    }

    pub fn locate<M: Model<Elem = E> + ?Sized>(&self, model: &M, i: usize, e: &E) -> SortCell {
        let pts = self.points(i);
        match pts.binary_search_by(|p| model.compare(i, p, e)) {
            Ok(k) => SortCell::Point(k),
            Err(k) => SortCell::Gap(k),
        }
    }

    /// The multi-interval given by one gap per sort.
    pub fn gap_cell(&self, gaps: &[usize]) -> MultiInterval<E> {
        MultiInterval(gaps.iter().enumerate().map(|(k, &g)| self.gap(k + 1, g)).collect())
    }

    /// All tuples of gap indices, one per sort (odometer order, sort 1 slowest).
    pub fn gap_tuples(&self) -> Vec<Vec<usize>> {
        let dims: Vec<usize> = (1..=self.sorts()).map(|i| self.gap_count(i)).collect();
        odometer(&dims)
    }
}

/// Every tuple `t` with `t[k] < dims[k]`, last coordinate fastest.
pub fn odometer(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |k| {
                    let mut t = prefix.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_enumerates_products() {
        assert_eq!(odometer(&[2, 3]).len(), 6);
        assert_eq!(odometer(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(odometer(&[2, 1])[1], vec![1, 0]);
    }
}
