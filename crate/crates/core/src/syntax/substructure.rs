use std::collections::{BTreeMap, BTreeSet};

use super::{normalize_term, Sort, Term};

/// Syntactic closure of a finite set of terms under `0`, `f_i` and `g_i`,
/// modulo normalization, grouped by sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstructureTable {
    pub n: usize,
    pub by_sort: BTreeMap<Sort, BTreeSet<Term>>,
}

impl SubstructureTable {
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.by_sort.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_sort.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn of_sort(&self, s: Sort) -> impl Iterator<Item = &Term> {
        self.by_sort.get(&s).into_iter().flatten()
    }
}

pub fn generated_substructure<'a>(gens: impl IntoIterator<Item = &'a Term>, n: usize) -> SubstructureTable {
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    let mut work: Vec<Term> = vec![Term::Zero];
    work.extend(gens.into_iter().map(normalize_term));
    while let Some(t) = work.pop() {
        if !seen.insert(t.clone()) {
            continue;
        }
        match t.sort() {
            Sort(0) => work.extend((1..=n).map(|j| normalize_term(&Term::f(j, t.clone())))),
            Sort(i) => work.push(normalize_term(&Term::g(i, t.clone()))),
        }
    }
    let mut by_sort: BTreeMap<Sort, BTreeSet<Term>> = BTreeMap::new();
    for t in seen {
        by_sort.entry(t.sort()).or_default().insert(t);
    }
    SubstructureTable { n, by_sort }
}
