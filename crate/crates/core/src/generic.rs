//! A countable model built lazily, one element at a time.
//!
//! The state is a finite partial structure: a set of base points, each with
//! all `n` images materialized, and per ordered sort a strictly ordered list
//! of points flagged as the image of some base point or as a non-image
//! point. Extensions insert fresh points into any nonempty gap, which is
//! exactly what the extension steps of a back-and-forth construction need,
//! so the state can always be grown to witness any existential demand.
//!
//! Placement is deterministic: a new point goes immediately above the lower
//! bound of its target interval.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::ops::Bound;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::SemanticError;
use crate::model::{interval_nonempty, Endpoint, Interval, Model, MultiInterval};
use crate::syntax::{parse_term, Sort, SortContext};

pub type Id = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GenElem {
    pub sort: Sort,
    pub id: Id,
}

#[derive(Clone, Debug)]
enum Node {
    Base { images: Vec<Id> },
    Ordered { sort: usize, key: BigRational, preimage: Option<Id> },
}

#[derive(Clone, Debug)]
pub struct GenericModel {
    n: usize,
    seed: u64,
    next_id: Id,
    nodes: HashMap<Id, Node>,
    /// `orders[i - 1]`: sort keys to ids.
    orders: Vec<BTreeMap<BigRational, Id>>,
    base: Vec<Id>,
    /// Creation log for snapshot/restore.
    log: Vec<Id>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericSnapshot {
    log_len: usize,
    next_id: Id,
}

impl GenericModel {
    /// The structure generated by `0`: the base point `0` and its images.
    pub fn new(n: usize, seed: u64) -> Self {
        assert!(n >= 1, "at least one ordered sort");
        let mut m = GenericModel {
            n,
            seed,
            next_id: 0,
            nodes: HashMap::new(),
            orders: vec![BTreeMap::new(); n],
            base: Vec::new(),
            log: Vec::new(),
        };
        m.extend_r0(&MultiInterval::full(n)).expect("full target is nonempty");
        m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn fresh_id(&mut self) -> Id {
        let id = self.next_id;
        self.next_id += 1;
        self.log.push(id);
        id
    }

    fn key(&self, e: &GenElem) -> &BigRational {
        match self.nodes.get(&e.id) {
            Some(Node::Ordered { sort, key, .. }) => {
                assert_eq!(Sort(*sort), e.sort, "element {e:?} carries the wrong sort");
                key
            }
            Some(Node::Base { .. }) => panic!("{e:?} is a base point and has no order"),
            None => panic!("{e:?} is not (or no longer) an element of this model"),
        }
    }

    /// Key for a new point of sort `i` placed immediately above `lo`.
    fn key_above(&self, i: usize, lo: &Endpoint<GenElem>) -> BigRational {
        let order = &self.orders[i - 1];
        match lo {
            Endpoint::NegInf => match order.keys().next() {
                Some(min) => min - BigRational::one(),
                None => BigRational::zero(),
            },
            Endpoint::At(e) => {
                let k = self.key(e).clone();
                match order.range((Bound::Excluded(&k), Bound::Unbounded)).next() {
                    Some((succ, _)) => (&k + succ) / BigRational::from_integer(BigInt::from(2)),
                    None => k + BigRational::one(),
                }
            }
            Endpoint::PosInf => panic!("+inf is not a lower bound"),
        }
    }

    fn insert_ordered(&mut self, i: usize, lo: &Endpoint<GenElem>, preimage: Option<Id>) -> Id {
        let key = self.key_above(i, lo);
        let id = self.fresh_id();
        self.orders[i - 1].insert(key.clone(), id);
        self.nodes.insert(id, Node::Ordered { sort: i, key, preimage });
        id
    }

    fn check_target(&self, i: usize, iv: &Interval<GenElem>) -> Result<(), SemanticError> {
        if interval_nonempty(self, i, iv) {
            Ok(())
        } else {
            Err(SemanticError::EmptyInterval)
        }
    }

    /// Adds a fresh base point whose `i`-th image lies in `target[i]`.
    pub fn extend_r0(&mut self, target: &MultiInterval<GenElem>) -> Result<GenElem, SemanticError> {
        assert_eq!(target.0.len(), self.n);
        for i in 1..=self.n {
            self.check_target(i, target.sort(i))?;
        }
        let id = self.fresh_id();
        let images = (1..=self.n)
            .map(|i| self.insert_ordered(i, &target.sort(i).lo, Some(id)))
            .collect();
        self.nodes.insert(id, Node::Base { images });
        self.base.push(id);
        Ok(GenElem { sort: Sort::BASE, id })
    }

    /// Adds a fresh point of sort `i` in `(lo, hi)`: a non-image point, or
    /// the `i`-th image of a fresh base point.
    pub fn extend_ri(&mut self, i: usize, within: &Interval<GenElem>, non_image: bool) -> Result<GenElem, SemanticError> {
        self.check_target(i, within)?;
        if non_image {
            let id = self.insert_ordered(i, &within.lo, None);
            Ok(GenElem { sort: Sort(i), id })
        } else {
            let mut target = MultiInterval::full(self.n);
            *target.sort_mut(i) = within.clone();
            let x = self.extend_r0(&target)?;
            Ok(self.apply_f(i, &x))
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn base_points(&self) -> Vec<GenElem> {
        self.base.iter().map(|&id| GenElem { sort: Sort::BASE, id }).collect()
    }

    /// Points of sort `i` in increasing order.
    pub fn sorted_points(&self, i: usize) -> Vec<GenElem> {
        self.orders[i - 1].values().map(|&id| GenElem { sort: Sort(i), id }).collect()
    }

    pub fn dump(&self) -> GenericDump {
        let mut base: Vec<BaseEntry> = self
            .base
            .iter()
            .map(|&id| match &self.nodes[&id] {
                Node::Base { images } => BaseEntry { id, images: images.clone() },
                _ => unreachable!(),
            })
            .collect();
        base.sort_by_key(|b| b.id);
        let sorts = (1..=self.n)
            .map(|i| SortDump {
                sort: i,
                order: self.orders[i - 1]
                    .values()
                    .map(|&id| match &self.nodes[&id] {
                        Node::Ordered { preimage, .. } => OrderedEntry { id, image_of: *preimage },
                        _ => unreachable!(),
                    })
                    .collect(),
            })
            .collect();
        GenericDump {
            n: self.n,
            seed: self.seed,
            next_id: self.next_id,
            base,
            sorts,
        }
    }

    pub fn load(dump: &GenericDump) -> Result<Self, SemanticError> {
        let bad = |m: &str| SemanticError::Element(format!("invalid state dump: {m}"));
        if dump.n == 0 || dump.sorts.len() != dump.n {
            return Err(bad("sort count mismatch"));
        }
        let mut m = GenericModel {
            n: dump.n,
            seed: dump.seed,
            next_id: dump.next_id,
            nodes: HashMap::new(),
            orders: vec![BTreeMap::new(); dump.n],
            base: Vec::new(),
            log: Vec::new(),
        };
        let mut ids: Vec<Id> = Vec::new();
        for b in &dump.base {
            if b.images.len() != dump.n {
                return Err(bad("base point without all images"));
            }
            m.nodes.insert(b.id, Node::Base { images: b.images.clone() });
            m.base.push(b.id);
            ids.push(b.id);
        }
        for (k, s) in dump.sorts.iter().enumerate() {
            if s.sort != k + 1 {
                return Err(bad("sorts out of order"));
            }
            for (pos, e) in s.order.iter().enumerate() {
                let key = BigRational::from_integer(BigInt::from(pos));
                if let Some(pre) = e.image_of {
                    match m.nodes.get(&pre) {
                        Some(Node::Base { images }) if images[k] == e.id => {}
                        _ => return Err(bad("image link does not match its base point")),
                    }
                }
                if m.nodes.insert(e.id, Node::Ordered { sort: s.sort, key: key.clone(), preimage: e.image_of }).is_some() {
                    return Err(bad("duplicate id"));
                }
                m.orders[k].insert(key, e.id);
                ids.push(e.id);
            }
        }
        for b in &dump.base {
            for (k, img) in b.images.iter().enumerate() {
                match m.nodes.get(img) {
                    Some(Node::Ordered { sort, preimage: Some(p), .. }) if *sort == k + 1 && *p == b.id => {}
                    _ => return Err(bad("base point image missing from its sort")),
                }
            }
        }
        if ids.iter().any(|&id| id >= dump.next_id) || !m.nodes.contains_key(&0) {
            return Err(bad("id counter inconsistent"));
        }
        ids.sort_unstable();
        m.log = ids;
        Ok(m)
    }

    /// SHA-256 over the canonical dump.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.dump()).expect("dump serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericDump {
    pub n: usize,
    pub seed: u64,
    pub next_id: Id,
    pub base: Vec<BaseEntry>,
    pub sorts: Vec<SortDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseEntry {
    pub id: Id,
    pub images: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortDump {
    pub sort: usize,
    /// Ids in increasing order.
    pub order: Vec<OrderedEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedEntry {
    pub id: Id,
    pub image_of: Option<Id>,
}

impl Model for GenericModel {
    type Elem = GenElem;
    type Snapshot = GenericSnapshot;

    fn backend_name(&self) -> &'static str {
        "generic"
    }

    fn sorts(&self) -> usize {
        self.n
    }

    fn sort_of(&self, e: &GenElem) -> Sort {
        e.sort
    }

    fn zero(&self) -> GenElem {
        GenElem { sort: Sort::BASE, id: 0 }
    }

    fn compare(&self, i: usize, a: &GenElem, b: &GenElem) -> Ordering {
        assert!(a.sort == Sort(i) && b.sort == Sort(i), "comparison <{i} between {a:?} and {b:?}");
        self.key(a).cmp(self.key(b))
    }

    fn apply_f(&self, i: usize, x: &GenElem) -> GenElem {
        match self.nodes.get(&x.id) {
            Some(Node::Base { images }) if x.sort == Sort::BASE => GenElem { sort: Sort(i), id: images[i - 1] },
            _ => panic!("f{i} applied to {x:?}, which is not a base point of this model"),
        }
    }

    fn apply_g(&self, i: usize, y: &GenElem) -> GenElem {
        match self.nodes.get(&y.id) {
            Some(Node::Ordered { sort, preimage, .. }) if *sort == i && y.sort == Sort(i) => GenElem {
                sort: Sort::BASE,
                id: preimage.unwrap_or(0),
            },
            _ => panic!("g{i} applied to {y:?}, which is not a point of sort R{i}"),
        }
    }

    fn in_image(&self, i: usize, y: &GenElem) -> bool {
        match self.nodes.get(&y.id) {
            Some(Node::Ordered { sort, preimage, .. }) if *sort == i => preimage.is_some(),
            _ => panic!("in_image({i}) on {y:?}"),
        }
    }

    fn sample_multi_interval(&mut self, target: &MultiInterval<GenElem>, _exclude: &[GenElem]) -> GenElem {
        // fresh ids never collide with existing elements
        self.extend_r0(target).expect("sample target must be nonempty")
    }

    fn sample_interval(&mut self, i: usize, within: &Interval<GenElem>, want_image: bool, _exclude: &[GenElem]) -> GenElem {
        self.extend_ri(i, within, !want_image).expect("sample interval must be nonempty")
    }

    fn random_element(&mut self, sort: Sort, rng: &mut dyn RngCore) -> GenElem {
        let existing: Vec<GenElem> = match sort {
            Sort(0) => self.base_points(),
            Sort(i) => self.sorted_points(i),
        };
        if !existing.is_empty() && rng.random_bool(0.4) {
            return existing[rng.random_range(0..existing.len())];
        }
        let mut target = MultiInterval::full(self.n);
        for i in 1..=self.n {
            let pts = self.sorted_points(i);
            let k = rng.random_range(0..=pts.len());
            if k > 0 {
                target.sort_mut(i).lo = Endpoint::At(pts[k - 1]);
            }
        }
        match sort {
            Sort(0) => self.extend_r0(&target).unwrap(),
            Sort(i) => {
                if rng.random_bool(0.5) {
                    self.extend_ri(i, target.sort(i), true).unwrap()
                } else {
                    let x = self.extend_r0(&target).unwrap();
                    self.apply_f(i, &x)
                }
            }
        }
    }

    fn snapshot(&self) -> GenericSnapshot {
        GenericSnapshot {
            log_len: self.log.len(),
            next_id: self.next_id,
        }
    }

    fn restore(&mut self, snap: GenericSnapshot) {
        assert!(snap.log_len <= self.log.len(), "snapshots must be restored in LIFO order");
        while self.log.len() > snap.log_len {
            let id = self.log.pop().unwrap();
            match self.nodes.remove(&id) {
                Some(Node::Ordered { sort, key, .. }) => {
                    self.orders[sort - 1].remove(&key);
                }
                Some(Node::Base { .. }) => {
                    let pos = self.base.iter().rposition(|&b| b == id).expect("base point registered");
                    self.base.remove(pos);
                }
                None => unreachable!("logged id {id} missing"),
            }
        }
        self.next_id = snap.next_id;
    }

    fn render(&self, e: &GenElem) -> String {
        format!("@{}", e.id)
    }

    /// Accepts `@id`, a ground term such as `f1(0)`, or `new` (a fresh point;
    /// off the image for ordered sorts) and `new-image`.
    fn parse_element(&mut self, sort: Sort, text: &str) -> Result<GenElem, SemanticError> {
        let text = text.trim();
        if sort.0 > self.n {
            return Err(SemanticError::Element(format!("sort {sort} out of range")));
        }
        if let Some(rest) = text.strip_prefix('@') {
            let id: Id = rest.parse().map_err(|_| SemanticError::Element(format!("bad element id `{text}`")))?;
            let ok = match self.nodes.get(&id) {
                Some(Node::Base { .. }) => sort == Sort::BASE,
                Some(Node::Ordered { sort: s, .. }) => Sort(*s) == sort,
                None => false,
            };
            return if ok {
                Ok(GenElem { sort, id })
            } else {
                Err(SemanticError::Element(format!("no element {text} of sort {sort}")))
            };
        }
        if text == "new" || text == "new-image" {
            let image = text == "new-image";
            return Ok(match sort {
                Sort(0) => self.extend_r0(&MultiInterval::full(self.n))?,
                Sort(i) => self.extend_ri(i, &Interval::full(), !image)?,
            });
        }
        let t = parse_term(text, self.n, &SortContext::new())
            .map_err(|e| SemanticError::Element(format!("bad element literal `{text}`: {e}")))?;
        if t.sort() != sort {
            return Err(SemanticError::Element(format!("`{text}` has sort {}, expected {sort}", t.sort())));
        }
        crate::model::term_value(self, &t, &Default::default())
    }
}

/// A finite partial isomorphism between substructures of one generic model,
/// extended point by point as in a back-and-forth construction.
#[derive(Clone, Debug, Default)]
pub struct PartialIso {
    map: HashMap<GenElem, GenElem>,
}

impl PartialIso {
    /// The identity on the substructure generated by `0`.
    pub fn new(model: &GenericModel) -> Self {
        let z = model.zero();
        let mut map = HashMap::new();
        map.insert(z, z);
        for i in 1..=model.n {
            let fz = model.apply_f(i, &z);
            map.insert(fz, fz);
        }
        PartialIso { map }
    }

    pub fn get(&self, e: &GenElem) -> Option<GenElem> {
        self.map.get(e).copied()
    }

    fn neighbours(&self, model: &GenericModel, i: usize, b: &GenElem) -> Interval<GenElem> {
        let mut lo: Option<GenElem> = None;
        let mut hi: Option<GenElem> = None;
        for d in self.map.keys().filter(|d| d.sort == Sort(i)) {
            match model.compare(i, d, b) {
                Ordering::Less if lo.is_none_or(|l| model.compare(i, &l, d).is_lt()) => lo = Some(*d),
                Ordering::Greater if hi.is_none_or(|h| model.compare(i, d, &h).is_lt()) => hi = Some(*d),
                _ => {}
            }
        }
        Interval::new(
            lo.map_or(Endpoint::NegInf, |l| Endpoint::At(self.map[&l])),
            hi.map_or(Endpoint::PosInf, |h| Endpoint::At(self.map[&h])),
        )
    }

    /// Extends the map to `b` (and the substructure it generates over the
    /// domain), creating the image point in the model. Returns the image.
    pub fn extend(&mut self, model: &mut GenericModel, b: GenElem) -> GenElem {
        if let Some(c) = self.get(&b) {
            return c;
        }
        match b.sort {
            Sort(0) => {
                let mut target = MultiInterval::full(model.n);
                for i in 1..=model.n {
                    let fb = model.apply_f(i, &b);
                    *target.sort_mut(i) = self.neighbours(model, i, &fb);
                }
                let c = model.extend_r0(&target).expect("partial isomorphism preserves order");
                self.map.insert(b, c);
                for i in 1..=model.n {
                    let (fb, fc) = (model.apply_f(i, &b), model.apply_f(i, &c));
                    self.map.insert(fb, fc);
                }
                c
            }
            Sort(i) if model.in_image(i, &b) => {
                let pre = model.apply_g(i, &b);
                let c = self.extend(model, pre);
                model.apply_f(i, &c)
            }
            Sort(i) => {
                let within = self.neighbours(model, i, &b);
                let c = model.extend_ri(i, &within, true).expect("partial isomorphism preserves order");
                self.map.insert(b, c);
                c
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::axiom_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn initial_state_holds_the_constants() {
        let m = GenericModel::new(2, 0);
        assert_eq!(m.len(), 3);
        let z = m.zero();
        assert_eq!(m.compare(1, &m.apply_f(1, &z), &m.apply_f(1, &z)), Ordering::Equal);
        assert_eq!(m.apply_g(1, &m.apply_f(1, &z)), z);
    }

    #[test]
    fn first_extension_places_images() {
        let mut m = GenericModel::new(2, 0);
        let x = m.extend_r0(&MultiInterval::full(2)).unwrap();
        for i in 1..=2 {
            assert_eq!(m.sorted_points(i).len(), 2);
            assert!(m.in_image(i, &m.apply_f(i, &x)));
        }
    }

    #[test]
    fn insertion_lands_in_requested_gap() {
        let mut m = GenericModel::new(1, 0);
        let z1 = m.apply_f(1, &m.zero());
        let a = m.extend_ri(1, &Interval::above(&z1), false).unwrap();
        let b = m.extend_ri(1, &Interval::between(&z1, &a), true).unwrap();
        assert!(m.compare(1, &z1, &b).is_lt() && m.compare(1, &b, &a).is_lt());
        assert!(!m.in_image(1, &b));
        assert_eq!(m.apply_g(1, &b), m.zero());
        let c = m.extend_ri(1, &Interval::between(&z1, &b), false).unwrap();
        assert!(m.compare(1, &z1, &c).is_lt() && m.compare(1, &c, &b).is_lt());
        assert!(m.in_image(1, &c));
    }

    #[test]
    fn nested_shrinking_targets_stay_sorted() {
        let mut m = GenericModel::new(2, 0);
        let mut lo: Vec<Endpoint<GenElem>> = vec![Endpoint::NegInf, Endpoint::NegInf];
        let mut hi: Vec<Endpoint<GenElem>> = vec![Endpoint::PosInf, Endpoint::PosInf];
        let mut made = Vec::new();
        for k in 0..100 {
            let target = MultiInterval(vec![
                Interval::new(lo[0].clone(), hi[0].clone()),
                Interval::new(lo[1].clone(), hi[1].clone()),
            ]);
            let x = m.extend_r0(&target).unwrap();
            assert!(crate::model::multi_interval_contains(&m, &target, &x));
            made.push(x);
            // alternate which side shrinks
            for i in 1..=2 {
                let fx = m.apply_f(i, &x);
                if k % 2 == 0 {
                    lo[i - 1] = Endpoint::At(fx);
                } else {
                    hi[i - 1] = Endpoint::At(fx);
                }
            }
        }
        made.sort();
        made.dedup();
        assert_eq!(made.len(), 100);
        for i in 1..=2 {
            let pts = m.sorted_points(i);
            assert!(pts.windows(2).all(|w| m.compare(i, &w[0], &w[1]).is_lt()));
        }
    }

    #[test]
    fn alternating_insertions_in_one_gap() {
        let mut m = GenericModel::new(1, 0);
        let z1 = m.apply_f(1, &m.zero());
        let top = m.extend_ri(1, &Interval::above(&z1), true).unwrap();
        let mut inserted = Vec::new();
        for k in 0..10 {
            // always insert just above the previous point
            let lo = inserted.last().copied().unwrap_or(z1);
            let e = m.extend_ri(1, &Interval::between(&lo, &top), k % 2 == 0).unwrap();
            inserted.push(e);
        }
        let flags: Vec<bool> = inserted.iter().map(|e| m.in_image(1, e)).collect();
        assert!(flags.windows(2).all(|w| w[0] != w[1]));
        assert!(inserted.windows(2).all(|w| m.compare(1, &w[0], &w[1]).is_lt()));
    }

    #[test]
    fn snapshot_restore_is_lifo_and_deterministic() {
        let mut m = GenericModel::new(2, 0);
        let s0 = m.snapshot();
        let a = m.extend_r0(&MultiInterval::full(2)).unwrap();
        let s1 = m.snapshot();
        m.extend_ri(1, &Interval::full(), true).unwrap();
        m.restore(s1);
        assert_eq!(m.len(), 6);
        m.restore(s0);
        assert_eq!(m.len(), 3);
        let again = m.extend_r0(&MultiInterval::full(2)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn dump_load_round_trip_and_digest() {
        let mut m = GenericModel::new(2, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let s = Sort(rng.random_range(0..=2));
            m.random_element(s, &mut rng);
        }
        let dump = m.dump();
        let json = serde_json::to_string(&dump).unwrap();
        let back = GenericModel::load(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.dump(), dump);
        assert_eq!(back.digest(), m.digest());
        // loaded models keep working
        let mut back = back;
        let pts = back.sorted_points(1);
        let e = back.extend_ri(1, &Interval::between(&pts[0], &pts[1]), true).unwrap();
        assert!(back.compare(1, &pts[0], &e).is_lt());
    }

    #[test]
    fn same_requests_same_digest() {
        let run = || {
            let mut m = GenericModel::new(3, 5);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..200 {
                let s = Sort(rng.random_range(0..=3));
                m.random_element(s, &mut rng);
            }
            m.digest()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn always_extendable_under_fuzzing() {
        let mut m = GenericModel::new(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut promises: Vec<(usize, GenElem, GenElem)> = Vec::new();
        for _ in 0..10_000 {
            let i = rng.random_range(1..=3);
            let pts = m.sorted_points(i);
            let a = rng.random_range(0..=pts.len());
            let b = rng.random_range(a..=pts.len());
            let lo = if a == 0 { Endpoint::NegInf } else { Endpoint::At(pts[a - 1]) };
            let hi = if b == pts.len() { Endpoint::PosInf } else { Endpoint::At(pts[b]) };
            let iv = Interval::new(lo.clone(), hi.clone());
            let e = m.extend_ri(i, &iv, rng.random_bool(0.5)).unwrap();
            if let Endpoint::At(l) = lo {
                promises.push((i, l, e));
            }
            if let Endpoint::At(h) = hi {
                promises.push((i, e, h));
            }
        }
        for (i, a, b) in promises {
            assert!(m.compare(i, &a, &b).is_lt());
        }
    }

    #[test]
    fn axioms_hold_for_small_n() {
        for n in 1..=3 {
            let mut m = GenericModel::new(n, 3);
            for ax in 1..=5 {
                let report = axiom_check(&mut m, ax, 200, 11).unwrap();
                assert_eq!(report.failures, 0);
            }
        }
    }

    #[test]
    fn partial_isomorphism_preserves_types() {
        let mut m = GenericModel::new(2, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let src: Vec<GenElem> = (0..6)
            .map(|k| m.random_element(Sort(k % 3), &mut rng))
            .collect();
        let mut iso = PartialIso::new(&m);
        let img: Vec<GenElem> = src.iter().map(|&b| iso.extend(&mut m, b)).collect();
        for (a, b) in src.iter().zip(&img) {
            assert_eq!(a.sort, b.sort);
            if a.sort != Sort::BASE {
                let i = a.sort.0;
                assert_eq!(m.in_image(i, a), m.in_image(i, b));
            }
        }
        for i in 1..=2 {
            for (a, ca) in src.iter().zip(&img).filter(|(a, _)| a.sort == Sort(i)) {
                for (b, cb) in src.iter().zip(&img).filter(|(b, _)| b.sort == Sort(i)) {
                    assert_eq!(m.compare(i, a, b), m.compare(i, ca, cb));
                }
            }
        }
    }

    #[test]
    fn element_literals() {
        let mut m = GenericModel::new(2, 0);
        let f10 = m.parse_element(Sort(1), "f1(0)").unwrap();
        assert_eq!(f10, m.apply_f(1, &m.zero()));
        assert_eq!(m.parse_element(Sort(1), &m.render(&f10)).unwrap(), f10);
        assert!(m.parse_element(Sort(2), "@1").is_err());
        let fresh = m.parse_element(Sort(2), "new").unwrap();
        assert!(!m.in_image(2, &fresh));
    }

    #[test]
    #[should_panic]
    fn cross_sort_comparison_is_a_contract_violation() {
        let m = GenericModel::new(2, 0);
        let z = m.zero();
        m.compare(1, &m.apply_f(1, &z), &m.apply_f(2, &z));
    }
}
