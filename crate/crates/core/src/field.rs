//! The two-order backend over the quadratic field `Q(sqrt2)`.
//!
//! Elements are `a + b*sqrt2 + c*sqrt3` with rational `a`, `b` and
//! `c` in `{0, 1}`. The base sort is the field itself (`c = 0`); the ordered
//! sort `i` carries all such numbers ordered through the embedding `s_i`,
//! where `s_1` fixes `sqrt2`, `s_2` negates it, and both fix `sqrt3`. The
//! `sqrt3` coset is dense and disjoint from the field, which gives the
//! non-image points.
//!
//! All comparisons are exact: a zero test on the coefficients, then
//! interval refinement of `sqrt2` and `sqrt3` until the enclosure of the
//! value excludes zero.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SemanticError;
use crate::model::{Endpoint, Interval, Model, MultiInterval};
use crate::syntax::{parse_term, Sort, SortContext};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// `a + b*sqrt2 + c*sqrt3`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    pub a: BigRational,
    pub b: BigRational,
    /// Coefficient of `sqrt3`, either 0 or 1.
    pub c: u8,
}

impl FieldElem {
    pub fn new(a: BigRational, b: BigRational, c: u8) -> Self {
        assert!(c <= 1, "sqrt3 coefficient must be 0 or 1");
        FieldElem { a, b, c }
    }

    pub fn rational(a: BigRational) -> Self {
        FieldElem::new(a, BigRational::zero(), 0)
    }

    pub fn zero() -> Self {
        FieldElem::rational(BigRational::zero())
    }

    pub fn from_ints(a: i64, b: i64, c: u8) -> Self {
        FieldElem::new(q(a), q(b), c)
    }

    pub fn in_field(&self) -> bool {
        self.c == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{} - {}*sqrt2 + {}*sqrt3", self.a, -&self.b, self.c)
        } else {
            write!(f, "{} + {}*sqrt2 + {}*sqrt3", self.a, self.b, self.c)
        }
    }
}

impl FromStr for FieldElem {
    type Err = SemanticError;

    /// Sums of terms `r`, `r*sqrt2`, `r*sqrt3`, `sqrt2`, `sqrt3` with
    /// rational `r` (`p` or `p/q`), joined by `+` or `-`.
    fn from_str(s: &str) -> Result<Self, SemanticError> {
        let bad = |m: &str| SemanticError::Element(format!("bad field element `{s}`: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for ch in compact.chars() {
            if ch == '+' || ch == '-' {
                if cur.is_empty() {
                    neg ^= ch == '-';
                } else {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = ch == '-';
                }
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));
        let (mut a, mut b, mut c) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
        for (neg, t) in terms {
            if t.is_empty() {
                return Err(bad("dangling sign"));
            }
            let (coef, slot) = if let Some(r) = t.strip_suffix("sqrt2") {
                (r, &mut b)
            } else if let Some(r) = t.strip_suffix("sqrt3") {
                (r, &mut c)
            } else {
                (t.as_str(), &mut a)
            };
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let mut v = if coef.is_empty() {
                BigRational::one()
            } else {
                BigRational::from_str(coef).map_err(|_| bad("bad rational coefficient"))?
            };
            if neg {
                v = -v;
            }
            *slot += v;
        }
        let c = if c.is_zero() {
            0
        } else if c.is_one() {
            1
        } else {
            return Err(bad("sqrt3 coefficient must be 0 or 1"));
        };
        Ok(FieldElem::new(a, b, c))
    }
}

/// JSON form: a triple of exact rational strings.
impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string(), self.c.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b, c] = <[String; 3]>::deserialize(d)?;
        let a = BigRational::from_str(&a).map_err(D::Error::custom)?;
        let b = BigRational::from_str(&b).map_err(D::Error::custom)?;
        let c = match c.as_str() {
            "0" => 0,
            "1" => 1,
            _ => return Err(D::Error::custom("sqrt3 coefficient must be 0 or 1")),
        };
        Ok(FieldElem::new(a, b, c))
    }
}

/// A closed rational window `[lo, hi]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalWindow {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalWindow {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "window bounds out of order");
        RationalWindow { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RationalWindow { lo: x.clone(), hi: x }
    }

    /// Window of width `2^-bits` around `sqrt(m)`, from the integer square
    /// root of `m * 4^bits`.
    pub fn sqrt(m: u32, bits: u32) -> Self {
        let scale = two_pow(bits);
        let s = (BigInt::from(m) * &scale * &scale).sqrt();
        let lo = BigRational::new(s.clone(), scale.clone());
        let hi = BigRational::new(s + 1, scale);
        RationalWindow { lo, hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / q(2)
    }

    /// One bisection step toward `sqrt(m)`; the width halves.
    pub fn refine_sqrt(&mut self, m: u32) {
        let mid = self.mid();
        if &mid * &mid <= q(m as i64) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn add(&self, other: &RationalWindow) -> RationalWindow {
        RationalWindow::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn scale(&self, k: &BigRational) -> RationalWindow {
        if k.is_negative() {
            RationalWindow::new(&self.hi * k, &self.lo * k)
        } else {
            RationalWindow::new(&self.lo * k, &self.hi * k)
        }
    }

    /// The sign of every point in the window, if it is uniform and nonzero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

/// Enclosure of `a + b*sqrt2 + c*sqrt3` with `sqrt2`, `sqrt3` known to
/// `bits` binary digits.
fn enclose(a: &BigRational, b: &BigRational, c: i8, bits: u32) -> RationalWindow {
    let mut w = RationalWindow::point(a.clone());
    if !b.is_zero() {
        w = w.add(&RationalWindow::sqrt(2, bits).scale(b));
    }
    if c != 0 {
        w = w.add(&RationalWindow::sqrt(3, bits).scale(&q(c as i64)));
    }
    w
}

/// `floor(sqrt(m) * 2^bits)`, cached per thread.
fn scaled_isqrt(m: u32, bits: u32) -> BigInt {
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<(u32, u32), BigInt>> = Default::default();
    }
    CACHE.with(|c| {
        c.borrow_mut()
            .entry((m, bits))
            .or_insert_with(|| {
                let scale = two_pow(bits);
                (BigInt::from(m) * &scale * &scale).sqrt()
            })
            .clone()
    })
}

/// Sign of `a + b*sqrt2 + c*sqrt3` for `c` in `{-1, 0, 1}`.
fn sign_parts(a: &BigRational, b: &BigRational, c: i8) -> Ordering {
    // a + b sqrt2 + c sqrt3 = 0 has only the trivial rational solution
    if c == 0 && b.is_zero() {
        return a.cmp(&BigRational::zero());
    }
    // clear denominators: sign(A + B sqrt2 + C sqrt3) with integer A, B, C
    let d = a.denom() * b.denom();
    let big_a = a.numer() * b.denom();
    let big_b = b.numer() * a.denom();
    let big_c = d * BigInt::from(c);
    let mut bits = 24;
    loop {
        // integer enclosure of 2^bits times the value
        let mut lo = &big_a << bits as usize;
        let mut hi = lo.clone();
        for (m, k) in [(2, &big_b), (3, &big_c)] {
            if k.is_zero() {
                continue;
            }
            let s = scaled_isqrt(m, bits);
            let (p, q) = (k * &s, k * (&s + 1));
            if k.is_positive() {
                lo += p;
                hi += q;
            } else {
                lo += q;
                hi += p;
            }
        }
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
    }
}

fn embed_b(i: usize, b: &BigRational) -> BigRational {
    match i {
        1 => b.clone(),
        2 => -b,
        _ => panic!("Q(sqrt2) has two orders; no order {i}"),
    }
}

/// Exact sign of `s_i(e)`.
pub fn sign_under(i: usize, e: &FieldElem) -> Ordering {
    sign_parts(&e.a, &embed_b(i, &e.b), e.c as i8)
}

/// Exact comparison of `s_i(x)` and `s_i(y)`.
pub fn compare_under(i: usize, x: &FieldElem, y: &FieldElem) -> Ordering {
    let b = embed_b(i, &(&x.b - &y.b));
    sign_parts(&(&x.a - &y.a), &b, x.c as i8 - y.c as i8)
}

fn inside(i: usize, iv: &Interval<FieldElem>, x: &FieldElem) -> bool {
    let above = match &iv.lo {
        Endpoint::NegInf => true,
        Endpoint::At(l) => compare_under(i, l, x).is_lt(),
        Endpoint::PosInf => false,
    };
    let below = match &iv.hi {
        Endpoint::PosInf => true,
        Endpoint::At(h) => compare_under(i, x, h).is_lt(),
        Endpoint::NegInf => false,
    };
    above && below
}

pub fn interval_nonempty_under(i: usize, iv: &Interval<FieldElem>) -> bool {
    match (&iv.lo, &iv.hi) {
        (Endpoint::At(l), Endpoint::At(h)) => compare_under(i, l, h).is_lt(),
        (Endpoint::PosInf, _) | (_, Endpoint::NegInf) => false,
        _ => true,
    }
}

/// The rational with the smallest denominator (then numerator) in the open
/// interval `(lo, hi)`; `hi = None` means unbounded above.
fn simplest_between(lo: &BigRational, hi: Option<&BigRational>) -> BigRational {
    if let Some(h) = hi {
        assert!(lo < h, "empty window");
        if lo.is_negative() && h.is_positive() {
            return BigRational::zero();
        }
        if !h.is_positive() {
            return -simplest_between(&-h, Some(&-lo));
        }
    }
    let f = lo.floor();
    let c = &f + BigRational::one();
    if hi.is_none_or(|h| c < *h) {
        return c;
    }
    let h = hi.expect("bounded here");
    // lo and hi share the integer part f
    let top = if lo == &f { None } else { Some((lo - &f).recip()) };
    let y = simplest_between(&(h - &f).recip(), top.as_ref());
    f + y.recip()
}

/// A simple rational `t` and radius `d` with `(t - d, t + d)` strictly inside
/// `iv` under `s_i`.
fn inner_window(i: usize, iv: &Interval<FieldElem>) -> (BigRational, BigRational) {
    let upper_of = |e: &FieldElem, bits| {
        let w = enclose(&e.a, &embed_b(i, &e.b), e.c as i8, bits);
        w.hi
    };
    let lower_of = |e: &FieldElem, bits| {
        let w = enclose(&e.a, &embed_b(i, &e.b), e.c as i8, bits);
        w.lo
    };
    let (lo, hi) = match (&iv.lo, &iv.hi) {
        (Endpoint::NegInf, Endpoint::PosInf) => return (BigRational::zero(), BigRational::one()),
        (Endpoint::At(l), Endpoint::PosInf) => {
            let lo = upper_of(l, 24);
            let t = simplest_between(&lo, None);
            let d = (&t - &lo).min(BigRational::one());
            return (t, d);
        }
        (Endpoint::NegInf, Endpoint::At(h)) => {
            let hi = lower_of(h, 24);
            let t = -simplest_between(&-&hi, None);
            let d = (&hi - &t).min(BigRational::one());
            return (t, d);
        }
        (Endpoint::At(l), Endpoint::At(h)) => {
            let mut bits = 24;
            loop {
                let (lo, hi) = (upper_of(l, bits), lower_of(h, bits));
                if lo < hi {
                    break (lo, hi);
                }
                bits *= 2;
            }
        }
        _ => panic!("interval is empty"),
    };
    let t = simplest_between(&lo, Some(&hi));
    let d = (&t - &lo).min(&hi - &t);
    (t, d)
}

/// A simple rational within `tol` of `sqrt(m) * k`.
fn approx_sqrt_times(m: u32, k: &BigRational, tol: &BigRational) -> BigRational {
    if k.is_zero() {
        return BigRational::zero();
    }
    let mut bits = 16;
    loop {
        let w = RationalWindow::sqrt(m, bits).scale(k);
        if w.width() < *tol {
            return simplest_between(&(&w.hi - tol), Some(&(&w.lo + tol)));
        }
        bits *= 2;
    }
}

/// A field element `x` with `s_1(x)` in `i1` and `s_2(x)` in `i2`, not in
/// `exclude`. Both intervals must be nonempty.
pub fn weak_approx_sample(
    i1: &Interval<FieldElem>,
    i2: &Interval<FieldElem>,
    exclude: &[FieldElem],
) -> Result<FieldElem, SemanticError> {
    if !interval_nonempty_under(1, i1) || !interval_nonempty_under(2, i2) {
        return Err(SemanticError::EmptyInterval);
    }
    let (mut t1, d1) = inner_window(1, i1);
    let (t2, d2) = inner_window(2, i2);
    let mut d = d1.min(d2);
    loop {
        // s_1(x) = a + b sqrt2 ~ t1 and s_2(x) = a - b sqrt2 ~ t2
        let a = (&t1 + &t2) / q(2);
        let b = approx_sqrt_times(2, &((&t1 - &t2) / q(4)), &(&d / q(4)));
        let x = FieldElem::new(a, b, 0);
        if !(inside(1, i1, &x) && inside(2, i2, &x)) {
            d /= q(2);
            continue;
        }
        if exclude.contains(&x) {
            // move to the upper half of the first window
            d /= q(2);
            t1 += &d;
            continue;
        }
        return Ok(x);
    }
}

/// A point `a + sqrt3` with `s_i` value in `iv`, not in `exclude`.
pub fn coset_sample(i: usize, iv: &Interval<FieldElem>, exclude: &[FieldElem]) -> Result<FieldElem, SemanticError> {
    if !interval_nonempty_under(i, iv) {
        return Err(SemanticError::EmptyInterval);
    }
    let (mut t, mut d) = inner_window(i, iv);
    loop {
        let a = &t - approx_sqrt_times(3, &BigRational::one(), &(&d / q(2)));
        let x = FieldElem::new(a, BigRational::zero(), 1);
        if !inside(i, iv, &x) {
            d /= q(2);
            continue;
        }
        if exclude.contains(&x) {
            d /= q(2);
            t += &d;
            continue;
        }
        return Ok(x);
    }
}

/// An element of the backend: a field number tagged with its sort.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldPoint {
    pub sort: Sort,
    pub value: FieldElem,
}

#[derive(Clone, Debug)]
pub struct FieldModel {
    seed: u64,
}

impl FieldModel {
    pub const SORTS: usize = 2;

    pub fn new(n: usize, seed: u64) -> Result<Self, SemanticError> {
        if n != Self::SORTS {
            return Err(SemanticError::UnsupportedSorts { backend: "qsqrt2", n });
        }
        Ok(FieldModel { seed })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(sort: Sort, value: FieldElem) -> FieldPoint {
        assert!(sort.0 <= Self::SORTS);
        assert!(sort.0 > 0 || value.in_field(), "base-sort elements lie in Q(sqrt2)");
        FieldPoint { sort, value }
    }

    fn values(iv: &Interval<FieldPoint>) -> Interval<FieldElem> {
        Interval::new(iv.lo.map(|p| p.value.clone()), iv.hi.map(|p| p.value.clone()))
    }
}

fn random_rational(rng: &mut dyn RngCore) -> BigRational {
    let num: i64 = rng.random_range(-24..=24);
    let den: i64 = *[1, 1, 2, 3, 4, 8].get(rng.random_range(0..6)).unwrap();
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Model for FieldModel {
    type Elem = FieldPoint;
    type Snapshot = ();

    fn backend_name(&self) -> &'static str {
        "qsqrt2"
    }

    fn sorts(&self) -> usize {
        Self::SORTS
    }

    fn sort_of(&self, e: &FieldPoint) -> Sort {
        e.sort
    }

    fn zero(&self) -> FieldPoint {
        FieldModel::point(Sort::BASE, FieldElem::zero())
    }

    fn compare(&self, i: usize, a: &FieldPoint, b: &FieldPoint) -> Ordering {
        assert!(a.sort == Sort(i) && b.sort == Sort(i), "comparison <{i} between {a:?} and {b:?}");
        compare_under(i, &a.value, &b.value)
    }

    fn apply_f(&self, i: usize, x: &FieldPoint) -> FieldPoint {
        assert!(x.sort == Sort::BASE && (1..=2).contains(&i), "f{i} applied to {x:?}");
        FieldPoint { sort: Sort(i), value: x.value.clone() }
    }

    fn apply_g(&self, i: usize, y: &FieldPoint) -> FieldPoint {
        assert!(y.sort == Sort(i), "g{i} applied to {y:?}");
        if y.value.in_field() {
            FieldPoint { sort: Sort::BASE, value: y.value.clone() }
        } else {
            self.zero()
        }
    }

    fn in_image(&self, i: usize, y: &FieldPoint) -> bool {
        assert!(y.sort == Sort(i), "in_image({i}) on {y:?}");
        y.value.in_field()
    }

    fn sample_multi_interval(&mut self, target: &MultiInterval<FieldPoint>, exclude: &[FieldPoint]) -> FieldPoint {
        let ex: Vec<FieldElem> = exclude.iter().filter(|p| p.sort == Sort::BASE).map(|p| p.value.clone()).collect();
        let x = weak_approx_sample(&Self::values(target.sort(1)), &Self::values(target.sort(2)), &ex)
            .expect("sample target must be nonempty");
        FieldModel::point(Sort::BASE, x)
    }

    fn sample_interval(&mut self, i: usize, within: &Interval<FieldPoint>, want_image: bool, exclude: &[FieldPoint]) -> FieldPoint {
        let ex: Vec<FieldElem> = exclude.iter().filter(|p| p.sort == Sort(i)).map(|p| p.value.clone()).collect();
        let iv = Self::values(within);
        let v = if want_image {
            let full = Interval::full();
            let (i1, i2) = if i == 1 { (&iv, &full) } else { (&full, &iv) };
            weak_approx_sample(i1, i2, &ex)
        } else {
            coset_sample(i, &iv, &ex)
        }
        .expect("sample interval must be nonempty");
        FieldModel::point(Sort(i), v)
    }

    fn random_element(&mut self, sort: Sort, rng: &mut dyn RngCore) -> FieldPoint {
        let b = if rng.random_bool(0.3) { BigRational::zero() } else { random_rational(rng) };
        let c = if sort.is_base() { 0 } else { rng.random_range(0..=1u8) };
        FieldModel::point(sort, FieldElem::new(random_rational(rng), b, c))
    }

    fn snapshot(&self) {}

    fn restore(&mut self, _: ()) {}

    fn render(&self, e: &FieldPoint) -> String {
        e.value.to_string()
    }

    /// Accepts the text form, a JSON triple, or a ground term such as `f1(0)`.
    fn parse_element(&mut self, sort: Sort, text: &str) -> Result<FieldPoint, SemanticError> {
        let text = text.trim();
        if sort.0 > Self::SORTS {
            return Err(SemanticError::Element(format!("sort {sort} out of range")));
        }
        let value = if text.starts_with('[') {
            serde_json::from_str::<FieldElem>(text).map_err(|e| SemanticError::Element(format!("bad field element `{text}`: {e}")))?
        } else if text.contains("f") || text.contains("g") {
            let t = parse_term(text, Self::SORTS, &SortContext::new())
                .map_err(|e| SemanticError::Element(format!("bad element literal `{text}`: {e}")))?;
            if t.sort() != sort {
                return Err(SemanticError::Element(format!("`{text}` has sort {}, expected {sort}", t.sort())));
            }
            return crate::model::term_value(self, &t, &Default::default());
        } else {
            text.parse()?
        };
        if sort.is_base() && !value.in_field() {
            return Err(SemanticError::Element(format!("`{text}` is not in Q(sqrt2)")));
        }
        Ok(FieldPoint { sort, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::axiom_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> FieldElem {
        s.parse().unwrap()
    }

    /// Sign of `a + b*sqrt2 + c*sqrt3` by exact squaring, independent of the
    /// refinement route.
    fn algebraic_sign(a: &BigRational, b: &BigRational, c: i8) -> Ordering {
        // sign of p + r*sqrt(m) for rational p, r
        fn sign_pr(p: &BigRational, r: &BigRational, m: i64) -> Ordering {
            let sp = p.cmp(&BigRational::zero());
            let sr = r.cmp(&BigRational::zero());
            if sr == Ordering::Equal || sp == sr {
                return if sp == Ordering::Equal { sr } else { sp };
            }
            if sp == Ordering::Equal {
                return sr;
            }
            // opposite signs: compare p^2 with m r^2
            match (p * p).cmp(&(r * r * q(m))) {
                Ordering::Greater => sp,
                Ordering::Less => sr,
                Ordering::Equal => Ordering::Equal,
            }
        }
        let c = q(c as i64);
        let u = sign_pr(a, b, 2); // sign of a + b sqrt2
        let v = c.cmp(&BigRational::zero());
        if v == Ordering::Equal || u == v || u == Ordering::Equal {
            return if u == Ordering::Equal { v } else { u };
        }
        // opposite signs: compare (a + b sqrt2)^2 = a^2 + 2b^2 + 2ab sqrt2 with 3c^2
        let p = a * a + q(2) * b * b - q(3) * &c * &c;
        let r = q(2) * a * b;
        match sign_pr(&p, &r, 2) {
            Ordering::Greater => u,
            Ordering::Less => v,
            Ordering::Equal => Ordering::Equal,
        }
    }

    #[test]
    fn simplest_rationals() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(simplest_between(&r(1, 3), Some(&r(1, 2))), r(2, 5));
        assert_eq!(simplest_between(&r(-1, 2), Some(&r(1, 2))), r(0, 1));
        assert_eq!(simplest_between(&r(-7, 2), Some(&r(-3, 1))), r(-10, 3));
        assert_eq!(simplest_between(&r(2, 1), None), r(3, 1));
        assert_eq!(simplest_between(&r(3, 1), Some(&r(13, 4))), r(16, 5));
        for (a, b) in [(1, 7), (22, 7), (-5, 9)] {
            let lo = r(a, b);
            let hi = &lo + r(1, 1000);
            let s = simplest_between(&lo, Some(&hi));
            assert!(lo < s && s < hi);
        }
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_under(1, &FieldElem::from_ints(0, 1, 0)), Ordering::Greater);
        assert_eq!(sign_under(2, &FieldElem::from_ints(0, 1, 0)), Ordering::Less);
        assert_eq!(sign_under(1, &FieldElem::from_ints(-1, 0, 1)), Ordering::Greater);
        assert_eq!(sign_under(2, &FieldElem::zero()), Ordering::Equal);
    }

    #[test]
    fn sign_matches_exact_squaring() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3000 {
            let a = random_rational(&mut rng);
            let b = random_rational(&mut rng);
            let c: i8 = rng.random_range(-1..=1);
            assert_eq!(sign_parts(&a, &b, c), algebraic_sign(&a, &b, c), "{a} {b} {c}");
        }
    }

    #[test]
    fn sign_of_near_cancellations() {
        // 99/70 and 577/408 approximate sqrt2 from above
        assert_eq!(sign_under(1, &e("-99/70 + 1*sqrt2 + 0*sqrt3")), Ordering::Less);
        assert_eq!(sign_under(2, &e("99/70 + 1*sqrt2")), Ordering::Greater);
        assert_eq!(sign_under(1, &e("-577/408 + sqrt2")), Ordering::Less);
        // sqrt3 - sqrt2 - 3/10 is about 0.0178
        assert_eq!(sign_under(1, &e("-3/10 - sqrt2 + sqrt3")), Ordering::Greater);
        let close = e("-18817/10864 + sqrt3");
        assert_eq!(sign_under(2, &close), algebraic_sign(&close.a, &close.b, 1));
    }

    #[test]
    fn windows_halve_and_enclose() {
        let mut w = RationalWindow::new(q(1), q(2));
        for _ in 0..20 {
            let before = w.width();
            w.refine_sqrt(2);
            assert_eq!(w.width() * q(2), before);
            assert!(&w.lo * &w.lo <= q(2) && &w.hi * &w.hi >= q(2));
        }
        let s = RationalWindow::sqrt(3, 40);
        assert!(&s.lo * &s.lo <= q(3) && &s.hi * &s.hi > q(3));
    }

    #[test]
    fn text_and_json_round_trip() {
        for s in ["1/2 + -3/4*sqrt2 + 0*sqrt3", "0 + 0*sqrt2 + 1*sqrt3", "-7 - 1/3*sqrt2 + 1*sqrt3"] {
            let x = e(s);
            assert_eq!(e(&x.to_string()), x);
            let json = serde_json::to_string(&x).unwrap();
            assert_eq!(serde_json::from_str::<FieldElem>(&json).unwrap(), x);
        }
        assert_eq!(e("sqrt2").to_string(), "0 + 1*sqrt2 + 0*sqrt3");
        assert_eq!(serde_json::to_string(&e("1/2 - sqrt2")).unwrap(), r#"["1/2","-1","0"]"#);
        assert!("2*sqrt3".parse::<FieldElem>().is_err());
        assert!("x".parse::<FieldElem>().is_err());
    }

    #[test]
    fn orders_differ() {
        let m = FieldModel::new(2, 0).unwrap();
        let x = FieldModel::point(Sort(1), FieldElem::zero());
        let y = FieldModel::point(Sort(1), e("sqrt2"));
        let (x2, y2) = (FieldPoint { sort: Sort(2), ..x.clone() }, FieldPoint { sort: Sort(2), ..y.clone() });
        assert!(m.compare(1, &x, &y).is_lt());
        assert!(m.compare(2, &y2, &x2).is_lt());
    }

    #[test]
    fn image_membership() {
        let m = FieldModel::new(2, 0).unwrap();
        let y = FieldModel::point(Sort(1), e("1 + 1*sqrt3"));
        assert!(!m.in_image(1, &y));
        assert_eq!(m.apply_g(1, &y), m.zero());
        let z = FieldModel::point(Sort(1), e("1 + 2*sqrt2"));
        assert_eq!(m.apply_f(1, &m.apply_g(1, &z)), z);
    }

    #[test]
    fn weak_approx_examples() {
        let iv = |lo: &str, hi: &str| Interval::between(&e(lo), &e(hi));
        let x = weak_approx_sample(&iv("0", "1"), &iv("0", "1"), &[]).unwrap();
        assert!(inside(1, &iv("0", "1"), &x) && inside(2, &iv("0", "1"), &x));
        let x = weak_approx_sample(&iv("0", "1"), &iv("-1", "0"), &[]).unwrap();
        assert!(inside(1, &iv("0", "1"), &x) && inside(2, &iv("-1", "0"), &x));
        assert!(x.b.is_positive());
        let witness = e("0 + 5/14*sqrt2");
        assert!(inside(1, &iv("0", "1"), &witness) && inside(2, &iv("-1", "0"), &witness));
        let y = weak_approx_sample(&iv("0", "1"), &iv("-1", "0"), &[x.clone()]).unwrap();
        assert_ne!(x, y);
        assert!(inside(1, &iv("0", "1"), &y) && inside(2, &iv("-1", "0"), &y));
        assert_eq!(weak_approx_sample(&iv("1", "0"), &iv("0", "1"), &[]), Err(SemanticError::EmptyInterval));
    }

    #[test]
    fn weak_approx_on_tiny_irrational_windows() {
        let a = e("-99/70 + sqrt2");
        let b = e("-577/408 + sqrt2 + 0*sqrt3");
        let (lo, hi) = if compare_under(1, &a, &b).is_lt() { (a, b) } else { (b, a) };
        let i1 = Interval::between(&lo, &hi);
        let i2 = Interval::between(&e("sqrt3"), &e("1/1000000 + sqrt3"));
        let x = weak_approx_sample(&i1, &i2, &[]).unwrap();
        assert!(inside(1, &i1, &x) && inside(2, &i2, &x));
    }

    #[test]
    fn coset_points_are_dense() {
        let iv = Interval::between(&e("1/3"), &e("1/3 + 1/1000"));
        let x = coset_sample(2, &iv, &[]).unwrap();
        assert_eq!(x.c, 1);
        assert!(inside(2, &iv, &x));
        let y = coset_sample(2, &iv, &[x.clone()]).unwrap();
        assert_ne!(x, y);
        assert!(inside(2, &iv, &y));
    }

    #[test]
    fn rejects_other_sort_counts() {
        assert!(matches!(FieldModel::new(3, 0), Err(SemanticError::UnsupportedSorts { n: 3, .. })));
    }

    #[test]
    fn element_literals() {
        let mut m = FieldModel::new(2, 0).unwrap();
        assert!(m.parse_element(Sort(0), "sqrt3").is_err());
        let p = m.parse_element(Sort(2), "f2(0)").unwrap();
        assert_eq!(p, FieldModel::point(Sort(2), FieldElem::zero()));
        let j = m.parse_element(Sort(1), r#"["1/2","3","1"]"#).unwrap();
        assert_eq!(j.value, e("1/2 + 3*sqrt2 + sqrt3"));
    }

    #[test]
    fn axioms_hold() {
        let mut m = FieldModel::new(2, 0).unwrap();
        for ax in 1..=5 {
            let report = axiom_check(&mut m, ax, 100, 3).unwrap();
            assert_eq!(report.failures, 0);
        }
    }
}
