#![allow(dead_code)]

use rand::{Rng, RngCore};
use von_core::defsets::{CellId, CellVerdict, DefinableSet, GridBox};
use von_core::model::{odometer, Assignment, Model, SortCell};
use von_core::random::random_qf_formula;
use von_core::syntax::{Formula, Sort, Var};

pub struct SetInstance<E> {
    pub phi: Formula,
    pub x: Var,
    pub params: Assignment<E>,
}

/// A random quantifier-free set `{x : phi}` with `x` of sort `x_sort` and up
/// to `max_params` random parameters.
pub fn random_set<M: Model>(model: &mut M, x_sort: Sort, max_params: usize, rng: &mut dyn RngCore) -> SetInstance<M::Elem> {
    let n = model.sorts();
    loop {
        let k = rng.random_range(1..=max_params);
        let mut params = Assignment::new();
        for j in 0..k {
            let sort = Sort(rng.random_range(0..=n));
            let v = Var::new(format!("p{j}"), sort);
            let e = model.random_element(sort, rng);
            params.insert(v, e);
        }
        let x = Var::new("x", x_sort);
        let mut scope: Vec<Var> = params.keys().cloned().collect();
        scope.push(x.clone());
        scope.push(x.clone());
        let phi = random_qf_formula(n, &scope, 3, rng);
        if phi.free_vars().contains(&x) {
            let used = phi.free_vars();
            let params = params.into_iter().filter(|(v, _)| used.contains(v)).collect();
            return SetInstance { phi, x, params };
        }
    }
}

/// Lexicographically maximal box around `cell`, by exhaustive search over
/// every grid box containing it, with membership evaluated afresh per cell.
pub fn brute_force_maximal<M: Model>(model: &mut M, set: &DefinableSet<M::Elem>, cell: &CellId) -> Result<GridBox, String> {
    let n = set.sorts();
    let dims: Vec<usize> = (1..=n).map(|i| set.arr.gap_count(i)).collect();
    // fresh verdicts for every nonempty cell
    let mut gap_in = std::collections::HashMap::new();
    for gaps in odometer(&dims) {
        let c = CellId(gaps.iter().map(|&g| SortCell::Gap(g)).collect());
        gap_in.insert(gaps, set.cell_member(model, &c) == CellVerdict::In);
    }
    let mut base = Vec::new();
    for b in set.arr.base.clone() {
        let c = set.position(model, &b);
        let pos: Vec<usize> = c
            .0
            .iter()
            .map(|s| match s {
                SortCell::Point(k) => *k,
                SortCell::Gap(_) => unreachable!(),
            })
            .collect();
        base.push((pos, set.cell_member(model, &c) == CellVerdict::In));
    }
    let inside = |bx: &GridBox| {
        gap_in.iter().all(|(g, &v)| v || !g.iter().zip(bx).all(|(&k, &(a, b))| a <= k && k <= b))
            && base.iter().all(|(p, v)| *v || !p.iter().zip(bx).all(|(&k, &(a, b))| a <= k && k < b))
    };
    // candidate ranges per sort containing the cell's coordinate
    let ranges: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|s| {
            let (lo, hi) = match cell.0[s] {
                SortCell::Gap(g) => (g, g),
                SortCell::Point(k) => (k, k + 1),
            };
            let mut out = Vec::new();
            for a in 0..=lo {
                for b in hi..dims[s] {
                    out.push((a, b));
                }
            }
            out
        })
        .collect();
    let counts: Vec<usize> = ranges.iter().map(|r| r.len()).collect();
    let mut feasible: Vec<GridBox> = odometer(&counts)
        .into_iter()
        .map(|ix| ix.iter().enumerate().map(|(s, &k)| ranges[s][k]).collect::<GridBox>())
        .filter(|bx| inside(bx))
        .collect();
    if feasible.is_empty() {
        return Err("no box around the cell lies in the set".into());
    }
    let mut chosen = Vec::new();
    for s in 0..n {
        let best = feasible
            .iter()
            .map(|bx| bx[s])
            .find(|&(a, b)| feasible.iter().all(|bx| a <= bx[s].0 && bx[s].1 <= b))
            .ok_or_else(|| format!("no largest range in sort {}", s + 1))?;
        chosen.push(best);
        feasible.retain(|bx| bx[s] == best);
    }
    Ok(chosen)
}

/// Cells of the arrangement lying in the set and outside the exceptional set.
pub fn interior_cells<E: Clone + Eq + std::hash::Hash + std::fmt::Debug, M: Model<Elem = E>>(
    model: &M,
    set: &DefinableSet<E>,
) -> Vec<CellId> {
    let n = set.sorts();
    let dims: Vec<usize> = (1..=n).map(|i| set.arr.gap_count(i)).collect();
    let mut out = Vec::new();
    for gaps in odometer(&dims) {
        if set.gap_member(&gaps) {
            out.push(CellId(gaps.into_iter().map(SortCell::Gap).collect()));
        }
    }
    for (k, b) in set.arr.base.iter().enumerate() {
        let c = set.position(model, b);
        if set.base_member(k) && !set.is_exceptional(&c) {
            out.push(c);
        }
    }
    out
}

pub mod checks;

pub mod screen {
    use std::cmp::Ordering;
    use std::path::{Path, PathBuf};

    use dashu_float::FBig;
    use dashu_int::ops::Abs;
    use dashu_int::IBig;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};
    use rand::{Rng, RngCore};
    use von_core::field::FieldElem;

    const PREC: usize = 128;

    fn big(x: &BigInt) -> FBig {
        let i: IBig = x.to_string().parse().unwrap();
        FBig::from(i).with_precision(PREC).value()
    }

    fn rat(x: &BigRational) -> FBig {
        big(x.numer()) / big(x.denom())
    }

    /// Sign of `s_i(e)` in 128-bit binary floating point, or `None` when
    /// the magnitude does not exceed a rounding-error bound.
    pub fn float_sign(i: usize, e: &FieldElem) -> Option<Ordering> {
        let two = FBig::from(2u8).with_precision(PREC).value();
        let three = FBig::from(3u8).with_precision(PREC).value();
        let b = if i == 1 { rat(&e.b) } else { -rat(&e.b) };
        let (a, s2, s3) = (rat(&e.a), two.sqrt(), three.sqrt());
        let c = FBig::from(e.c).with_precision(PREC).value();
        let v = &a + &b * &s2 + &c * &s3;
        let mag = a.clone().abs() + b.clone().abs() * &two + c * &two;
        let eps = mag * FBig::from_parts(IBig::ONE, -110);
        if v.clone().abs() <= eps {
            None
        } else if v > FBig::<dashu_float::round::mode::HalfAway>::ZERO {
            Some(Ordering::Greater)
        } else {
            Some(Ordering::Less)
        }
    }

    fn random_rational(rng: &mut dyn RngCore, digits: u32) -> BigRational {
        let bound = BigInt::from(10u8).pow(digits);
        let num = BigInt::from(rng.random_range(-1_000_000_000i64..=1_000_000_000)) * &bound / 1_000_000_000i64
            + rng.random_range(-9i64..=9);
        let den = BigInt::from(rng.random_range(1i64..=1_000_000));
        BigRational::new(num, den)
    }

    /// Random triples, a third of them chosen so that the terms nearly
    /// cancel under the first order.
    pub fn random_triple(rng: &mut dyn RngCore) -> FieldElem {
        let c = rng.random_range(0..=1u8);
        let digits = rng.random_range(0..40);
        let b = random_rational(rng, digits);
        if rng.random_range(0..3) == 0 {
            // a = -(b sqrt2 + c sqrt3) rounded at scale 10^k
            let k = rng.random_range(2..60u32);
            let d = BigInt::from(10u8).pow(k);
            let sq = |m: u32, coef: &BigRational| -> BigInt {
                let scaled = coef * BigRational::from_integer(d.clone());
                let x = scaled.abs().floor().to_integer();
                let r = (BigInt::from(m) * &x * &x).sqrt();
                if coef.is_negative() { -r } else { r }
            };
            let mut a = -sq(2, &b);
            if c == 1 {
                a -= sq(3, &BigRational::from_integer(1.into()));
            }
            return FieldElem::new(BigRational::new(a, d), b, c);
        }
        let a = if rng.random_bool(0.1) {
            BigRational::zero()
        } else {
            let digits = rng.random_range(0..40);
            random_rational(rng, digits)
        };
        FieldElem::new(a, b, c)
    }

    pub fn workspace_root() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
    }

    fn rust_sources(dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                rust_sources(&p, out);
            } else if p.extension().is_some_and(|e| e == "rs") {
                out.push(p);
            }
        }
    }

    /// Lines of library and binary sources that mention a floating-point
    /// type or conversion.
    pub fn float_uses() -> Vec<String> {
        let pattern = regex_lite::Regex::new(r"\bf(32|64)\b|as\s+f(32|64)|\bf(32|64)::").unwrap();
        let mut files = Vec::new();
        for krate in std::fs::read_dir(workspace_root().join("crates")).unwrap() {
            let src = krate.unwrap().path().join("src");
            if src.is_dir() {
                rust_sources(&src, &mut files);
            }
        }
        assert!(!files.is_empty());
        let mut hits = Vec::new();
        for f in files {
            for (k, line) in std::fs::read_to_string(&f).unwrap().lines().enumerate() {
                if pattern.is_match(line) {
                    hits.push(format!("{}:{}: {}", f.display(), k + 1, line.trim()));
                }
            }
        }
        hits
    }
}
