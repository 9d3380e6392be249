//! Randomized and example-driven checks shared by the focused test files and
//! the acceptance target. Each check panics with a description on failure.

use std::cmp::Ordering;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use von_core::defsets::{arrangement, canonical_decomposition, verify_decomposition};
use von_core::field::{compare_under, interval_nonempty_under, weak_approx_sample, FieldElem, FieldModel};
use von_core::generic::GenericModel;
use von_core::imaginaries::{code_formula, code_function, code_set, round_trip, verify_partition, verify_regions, FunctionCode, SetCode};
use von_core::model::{eval, eval_qf, term_value, Assignment, Endpoint, Interval, Model};
use von_core::qe::{decide, eliminate};
use von_core::random::{equivalent_presentation, random_assignment, random_formula, FormulaShape};
use von_core::syntax::{parse_formula, parse_formula_with, Formula, Sort, SortContext, Term, Var};

use super::{brute_force_maximal, interior_cells, random_set};

/// eval(phi) = eval_qf(eliminate(phi)) on random formulas and assignments.
/// Returns the number of comparisons made.
pub fn qe_soundness<M: Model>(model: &mut M, formulas: usize, assignments: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = FormulaShape::new(model.sorts());
    let mut checked = 0;
    for k in 0..formulas {
        let phi = random_formula(&shape, &mut rng);
        let psi = eliminate(&phi);
        assert!(psi.is_quantifier_free());
        assert!(psi.free_vars().is_subset(&phi.free_vars()), "{phi} -> {psi}");
        for _ in 0..assignments {
            let snap = model.snapshot();
            let asg = random_assignment(model, &phi, &mut rng);
            let lhs = eval(model, &phi, &asg).unwrap();
            let rhs = eval_qf(model, &psi, &asg).unwrap();
            assert_eq!(lhs, rhs, "formula #{k}: {phi}\n  eliminated: {psi}\n  assignment: {asg:?}");
            model.restore(snap);
            checked += 1;
        }
    }
    checked
}

pub struct SuiteEntry {
    pub expected: bool,
    pub tag: String,
    pub sentence: Formula,
}

pub fn sentence_suite() -> Vec<SuiteEntry> {
    include_str!("../data/sentences.suite")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (verdict, rest) = l.split_once(char::is_whitespace).unwrap();
            let rest = rest.trim_start();
            let close = rest.find(']').unwrap();
            let sentence = parse_formula(rest[close + 1..].trim(), 2).unwrap_or_else(|e| panic!("{l}: {e}"));
            SuiteEntry {
                expected: verdict.parse().unwrap(),
                tag: rest[1..close].to_string(),
                sentence,
            }
        })
        .collect()
}

/// decide, field evaluation and the expected verdict agree on every suite
/// sentence. Returns the suite size.
pub fn suite_agreement() -> usize {
    let suite = sentence_suite();
    let mut field = FieldModel::new(2, 0).unwrap();
    for e in &suite {
        assert!(["PAPER", "TRIVIAL", "DERIVED"].contains(&e.tag.as_str()), "bad tag {}", e.tag);
        assert!(e.sentence.free_vars().is_empty(), "{} is not a sentence", e.sentence);
        assert_eq!(decide(&e.sentence), Some(e.expected), "decide on {}", e.sentence);
        assert_eq!(eval(&mut field, &e.sentence, &Assignment::new()).unwrap(), e.expected, "field eval on {}", e.sentence);
    }
    suite.len()
}

fn random_endpoint(rng: &mut dyn RngCore) -> FieldElem {
    let small = |rng: &mut dyn RngCore| {
        let num = rng.random_range(-40i64..=40);
        let den = rng.random_range(1i64..=12);
        num_rational::BigRational::new(num.into(), den.into())
    };
    let c = rng.random_range(0..=1u8);
    FieldElem::new(small(rng), small(rng), c)
}

/// A nonempty interval under order `i`, sometimes a ray, sometimes very thin.
fn random_interval(i: usize, rng: &mut dyn RngCore) -> Interval<FieldElem> {
    loop {
        let lo = random_endpoint(rng);
        let hi = if rng.random_bool(0.3) {
            // thin: lo + 10^-k
            let k = rng.random_range(3..30u32);
            let eps = num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(10u8).pow(k));
            let mut hi = lo.clone();
            hi.a += eps;
            hi
        } else {
            random_endpoint(rng)
        };
        let (lo, hi) = match compare_under(i, &lo, &hi) {
            Ordering::Less => (lo, hi),
            Ordering::Greater => (hi, lo),
            Ordering::Equal => continue,
        };
        let iv = match rng.random_range(0..8) {
            0 => Interval::new(Endpoint::At(lo), Endpoint::PosInf),
            1 => Interval::new(Endpoint::NegInf, Endpoint::At(hi)),
            _ => Interval::between(&lo, &hi),
        };
        assert!(interval_nonempty_under(i, &iv));
        return iv;
    }
}

fn strictly_inside(i: usize, iv: &Interval<FieldElem>, x: &FieldElem) -> bool {
    let above = match &iv.lo {
        Endpoint::At(l) => compare_under(i, l, x) == Ordering::Less,
        _ => true,
    };
    let below = match &iv.hi {
        Endpoint::At(h) => compare_under(i, x, h) == Ordering::Less,
        _ => true,
    };
    above && below
}

/// weak_approx_sample returns an exactly verified witness on random pairs.
pub fn weak_approximation(pairs: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let (i1, i2) = (random_interval(1, &mut rng), random_interval(2, &mut rng));
        let x = weak_approx_sample(&i1, &i2, &[]).unwrap_or_else(|e| panic!("pair #{k}: {e}"));
        assert_eq!(x.c, 0);
        assert!(strictly_inside(1, &i1, &x) && strictly_inside(2, &i2, &x), "pair #{k}: witness {x} misses the target");
        let y = weak_approx_sample(&i1, &i2, std::slice::from_ref(&x)).unwrap();
        assert!(y != x && strictly_inside(1, &i1, &y) && strictly_inside(2, &i2, &y), "pair #{k}: exclusion");
    }
    pairs
}

/// Serialized decompositions agree on random equivalent presentations.
pub fn decomposition_pairs(pairs: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let n = 1 + k % 3;
        let mut m = GenericModel::new(n, 0);
        let inst = random_set(&mut m, Sort::BASE, 3, &mut rng);
        let set = arrangement(&mut m, &inst.phi, &inst.params).unwrap();
        let dec = canonical_decomposition(&m, &set);
        verify_decomposition(&mut m, &set, &dec).unwrap_or_else(|e| panic!("{}: {e}", inst.phi));
        let (phi2, params2) = equivalent_presentation(&mut m, &inst.phi, &inst.x, &inst.params, &mut rng);
        let set2 = arrangement(&mut m, &phi2, &params2).unwrap();
        let dec2 = canonical_decomposition(&m, &set2);
        verify_decomposition(&mut m, &set2, &dec2).unwrap_or_else(|e| panic!("{phi2}: {e}"));
        assert_eq!(dec.to_json(&m).to_string(), dec2.to_json(&m).to_string(), "{} vs {}", inst.phi, phi2);
    }
    pairs
}

/// maximal boxes agree with exhaustive search on instances with at most
/// three endpoints per sort. Returns the number of cells compared.
pub fn maximal_oracle(instances: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut cells) = (0, 0);
    while done < instances {
        let n = 1 + done % 3;
        let mut m = GenericModel::new(n, 0);
        let inst = random_set(&mut m, Sort::BASE, 2, &mut rng);
        let set = arrangement(&mut m, &inst.phi, &inst.params).unwrap();
        if (1..=n).any(|i| set.arr.points(i).len() > 3) {
            continue;
        }
        for cell in interior_cells(&m, &set) {
            let expect = brute_force_maximal(&mut m, &set, &cell).unwrap_or_else(|e| panic!("{}: {e}", inst.phi));
            assert_eq!(set.maximal_box(&cell), expect, "phi = {}, cell {cell:?}", inst.phi);
            cells += 1;
        }
        done += 1;
    }
    cells
}

/// SetCodes agree on random equivalent presentations, and each code
/// re-expands to a formula equivalent to the original.
pub fn set_code_pairs(x_sort: impl Fn(usize, &mut dyn RngCore) -> Sort, pairs: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let n = 1 + k % 3;
        let mut m = GenericModel::new(n, 0);
        let sort = x_sort(n, &mut rng);
        let inst = random_set(&mut m, sort, 3, &mut rng);
        let c1 = code_set(&mut m, &inst.phi, &inst.params).unwrap();
        let (phi2, params2) = equivalent_presentation(&mut m, &inst.phi, &inst.x, &inst.params, &mut rng);
        let c2 = code_set(&mut m, &phi2, &params2).unwrap();
        assert_eq!(c1, c2, "{} vs {}", inst.phi, phi2);
        assert_eq!(c1.to_json(&m).to_string(), c2.to_json(&m).to_string());
        assert!(round_trip(&mut m, &c1, &inst.phi, &inst.params).unwrap(), "round trip of {}", inst.phi);
    }
    pairs
}

pub fn base_sort(_: usize, _: &mut dyn RngCore) -> Sort {
    Sort::BASE
}

pub fn ordered_sort(n: usize, rng: &mut dyn RngCore) -> Sort {
    Sort(rng.random_range(1..=n))
}

pub struct FunctionExample {
    pub src: &'static str,
    pub x: usize,
    pub y: usize,
}

pub const FUNCTION_EXAMPLES: [FunctionExample; 3] = [
    FunctionExample { src: "y = f1(x)", x: 0, y: 1 },
    FunctionExample { src: "y = f1(0)", x: 0, y: 1 },
    FunctionExample {
        src: "(f1(x) <1 f1(0) & y = f1(x)) | (~(f1(x) <1 f1(0)) & y = f1(0))",
        x: 0,
        y: 1,
    },
];

pub fn example_formula(ex: &FunctionExample) -> (Formula, Var, Var) {
    let mut ctx = SortContext::new();
    ctx.insert("x".into(), Sort(ex.x));
    ctx.insert("y".into(), Sort(ex.y));
    let phi = parse_formula_with(ex.src, 2, &ctx).unwrap();
    (phi, Var::new("x", Sort(ex.x)), Var::new("y", Sort(ex.y)))
}

/// Draws up to `want` members of each region and checks that `phi` holds
/// at the region's term or value there. Returns the sample counts.
pub fn sample_regions<M: Model>(
    model: &mut M,
    code: &FunctionCode<M::Elem>,
    phi: &Formula,
    x: &Var,
    y: &Var,
    want: usize,
    rng: &mut dyn RngCore,
) -> Vec<usize> {
    let mut regions: Vec<(Formula, Assignment<M::Elem>, Option<Term>, Option<M::Elem>)> = Vec::new();
    for (k, r) in code.term_regions.iter().enumerate() {
        let sort_of = |e: &M::Elem| model.sort_of(e);
        let (f, asg) = code_formula(&r.code, x, &format!("t{k}_"), &sort_of);
        regions.push((f, asg, Some(r.term.clone()), None));
    }
    for (k, r) in code.value_regions.iter().enumerate() {
        let sort_of = |e: &M::Elem| model.sort_of(e);
        let (f, asg) = code_formula(&r.code, x, &format!("v{k}_"), &sort_of);
        regions.push((f, asg, None, Some(r.value.clone())));
    }
    let mut counts = vec![0; regions.len()];
    let mut candidates: Vec<M::Elem> = Vec::new();
    for r in code.regions() {
        for c in r.coordinates() {
            if model.sort_of(&c) == x.sort {
                candidates.push(c);
            }
        }
    }
    candidates.push(model.zero());
    let mut attempts = 0;
    while attempts < 4000 && counts.iter().any(|&c| c < want) {
        let e = candidates.pop().unwrap_or_else(|| model.random_element(x.sort, rng));
        attempts += 1;
        for (k, (f, asg, term, value)) in regions.iter().enumerate() {
            let mut asg = asg.clone();
            asg.insert(x.clone(), e.clone());
            if counts[k] >= want || !eval_qf(model, f, &asg).unwrap() {
                continue;
            }
            let out = match (term, value) {
                (Some(t), _) => term_value(model, t, &asg).unwrap(),
                (_, Some(v)) => v.clone(),
                _ => unreachable!(),
            };
            asg.insert(y.clone(), out);
            assert!(eval_qf(model, phi, &asg).unwrap(), "region {k} disagrees with phi at {}", model.render(&e));
            counts[k] += 1;
        }
    }
    counts
}

/// Codes the three example functions: partition, agreement, per-region
/// round trip, and 50 samples per infinite region.
pub fn function_examples<M: Model>(model: &mut M, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let none = Assignment::new();
    for ex in &FUNCTION_EXAMPLES {
        let (phi, x, y) = example_formula(ex);
        let code = code_function(model, &phi, &x, &y, &none).unwrap();
        verify_partition(model, &code).unwrap_or_else(|e| panic!("{}: {e}", ex.src));
        verify_regions(model, &code, &phi, &x, &y, &none).unwrap_or_else(|e| panic!("{}: {e}", ex.src));
        for r in code.regions() {
            let sort_of = |e: &M::Elem| model.sort_of(e);
            let (f, asg) = code_formula(r, &x, "c_", &sort_of);
            let xt = Term::Var(x.clone());
            let f = Formula::And(vec![f, Formula::Eq(xt.clone(), xt)]);
            assert_eq!(&code_set(model, &f, &asg).unwrap(), r, "{}: region code does not round-trip", ex.src);
        }
        let counts = sample_regions(model, &code, &phi, &x, &y, 50, &mut rng);
        for (r, c) in code.regions().zip(&counts) {
            let infinite = match r {
                SetCode::Base(b) => !b.intervals.is_empty(),
                SetCode::Ordered { image, non_image, .. } => !image.intervals.is_empty() || !non_image.runs.is_empty(),
            };
            if infinite {
                assert_eq!(*c, 50, "{}: infinite region undersampled", ex.src);
            } else if !r.is_empty() {
                assert!(*c >= 1, "{}: finite region never sampled", ex.src);
            }
        }
    }
    FUNCTION_EXAMPLES.len()
}
