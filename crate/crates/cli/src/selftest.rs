//! Built-in consistency suites, one model instance per suite, run in
//! parallel threads and reported in a fixed order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use von_core::defsets::{arrangement, canonical_decomposition, verify_decomposition};
use von_core::field::FieldModel;
use von_core::generic::GenericModel;
use von_core::imaginaries::{code_set, round_trip};
use von_core::model::{axiom_check, eval, eval_qf, Assignment, Model};
use von_core::qe::{decide, eliminate};
use von_core::random::{random_assignment, random_formula, random_qf_formula, FormulaShape};
use von_core::syntax::{parse_formula, Sort, Var};

const SENTENCES: &str = include_str!("../../core/tests/data/sentences.suite");

pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{:<15} {verdict}  {}", self.name, self.detail)
    }
}

type Suite = fn(bool, usize, u64, usize) -> Result<String, String>;

macro_rules! on_backend {
    ($field:expr, $n:expr, $seed:expr, |$m:ident| $body:expr) => {
        if $field {
            let mut $m = FieldModel::new($n, $seed).map_err(|e| e.to_string())?;
            $body
        } else {
            let mut $m = GenericModel::new($n, $seed);
            $body
        }
    };
}

fn qe_soundness<M: Model>(m: &mut M, formulas: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = FormulaShape::new(m.sorts());
    let mut checked = 0;
    for _ in 0..formulas {
        let phi = random_formula(&shape, &mut rng);
        let psi = eliminate(&phi);
        for _ in 0..5 {
            let snap = m.snapshot();
            let asg = random_assignment(m, &phi, &mut rng);
            let lhs = eval(m, &phi, &asg).map_err(|e| e.to_string())?;
            let rhs = eval_qf(m, &psi, &asg).map_err(|e| e.to_string())?;
            m.restore(snap);
            if lhs != rhs {
                return Err(format!("{phi} differs from its elimination {psi}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{formulas} formulas, {checked} evaluations"))
}

fn sentence_suite<M: Model>(m: &mut M) -> Result<String, String> {
    let mut count = 0;
    for line in SENTENCES.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (verdict, rest) = line.split_once(char::is_whitespace).ok_or("malformed suite line")?;
        let src = rest.split_once(']').ok_or("missing tag")?.1.trim();
        let expected: bool = verdict.parse().map_err(|_| format!("bad verdict in `{line}`"))?;
        let phi = parse_formula(src, 2).map_err(|e| e.to_string())?;
        if decide(&phi) != Some(expected) {
            return Err(format!("decide disagrees on {phi}"));
        }
        if eval(m, &phi, &Assignment::new()).map_err(|e| e.to_string())? != expected {
            return Err(format!("model disagrees on {phi}"));
        }
        count += 1;
    }
    Ok(format!("{count} sentences"))
}

fn axioms<M: Model>(m: &mut M, trials: usize, seed: u64) -> Result<String, String> {
    for a in 1..=5 {
        axiom_check(m, a, trials, seed).map_err(|f| f.to_string())?;
    }
    Ok(format!("5 axioms x {trials} trials"))
}

fn definable_sets<M: Model>(m: &mut M, count: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.sorts();
    let mut done = 0;
    while done < count {
        let mut params = Assignment::new();
        for j in 0..rng.random_range(1..=2) {
            let sort = Sort(rng.random_range(0..=n));
            let e = m.random_element(sort, &mut rng);
            params.insert(Var::new(format!("p{j}"), sort), e);
        }
        let x = Var::new("x", Sort(rng.random_range(0..=n)));
        let mut scope: Vec<Var> = params.keys().cloned().collect();
        scope.extend([x.clone(), x.clone()]);
        let phi = random_qf_formula(n, &scope, 3, &mut rng);
        if !phi.free_vars().contains(&x) {
            continue;
        }
        let used = phi.free_vars();
        let params: Assignment<M::Elem> = params.into_iter().filter(|(v, _)| used.contains(v)).collect();
        if x.sort.is_base() {
            let set = arrangement(m, &phi, &params).map_err(|e| e.to_string())?;
            let dec = canonical_decomposition(m, &set);
            verify_decomposition(m, &set, &dec).map_err(|e| format!("{phi}: {e}"))?;
        }
        let code = code_set(m, &phi, &params).map_err(|e| e.to_string())?;
        if !round_trip(m, &code, &phi, &params).map_err(|e| e.to_string())? {
            return Err(format!("code of {phi} does not round-trip"));
        }
        done += 1;
    }
    Ok(format!("{count} sets decomposed and coded"))
}

fn suite_qe(field: bool, n: usize, seed: u64, rounds: usize) -> Result<String, String> {
    on_backend!(field, n, seed, |m| qe_soundness(&mut m, 40 * rounds, seed))
}

fn suite_sentences(field: bool, _n: usize, seed: u64, _rounds: usize) -> Result<String, String> {
    on_backend!(field, 2, seed, |m| sentence_suite(&mut m))
}

fn suite_axioms(field: bool, n: usize, seed: u64, rounds: usize) -> Result<String, String> {
    on_backend!(field, n, seed, |m| axioms(&mut m, 200 * rounds, seed))
}

fn suite_sets(field: bool, n: usize, seed: u64, rounds: usize) -> Result<String, String> {
    on_backend!(field, n, seed, |m| definable_sets(&mut m, 20 * rounds, seed))
}

pub fn run(field: bool, n: usize, seed: u64, rounds: usize) -> Vec<SuiteResult> {
    let suites: [(&'static str, Suite); 4] = [
        ("qe-soundness", suite_qe),
        ("sentence-suite", suite_sentences),
        ("axioms", suite_axioms),
        ("definable-sets", suite_sets),
    ];
    std::thread::scope(|s| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&(name, suite)| (name, s.spawn(move || suite(field, n, seed, rounds))))
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| {
                let (passed, detail) = match h.join() {
                    Ok(Ok(d)) => (true, d),
                    Ok(Err(e)) => (false, e),
                    Err(_) => (false, "panicked".to_string()),
                };
                SuiteResult { name, passed, detail }
            })
            .collect()
    })
}
