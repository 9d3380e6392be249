use std::io::{IsTerminal, Read};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use von_core::defsets::{arrangement, canonical_decomposition, defining_variable, verify_decomposition};
use von_core::error::{SemanticError, SyntaxError};
use von_core::field::FieldModel;
use von_core::generic::{GenericDump, GenericModel};
use von_core::imaginaries::{code_formula, code_function, code_set, set_variable, FunctionCode, SetCode};
use von_core::model::{axiom_check, eval, eval_qf, Arrangement, Assignment, Model};
use von_core::qe::{decide, eliminate};
use von_core::syntax::{parse_formula_with, Formula, Sort, SortContext, Var};

mod selftest;

#[derive(Parser, Debug)]
#[command(name = "von", version, about = "Decide, eliminate and code definable sets over n dense orders")]
struct Cli {
    #[command(flatten)]
    session: Session,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Session {
    /// Number of ordered sorts.
    #[arg(long, global = true, default_value_t = 2)]
    sorts: usize,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Generic)]
    model: Backend,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Read the formula from this file when none is given on the command line.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Declare the sort of a free variable, e.g. `--var a:R1`.
    #[arg(long = "var", global = true, value_name = "NAME:SORT")]
    vars: Vec<String>,
    /// Load a saved generic-model state before running.
    #[arg(long, global = true)]
    state: Option<PathBuf>,
    /// Write the generic-model state after running.
    #[arg(long, global = true)]
    save_state: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Backend {
    Generic,
    Qsqrt2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct FormulaArg {
    formula: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct Bindings {
    /// Bind a free variable to an element literal, e.g. `--assign a=f1(0)`.
    #[arg(long = "assign", value_name = "NAME=LITERAL")]
    assign: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and sort-check a formula, printing its normal form.
    Parse(FormulaArg),
    /// Eliminate quantifiers.
    Qe(FormulaArg),
    /// Decide a sentence.
    Decide(FormulaArg),
    /// Evaluate a formula in the model under an assignment.
    Eval {
        #[command(flatten)]
        f: FormulaArg,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Canonical decomposition of a definable subset of R0.
    Decompose {
        #[command(flatten)]
        f: FormulaArg,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Canonical code of a definable unary set.
    CodeSet {
        #[command(flatten)]
        f: FormulaArg,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Canonical code of a definable unary function.
    CodeFun {
        #[command(flatten)]
        f: FormulaArg,
        #[command(flatten)]
        bind: Bindings,
        /// The argument variable.
        #[arg(long, default_value = "x")]
        arg: String,
        /// The value variable.
        #[arg(long, default_value = "y")]
        value: String,
    },
    /// Produce witnesses of a unary formula, one per cell of its parameters.
    Sample {
        #[command(flatten)]
        f: FormulaArg,
        #[command(flatten)]
        bind: Bindings,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Randomized check of the axioms against the model.
    Axioms {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Check a single axiom (1 to 5).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        axiom: Option<u8>,
    },
    /// Run the built-in consistency suites.
    Selftest {
        /// Scale factor for the randomized suites.
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error("`{0}` is not a sentence")]
    NotASentence(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Syntax(_) => 1,
            CliError::Semantic(_) | CliError::NotASentence(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

/// What a command prints: a text rendering and a JSON value.
struct Output {
    text: String,
    json: Value,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json }
    }
}

fn read_formula(session: &Session, arg: &FormulaArg) -> Result<String, CliError> {
    if let Some(f) = &arg.formula {
        return Ok(f.clone());
    }
    if let Some(path) = &session.input {
        return std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        });
    }
    let stdin = std::io::stdin();
    if stdin.is_terminal() {
        return Err(CliError::Usage("no formula given (argument, --input FILE or stdin)".into()));
    }
    let mut s = String::new();
    stdin.lock().read_to_string(&mut s).map_err(|source| CliError::Io {
        path: "stdin".into(),
        source,
    })?;
    Ok(s)
}

fn sort_context(session: &Session) -> Result<SortContext, CliError> {
    let mut ctx = SortContext::new();
    for decl in &session.vars {
        let (name, sort) = decl
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("bad --var `{decl}`, expected NAME:SORT")))?;
        let k: usize = sort
            .trim()
            .strip_prefix('R')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| CliError::Usage(format!("bad sort `{sort}` in --var")))?;
        if k > session.sorts {
            return Err(CliError::Usage(format!("sort R{k} exceeds --sorts {}", session.sorts)));
        }
        ctx.insert(name.trim().to_string(), Sort(k));
    }
    Ok(ctx)
}

fn formula(session: &Session, arg: &FormulaArg) -> Result<Formula, CliError> {
    let src = read_formula(session, arg)?;
    Ok(parse_formula_with(src.trim(), session.sorts, &sort_context(session)?)?)
}

fn free_var_json(phi: &Formula) -> Value {
    phi.free_vars()
        .iter()
        .map(|v| json!({"name": v.name, "sort": v.sort.0}))
        .collect::<Vec<_>>()
        .into()
}

/// Interprets `--assign` bindings for the free variables of `phi`, in order.
fn bindings<M: Model>(model: &mut M, phi: &Formula, bind: &Bindings) -> Result<Assignment<M::Elem>, CliError> {
    let free = phi.free_vars();
    let mut asg = Assignment::new();
    for b in &bind.assign {
        let (name, lit) = b
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad --assign `{b}`, expected NAME=LITERAL")))?;
        let var = free
            .iter()
            .find(|v| v.name == name.trim())
            .ok_or_else(|| CliError::Usage(format!("`{}` is not a free variable of the formula", name.trim())))?;
        let e = model.parse_element(var.sort, lit)?;
        asg.insert(var.clone(), e);
    }
    Ok(asg)
}

fn render_assignment<M: Model>(model: &M, asg: &Assignment<M::Elem>) -> (String, Value) {
    let text: Vec<String> = asg.iter().map(|(v, e)| format!("{} = {}", v.name, model.render(e))).collect();
    let json: serde_json::Map<String, Value> = asg.iter().map(|(v, e)| (v.name.clone(), json!(model.render(e)))).collect();
    (text.join(", "), Value::Object(json))
}

fn code_text<M: Model>(model: &M, code: &SetCode<M::Elem>, x: &Var, prefix: &str) -> String {
    let sort_of = |e: &M::Elem| model.sort_of(e);
    let (f, asg) = code_formula(code, x, prefix, &sort_of);
    if asg.is_empty() {
        f.to_string()
    } else {
        format!("{f}\n  where {}", render_assignment(model, &asg).0)
    }
}

fn function_text<M: Model>(model: &M, code: &FunctionCode<M::Elem>, x: &Var) -> String {
    let mut out = Vec::new();
    for (k, r) in code.term_regions.iter().enumerate() {
        if !r.code.is_empty() {
            out.push(format!("{} on {}", r.term, code_text(model, &r.code, x, &format!("t{k}_"))));
        }
    }
    for (k, r) in code.value_regions.iter().enumerate() {
        out.push(format!("{} on {}", model.render(&r.value), code_text(model, &r.code, x, &format!("v{k}_"))));
    }
    out.join("\n")
}

/// Candidate points for `x` over the parameters: the generated points, one
/// non-image point per gap, and one point per product of gaps.
fn witnesses<M: Model>(model: &mut M, phi: &Formula, x: &Var, params: &Assignment<M::Elem>, count: usize) -> Result<Vec<M::Elem>, CliError> {
    let psi = eliminate(phi);
    let values: Vec<M::Elem> = params.values().cloned().collect();
    let arr = Arrangement::of(model, &values);
    let mut found = Vec::new();
    let check = |model: &mut M, found: &mut Vec<M::Elem>, c: M::Elem| -> Result<bool, CliError> {
        if found.contains(&c) {
            return Ok(false);
        }
        let mut asg = params.clone();
        asg.insert(x.clone(), c.clone());
        let hit = eval_qf(model, &psi, &asg)?;
        if hit {
            found.push(c);
        }
        Ok(hit)
    };
    let fixed: Vec<M::Elem> = match x.sort {
        Sort(0) => arr.base.clone(),
        Sort(i) => arr.points(i).to_vec(),
    };
    for c in fixed {
        if found.len() >= count {
            return Ok(found);
        }
        check(model, &mut found, c)?;
    }
    let Sort(i) = x.sort;
    if i > 0 {
        for k in 0..arr.gap_count(i) {
            if found.len() >= count {
                return Ok(found);
            }
            let snap = model.snapshot();
            let c = model.sample_interval(i, &arr.gap(i, k), false, &[]);
            if !check(model, &mut found, c)? {
                model.restore(snap);
            }
        }
    }
    for gaps in arr.gap_tuples() {
        if found.len() >= count {
            break;
        }
        let snap = model.snapshot();
        let y = model.sample_multi_interval(&arr.gap_cell(&gaps), &arr.base);
        let c = match x.sort {
            Sort(0) => y,
            Sort(i) => model.apply_f(i, &y),
        };
        if !check(model, &mut found, c)? {
            model.restore(snap);
        }
    }
    Ok(found)
}

fn run<M: Model>(model: &mut M, session: &Session, command: &Command) -> Result<Output, CliError> {
    let n = session.sorts;
    Ok(match command {
        Command::Parse(f) => {
            let phi = formula(session, f)?;
            Output::new(
                phi.to_string(),
                json!({
                    "formula": phi.to_string(),
                    "free_vars": free_var_json(&phi),
                    "quantifier_depth": phi.quantifier_depth(),
                }),
            )
        }
        Command::Qe(f) => {
            let phi = formula(session, f)?;
            let psi = eliminate(&phi);
            Output::new(psi.to_string(), json!({"input": phi.to_string(), "output": psi.to_string()}))
        }
        Command::Decide(f) => {
            let phi = formula(session, f)?;
            let verdict = decide(&phi).ok_or_else(|| CliError::NotASentence(phi.to_string()))?;
            Output::new(verdict.to_string(), json!({"sentence": phi.to_string(), "verdict": verdict}))
        }
        Command::Eval { f, bind } => {
            let phi = formula(session, f)?;
            let asg = bindings(model, &phi, bind)?;
            let value = eval(model, &phi, &asg)?;
            let (_, a) = render_assignment(model, &asg);
            Output::new(value.to_string(), json!({"formula": phi.to_string(), "assignment": a, "value": value}))
        }
        Command::Decompose { f, bind } => {
            let phi = formula(session, f)?;
            let params = bindings(model, &phi, bind)?;
            let phi = eliminate(&phi);
            let x = defining_variable(&phi, &params)?;
            let set = arrangement(model, &phi, &params)?;
            let dec = canonical_decomposition(model, &set);
            verify_decomposition(model, &set, &dec).map_err(CliError::Check)?;
            let mut j = dec.to_json(model);
            j["variable"] = json!(x.name);
            Output::new(dec.render(model).trim_end().to_string(), j)
        }
        Command::CodeSet { f, bind } => {
            let phi = formula(session, f)?;
            let params = bindings(model, &phi, bind)?;
            let phi = eliminate(&phi);
            let x = set_variable(&phi, &params)?;
            let code = code_set(model, &phi, &params)?;
            let mut j = code.to_json(model);
            j["variable"] = json!(x.name);
            Output::new(code_text(model, &code, &x, "c"), j)
        }
        Command::CodeFun { f, bind, arg, value } => {
            let phi = formula(session, f)?;
            let params = bindings(model, &phi, bind)?;
            let free = phi.free_vars();
            let find = |name: &str| {
                free.iter()
                    .find(|v| v.name == name)
                    .cloned()
                    .ok_or_else(|| CliError::Usage(format!("`{name}` is not a free variable of the formula")))
            };
            let (x, y) = (find(arg)?, find(value)?);
            let code = code_function(model, &phi, &x, &y, &params)?;
            Output::new(function_text(model, &code, &x), code.to_json(model))
        }
        Command::Sample { f, bind, count } => {
            let phi = formula(session, f)?;
            let params = bindings(model, &phi, bind)?;
            let x = set_variable(&phi, &params)?;
            let found = witnesses(model, &phi, &x, &params, *count)?;
            let rendered: Vec<String> = found.iter().map(|e| model.render(e)).collect();
            let text = if rendered.is_empty() { "none".to_string() } else { rendered.join("\n") };
            Output::new(text, json!({"variable": x.name, "witnesses": rendered}))
        }
        Command::Axioms { trials, axiom } => {
            if *trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let which: Vec<u8> = axiom.map_or((1..=5).collect(), |a| vec![a]);
            let mut text = Vec::new();
            let mut reports = Vec::new();
            for a in which {
                let r = axiom_check(model, a, *trials, session.seed).map_err(|f| CliError::Check(f.to_string()))?;
                text.push(r.to_string());
                reports.push(json!({"axiom": r.axiom, "trials": r.trials, "failures": r.failures, "witnesses": r.witnesses}));
            }
            Output::new(
                text.join("\n"),
                json!({"backend": model.backend_name(), "sorts": n, "seed": session.seed, "reports": reports}),
            )
        }
        Command::Selftest { rounds } => {
            let results = selftest::run(session.model == Backend::Qsqrt2, n, session.seed, *rounds);
            let failed: Vec<&selftest::SuiteResult> = results.iter().filter(|r| !r.passed).collect();
            let text: Vec<String> = results.iter().map(|r| r.to_string()).collect();
            if let Some(f) = failed.first() {
                return Err(CliError::Check(format!("{}\nselftest failed in {}", text.join("\n"), f.name)));
            }
            Output::new(
                text.join("\n"),
                json!({"suites": results.iter().map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail})).collect::<Vec<_>>()}),
            )
        }
    })
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let s = &cli.session;
    if s.sorts == 0 {
        return Err(CliError::Usage("--sorts must be at least 1".into()));
    }
    match s.model {
        Backend::Generic => {
            let mut model = match &s.state {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    let dump: GenericDump = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad state file: {e}")))?;
                    if dump.n != s.sorts {
                        return Err(CliError::Usage(format!("state has {} sorts, --sorts is {}", dump.n, s.sorts)));
                    }
                    GenericModel::load(&dump)?
                }
                None => GenericModel::new(s.sorts, s.seed),
            };
            let out = run(&mut model, s, &cli.command)?;
            if let Some(path) = &s.save_state {
                let text = serde_json::to_string_pretty(&model.dump()).expect("dump serializes");
                std::fs::write(path, text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            Ok(out)
        }
        Backend::Qsqrt2 => {
            if s.state.is_some() || s.save_state.is_some() {
                return Err(CliError::Usage("--state and --save-state apply to the generic backend only".into()));
            }
            let mut model = FieldModel::new(s.sorts, s.seed)?;
            run(&mut model, s, &cli.command)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    std::panic::set_hook(Box::new(|info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| info.payload().downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        eprintln!("error: contract violation: {msg}");
    }));
    match catch_unwind(AssertUnwindSafe(|| execute(&cli))) {
        Ok(Ok(out)) => {
            match cli.session.format {
                Format::Text => println!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json output")),
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
