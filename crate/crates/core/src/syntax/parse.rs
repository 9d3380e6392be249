//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! sort    := "R" digit+ ;  var := ident ":" sort ;
//! term    := "0" | ident | "f" digit+ "(" term ")" | "g" digit+ "(" term ")" ;
//! atom    := term "=" term | term "!=" term | term "<" digit+ term ;
//! formula := atom | "~" formula | formula "&" formula | formula "|" formula
//!          | formula "->" formula | "exists" var "." formula
//!          | "forall" var "." formula | "true" | "false" | "(" formula ")" ;
//! ```
//!
//! Precedence is `~` > `&` > `|` > `->`; `->` associates to the right and a
//! quantifier body extends as far right as possible. Free variables take
//! their sort from the supplied [`SortContext`] or, failing that, from the
//! positions they occur in; a free variable whose sort is never constrained
//! defaults to `R0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{fresh_var, Formula, Sort, Term, Var};
use crate::error::SyntaxError;

/// Declared sorts for free variables.
pub type SortContext = BTreeMap<String, Sort>;

pub fn parse_formula(src: &str, n: usize) -> Result<Formula, SyntaxError> {
    parse_formula_with(src, n, &SortContext::new())
}

pub fn parse_formula_with(src: &str, n: usize, ctx: &SortContext) -> Result<Formula, SyntaxError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, at: 0, src_len: src.len() };
    let raw = p.formula()?;
    p.expect_end()?;
    Elaborator::new(n, ctx).formula(&raw)
}

/// Parses a single term; every variable must be declared in `ctx`.
pub fn parse_term(src: &str, n: usize, ctx: &SortContext) -> Result<Term, SyntaxError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, at: 0, src_len: src.len() };
    let raw = p.term()?;
    p.expect_end()?;
    let mut el = Elaborator::new(n, ctx);
    el.infer_term(&raw, &[]);
    let t = el.build_term(&raw, &[])?;
    t.check(n)?;
    Ok(t)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Colon,
    Dot,
    Eq,
    Neq,
    Lt(usize),
    Tilde,
    Amp,
    Bar,
    Arrow,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            '<' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(SyntaxError::parse(i, "`<` must be followed by a sort index, as in `<1`"));
                }
                let idx = src[i + 1..j]
                    .parse()
                    .map_err(|_| SyntaxError::parse(i, "sort index too large"))?;
                i = j - 1;
                Tok::Lt(idx)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let s = src[i..j].to_string();
                i = j - 1;
                Tok::Num(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
                {
                    j += 1;
                }
                let s = src[i..j].to_string();
                i = j - 1;
                Tok::Ident(s)
            }
            other => return Err(SyntaxError::parse(i, format!("unexpected character `{other}`"))),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

/// `f12` -> Some(('f', 12)).
fn function_symbol(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let head = chars.next()?;
    if head != 'f' && head != 'g' {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().map(|i| (head, i))
}

const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

#[derive(Debug)]
enum RawTerm {
    Zero,
    Ident(String),
    F(usize, Box<RawTerm>),
    G(usize, Box<RawTerm>),
}

#[derive(Debug)]
enum Raw {
    True,
    False,
    Eq(RawTerm, RawTerm),
    Neq(RawTerm, RawTerm),
    Lt(usize, RawTerm, RawTerm),
    Not(Box<Raw>),
    And(Vec<Raw>),
    Or(Vec<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Exists(String, Sort, Box<Raw>),
    Forall(String, Sort, Box<Raw>),
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    at: usize,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.src_len, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(SyntaxError::parse(pos, format!("expected {what}, found {t:?}"))),
            None => Err(SyntaxError::parse(pos, format!("expected {what}, found end of input"))),
        }
    }

    fn expect_end(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(SyntaxError::parse(self.pos(), format!("unexpected trailing {t:?}"))),
        }
    }

    fn formula(&mut self) -> Result<Raw, SyntaxError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Raw::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Raw, SyntaxError> {
        let mut items = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Raw, SyntaxError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::And(items) })
    }

    fn unary(&mut self) -> Result<Raw, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Ident(k)) if k == "exists" || k == "forall" => {
                let is_exists = k == "exists";
                self.bump();
                let (name, sort) = self.binder()?;
                self.expect(Tok::Dot, "`.` after bound variable")?;
                let body = Box::new(self.formula()?);
                Ok(if is_exists {
                    Raw::Exists(name, sort, body)
                } else {
                    Raw::Forall(name, sort, body)
                })
            }
            Some(Tok::Ident(k)) if k == "true" => {
                self.bump();
                Ok(Raw::True)
            }
            Some(Tok::Ident(k)) if k == "false" => {
                self.bump();
                Ok(Raw::False)
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn binder(&mut self) -> Result<(String, Sort), SyntaxError> {
        let pos = self.pos();
        let name = match self.bump() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) && function_symbol(&s).is_none() => s,
            _ => return Err(SyntaxError::parse(pos, "expected a variable name")),
        };
        self.expect(Tok::Colon, "`:` and a sort")?;
        let spos = self.pos();
        match self.bump() {
            Some(Tok::Ident(s)) if s.len() > 1 && s.starts_with('R') && s[1..].bytes().all(|b| b.is_ascii_digit()) => {
                let idx = s[1..].parse().map_err(|_| SyntaxError::parse(spos, "sort index too large"))?;
                Ok((name, Sort(idx)))
            }
            _ => Err(SyntaxError::parse(spos, "expected a sort such as `R0`")),
        }
    }

    fn atom(&mut self) -> Result<Raw, SyntaxError> {
        let lhs = self.term()?;
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Eq) => Ok(Raw::Eq(lhs, self.term()?)),
            Some(Tok::Neq) => Ok(Raw::Neq(lhs, self.term()?)),
            Some(Tok::Lt(i)) => Ok(Raw::Lt(i, lhs, self.term()?)),
            _ => Err(SyntaxError::parse(pos, "expected `=`, `!=` or `<i` after term")),
        }
    }

    fn term(&mut self) -> Result<RawTerm, SyntaxError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(s)) if s == "0" => Ok(RawTerm::Zero),
            Some(Tok::Num(s)) => Err(SyntaxError::parse(pos, format!("`{s}` is not a term; the only constant is 0"))),
            Some(Tok::Ident(s)) => {
                if let Some((head, i)) = function_symbol(&s) {
                    self.expect(Tok::LParen, "`(` after function symbol")?;
                    let arg = Box::new(self.term()?);
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if head == 'f' { RawTerm::F(i, arg) } else { RawTerm::G(i, arg) })
                } else if KEYWORDS.contains(&s.as_str()) {
                    Err(SyntaxError::parse(pos, format!("keyword `{s}` cannot be used as a term")))
                } else {
                    Ok(RawTerm::Ident(s))
                }
            }
            Some(t) => Err(SyntaxError::parse(pos, format!("expected a term, found {t:?}"))),
            None => Err(SyntaxError::parse(pos, "expected a term, found end of input")),
        }
    }
}

/// Sort inference for free identifiers, binder renaming and construction of
/// the typed tree.
struct Elaborator<'a> {
    n: usize,
    ctx: &'a SortContext,
    /// Union-find over free identifiers.
    parent: HashMap<String, String>,
    known: HashMap<String, Sort>,
    free: BTreeSet<String>,
    taken: BTreeSet<Var>,
}

#[derive(Clone)]
enum Ty {
    Known(Sort),
    Free(String),
}

impl<'a> Elaborator<'a> {
    fn new(n: usize, ctx: &'a SortContext) -> Self {
        Elaborator {
            n,
            ctx,
            parent: HashMap::new(),
            known: HashMap::new(),
            free: BTreeSet::new(),
            taken: BTreeSet::new(),
        }
    }

    fn find(&mut self, name: &str) -> String {
        let p = self.parent.get(name).cloned().unwrap_or_else(|| name.to_string());
        if p == name {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(name.to_string(), root.clone());
        root
    }

    fn constrain(&mut self, ty: &Ty, sort: Sort) {
        if let Ty::Free(name) = ty {
            let root = self.find(name);
            self.known.entry(root).or_insert(sort);
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) {
        match (a, b) {
            (Ty::Known(s), t) | (t, Ty::Known(s)) => self.constrain(t, *s),
            (Ty::Free(x), Ty::Free(y)) => {
                let (rx, ry) = (self.find(x), self.find(y));
                if rx != ry {
                    let kx = self.known.get(&rx).copied();
                    self.parent.insert(rx, ry.clone());
                    if let Some(s) = kx {
                        self.known.entry(ry).or_insert(s);
                    }
                }
            }
        }
    }

    fn infer_term(&mut self, t: &RawTerm, scope: &[(String, Var)]) -> Ty {
        match t {
            RawTerm::Zero => Ty::Known(Sort::BASE),
            RawTerm::Ident(name) => {
                if let Some((_, v)) = scope.iter().rev().find(|(s, _)| s == name) {
                    return Ty::Known(v.sort);
                }
                if self.free.insert(name.clone()) {
                    if let Some(&s) = self.ctx.get(name) {
                        self.known.insert(name.clone(), s);
                    }
                }
                Ty::Free(name.clone())
            }
            RawTerm::F(i, arg) => {
                let ty = self.infer_term(arg, scope);
                self.constrain(&ty, Sort::BASE);
                Ty::Known(Sort(*i))
            }
            RawTerm::G(i, arg) => {
                let ty = self.infer_term(arg, scope);
                self.constrain(&ty, Sort(*i));
                Ty::Known(Sort::BASE)
            }
        }
    }

    fn infer(&mut self, phi: &Raw, scope: &mut Vec<(String, Var)>) {
        match phi {
            Raw::True | Raw::False => {}
            Raw::Eq(a, b) | Raw::Neq(a, b) => {
                let (ta, tb) = (self.infer_term(a, scope), self.infer_term(b, scope));
                self.unify(&ta, &tb);
            }
            Raw::Lt(i, a, b) => {
                let (ta, tb) = (self.infer_term(a, scope), self.infer_term(b, scope));
                self.constrain(&ta, Sort(*i));
                self.constrain(&tb, Sort(*i));
            }
            Raw::Not(p) => self.infer(p, scope),
            Raw::And(ps) | Raw::Or(ps) => ps.iter().for_each(|p| self.infer(p, scope)),
            Raw::Implies(a, b) => {
                self.infer(a, scope);
                self.infer(b, scope);
            }
            Raw::Exists(name, sort, body) | Raw::Forall(name, sort, body) => {
                scope.push((name.clone(), Var::new(name.clone(), *sort)));
                self.infer(body, scope);
                scope.pop();
            }
        }
    }

    fn free_sort(&mut self, name: &str) -> Sort {
        let root = self.find(name);
        self.known.get(&root).copied().unwrap_or(Sort::BASE)
    }

    fn build_term(&mut self, t: &RawTerm, scope: &[(String, Var)]) -> Result<Term, SyntaxError> {
        Ok(match t {
            RawTerm::Zero => Term::Zero,
            RawTerm::Ident(name) => match scope.iter().rev().find(|(s, _)| s == name) {
                Some((_, v)) => Term::Var(v.clone()),
                None => Term::Var(Var::new(name.clone(), self.free_sort(name))),
            },
            RawTerm::F(i, a) => Term::f(*i, self.build_term(a, scope)?),
            RawTerm::G(i, a) => Term::g(*i, self.build_term(a, scope)?),
        })
    }

    fn build(&mut self, phi: &Raw, scope: &mut Vec<(String, Var)>) -> Result<Formula, SyntaxError> {
        Ok(match phi {
            Raw::True => Formula::True,
            Raw::False => Formula::False,
            Raw::Eq(a, b) => Formula::Eq(self.build_term(a, scope)?, self.build_term(b, scope)?),
            Raw::Neq(a, b) => Formula::Neq(self.build_term(a, scope)?, self.build_term(b, scope)?),
            Raw::Lt(i, a, b) => Formula::Lt(*i, self.build_term(a, scope)?, self.build_term(b, scope)?),
            Raw::Not(p) => Formula::not(self.build(p, scope)?),
            Raw::And(ps) => Formula::And(ps.iter().map(|p| self.build(p, scope)).collect::<Result<_, _>>()?),
            Raw::Or(ps) => Formula::Or(ps.iter().map(|p| self.build(p, scope)).collect::<Result<_, _>>()?),
            Raw::Implies(a, b) => Formula::implies(self.build(a, scope)?, self.build(b, scope)?),
            Raw::Exists(name, sort, body) | Raw::Forall(name, sort, body) => {
                let clashes = self.free.contains(name) || scope.iter().any(|(s, _)| s == name);
                let var = if clashes {
                    let v = fresh_var(name, *sort, &self.taken);
                    self.taken.insert(v.clone());
                    v
                } else {
                    Var::new(name.clone(), *sort)
                };
                scope.push((name.clone(), var.clone()));
                let b = self.build(body, scope);
                scope.pop();
                let b = b?;
                if matches!(phi, Raw::Exists(..)) {
                    Formula::exists(var, b)
                } else {
                    Formula::forall(var, b)
                }
            }
        })
    }

    fn collect_names(phi: &Raw, out: &mut BTreeSet<String>) {
        fn term(t: &RawTerm, out: &mut BTreeSet<String>) {
            match t {
                RawTerm::Zero => {}
                RawTerm::Ident(s) => {
                    out.insert(s.clone());
                }
                RawTerm::F(_, a) | RawTerm::G(_, a) => term(a, out),
            }
        }
        match phi {
            Raw::True | Raw::False => {}
            Raw::Eq(a, b) | Raw::Neq(a, b) | Raw::Lt(_, a, b) => {
                term(a, out);
                term(b, out);
            }
            Raw::Not(p) => Self::collect_names(p, out),
            Raw::And(ps) | Raw::Or(ps) => ps.iter().for_each(|p| Self::collect_names(p, out)),
            Raw::Implies(a, b) => {
                Self::collect_names(a, out);
                Self::collect_names(b, out);
            }
            Raw::Exists(s, _, b) | Raw::Forall(s, _, b) => {
                out.insert(s.clone());
                Self::collect_names(b, out);
            }
        }
    }

    fn formula(mut self, raw: &Raw) -> Result<Formula, SyntaxError> {
        let mut names = BTreeSet::new();
        Self::collect_names(raw, &mut names);
        names.extend(self.ctx.keys().cloned());
        self.taken = names.into_iter().map(|s| Var::new(s, Sort::BASE)).collect();
        self.infer(raw, &mut Vec::new());
        let phi = self.build(raw, &mut Vec::new())?;
        phi.check(self.n)?;
        Ok(phi)
    }
}
