//! Parser for terms, judgments and checking files.
//!
//! ```text
//! term  ::= lam x y. term | Pi (x : term) term | Sig (x : term) term
//!         | app -> term | app
//! app   ::= head arg*
//! head  ::= rec0 (x. term) | rec1 (x. term) arg
//!         | rec2 (x. term) arg arg | recN (x. term) arg arg | arg
//! arg   ::= S arg | Not arg | atom (.1 | .2)*
//! atom  ::= name | #n | digits | U | N | N0 | N1 | N2 | f | w | mw
//!         | f[{…}] | w[{…}] | (term) | (term, term)
//! ```
//!
//! `0` and `1` are the constructors; other digit strings are numerals
//! `S … S 0`. A projection's dot must touch the term before it.

use std::collections::BTreeMap;

use crate::condition::Condition;
use crate::prelude;
use crate::syntax::{Context, Mode, Term};
use crate::typecheck::{Judgment, JudgmentKind, Span};

use super::lexer::{lex, ParseError, Tok, Token};

/// Named closed terms available to the parser.
#[derive(Clone, Debug, Default)]
pub struct Defs {
    map: BTreeMap<String, Term>,
}

impl Defs {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `IsZero`, `MP` and `DNE`.
    pub fn prelude() -> Self {
        let mut d = Self::default();
        d.map.insert("IsZero".into(), prelude::is_zero_fn());
        d.map.insert("MP".into(), prelude::markov());
        d.map.insert("DNE".into(), prelude::double_negation_elim());
        d
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn insert(&mut self, name: String, body: Term) {
        self.map.insert(name, body);
    }
}

const KEYWORDS: &[&str] = &[
    "lam", "Pi", "Sig", "Not", "S", "U", "N", "N0", "N1", "N2", "f", "w", "mw", "rec0", "rec1", "rec2",
    "recN", "def", "check", "at", "mode", "cover", "fuel", "split-depth", "scan-bound",
];

/// Words that end an application spine.
const STOPS: &[&str] = &["def", "check", "at", "mode", "cover", "fuel", "split-depth", "scan-bound"];

pub struct Parser<'d> {
    toks: Vec<Token>,
    pos: usize,
    src_len: usize,
    /// Binder names in scope, outermost first.
    scope: Vec<String>,
    defs: &'d Defs,
}

impl<'d> Parser<'d> {
    pub fn new(src: &str, defs: &'d Defs) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            src_len: src.len(),
            scope: Vec::new(),
            defs,
        })
    }

    pub fn with_scope(mut self, names: Vec<String>) -> Self {
        self.scope = names;
        self
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos) {
            Some(t) => t.span,
            None => {
                let last = self.toks.last().map(|t| t.span);
                Span {
                    start: self.src_len,
                    end: self.src_len,
                    line: last.map_or(1, |s| s.line),
                    column: last.map_or(1, |s| s.column + (s.end - s.start)),
                }
            }
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.span(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn binder_name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "_" || !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("a variable name"),
        }
    }

    fn under<T>(&mut self, name: String, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        self.scope.push(name);
        let r = f(self);
        self.scope.pop();
        r
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Lambda) || self.eat_word("lam") {
            let mut names = vec![self.binder_name()?];
            while !self.eat(&Tok::Dot) {
                names.push(self.binder_name()?);
            }
            return self.lambdas(&names);
        }
        if self.is_word("Pi") || self.is_word("Sig") {
            let pi = self.is_word("Pi");
            self.pos += 1;
            self.expect(&Tok::LParen)?;
            let mut names = vec![self.binder_name()?];
            while !self.eat(&Tok::Colon) {
                names.push(self.binder_name()?);
            }
            let dom = self.term()?;
            self.expect(&Tok::RParen)?;
            return self.telescope(pi, &names, dom, 0);
        }
        let lhs = self.app()?;
        if self.eat(&Tok::Arrow) {
            let cod = self.under("_".into(), |p| p.term())?;
            return Ok(Term::pi(lhs, cod));
        }
        Ok(lhs)
    }

    fn lambdas(&mut self, names: &[String]) -> Result<Term, ParseError> {
        match names.split_first() {
            None => self.term(),
            Some((x, rest)) => {
                let body = self.under(x.clone(), |p| p.lambdas(rest))?;
                Ok(Term::lam(body))
            }
        }
    }

    /// `Pi (x y : A) B` binds each name to `A`, shifted past the earlier names.
    fn telescope(&mut self, pi: bool, names: &[String], dom: Term, shifted: usize) -> Result<Term, ParseError> {
        match names.split_first() {
            None => self.term(),
            Some((x, rest)) => {
                let here = crate::syntax::shift(&dom, shifted);
                let body = self.under(x.clone(), |p| p.telescope(pi, rest, dom, shifted + 1))?;
                Ok(if pi { Term::pi(here, body) } else { Term::sigma(here, body) })
            }
        }
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !STOPS.contains(&s.as_str()) && !matches!(s.as_str(), "lam" | "Pi" | "Sig"),
            Some(Tok::Num(_) | Tok::Raw(_) | Tok::LParen) => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut t = self.head()?;
        while self.starts_arg() {
            if self.is_recursor() {
                let a = self.head()?;
                t = Term::app(t, a);
                break;
            }
            let a = self.arg()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn is_recursor(&self) -> bool {
        ["rec0", "rec1", "rec2", "recN"].iter().any(|w| self.is_word(w))
    }

    fn head(&mut self) -> Result<Term, ParseError> {
        if self.is_recursor() {
            let Some(Token { tok: Tok::Ident(kw), .. }) = self.bump() else { unreachable!() };
            let arity = match kw.as_str() {
                "rec0" => 0,
                "rec1" => 1,
                _ => 2,
            };
            self.expect(&Tok::LParen)?;
            let x = self.binder_name()?;
            self.expect(&Tok::Dot)?;
            let motive = self.under(x, |p| p.term())?;
            self.expect(&Tok::RParen)?;
            let mut args = Vec::new();
            for _ in 0..arity {
                if !self.starts_arg() {
                    return self.unexpected(&format!("{arity} branch argument(s) for `{kw}`"));
                }
                args.push(self.arg()?);
            }
            let mut args = args.into_iter();
            let mut next = || args.next().expect("arity checked");
            return Ok(match kw.as_str() {
                "rec0" => Term::rec_n0(motive),
                "rec1" => Term::rec_n1(motive, next()),
                "rec2" => {
                    let a0 = next();
                    Term::rec_n2(motive, a0, next())
                }
                _ => {
                    let z = next();
                    Term::rec_nat(motive, z, next())
                }
            });
        }
        self.arg()
    }

    fn arg(&mut self) -> Result<Term, ParseError> {
        if self.eat_word("S") {
            let a = self.arg()?;
            return Ok(Term::succ(a));
        }
        if self.eat_word("Not") {
            let a = self.arg()?;
            return Ok(Term::not(a));
        }
        let mut t = self.atom()?;
        // projections: the dot touches the previous token and the digit touches the dot
        while let (Some(Tok::Dot), Some(Tok::Num(n))) = (self.peek(), self.peek_at(1)) {
            let prev_end = self.toks[self.pos - 1].span.end;
            let dot = self.toks[self.pos].span;
            let num = self.toks[self.pos + 1].span;
            if dot.start != prev_end || num.start != dot.end {
                break;
            }
            t = match n {
                1 => Term::fst(t),
                2 => Term::snd(t),
                _ => return Err(ParseError::new(num, "projections are `.1` and `.2`")),
            };
            self.pos += 2;
        }
        Ok(t)
    }

    fn condition_literal(&mut self) -> Result<Condition, ParseError> {
        let span = self.span();
        let Some(Tok::Cond(text)) = self.peek().cloned() else {
            return self.unexpected("a condition like `{0=1}`");
        };
        self.pos += 1;
        text.parse()
            .map_err(|e| ParseError::new(span, format!("bad condition `{text}`: {e}")))
    }

    fn indexed(&mut self) -> Result<Option<Condition>, ParseError> {
        if self.peek() == Some(&Tok::LBracket) && matches!(self.peek_at(1), Some(Tok::Cond(_))) {
            self.pos += 1;
            let q = self.condition_literal()?;
            self.expect(&Tok::RBracket)?;
            return Ok(Some(q));
        }
        Ok(None)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("a term");
        };
        match tok {
            Tok::Num(0) => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Tok::Num(1) => {
                self.pos += 1;
                Ok(Term::One)
            }
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Term::numeral(n))
            }
            Tok::Raw(i) => {
                self.pos += 1;
                Ok(Term::Var(i + self.scope.len()))
            }
            Tok::LParen => {
                self.pos += 1;
                let a = self.term()?;
                if self.eat(&Tok::Comma) {
                    let b = self.term()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Term::pair(a, b));
                }
                self.expect(&Tok::RParen)?;
                Ok(a)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let simple = match name.as_str() {
                    "U" => Some(Term::Universe),
                    "N" => Some(Term::Nat),
                    "N0" => Some(Term::Empty),
                    "N1" => Some(Term::Unit),
                    "N2" => Some(Term::Bool),
                    "mw" => Some(Term::MpWitness),
                    _ => None,
                };
                if let Some(t) = simple {
                    return Ok(t);
                }
                match name.as_str() {
                    "f" => return Ok(self.indexed()?.map_or(Term::Generic, Term::GenericAt)),
                    "w" => return Ok(self.indexed()?.map_or(Term::Axiom, Term::AxiomAt)),
                    _ => {}
                }
                if let Some(i) = self.scope.iter().rev().position(|n| *n == name) {
                    return Ok(Term::Var(i));
                }
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(ParseError::new(span, format!("`{name}` cannot be used here")));
                }
                match self.defs.get(&name) {
                    // definitions are closed, so no shifting is needed
                    Some(t) => Ok(t.clone()),
                    None => Err(ParseError::new(span, format!("unknown name `{name}`"))),
                }
            }
            _ => self.unexpected("a term"),
        }
    }

    /// `[x : A, y : B]`, extending the scope with the names.
    fn context(&mut self) -> Result<(Context, Vec<String>), ParseError> {
        let mut ctx = Context::new();
        let mut names = Vec::new();
        self.expect(&Tok::LBracket)?;
        if self.eat(&Tok::RBracket) {
            return Ok((ctx, names));
        }
        loop {
            let x = self.binder_name()?;
            self.expect(&Tok::Colon)?;
            let ty = self.term()?;
            ctx.push(ty);
            self.scope.push(x.clone());
            names.push(x);
            if self.eat(&Tok::RBracket) {
                return Ok((ctx, names));
            }
            self.expect(&Tok::Comma)?;
        }
    }

    /// `ctx | type A | type A = B | term t : A | term t = u : A`, or the
    /// parenthesized `term(t : A)` / `type(A = B)` spelling.
    fn judgment_kind(&mut self) -> Result<JudgmentKind, ParseError> {
        if self.eat_word("ctx") {
            return Ok(JudgmentKind::CtxWf);
        }
        let is_type = if self.eat_word("type") {
            true
        } else if self.eat_word("term") {
            false
        } else {
            return self.unexpected("`ctx`, `type` or `term`");
        };
        if self.peek() == Some(&Tok::LParen) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(kind) = self.judgment_body(is_type) {
                if self.eat(&Tok::RParen) {
                    return Ok(kind);
                }
            }
            self.pos = save;
        }
        self.judgment_body(is_type)
    }

    fn judgment_body(&mut self, is_type: bool) -> Result<JudgmentKind, ParseError> {
        let first = self.term()?;
        if is_type {
            if self.eat(&Tok::Eq) {
                let rhs = self.term()?;
                return Ok(JudgmentKind::TypeEq { lhs: first, rhs });
            }
            return Ok(JudgmentKind::Type { ty: first });
        }
        if self.eat(&Tok::Eq) {
            let rhs = self.term()?;
            self.expect(&Tok::Colon)?;
            let ty = self.term()?;
            return Ok(JudgmentKind::TermEq { lhs: first, rhs, ty });
        }
        self.expect(&Tok::Colon)?;
        let ty = self.term()?;
        Ok(JudgmentKind::Term { term: first, ty })
    }

    /// The part of a `check` item after the keyword.
    pub fn judgment(&mut self) -> Result<Judgment, ParseError> {
        let outer = self.scope.len();
        let (context, _names) = if self.peek() == Some(&Tok::LBracket) {
            self.context()?
        } else {
            (Context::new(), Vec::new())
        };
        let kind = self.judgment_kind();
        self.scope.truncate(outer);
        let kind = kind?;
        let condition = if self.eat_word("at") {
            self.condition_literal()?
        } else {
            Condition::new()
        };
        let mode = if self.eat_word("mode") {
            let span = self.span();
            match self.bump() {
                Some(Token { tok: Tok::Ident(m), .. }) => m
                    .parse::<Mode>()
                    .map_err(|_| ParseError::new(span, format!("unknown mode `{m}`; use plain, forcing or many-reals")))?,
                _ => return Err(ParseError::new(span, "expected a mode")),
            }
        } else {
            Mode::Plain
        };
        let mut j = Judgment::new(context, condition, mode, kind);
        if self.eat_word("cover") {
            let mut leaves = vec![self.condition_literal()?];
            while matches!(self.peek(), Some(Tok::Cond(_))) {
                leaves.push(self.condition_literal()?);
            }
            j = j.with_cover(leaves);
        }
        Ok(j)
    }
}

/// Parse a closed term with the prelude definitions in scope.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &Defs::prelude(), &[])
}

/// Parse a term whose free names are `names` (outermost first).
pub fn parse_term_with(src: &str, defs: &Defs, names: &[String]) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, defs)?.with_scope(names.to_vec());
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_condition(src: &str) -> Result<Condition, ParseError> {
    let defs = Defs::empty();
    let mut p = Parser::new(src, &defs)?;
    let c = p.condition_literal()?;
    p.expect_end()?;
    Ok(c)
}

/// A `check` item body, e.g. `term (3, 0) : MP at {} mode plain`.
pub fn parse_judgment(src: &str) -> Result<Judgment, ParseError> {
    let defs = Defs::prelude();
    let mut p = Parser::new(src, &defs)?;
    let j = p.judgment()?;
    p.expect_end()?;
    Ok(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub fuel: u64,
    pub max_depth: usize,
    pub scan_bound: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            fuel: crate::reduction::DEFAULT_FUEL,
            max_depth: crate::reduction::DEFAULT_SPLIT_DEPTH,
            scan_bound: crate::semantics::DEFAULT_SCAN_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ItemKind {
    /// `def name : A := t` (checked) or `def name := t` (abbreviation only).
    Def { name: String, ty: Option<Term>, body: Term },
    Check(Judgment),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub span: Span,
    pub kind: ItemKind,
    /// Directives in force at this item.
    pub settings: Settings,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceFile {
    pub items: Vec<Item>,
    /// Directives in force at the end of the file.
    pub settings: Settings,
}

/// Parse a checking file.
pub fn parse_file(src: &str) -> Result<SourceFile, ParseError> {
    let mut defs = Defs::prelude();
    let toks = lex(src)?;
    let mut file = SourceFile::default();
    let mut pos = 0;
    while pos < toks.len() {
        let span = toks[pos].span;
        let word = match &toks[pos].tok {
            Tok::Ident(w) => w.clone(),
            other => {
                return Err(ParseError::new(
                    span,
                    format!("expected `def`, `check` or a directive, found {}", other.describe()),
                ))
            }
        };
        // each item is parsed with its own parser over the remaining tokens
        let mut p = Parser {
            toks: toks.clone(),
            pos: pos + 1,
            src_len: src.len(),
            scope: Vec::new(),
            defs: &defs,
        };
        match word.as_str() {
            "fuel" | "split-depth" | "scan-bound" => {
                let n = match p.bump() {
                    Some(Token { tok: Tok::Num(n), .. }) => n,
                    _ => return Err(ParseError::new(span, format!("`{word}` needs a number"))),
                };
                match word.as_str() {
                    "fuel" => file.settings.fuel = n,
                    "split-depth" => file.settings.max_depth = n as usize,
                    _ => file.settings.scan_bound = n,
                }
                pos = p.pos;
            }
            "def" => {
                let name = p.binder_name()?;
                if defs.contains(&name) {
                    return Err(ParseError::new(span, format!("`{name}` is already defined")));
                }
                let ty = if p.eat(&Tok::Colon) { Some(p.term()?) } else { None };
                p.expect(&Tok::Assign)?;
                let body = p.term()?;
                pos = p.pos;
                let end = toks[pos - 1].span.end;
                defs.insert(name.clone(), body.clone());
                file.items.push(Item {
                    span: Span { end, ..span },
                    kind: ItemKind::Def { name, ty, body },
                    settings: file.settings,
                });
            }
            "check" => {
                let j = p.judgment()?;
                pos = p.pos;
                let end = toks[pos - 1].span.end;
                file.items.push(Item {
                    span: Span { end, ..span },
                    kind: ItemKind::Check(j),
                    settings: file.settings,
                });
            }
            _ => {
                return Err(ParseError::new(
                    span,
                    format!("expected `def`, `check` or a directive, found `{word}`"),
                ))
            }
        }
    }
    Ok(file)
}
