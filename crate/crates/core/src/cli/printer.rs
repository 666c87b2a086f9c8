//! Surface-syntax printing. Output re-parses to the same term.

use std::fmt;

use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::condition::{Partition, SplitTree};
use crate::conversion::{Classifier, ConvProblem};
use crate::syntax::{Context, Mode, Term};
use crate::typecheck::{Judgment, JudgmentKind};

const BINDER: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

/// Print `t` with the innermost `names.len()` free variables named.
///
/// `names` is ordered outermost first, like a context.
pub fn print_in(t: &Term, names: &[String]) -> String {
    let mut p = Printer {
        names: names.to_vec(),
        out: String::new(),
    };
    p.term(t, BINDER);
    p.out
}

/// Default names `x0, x1, …` for a context of length `n`.
pub fn context_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// `[x0 : A, x1 : B]`
pub fn print_context(ctx: &Context, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, ty) in ctx.entries().iter().enumerate() {
        parts.push(format!("{} : {}", names[i], print_in(ty, &names[..i])));
    }
    format!("[{}]", parts.join(", "))
}

/// A judgment in the `check` item syntax, e.g.
/// `[x0 : N] term x0 : N at {} mode plain`.
pub fn print_judgment(j: &Judgment) -> String {
    let names = context_names(j.context.len());
    let t = |t: &Term| print_in(t, &names);
    let mut out = String::new();
    if !j.context.is_empty() {
        out.push_str(&print_context(&j.context, &names));
        out.push(' ');
    }
    out.push_str(&match &j.kind {
        JudgmentKind::CtxWf => "ctx".to_string(),
        JudgmentKind::Type { ty } => format!("type {}", t(ty)),
        JudgmentKind::TypeEq { lhs, rhs } => format!("type {} = {}", t(lhs), t(rhs)),
        JudgmentKind::Term { term, ty } => format!("term {} : {}", t(term), t(ty)),
        JudgmentKind::TermEq { lhs, rhs, ty } => format!("term {} = {} : {}", t(lhs), t(rhs), t(ty)),
    });
    out.push_str(&format!(" at {} mode {}", j.condition, j.mode.name()));
    if let Some(cover) = &j.cover {
        out.push_str(" cover");
        for q in cover {
            out.push_str(&format!(" {q}"));
        }
    }
    out
}

struct Printer {
    names: Vec<String>,
    out: String,
}

impl Printer {
    fn fresh(&self) -> String {
        let mut name = format!("x{}", self.names.len());
        while self.names.contains(&name) {
            name.push('\'');
        }
        name
    }

    fn under<R>(&mut self, name: String, f: impl FnOnce(&mut Self) -> R) -> R {
        self.names.push(name);
        let r = f(self);
        self.names.pop();
        r
    }

    fn open(&mut self, wrap: bool) {
        if wrap {
            self.out.push('(');
        }
    }

    fn close(&mut self, wrap: bool) {
        if wrap {
            self.out.push(')');
        }
    }

    fn term(&mut self, t: &Term, prec: u8) {
        match t {
            Term::Var(i) => {
                let n = self.names.len();
                if *i < n {
                    let name = self.names[n - 1 - i].clone();
                    self.out.push_str(&name);
                } else {
                    self.out.push_str(&format!("#{}", i - n));
                }
            }
            Term::Universe => self.out.push('U'),
            Term::Nat => self.out.push('N'),
            Term::Empty => self.out.push_str("N0"),
            Term::Unit => self.out.push_str("N1"),
            Term::Bool => self.out.push_str("N2"),
            Term::Zero => self.out.push('0'),
            Term::One => self.out.push('1'),
            Term::Succ(inner) => match t.as_numeral() {
                // `1` is the boolean, so the numeral one stays `S 0`
                Some(n) if n >= 2 => self.out.push_str(&n.to_string()),
                _ => {
                    self.open(prec > APP);
                    self.out.push_str("S ");
                    self.term(inner, ATOM);
                    self.close(prec > APP);
                }
            },
            Term::Pi(dom, cod) if !cod.mentions_var(0) => {
                self.open(prec > BINDER);
                self.term(dom, APP);
                self.out.push_str(" -> ");
                let name = self.fresh();
                self.under(name, |p| p.term(cod, BINDER));
                self.close(prec > BINDER);
            }
            Term::Pi(dom, cod) | Term::Sigma(dom, cod) => {
                let kw = if matches!(t, Term::Pi(..)) { "Pi" } else { "Sig" };
                self.open(prec > BINDER);
                let name = self.fresh();
                self.out.push_str(&format!("{kw} ({name} : "));
                self.term(dom, BINDER);
                self.out.push_str(") ");
                self.under(name, |p| p.term(cod, BINDER));
                self.close(prec > BINDER);
            }
            Term::Lam(body) => {
                self.open(prec > BINDER);
                let name = self.fresh();
                self.out.push_str(&format!("lam {name}. "));
                self.under(name, |p| p.term(body, BINDER));
                self.close(prec > BINDER);
            }
            Term::App(head, arg) => {
                self.open(prec > APP);
                self.term(head, APP);
                self.out.push(' ');
                self.term(arg, ATOM);
                self.close(prec > APP);
            }
            Term::Pair(a, b) => {
                self.out.push('(');
                self.term(a, BINDER);
                self.out.push_str(", ");
                self.term(b, BINDER);
                self.out.push(')');
            }
            Term::Fst(e) | Term::Snd(e) => {
                self.term(e, ATOM);
                self.out.push_str(if matches!(t, Term::Fst(_)) { ".1" } else { ".2" });
            }
            Term::RecN0(c) => self.recursor(prec, "rec0", c, &[]),
            Term::RecN1(c, a) => self.recursor(prec, "rec1", c, &[a]),
            Term::RecN2(c, a0, a1) => self.recursor(prec, "rec2", c, &[a0, a1]),
            Term::RecN(c, z, s) => self.recursor(prec, "recN", c, &[z, s]),
            Term::Generic => self.out.push('f'),
            Term::Axiom => self.out.push('w'),
            Term::GenericAt(q) => self.out.push_str(&format!("f[{q}]")),
            Term::AxiomAt(q) => self.out.push_str(&format!("w[{q}]")),
            Term::MpWitness => self.out.push_str("mw"),
        }
    }

    fn recursor(&mut self, prec: u8, kw: &str, motive: &Term, args: &[&Term]) {
        self.open(prec > APP);
        let name = self.fresh();
        self.out.push_str(&format!("{kw} ({name}. "));
        self.under(name, |p| p.term(motive, BINDER));
        self.out.push(')');
        for a in args {
            self.out.push(' ');
            self.term(a, ATOM);
        }
        self.close(prec > APP);
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_in(self, &[]))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_context(self, &context_names(self.len())))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A list of `name : type` strings, each type printed under the earlier names.
impl Serialize for Context {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = context_names(self.len());
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (i, ty) in self.entries().iter().enumerate() {
            seq.serialize_element(&format!("{} : {}", names[i], print_in(ty, &names[..i])))?;
        }
        seq.end()
    }
}

/// Context, condition, mode, `form`, then the form's terms printed under
/// the context names.
impl Serialize for Judgment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = context_names(self.context.len());
        let t = |t: &Term| print_in(t, &names);
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("context", &self.context)?;
        m.serialize_entry("condition", &self.condition)?;
        m.serialize_entry("mode", &self.mode)?;
        match &self.kind {
            JudgmentKind::CtxWf => m.serialize_entry("form", "ctx-wf")?,
            JudgmentKind::Type { ty } => {
                m.serialize_entry("form", "type")?;
                m.serialize_entry("ty", &t(ty))?;
            }
            JudgmentKind::TypeEq { lhs, rhs } => {
                m.serialize_entry("form", "type-eq")?;
                m.serialize_entry("lhs", &t(lhs))?;
                m.serialize_entry("rhs", &t(rhs))?;
            }
            JudgmentKind::Term { term, ty } => {
                m.serialize_entry("form", "term")?;
                m.serialize_entry("term", &t(term))?;
                m.serialize_entry("ty", &t(ty))?;
            }
            JudgmentKind::TermEq { lhs, rhs, ty } => {
                m.serialize_entry("form", "term-eq")?;
                m.serialize_entry("lhs", &t(lhs))?;
                m.serialize_entry("rhs", &t(rhs))?;
                m.serialize_entry("ty", &t(ty))?;
            }
        }
        if let Some(cover) = &self.cover {
            m.serialize_entry("cover", cover)?;
        }
        m.end()
    }
}

/// `{"kind": "type"}` or `{"kind": "term", "type": A}`, with `A` printed
/// under `names`.
struct NamedClassifier<'a>(&'a Classifier, &'a [String]);

impl Serialize for NamedClassifier<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self.0 {
            Classifier::Type => m.serialize_entry("kind", "type")?,
            Classifier::Term(ty) => {
                m.serialize_entry("kind", "term")?;
                m.serialize_entry("type", &print_in(ty, self.1))?;
            }
        }
        m.end()
    }
}

impl Serialize for Classifier {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NamedClassifier(self, &[]).serialize(s)
    }
}

impl Serialize for ConvProblem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = context_names(self.context.len());
        let mut st = s.serialize_struct("ConvProblem", 5)?;
        st.serialize_field("context", &self.context)?;
        st.serialize_field("condition", &self.condition)?;
        st.serialize_field("lhs", &print_in(&self.lhs, &names))?;
        st.serialize_field("rhs", &print_in(&self.rhs, &names))?;
        st.serialize_field("classifier", &NamedClassifier(&self.classifier, &names))?;
        st.end()
    }
}

impl Serialize for Mode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl Serialize for SplitTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SplitTree::Leaf => s.serialize_str("leaf"),
            SplitTree::Split { index, zero, one } => {
                let mut st = s.serialize_struct("Split", 3)?;
                st.serialize_field("index", index)?;
                st.serialize_field("zero", zero)?;
                st.serialize_field("one", one)?;
                st.end()
            }
        }
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Partition", 3)?;
        st.serialize_field("root", self.root())?;
        st.serialize_field("leaves", &self.leaves())?;
        st.serialize_field("tree", self.tree())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude;

    #[test]
    fn prints_markov() {
        assert_eq!(
            prelude::markov().to_string(),
            "Pi (x0 : N -> N2) (((Sig (x1 : N) (lam x2. rec2 (x3. U) N1 N0 x2) (x0 x1)) -> N0) -> N0) -> Sig (x2 : N) (lam x3. rec2 (x4. U) N1 N0 x3) (x0 x2)"
        );
    }

    #[test]
    fn numerals_and_bits() {
        assert_eq!(Term::numeral(3).to_string(), "3");
        assert_eq!(Term::numeral(1).to_string(), "S 0");
        assert_eq!(Term::One.to_string(), "1");
        assert_eq!(Term::app(Term::Generic, Term::numeral(1)).to_string(), "f (S 0)");
    }

    #[test]
    fn projections_and_pairs() {
        let t = Term::lam(Term::fst(Term::Var(0)));
        assert_eq!(t.to_string(), "lam x0. x0.1");
        let t = Term::snd(Term::pair(Term::Zero, Term::One));
        assert_eq!(t.to_string(), "(0, 1).2");
    }

    #[test]
    fn free_variables_use_raw_indices() {
        assert_eq!(Term::lam(Term::Var(2)).to_string(), "lam x0. #1");
    }

    #[test]
    fn context_display() {
        let ctx = Context::from_types(vec![Term::Universe, Term::Var(0)]);
        assert_eq!(ctx.to_string(), "[x0 : U, x1 : x0]");
    }
}
