//! Terms, contexts and substitution.
//!
//! Binders use de Bruijn indices: `Var(0)` is the innermost bound variable.
//! Recursor motives `rec (λx. C)` store only the body `C`, which lives under
//! one binder.

use std::fmt;

use thiserror::Error;

use crate::condition::{Bit, Condition};

/// Abstract syntax of the calculus, including the forcing constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    /// `rec_N0 (λx. C)`
    RecN0(Box<Term>),
    /// `rec_N1 (λx. C) a`
    RecN1(Box<Term>, Box<Term>),
    /// `rec_N2 (λx. C) a0 a1`
    RecN2(Box<Term>, Box<Term>, Box<Term>),
    /// `rec_N (λx. C) z s`
    RecN(Box<Term>, Box<Term>, Box<Term>),
    Universe,
    Nat,
    Empty,
    Unit,
    Bool,
    /// `0`, shared by `N`, `N1` and `N2`.
    Zero,
    /// `1 : N2`
    One,
    Succ(Box<Term>),
    Pi(Box<Term>, Box<Term>),
    Lam(Box<Term>),
    App(Box<Term>, Box<Term>),
    Sigma(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    /// The generic point `f : N -> N2`.
    Generic,
    /// The axiom `w : ¬¬Σ(x:N) IsZero (f x)`.
    Axiom,
    /// `f_q`, one generic point per condition.
    GenericAt(Condition),
    /// `w_q`
    AxiomAt(Condition),
    /// `mw : ¬MP`
    MpWitness,
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }
    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }
    pub fn pi(dom: Term, cod: Term) -> Term {
        Term::Pi(Box::new(dom), Box::new(cod))
    }
    pub fn sigma(dom: Term, cod: Term) -> Term {
        Term::Sigma(Box::new(dom), Box::new(cod))
    }
    pub fn lam(body: Term) -> Term {
        Term::Lam(Box::new(body))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(t: Term) -> Term {
        Term::Fst(Box::new(t))
    }
    pub fn snd(t: Term) -> Term {
        Term::Snd(Box::new(t))
    }
    pub fn rec_n0(motive: Term) -> Term {
        Term::RecN0(Box::new(motive))
    }
    pub fn rec_n1(motive: Term, a: Term) -> Term {
        Term::RecN1(Box::new(motive), Box::new(a))
    }
    pub fn rec_n2(motive: Term, a0: Term, a1: Term) -> Term {
        Term::RecN2(Box::new(motive), Box::new(a0), Box::new(a1))
    }
    pub fn rec_nat(motive: Term, zero: Term, step: Term) -> Term {
        Term::RecN(Box::new(motive), Box::new(zero), Box::new(step))
    }

    /// Non-dependent function type `A -> B`; `cod` is given in the outer scope.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi(dom, shift(&cod, 1))
    }

    /// `¬A`, i.e. `A -> N0`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(ty: Term) -> Term {
        Term::pi(ty, Term::Empty)
    }

    pub fn bit(b: Bit) -> Term {
        match b {
            Bit::Zero => Term::Zero,
            Bit::One => Term::One,
        }
    }

    pub fn as_bit(&self) -> Option<Bit> {
        match self {
            Term::Zero => Some(Bit::Zero),
            Term::One => Some(Bit::One),
            _ => None,
        }
    }

    /// `n̄ = S^n 0`.
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::succ(t))
    }

    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut t = self;
        loop {
            match t {
                Term::Zero => return Some(n),
                Term::Succ(inner) => {
                    n += 1;
                    t = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_below(0)
    }

    /// True if every free variable index is `< depth`.
    fn free_below(&self, depth: usize) -> bool {
        let mut ok = true;
        self.visit_vars(0, &mut |i, d| {
            if i >= d + depth {
                ok = false;
            }
        });
        ok
    }

    /// Does `Var(k)` (relative to the top of this term) occur free?
    pub fn mentions_var(&self, k: usize) -> bool {
        let mut hit = false;
        self.visit_vars(0, &mut |i, d| {
            if i == d + k {
                hit = true;
            }
        });
        hit
    }

    fn visit_vars(&self, depth: usize, f: &mut impl FnMut(usize, usize)) {
        match self {
            Term::Var(i) => f(*i, depth),
            Term::RecN0(m) => m.visit_vars(depth + 1, f),
            Term::RecN1(m, a) => {
                m.visit_vars(depth + 1, f);
                a.visit_vars(depth, f);
            }
            Term::RecN2(m, a, b) | Term::RecN(m, a, b) => {
                m.visit_vars(depth + 1, f);
                a.visit_vars(depth, f);
                b.visit_vars(depth, f);
            }
            Term::Succ(t) | Term::Fst(t) | Term::Snd(t) => t.visit_vars(depth, f),
            Term::Lam(b) => b.visit_vars(depth + 1, f),
            Term::Pi(a, b) | Term::Sigma(a, b) => {
                a.visit_vars(depth, f);
                b.visit_vars(depth + 1, f);
            }
            Term::App(a, b) | Term::Pair(a, b) => {
                a.visit_vars(depth, f);
                b.visit_vars(depth, f);
            }
            Term::Universe
            | Term::Nat
            | Term::Empty
            | Term::Unit
            | Term::Bool
            | Term::Zero
            | Term::One
            | Term::Generic
            | Term::Axiom
            | Term::GenericAt(_)
            | Term::AxiomAt(_)
            | Term::MpWitness => {}
        }
    }

    /// Number of constructors in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.for_each_subterm(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal over all subterms (binders are not tracked).
    pub fn for_each_subterm(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::RecN0(m) => m.for_each_subterm(f),
            Term::RecN1(m, a) => {
                m.for_each_subterm(f);
                a.for_each_subterm(f);
            }
            Term::RecN2(m, a, b) | Term::RecN(m, a, b) => {
                m.for_each_subterm(f);
                a.for_each_subterm(f);
                b.for_each_subterm(f);
            }
            Term::Succ(t) | Term::Fst(t) | Term::Snd(t) | Term::Lam(t) => t.for_each_subterm(f),
            Term::Pi(a, b) | Term::Sigma(a, b) | Term::App(a, b) | Term::Pair(a, b) => {
                a.for_each_subterm(f);
                b.for_each_subterm(f);
            }
            _ => {}
        }
    }

    /// Rebuild the term bottom-up, replacing closed constants via `f`.
    /// Constants carry no variables, so no shifting is needed when the
    /// replacement is closed.
    pub fn replace_constants(&self, f: &impl Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        let go = |t: &Term| Box::new(t.replace_constants(f));
        match self {
            Term::RecN0(m) => Term::RecN0(go(m)),
            Term::RecN1(m, a) => Term::RecN1(go(m), go(a)),
            Term::RecN2(m, a, b) => Term::RecN2(go(m), go(a), go(b)),
            Term::RecN(m, a, b) => Term::RecN(go(m), go(a), go(b)),
            Term::Succ(t) => Term::Succ(go(t)),
            Term::Fst(t) => Term::Fst(go(t)),
            Term::Snd(t) => Term::Snd(go(t)),
            Term::Lam(t) => Term::Lam(go(t)),
            Term::Pi(a, b) => Term::Pi(go(a), go(b)),
            Term::Sigma(a, b) => Term::Sigma(go(a), go(b)),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            other => other.clone(),
        }
    }
}

/// Structural equality; with de Bruijn indices this is α-equivalence.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// Shift free variables of `t` by `by`.
pub fn shift(t: &Term, by: usize) -> Term {
    shift_from(t, by as isize, 0)
}

/// Shift free variables with index `>= cutoff` by `by`.
pub fn shift_from(t: &Term, by: isize, cutoff: usize) -> Term {
    if by == 0 {
        return t.clone();
    }
    map_vars(t, cutoff, &|i, c| {
        if i >= c {
            Term::Var((i as isize + by) as usize)
        } else {
            Term::Var(i)
        }
    })
}

/// Instantiate the outermost binder of `body` with `arg`: `body[arg]`.
///
/// `body` lives under one extra binder relative to `arg`.
pub fn subst(body: &Term, arg: &Term) -> Term {
    subst_at(body, 0, arg)
}

fn subst_at(body: &Term, target: usize, arg: &Term) -> Term {
    map_vars(body, target, &|i, depth| {
        if i == depth {
            shift(arg, depth - target)
        } else if i > depth {
            Term::Var(i - 1)
        } else {
            Term::Var(i)
        }
    })
}

/// Rebuild `t` replacing each variable via `f(index, binder_depth + base)`.
fn map_vars(t: &Term, depth: usize, f: &impl Fn(usize, usize) -> Term) -> Term {
    let go = |t: &Term, d: usize| Box::new(map_vars(t, d, f));
    match t {
        Term::Var(i) => f(*i, depth),
        Term::RecN0(m) => Term::RecN0(go(m, depth + 1)),
        Term::RecN1(m, a) => Term::RecN1(go(m, depth + 1), go(a, depth)),
        Term::RecN2(m, a, b) => Term::RecN2(go(m, depth + 1), go(a, depth), go(b, depth)),
        Term::RecN(m, a, b) => Term::RecN(go(m, depth + 1), go(a, depth), go(b, depth)),
        Term::Succ(x) => Term::Succ(go(x, depth)),
        Term::Fst(x) => Term::Fst(go(x, depth)),
        Term::Snd(x) => Term::Snd(go(x, depth)),
        Term::Lam(b) => Term::Lam(go(b, depth + 1)),
        Term::Pi(a, b) => Term::Pi(go(a, depth), go(b, depth + 1)),
        Term::Sigma(a, b) => Term::Sigma(go(a, depth), go(b, depth + 1)),
        Term::App(a, b) => Term::App(go(a, depth), go(b, depth)),
        Term::Pair(a, b) => Term::Pair(go(a, depth), go(b, depth)),
        other => other.clone(),
    }
}

/// Which calculus is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Mode {
    /// Plain MLTT: no forcing constants.
    #[default]
    Plain,
    /// One generic point `f` and the axiom `w`.
    Forcing,
    /// Adds `f_q`, `w_q` and `mw`.
    ManyReals,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Forcing => "forcing",
            Mode::ManyReals => "many-reals",
        }
    }

    /// Check that every constant occurring in `t` is available in this mode.
    pub fn admits(self, t: &Term) -> Result<(), ModeViolation> {
        let mut err = None;
        t.for_each_subterm(&mut |s| {
            if err.is_some() {
                return;
            }
            let needed = match s {
                Term::Generic | Term::Axiom => Mode::Forcing,
                Term::GenericAt(_) | Term::AxiomAt(_) | Term::MpWitness => Mode::ManyReals,
                _ => return,
            };
            let allowed = match self {
                Mode::Plain => false,
                Mode::Forcing => needed == Mode::Forcing,
                Mode::ManyReals => true,
            };
            if !allowed {
                err = Some(ModeViolation {
                    mode: self,
                    constant: s.clone(),
                });
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Mode::Plain),
            "forcing" => Ok(Mode::Forcing),
            "many-reals" | "many" => Ok(Mode::ManyReals),
            other => Err(format!("unknown mode `{other}` (expected plain, forcing or many-reals)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("constant `{constant}` is not available in {mode} mode")]
pub struct ModeViolation {
    pub mode: Mode,
    pub constant: Term,
}

/// Typing context `x1:A1, …, xn:An`, innermost last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<Term>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_types(entries: Vec<Term>) -> Self {
        Context { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Term] {
        &self.entries
    }

    pub fn extend(&self, ty: Term) -> Context {
        let mut entries = self.entries.clone();
        entries.push(ty);
        Context { entries }
    }

    pub fn push(&mut self, ty: Term) {
        self.entries.push(ty);
    }

    pub fn pop(&mut self) -> Option<Term> {
        self.entries.pop()
    }

    /// Type of `Var(i)`, shifted into the full context.
    pub fn lookup(&self, i: usize) -> Option<Term> {
        let n = self.entries.len();
        if i >= n {
            return None;
        }
        Some(shift(&self.entries[n - 1 - i], i + 1))
    }

    pub fn map(&self, f: impl Fn(&Term) -> Term) -> Context {
        Context {
            entries: self.entries.iter().map(f).collect(),
        }
    }
}
