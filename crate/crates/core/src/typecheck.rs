//! Bidirectional checking of judgments `Γ ⊢_p J` in plain, forcing and
//! many-reals mode.
//!
//! A whnf that gets stuck on `f k̄` while checking aborts the current attempt
//! and the whole judgment is re-checked on both halves of `p` split at `k`.

// Diagnostics carry the failing conversion problem; failure is the rare path.
#![allow(clippy::result_large_err)]

use serde::Serialize;
use thiserror::Error;

use crate::condition::{find_partition, Condition, Partition};
use crate::conversion::{Attempt, Classifier, ConvError, ConvProblem, Converter, Fail, SplitError};
use crate::prelude;
use crate::reduction::{Budget, DEFAULT_FUEL, DEFAULT_SPLIT_DEPTH};
use crate::syntax::{shift, subst, Context, Mode, ModeViolation, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum JudgmentKind {
    /// `Γ ⊢`
    CtxWf,
    /// `Γ ⊢ A`
    Type { ty: Term },
    /// `Γ ⊢ A = B`
    TypeEq { lhs: Term, rhs: Term },
    /// `Γ ⊢ t : A`
    Term { term: Term, ty: Term },
    /// `Γ ⊢ t = u : A`
    TermEq { lhs: Term, rhs: Term, ty: Term },
}

/// Serialized with terms named after the context, see the printer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub context: Context,
    pub condition: Condition,
    pub mode: Mode,
    pub kind: JudgmentKind,
    /// Leaves of a partition of `condition`; when present the judgment is
    /// checked at each leaf instead.
    pub cover: Option<Vec<Condition>>,
}

impl Judgment {
    pub fn new(context: Context, condition: Condition, mode: Mode, kind: JudgmentKind) -> Self {
        Judgment {
            context,
            condition,
            mode,
            kind,
            cover: None,
        }
    }

    pub fn closed(condition: Condition, mode: Mode, kind: JudgmentKind) -> Self {
        Self::new(Context::new(), condition, mode, kind)
    }

    pub fn with_cover(mut self, cover: Vec<Condition>) -> Self {
        self.cover = Some(cover);
        self
    }

    /// Every term mentioned by the judgment, context entries first.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = self.context.entries().iter().collect();
        match &self.kind {
            JudgmentKind::CtxWf => {}
            JudgmentKind::Type { ty } => out.push(ty),
            JudgmentKind::TypeEq { lhs, rhs } => out.extend([lhs, rhs]),
            JudgmentKind::Term { term, ty } => out.extend([term, ty]),
            JudgmentKind::TermEq { lhs, rhs, ty } => out.extend([lhs, rhs, ty]),
        }
        out
    }

    /// The same judgment at another condition, without a cover.
    pub fn at(&self, condition: Condition) -> Judgment {
        Judgment {
            condition,
            cover: None,
            ..self.clone()
        }
    }

    pub fn in_mode(&self, mode: Mode) -> Judgment {
        Judgment {
            mode,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error(transparent)]
    Mode(#[from] ModeViolation),
    #[error("fuel exhausted after {fuel} reduction steps")]
    FuelExhausted { fuel: u64 },
    #[error("split depth {depth} exceeded at condition {condition}")]
    SplitDepthExceeded { depth: usize, condition: Condition },
    #[error("plain-mode judgments must be stated at the empty condition, not {0}")]
    ConditionInPlainMode(Condition),
    #[error("the cover {cover:?} is not a partition of {root}")]
    InvalidPartition { root: Condition, cover: Vec<String> },
    #[error("variable #{0} is not bound in the context")]
    UnboundVariable(usize),
    #[error("cannot infer a type for `{0}`; it can only be checked against a type")]
    CannotInfer(Term),
    #[error("`{0}` is a type but not an element of a type")]
    NotAnElement(Term),
    #[error("no typing rule applies to `{0}`")]
    NoRule(Term),
    #[error("expected a function type for `{term}`, found `{found}`")]
    ExpectedPi { term: Term, found: Term },
    #[error("expected a Σ-type for `{term}`, found `{found}`")]
    ExpectedSigma { term: Term, found: Term },
    #[error("type mismatch for `{term}`: expected `{expected}`, found `{found}` (whnf `{expected_whnf}` vs `{found_whnf}`)")]
    Mismatch {
        term: Term,
        expected: Term,
        found: Term,
        expected_whnf: Term,
        found_whnf: Term,
        problem: Box<ConvProblem>,
    },
    #[error("`{lhs}` and `{rhs}` are not convertible")]
    NotConvertible {
        lhs: Term,
        rhs: Term,
        problem: Box<ConvProblem>,
    },
    #[error("the type of `{term}` depends on the undetermined bit f({index})")]
    UndeterminedType { term: Term, index: u64 },
}

impl From<ConvError> for TypeError {
    fn from(e: ConvError) -> Self {
        match e {
            ConvError::Mode(m) => TypeError::Mode(m),
            ConvError::FuelExhausted { fuel } => TypeError::FuelExhausted { fuel },
            ConvError::SplitDepthExceeded { depth, condition } => {
                TypeError::SplitDepthExceeded { depth, condition }
            }
        }
    }
}

impl TypeError {
    pub fn conv_problem(&self) -> Option<&ConvProblem> {
        match self {
            TypeError::Mismatch { problem, .. } | TypeError::NotConvertible { problem, .. } => {
                Some(problem)
            }
            _ => None,
        }
    }

    /// Whether the error comes from a resource bound rather than the judgment.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            TypeError::FuelExhausted { .. } | TypeError::SplitDepthExceeded { .. }
        )
    }
}

/// A type error together with the condition it was raised at.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{error} (at {condition})")]
pub struct CheckError {
    pub error: TypeError,
    pub condition: Condition,
}

impl From<ConvError> for CheckError {
    fn from(e: ConvError) -> Self {
        let condition = match &e {
            ConvError::SplitDepthExceeded { condition, .. } => condition.clone(),
            _ => Condition::new(),
        };
        CheckError {
            error: e.into(),
            condition,
        }
    }
}

impl SplitError for CheckError {
    fn depth_exceeded(depth: usize, condition: &Condition) -> Self {
        CheckError {
            error: TypeError::SplitDepthExceeded {
                depth,
                condition: condition.clone(),
            },
            condition: condition.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Error,
    Note,
}

/// Byte range plus 1-based line and column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conv_problem: Option<ConvProblem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span: None,
            message: message.into(),
            conv_problem: None,
            condition: None,
        }
    }

    pub fn from_check_error(e: &CheckError) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span: None,
            message: e.error.to_string(),
            conv_problem: e.error.conv_problem().cloned(),
            condition: Some(e.condition.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub judgment: Judgment,
    pub verdict: Verdict,
    pub trace: Vec<String>,
    pub splits: Vec<Partition>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Certificate {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    /// Re-check the recorded judgment.
    pub fn replay(&self, fuel: u64, max_depth: usize) -> Certificate {
        check_judgment(&self.judgment, fuel, max_depth)
    }

    pub fn with_span(mut self, span: Span) -> Self {
        for d in &mut self.diagnostics {
            d.span.get_or_insert(span);
        }
        self
    }
}

/// Resource bounds for a single judgment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Limits {
    pub fuel: u64,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fuel: DEFAULT_FUEL,
            max_depth: DEFAULT_SPLIT_DEPTH,
        }
    }
}

/// Check any judgment form.
pub fn check_judgment(j: &Judgment, fuel: u64, max_depth: usize) -> Certificate {
    let mut budget = Budget::new(fuel);
    let mut cv = Converter::new(&mut budget, max_depth);
    let result = run_judgment(&mut cv, j);
    let (verdict, diagnostics) = match result {
        Ok(()) => (Verdict::Accept, Vec::new()),
        Err(e) => (Verdict::Reject, vec![Diagnostic::from_check_error(&e)]),
    };
    Certificate {
        judgment: j.clone(),
        verdict,
        trace: cv.trace,
        splits: cv.splits,
        diagnostics,
    }
}

/// `Γ ⊢_p t : A`
pub fn check(ctx: &Context, p: &Condition, t: &Term, ty: &Term, mode: Mode, limits: Limits) -> Certificate {
    let j = Judgment::new(
        ctx.clone(),
        p.clone(),
        mode,
        JudgmentKind::Term {
            term: t.clone(),
            ty: ty.clone(),
        },
    );
    check_judgment(&j, limits.fuel, limits.max_depth)
}

/// `Γ ⊢_p A`
pub fn check_type(ctx: &Context, p: &Condition, ty: &Term, mode: Mode, limits: Limits) -> Certificate {
    let j = Judgment::new(ctx.clone(), p.clone(), mode, JudgmentKind::Type { ty: ty.clone() });
    check_judgment(&j, limits.fuel, limits.max_depth)
}

/// Infer a type for `t` at `p`. Fails if the type differs between the halves
/// of a split.
pub fn infer(ctx: &Context, p: &Condition, t: &Term, mode: Mode, limits: Limits) -> Result<Term, CheckError> {
    let located = |error: TypeError| CheckError {
        error,
        condition: p.clone(),
    };
    mode.admits(t).map_err(|e| located(e.into()))?;
    for ty in ctx.entries() {
        mode.admits(ty).map_err(|e| located(e.into()))?;
    }
    let mut budget = Budget::new(limits.fuel);
    let mut cv = Converter::new(&mut budget, limits.max_depth);
    let mut checker = Checker { cv: &mut cv };
    let result = checker.context(ctx, p).and_then(|()| checker.infer(ctx, p, t));
    match result {
        Ok(ty) => Ok(ty),
        Err(Fail::Fatal(e)) => Err(e),
        Err(Fail::Stuck(index)) => Err(located(TypeError::UndeterminedType {
            term: t.clone(),
            index,
        })),
    }
}

type Check<T> = Attempt<T, CheckError>;

struct Checker<'c, 'b> {
    cv: &'c mut Converter<'b>,
}

fn fail<T>(p: &Condition, error: TypeError) -> Check<T> {
    Err(Fail::Fatal(CheckError {
        error,
        condition: p.clone(),
    }))
}

fn run_judgment(cv: &mut Converter<'_>, j: &Judgment) -> Result<(), CheckError> {
    let root_err = |error: TypeError| CheckError {
        error,
        condition: j.condition.clone(),
    };
    if j.mode == Mode::Plain && !j.condition.is_empty() {
        return Err(root_err(TypeError::ConditionInPlainMode(j.condition.clone())));
    }
    for t in j.terms() {
        j.mode.admits(t).map_err(|e| root_err(e.into()))?;
    }
    let leaves = match &j.cover {
        None => vec![j.condition.clone()],
        Some(cover) => {
            let Some(partition) = find_partition(&j.condition, cover) else {
                return Err(root_err(TypeError::InvalidPartition {
                    root: j.condition.clone(),
                    cover: cover.iter().map(|c| c.to_string()).collect(),
                }));
            };
            cv.trace.push(format!("loc over {} leaves", cover.len()));
            cv.splits.push(partition);
            cover.clone()
        }
    };
    for leaf in &leaves {
        cv.with_splits(
            leaf,
            &mut |cv, q| Checker { cv }.judgment_at(j, q),
            &|(), ()| (),
        )?;
    }
    Ok(())
}

impl Checker<'_, '_> {
    fn judgment_at(&mut self, j: &Judgment, p: &Condition) -> Check<()> {
        let ctx = &j.context;
        self.context(ctx, p)?;
        match &j.kind {
            JudgmentKind::CtxWf => Ok(()),
            JudgmentKind::Type { ty } => self.is_type(ctx, p, ty),
            JudgmentKind::TypeEq { lhs, rhs } => {
                self.is_type(ctx, p, lhs)?;
                self.is_type(ctx, p, rhs)?;
                if self.conv_types(ctx, p, lhs, rhs)? {
                    Ok(())
                } else {
                    fail(p, TypeError::NotConvertible {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        problem: Box::new(ConvProblem {
                            context: ctx.clone(),
                            condition: p.clone(),
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                            classifier: Classifier::Type,
                        }),
                    })
                }
            }
            JudgmentKind::Term { term, ty } => {
                self.is_type(ctx, p, ty)?;
                self.check(ctx, p, term, ty)
            }
            JudgmentKind::TermEq { lhs, rhs, ty } => {
                self.is_type(ctx, p, ty)?;
                self.check(ctx, p, lhs, ty)?;
                self.check(ctx, p, rhs, ty)?;
                let ok = self.cv.terms(ctx, p, lhs, rhs, ty).map_err(conv_fail)?;
                if ok {
                    Ok(())
                } else {
                    fail(p, TypeError::NotConvertible {
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        problem: Box::new(ConvProblem {
                            context: ctx.clone(),
                            condition: p.clone(),
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                            classifier: Classifier::Term(ty.clone()),
                        }),
                    })
                }
            }
        }
    }

    fn context(&mut self, ctx: &Context, p: &Condition) -> Check<()> {
        let mut prefix = Context::new();
        for ty in ctx.entries() {
            self.is_type(&prefix, p, ty)?;
            prefix.push(ty.clone());
        }
        Ok(())
    }

    fn whnf(&mut self, t: &Term, p: &Condition) -> Check<Term> {
        self.cv.whnf(t, p)
    }

    fn conv_types(&mut self, ctx: &Context, p: &Condition, a: &Term, b: &Term) -> Check<bool> {
        self.cv.types(ctx, p, a, b).map_err(conv_fail)
    }

    /// `Γ ⊢_p A`
    fn is_type(&mut self, ctx: &Context, p: &Condition, ty: &Term) -> Check<()> {
        match ty {
            Term::Universe | Term::Nat | Term::Empty | Term::Unit | Term::Bool => Ok(()),
            Term::Pi(dom, cod) | Term::Sigma(dom, cod) => {
                self.is_type(ctx, p, dom)?;
                self.is_type(&ctx.extend((**dom).clone()), p, cod)
            }
            _ => self.check(ctx, p, ty, &Term::Universe),
        }
    }

    /// `Γ ⊢_p t : A` for a type `A` already known to be well formed.
    fn check(&mut self, ctx: &Context, p: &Condition, t: &Term, ty: &Term) -> Check<()> {
        match t {
            Term::Lam(body) => match self.whnf(ty, p)? {
                Term::Pi(dom, cod) => self.check(&ctx.extend(*dom), p, body, &cod),
                other => fail(p, TypeError::ExpectedPi {
                    term: t.clone(),
                    found: other,
                }),
            },
            Term::Pair(a, b) => match self.whnf(ty, p)? {
                Term::Sigma(dom, cod) => {
                    self.check(ctx, p, a, &dom)?;
                    self.check(ctx, p, b, &subst(&cod, a))
                }
                other => fail(p, TypeError::ExpectedSigma {
                    term: t.clone(),
                    found: other,
                }),
            },
            // 0 inhabits N, N1 and N2
            Term::Zero => match self.whnf(ty, p)? {
                Term::Nat | Term::Unit | Term::Bool => Ok(()),
                _ => self.mismatch(ctx, p, t, ty, &Term::Nat, Term::Nat),
            },
            Term::App(..) if redex_spine(t).is_some() => {
                let direct = self
                    .infer(ctx, p, t)
                    .and_then(|found| self.convert(ctx, p, t, ty, &found));
                let first = match direct {
                    Err(Fail::Fatal(e)) if !e.error.is_resource() => e,
                    other => return other,
                };
                // (λx.b) a ū : A  from  a : X  and  x:X ⊢ b ū↑ : A↑
                let (body, arg) = redex_spine(t).expect("guarded");
                let lifted = shift(ty, 1);
                for dom in self.arg_candidates(ctx, p, &arg)? {
                    let attempt = self
                        .check(ctx, p, &arg, &dom)
                        .and_then(|()| self.check(&ctx.extend(dom), p, &body, &lifted));
                    match attempt {
                        Ok(()) => return Ok(()),
                        Err(Fail::Fatal(e)) if !e.error.is_resource() => {}
                        Err(other) => return Err(other),
                    }
                }
                Err(Fail::Fatal(first))
            }
            _ => {
                let found = self.infer(ctx, p, t)?;
                self.convert(ctx, p, t, ty, &found)
            }
        }
    }

    fn convert(&mut self, ctx: &Context, p: &Condition, t: &Term, expected: &Term, found: &Term) -> Check<()> {
        if self.conv_types(ctx, p, found, expected)? {
            return Ok(());
        }
        let found_whnf = self.whnf(found, p)?;
        self.mismatch(ctx, p, t, expected, found, found_whnf)
    }

    fn mismatch(
        &mut self,
        ctx: &Context,
        p: &Condition,
        t: &Term,
        expected: &Term,
        found: &Term,
        found_whnf: Term,
    ) -> Check<()> {
        let expected_whnf = self.whnf(expected, p)?;
        fail(p, TypeError::Mismatch {
            term: t.clone(),
            expected: expected.clone(),
            found: found.clone(),
            expected_whnf,
            found_whnf,
            problem: Box::new(ConvProblem {
                context: ctx.clone(),
                condition: p.clone(),
                lhs: found.clone(),
                rhs: expected.clone(),
                classifier: Classifier::Type,
            }),
        })
    }

    /// Types to try for the argument of a β-redex.
    ///
    /// An inferred `N` may come from the default type of an overloaded `0`,
    /// so `N2` and `N1` are tried as well; the caller checks the argument
    /// against each candidate.
    fn arg_candidates(&mut self, ctx: &Context, p: &Condition, arg: &Term) -> Check<Vec<Term>> {
        match self.infer(ctx, p, arg) {
            Ok(Term::Nat) => Ok(vec![Term::Nat, Term::Bool, Term::Unit]),
            Ok(ty) => Ok(vec![ty]),
            Err(Fail::Fatal(e)) if !e.error.is_resource() => Ok(Vec::new()),
            Err(other) => Err(other),
        }
    }

    /// A type `A` with `Γ ⊢_p t : A`.
    fn infer(&mut self, ctx: &Context, p: &Condition, t: &Term) -> Check<Term> {
        match t {
            Term::Var(i) => match ctx.lookup(*i) {
                Some(ty) => Ok(ty),
                None => fail(p, TypeError::UnboundVariable(*i)),
            },
            Term::Nat | Term::Empty | Term::Unit | Term::Bool => Ok(Term::Universe),
            Term::Universe => fail(p, TypeError::NotAnElement(t.clone())),
            Term::Zero => Ok(Term::Nat),
            Term::One => Ok(Term::Bool),
            Term::Succ(n) => {
                self.check(ctx, p, n, &Term::Nat)?;
                Ok(Term::Nat)
            }
            Term::Pi(dom, cod) | Term::Sigma(dom, cod) => {
                self.check(ctx, p, dom, &Term::Universe)?;
                self.check(&ctx.extend((**dom).clone()), p, cod, &Term::Universe)?;
                Ok(Term::Universe)
            }
            Term::Lam(_) => fail(p, TypeError::CannotInfer(t.clone())),
            // non-dependent: (a, b) : Σ(_:A) B
            Term::Pair(a, b) => {
                let a_ty = self.infer(ctx, p, a)?;
                let b_ty = self.infer(ctx, p, b)?;
                Ok(Term::sigma(a_ty, shift(&b_ty, 1)))
            }
            Term::App(head, arg) => {
                if let Some((body, first)) = redex_spine(t) {
                    return self.infer_redex(ctx, p, t, &body, &first);
                }
                let head_ty = self.infer(ctx, p, head)?;
                match self.whnf(&head_ty, p)? {
                    Term::Pi(dom, cod) => {
                        self.check(ctx, p, arg, &dom)?;
                        Ok(subst(&cod, arg))
                    }
                    other => fail(p, TypeError::ExpectedPi {
                        term: (**head).clone(),
                        found: other,
                    }),
                }
            }
            Term::Fst(e) | Term::Snd(e) => {
                let ty = self.infer(ctx, p, e)?;
                match self.whnf(&ty, p)? {
                    Term::Sigma(dom, cod) => Ok(if matches!(t, Term::Fst(_)) {
                        *dom
                    } else {
                        subst(&cod, &Term::fst((**e).clone()))
                    }),
                    other => fail(p, TypeError::ExpectedSigma {
                        term: (**e).clone(),
                        found: other,
                    }),
                }
            }
            Term::RecN0(c) => {
                self.is_type(&ctx.extend(Term::Empty), p, c)?;
                Ok(Term::pi(Term::Empty, (**c).clone()))
            }
            Term::RecN1(c, a) => {
                self.is_type(&ctx.extend(Term::Unit), p, c)?;
                self.check(ctx, p, a, &prelude::motive_at(c, &Term::Zero))?;
                Ok(Term::pi(Term::Unit, (**c).clone()))
            }
            Term::RecN2(c, a0, a1) => {
                self.is_type(&ctx.extend(Term::Bool), p, c)?;
                self.check(ctx, p, a0, &prelude::motive_at(c, &Term::Zero))?;
                self.check(ctx, p, a1, &prelude::motive_at(c, &Term::One))?;
                Ok(Term::pi(Term::Bool, (**c).clone()))
            }
            Term::RecN(c, z, s) => {
                self.is_type(&ctx.extend(Term::Nat), p, c)?;
                self.check(ctx, p, z, &prelude::motive_at(c, &Term::Zero))?;
                self.check(ctx, p, s, &prelude::nat_step_type(c))?;
                Ok(Term::pi(Term::Nat, (**c).clone()))
            }
            Term::Generic | Term::GenericAt(_) => Ok(prelude::generic_type()),
            Term::Axiom => Ok(prelude::axiom_type()),
            Term::AxiomAt(q) => Ok(prelude::axiom_at_type(q)),
            Term::MpWitness => Ok(prelude::mp_witness_type()),
        }
    }

    /// `(λx.b) a ū`: infer `b ū↑` under `x : X` for an inferable `X ∋ a`.
    fn infer_redex(&mut self, ctx: &Context, p: &Condition, t: &Term, body: &Term, arg: &Term) -> Check<Term> {
        let mut first_err = None;
        for dom in self.arg_candidates(ctx, p, arg)? {
            let attempt = self
                .check(ctx, p, arg, &dom)
                .and_then(|()| self.infer(&ctx.extend(dom), p, body));
            match attempt {
                Ok(cod) => return Ok(subst(&cod, arg)),
                Err(Fail::Fatal(e)) if !e.error.is_resource() => {
                    first_err.get_or_insert(e);
                }
                Err(other) => return Err(other),
            }
        }
        match first_err {
            Some(e) => Err(Fail::Fatal(e)),
            None => fail(p, TypeError::CannotInfer(t.clone())),
        }
    }
}

/// For `(λx.b) a u₁ … uₙ`, the body `b u₁↑ … uₙ↑` under `x` and the
/// argument `a`.
fn redex_spine(t: &Term) -> Option<(Term, Term)> {
    let mut rest = Vec::new();
    let mut head = t;
    while let Term::App(f, a) = head {
        rest.push((**a).clone());
        head = f;
    }
    let Term::Lam(body) = head else { return None };
    let first = rest.pop()?;
    let rest = rest.into_iter().rev().map(|u| shift(&u, 1));
    Some((Term::apps((**body).clone(), rest), first))
}

fn conv_fail(e: ConvError) -> Fail<CheckError> {
    Fail::Fatal(e.into())
}

impl From<ConvError> for Fail<CheckError> {
    fn from(e: ConvError) -> Self {
        conv_fail(e)
    }
}
