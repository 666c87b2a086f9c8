//! Algorithmic judgmental equality at a condition.
//!
//! Both sides are brought to weak head normal form at the current condition.
//! Whenever a side is stuck on `f k̄` the condition is split at `k` and both
//! halves must succeed. Π-typed terms are compared by η, Σ-typed terms
//! by their projections, and neutral spines by head and arguments.

use thiserror::Error;

use crate::condition::{Condition, Partition};
use crate::prelude;
use crate::reduction::{self, Budget, ReductionError, WhnfClass};
use crate::syntax::{shift, subst, Context, Mode, ModeViolation, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Classifier {
    /// `Γ ⊢ A = B`
    Type,
    /// `Γ ⊢ t = u : A`
    Term(Term),
}

/// Serialized with terms named after the context, see the printer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvProblem {
    pub context: Context,
    pub condition: Condition,
    pub lhs: Term,
    pub rhs: Term,
    pub classifier: Classifier,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConvError {
    #[error(transparent)]
    Mode(#[from] ModeViolation),
    #[error("fuel exhausted after {fuel} reduction steps")]
    FuelExhausted { fuel: u64 },
    #[error("split depth {depth} exceeded at condition {condition}")]
    SplitDepthExceeded { depth: usize, condition: Condition },
}

impl From<ReductionError> for ConvError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Mode(m) => ConvError::Mode(m),
            ReductionError::FuelExhausted { fuel } => ConvError::FuelExhausted { fuel },
            ReductionError::SplitDepthExceeded { depth, condition } => {
                ConvError::SplitDepthExceeded { depth, condition }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvOutcome {
    pub convertible: bool,
    pub trace: Vec<String>,
    /// One two-leaf partition per condition split performed.
    pub splits: Vec<Partition>,
}

/// Decide `problem` within `fuel` reduction steps and `max_depth` nested splits.
pub fn conv(
    problem: &ConvProblem,
    mode: Mode,
    fuel: u64,
    max_depth: usize,
) -> Result<ConvOutcome, ConvError> {
    for t in [&problem.lhs, &problem.rhs] {
        mode.admits(t)?;
    }
    if let Classifier::Term(ty) = &problem.classifier {
        mode.admits(ty)?;
    }
    let mut budget = Budget::new(fuel);
    let mut cv = Converter::new(&mut budget, max_depth);
    let ok = match &problem.classifier {
        Classifier::Type => cv.types(&problem.context, &problem.condition, &problem.lhs, &problem.rhs)?,
        Classifier::Term(ty) => cv.terms(
            &problem.context,
            &problem.condition,
            &problem.lhs,
            &problem.rhs,
            ty,
        )?,
    };
    Ok(ConvOutcome {
        convertible: ok,
        trace: cv.trace,
        splits: cv.splits,
    })
}

/// Failure inside a single-condition attempt.
pub(crate) enum Fail<E = ConvError> {
    /// A whnf is stuck on this index; the caller splits.
    Stuck(u64),
    Fatal(E),
}

impl<E: From<ConvError>> From<ReductionError> for Fail<E> {
    fn from(e: ReductionError) -> Self {
        Fail::Fatal(ConvError::from(e).into())
    }
}

pub(crate) type Attempt<T, E = ConvError> = Result<T, Fail<E>>;

/// Hook for errors raised by [`Converter::with_splits`] itself.
pub(crate) trait SplitError {
    fn depth_exceeded(depth: usize, condition: &Condition) -> Self;
}

impl SplitError for ConvError {
    fn depth_exceeded(depth: usize, condition: &Condition) -> Self {
        ConvError::SplitDepthExceeded {
            depth,
            condition: condition.clone(),
        }
    }
}

pub(crate) struct Converter<'b> {
    budget: &'b mut Budget,
    max_depth: usize,
    depth: usize,
    pub(crate) trace: Vec<String>,
    pub(crate) splits: Vec<Partition>,
}

impl<'b> Converter<'b> {
    pub(crate) fn new(budget: &'b mut Budget, max_depth: usize) -> Self {
        Converter {
            budget,
            max_depth,
            depth: 0,
            trace: Vec::new(),
            splits: Vec::new(),
        }
    }

    /// whnf at `p`, reporting a stuck index as [`Fail::Stuck`].
    pub(crate) fn whnf<E: From<ConvError>>(&mut self, t: &Term, p: &Condition) -> Attempt<Term, E> {
        let w = reduction::whnf_with(t, p, self.budget)?;
        match w.class {
            WhnfClass::ProperStuck { index, .. } => Err(Fail::Stuck(index)),
            _ => Ok(w.term),
        }
    }

    /// Run `attempt` at `p`, splitting at stuck indices until every branch decides.
    pub(crate) fn with_splits<T, E: SplitError>(
        &mut self,
        p: &Condition,
        attempt: &mut impl FnMut(&mut Self, &Condition) -> Attempt<T, E>,
        combine: &impl Fn(T, T) -> T,
    ) -> Result<T, E> {
        match attempt(self, p) {
            Ok(v) => Ok(v),
            Err(Fail::Fatal(e)) => Err(e),
            Err(Fail::Stuck(k)) => {
                if self.depth >= self.max_depth {
                    return Err(E::depth_exceeded(self.max_depth, p));
                }
                let partition = Partition::split(p.clone(), k).expect("stuck index is fresh");
                self.trace.push(format!("split {p} at {k}"));
                self.splits.push(partition);
                let [p0, p1] = p.split(k).expect("stuck index is fresh");
                self.depth += 1;
                let r0 = self.with_splits(&p0, attempt, combine);
                let r = match r0 {
                    Ok(v0) => self.with_splits(&p1, attempt, combine).map(|v1| combine(v0, v1)),
                    Err(e) => Err(e),
                };
                self.depth -= 1;
                r
            }
        }
    }

    pub(crate) fn types(
        &mut self,
        ctx: &Context,
        p: &Condition,
        a: &Term,
        b: &Term,
    ) -> Result<bool, ConvError> {
        self.with_splits(p, &mut |cv, q| cv.types_at(ctx, q, a, b), &|x, y| x && y)
    }

    pub(crate) fn terms(
        &mut self,
        ctx: &Context,
        p: &Condition,
        t: &Term,
        u: &Term,
        ty: &Term,
    ) -> Result<bool, ConvError> {
        self.with_splits(p, &mut |cv, q| cv.terms_at(ctx, q, t, u, ty), &|x, y| x && y)
    }

    fn fatal<T>(r: Result<T, ConvError>) -> Attempt<T> {
        r.map_err(Fail::Fatal)
    }

    fn types_at(&mut self, ctx: &Context, p: &Condition, a: &Term, b: &Term) -> Attempt<bool> {
        if a == b {
            return Ok(true);
        }
        let a = self.whnf(a, p)?;
        let b = self.whnf(b, p)?;
        if a == b {
            return Ok(true);
        }
        match (&a, &b) {
            (Term::Pi(a1, b1), Term::Pi(a2, b2)) | (Term::Sigma(a1, b1), Term::Sigma(a2, b2)) => {
                Ok(Self::fatal(self.types(ctx, p, a1, a2))?
                    && Self::fatal(self.types(&ctx.extend((**a1).clone()), p, b1, b2))?)
            }
            _ => Ok(self.neutral(ctx, p, &a, &b)?.is_some()),
        }
    }

    fn terms_at(
        &mut self,
        ctx: &Context,
        p: &Condition,
        t: &Term,
        u: &Term,
        ty: &Term,
    ) -> Attempt<bool> {
        if t == u {
            return Ok(true);
        }
        let ty = self.whnf(ty, p)?;
        match &ty {
            Term::Pi(dom, cod) => {
                self.trace.push("eta at Π".to_string());
                let inner = ctx.extend((**dom).clone());
                let t1 = Term::app(shift(t, 1), Term::Var(0));
                let u1 = Term::app(shift(u, 1), Term::Var(0));
                Self::fatal(self.terms(&inner, p, &t1, &u1, cod))
            }
            Term::Sigma(dom, cod) => {
                self.trace.push("projections at Σ".to_string());
                let (t1, u1) = (Term::fst(t.clone()), Term::fst(u.clone()));
                if !Self::fatal(self.terms(ctx, p, &t1, &u1, dom))? {
                    return Ok(false);
                }
                let cod1 = subst(cod, &t1);
                Self::fatal(self.terms(ctx, p, &Term::snd(t.clone()), &Term::snd(u.clone()), &cod1))
            }
            Term::Universe => Self::fatal(self.types(ctx, p, t, u)),
            _ => {
                let t = self.whnf(t, p)?;
                let u = self.whnf(u, p)?;
                if t == u {
                    return Ok(true);
                }
                match (&t, &u) {
                    (Term::Succ(a), Term::Succ(b)) => Self::fatal(self.terms(ctx, p, a, b, &Term::Nat)),
                    _ => Ok(self.neutral(ctx, p, &t, &u)?.is_some()),
                }
            }
        }
    }

    /// Compare two whnf neutral terms; on success return their common type.
    fn neutral(&mut self, ctx: &Context, p: &Condition, t: &Term, u: &Term) -> Attempt<Option<Term>> {
        Ok(match (t, u) {
            (Term::Var(i), Term::Var(j)) if i == j => ctx.lookup(*i),
            (Term::Generic, Term::Generic) => Some(prelude::generic_type()),
            (Term::GenericAt(q), Term::GenericAt(r)) if q == r => Some(prelude::generic_type()),
            (Term::Axiom, Term::Axiom) => Some(prelude::axiom_type()),
            (Term::AxiomAt(q), Term::AxiomAt(r)) if q == r => Some(prelude::axiom_at_type(q)),
            (Term::MpWitness, Term::MpWitness) => Some(prelude::mp_witness_type()),
            (Term::Fst(a), Term::Fst(b)) => match self.neutral(ctx, p, a, b)? {
                Some(ty) => match self.whnf(&ty, p)? {
                    Term::Sigma(dom, _) => Some(*dom),
                    _ => None,
                },
                None => None,
            },
            (Term::Snd(a), Term::Snd(b)) => match self.neutral(ctx, p, a, b)? {
                Some(ty) => match self.whnf(&ty, p)? {
                    Term::Sigma(_, cod) => Some(subst(&cod, &Term::fst((**a).clone()))),
                    _ => None,
                },
                None => None,
            },
            (Term::App(h1, a1), Term::App(h2, a2)) => self.neutral_app(ctx, p, h1, a1, h2, a2)?,
            _ => None,
        })
    }

    fn neutral_app(
        &mut self,
        ctx: &Context,
        p: &Condition,
        h1: &Term,
        a1: &Term,
        h2: &Term,
        a2: &Term,
    ) -> Attempt<Option<Term>> {
        let recursor = |h: &Term| {
            matches!(
                h,
                Term::RecN0(_) | Term::RecN1(..) | Term::RecN2(..) | Term::RecN(..)
            )
        };
        if recursor(h1) || recursor(h2) {
            return self.neutral_elim(ctx, p, h1, a1, h2, a2);
        }
        let Some(ty) = self.neutral(ctx, p, h1, h2)? else {
            return Ok(None);
        };
        let Term::Pi(dom, cod) = self.whnf(&ty, p)? else {
            return Ok(None);
        };
        if !Self::fatal(self.terms(ctx, p, a1, a2, &dom))? {
            return Ok(None);
        }
        Ok(Some(subst(&cod, a1)))
    }

    /// Compare two recursor applications on neutral scrutinees.
    fn neutral_elim(
        &mut self,
        ctx: &Context,
        p: &Condition,
        h1: &Term,
        a1: &Term,
        h2: &Term,
        a2: &Term,
    ) -> Attempt<Option<Term>> {
        if self.neutral(ctx, p, a1, a2)?.is_none() {
            return Ok(None);
        }
        let same = |cv: &mut Self, m1: &Term, m2: &Term, dom: Term| -> Attempt<bool> {
            Self::fatal(cv.types(&ctx.extend(dom), p, m1, m2))
        };
        let branch = |cv: &mut Self, x: &Term, y: &Term, ty: Term| -> Attempt<bool> {
            Self::fatal(cv.terms(ctx, p, x, y, &ty))
        };
        let motive = match (h1, h2) {
            (Term::RecN0(c1), Term::RecN0(c2)) => {
                same(self, c1, c2, Term::Empty)?.then_some(c1)
            }
            (Term::RecN1(c1, x1), Term::RecN1(c2, x2)) => (same(self, c1, c2, Term::Unit)?
                && branch(self, x1, x2, prelude::motive_at(c1, &Term::Zero))?)
            .then_some(c1),
            (Term::RecN2(c1, x1, y1), Term::RecN2(c2, x2, y2)) => (same(self, c1, c2, Term::Bool)?
                && branch(self, x1, x2, prelude::motive_at(c1, &Term::Zero))?
                && branch(self, y1, y2, prelude::motive_at(c1, &Term::One))?)
            .then_some(c1),
            (Term::RecN(c1, z1, s1), Term::RecN(c2, z2, s2)) => (same(self, c1, c2, Term::Nat)?
                && branch(self, z1, z2, prelude::motive_at(c1, &Term::Zero))?
                && branch(self, s1, s2, prelude::nat_step_type(c1))?)
            .then_some(c1),
            _ => None,
        };
        Ok(motive.map(|c| prelude::motive_at(c, a1)))
    }
}
