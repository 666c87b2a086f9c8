//! Condition-indexed weak head reduction `t ⇝_p u`.
//!
//! One step contracts the redex found through an evaluation context
//!
//! ```text
//! E ::= [ ] | E u | E.1 | E.2 | S E | f E | f_q E
//!     | rec_N0 (λx.C) E | rec_N1 (λx.C) a E | rec_N2 (λx.C) a0 a1 E | rec_N (λx.C) z g E
//! ```
//!
//! Besides β, ι and the projection rules, `f k̄ ⇝_p p(k)` when `k ∈ dom p`,
//! and in many-reals mode `f_q n̄ ⇝ 1` for `n ∈ dom q` and
//! `f_q n̄ ⇝_p p(n)` for `n ∉ dom q, n ∈ dom p`.

use thiserror::Error;

use crate::condition::{Condition, Partition, SplitTree};
use crate::syntax::{subst, Mode, ModeViolation, Term};

pub const DEFAULT_FUEL: u64 = 100_000;
pub const DEFAULT_SPLIT_DEPTH: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Mode(#[from] ModeViolation),
    #[error("fuel exhausted after {fuel} reduction steps")]
    FuelExhausted { fuel: u64 },
    #[error("split depth {depth} exceeded at condition {condition}")]
    SplitDepthExceeded { depth: usize, condition: Condition },
}

/// One frame of an evaluation context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// `[ ] u`
    AppFun(Term),
    /// `h [ ]` where `h` is `f`, `f_q` or a recursor awaiting its scrutinee.
    AppArg(Term),
    Fst,
    Snd,
    Succ,
}

/// A one-hole evaluation context, stored innermost frame first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EvalContext {
    frames: Vec<Frame>,
}

impl EvalContext {
    pub fn hole() -> Self {
        Self::default()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    fn wrap(mut self, frame: Frame) -> Self {
        self.frames.push(frame);
        self
    }

    /// `E[e]`
    pub fn plug(&self, e: Term) -> Term {
        self.frames.iter().fold(e, |inner, frame| match frame {
            Frame::AppFun(arg) => Term::app(inner, arg.clone()),
            Frame::AppArg(head) => Term::app(head.clone(), inner),
            Frame::Fst => Term::fst(inner),
            Frame::Snd => Term::snd(inner),
            Frame::Succ => Term::succ(inner),
        })
    }
}

/// Classification of a term with no `⇝_p` step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WhnfClass {
    /// Constructor, binder, type former, partially applied recursor, or a
    /// bare constant (`f`, `w`, …).
    Canonical,
    /// `E[f k̄]` (or `E[f_q k̄]`) with `k` outside the condition's domain.
    ProperStuck {
        index: u64,
        context: EvalContext,
        redex: Term,
    },
    /// A spine headed by a variable or by an opaque constant (`w`, `w_q`, `mw`).
    Neutral,
    /// No rule applies and the term is not canonical; only reachable from
    /// ill-typed input such as `0.1` or `rec_N2 (λx.C) a b N`.
    Blocked,
}

impl WhnfClass {
    pub fn stuck_index(&self) -> Option<u64> {
        match self {
            WhnfClass::ProperStuck { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, WhnfClass::Canonical)
    }

    pub fn name(&self) -> &'static str {
        match self {
            WhnfClass::Canonical => "canonical",
            WhnfClass::ProperStuck { .. } => "proper-stuck",
            WhnfClass::Neutral => "neutral",
            WhnfClass::Blocked => "blocked",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Term),
    Whnf(WhnfClass),
}

/// Result of iterating [`step`] to a `p`-whnf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Whnf {
    pub term: Term,
    pub class: WhnfClass,
    pub steps: u64,
}

/// Remaining reduction steps shared across a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    initial: u64,
    remaining: u64,
}

impl Budget {
    pub fn new(fuel: u64) -> Self {
        Budget {
            initial: fuel,
            remaining: fuel,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn used(&self) -> u64 {
        self.initial - self.remaining
    }

    fn consume(&mut self) -> Result<(), ReductionError> {
        if self.remaining == 0 {
            return Err(ReductionError::FuelExhausted { fuel: self.initial });
        }
        self.remaining -= 1;
        Ok(())
    }
}

/// Perform one outermost reduction step of `t` at `p`, or classify `t`.
pub fn step(t: &Term, p: &Condition, mode: Mode) -> Result<StepResult, ReductionError> {
    mode.admits(t)?;
    Ok(step_unchecked(t, p))
}

pub(crate) fn step_unchecked(t: &Term, p: &Condition) -> StepResult {
    use StepResult::*;
    match t {
        Term::Var(_) => Whnf(WhnfClass::Neutral),
        Term::App(head, arg) => match step_unchecked(head, p) {
            Stepped(h) => Stepped(Term::app(h, (**arg).clone())),
            Whnf(WhnfClass::Canonical) => apply(head, arg, p),
            Whnf(class) => Whnf(wrap(class, Frame::AppFun((**arg).clone()))),
        },
        Term::Fst(e) | Term::Snd(e) => {
            let first = matches!(t, Term::Fst(_));
            match step_unchecked(e, p) {
                Stepped(e2) => Stepped(if first { Term::fst(e2) } else { Term::snd(e2) }),
                Whnf(WhnfClass::Canonical) => match &**e {
                    Term::Pair(a, b) => Stepped(if first { (**a).clone() } else { (**b).clone() }),
                    _ => Whnf(WhnfClass::Blocked),
                },
                Whnf(class) => Whnf(wrap(class, if first { Frame::Fst } else { Frame::Snd })),
            }
        }
        Term::Succ(e) => match step_unchecked(e, p) {
            Stepped(e2) => Stepped(Term::succ(e2)),
            Whnf(WhnfClass::Canonical) if e.as_numeral().is_some() => Whnf(WhnfClass::Canonical),
            Whnf(WhnfClass::Canonical) => Whnf(WhnfClass::Blocked),
            Whnf(class) => Whnf(wrap(class, Frame::Succ)),
        },
        _ => Whnf(WhnfClass::Canonical),
    }
}

fn wrap(class: WhnfClass, frame: Frame) -> WhnfClass {
    match class {
        WhnfClass::ProperStuck {
            index,
            context,
            redex,
        } => WhnfClass::ProperStuck {
            index,
            context: context.wrap(frame),
            redex,
        },
        other => other,
    }
}

/// `head arg` where `head` is already a canonical whnf.
fn apply(head: &Term, arg: &Term, p: &Condition) -> StepResult {
    use StepResult::*;
    match head {
        Term::Lam(body) => Stepped(subst(body, arg)),
        Term::RecN0(_)
        | Term::RecN1(..)
        | Term::RecN2(..)
        | Term::RecN(..)
        | Term::Generic
        | Term::GenericAt(_) => match step_unchecked(arg, p) {
            Stepped(a2) => Stepped(Term::app(head.clone(), a2)),
            Whnf(WhnfClass::Canonical) => contract(head, arg, p),
            // ι for `rec_N` also fires on an open successor `S x`.
            Whnf(WhnfClass::Neutral) => match (head, arg) {
                (Term::RecN(..), Term::Succ(k)) => Stepped(rec_nat_step(head, k)),
                _ => Whnf(WhnfClass::Neutral),
            },
            Whnf(class) => Whnf(wrap(class, Frame::AppArg(head.clone()))),
        },
        Term::Axiom | Term::AxiomAt(_) | Term::MpWitness => Whnf(WhnfClass::Neutral),
        _ => Whnf(WhnfClass::Blocked),
    }
}

fn rec_nat_step(head: &Term, k: &Term) -> Term {
    let Term::RecN(_, _, g) = head else {
        unreachable!("rec_nat_step on non-recursor")
    };
    Term::apps((**g).clone(), [k.clone(), Term::app(head.clone(), k.clone())])
}

/// Contract `head arg` where `arg` is a canonical whnf.
fn contract(head: &Term, arg: &Term, p: &Condition) -> StepResult {
    use StepResult::*;
    match (head, arg) {
        (Term::RecN1(_, c), Term::Zero) => Stepped((**c).clone()),
        (Term::RecN2(_, c0, _), Term::Zero) => Stepped((**c0).clone()),
        (Term::RecN2(_, _, c1), Term::One) => Stepped((**c1).clone()),
        (Term::RecN(_, z, _), Term::Zero) => Stepped((**z).clone()),
        (Term::RecN(..), Term::Succ(k)) => Stepped(rec_nat_step(head, k)),
        (Term::Generic, _) => match arg.as_numeral() {
            Some(k) => match p.get(k) {
                Some(b) => Stepped(Term::bit(b)),
                None => Whnf(stuck_here(k, head, arg)),
            },
            None => Whnf(WhnfClass::Blocked),
        },
        (Term::GenericAt(q), _) => match arg.as_numeral() {
            Some(n) if q.contains(n) => Stepped(Term::One),
            Some(n) => match p.get(n) {
                Some(b) => Stepped(Term::bit(b)),
                None => Whnf(stuck_here(n, head, arg)),
            },
            None => Whnf(WhnfClass::Blocked),
        },
        _ => Whnf(WhnfClass::Blocked),
    }
}

fn stuck_here(index: u64, head: &Term, arg: &Term) -> WhnfClass {
    WhnfClass::ProperStuck {
        index,
        context: EvalContext::hole(),
        redex: Term::app(head.clone(), arg.clone()),
    }
}

/// Reduce `t` to its `p`-whnf using at most `fuel` steps.
pub fn whnf(t: &Term, p: &Condition, mode: Mode, fuel: u64) -> Result<Whnf, ReductionError> {
    mode.admits(t)?;
    let mut budget = Budget::new(fuel);
    whnf_with(t, p, &mut budget)
}

/// Like [`whnf`] but drawing from a shared budget; no mode check.
pub fn whnf_with(t: &Term, p: &Condition, budget: &mut Budget) -> Result<Whnf, ReductionError> {
    let mut current = t.clone();
    let mut steps = 0;
    loop {
        match step_unchecked(&current, p) {
            StepResult::Stepped(next) => {
                budget.consume()?;
                steps += 1;
                current = next;
            }
            StepResult::Whnf(class) => {
                return Ok(Whnf {
                    term: current,
                    class,
                    steps,
                })
            }
        }
    }
}

/// Leaves of a partition-wide evaluation, with the witness partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionEval {
    pub partition: Partition,
    /// Sorted by condition.
    pub leaves: Vec<(Condition, Whnf)>,
}

impl PartitionEval {
    pub fn leaf(&self, q: &Condition) -> Option<&Whnf> {
        self.leaves.iter().find(|(c, _)| c == q).map(|(_, w)| w)
    }
}

/// Evaluate `t` at `p`, splitting at every stuck index until each branch has
/// a whnf that is not properly stuck.
///
/// Each branch inherits the fuel left over by its parent.
pub fn partition_eval(
    t: &Term,
    p: &Condition,
    mode: Mode,
    fuel: u64,
    max_depth: usize,
) -> Result<PartitionEval, ReductionError> {
    mode.admits(t)?;
    let (tree, mut leaves) = eval_branch(t, p, Budget::new(fuel), 0, 0, max_depth)?;
    leaves.sort_by(|a, b| a.0.cmp(&b.0));
    let partition = Partition::from_tree(p.clone(), tree).expect("splits are at fresh indices");
    Ok(PartitionEval { partition, leaves })
}

type Branch = (SplitTree, Vec<(Condition, Whnf)>);

fn eval_branch(
    t: &Term,
    p: &Condition,
    mut budget: Budget,
    steps_so_far: u64,
    depth: usize,
    max_depth: usize,
) -> Result<Branch, ReductionError> {
    let mut w = whnf_with(t, p, &mut budget)?;
    w.steps += steps_so_far;
    let Some(k) = w.class.stuck_index() else {
        return Ok((SplitTree::Leaf, vec![(p.clone(), w)]));
    };
    if depth >= max_depth {
        return Err(ReductionError::SplitDepthExceeded {
            depth: max_depth,
            condition: p.clone(),
        });
    }
    let [p0, p1] = p.split(k).expect("stuck index lies outside the condition");
    let (r0, r1) = rayon::join(
        || eval_branch(&w.term, &p0, budget, w.steps, depth + 1, max_depth),
        || eval_branch(&w.term, &p1, budget, w.steps, depth + 1, max_depth),
    );
    let (t0, mut l0) = r0?;
    let (t1, l1) = r1?;
    l0.extend(l1);
    Ok((SplitTree::split(k, t0, t1), l0))
}
