//! Executable fragments of the forcing semantics: the forcing relation at
//! base types, a sampling harness for Π-types, refutation of witnesses for
//! `Σ(x:N) IsZero(f x)`, and the translation replacing `f` by a concrete
//! sequence `g`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::condition::{Bit, Condition, Partition};
use crate::prelude;
use crate::reduction::{self, ReductionError, WhnfClass};
use crate::syntax::{subst, Mode, ModeViolation, Term};
use crate::typecheck::{self, Diagnostic, Judgment, JudgmentKind, Limits};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "type", rename_all = "kebab-case")]
pub enum ForcingClassifier {
    /// `p ⊩ A`
    Type,
    /// `p ⊩ t : A`
    TypedTerm(Term),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ForcingQuery {
    pub condition: Condition,
    pub subject: Term,
    pub classifier: ForcingClassifier,
    pub mode: Mode,
    #[serde(skip)]
    pub limits: Limits,
}

impl ForcingQuery {
    pub fn ty(condition: Condition, subject: Term, mode: Mode) -> Self {
        ForcingQuery {
            condition,
            subject,
            classifier: ForcingClassifier::Type,
            mode,
            limits: Limits::default(),
        }
    }

    pub fn term(condition: Condition, subject: Term, ty: Term, mode: Mode) -> Self {
        ForcingQuery {
            condition,
            subject,
            classifier: ForcingClassifier::TypedTerm(ty),
            mode,
            limits: Limits::default(),
        }
    }

    pub fn at(&self, condition: Condition) -> Self {
        ForcingQuery {
            condition,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("`{classifier}` at {condition} is not a base type; only N0, N1, N2, N and U are decided")]
    NonBase { classifier: Term, condition: Condition },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcingLeaf {
    pub condition: Condition,
    /// whnf of the classifier at this leaf; `None` when the subject is a type.
    pub classifier: Option<Term>,
    pub whnf: Term,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcingOutcome {
    pub forced: bool,
    /// Leaves at which the clause was decided.
    pub leaves: Vec<ForcingLeaf>,
    /// Set when the typing premise `⊢_p J` fails; `forced` is then false.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premise: Option<Diagnostic>,
}

impl ForcingOutcome {
    /// The partition of the query's condition formed by the leaves.
    pub fn partition(&self, root: &Condition) -> Option<Partition> {
        let leaves: Vec<_> = self.leaves.iter().map(|l| l.condition.clone()).collect();
        crate::condition::find_partition(root, &leaves)
    }
}

/// Decide `p ⊩ A` or `p ⊩ t : A` for a base classifier.
///
/// The typing premise is checked first; an ill-typed subject is not forced.
pub fn forces_base(q: &ForcingQuery) -> Result<ForcingOutcome, SemanticsError> {
    let limits = q.limits;
    let p = &q.condition;
    let ctx = crate::syntax::Context::new();
    let premise = match &q.classifier {
        ForcingClassifier::Type => typecheck::check_type(&ctx, p, &q.subject, q.mode, limits),
        ForcingClassifier::TypedTerm(ty) => typecheck::check(&ctx, p, &q.subject, ty, q.mode, limits),
    };
    if !premise.accepted() {
        return Ok(ForcingOutcome {
            forced: false,
            leaves: Vec::new(),
            premise: premise.diagnostics.into_iter().next(),
        });
    }
    let mut leaves = Vec::new();
    match &q.classifier {
        ForcingClassifier::Type => {
            let eval = reduction::partition_eval(&q.subject, p, q.mode, limits.fuel, limits.max_depth)?;
            for (cond, w) in eval.leaves {
                let holds = match &w.term {
                    Term::Empty | Term::Unit | Term::Bool | Term::Nat | Term::Universe => true,
                    Term::Pi(..) | Term::Sigma(..) => {
                        return Err(SemanticsError::NonBase {
                            classifier: w.term,
                            condition: cond,
                        })
                    }
                    _ => false,
                };
                leaves.push(ForcingLeaf {
                    condition: cond,
                    classifier: None,
                    whnf: w.term,
                    holds,
                });
            }
        }
        ForcingClassifier::TypedTerm(ty) => {
            let types = reduction::partition_eval(ty, p, q.mode, limits.fuel, limits.max_depth)?;
            for (cond, tyw) in types.leaves {
                let depth_left = limits.max_depth.saturating_sub(cond.len() - p.len());
                let eval = reduction::partition_eval(&q.subject, &cond, q.mode, limits.fuel, depth_left)?;
                for (leaf, w) in eval.leaves {
                    let holds = match (&tyw.term, &w.term) {
                        (Term::Empty, _) => false,
                        (Term::Unit, t) => *t == Term::Zero,
                        (Term::Bool, t) => t.as_bit().is_some(),
                        (Term::Nat, t) => t.as_numeral().is_some(),
                        (Term::Universe, t) => match t {
                            Term::Empty | Term::Unit | Term::Bool | Term::Nat => true,
                            Term::Pi(..) | Term::Sigma(..) => {
                                return Err(SemanticsError::NonBase {
                                    classifier: t.clone(),
                                    condition: leaf,
                                })
                            }
                            _ => false,
                        },
                        (other, _) => {
                            return Err(SemanticsError::NonBase {
                                classifier: other.clone(),
                                condition: leaf,
                            })
                        }
                    };
                    leaves.push(ForcingLeaf {
                        condition: leaf,
                        classifier: Some(tyw.term.clone()),
                        whnf: w.term,
                        holds,
                    });
                }
            }
        }
    }
    leaves.sort_by(|a, b| a.condition.cmp(&b.condition));
    Ok(ForcingOutcome {
        forced: leaves.iter().all(|l| l.holds),
        leaves,
        premise: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpotFailure {
    pub condition: Condition,
    pub argument: Term,
    pub reason: String,
}

/// Outcome of sampling `q ⊩ a : F ⇒ q ⊩ t a : G[a]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpotCheckReport {
    pub passed: usize,
    /// Samples whose argument is not forced at `F`.
    pub skipped: usize,
    pub failures: Vec<SpotFailure>,
    /// Samples that are ill-typed or do not extend `p`.
    pub diagnostics: Vec<Diagnostic>,
}

impl SpotCheckReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.diagnostics.is_empty()
    }
}

/// Sample the Π clause of the forcing relation for `t : Π(x:F) G`.
pub fn spot_check_pi(
    p: &Condition,
    t: &Term,
    dom: &Term,
    cod: &Term,
    samples: &[(Condition, Term)],
    mode: Mode,
    limits: Limits,
) -> Result<SpotCheckReport, SemanticsError> {
    let mut report = SpotCheckReport::default();
    for (q, a) in samples {
        if !q.extends(p) {
            let mut d = Diagnostic::error(format!("sample condition {q} does not extend {p}"));
            d.condition = Some(q.clone());
            report.diagnostics.push(d);
            continue;
        }
        let mut arg_q = ForcingQuery::term(q.clone(), a.clone(), dom.clone(), mode);
        arg_q.limits = limits;
        let arg = forces_base(&arg_q)?;
        if let Some(mut d) = arg.premise {
            d.message = format!("sample `{a}` is ill-typed: {}", d.message);
            report.diagnostics.push(d);
            continue;
        }
        if !arg.forced {
            report.skipped += 1;
            continue;
        }
        let mut app_q = ForcingQuery::term(q.clone(), Term::app(t.clone(), a.clone()), subst(cod, a), mode);
        app_q.limits = limits;
        let app = forces_base(&app_q)?;
        if app.forced {
            report.passed += 1;
        } else {
            let reason = match &app.premise {
                Some(d) => d.message.clone(),
                None => "application is not forced at the codomain".to_string(),
            };
            report.failures.push(SpotFailure {
                condition: q.clone(),
                argument: a.clone(),
                reason,
            });
        }
    }
    Ok(report)
}

/// The sequence in `Σ(x:N) IsZero(h x)` a refutation is about.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RefutationTarget {
    /// `f`
    Generic,
    /// `f_q`
    GenericAt(Condition),
}

impl RefutationTarget {
    pub fn sequence(&self) -> Term {
        match self {
            RefutationTarget::Generic => Term::Generic,
            RefutationTarget::GenericAt(q) => Term::GenericAt(q.clone()),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            RefutationTarget::Generic => Mode::Forcing,
            RefutationTarget::GenericAt(_) => Mode::ManyReals,
        }
    }

    /// `Σ(x:N) IsZero(h x)`
    pub fn sigma(&self) -> Term {
        prelude::exists_zero(&self.sequence())
    }
}

impl Serialize for RefutationTarget {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.sequence().serialize(s)
    }
}

/// Evidence that `candidate` is not a closed witness of `Σ(x:N) IsZero(h x)`:
/// at `condition`, `candidate.1 ⇝* n̄` and `IsZero(h n̄) ⇝* N0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationCertificate {
    pub candidate: Term,
    pub target: RefutationTarget,
    /// Partition of ∅ produced by evaluating `candidate.1`.
    pub partition: Partition,
    /// The leaf that sets every split bit to 1.
    pub all_ones_leaf: Condition,
    pub condition: Condition,
    pub numeral: u64,
    /// Whether `condition` extends the leaf with `numeral ↦ 1`.
    pub extended: bool,
    pub first_steps: u64,
    pub is_zero_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CannotRefute {
    #[error(transparent)]
    Mode(#[from] ModeViolation),
    #[error("first component did not reach a numeral: {0}")]
    Reduction(ReductionError),
    #[error("first component reduces to `{whnf}` at {condition}, which is not a numeral")]
    NotANumeral { condition: Condition, whnf: Term },
    #[error("IsZero at {numeral} reduces to `{whnf}` at {condition} instead of N0")]
    NotEmpty {
        condition: Condition,
        numeral: u64,
        whnf: Term,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("replay produced `{found}` where the certificate records `{expected}`")]
    Diverged { expected: Term, found: Term },
}

impl RefutationCertificate {
    /// Re-run both recorded reductions at `condition`.
    pub fn replay(&self, fuel: u64) -> Result<(), ReplayError> {
        let mode = self.target.mode();
        let first = reduction::whnf(&Term::fst(self.candidate.clone()), &self.condition, mode, fuel)?;
        if first.term != Term::numeral(self.numeral) {
            return Err(ReplayError::Diverged {
                expected: Term::numeral(self.numeral),
                found: first.term,
            });
        }
        let ty = is_zero_at(&self.target, self.numeral);
        let w = reduction::whnf(&ty, &self.condition, mode, fuel)?;
        if w.term != Term::Empty {
            return Err(ReplayError::Diverged {
                expected: Term::Empty,
                found: w.term,
            });
        }
        Ok(())
    }
}

fn is_zero_at(target: &RefutationTarget, n: u64) -> Term {
    prelude::is_zero(Term::app(target.sequence(), Term::numeral(n)))
}

/// Show that the closed term `t` does not check against `Σ(x:N) IsZero(h x)`
/// at ∅ by finding a condition where its witness index maps to bit 1.
pub fn refute_sigma(
    t: &Term,
    target: &RefutationTarget,
    limits: Limits,
) -> Result<RefutationCertificate, CannotRefute> {
    let mode = target.mode();
    mode.admits(t)?;
    let root = Condition::new();
    let first = Term::fst(t.clone());
    let eval = reduction::partition_eval(&first, &root, mode, limits.fuel, limits.max_depth)
        .map_err(CannotRefute::Reduction)?;
    let leaf = eval.partition.all_ones_leaf();
    let w = eval.leaf(&leaf).expect("all-ones leaf belongs to the partition").clone();
    let Some(n) = w.term.as_numeral() else {
        return Err(CannotRefute::NotANumeral {
            condition: leaf,
            whnf: w.term,
        });
    };
    let forced_one = matches!(target, RefutationTarget::GenericAt(q) if q.contains(n));
    let (condition, extended) = if forced_one || leaf.contains(n) {
        (leaf.clone(), false)
    } else {
        (leaf.extend(n, Bit::One).expect("n is fresh"), true)
    };
    let iz = reduction::whnf(&is_zero_at(target, n), &condition, mode, limits.fuel)
        .map_err(CannotRefute::Reduction)?;
    if iz.term != Term::Empty || iz.class != WhnfClass::Canonical {
        return Err(CannotRefute::NotEmpty {
            condition,
            numeral: n,
            whnf: iz.term,
        });
    }
    Ok(RefutationCertificate {
        candidate: t.clone(),
        target: target.clone(),
        partition: eval.partition,
        all_ones_leaf: leaf,
        condition,
        numeral: n,
        extended,
        first_steps: w.steps,
        is_zero_steps: iz.steps,
    })
}

pub const DEFAULT_SCAN_BOUND: u64 = 64;

/// A closed plain `g : N → N2` verified compatible with a condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericInstance {
    pub g: Term,
    pub condition: Condition,
    /// Indices `n ≤ scanned_to` with `g n̄ ⇝* 1`.
    pub ones: BTreeSet<u64>,
    pub scanned_to: u64,
    /// Least `n` with `g n̄ ⇝* 0`.
    pub n_g: u64,
    /// `λx. x (n̄_g, 0)`
    pub v_g: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("`{g}` is not a closed plain term of type N -> N2: {reason}")]
    IllTyped { g: Term, reason: String },
    #[error("`{g}` is incompatible with {condition} at {n}: expected {expected}, got `{found}`")]
    Incompatible {
        g: Term,
        condition: Condition,
        n: u64,
        expected: Bit,
        found: Term,
    },
    #[error("`{g}` applied to {n} does not reduce to a bit: `{found}`")]
    NotABit { g: Term, n: u64, found: Term },
    #[error("no n ≤ {bound} with `{g}` n = 0")]
    NoZeroFound { g: Term, bound: u64 },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

fn bit_of(g: &Term, n: u64, fuel: u64) -> Result<Bit, InstanceError> {
    let w = reduction::whnf(&Term::app(g.clone(), Term::numeral(n)), &Condition::new(), Mode::Plain, fuel)?;
    w.term.as_bit().ok_or(InstanceError::NotABit {
        g: g.clone(),
        n,
        found: w.term,
    })
}

/// Check `g` against `p` on `dom p` and on every `n ≤ scan_bound`, and
/// compute `n_g` and `v_g`.
pub fn build_generic_instance(
    g: &Term,
    p: &Condition,
    scan_bound: u64,
    limits: Limits,
) -> Result<GenericInstance, InstanceError> {
    let ctx = crate::syntax::Context::new();
    let cert = typecheck::check(&ctx, &Condition::new(), g, &prelude::generic_type(), Mode::Plain, limits);
    if !g.is_closed() || !cert.accepted() {
        let reason = cert
            .diagnostics
            .first()
            .map(|d| d.message.clone())
            .unwrap_or_else(|| "term is open".to_string());
        return Err(InstanceError::IllTyped { g: g.clone(), reason });
    }
    let top = p.domain().max().map_or(scan_bound, |m| m.max(scan_bound));
    let mut ones = BTreeSet::new();
    let mut n_g = None;
    for n in 0..=top {
        let b = bit_of(g, n, limits.fuel)?;
        let expected = p.get(n).unwrap_or(Bit::Zero);
        if b != expected {
            return Err(InstanceError::Incompatible {
                g: g.clone(),
                condition: p.clone(),
                n,
                expected,
                found: Term::bit(b),
            });
        }
        match b {
            Bit::One => {
                ones.insert(n);
            }
            Bit::Zero => {
                n_g.get_or_insert(n);
            }
        }
    }
    let Some(n_g) = n_g else {
        return Err(InstanceError::NoZeroFound { g: g.clone(), bound: top });
    };
    Ok(GenericInstance {
        g: g.clone(),
        condition: p.clone(),
        ones,
        scanned_to: top,
        n_g,
        v_g: prelude::witness_of_zero_at(n_g),
    })
}

impl GenericInstance {
    /// Whether `g` is compatible with `q`, judged on `dom q` and the scanned range.
    pub fn compatible_with(&self, q: &Condition, fuel: u64) -> Result<bool, InstanceError> {
        for (n, b) in q.iter() {
            let got = if n <= self.scanned_to {
                if self.ones.contains(&n) { Bit::One } else { Bit::Zero }
            } else {
                bit_of(&self.g, n, fuel)?
            };
            if got != b {
                return Ok(false);
            }
        }
        Ok(self.ones.iter().all(|n| q.contains(*n)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("only forcing-mode judgments are translated, not {0}-mode ones")]
    ModeMismatch(Mode),
    #[error("`{0}` belongs to the many-reals extension, which is not translated")]
    ManyRealsUnsupported(Term),
    #[error("`{g}` is not compatible with the judgment's condition {condition}")]
    IncompatibleCondition { g: Term, condition: Condition },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Replace `f` by `g` and then `w` by `v_g`, giving a plain judgment at ∅.
pub fn conservativity_translate(j: &Judgment, inst: &GenericInstance, fuel: u64) -> Result<Judgment, TranslateError> {
    if j.mode != Mode::Forcing {
        return Err(TranslateError::ModeMismatch(j.mode));
    }
    for t in j.terms() {
        let mut bad = None;
        t.for_each_subterm(&mut |s| {
            if bad.is_none() && matches!(s, Term::GenericAt(_) | Term::AxiomAt(_) | Term::MpWitness) {
                bad = Some(s.clone());
            }
        });
        if let Some(s) = bad {
            return Err(TranslateError::ManyRealsUnsupported(s));
        }
    }
    if !inst.compatible_with(&j.condition, fuel)? {
        return Err(TranslateError::IncompatibleCondition {
            g: inst.g.clone(),
            condition: j.condition.clone(),
        });
    }
    let replace = |t: &Term| {
        t.replace_constants(&|c| (*c == Term::Generic).then(|| inst.g.clone()))
            .replace_constants(&|c| (*c == Term::Axiom).then(|| inst.v_g.clone()))
    };
    let kind = match &j.kind {
        JudgmentKind::CtxWf => JudgmentKind::CtxWf,
        JudgmentKind::Type { ty } => JudgmentKind::Type { ty: replace(ty) },
        JudgmentKind::TypeEq { lhs, rhs } => JudgmentKind::TypeEq {
            lhs: replace(lhs),
            rhs: replace(rhs),
        },
        JudgmentKind::Term { term, ty } => JudgmentKind::Term {
            term: replace(term),
            ty: replace(ty),
        },
        JudgmentKind::TermEq { lhs, rhs, ty } => JudgmentKind::TermEq {
            lhs: replace(lhs),
            rhs: replace(rhs),
            ty: replace(ty),
        },
    };
    Ok(Judgment::new(
        j.context.map(|t| replace(t)),
        Condition::new(),
        Mode::Plain,
        kind,
    ))
}
