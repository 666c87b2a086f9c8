//! Frequently used types and the types of the forcing constants.

use crate::condition::Condition;
use crate::syntax::{shift_from, subst, Term};

/// `IsZero := λy. rec_N2 (λx.U) N1 N0 y`
pub fn is_zero_fn() -> Term {
    Term::lam(Term::app(
        Term::rec_n2(Term::Universe, Term::Unit, Term::Empty),
        Term::Var(0),
    ))
}

/// `IsZero t`
pub fn is_zero(t: Term) -> Term {
    Term::app(is_zero_fn(), t)
}

/// `Σ(x:N) IsZero (h x)` for a closed-in-context `h`.
pub fn exists_zero(h: &Term) -> Term {
    Term::sigma(
        Term::Nat,
        is_zero(Term::app(crate::syntax::shift(h, 1), Term::Var(0))),
    )
}

/// `N → N2`
pub fn binary_sequence() -> Term {
    Term::arrow(Term::Nat, Term::Bool)
}

/// `Π(h:N→N2)[¬¬Σ(x:N) IsZero(h x) → Σ(x:N) IsZero(h x)]`
pub fn markov() -> Term {
    let t = exists_zero(&Term::Var(0));
    Term::pi(
        binary_sequence(),
        Term::arrow(Term::not(Term::not(t.clone())), t),
    )
}

/// `Π(A:U)(¬¬A → A)`
pub fn double_negation_elim() -> Term {
    Term::pi(
        Term::Universe,
        Term::arrow(Term::not(Term::not(Term::Var(0))), Term::Var(0)),
    )
}

/// `λh. d T(h)` where `d` is the variable at index `d_index` outside the λ.
pub fn markov_from_dne(d_index: usize) -> Term {
    Term::lam(Term::app(Term::Var(d_index + 1), exists_zero(&Term::Var(0))))
}

/// Type of `f` and of every `f_q`.
pub fn generic_type() -> Term {
    binary_sequence()
}

/// `¬¬Σ(x:N) IsZero(f x)`
pub fn axiom_type() -> Term {
    Term::not(Term::not(exists_zero(&Term::Generic)))
}

/// `¬¬Σ(x:N) IsZero(f_q x)`
pub fn axiom_at_type(q: &Condition) -> Term {
    Term::not(Term::not(exists_zero(&Term::GenericAt(q.clone()))))
}

/// `¬MP`
pub fn mp_witness_type() -> Term {
    Term::not(markov())
}

/// `C[t]` for a motive body `C`.
pub fn motive_at(motive: &Term, t: &Term) -> Term {
    subst(motive, t)
}

/// `Π(x:N)(C[x] → C[S x])`, the type of the successor branch of `rec_N`.
pub fn nat_step_type(motive: &Term) -> Term {
    let next = subst(&shift_from(motive, 1, 1), &Term::succ(Term::Var(0)));
    Term::pi(Term::Nat, Term::arrow(motive.clone(), next))
}

/// `λx. x (n̄, 0)`
pub fn witness_of_zero_at(n: u64) -> Term {
    Term::lam(Term::app(Term::Var(0), Term::pair(Term::numeral(n), Term::Zero)))
}
