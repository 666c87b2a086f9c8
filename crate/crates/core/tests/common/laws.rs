//! The reduction lemmas as executable checks on one `(term, condition)` pair.

use mltt_forcing::condition::{Bit, Condition};
use mltt_forcing::reduction::{step, whnf, StepResult, WhnfClass};
use mltt_forcing::{Mode, Term};
use rand::Rng;

use super::{fresh_index, random_condition};

const MODE: Mode = Mode::ManyReals;
const FUEL: u64 = 20_000;

fn stepped(t: &Term, p: &Condition) -> Option<Term> {
    match step(t, p, MODE).expect("generated terms respect the mode") {
        StepResult::Stepped(u) => Some(u),
        StepResult::Whnf(_) => None,
    }
}

fn stuck_at(t: &Term, p: &Condition) -> Option<u64> {
    match step(t, p, MODE).unwrap() {
        StepResult::Whnf(c) => c.stuck_index(),
        StepResult::Stepped(_) => None,
    }
}

/// Check every law at `t` and `p`, with `q` an extension of `p` and `m` a
/// fresh index.
pub fn laws_at(t: &Term, p: &Condition, q: &Condition, m: u64) -> Result<(), String> {
    let here = step(t, p, MODE).unwrap();
    // determinism
    if step(t, p, MODE).unwrap() != here {
        return Err(format!("step of {t} at {p} is not a function"));
    }
    match &here {
        StepResult::Stepped(u) if u == t => return Err(format!("{t} steps to itself at {p}")),
        StepResult::Whnf(WhnfClass::ProperStuck { index, context, redex }) => {
            if p.contains(*index) {
                return Err(format!("{t} stuck at {index} which is in {p}"));
            }
            if context.plug(redex.clone()) != *t {
                return Err(format!("stuck context of {t} does not plug back"));
            }
        }
        _ => {}
    }
    // monotonicity and the extension dichotomy
    let at_q = stepped(t, q);
    if let StepResult::Stepped(u) = &here {
        if at_q.as_ref() != Some(u) {
            return Err(format!("{t}: step at {p} is {u} but at {q} is {at_q:?}"));
        }
    }
    if let Some(u) = &at_q {
        let ok = match &here {
            StepResult::Stepped(v) => v == u,
            StepResult::Whnf(c) => c.stuck_index().is_some_and(|k| q.contains(k) && !p.contains(k)),
        };
        if !ok {
            return Err(format!("{t}: steps to {u} at {q} but {here:?} at {p}"));
        }
    }
    // locality and the stuck dichotomy at a fresh index
    let p0 = p.extend(m, Bit::Zero).unwrap();
    let p1 = p.extend(m, Bit::One).unwrap();
    match (stepped(t, &p0), stepped(t, &p1)) {
        (Some(u0), Some(u1)) if u0 == u1 => {
            if stepped(t, p).as_ref() != Some(&u0) {
                return Err(format!("{t}: both halves at {m} step to {u0}, {p} does not"));
            }
        }
        (Some(_), Some(_)) if stuck_at(t, p) != Some(m) => {
            return Err(format!("{t}: halves at {m} differ but {t} is not stuck on f {m}"));
        }
        _ => {}
    }
    // uniqueness of whnf: t and its reduct share a whnf
    if let StepResult::Stepped(u) = &here {
        if let (Ok(a), Ok(b)) = (whnf(t, p, MODE, FUEL), whnf(u, p, MODE, FUEL)) {
            if a.term != b.term || a.class != b.class {
                return Err(format!("{t} and its reduct {u} have different whnfs at {p}"));
            }
        }
    }
    Ok(())
}

/// Check the laws along the first `path` steps from `t`. Returns the number
/// of pairs checked.
pub fn laws_along(t: &Term, p: &Condition, rng: &mut impl Rng, path: usize) -> Result<usize, String> {
    let mut current = t.clone();
    let mut checked = 0;
    for _ in 0..path {
        let extra = random_condition(rng, 8, 3);
        let q = p.join(&extra).unwrap_or_else(|| p.clone());
        let m = fresh_index(rng, p, 8);
        laws_at(&current, p, &q, m)?;
        checked += 1;
        match stepped(&current, p) {
            Some(u) => current = u,
            None => break,
        }
    }
    Ok(checked)
}
