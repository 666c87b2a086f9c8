//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod laws;

use std::collections::BTreeSet;
use std::rc::Rc;

use mltt_forcing::condition::{Bit, Condition};
use mltt_forcing::prelude;
use mltt_forcing::reduction::{Whnf, WhnfClass};
use mltt_forcing::Term;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cond(s: &str) -> Condition {
    s.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Conditions

/// A random condition with keys below `max_index`.
pub fn random_condition(rng: &mut impl Rng, max_index: u64, max_len: usize) -> Condition {
    let len = rng.gen_range(0..=max_len);
    let mut pairs = Vec::new();
    for _ in 0..len {
        let k = rng.gen_range(0..max_index);
        if pairs.iter().all(|(j, _)| *j != k) {
            pairs.push((k, if rng.gen_bool(0.5) { Bit::One } else { Bit::Zero }));
        }
    }
    Condition::from_pairs(pairs).unwrap()
}

/// An index outside `dom p`, below `max_index` when possible.
pub fn fresh_index(rng: &mut impl Rng, p: &Condition, max_index: u64) -> u64 {
    let free: Vec<u64> = (0..max_index).filter(|k| !p.contains(*k)).collect();
    match free.choose(rng) {
        Some(k) => *k,
        None => max_index + p.len() as u64,
    }
}

pub fn condition_strategy(max_index: u64, max_len: usize) -> impl Strategy<Value = Condition> {
    prop::collection::btree_map(0..max_index, prop::bool::ANY, 0..=max_len).prop_map(|m| {
        Condition::from_pairs(m.into_iter().map(|(k, b)| (k, if b { Bit::One } else { Bit::Zero }))).unwrap()
    })
}

/// Exhaustive search for a derivation of `p ◁ leaves` by the two
/// partition clauses, trying every split index.
pub fn partition_oracle(p: &Condition, leaves: &[Condition]) -> bool {
    let set: BTreeSet<Condition> = leaves.iter().cloned().collect();
    derive(p, &set)
}

fn derive(p: &Condition, s: &BTreeSet<Condition>) -> bool {
    if s.len() == 1 && s.contains(p) {
        return true;
    }
    if s.is_empty() {
        return false;
    }
    let keys: BTreeSet<u64> = s.iter().flat_map(|q| q.domain().collect::<Vec<_>>()).collect();
    for k in keys.into_iter().filter(|k| !p.contains(*k)) {
        if s.iter().any(|q| !q.contains(k)) {
            continue;
        }
        let part = |b: Bit| -> BTreeSet<Condition> { s.iter().filter(|q| q.get(k) == Some(b)).cloned().collect() };
        let (s0, s1) = (part(Bit::Zero), part(Bit::One));
        if derive(&p.extend(k, Bit::Zero).unwrap(), &s0) && derive(&p.extend(k, Bit::One).unwrap(), &s1) {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Well-typed closed terms

/// Simple types the generator produces inhabitants of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Nat,
    Bool,
    Unit,
    Univ,
    NatToBool,
    NatToNat,
    SigNatBool,
}

impl Ty {
    pub fn term(self) -> Term {
        match self {
            Ty::Nat => Term::Nat,
            Ty::Bool => Term::Bool,
            Ty::Unit => Term::Unit,
            Ty::Univ => Term::Universe,
            Ty::NatToBool => Term::arrow(Term::Nat, Term::Bool),
            Ty::NatToNat => Term::arrow(Term::Nat, Term::Nat),
            Ty::SigNatBool => Term::sigma(Term::Nat, Term::Bool),
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, Ty::Nat | Ty::Bool | Ty::Unit | Ty::Univ)
    }
}

pub const BASE_TYS: [Ty; 4] = [Ty::Nat, Ty::Bool, Ty::Unit, Ty::Univ];

pub struct TypedGen<R> {
    pub rng: R,
    /// Indices used in `f k̄` are below this bound.
    pub max_index: u64,
    /// Also emit `f[q]`.
    pub many_reals: bool,
    /// Emit `f` at all; without it the terms are plain.
    pub generic: bool,
}

impl<R: Rng> TypedGen<R> {
    pub fn new(rng: R) -> Self {
        TypedGen {
            rng,
            max_index: 6,
            many_reals: false,
            generic: true,
        }
    }

    pub fn closed(&mut self, ty: Ty, depth: u32) -> Term {
        self.gen(ty, &mut Vec::new(), depth)
    }

    fn var(&mut self, ty: Ty, env: &[Ty]) -> Option<Term> {
        let hits: Vec<usize> = env
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == ty)
            .map(|(i, _)| env.len() - 1 - i)
            .collect();
        hits.choose(&mut self.rng).map(|i| Term::Var(*i))
    }

    fn small_numeral(&mut self) -> Term {
        Term::numeral(self.rng.gen_range(0..self.max_index))
    }

    fn under(&mut self, ty: Ty, env: &mut Vec<Ty>, binder: Ty, depth: u32) -> Term {
        env.push(binder);
        let t = self.gen(ty, env, depth);
        env.pop();
        t
    }

    fn generic_bit(&mut self, env: &mut Vec<Ty>, depth: u32) -> Term {
        let arg = if self.rng.gen_bool(0.6) {
            self.small_numeral()
        } else {
            self.gen(Ty::Nat, env, depth.saturating_sub(1))
        };
        if self.many_reals && self.rng.gen_bool(0.3) {
            let q = random_condition(&mut self.rng, self.max_index, 2);
            Term::app(Term::GenericAt(q), arg)
        } else {
            Term::app(Term::Generic, arg)
        }
    }

    pub fn gen(&mut self, ty: Ty, env: &mut Vec<Ty>, depth: u32) -> Term {
        if self.rng.gen_bool(0.25) {
            if let Some(v) = self.var(ty, env) {
                return v;
            }
        }
        let leaf = depth == 0 || self.rng.gen_bool(0.2);
        let d = depth.saturating_sub(1);
        match ty {
            Ty::Nat => {
                if leaf {
                    return self.small_numeral();
                }
                match self.rng.gen_range(0..6) {
                    0 => Term::succ(self.gen(Ty::Nat, env, d)),
                    1 => Term::app(
                        Term::rec_n2(Term::Nat, self.gen(Ty::Nat, env, d), self.gen(Ty::Nat, env, d)),
                        self.gen(Ty::Bool, env, d),
                    ),
                    2 => {
                        env.push(Ty::Nat);
                        env.push(Ty::Nat);
                        let step = self.gen(Ty::Nat, env, d);
                        env.pop();
                        env.pop();
                        let scrutinee = Term::numeral(self.rng.gen_range(0..4));
                        Term::app(
                            Term::rec_nat(Term::Nat, self.gen(Ty::Nat, env, d), Term::lam(Term::lam(step))),
                            scrutinee,
                        )
                    }
                    3 => Term::app(self.gen(Ty::NatToNat, env, d), self.gen(Ty::Nat, env, d)),
                    4 => Term::app(Term::lam(self.under(Ty::Nat, env, Ty::Nat, d)), self.small_numeral()),
                    _ => self.small_numeral(),
                }
            }
            Ty::Bool => {
                if leaf {
                    return match self.rng.gen_range(0..3) {
                        0 => Term::Zero,
                        1 => Term::One,
                        _ if self.generic => self.generic_bit(env, 0),
                        _ => Term::One,
                    };
                }
                match self.rng.gen_range(0..6) {
                    0 | 1 if self.generic => self.generic_bit(env, depth),
                    2 => Term::app(
                        Term::rec_n2(Term::Bool, self.gen(Ty::Bool, env, d), self.gen(Ty::Bool, env, d)),
                        self.gen(Ty::Bool, env, d),
                    ),
                    3 => Term::app(self.gen(Ty::NatToBool, env, d), self.gen(Ty::Nat, env, d)),
                    4 => {
                        env.push(Ty::Nat);
                        env.push(Ty::Bool);
                        let step = self.gen(Ty::Bool, env, d);
                        env.pop();
                        env.pop();
                        Term::app(
                            Term::rec_nat(Term::Bool, self.gen(Ty::Bool, env, d), Term::lam(Term::lam(step))),
                            Term::numeral(self.rng.gen_range(0..3)),
                        )
                    }
                    _ => {
                        if self.rng.gen_bool(0.5) {
                            Term::Zero
                        } else {
                            Term::One
                        }
                    }
                }
            }
            Ty::Unit => {
                if leaf {
                    return Term::Zero;
                }
                match self.rng.gen_range(0..3) {
                    0 => Term::app(
                        Term::rec_n2(Term::Unit, self.gen(Ty::Unit, env, d), self.gen(Ty::Unit, env, d)),
                        self.gen(Ty::Bool, env, d),
                    ),
                    1 => Term::app(Term::rec_n1(Term::Unit, self.gen(Ty::Unit, env, d)), self.gen(Ty::Unit, env, d)),
                    _ => Term::Zero,
                }
            }
            Ty::Univ => {
                if leaf {
                    return [Term::Nat, Term::Bool, Term::Unit, Term::Empty]
                        .choose(&mut self.rng)
                        .unwrap()
                        .clone();
                }
                match self.rng.gen_range(0..3) {
                    0 => Term::app(
                        Term::rec_n2(Term::Universe, self.gen(Ty::Univ, env, d), self.gen(Ty::Univ, env, d)),
                        self.gen(Ty::Bool, env, d),
                    ),
                    1 => prelude::is_zero(self.gen(Ty::Bool, env, d)),
                    _ => Term::Nat,
                }
            }
            Ty::NatToBool => {
                if self.generic && (leaf || self.rng.gen_bool(0.3)) {
                    return Term::Generic;
                }
                Term::lam(self.under(Ty::Bool, env, Ty::Nat, d))
            }
            Ty::NatToNat => Term::lam(self.under(Ty::Nat, env, Ty::Nat, d)),
            Ty::SigNatBool => Term::pair(self.gen(Ty::Nat, env, d), self.gen(Ty::Bool, env, d)),
        }
    }
}

/// Closed, well-typed `(term, type)` pairs from a seed.
pub fn typed_term(seed: u64, ty: Ty, depth: u32) -> Term {
    TypedGen::new(rng(seed)).closed(ty, depth)
}

pub fn typed_strategy(tys: &'static [Ty], depth: u32) -> impl Strategy<Value = (Term, Ty)> {
    (any::<u64>(), 0..tys.len()).prop_map(move |(seed, i)| (typed_term(seed, tys[i], depth), tys[i]))
}

// ---------------------------------------------------------------------------
// Raw terms (not necessarily well typed)

/// Closed terms built from redex shapes, with no guarantee of typing.
pub fn raw_term(rng: &mut impl Rng, depth: u32, scope: usize, max_index: u64) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.15);
    if leaf {
        let mut leaves = vec![
            Term::Zero,
            Term::One,
            Term::numeral(rng.gen_range(0..max_index)),
            Term::Nat,
            Term::Bool,
            Term::Generic,
            Term::Axiom,
        ];
        if scope > 0 {
            leaves.push(Term::Var(rng.gen_range(0..scope)));
        }
        return leaves.choose(rng).unwrap().clone();
    }
    let d = depth - 1;
    match rng.gen_range(0..11) {
        0 => Term::app(Term::Generic, raw_term(rng, d, scope, max_index)),
        1 => Term::app(Term::Generic, Term::numeral(rng.gen_range(0..max_index))),
        2 => Term::succ(raw_term(rng, d, scope, max_index)),
        3 => Term::lam(raw_term(rng, d, scope + 1, max_index)),
        4 => Term::app(
            Term::lam(raw_term(rng, d, scope + 1, max_index)),
            raw_term(rng, d, scope, max_index),
        ),
        5 => Term::pair(raw_term(rng, d, scope, max_index), raw_term(rng, d, scope, max_index)),
        6 => {
            let p = Term::pair(raw_term(rng, d, scope, max_index), raw_term(rng, d, scope, max_index));
            if rng.gen_bool(0.5) {
                Term::fst(p)
            } else {
                Term::snd(p)
            }
        }
        7 => Term::app(
            Term::rec_n2(
                Term::Nat,
                raw_term(rng, d, scope, max_index),
                raw_term(rng, d, scope, max_index),
            ),
            raw_term(rng, d, scope, max_index),
        ),
        8 => Term::app(
            Term::rec_nat(
                Term::Nat,
                raw_term(rng, d, scope, max_index),
                Term::lam(Term::lam(raw_term(rng, d, scope + 2, max_index))),
            ),
            raw_term(rng, d, scope, max_index),
        ),
        9 => Term::app(raw_term(rng, d, scope, max_index), raw_term(rng, d, scope, max_index)),
        _ => Term::pi(raw_term(rng, d, scope, max_index), raw_term(rng, d, scope + 1, max_index)),
    }
}

pub fn raw_strategy(depth: u32) -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(move |seed| raw_term(&mut rng(seed), depth, 0, 6))
}

/// Open terms with free variables below `scope`, including every binder form.
pub fn open_term(rng: &mut impl Rng, depth: u32, scope: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.2) {
        return if scope > 0 && rng.gen_bool(0.7) {
            Term::Var(rng.gen_range(0..scope))
        } else {
            [Term::Zero, Term::Nat, Term::Generic, Term::numeral(2)].choose(rng).unwrap().clone()
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Term::lam(open_term(rng, d, scope + 1)),
        1 => Term::pi(open_term(rng, d, scope), open_term(rng, d, scope + 1)),
        2 => Term::sigma(open_term(rng, d, scope), open_term(rng, d, scope + 1)),
        3 => Term::app(open_term(rng, d, scope), open_term(rng, d, scope)),
        4 => Term::pair(open_term(rng, d, scope), open_term(rng, d, scope)),
        5 => Term::rec_nat(open_term(rng, d, scope + 1), open_term(rng, d, scope), open_term(rng, d, scope)),
        6 => Term::rec_n2(open_term(rng, d, scope + 1), open_term(rng, d, scope), open_term(rng, d, scope)),
        7 => Term::succ(open_term(rng, d, scope)),
        _ => Term::fst(open_term(rng, d, scope)),
    }
}

// ---------------------------------------------------------------------------
// Named-variable substitution

#[derive(Clone, Debug)]
pub enum Named {
    Var(String),
    /// `template` is the original node; children replace its subterms in order.
    Node(Term, Vec<Child>),
}

#[derive(Clone, Debug)]
pub enum Child {
    Plain(Named),
    Bind(String, Named),
}

/// Subterms of a node, each flagged with whether it sits under a binder.
fn children(t: &Term) -> Vec<(bool, &Term)> {
    match t {
        Term::Pi(a, b) | Term::Sigma(a, b) => vec![(false, a), (true, b)],
        Term::Lam(b) => vec![(true, b)],
        Term::App(a, b) | Term::Pair(a, b) => vec![(false, a), (false, b)],
        Term::Succ(a) | Term::Fst(a) | Term::Snd(a) => vec![(false, a)],
        Term::RecN0(c) => vec![(true, c)],
        Term::RecN1(c, a) => vec![(true, c), (false, a)],
        Term::RecN2(c, a, b) | Term::RecN(c, a, b) => vec![(true, c), (false, a), (false, b)],
        _ => vec![],
    }
}

fn rebuild(template: &Term, kids: Vec<Term>) -> Term {
    let mut k = kids.into_iter();
    let mut next = || k.next().unwrap();
    match template {
        Term::Pi(..) => {
            let a = next();
            Term::pi(a, next())
        }
        Term::Sigma(..) => {
            let a = next();
            Term::sigma(a, next())
        }
        Term::Lam(_) => Term::lam(next()),
        Term::App(..) => {
            let a = next();
            Term::app(a, next())
        }
        Term::Pair(..) => {
            let a = next();
            Term::pair(a, next())
        }
        Term::Succ(_) => Term::succ(next()),
        Term::Fst(_) => Term::fst(next()),
        Term::Snd(_) => Term::snd(next()),
        Term::RecN0(_) => Term::rec_n0(next()),
        Term::RecN1(..) => {
            let c = next();
            Term::rec_n1(c, next())
        }
        Term::RecN2(..) => {
            let c = next();
            let a = next();
            Term::rec_n2(c, a, next())
        }
        Term::RecN(..) => {
            let c = next();
            let a = next();
            Term::rec_nat(c, a, next())
        }
        other => other.clone(),
    }
}

/// Convert to named form. Binder names come from a small pool so that
/// shadowing happens whenever it does not change meaning.
pub fn to_named(t: &Term, scope: &mut Vec<String>, rng: &mut impl Rng) -> Named {
    if let Term::Var(i) = t {
        return Named::Var(scope[scope.len() - 1 - i].clone());
    }
    let kids = children(t)
        .into_iter()
        .map(|(binds, c)| {
            if !binds {
                return Child::Plain(to_named(c, scope, rng));
            }
            let name = pick_binder(c, scope, rng);
            scope.push(name.clone());
            let body = to_named(c, scope, rng);
            scope.pop();
            Child::Bind(name, body)
        })
        .collect();
    Named::Node(t.clone(), kids)
}

fn pick_binder(body: &Term, scope: &[String], rng: &mut impl Rng) -> String {
    let mut pool: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    pool.extend(scope.iter().cloned());
    pool.shuffle(rng);
    for name in pool {
        // inside the body, the innermost earlier `name` would be Var(depth + 1)
        let shadowed = scope.iter().rev().position(|n| *n == name);
        if shadowed.is_none_or(|pos| !body.mentions_var(pos + 1)) {
            return name;
        }
    }
    format!("v{}", scope.len())
}

pub fn free_names(t: &Named, out: &mut BTreeSet<String>) {
    match t {
        Named::Var(x) => {
            out.insert(x.clone());
        }
        Named::Node(_, kids) => {
            for k in kids {
                match k {
                    Child::Plain(c) => free_names(c, out),
                    Child::Bind(x, c) => {
                        let mut inner = BTreeSet::new();
                        free_names(c, &mut inner);
                        inner.remove(x);
                        out.extend(inner);
                    }
                }
            }
        }
    }
}

fn rename(t: &Named, from: &str, to: &str) -> Named {
    named_subst(t, from, &Named::Var(to.to_string()))
}

/// Capture-avoiding `t[x := s]`.
pub fn named_subst(t: &Named, x: &str, s: &Named) -> Named {
    match t {
        Named::Var(y) if y == x => s.clone(),
        Named::Var(_) => t.clone(),
        Named::Node(tmpl, kids) => {
            let mut fv_s = BTreeSet::new();
            free_names(s, &mut fv_s);
            let kids = kids
                .iter()
                .map(|k| match k {
                    Child::Plain(c) => Child::Plain(named_subst(c, x, s)),
                    Child::Bind(y, _) if y == x => k.clone(),
                    Child::Bind(y, body) => {
                        let mut fv_body = BTreeSet::new();
                        free_names(body, &mut fv_body);
                        if fv_s.contains(y) && fv_body.contains(x) {
                            let mut fresh = format!("{y}'");
                            while fv_s.contains(&fresh) || fv_body.contains(&fresh) || fresh == x {
                                fresh.push('\'');
                            }
                            let body = rename(body, y, &fresh);
                            Child::Bind(fresh, named_subst(&body, x, s))
                        } else {
                            Child::Bind(y.clone(), named_subst(body, x, s))
                        }
                    }
                })
                .collect();
            Named::Node(tmpl.clone(), kids)
        }
    }
}

pub fn to_debruijn(t: &Named, scope: &mut Vec<String>) -> Term {
    match t {
        Named::Var(x) => Term::Var(
            scope
                .iter()
                .rev()
                .position(|n| n == x)
                .unwrap_or_else(|| panic!("unbound {x}")),
        ),
        Named::Node(tmpl, kids) => {
            let terms = kids
                .iter()
                .map(|k| match k {
                    Child::Plain(c) => to_debruijn(c, scope),
                    Child::Bind(x, c) => {
                        scope.push(x.clone());
                        let r = to_debruijn(c, scope);
                        scope.pop();
                        r
                    }
                })
                .collect();
            rebuild(tmpl, terms)
        }
    }
}

/// `body[0 := arg]` computed through named terms. `ambient` free variables
/// are shared by `arg` and by `body` above its bound variable.
pub fn named_subst_oracle(body: &Term, arg: &Term, ambient: usize, rng: &mut impl Rng) -> Term {
    let names: Vec<String> = (0..ambient).map(|i| format!("a{i}")).collect();
    let mut scope = names.clone();
    scope.push("b".into());
    let nb = to_named(body, &mut scope, rng);
    let mut scope = names.clone();
    let na = to_named(arg, &mut scope, rng);
    let r = named_subst(&nb, "b", &na);
    to_debruijn(&r, &mut names.clone())
}

// ---------------------------------------------------------------------------
// Call-by-name evaluator

/// What a closed term evaluates to, observed at the head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obs {
    /// `0` (shared by N, N1 and N2)
    Zero,
    Numeral(u64),
    One,
    Type(&'static str),
    Function,
    Pair,
    Opaque,
    Stuck(u64),
    Blocked,
    OutOfFuel,
}

#[derive(Clone)]
struct Thunk {
    term: Rc<Term>,
    env: Env,
}

type Env = Rc<Vec<Thunk>>;

#[derive(Clone)]
enum Val {
    Zero,
    One,
    Succ(Thunk),
    Type(&'static str),
    Closure(Rc<Term>, Env),
    Pair(Thunk, Thunk),
    Rec2(Thunk, Thunk),
    Rec1(Thunk),
    RecNat(Thunk, Thunk),
    Rec0,
    Generic(Option<Condition>),
    Opaque,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Halt {
    Stuck(u64),
    Blocked,
    Fuel,
}

/// Big-step evaluator with environments and lazy arguments. It shares no
/// code with the small-step engine.
pub struct Evaluator<'p> {
    p: &'p Condition,
    fuel: u64,
}

impl<'p> Evaluator<'p> {
    pub fn new(p: &'p Condition, fuel: u64) -> Self {
        Evaluator { p, fuel }
    }

    fn tick(&mut self) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn thunk(t: &Term, env: &Env) -> Thunk {
        Thunk {
            term: Rc::new(t.clone()),
            env: env.clone(),
        }
    }

    fn force(&mut self, th: &Thunk) -> Result<Val, Halt> {
        self.eval(&th.term.clone(), &th.env.clone())
    }

    fn eval(&mut self, t: &Term, env: &Env) -> Result<Val, Halt> {
        self.tick()?;
        match t {
            Term::Var(i) => {
                let th = env.get(env.len().wrapping_sub(1 + i)).cloned().ok_or(Halt::Blocked)?;
                self.force(&th)
            }
            Term::Universe => Ok(Val::Type("U")),
            Term::Nat => Ok(Val::Type("N")),
            Term::Empty => Ok(Val::Type("N0")),
            Term::Unit => Ok(Val::Type("N1")),
            Term::Bool => Ok(Val::Type("N2")),
            Term::Pi(..) => Ok(Val::Type("Pi")),
            Term::Sigma(..) => Ok(Val::Type("Sig")),
            Term::Zero => Ok(Val::Zero),
            Term::One => Ok(Val::One),
            Term::Succ(a) => Ok(Val::Succ(Self::thunk(a, env))),
            Term::Lam(b) => Ok(Val::Closure(Rc::new((**b).clone()), env.clone())),
            Term::Pair(a, b) => Ok(Val::Pair(Self::thunk(a, env), Self::thunk(b, env))),
            Term::Fst(e) | Term::Snd(e) => match self.eval(e, env)? {
                Val::Pair(a, b) => self.force(if matches!(t, Term::Fst(_)) { &a } else { &b }),
                Val::Opaque => Ok(Val::Opaque),
                _ => Err(Halt::Blocked),
            },
            Term::RecN0(_) => Ok(Val::Rec0),
            Term::RecN1(_, a) => Ok(Val::Rec1(Self::thunk(a, env))),
            Term::RecN2(_, a, b) => Ok(Val::Rec2(Self::thunk(a, env), Self::thunk(b, env))),
            Term::RecN(_, z, s) => Ok(Val::RecNat(Self::thunk(z, env), Self::thunk(s, env))),
            Term::Generic => Ok(Val::Generic(None)),
            Term::GenericAt(q) => Ok(Val::Generic(Some(q.clone()))),
            Term::Axiom | Term::AxiomAt(_) | Term::MpWitness => Ok(Val::Opaque),
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                self.apply(fv, Self::thunk(a, env))
            }
        }
    }

    fn apply(&mut self, f: Val, arg: Thunk) -> Result<Val, Halt> {
        self.tick()?;
        match f {
            Val::Closure(body, cenv) => {
                let mut env = (*cenv).clone();
                env.push(arg);
                self.eval(&body, &Rc::new(env))
            }
            Val::Generic(q) => {
                let n = self.numeral(&arg)?;
                if q.as_ref().is_some_and(|q| q.contains(n)) {
                    return Ok(Val::One);
                }
                match self.p.get(n) {
                    Some(Bit::Zero) => Ok(Val::Zero),
                    Some(Bit::One) => Ok(Val::One),
                    None => Err(Halt::Stuck(n)),
                }
            }
            Val::Rec2(a0, a1) => match self.force(&arg)? {
                Val::Zero => self.force(&a0),
                Val::One => self.force(&a1),
                Val::Opaque => Ok(Val::Opaque),
                _ => Err(Halt::Blocked),
            },
            Val::Rec1(a) => match self.force(&arg)? {
                Val::Zero => self.force(&a),
                Val::Opaque => Ok(Val::Opaque),
                _ => Err(Halt::Blocked),
            },
            Val::Rec0 => match self.force(&arg)? {
                Val::Opaque => Ok(Val::Opaque),
                _ => Err(Halt::Blocked),
            },
            Val::RecNat(z, s) => match self.force(&arg)? {
                Val::Zero => self.force(&z),
                Val::Succ(pred) => {
                    // rec (S k) = s k (rec k), with rec k left unevaluated
                    let step = self.force(&s)?;
                    let partial = self.apply(step, pred.clone())?;
                    let rec_pred = Thunk {
                        term: Rc::new(Term::app(Term::Var(1), Term::Var(0))),
                        env: Rc::new(vec![
                            Thunk {
                                term: Rc::new(Term::rec_nat(Term::Nat, Term::Var(1), Term::Var(0))),
                                env: Rc::new(vec![z, s]),
                            },
                            pred,
                        ]),
                    };
                    self.apply(partial, rec_pred)
                }
                Val::Opaque => Ok(Val::Opaque),
                _ => Err(Halt::Blocked),
            },
            Val::Opaque => Ok(Val::Opaque),
            _ => Err(Halt::Blocked),
        }
    }

    fn numeral(&mut self, th: &Thunk) -> Result<u64, Halt> {
        let mut n = 0;
        let mut v = self.force(th)?;
        loop {
            match v {
                Val::Zero => return Ok(n),
                Val::Succ(pred) => {
                    n += 1;
                    v = self.force(&pred)?;
                }
                _ => return Err(Halt::Blocked),
            }
        }
    }

    /// Evaluate a closed term and observe its head.
    pub fn observe(&mut self, t: &Term) -> Obs {
        let env: Env = Rc::new(Vec::new());
        let th = Self::thunk(t, &env);
        let r = self.force(&th).and_then(|v| match v {
            Val::Zero => Ok(Obs::Zero),
            Val::One => Ok(Obs::One),
            Val::Succ(_) => self.numeral(&th).map(Obs::Numeral),
            Val::Type(name) => Ok(Obs::Type(name)),
            Val::Closure(..) | Val::Rec2(..) | Val::Rec1(_) | Val::RecNat(..) | Val::Rec0 | Val::Generic(_) => {
                Ok(Obs::Function)
            }
            Val::Pair(..) => Ok(Obs::Pair),
            Val::Opaque => Ok(Obs::Opaque),
        });
        match r {
            Ok(o) => o,
            Err(Halt::Stuck(k)) => Obs::Stuck(k),
            Err(Halt::Blocked) => Obs::Blocked,
            Err(Halt::Fuel) => Obs::OutOfFuel,
        }
    }
}

pub fn oracle(t: &Term, p: &Condition) -> Obs {
    Evaluator::new(p, 1_000_000).observe(t)
}

/// The same observation read off a small-step whnf.
pub fn observe_whnf(w: &Whnf) -> Obs {
    if let WhnfClass::ProperStuck { index, .. } = &w.class {
        return Obs::Stuck(*index);
    }
    if matches!(w.class, WhnfClass::Blocked) {
        return Obs::Blocked;
    }
    if matches!(w.class, WhnfClass::Neutral) {
        return Obs::Opaque;
    }
    match &w.term {
        Term::Zero => Obs::Zero,
        Term::One => Obs::One,
        t @ Term::Succ(_) => t.as_numeral().map_or(Obs::Blocked, Obs::Numeral),
        Term::Universe => Obs::Type("U"),
        Term::Nat => Obs::Type("N"),
        Term::Empty => Obs::Type("N0"),
        Term::Unit => Obs::Type("N1"),
        Term::Bool => Obs::Type("N2"),
        Term::Pi(..) => Obs::Type("Pi"),
        Term::Sigma(..) => Obs::Type("Sig"),
        Term::Pair(..) => Obs::Pair,
        Term::Axiom | Term::AxiomAt(_) | Term::MpWitness => Obs::Opaque,
        _ => Obs::Function,
    }
}
