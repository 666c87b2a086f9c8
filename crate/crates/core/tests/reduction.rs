mod common;

use common::laws::laws_along;
use common::*;
use mltt_forcing::condition::is_partition;
use mltt_forcing::reduction::{partition_eval, step, whnf, ReductionError, StepResult, WhnfClass};
use mltt_forcing::{Mode, Term};
use proptest::prelude::*;

const FUEL: u64 = 100_000;

fn variable_type() -> Term {
    Term::app(
        Term::rec_n2(Term::Universe, Term::Unit, Term::Nat),
        Term::app(Term::Generic, Term::Zero),
    )
}

#[test]
fn step_examples() {
    let beta = Term::app(Term::lam(Term::Var(0)), Term::Zero);
    assert_eq!(step(&beta, &cond("{}"), Mode::Plain).unwrap(), StepResult::Stepped(Term::Zero));
    let f5 = Term::app(Term::Generic, Term::numeral(5));
    assert_eq!(step(&f5, &cond("{5=1}"), Mode::Forcing).unwrap(), StepResult::Stepped(Term::One));
    match step(&f5, &cond("{}"), Mode::Forcing).unwrap() {
        StepResult::Whnf(WhnfClass::ProperStuck { index, .. }) => assert_eq!(index, 5),
        other => panic!("{other:?}"),
    }
    assert!(matches!(step(&f5, &cond("{}"), Mode::Plain), Err(ReductionError::Mode(_))));
}

#[test]
fn whnf_examples_agree_with_oracle() {
    let r = variable_type();
    for (p, expected) in [("{0=0}", Term::Unit), ("{0=1}", Term::Nat)] {
        let p = cond(p);
        let w = whnf(&r, &p, Mode::Forcing, FUEL).unwrap();
        assert_eq!(w.term, expected);
        assert_eq!(observe_whnf(&w), oracle(&r, &p));
    }
    // recN (x. N) 0 (λx y. S y) 2
    let t = Term::app(
        Term::rec_nat(Term::Nat, Term::Zero, Term::lam(Term::lam(Term::succ(Term::Var(0))))),
        Term::numeral(2),
    );
    let w = whnf(&t, &cond("{}"), Mode::Plain, FUEL).unwrap();
    assert_eq!(oracle(&t, &cond("{}")), Obs::Numeral(2));
    assert_eq!(w.term, Term::numeral(2));
    let fq = Term::app(Term::GenericAt(cond("{0=1}")), Term::Zero);
    assert_eq!(whnf(&fq, &cond("{}"), Mode::ManyReals, FUEL).unwrap().term, Term::One);
}

#[test]
fn fuel_runs_out_on_omega() {
    let delta = Term::lam(Term::app(Term::Var(0), Term::Var(0)));
    let omega = Term::app(delta.clone(), delta);
    assert!(matches!(
        whnf(&omega, &cond("{}"), Mode::Plain, 1000),
        Err(ReductionError::FuelExhausted { .. })
    ));
}

#[test]
fn partition_eval_examples() {
    let f0 = Term::app(Term::Generic, Term::Zero);
    let e = partition_eval(&f0, &cond("{}"), Mode::Forcing, FUEL, 32).unwrap();
    let leaves: Vec<_> = e.leaves.iter().map(|(c, w)| (c.clone(), w.term.clone())).collect();
    let expected: Vec<_> = [cond("{0=0}"), cond("{0=1}")]
        .into_iter()
        .map(|c| {
            let want = match oracle(&f0, &c) {
                Obs::Zero => Term::Zero,
                Obs::One => Term::One,
                other => panic!("{other:?}"),
            };
            (c, want)
        })
        .collect();
    assert_eq!(leaves, expected);

    let e = partition_eval(&Term::numeral(3), &cond("{4=1}"), Mode::Plain, FUEL, 32).unwrap();
    assert_eq!(e.leaves.len(), 1);
    assert_eq!(e.leaves[0].0, cond("{4=1}"));

    let e = partition_eval(&variable_type(), &cond("{}"), Mode::Forcing, FUEL, 32).unwrap();
    let leaves: Vec<_> = e.leaves.iter().map(|(c, w)| (c.to_string(), w.term.clone())).collect();
    assert_eq!(leaves, vec![("{0=0}".into(), Term::Unit), ("{0=1}".into(), Term::Nat)]);
}

#[test]
fn split_depth_is_bounded() {
    // f 0 + f 1 + … nests one split per index
    let mut t = Term::Zero;
    for k in 0..6 {
        t = Term::app(Term::rec_n2(Term::Nat, t.clone(), Term::succ(t)), Term::app(Term::Generic, Term::numeral(k)));
    }
    assert!(matches!(
        partition_eval(&t, &cond("{}"), Mode::Forcing, FUEL, 3),
        Err(ReductionError::SplitDepthExceeded { .. })
    ));
    let e = partition_eval(&t, &cond("{}"), Mode::Forcing, FUEL, 6).unwrap();
    assert_eq!(e.leaves.len(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_laws_on_typed_terms((t, _) in typed_strategy(&BASE_TYS, 4), p in condition_strategy(6, 3), seed in any::<u64>()) {
        let n = laws_along(&t, &p, &mut rng(seed), 12).map_err(TestCaseError::fail)?;
        prop_assert!(n >= 1);
    }

    #[test]
    fn reduction_laws_on_raw_terms(t in raw_strategy(4), p in condition_strategy(6, 3), seed in any::<u64>()) {
        laws_along(&t, &p, &mut rng(seed), 12).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn whnf_agrees_with_big_step_oracle((t, _) in typed_strategy(&BASE_TYS, 5), p in condition_strategy(6, 4)) {
        let w = whnf(&t, &p, Mode::Forcing, FUEL).unwrap();
        prop_assert_eq!(observe_whnf(&w), oracle(&t, &p), "term {}", t);
    }

    #[test]
    fn partition_eval_leaves_are_canonical((t, _) in typed_strategy(&BASE_TYS, 5), p in condition_strategy(6, 2)) {
        let e = partition_eval(&t, &p, Mode::Forcing, FUEL, 32).unwrap();
        let leaves: Vec<_> = e.leaves.iter().map(|(c, _)| c.clone()).collect();
        let mut tree_leaves = e.partition.leaves();
        tree_leaves.sort();
        prop_assert_eq!(&tree_leaves, &leaves);
        prop_assert!(is_partition(&p, &leaves));
        for (c, w) in &e.leaves {
            prop_assert!(w.class.is_canonical(), "{} at {}: {:?}", t, c, w.class);
            prop_assert_eq!(observe_whnf(w), oracle(&t, c));
        }
    }

    #[test]
    fn many_reals_terms_agree_with_oracle(seed in any::<u64>(), i in 0usize..4, p in condition_strategy(6, 3)) {
        let mut g = TypedGen::new(rng(seed));
        g.many_reals = true;
        let t = g.closed(BASE_TYS[i], 4);
        let w = whnf(&t, &p, Mode::ManyReals, FUEL).unwrap();
        prop_assert_eq!(observe_whnf(&w), oracle(&t, &p), "term {}", t);
    }
}
