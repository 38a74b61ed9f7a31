mod common;

use common::*;
use proptest::prelude::*;
use recunfold::{parse_goal, Error, Example, Machine, Term, DEFAULT_MAX_STEPS};

fn run(ex: Example, src: &str) -> recunfold::Answer {
    let mut m = Machine::new();
    let (g, _) = parse_goal(src, &mut m.gen).unwrap();
    m.run_original(&g, &ex.program(), DEFAULT_MAX_STEPS)
        .unwrap()
}

#[test]
fn examples() {
    assert_eq!(
        run(Example::Summation, "s(3,R)").goal.args()[1],
        Term::int(6)
    );
    assert_eq!(
        run(Example::Reversal, "r([],Out)").goal.args()[1],
        Term::nil()
    );
    assert_eq!(
        run(Example::Sorting, "s([2,1,3],Out)").goal.args()[1],
        int_list(&[1, 2, 3])
    );
    assert_eq!(
        run(Example::Reversal, "r([1,2,3],X)").goal.args()[1],
        int_list(&[3, 2, 1])
    );
}

#[test]
fn recursion_depth_examples() {
    let mut m = Machine::new();
    let depth = |m: &mut Machine, ex: Example, src: &str| {
        let (g, _) = parse_goal(src, &mut m.gen).unwrap();
        m.recursion_depth(&g, &ex.program(), DEFAULT_MAX_STEPS)
            .unwrap()
    };
    assert_eq!(depth(&mut m, Example::Summation, "s(10,_)"), 9);
    assert_eq!(depth(&mut m, Example::Summation, "s(1,_)"), 0);
    let items: Vec<i64> = (1..=17).collect();
    let g = goal(&mut m, Example::Reversal, 17, &items);
    let d = m
        .recursion_depth(&g, &Example::Reversal.program(), DEFAULT_MAX_STEPS)
        .unwrap();
    let a = m
        .run_original(&g, &Example::Reversal.program(), DEFAULT_MAX_STEPS)
        .unwrap();
    assert_eq!(d, 17);
    assert_eq!(a.stats.rule_applications, d + 1);
}

#[test]
fn recursion_depth_leaves_goal_unbound() {
    let mut m = Machine::new();
    let (g, vars) = parse_goal("r([1,2,3],X)", &mut m.gen).unwrap();
    m.recursion_depth(&g, &Example::Reversal.program(), DEFAULT_MAX_STEPS)
        .unwrap();
    assert!(!m.store.is_bound(vars[0].1));
}

#[test]
fn outputs_bind_only_after_the_base_case() {
    let mut m = Machine::new();
    let (g, vars) = parse_goal("s(6,S)", &mut m.gen).unwrap();
    let out = Term::Var(vars[0].1);
    let mut seen = Vec::new();
    m.run_original_observed(
        &g,
        &Example::Summation.program(),
        DEFAULT_MAX_STEPS,
        &mut |m| seen.push((m.stats.rule_applications, m.store.resolve(&out).is_ground())),
    )
    .unwrap();
    assert_eq!(seen.len(), 6);
    assert!(seen.iter().all(|&(_, ground)| !ground), "{seen:?}");
}

#[test]
fn deep_recursion_uses_no_host_stack() {
    let mut m = Machine::new();
    let (g, _) = parse_goal("s(1000000,S)", &mut m.gen).unwrap();
    let a = m
        .run_original(&g, &Example::Summation.program(), DEFAULT_MAX_STEPS)
        .unwrap();
    assert_eq!(a.goal.args()[1], Term::int(500_000_500_000i64));
    assert_eq!(a.stats.rule_applications, 1_000_000);
}

#[test]
fn nontermination_hits_the_step_limit() {
    let mut m = Machine::new();
    let (g, _) = parse_goal("p(0)", &mut m.gen).unwrap();
    let e = m
        .run_original(&g, &Example::Countdown.program(), 10_000)
        .unwrap_err();
    assert!(matches!(e, Error::StepLimitExceeded(10_000)));
}

#[test]
fn stuck_goal_is_reported() {
    let mut m = Machine::new();
    let (g, _) = parse_goal("s(0,S)", &mut m.gen).unwrap();
    let e = m
        .run_original(&g, &Example::Summation.program(), DEFAULT_MAX_STEPS)
        .unwrap_err();
    assert!(matches!(e, Error::NoRuleApplicable(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summation_applies_n_rules(n in 1u64..3000) {
        let mut m = Machine::new();
        let g = goal(&mut m, Example::Summation, n - 1, &[]);
        let a = m.run_original(&g, &Example::Summation.program(), DEFAULT_MAX_STEPS).unwrap();
        prop_assert_eq!(a.stats.rule_applications, n);
        prop_assert_eq!(output(Example::Summation, &a), oracle(Example::Summation, n - 1, &[]));
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), ex_i in 0usize..3, n in 0u64..200) {
        let ex = THREE[ex_i];
        let mut r = rng(seed);
        let items = random_items(&mut r, n);
        let n = if ex == Example::Summation { n.max(1) } else { n };
        let items = if ex == Example::Summation { vec![] } else { items };
        let once = || {
            let mut m = Machine::new();
            let g = goal(&mut m, ex, n, &items);
            m.run_original(&g, &ex.program(), DEFAULT_MAX_STEPS).unwrap()
        };
        let (a, b) = (once(), once());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(output(ex, &a), oracle(ex, n, &items));
    }
}
