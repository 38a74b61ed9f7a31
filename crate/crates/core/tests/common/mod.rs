#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recunfold::{
    Answer, Example, Machine, Program, Rule, RuleLadder, Step, Term, DEFAULT_MAX_STEPS,
    DEFAULT_UNFOLD_CAP,
};

pub const LIST_EXAMPLES: [Example; 2] = [Example::Reversal, Example::Sorting];
pub const THREE: [Example; 3] = [Example::Summation, Example::Reversal, Example::Sorting];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_list(xs: &[i64]) -> Term {
    Term::list(xs.iter().map(|&x| Term::from(x)))
}

/// Input of a goal with recursion depth `n`; the list examples use `items`.
pub fn input_for(ex: Example, n: u64, items: &[i64]) -> Term {
    match ex {
        Example::Summation | Example::Countdown => Term::int(n + 1),
        Example::Reversal | Example::Sorting => {
            assert_eq!(items.len() as u64, n);
            int_list(items)
        }
    }
}

/// A goal of depth `n` with a fresh output variable (none for countdown).
pub fn goal(m: &mut Machine, ex: Example, n: u64, items: &[i64]) -> Term {
    let pred = ex.program().predicate;
    let mut args = vec![input_for(ex, n, items)];
    if pred.arity == 2 {
        args.push(m.gen.fresh_term());
    }
    Term::compound(pred.name, args)
}

pub fn random_items(rng: &mut ChaCha8Rng, n: u64) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(-1000..1000)).collect()
}

pub fn permutation(rng: &mut ChaCha8Rng, n: u64) -> Vec<i64> {
    let mut v: Vec<i64> = (1..=n as i64).collect();
    v.shuffle(rng);
    v
}

/// Depth drawn log-uniformly from `1..=max`.
pub fn log_uniform(rng: &mut ChaCha8Rng, max: u64) -> u64 {
    let u: f64 = rng.random();
    ((max as f64 + 1.0).powf(u) as u64).clamp(1, max)
}

/// Expected output computed without the engine.
pub fn oracle(ex: Example, n: u64, items: &[i64]) -> Option<Term> {
    match ex {
        Example::Summation => {
            let n = BigInt::from(n + 1);
            Some(Term::from(&n * (&n + 1) / 2))
        }
        Example::Reversal => {
            let mut v = items.to_vec();
            v.reverse();
            Some(int_list(&v))
        }
        Example::Sorting => {
            let mut v = items.to_vec();
            v.sort();
            Some(int_list(&v))
        }
        Example::Countdown => None,
    }
}

pub fn output(ex: Example, answer: &Answer) -> Option<Term> {
    (ex.program().predicate.arity == 2).then(|| answer.goal.args()[1].clone())
}

/// `r_0 .. r_i` by repeated scheme steps.
pub fn rules_upto(ex: Example, i: usize) -> Vec<Rule> {
    let step = ex.scheme().step;
    let mut rules = vec![ex.program().recursive_rule().clone()];
    while rules.len() <= i {
        let next = step(rules.last().unwrap()).unwrap();
        rules.push(next);
    }
    rules
}

pub fn unfolded(m: &mut Machine, ex: Example, goal: &Term) -> (RuleLadder, Answer) {
    let ladder = m
        .unfold_runtime(goal, &ex.program(), &ex.scheme(), DEFAULT_UNFOLD_CAP)
        .unwrap();
    let generated = m.stats.rules_generated;
    let mut answer = m.run_unfolded(goal, &ladder, DEFAULT_MAX_STEPS).unwrap();
    answer.stats.rules_generated = generated;
    (ladder, answer)
}

/// Applies `rules` in sequence, each to the previous recursive call, then
/// finishes with the original program and runs the collected post-bodies.
/// Returns the resolved recursive calls and the resolved goal.
pub fn apply_then_finish(
    m: &mut Machine,
    program: &Program,
    rules: &[&Rule],
    goal: &Term,
) -> (Vec<Term>, Term) {
    let mut call = goal.clone();
    let mut posts: Vec<Vec<Term>> = Vec::new();
    let mut calls = Vec::new();
    for r in rules {
        let Step { rec_call, post } = m.apply_rule(r, &call).unwrap().expect("rule applies");
        call = rec_call.expect("recursive rule");
        calls.push(m.store.resolve(&call));
        posts.push(post);
    }
    m.run_original(&call, program, DEFAULT_MAX_STEPS).unwrap();
    while let Some(post) = posts.pop() {
        m.exec_goals(&post).unwrap();
    }
    (calls, m.store.resolve(goal))
}
