use proptest::prelude::*;
use recunfold::{
    parse_goal, parse_program, parse_rule, rule_to_string, validate_program, Error, Example,
    Program, Rule, Term, ValidationError, VarGen, VarId,
};

fn var() -> impl Strategy<Value = Term> {
    (0u64..6).prop_map(|v| Term::Var(VarId(v)))
}

fn expr() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![var(), (-5i64..20).prop_map(Term::from)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (
            prop_oneof![Just("+"), Just("-"), Just("*")],
            inner.clone(),
            inner,
        )
            .prop_map(|(op, a, b)| Term::app(op, [a, b]))
    })
}

fn small_list() -> impl Strategy<Value = Term> {
    (
        prop::collection::vec(prop_oneof![var(), (-3i64..9).prop_map(Term::from)], 0..4),
        prop_oneof![Just(Term::nil()), var()],
    )
        .prop_map(|(items, tail)| Term::list_with_tail(items, tail))
}

fn builtin() -> impl Strategy<Value = Term> {
    prop_oneof![
        (
            prop_oneof![Just(">"), Just("<"), Just(">="), Just("=<"), Just("=\\=")],
            expr(),
            expr()
        )
            .prop_map(|(op, a, b)| Term::app(op, [a, b])),
        (var(), expr()).prop_map(|(v, e)| Term::app("is", [v, e])),
        (var(), small_list()).prop_map(|(v, l)| Term::app("=", [v, l])),
        (var(), small_list(), var()).prop_map(|(a, b, c)| Term::app("append", [a, b, c])),
        (small_list(), var(), var()).prop_map(|(a, b, c)| Term::app("m", [a, b, c])),
    ]
}

fn arb_rule() -> impl Strategy<Value = Rule> {
    (
        prop::option::of(Just("step".to_string())),
        prop::collection::vec(builtin(), 0..3),
        prop::collection::vec(builtin(), 0..3),
        prop::option::of((var(), var())),
        prop::collection::vec(builtin(), 0..3),
    )
        .prop_map(|(name, guard, pre, rec, post)| {
            let head = Term::app("p", [Term::Var(VarId(0)), Term::Var(VarId(1))]);
            let rec = rec.map(|(a, b)| Term::app("p", [a, b]));
            Rule::new(name, head, guard, pre, rec, post)
        })
}

proptest! {
    #[test]
    fn print_parse_round_trip(r in arb_rule()) {
        let text = rule_to_string(&r);
        let parsed = parse_rule(&text).unwrap();
        prop_assert_eq!(&parsed, &r, "{}", text);
        let again = parse_rule(&rule_to_string(&parsed)).unwrap();
        prop_assert_eq!(again, parsed);
    }
}

#[test]
fn shipped_programs_round_trip() {
    for ex in Example::ALL {
        let p = ex.program();
        let text: String = p.rules.iter().map(|r| rule_to_string(r) + "\n").collect();
        assert_eq!(parse_program(&text).unwrap(), p, "{ex}");
    }
}

type Mutation = (&'static str, Program, fn(&ValidationError) -> bool);

fn mutations(p: &Program) -> Vec<Mutation> {
    let rec = p.rules[0].clone();
    let base = p.rules[1..].to_vec();
    let with = |rules: Vec<Rule>| Program {
        predicate: p.predicate.clone(),
        rules,
    };
    let mut out: Vec<Mutation> = Vec::new();
    out.push(("empty", with(vec![]), |e| {
        matches!(e, ValidationError::Empty)
    }));
    out.push(("no recursive rule", with(base.clone()), |e| {
        matches!(e, ValidationError::NoRecursiveRule)
    }));
    let mut twice = p.rules.clone();
    twice.push(rec.clone());
    out.push(("two recursive rules", with(twice), |e| {
        matches!(e, ValidationError::MultipleRecursiveRules)
    }));
    let mut swapped = base.clone();
    swapped.push(rec.clone());
    out.push(("recursive rule last", with(swapped), |e| {
        matches!(e, ValidationError::RecursiveRuleNotFirst)
    }));

    let mut nonlinear = rec.clone();
    nonlinear.body_post.push(rec.body_rec.clone().unwrap());
    let mut rules = p.rules.clone();
    rules[0] = nonlinear;
    out.push(("second recursive call", with(rules), |e| {
        matches!(e, ValidationError::NonLinearRecursion { rule: 0 })
    }));

    let mut args = rec.head.args().to_vec();
    args[0] = Term::int(1);
    let mut bound_head = rec.clone();
    bound_head.head = Term::compound(p.predicate.name, args);
    let mut rules = p.rules.clone();
    rules[0] = bound_head;
    out.push(("non-variable head", with(rules), |e| {
        matches!(e, ValidationError::HeadNotVariables)
    }));

    if p.predicate.arity >= 2 {
        let mut args = rec.head.args().to_vec();
        args[1] = args[0].clone();
        let mut repeated = rec.clone();
        repeated.head = Term::compound(p.predicate.name, args);
        let mut rules = p.rules.clone();
        rules[0] = repeated;
        out.push(("repeated head variable", with(rules), |e| {
            matches!(e, ValidationError::HeadNotVariables)
        }));
    }

    let mut other = p.rules.clone();
    let b = &mut other[1];
    b.head = Term::app("other", b.head.args().to_vec());
    out.push(("base rule for another predicate", with(other), |e| {
        matches!(e, ValidationError::PredicateMismatch { rule: 1, .. })
    }));

    let mut calls_other = rec.clone();
    let rc = calls_other.body_rec.take().unwrap();
    calls_other.body_rec = Some(Term::app("other", rc.args().to_vec()));
    let mut rules = p.rules.clone();
    rules[0] = calls_other;
    out.push(("recursive call to another predicate", with(rules), |e| {
        matches!(e, ValidationError::UnknownGoal { rule: 0, .. })
    }));

    let mut unknown = rec.clone();
    unknown
        .body_pre
        .push(Term::app("foo", [Term::Var(VarId(0))]));
    let mut rules = p.rules.clone();
    rules[0] = unknown;
    out.push(("user goal in body", with(rules), |e| {
        matches!(e, ValidationError::UnknownGoal { rule: 0, .. })
    }));
    out
}

#[test]
fn validation_accepts_shipped_and_rejects_each_mutation() {
    for ex in Example::ALL {
        let p = ex.program();
        validate_program(&p).unwrap();
        for (what, bad, expected) in mutations(&p) {
            let err = validate_program(&bad).expect_err(what);
            assert!(expected(&err), "{ex}, {what}: got {err:?}");
        }
    }
}

#[test]
fn parse_examples() {
    let r = parse_rule("s(A,C) <=> A>1 | B is A-1, s(B,D), C is 1*A-0+D.").unwrap();
    assert!(r.is_recursive());
    assert_eq!(r.guard.len(), 1);
    assert_eq!(r.body_pre.len(), 1);
    assert_eq!(r.body_post.len(), 1);
    assert_eq!(
        rule_to_string(&r),
        "s(A,B) <=> A>1 | C is A-1, s(C,D), B is 1*A-0+D."
    );

    let b = parse_rule("s(A,C) <=> A=1 | C=1, true, true.").unwrap();
    assert!(!b.is_recursive());
    assert_eq!(b.body_pre.len(), 1);
    assert!(b.body_post.is_empty());
    assert_eq!(rule_to_string(&b), "s(A,B) <=> A=1 | B=1, true, true.");

    let e = parse_rule("s(A,C) <= A>1 | true.").unwrap_err();
    assert!(matches!(e, Error::Parse(_)), "{e:?}");
}

#[test]
fn program_validation_errors_from_text() {
    let e = parse_program(
        "sum(N,S) <=> N>1 | M is N-1, sum(M,S1), sum(M,S2), S is S1+S2.\nsum(N,S) <=> N=1 | S=1.",
    )
    .unwrap_err();
    assert!(matches!(
        e,
        Error::Validation(ValidationError::NonLinearRecursion { rule: 0 })
    ));
    let e = parse_program("sum(1,S) <=> true | M is 0, sum(M,S).\nsum(N,S) <=> N=1 | S=1.")
        .unwrap_err();
    assert!(matches!(
        e,
        Error::Validation(ValidationError::HeadNotVariables)
    ));
    let e = parse_program(
        "sum(N,S) <=> N>1 | M is N-1, sum(M,S1), S is S1+N.\nsum(N,S) <=> N>1 | M is N-1, sum(M,S1), S is S1+N.",
    )
    .unwrap_err();
    assert!(matches!(
        e,
        Error::Validation(ValidationError::MultipleRecursiveRules)
    ));
}

#[test]
fn goal_examples() {
    let mut gen = VarGen::new();
    let (t, vars) = parse_goal("sum(100,S)", &mut gen).unwrap();
    assert_eq!(t.args()[0], Term::int(100));
    assert!(t.args()[1].is_var());
    assert_eq!(vars.len(), 1);
    let (t, _) = parse_goal("r([1,2,3],Out)", &mut gen).unwrap();
    assert_eq!(t.args()[0], Term::list([1, 2, 3].map(Term::from)));
    let e = parse_goal("sum(100", &mut gen).unwrap_err();
    assert!(e.line == 1 && e.column > 1, "{e:?}");
}

#[test]
fn sorting_base_rule_keeps_its_pattern_head() {
    let p = Example::Sorting.program();
    assert!(p.rules[1].head.args()[0].is_nil());
    assert!(!p.rules[1].head_is_variables());
}
