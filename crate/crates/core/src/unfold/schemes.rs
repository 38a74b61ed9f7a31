//! Hand-derived unfolding schemes: each maps a rule of a known template to
//! its simplified self-unfolding, which has the same template.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rustc_hash::FxHashSet;

use crate::builtins::NOT_EQUAL;
use crate::error::{Error, Result};
use crate::rule::{Predicate, Rule};
use crate::term::{Symbol, Term, VarId};

/// Maps rule `r_i` to `r_{i+1}`, covering twice as many recursive steps.
#[derive(Clone)]
pub struct UnfoldingScheme {
    pub name: &'static str,
    pub predicate: Predicate,
    pub step: fn(&Rule) -> Result<Rule>,
    pub template_doc: &'static str,
}

impl fmt::Debug for UnfoldingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnfoldingScheme")
            .field("name", &self.name)
            .field("predicate", &self.predicate)
            .finish()
    }
}

impl UnfoldingScheme {
    pub fn summation() -> Self {
        UnfoldingScheme {
            name: "summation",
            predicate: Predicate::new("s", 2),
            step: step_summation,
            template_doc: "s(A,C) <=> A>V | B is A-V, s(B,D), C is V*A-W+D.  (V,W) -> (2V, 2W+V*V)",
        }
    }

    pub fn reversal() -> Self {
        UnfoldingScheme {
            name: "reversal",
            predicate: Predicate::new("r", 2),
            step: step_reversal,
            template_doc:
                "r(A,B) <=> A=[C1,...,Cm|C] | true, r(C,D), append(D,[Cm,...,C1],B).  m -> 2m",
        }
    }

    pub fn sorting() -> Self {
        UnfoldingScheme {
            name: "sorting",
            predicate: Predicate::new("s", 2),
            step: step_sorting,
            template_doc: "s(L,S) <=> L=[C1,...,Cm|L1] | Mergings, s(L1,S1), m(S0,S1,S).  m -> 2m",
        }
    }

    pub fn countdown() -> Self {
        UnfoldingScheme {
            name: "countdown",
            predicate: Predicate::new("p", 1),
            step: step_countdown,
            template_doc:
                "p(N) <=> (N-1)*(N-V)>0 | M is N-V, p(M).  V -> 2V; V=1 is written N=\\=1",
        }
    }

    /// The schemes shipped with the crate.
    pub fn builtin() -> Vec<Self> {
        vec![
            Self::summation(),
            Self::reversal(),
            Self::sorting(),
            Self::countdown(),
        ]
    }

    /// The same scheme applied to a differently named predicate. Steps keep
    /// the head functor of the rule they are given.
    pub fn for_predicate(mut self, predicate: Predicate) -> Self {
        self.predicate = predicate;
        self
    }
}

fn v(i: u64) -> Term {
    Term::Var(VarId(i))
}

fn mismatch(scheme: &str, reason: impl Into<String>) -> Error {
    Error::TemplateMismatch {
        scheme: scheme.into(),
        reason: reason.into(),
    }
}

fn head_functor(r: &Rule, arity: usize, scheme: &str) -> Result<Symbol> {
    match r.head.functor() {
        Some((f, a)) if a == arity => Ok(*f),
        _ => Err(mismatch(scheme, format!("head must have arity {arity}"))),
    }
}

/// `f(A,C) <=> A>V | B is A-V, f(B,D), C is V*A-W+D.`
pub fn summation_rule(f: &Symbol, v_: &BigInt, w_: &BigInt) -> Rule {
    let (a, c, b, d) = (v(0), v(1), v(2), v(3));
    let vt = Term::from(v_.clone());
    let wt = Term::from(w_.clone());
    Rule::new(
        None,
        Term::compound(*f, [a.clone(), c.clone()]),
        vec![Term::app(">", [a.clone(), vt.clone()])],
        vec![Term::app(
            "is",
            [b.clone(), Term::app("-", [a.clone(), vt.clone()])],
        )],
        Some(Term::compound(*f, [b, d.clone()])),
        vec![Term::app(
            "is",
            [
                c,
                Term::app("+", [Term::app("-", [Term::app("*", [vt, a]), wt]), d]),
            ],
        )],
    )
}

fn summation_params(r: &Rule) -> Option<(BigInt, BigInt)> {
    let v_ = r.guard.first()?.args().get(1)?.as_int()?.clone();
    let rhs = r.body_post.first()?.args().get(1)?;
    let w_ = rhs.args().first()?.args().get(1)?.as_int()?.clone();
    Some((v_, w_))
}

/// `(V, W) -> (2V, 2W + V^2)`.
pub fn step_summation(r: &Rule) -> Result<Rule> {
    let f = head_functor(r, 2, "summation")?;
    let (v_, w_) =
        summation_params(r).ok_or_else(|| mismatch("summation", "cannot read V and W"))?;
    if summation_rule(&f, &v_, &w_) != r.clone().with_name(None) {
        return Err(mismatch("summation", r.to_string()));
    }
    let v2 = &v_ * 2u32;
    let w2 = &w_ * 2u32 + &v_ * &v_;
    Ok(summation_rule(&f, &v2, &w2))
}

/// `f(A,B) <=> A=[C1,...,Cm|C] | true, f(C,D), append(D,[Cm,...,C1],B).`
pub fn reversal_rule(f: &Symbol, m: usize) -> Rule {
    let m_ = m as u64;
    let (a, b, c, d) = (v(0), v(1), v(m_ + 2), v(m_ + 3));
    let elems: Vec<Term> = (0..m_).map(|i| v(2 + i)).collect();
    let reversed: Vec<Term> = elems.iter().rev().cloned().collect();
    Rule::new(
        None,
        Term::compound(*f, [a.clone(), b.clone()]),
        vec![Term::app("=", [a, Term::list_with_tail(elems, c.clone())])],
        vec![],
        Some(Term::compound(*f, [c, d.clone()])),
        vec![Term::app("append", [d, Term::list(reversed), b])],
    )
}

/// Doubles the number of list elements consumed per application.
pub fn step_reversal(r: &Rule) -> Result<Rule> {
    let f = head_functor(r, 2, "reversal")?;
    let m = r
        .guard
        .first()
        .and_then(|g| g.args().get(1))
        .map(|l| l.list_parts().0.len())
        .filter(|&m| m > 0)
        .ok_or_else(|| mismatch("reversal", "guard must match an open list"))?;
    if reversal_rule(&f, m) != r.clone().with_name(None) {
        return Err(mismatch("reversal", r.to_string()));
    }
    Ok(reversal_rule(&f, 2 * m))
}

/// The parts of a sorting rule `f(L,S) <=> L=[C1..Cm|T] | MG, f(T,S1), m(S0,S1,S)`.
struct SortParts<'a> {
    list: VarId,
    out: VarId,
    elems: Vec<&'a Term>,
    tail: VarId,
    mergings: &'a [Term],
    rec_out: VarId,
    first: &'a Term,
}

fn sort_parts(r: &Rule) -> Option<SortParts<'_>> {
    if !r.head_is_variables() || r.guard.len() != 1 || r.body_post.len() != 1 {
        return None;
    }
    let list = r.head.args()[0].as_var()?;
    let out = r.head.args()[1].as_var()?;
    let g = &r.guard[0];
    if !g.functor().is_some_and(|(n, a)| n == "=" && a == 2) || g.args()[0].as_var()? != list {
        return None;
    }
    let (elems, tail) = g.args()[1].list_parts();
    let tail = tail.as_var()?;
    let mut seen: FxHashSet<VarId> = [list, out, tail].into_iter().collect();
    for e in &elems {
        let e = e.as_var()?;
        if !seen.insert(e) {
            return None;
        }
    }
    if elems.is_empty() {
        return None;
    }
    let is_merge = |t: &Term| t.functor().is_some_and(|(n, a)| n == "m" && a == 3);
    if !r.body_pre.iter().all(is_merge) {
        return None;
    }
    let rec = r.body_rec.as_ref()?;
    if rec.args()[0].as_var()? != tail {
        return None;
    }
    let rec_out = rec.args()[1].as_var()?;
    let post = &r.body_post[0];
    if !is_merge(post) || post.args()[1].as_var()? != rec_out || post.args()[2].as_var()? != out {
        return None;
    }
    Some(SortParts {
        list,
        out,
        elems,
        tail,
        mergings: &r.body_pre,
        rec_out,
        first: &post.args()[0],
    })
}

/// Chains two copies of the rule and merges their partial results before
/// the recursive call.
pub fn step_sorting(r: &Rule) -> Result<Rule> {
    let f = head_functor(r, 2, "sorting")?;
    let p = sort_parts(r).ok_or_else(|| mismatch("sorting", r.to_string()))?;
    let k = r.var_count() as u64;
    // Second copy: every variable shifted by k, with its head variables
    // replaced by the first copy's recursive-call arguments.
    let copy2 = |t: &Term| {
        t.map_vars(&mut |x| {
            if x == p.list {
                Term::Var(p.tail)
            } else if x == p.out {
                Term::Var(p.rec_out)
            } else {
                Term::Var(VarId(x.0 + k))
            }
        })
    };
    let shifted = |x: VarId| Term::Var(VarId(x.0 + k));
    let combined = VarId(2 * k);
    let elems: Vec<Term> = p
        .elems
        .iter()
        .map(|&e| e.clone())
        .chain(p.elems.iter().map(|e| copy2(e)))
        .collect();
    let guard = Term::app(
        "=",
        [
            Term::Var(p.list),
            Term::list_with_tail(elems, shifted(p.tail)),
        ],
    );
    let mut pre: Vec<Term> = p.mergings.to_vec();
    pre.extend(p.mergings.iter().map(copy2));
    pre.push(Term::app(
        "m",
        [copy2(p.first), p.first.clone(), Term::Var(combined)],
    ));
    Ok(Rule::new(
        None,
        Term::compound(f, [Term::Var(p.list), Term::Var(p.out)]),
        vec![guard],
        pre,
        Some(Term::compound(f, [shifted(p.tail), shifted(p.rec_out)])),
        vec![Term::app(
            "m",
            [Term::Var(combined), shifted(p.rec_out), Term::Var(p.out)],
        )],
    ))
}

/// `f(N) <=> G | M is N-V, f(M).` with `G` = `N=\=1` for `V = 1` and
/// `(N-1)*(N-V)>0` otherwise. Both say that none of `N, N-1, ..., N-V+1`
/// is 1.
pub fn countdown_rule(f: &Symbol, v_: &BigInt) -> Rule {
    let (n, m) = (v(0), v(1));
    let vt = Term::from(v_.clone());
    let guard = if v_.is_one() {
        Term::app(NOT_EQUAL, [n.clone(), Term::int(1)])
    } else {
        Term::app(
            ">",
            [
                Term::app(
                    "*",
                    [
                        Term::app("-", [n.clone(), Term::int(1)]),
                        Term::app("-", [n.clone(), vt.clone()]),
                    ],
                ),
                Term::int(0),
            ],
        )
    };
    Rule::new(
        None,
        Term::compound(*f, [n.clone()]),
        vec![guard],
        vec![Term::app("is", [m.clone(), Term::app("-", [n, vt])])],
        Some(Term::compound(*f, [m])),
        vec![],
    )
}

pub fn step_countdown(r: &Rule) -> Result<Rule> {
    let f = head_functor(r, 1, "countdown")?;
    let v_ = r
        .body_pre
        .first()
        .and_then(|g| g.args().get(1))
        .and_then(|e| e.args().get(1))
        .and_then(Term::as_int)
        .cloned()
        .ok_or_else(|| mismatch("countdown", "cannot read V"))?;
    if countdown_rule(&f, &v_) != r.clone().with_name(None) {
        return Err(mismatch("countdown", r.to_string()));
    }
    Ok(countdown_rule(&f, &(v_ * 2u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Example;
    use crate::parse::parse_rule;
    use crate::print::rule_to_string;

    fn iterate(s: &UnfoldingScheme, r: &Rule, n: usize) -> Rule {
        (0..n).fold(r.clone(), |r, _| (s.step)(&r).unwrap())
    }

    #[test]
    fn summation_coefficients() {
        let s = UnfoldingScheme::summation();
        let r0 = Example::Summation.program().rules[0].clone();
        let want = [(2, 1), (4, 6), (8, 28), (16, 120), (32, 496), (64, 2016)];
        let mut r = r0;
        for (v_, w_) in want {
            r = (s.step)(&r).unwrap();
            assert_eq!(
                summation_params(&r).unwrap(),
                (BigInt::from(v_), BigInt::from(w_))
            );
        }
    }

    #[test]
    fn summation_closed_form_for_coefficients() {
        // r_i adds V*A - W where the skipped terms are A, A-1, ..., A-V+1,
        // so W must be V(V-1)/2.
        let s = UnfoldingScheme::summation();
        let mut r = Example::Summation.program().rules[0].clone();
        for _ in 0..40 {
            r = (s.step)(&r).unwrap();
            let (v_, w_) = summation_params(&r).unwrap();
            assert_eq!(w_, &v_ * (&v_ - 1u32) / 2u32);
        }
    }

    #[test]
    fn reversal_steps() {
        let s = UnfoldingScheme::reversal();
        let r0 = Example::Reversal.program().rules[0].clone();
        let r1 = (s.step)(&r0).unwrap();
        let want = parse_rule("r(A,F) <=> A=[E,D|B] | true, r(B,C), append(C,[D,E],F).").unwrap();
        assert_eq!(r1, want);
        let r2 = (s.step)(&r1).unwrap();
        let want =
            parse_rule("r(A,H) <=> A=[G,F,E,D|B] | true, r(B,C), append(C,[D,E,F,G],H).").unwrap();
        assert_eq!(r2, want);
    }

    #[test]
    fn reversal_append_list_is_reversed_guard() {
        let s = UnfoldingScheme::reversal();
        let r = iterate(&s, &Example::Reversal.program().rules[0], 7);
        let (elems, _) = r.guard[0].args()[1].list_parts();
        let appended = r.body_post[0].args()[1].proper_list().unwrap();
        assert_eq!(elems.len(), 128);
        assert!(elems.iter().rev().eq(appended.iter()));
    }

    #[test]
    fn sorting_steps() {
        let s = UnfoldingScheme::sorting();
        let r0 = Example::Sorting.program().rules[0].clone();
        let r1 = (s.step)(&r0).unwrap();
        let want = parse_rule("s(A,G) <=> A=[C,B|D] | m([B],[C],E), s(D,F), m(E,F,G).").unwrap();
        assert_eq!(r1, want);
        let r2 = (s.step)(&r1).unwrap();
        let want = parse_rule(
            "s(A,K) <=> A=[C,B,E,D|H] | (m([B],[C],G), m([D],[E],F), m(F,G,I)), s(H,J), m(I,J,K).",
        )
        .unwrap();
        assert_eq!(r2, want, "{}", rule_to_string(&r2));
    }

    /// Returns the number of leaves under `out`, checking that every merge
    /// joins two equal-sized subtrees.
    fn tree_size(out: &Term, merges: &[Term], leaves: &mut Vec<Term>) -> usize {
        if let Some(items) = out.proper_list() {
            assert_eq!(items.len(), 1);
            leaves.push(items[0].clone());
            return 1;
        }
        let node = merges
            .iter()
            .find(|g| g.args()[2] == *out)
            .expect("merge output defined");
        let l = tree_size(&node.args()[0], merges, leaves);
        let r = tree_size(&node.args()[1], merges, leaves);
        assert_eq!(l, r, "unbalanced merge");
        l + r
    }

    #[test]
    fn sorting_merge_tree_is_balanced() {
        let s = UnfoldingScheme::sorting();
        let mut r = Example::Sorting.program().rules[0].clone();
        for i in 1..=6 {
            r = (s.step)(&r).unwrap();
            let root = &r.body_post[0].args()[0];
            let mut leaves = Vec::new();
            let n = tree_size(root, &r.body_pre, &mut leaves);
            assert_eq!(n, 1 << i);
            assert_eq!(r.body_pre.len(), (1 << i) - 1);
            let (elems, _) = r.guard[0].args()[1].list_parts();
            let mut a: Vec<Term> = elems.into_iter().cloned().collect();
            let mut b = leaves;
            a.sort_by_key(|t| t.as_var());
            b.sort_by_key(|t| t.as_var());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn countdown_steps() {
        let s = UnfoldingScheme::countdown();
        let r0 = Example::Countdown.program().rules[0].clone();
        let r1 = (s.step)(&r0).unwrap();
        assert_eq!(
            rule_to_string(&r1),
            "p(A) <=> (A-1)*(A-2)>0 | B is A-2, p(B), true."
        );
        let r2 = (s.step)(&r1).unwrap();
        assert_eq!(
            rule_to_string(&r2),
            "p(A) <=> (A-1)*(A-4)>0 | B is A-4, p(B), true."
        );
    }

    #[test]
    fn step_keeps_functor() {
        let r = parse_rule("sum(A,C) <=> A>1 | B is A-1, sum(B,D), C is 1*A-0+D.").unwrap();
        let r1 = step_summation(&r).unwrap();
        assert_eq!(r1.predicate(), Predicate::new("sum", 2));
    }

    #[test]
    fn template_mismatch() {
        let r = parse_rule("s(A,C) <=> A>1 | B is A-1, s(B,D), C is A+D.").unwrap();
        assert!(matches!(
            step_summation(&r),
            Err(Error::TemplateMismatch { .. })
        ));
        assert!(matches!(
            step_reversal(&r),
            Err(Error::TemplateMismatch { .. })
        ));
        assert!(matches!(
            step_sorting(&r),
            Err(Error::TemplateMismatch { .. })
        ));
        let rev = Example::Reversal.program().rules[0].clone();
        assert!(step_sorting(&rev).is_err());
        assert!(step_summation(&rev).is_err());
        let sort = Example::Sorting.program().rules[0].clone();
        assert!(step_reversal(&sort).is_err());
    }
}
