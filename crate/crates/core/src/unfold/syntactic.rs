//! Unsimplified self-unfolding, used to cross-check the schemes.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::term::{Term, VarId};

/// Unfolds the recursive call of `r` with a renamed copy of `r`.
///
/// The guard is `r`'s guard followed by the copy's guard with the copy's head
/// variables replaced by the recursive-call arguments. When that guard
/// mentions variables only computed in the pre-body, the pre-body moves into
/// the guard. The body runs `r`'s pre-body, the equation `call = copy head`,
/// the copy's body, and then `r`'s post-body after the copy's.
pub fn syntactic_unfold(r: &Rule) -> Result<Rule> {
    let rec = r
        .body_rec
        .as_ref()
        .ok_or_else(|| Error::MatchFailure("rule has no recursive call".into()))?;
    if !r.head_is_variables() {
        return Err(Error::MatchFailure(
            "head arguments are not distinct variables".into(),
        ));
    }
    if rec.args().len() != r.head.args().len() {
        return Err(Error::MatchFailure(
            "recursive call does not match the head".into(),
        ));
    }
    let k = r.var_count() as u64;
    let shift = |t: &Term| t.map_vars(&mut |x| Term::Var(VarId(x.0 + k)));
    let theta: FxHashMap<VarId, Term> = r
        .head
        .args()
        .iter()
        .zip(rec.args())
        .map(|(h, a)| (h.as_var().unwrap(), a.clone()))
        .collect();
    let subst =
        |t: &Term| t.map_vars(&mut |x| theta.get(&x).cloned().unwrap_or(Term::Var(VarId(x.0 + k))));
    let guard2: Vec<Term> = r.guard.iter().map(subst).collect();

    let mut known: FxHashSet<VarId> = FxHashSet::default();
    for t in std::iter::once(&r.head).chain(&r.guard) {
        known.extend(t.vars());
    }
    let missing = |known: &FxHashSet<VarId>| {
        guard2
            .iter()
            .flat_map(Term::vars)
            .any(|x| x.0 < k && !known.contains(&x))
    };
    let mut guard = r.guard.clone();
    let mut pre = Vec::new();
    if missing(&known) {
        for t in &r.body_pre {
            known.extend(t.vars());
        }
        if missing(&known) {
            return Err(Error::MatchFailure(
                "the copy's guard depends on the outcome of the recursive call".into(),
            ));
        }
        guard.extend(r.body_pre.iter().cloned());
    } else {
        pre.extend(r.body_pre.iter().cloned());
    }
    guard.extend(guard2);
    pre.push(Term::app("=", [rec.clone(), shift(&r.head)]));
    pre.extend(r.body_pre.iter().map(shift));
    let mut post: Vec<Term> = r.body_post.iter().map(shift).collect();
    post.extend(r.body_post.iter().cloned());
    Ok(Rule::new(
        None,
        r.head.clone(),
        guard,
        pre,
        Some(shift(rec)),
        post,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Example;
    use crate::parse::parse_rule;
    use crate::print::rule_to_string;

    #[test]
    fn summation() {
        let r = Example::Summation.program().rules[0].clone();
        let u = syntactic_unfold(&r).unwrap();
        assert_eq!(
            rule_to_string(&u),
            "s(A,B) <=> A>1, C is A-1, C>1 | (s(C,D)=s(E,F), G is E-1), s(G,H), (F is 1*E-0+H, B is 1*A-0+D)."
        );
    }

    #[test]
    fn reversal_guard_chains_open_lists() {
        let r = Example::Reversal.program().rules[0].clone();
        let u = syntactic_unfold(&r).unwrap();
        assert!(u.body_pre.len() == 1);
        assert_eq!(u.guard.len(), 2);
        let want = parse_rule("r(E,D) <=> E=[C|A], A=[C1|A1] | true.").unwrap();
        assert!(u.guard[0].is_variant(&want.guard[0]));
        assert_eq!(
            rule_to_string(&u),
            "r(A,B) <=> A=[C|D], D=[E|F] | r(D,G)=r(H,I), r(F,J), (append(J,[E],I), append(G,[C],B))."
        );
    }

    #[test]
    fn base_rule_cannot_unfold() {
        let b = Example::Summation.program().rules[1].clone();
        assert!(matches!(syntactic_unfold(&b), Err(Error::MatchFailure(_))));
    }

    #[test]
    fn guard_on_recursive_output() {
        let r = parse_rule("p(A,B) <=> B>0 | p(A,C), B is C+1.").unwrap();
        assert!(matches!(syntactic_unfold(&r), Err(Error::MatchFailure(_))));
    }
}
