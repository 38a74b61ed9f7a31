//! Reference interpreter: first applicable rule in textual order, committed
//! choice, post-bodies deferred on an explicit stack.

use crate::error::{Error, Result};
use crate::machine::{Answer, Machine};
use crate::rule::Program;
use crate::term::Term;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

impl Machine {
    /// Runs `goal` with the original program.
    pub fn run_original(
        &mut self,
        goal: &Term,
        program: &Program,
        max_steps: u64,
    ) -> Result<Answer> {
        self.run_original_observed(goal, program, max_steps, &mut |_| {})
    }

    /// As [`Machine::run_original`], calling `observe` after every rule
    /// application.
    pub fn run_original_observed(
        &mut self,
        goal: &Term,
        program: &Program,
        max_steps: u64,
        observe: &mut dyn FnMut(&Machine),
    ) -> Result<Answer> {
        let work0 = self.begin();
        let mut pending: Vec<Vec<Term>> = Vec::new();
        let mut call = goal.clone();
        loop {
            let mut chosen = None;
            for rule in &program.rules {
                if let Some(inst) = self.try_rule(rule, &call)? {
                    chosen = Some(inst);
                    break;
                }
            }
            let Some(inst) = chosen else {
                return Err(Error::NoRuleApplicable(
                    self.store.resolve(&call).to_string(),
                ));
            };
            if self.stats.rule_applications >= max_steps {
                self.store.commit();
                return Err(Error::StepLimitExceeded(max_steps));
            }
            let step = self.commit(inst)?;
            observe(self);
            match step.rec_call {
                Some(next) => {
                    if !step.post.is_empty() {
                        pending.push(step.post);
                    }
                    call = next;
                    self.maybe_gc(|| {
                        let mut roots = vec![goal, &call];
                        roots.extend(pending.iter().flatten());
                        roots
                    });
                }
                None => {
                    self.exec_goals(&step.post)?;
                    break;
                }
            }
        }
        while let Some(post) = pending.pop() {
            self.exec_goals(&post)?;
            self.maybe_gc(|| {
                let mut roots = vec![goal];
                roots.extend(pending.iter().flatten());
                roots
            });
        }
        self.answer(goal, work0)
    }

    /// Number of recursive-rule applications `goal` takes with the original
    /// program. Does not bind anything in this machine's store.
    pub fn recursion_depth(
        &mut self,
        goal: &Term,
        program: &Program,
        max_steps: u64,
    ) -> Result<u64> {
        let goal = self.store.resolve(goal);
        let mut scratch = Machine::with_gen(self.gen.clone());
        let rec = program.recursive_rule();
        let mut call = goal.clone();
        let mut depth = 0u64;
        let result = loop {
            let Some(inst) = scratch.try_rule(rec, &call)? else {
                break Ok(depth);
            };
            if depth >= max_steps {
                break Err(Error::StepLimitExceeded(max_steps));
            }
            depth += 1;
            let step = scratch.commit(inst)?;
            call = step.rec_call.expect("recursive rule");
            scratch.maybe_gc(|| vec![&call]);
        };
        self.gen = scratch.gen;
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Example;
    use crate::parse::parse_goal;

    fn run(ex: Example, src: &str) -> (Term, Answer) {
        let mut m = Machine::new();
        let (goal, vars) = parse_goal(src, &mut m.gen).unwrap();
        let out = *vars.last().map(|(_, v)| v).unwrap();
        let a = m
            .run_original(&goal, &ex.program(), DEFAULT_MAX_STEPS)
            .unwrap();
        (a.value(out).unwrap().clone(), a)
    }

    #[test]
    fn summation() {
        let (v, a) = run(Example::Summation, "s(3,R)");
        assert_eq!(v, Term::int(6));
        assert_eq!(a.stats.rule_applications, 3);
        assert!(a.stats.applied_rule_indices.is_empty());
    }

    #[test]
    fn reversal_and_sorting() {
        assert_eq!(run(Example::Reversal, "r([],Out)").0, Term::nil());
        let want = Term::list([3, 2, 1].map(Term::from));
        assert_eq!(run(Example::Reversal, "r([1,2,3],Out)").0, want);
        let want = Term::list([1, 2, 3].map(Term::from));
        assert_eq!(run(Example::Sorting, "s([2,1,3],Out)").0, want);
    }

    #[test]
    fn applications_equal_argument() {
        for n in 1..40 {
            let (v, a) = run(Example::Summation, &format!("s({n},R)"));
            assert_eq!(v, Term::int(n * (n + 1) / 2));
            assert_eq!(a.stats.rule_applications, n as u64);
        }
    }

    #[test]
    fn stuck_goal() {
        let mut m = Machine::new();
        let (goal, _) = parse_goal("s(0,R)", &mut m.gen).unwrap();
        let e = m
            .run_original(&goal, &Example::Summation.program(), 100)
            .unwrap_err();
        assert!(matches!(e, Error::NoRuleApplicable(_)));
    }

    #[test]
    fn depth() {
        let mut m = Machine::new();
        let p = Example::Summation.program();
        for (src, want) in [("s(10,_)", 9), ("s(1,_)", 0)] {
            let (goal, _) = parse_goal(src, &mut m.gen).unwrap();
            assert_eq!(
                m.recursion_depth(&goal, &p, DEFAULT_MAX_STEPS).unwrap(),
                want
            );
        }
        let list = (1..=17)
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let (goal, _) = parse_goal(&format!("r([{list}],_)"), &mut m.gen).unwrap();
        let p = Example::Reversal.program();
        assert_eq!(m.recursion_depth(&goal, &p, DEFAULT_MAX_STEPS).unwrap(), 17);
        let a = m.run_original(&goal, &p, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(a.stats.rule_applications, 18);
    }

    #[test]
    fn outputs_bound_only_after_base_case() {
        let mut m = Machine::new();
        let (goal, _) = parse_goal("s(50,S)", &mut m.gen).unwrap();
        let probe = goal.clone();
        let mut seen = Vec::new();
        m.run_original_observed(&goal, &Example::Summation.program(), 1000, &mut |mm| {
            seen.push((
                mm.stats.rule_applications,
                mm.store.resolve(&probe).is_ground(),
            ));
        })
        .unwrap();
        assert_eq!(seen.len(), 50);
        assert!(seen.iter().all(|&(_, ground)| !ground));
        assert!(m.store.resolve(&goal).is_ground());
    }

    #[test]
    fn deterministic() {
        let (_, a) = run(Example::Sorting, "s([5,3,9,1,4],Out)");
        let (_, b) = run(Example::Sorting, "s([5,3,9,1,4],Out)");
        assert_eq!(a, b);
    }

    #[test]
    fn deep_recursion_is_iterative() {
        let (v, _) = run(Example::Summation, "s(300000,R)");
        assert_eq!(v, Term::int(300000i64 * 300001 / 2));
    }
}
