//! Interpreter for rule ladders: every rule is tried once, most unfolded
//! first, and applied at most once.

use crate::error::{Error, Result};
use crate::machine::{Answer, Machine};
use crate::term::Term;
use crate::unfold::RuleLadder;

impl Machine {
    pub fn run_unfolded(
        &mut self,
        goal: &Term,
        ladder: &RuleLadder,
        max_steps: u64,
    ) -> Result<Answer> {
        self.run_unfolded_from(goal, ladder, 0, max_steps)
    }

    /// Runs `goal` over the ladder starting at position `start`.
    pub fn run_unfolded_from(
        &mut self,
        goal: &Term,
        ladder: &RuleLadder,
        start: usize,
        max_steps: u64,
    ) -> Result<Answer> {
        let work0 = self.begin();
        self.descend(goal, ladder, start, max_steps)?;
        self.answer(goal, work0)
    }

    pub(crate) fn descend(
        &mut self,
        goal: &Term,
        ladder: &RuleLadder,
        start: usize,
        max_steps: u64,
    ) -> Result<()> {
        let mut pending: Vec<Vec<Term>> = Vec::new();
        let mut call = goal.clone();
        let mut pos = start;
        loop {
            let Some(rule) = ladder.rules.get(pos) else {
                return Err(Error::NoRuleApplicable(
                    self.store.resolve(&call).to_string(),
                ));
            };
            let Some(inst) = self.try_rule(rule, &call)? else {
                pos += 1;
                continue;
            };
            if self.stats.rule_applications >= max_steps {
                self.store.commit();
                return Err(Error::StepLimitExceeded(max_steps));
            }
            let step = self.commit(inst)?;
            match step.rec_call {
                Some(next) => {
                    if let Some(i) = ladder.index_at(pos) {
                        self.stats.applied_rule_indices.push(i);
                    }
                    pending.push(step.post);
                    call = next;
                    pos += 1;
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
        }
        Ok(())
    }
}

/// Ladder indices of the recursive rules applied during the run.
pub fn count_applications(answer: &Answer) -> Vec<usize> {
    answer.stats.applied_rule_indices.clone()
}
