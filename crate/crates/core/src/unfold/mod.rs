//! Runtime repeated unfolding of the recursive rule.

mod schemes;
mod syntactic;

use std::fmt;

pub use schemes::UnfoldingScheme;
pub use syntactic::syntactic_unfold;

use crate::error::{Error, Result};
use crate::machine::Machine;
use crate::rule::{Program, Rule};
use crate::term::Term;

pub const DEFAULT_UNFOLD_CAP: usize = 4096;

/// Unfolded recursive rules, most unfolded first, followed by the base
/// rules. The rule at position `p < recursive` is `r_i` with
/// `i = recursive - 1 - p` and covers `2^i` steps of the original rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleLadder {
    pub rules: Vec<Rule>,
    pub recursive: usize,
}

impl RuleLadder {
    /// The ladder holding only the original program.
    pub fn original(program: &Program) -> Self {
        RuleLadder {
            rules: program.rules.clone(),
            recursive: 1,
        }
    }

    /// Builds a ladder from recursive rules in ascending order (`r_0` first)
    /// and the base rules.
    pub fn from_ascending(mut rec: Vec<Rule>, base: &[Rule]) -> Self {
        let recursive = rec.len();
        rec.reverse();
        rec.extend_from_slice(base);
        RuleLadder {
            rules: rec,
            recursive,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Unfolding index of the rule at `pos`, `None` for base rules.
    pub fn index_at(&self, pos: usize) -> Option<usize> {
        (pos < self.recursive).then(|| self.recursive - 1 - pos)
    }

    /// Recursive rules, most unfolded first.
    pub fn recursive_rules(&self) -> &[Rule] {
        &self.rules[..self.recursive]
    }

    pub fn base_rules(&self) -> &[Rule] {
        &self.rules[self.recursive..]
    }

    /// Recursive rules in ascending order, `r_0` first.
    pub fn ascending(&self) -> Vec<Rule> {
        self.recursive_rules().iter().rev().cloned().collect()
    }
}

impl fmt::Display for RuleLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl Machine {
    /// Builds the rule ladder for `goal`: unfolds the recursive rule as long
    /// as the newest rule applies to `goal`. The first inapplicable rule is
    /// dropped. `stats.rules_generated` counts the unfolded rules kept.
    pub fn unfold_runtime(
        &mut self,
        goal: &Term,
        program: &Program,
        scheme: &UnfoldingScheme,
        cap: usize,
    ) -> Result<RuleLadder> {
        let r0 = program.recursive_rule();
        if !self.applicable(r0, goal)? {
            for b in program.base_rules() {
                if self.applicable(b, goal)? {
                    return Ok(RuleLadder {
                        rules: program.base_rules().to_vec(),
                        recursive: 0,
                    });
                }
            }
            return Err(Error::NoRuleApplicable(
                self.store.resolve(goal).to_string(),
            ));
        }
        let mut rec = vec![r0.clone()];
        self.grow(&mut rec, goal, scheme, cap)?;
        Ok(RuleLadder::from_ascending(rec, program.base_rules()))
    }

    /// Appends `step(last)` to `rec` while the new rule applies to `goal`.
    /// `rec` is in ascending order and its last rule must apply to `goal`.
    pub(crate) fn grow(
        &mut self,
        rec: &mut Vec<Rule>,
        goal: &Term,
        scheme: &UnfoldingScheme,
        cap: usize,
    ) -> Result<usize> {
        let mut added = 0;
        loop {
            let next = (scheme.step)(rec.last().expect("non-empty ladder"))?;
            if !self.applicable(&next, goal)? {
                return Ok(added);
            }
            if rec.len() > cap {
                return Err(Error::UnfoldCapExceeded(cap));
            }
            rec.push(next);
            added += 1;
            self.stats.rules_generated += 1;
        }
    }
}
