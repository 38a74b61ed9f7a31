//! Execution state shared by both interpreters and the unfolder.

use smallvec::SmallVec;

use crate::builtins::{exec_builtin, exec_local};
use crate::error::{Error, Result};
use crate::rule::Rule;
use crate::store::BindingStore;
use crate::term::{Term, VarGen, VarId};

/// Counters collected during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Rules applied, recursive and base.
    pub rule_applications: u64,
    /// Unfolded rules kept in the ladder built for the call.
    pub rules_generated: u64,
    /// Rule trials (head match plus guard check).
    pub guard_checks: u64,
    /// Work units spent in unification and builtins.
    pub builtin_work: u64,
    /// Ladder indices of the recursive rules applied, in order.
    pub applied_rule_indices: Vec<usize>,
    /// Whether the rule cache grew during the call.
    pub cache_extended: bool,
}

/// Result of a successful run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    /// The goal with all bindings applied.
    pub goal: Term,
    /// Values of the goal's variables, in order of first occurrence.
    pub bindings: Vec<(VarId, Term)>,
    pub stats: StepStats,
}

impl Answer {
    pub fn value(&self, v: VarId) -> Option<&Term> {
        self.bindings.iter().find(|(w, _)| *w == v).map(|(_, t)| t)
    }
}

/// A rule whose head matched a call and whose guard held. Bindings made by
/// the match are still on the trail until [`Machine::commit`].
pub struct Instance<'r> {
    rule: &'r Rule,
    env: Env,
}

type Env = SmallVec<[Option<Term>; 8]>;

/// The body of an applied rule, instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rec_call: Option<Term>,
    pub post: Vec<Term>,
}

const MIN_GC_BINDINGS: usize = 1 << 16;
const MIN_GC_WORK: u64 = 1 << 16;

pub struct Machine {
    pub store: BindingStore,
    pub gen: VarGen,
    pub stats: StepStats,
    gc_bindings: usize,
    gc_work: u64,
}

impl Default for Machine {
    fn default() -> Self {
        Self::new()
    }
}

impl Machine {
    pub fn new() -> Self {
        Self::with_gen(VarGen::new())
    }

    pub fn with_gen(gen: VarGen) -> Self {
        Machine {
            store: BindingStore::new(),
            gen,
            stats: StepStats::default(),
            gc_bindings: MIN_GC_BINDINGS,
            gc_work: MIN_GC_WORK,
        }
    }

    /// Substitutes rule-local variables using `env`, creating fresh variables
    /// for locals not yet seen.
    fn instantiate(env: &mut [Option<Term>], gen: &mut VarGen, t: &Term) -> Term {
        if t.is_ground() {
            return t.clone();
        }
        if let Term::Var(v) = t {
            return env[v.0 as usize]
                .get_or_insert_with(|| gen.fresh_term())
                .clone();
        }
        t.map_vars(&mut |v| {
            env[v.0 as usize]
                .get_or_insert_with(|| gen.fresh_term())
                .clone()
        })
    }

    /// Matches the rule head against `call` and checks the guard. On failure
    /// the store is left unchanged. A guard that would bind a variable of
    /// the call is not entailed and counts as failing.
    pub fn try_rule<'r>(&mut self, rule: &'r Rule, call: &Term) -> Result<Option<Instance<'r>>> {
        self.stats.guard_checks += 1;
        let call = self.store.walk(call).clone();
        if !rule.predicate().matches(&call) {
            return Ok(None);
        }
        let first_local = self.gen.issued();
        let mark = self.store.mark();
        let mut env: Env = smallvec::smallvec![None; rule.var_count()];
        for (pat, arg) in rule.head.args().iter().zip(call.args()) {
            match pat {
                Term::Var(v) if env[v.0 as usize].is_none() => {
                    env[v.0 as usize] = Some(arg.clone());
                }
                _ => {
                    let p = Self::instantiate(&mut env, &mut self.gen, pat);
                    if !self.store.unify(&p, arg) {
                        self.store.undo_to(mark);
                        return Ok(None);
                    }
                }
            }
        }
        let mut held = true;
        for g in &rule.guard {
            let fast = match Self::fresh_pattern_test(g, &env) {
                Some((val, pat)) => self.match_fresh(pat, &val, &mut env),
                None => exec_local(g, &mut env, &mut self.store),
            };
            let ok = match fast {
                Some(ok) => ok,
                None => {
                    let g = Self::instantiate(&mut env, &mut self.gen, g);
                    match exec_builtin(&g, &mut self.store) {
                        Ok(ok) => ok,
                        Err(e) => {
                            self.store.undo_to(mark);
                            return Err(e.into());
                        }
                    }
                }
            };
            if !ok {
                held = false;
                break;
            }
        }
        if !held
            || self
                .store
                .trailed_since(mark)
                .iter()
                .any(|v| v.0 < first_local)
        {
            self.store.undo_to(mark);
            return Ok(None);
        }
        Ok(Some(Instance { rule, env }))
    }

    /// For a guard `X = P` with `X` already known, the value of `X` and `P`.
    fn fresh_pattern_test<'g>(g: &'g Term, env: &[Option<Term>]) -> Option<(Term, &'g Term)> {
        if !g.functor().is_some_and(|(n, a)| n == "=" && a == 2) {
            return None;
        }
        let args = g.args();
        let known = |t: &Term| t.as_var().and_then(|v| env[v.0 as usize].clone());
        match (known(&args[0]), known(&args[1])) {
            (Some(val), None) => Some((val, &args[1])),
            (None, Some(val)) => Some((val, &args[0])),
            _ => None,
        }
    }

    /// One-way match of `pat` against `val`, binding pattern variables in
    /// `env` only. Gives up (`None`, with `env` restored) when a pattern
    /// variable is already known or occurs twice, or when `val` has an
    /// unbound variable where `pat` has structure; the general path decides
    /// those.
    fn match_fresh(&mut self, pat: &Term, val: &Term, env: &mut [Option<Term>]) -> Option<bool> {
        let mut set: SmallVec<[usize; 8]> = SmallVec::new();
        let mut stack: SmallVec<[(&Term, Term); 8]> = smallvec::smallvec![(pat, val.clone())];
        let mut steps = 0u64;
        let give_up = |env: &mut [Option<Term>], set: &[usize]| {
            for &i in set {
                env[i] = None;
            }
            None
        };
        let ok = loop {
            let Some((p, v)) = stack.pop() else {
                break true;
            };
            steps += 1;
            if let Term::Var(x) = p {
                let slot = &mut env[x.0 as usize];
                if slot.is_some() {
                    return give_up(env, &set);
                }
                *slot = Some(v);
                set.push(x.0 as usize);
                continue;
            }
            let v = self.store.walk(&v);
            match (p, v) {
                (_, Term::Var(_)) => return give_up(env, &set),
                (Term::Compound(pc), Term::Compound(vc)) => {
                    if pc.functor() != vc.functor() || pc.arity() != vc.arity() {
                        break false;
                    }
                    if pc.is_ground() {
                        if p != v {
                            break false;
                        }
                        continue;
                    }
                    let vargs = vc.args().to_vec();
                    stack.extend(pc.args().iter().zip(vargs).rev());
                }
                _ => {
                    if p != v {
                        break false;
                    }
                }
            }
        };
        self.store.add_work(steps);
        if !ok {
            give_up(env, &set);
        }
        Some(ok)
    }

    /// True if `rule` applies to `call`. Never changes any binding.
    pub fn applicable(&mut self, rule: &Rule, call: &Term) -> Result<bool> {
        let mark = self.store.mark();
        let ok = self.try_rule(rule, call)?.is_some();
        self.store.undo_to(mark);
        Ok(ok)
    }

    /// Commits a matched rule: runs its pre-body and returns the recursive
    /// call and the instantiated post-body.
    pub fn commit(&mut self, inst: Instance<'_>) -> Result<Step> {
        let Instance { rule, mut env } = inst;
        self.store.commit();
        self.stats.rule_applications += 1;
        for g in &rule.body_pre {
            if exec_local(g, &mut env, &mut self.store) == Some(true) {
                self.store.commit();
                continue;
            }
            let g = Self::instantiate(&mut env, &mut self.gen, g);
            self.exec(&g)?;
        }
        let rec_call = rule
            .body_rec
            .as_ref()
            .map(|t| Self::instantiate(&mut env, &mut self.gen, t));
        let post = rule
            .body_post
            .iter()
            .map(|t| Self::instantiate(&mut env, &mut self.gen, t))
            .collect();
        self.store.commit();
        Ok(Step { rec_call, post })
    }

    /// Applies `rule` once to `call` if it is applicable. The returned
    /// post-body is resolved against the current bindings.
    pub fn apply_rule(&mut self, rule: &Rule, call: &Term) -> Result<Option<Step>> {
        let Some(inst) = self.try_rule(rule, call)? else {
            return Ok(None);
        };
        let mut step = self.commit(inst)?;
        step.post = step.post.iter().map(|g| self.store.resolve(g)).collect();
        Ok(Some(step))
    }

    fn exec(&mut self, goal: &Term) -> Result<()> {
        if exec_builtin(goal, &mut self.store)? {
            self.store.commit();
            Ok(())
        } else {
            Err(Error::Inconsistent(self.store.resolve(goal).to_string()))
        }
    }

    /// Runs body goals in order; a failing goal is an error.
    pub fn exec_goals(&mut self, goals: &[Term]) -> Result<()> {
        goals.iter().try_for_each(|g| self.exec(g))
    }

    /// Collects unreachable bindings when the store has grown enough since
    /// the last collection.
    pub(crate) fn maybe_gc<'a>(&mut self, roots: impl FnOnce() -> Vec<&'a Term>) {
        if self.store.len() < self.gc_bindings && self.store.work() < self.gc_work {
            return;
        }
        self.store.retain_reachable(roots());
        let live = self.store.len();
        self.gc_bindings = (2 * live).max(MIN_GC_BINDINGS);
        self.gc_work = self.store.work() + (8 * live as u64).max(MIN_GC_WORK);
    }

    /// Resets the counters before a new top-level call.
    pub(crate) fn begin(&mut self) -> u64 {
        self.stats = StepStats::default();
        self.store.work()
    }

    /// Builds the answer for `goal` after a run started at work `work0`.
    pub(crate) fn answer(&mut self, goal: &Term, work0: u64) -> Result<Answer> {
        let resolved = self.store.resolve(goal);
        let mut bindings = Vec::new();
        for v in goal.vars() {
            let value = self.store.resolve(&Term::Var(v));
            if !value.is_ground() {
                return Err(Error::NonGroundAnswer(resolved.to_string()));
            }
            bindings.push((v, value));
        }
        self.stats.builtin_work = self.store.work() - work0;
        self.store.commit();
        self.store.retain_reachable([goal]);
        Ok(Answer {
            goal: resolved,
            bindings,
            stats: self.stats.clone(),
        })
    }
}
