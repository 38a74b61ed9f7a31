//! Registered recursions answered by unfolding plus ladder interpretation,
//! with a rule cache shared by later calls.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::baseline::DEFAULT_MAX_STEPS;
use crate::error::{Error, Result};
use crate::machine::{Answer, Machine};
use crate::rule::{validate_program, Predicate, Program};
use crate::term::Term;
use crate::unfold::{RuleLadder, UnfoldingScheme, DEFAULT_UNFOLD_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub unfold_cap: usize,
    pub max_steps: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            unfold_cap: DEFAULT_UNFOLD_CAP,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Registration {
    pub program: Program,
    pub scheme: UnfoldingScheme,
    pub caps: Caps,
    cache: Arc<RuleLadder>,
}

impl Registration {
    pub fn predicate(&self) -> &Predicate {
        &self.program.predicate
    }

    /// The longest ladder built so far.
    pub fn cache(&self) -> &Arc<RuleLadder> {
        &self.cache
    }
}

/// A ladder chosen for a call, ready to interpret.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub ladder: Arc<RuleLadder>,
    /// Position of the first rule applicable to the goal.
    pub start: usize,
    work0: u64,
}

pub struct Engine {
    pub machine: Machine,
    registrations: FxHashMap<Predicate, Registration>,
    aliases: FxHashMap<Predicate, Predicate>,
    caching: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            machine: Machine::new(),
            registrations: FxHashMap::default(),
            aliases: FxHashMap::default(),
            caching: true,
        }
    }

    /// Turns the rule cache on or off. Without it every call unfolds from
    /// the original rule.
    pub fn set_caching(&mut self, on: bool) {
        self.caching = on;
    }

    pub fn caching(&self) -> bool {
        self.caching
    }

    pub fn register(
        &mut self,
        program: Program,
        scheme: UnfoldingScheme,
        caps: Caps,
    ) -> Result<()> {
        validate_program(&program)?;
        let pred = program.predicate.clone();
        if scheme.predicate != pred {
            return Err(Error::SchemeMismatch {
                scheme: scheme.predicate.to_string(),
                program: pred.to_string(),
            });
        }
        if self.registrations.contains_key(&pred) || self.aliases.contains_key(&pred) {
            return Err(Error::DuplicateRegistration(pred.to_string()));
        }
        let cache = Arc::new(RuleLadder::original(&program));
        self.registrations.insert(
            pred,
            Registration {
                program,
                scheme,
                caps,
                cache,
            },
        );
        Ok(())
    }

    /// Lets goals for `alias` be answered by the registration for `target`.
    pub fn alias(&mut self, alias: Predicate, target: &Predicate) -> Result<()> {
        if !self.registrations.contains_key(target) {
            return Err(Error::NotRegistered(target.to_string()));
        }
        if alias.arity != target.arity {
            return Err(Error::SchemeMismatch {
                scheme: target.to_string(),
                program: alias.to_string(),
            });
        }
        if self.registrations.contains_key(&alias) || self.aliases.contains_key(&alias) {
            return Err(Error::DuplicateRegistration(alias.to_string()));
        }
        self.aliases.insert(alias, target.clone());
        Ok(())
    }

    pub fn registration(&self, pred: &Predicate) -> Option<&Registration> {
        let pred = self.aliases.get(pred).unwrap_or(pred);
        self.registrations.get(pred)
    }

    /// The goal rewritten to its registered predicate, and that predicate.
    pub fn canonical_goal(&self, goal: &Term) -> Result<(Term, Predicate)> {
        let goal = self.machine.store.walk(goal).clone();
        let pred = Predicate::of(&goal).ok_or_else(|| Error::NotRegistered(goal.to_string()))?;
        if self.registrations.contains_key(&pred) {
            return Ok((goal, pred));
        }
        match self.aliases.get(&pred) {
            Some(target) => Ok((
                Term::compound(target.name, goal.args().iter().cloned()),
                target.clone(),
            )),
            None => Err(Error::NotRegistered(pred.to_string())),
        }
    }

    /// Answers `goal` by unfolding and ladder interpretation.
    pub fn call(&mut self, goal: &Term) -> Result<Answer> {
        let prepared = self.prepare(goal)?;
        self.interpret(goal, &prepared)
    }

    /// The unfolding phase of [`Engine::call`]: extends the cache if its most
    /// unfolded rule still applies, then finds the first applicable rule.
    pub fn prepare(&mut self, goal: &Term) -> Result<Prepared> {
        let (goal, pred) = self.canonical_goal(goal)?;
        let work0 = self.machine.begin();
        let reg = &self.registrations[&pred];
        let (program, scheme, caps) = (&reg.program, &reg.scheme, reg.caps);
        if !self.caching {
            let ladder = self
                .machine
                .unfold_runtime(&goal, program, scheme, caps.unfold_cap)?;
            return Ok(Prepared {
                ladder: Arc::new(ladder),
                start: 0,
                work0,
            });
        }
        let mut ladder = Arc::clone(&reg.cache);
        if ladder.recursive > 0 && self.machine.applicable(&ladder.rules[0], &goal)? {
            let mut rec = ladder.ascending();
            let added = self
                .machine
                .grow(&mut rec, &goal, scheme, caps.unfold_cap)?;
            if added > 0 {
                ladder = Arc::new(RuleLadder::from_ascending(rec, program.base_rules()));
                self.machine.stats.cache_extended = true;
                self.registrations.get_mut(&pred).unwrap().cache = Arc::clone(&ladder);
            }
        }
        for (pos, rule) in ladder.rules.iter().enumerate() {
            if self.machine.applicable(rule, &goal)? {
                return Ok(Prepared {
                    ladder,
                    start: pos,
                    work0,
                });
            }
        }
        Err(Error::NoRuleApplicable(
            self.machine.store.resolve(&goal).to_string(),
        ))
    }

    /// The interpretation phase of [`Engine::call`].
    pub fn interpret(&mut self, goal: &Term, prepared: &Prepared) -> Result<Answer> {
        let (canon, pred) = self.canonical_goal(goal)?;
        let max_steps = self.registrations[&pred].caps.max_steps;
        self.machine
            .descend(&canon, &prepared.ladder, prepared.start, max_steps)?;
        let mut answer = self.machine.answer(goal, prepared.work0)?;
        answer.goal = self.machine.store.resolve(goal);
        Ok(answer)
    }

    /// Answers `goal` with the original program only.
    pub fn call_original(&mut self, goal: &Term) -> Result<Answer> {
        let (canon, pred) = self.canonical_goal(goal)?;
        let reg = &self.registrations[&pred];
        let (program, max_steps) = (reg.program.clone(), reg.caps.max_steps);
        let mut answer = self.machine.run_original(&canon, &program, max_steps)?;
        answer.goal = self.machine.store.resolve(goal);
        Ok(answer)
    }

    /// A freshly unfolded ladder for `goal`, ignoring the cache.
    pub fn ladder_for(&mut self, goal: &Term) -> Result<RuleLadder> {
        let (goal, pred) = self.canonical_goal(goal)?;
        self.machine.begin();
        let reg = &self.registrations[&pred];
        self.machine
            .unfold_runtime(&goal, &reg.program, &reg.scheme, reg.caps.unfold_cap)
    }
}
