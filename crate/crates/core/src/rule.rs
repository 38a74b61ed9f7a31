//! Rules and programs.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::builtins::is_builtin;
use crate::error::ValidationError;
use crate::term::{Symbol, Term, VarId};

/// A simplification rule `name @ head <=> guard | pre, rec, post`.
///
/// Variables are local to the rule and numbered densely from zero in order of
/// first occurrence (head, guard, pre, rec, post), so alpha-equivalent rules
/// compare equal. A rule without a recursive call keeps all body goals in
/// `body_pre`.
#[derive(Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: Option<String>,
    pub head: Term,
    pub guard: Vec<Term>,
    pub body_pre: Vec<Term>,
    pub body_rec: Option<Term>,
    pub body_post: Vec<Term>,
    var_count: usize,
}

impl Rule {
    pub fn new(
        name: Option<String>,
        head: Term,
        guard: Vec<Term>,
        body_pre: Vec<Term>,
        body_rec: Option<Term>,
        body_post: Vec<Term>,
    ) -> Self {
        let (body_pre, body_post) = match body_rec {
            Some(_) => (body_pre, body_post),
            None => ([body_pre, body_post].concat(), Vec::new()),
        };
        let mut next = 0u64;
        let mut canonical = true;
        for t in std::iter::once(&head)
            .chain(&guard)
            .chain(&body_pre)
            .chain(&body_rec)
            .chain(&body_post)
        {
            t.visit_vars(&mut |v| {
                if v.0 == next {
                    next += 1;
                } else if v.0 > next {
                    canonical = false;
                }
            });
        }
        if canonical {
            return Rule {
                name,
                head,
                guard,
                body_pre,
                body_rec,
                body_post,
                var_count: next as usize,
            };
        }
        let mut map: FxHashMap<VarId, VarId> = FxHashMap::default();
        let mut norm = |t: &Term| {
            t.map_vars(&mut |v| {
                let next = VarId(map.len() as u64);
                Term::Var(*map.entry(v).or_insert(next))
            })
        };
        let head = norm(&head);
        let guard = guard.iter().map(&mut norm).collect();
        let body_pre = body_pre.iter().map(&mut norm).collect();
        let body_rec = body_rec.as_ref().map(&mut norm);
        let body_post = body_post.iter().map(&mut norm).collect();
        let var_count = map.len();
        Rule {
            name,
            head,
            guard,
            body_pre,
            body_rec,
            body_post,
            var_count,
        }
    }

    /// Number of distinct local variables.
    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn is_recursive(&self) -> bool {
        self.body_rec.is_some()
    }

    pub fn predicate(&self) -> Predicate {
        Predicate::of(&self.head).expect("rule head is a callable term")
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    /// All terms of the rule in canonical order.
    pub fn parts(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.head)
            .chain(&self.guard)
            .chain(&self.body_pre)
            .chain(&self.body_rec)
            .chain(&self.body_post)
    }

    /// Head arguments are pairwise distinct variables.
    pub fn head_is_variables(&self) -> bool {
        let mut seen = Vec::new();
        self.head.args().iter().all(|a| match a.as_var() {
            Some(v) if !seen.contains(&v) => {
                seen.push(v);
                true
            }
            _ => false,
        })
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::rule_to_string(self))
    }
}

/// Predicate symbol with arity, printed as `name/arity`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Predicate {
    pub name: Symbol,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate {
            name: Symbol::new(name),
            arity,
        }
    }

    pub fn of(t: &Term) -> Option<Self> {
        t.functor()
            .map(|(name, arity)| Predicate { name: *name, arity })
    }

    pub fn matches(&self, t: &Term) -> bool {
        t.functor()
            .is_some_and(|(n, a)| a == self.arity && *n == self.name)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// The rules for one predicate: the recursive rule, then base rules.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub predicate: Predicate,
    pub rules: Vec<Rule>,
}

impl Program {
    /// Builds and validates a program.
    pub fn new(rules: Vec<Rule>) -> Result<Self, ValidationError> {
        let predicate = rules.first().ok_or(ValidationError::Empty)?.predicate();
        let program = Program { predicate, rules };
        validate_program(&program)?;
        Ok(program)
    }

    pub fn recursive_rule(&self) -> &Rule {
        &self.rules[0]
    }

    pub fn base_rules(&self) -> &[Rule] {
        &self.rules[1..]
    }
}

pub fn validate_program(p: &Program) -> Result<(), ValidationError> {
    if p.rules.is_empty() {
        return Err(ValidationError::Empty);
    }
    for (i, rule) in p.rules.iter().enumerate() {
        if !p.predicate.matches(&rule.head) {
            return Err(ValidationError::PredicateMismatch {
                rule: i,
                expected: p.predicate.to_string(),
                found: Predicate::of(&rule.head)
                    .map_or_else(|| rule.head.to_string(), |q| q.to_string()),
            });
        }
        if let Some(rec) = &rule.body_rec {
            if !p.predicate.matches(rec) {
                return Err(ValidationError::UnknownGoal {
                    rule: i,
                    goal: rec.to_string(),
                });
            }
        }
        for goal in rule
            .guard
            .iter()
            .chain(&rule.body_pre)
            .chain(&rule.body_post)
        {
            if p.predicate.matches(goal) {
                return Err(ValidationError::NonLinearRecursion { rule: i });
            }
            if !is_builtin(goal) {
                return Err(ValidationError::UnknownGoal {
                    rule: i,
                    goal: goal.to_string(),
                });
            }
        }
    }
    match p.rules.iter().filter(|r| r.is_recursive()).count() {
        0 => return Err(ValidationError::NoRecursiveRule),
        1 => {}
        _ => return Err(ValidationError::MultipleRecursiveRules),
    }
    if !p.rules[0].is_recursive() {
        return Err(ValidationError::RecursiveRuleNotFirst);
    }
    if !p.rules[0].head_is_variables() {
        return Err(ValidationError::HeadNotVariables);
    }
    Ok(())
}
