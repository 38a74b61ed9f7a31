//! Runtime repeated recursion unfolding for rules with a single linear
//! direct recursion.
//!
//! Given a call, the recursive rule is unfolded with itself again and again,
//! each time doubling the number of recursive steps one application covers,
//! for as long as the newest rule still applies to the call. The resulting
//! ladder of rules is then walked once, most unfolded rule first, applying
//! each rule at most once.
//!
//! ```
//! use recunfold::{parse_goal, Engine, Example, Term};
//!
//! let mut engine = Engine::new();
//! Example::Summation.register(&mut engine).unwrap();
//! let (goal, vars) = parse_goal("sum(10,R)", &mut engine.machine.gen).unwrap();
//! let answer = engine.call(&goal).unwrap();
//! assert_eq!(answer.value(vars[0].1), Some(&Term::int(55)));
//! assert_eq!(answer.stats.applied_rule_indices, [3, 0]);
//! ```

pub mod baseline;
pub mod builtins;
pub mod catalog;
pub mod engine;
pub mod error;
pub mod machine;
pub mod meta;
pub mod parse;
pub mod print;
pub mod rule;
pub mod store;
pub mod term;
pub mod unfold;

pub use baseline::DEFAULT_MAX_STEPS;
pub use catalog::Example;
pub use engine::{Caps, Engine, Prepared, Registration};
pub use error::{Error, EvalError, ParseError, Result, ValidationError};
pub use machine::{Answer, Machine, Step, StepStats};
pub use meta::count_applications;
pub use parse::{parse_goal, parse_program, parse_rule, parse_rules};
pub use print::rule_to_string;
pub use rule::{validate_program, Predicate, Program, Rule};
pub use store::{BindingStore, Mark};
pub use term::{rename_apart, term_size, Symbol, Term, VarGen, VarId};
pub use unfold::{syntactic_unfold, RuleLadder, UnfoldingScheme, DEFAULT_UNFOLD_CAP};
