use thiserror::Error;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("program has no rules")]
    Empty,
    #[error("rule {rule} is for {found}, expected {expected}")]
    PredicateMismatch {
        rule: usize,
        expected: String,
        found: String,
    },
    #[error("program has no recursive rule")]
    NoRecursiveRule,
    #[error("program has more than one recursive rule")]
    MultipleRecursiveRules,
    #[error("the recursive rule must come first")]
    RecursiveRuleNotFirst,
    #[error("rule {rule} calls its own predicate more than once")]
    NonLinearRecursion { rule: usize },
    #[error("head arguments of the recursive rule must be distinct variables")]
    HeadNotVariables,
    #[error("rule {rule}: {goal} is not a builtin")]
    UnknownGoal { rule: usize, goal: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable in arithmetic expression")]
    UnboundVariable,
    #[error("unknown arithmetic operator {0}")]
    UnknownOperator(String),
    #[error("instantiation error: {0}")]
    Instantiation(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("unknown builtin {0}")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no rule applicable to {0}")]
    NoRuleApplicable(String),
    #[error("step limit of {0} rule applications exceeded")]
    StepLimitExceeded(u64),
    #[error("unfolding cap of {0} generated rules exceeded")]
    UnfoldCapExceeded(usize),
    #[error("body constraint failed: {0}")]
    Inconsistent(String),
    #[error("rule does not match the {scheme} template: {reason}")]
    TemplateMismatch { scheme: String, reason: String },
    #[error("cannot unfold: {0}")]
    MatchFailure(String),
    #[error("{0} is already registered")]
    DuplicateRegistration(String),
    #[error("scheme is for {scheme}, program is for {program}")]
    SchemeMismatch { scheme: String, program: String },
    #[error("{0} is not registered")]
    NotRegistered(String),
    #[error("answer is not ground: {0}")]
    NonGroundAnswer(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
