//! The example recursions shipped with the crate.

use std::fmt;
use std::str::FromStr;

use crate::engine::{Caps, Engine};
use crate::error::Result;
use crate::parse::parse_program;
use crate::rule::{Predicate, Program};
use crate::unfold::UnfoldingScheme;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Example {
    Summation,
    Reversal,
    Sorting,
    Countdown,
}

impl Example {
    pub const ALL: [Example; 4] = [
        Example::Summation,
        Example::Reversal,
        Example::Sorting,
        Example::Countdown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Summation => "summation",
            Example::Reversal => "reversal",
            Example::Sorting => "sorting",
            Example::Countdown => "countdown",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Example::Summation => include_str!("../programs/summation.chr"),
            Example::Reversal => include_str!("../programs/reversal.chr"),
            Example::Sorting => include_str!("../programs/sorting.chr"),
            Example::Countdown => include_str!("../programs/countdown.chr"),
        }
    }

    pub fn program(self) -> Program {
        parse_program(self.source()).expect("shipped program is valid")
    }

    pub fn scheme(self) -> UnfoldingScheme {
        match self {
            Example::Summation => UnfoldingScheme::summation(),
            Example::Reversal => UnfoldingScheme::reversal(),
            Example::Sorting => UnfoldingScheme::sorting(),
            Example::Countdown => UnfoldingScheme::countdown(),
        }
    }

    /// Other names goals may use for this predicate.
    pub fn aliases(self) -> Vec<Predicate> {
        match self {
            Example::Summation => vec![Predicate::new("sum", 2)],
            _ => vec![],
        }
    }

    /// Registers the program, its scheme and aliases with default caps.
    pub fn register(self, engine: &mut Engine) -> Result<()> {
        self.register_with(engine, Caps::default())
    }

    pub fn register_with(self, engine: &mut Engine, caps: Caps) -> Result<()> {
        let program = self.program();
        let pred = program.predicate.clone();
        engine.register(program, self.scheme(), caps)?;
        for alias in self.aliases() {
            engine.alias(alias, &pred)?;
        }
        Ok(())
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown example {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_programs_parse() {
        for ex in Example::ALL {
            let p = ex.program();
            assert_eq!(p.predicate, ex.scheme().predicate, "{ex}");
            assert!((ex.scheme().step)(p.recursive_rule()).is_ok(), "{ex}");
            assert_eq!(ex.name().parse::<Example>(), Ok(ex));
        }
    }
}
