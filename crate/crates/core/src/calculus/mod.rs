//! The sequent calculus for QML.
//!
//! Axioms `a |- a` (AX) and `G |- []a, ~[]a` (MEM); rules WKN, CUT, the two
//! left conjunction rules, right conjunction, left and right negation, the
//! double negation rules and K. Sequent sides are sets.
//!
//! Two independent code paths live here. [`rules`] and [`derivation`] state
//! the schemas over ordinary formula sets and check derivation trees against
//! them. [`saturate`] is a forward-saturation engine over a fixed finite
//! universe of formulas that keeps only the subsumption-minimal derivable
//! sequents and recovers weakening by a superset test.

mod derivation;
mod rules;
mod saturate;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Formula, Sequent};

pub use derivation::{check_derivation, parse_derivation, Derivation, DerivationParseError};
pub use rules::{is_rule_instance, rule_conclusions};
pub use saturate::{
    contains, extract_derivation, saturate, DerivableSet, Saturator, Universe, MAX_UNIVERSE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Ax,
    Mem,
    Wkn,
    Cut,
    AndL1,
    AndL2,
    AndR,
    NegL,
    NegR,
    NegNegL,
    NegNegR,
    K,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Ax,
        Rule::Mem,
        Rule::Wkn,
        Rule::Cut,
        Rule::AndL1,
        Rule::AndL2,
        Rule::AndR,
        Rule::NegL,
        Rule::NegR,
        Rule::NegNegL,
        Rule::NegNegR,
        Rule::K,
    ];

    pub fn arity(self) -> usize {
        match self {
            Rule::Ax | Rule::Mem => 0,
            Rule::Cut | Rule::AndR => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "AX",
            Rule::Mem => "MEM",
            Rule::Wkn => "WKN",
            Rule::Cut => "CUT",
            Rule::AndL1 => "AND_L1",
            Rule::AndL2 => "AND_L2",
            Rule::AndR => "AND_R",
            Rule::NegL => "NEG_L",
            Rule::NegR => "NEG_R",
            Rule::NegNegL => "NEG_NEG_L",
            Rule::NegNegR => "NEG_NEG_R",
            Rule::K => "K",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule {s:?}"))
    }
}

/// One application of a rule: premises, conclusion and the formulas that
/// instantiate the schema (`a`, `b`, or the cut formula).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: Rule,
    pub premises: Vec<Sequent>,
    pub conclusion: Sequent,
    pub principal: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("{rule} takes {expected} premise(s), got {got}")]
    Arity {
        rule: Rule,
        expected: usize,
        got: usize,
    },
    #[error("formula {0} is outside the universe")]
    OutsideUniverse(Formula),
    #[error("universe is not closed under subformulas: {0} is missing")]
    NotSubformulaClosed(Formula),
    #[error("universe has {0} formulas; at most {MAX_UNIVERSE} are supported")]
    UniverseTooLarge(usize),
    #[error("sequent {0} is not derivable in the saturated set")]
    NotDerivable(Sequent),
}
