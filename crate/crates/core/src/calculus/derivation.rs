use std::fmt;

use thiserror::Error;

use super::{is_rule_instance, Rule, RuleInstance};
use crate::formula::{parse_sequent, Sequent};

/// A derivation tree. Each child's conclusion is the matching premise of its
/// parent; leaves are axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub instance: RuleInstance,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: Rule, conclusion: Sequent) -> Self {
        Derivation {
            instance: RuleInstance {
                rule,
                premises: Vec::new(),
                conclusion,
                principal: Vec::new(),
            },
            children: Vec::new(),
        }
    }

    /// Builds a node whose premises are its children's conclusions.
    pub fn node(rule: Rule, conclusion: Sequent, children: Vec<Derivation>) -> Self {
        Derivation {
            instance: RuleInstance {
                rule,
                premises: children.iter().map(|c| c.conclusion().clone()).collect(),
                conclusion,
                principal: Vec::new(),
            },
            children,
        }
    }

    pub fn rule(&self) -> Rule {
        self.instance.rule
    }

    pub fn conclusion(&self) -> &Sequent {
        &self.instance.conclusion
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(Derivation::node_count)
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(Derivation::depth)
            .max()
            .unwrap_or(0)
    }

    /// Rules in pre-order.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = vec![self.rule()];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    fn write_indented(&self, depth: usize, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            out,
            "{:width$}{}: {}",
            "",
            self.rule(),
            self.conclusion(),
            width = 2 * depth
        )?;
        for c in &self.children {
            c.write_indented(depth + 1, out)?;
        }
        Ok(())
    }
}

/// One line per node, `RULE: G |- D`, children indented two spaces below
/// their parent.
impl fmt::Display for Derivation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(0, out)
    }
}

/// Re-verifies every node against the rule schemas. Uses only the schema
/// definitions, never the saturation engine.
pub fn check_derivation(d: &Derivation) -> bool {
    let inst = &d.instance;
    inst.premises.len() == inst.rule.arity()
        && d.children.len() == inst.premises.len()
        && d.children
            .iter()
            .zip(&inst.premises)
            .all(|(c, p)| c.conclusion() == p)
        && is_rule_instance(inst.rule, &inst.premises, &inst.conclusion)
        && d.children.iter().all(check_derivation)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("empty derivation")]
    Empty,
}

/// Parses the text produced by `Display`. The result carries no principal
/// formulas; [`check_derivation`] does not need them.
pub fn parse_derivation(text: &str) -> Result<Derivation, DerivationParseError> {
    // (depth, rule, conclusion, children)
    let mut stack: Vec<(usize, Rule, Sequent, Vec<Derivation>)> = Vec::new();
    let mut root: Option<Derivation> = None;

    fn close(
        stack: &mut Vec<(usize, Rule, Sequent, Vec<Derivation>)>,
        root: &mut Option<Derivation>,
    ) {
        let (_, rule, conclusion, children) = stack.pop().expect("non-empty stack");
        let node = Derivation::node(rule, conclusion, children);
        match stack.last_mut() {
            Some(parent) => parent.3.push(node),
            None => *root = Some(node),
        }
    }

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let err = |message: String| DerivationParseError::Line { line, message };
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(err(format!("odd indentation {indent}")));
        }
        let depth = indent / 2;
        let (rule, sequent) = raw
            .trim()
            .split_once(':')
            .ok_or_else(|| err("expected `RULE: sequent`".into()))?;
        let rule: Rule = rule.trim().parse().map_err(err)?;
        let conclusion = parse_sequent(sequent).map_err(|e| err(e.to_string()))?;

        while stack.last().is_some_and(|top| top.0 >= depth) {
            close(&mut stack, &mut root);
        }
        if root.is_some() {
            return Err(err("more than one root".into()));
        }
        let expected = stack.last().map_or(0, |top| top.0 + 1);
        if depth != expected {
            return Err(err(format!(
                "indentation depth {depth}, expected {expected}"
            )));
        }
        stack.push((depth, rule, conclusion, Vec::new()));
    }
    while !stack.is_empty() {
        close(&mut stack, &mut root);
    }
    root.ok_or(DerivationParseError::Empty)
}
