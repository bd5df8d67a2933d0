//! Formulas of quantum modal logic.
//!
//! The abstract syntax has atoms, conjunction, negation and necessity only.
//! Disjunction and possibility exist in the concrete syntax and are
//! desugared by the parser: `a | b` becomes `~(~a & ~b)` and `<>a` becomes
//! `~[]~a`.

mod enumerate;
mod parser;
mod sequent;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use enumerate::{count_of_size, enumerate_formula, FormulaEnumerator};
pub use parser::{parse, parse_sequent, ParseError};
pub use sequent::Sequent;

/// A formula tree. Children are reference counted so that clones are cheap
/// and formulas can be shared across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Not(Arc<Formula>),
    Box(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
}

/// A finite, duplicate-free set of formulas in canonical (structural) order.
pub type FormulaSet = BTreeSet<Formula>;

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Formula {
        Formula::Not(Arc::new(inner))
    }

    pub fn boxed(inner: Formula) -> Formula {
        Formula::Box(Arc::new(inner))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Arc::new(left), Arc::new(right))
    }

    /// `a | b`, desugared to `~(~a & ~b)`.
    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(left), Formula::not(right)))
    }

    /// `<>a`, desugared to `~[]~a`.
    pub fn diamond(inner: Formula) -> Formula {
        Formula::not(Formula::boxed(Formula::not(inner)))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Formula::Atom(name) => Some(name),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(a) | Formula::Box(a) => 1 + a.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn contains_box(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Box(_) => true,
            Formula::Not(a) => a.contains_box(),
            Formula::And(a, b) => a.contains_box() || b.contains_box(),
        }
    }

    /// Adds this formula and all of its subformulas to `out`.
    pub fn collect_subformulas(&self, out: &mut FormulaSet) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Atom(_) => {}
            Formula::Not(a) | Formula::Box(a) => a.collect_subformulas(out),
            Formula::And(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    pub fn subformulas(&self) -> FormulaSet {
        let mut out = FormulaSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name.to_string());
            }
            Formula::Not(a) | Formula::Box(a) => a.collect_atoms(out),
            Formula::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// Number of subformula occurrences (equal to `size`).
    pub fn occurrences(&self) -> usize {
        self.size()
    }
}

/// Smallest superset of `seed` closed under subformulas and under `~p` for
/// every atom `p` it contains.
pub fn admissible_closure(seed: &FormulaSet) -> FormulaSet {
    let mut out = FormulaSet::new();
    for f in seed {
        f.collect_subformulas(&mut out);
    }
    let negated_atoms: Vec<Formula> = out
        .iter()
        .filter(|f| f.is_atom())
        .map(|p| Formula::not(p.clone()))
        .collect();
    out.extend(negated_atoms);
    out
}

pub fn is_admissible(set: &FormulaSet) -> bool {
    admissible_closure(set).len() == set.len()
}

/// Closure under subformulas only.
pub fn subformula_closure(seed: &FormulaSet) -> FormulaSet {
    let mut out = FormulaSet::new();
    for f in seed {
        f.collect_subformulas(&mut out);
    }
    out
}

pub fn is_subformula_closed(set: &FormulaSet) -> bool {
    subformula_closure(set).len() == set.len()
}

pub fn atoms_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in formulas {
        f.collect_atoms(&mut out);
    }
    out
}

// Binding strength used by the printer: conjunctions bind looser than the
// prefix operators, and only a right-nested conjunction needs parentheses.
fn fmt_operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::And(..) => write!(out, "({f})"),
        _ => write!(out, "{f}"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(name) => out.write_str(name),
            Formula::Not(a) => {
                out.write_str("~")?;
                fmt_operand(a, out)
            }
            Formula::Box(a) => {
                out.write_str("[]")?;
                fmt_operand(a, out)
            }
            Formula::And(a, b) => {
                write!(out, "{a} & ")?;
                fmt_operand(b, out)
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{self}")
    }
}

/// Renders a formula in the concrete syntax accepted by [`parse`].
pub fn render(f: &Formula) -> String {
    f.to_string()
}
