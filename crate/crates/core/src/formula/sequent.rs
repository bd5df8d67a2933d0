use std::collections::BTreeSet;
use std::fmt;

use super::{admissible_closure, atoms_of, Formula, FormulaSet};

/// `antecedent |- succedent`, both sides finite sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Sequent {
    pub antecedent: FormulaSet,
    pub succedent: FormulaSet,
}

impl Sequent {
    pub fn new(antecedent: FormulaSet, succedent: FormulaSet) -> Self {
        Sequent {
            antecedent,
            succedent,
        }
    }

    pub fn from_slices(antecedent: &[Formula], succedent: &[Formula]) -> Self {
        Sequent::new(
            antecedent.iter().cloned().collect(),
            succedent.iter().cloned().collect(),
        )
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        atoms_of(self.formulas())
    }

    pub fn all_formulas(&self) -> FormulaSet {
        self.formulas().cloned().collect()
    }

    /// Admissible closure of every formula occurring in the sequent.
    pub fn admissible_closure(&self) -> FormulaSet {
        admissible_closure(&self.all_formulas())
    }

    /// Componentwise inclusion: `self` weakens to `other`.
    pub fn is_weakening_of(&self, other: &Sequent) -> bool {
        other.antecedent.is_subset(&self.antecedent) && other.succedent.is_subset(&self.succedent)
    }

    pub fn contains_box(&self) -> bool {
        self.formulas().any(Formula::contains_box)
    }

    /// Sum of formula sizes on both sides.
    pub fn size(&self) -> usize {
        self.formulas().map(Formula::size).sum()
    }
}

fn write_side(out: &mut fmt::Formatter<'_>, side: &FormulaSet) -> fmt::Result {
    for (i, f) in side.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{f}")?;
    }
    Ok(())
}

impl fmt::Display for Sequent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(out, &self.antecedent)?;
        if !self.antecedent.is_empty() {
            out.write_str(" ")?;
        }
        out.write_str("|-")?;
        if !self.succedent.is_empty() {
            out.write_str(" ")?;
        }
        write_side(out, &self.succedent)
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{self}")
    }
}
