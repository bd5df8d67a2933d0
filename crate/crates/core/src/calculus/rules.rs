//! Rule schemas over formula sets.
//!
//! With set-valued sides, a premise side written `a, G` determines `G` only
//! up to whether `a` itself belongs to `G`, so every schema is instantiated
//! for both readings.

use std::collections::BTreeSet;

use super::{CalculusError, Rule, RuleInstance};
use crate::formula::{Formula, FormulaSet, Sequent};

/// The contexts `G` with `{a} ∪ G = side`.
fn contexts(side: &FormulaSet, a: &Formula) -> Vec<FormulaSet> {
    if !side.contains(a) {
        return Vec::new();
    }
    let mut without = side.clone();
    without.remove(a);
    vec![without, side.clone()]
}

fn with(set: &FormulaSet, f: &Formula) -> FormulaSet {
    let mut out = set.clone();
    out.insert(f.clone());
    out
}

fn singleton(set: &FormulaSet) -> Option<&Formula> {
    match set.len() {
        1 => set.iter().next(),
        _ => None,
    }
}

/// Every instance of `rule` with the given premises whose conclusion uses
/// only formulas from `universe`.
///
/// AX and MEM are generated with an empty antecedent context; WKN adds one
/// formula to one side.
pub fn rule_conclusions(
    rule: Rule,
    premises: &[Sequent],
    universe: &FormulaSet,
) -> Result<Vec<RuleInstance>, CalculusError> {
    if premises.len() != rule.arity() {
        return Err(CalculusError::Arity {
            rule,
            expected: rule.arity(),
            got: premises.len(),
        });
    }
    let mut out: Vec<(Sequent, Vec<Formula>)> = Vec::new();
    let mut emit = |conclusion: Sequent, principal: Vec<Formula>| out.push((conclusion, principal));
    match rule {
        Rule::Ax => {
            for a in universe {
                emit(
                    Sequent::from_slices(std::slice::from_ref(a), std::slice::from_ref(a)),
                    vec![a.clone()],
                );
            }
        }
        Rule::Mem => {
            for f in universe {
                if let Formula::Box(a) = f {
                    let neg = Formula::not(f.clone());
                    if universe.contains(&neg) {
                        emit(
                            Sequent::from_slices(&[], &[f.clone(), neg]),
                            vec![(**a).clone()],
                        );
                    }
                }
            }
        }
        Rule::Wkn => {
            let p = &premises[0];
            for f in universe {
                if !p.antecedent.contains(f) {
                    emit(
                        Sequent::new(with(&p.antecedent, f), p.succedent.clone()),
                        vec![f.clone()],
                    );
                }
                if !p.succedent.contains(f) {
                    emit(
                        Sequent::new(p.antecedent.clone(), with(&p.succedent, f)),
                        vec![f.clone()],
                    );
                }
            }
        }
        Rule::Cut => {
            let (left, right) = (&premises[0], &premises[1]);
            for a in left.succedent.intersection(&right.antecedent) {
                for delta1 in contexts(&left.succedent, a) {
                    for gamma2 in contexts(&right.antecedent, a) {
                        let gamma: FormulaSet = left.antecedent.union(&gamma2).cloned().collect();
                        let delta: FormulaSet = delta1.union(&right.succedent).cloned().collect();
                        emit(Sequent::new(gamma, delta), vec![a.clone()]);
                    }
                }
            }
        }
        Rule::AndL1 | Rule::AndL2 => {
            let p = &premises[0];
            for f in universe {
                let Formula::And(a, b) = f else { continue };
                let active: &Formula = if rule == Rule::AndL1 { a } else { b };
                for gamma in contexts(&p.antecedent, active) {
                    emit(
                        Sequent::new(with(&gamma, f), p.succedent.clone()),
                        vec![(**a).clone(), (**b).clone()],
                    );
                }
            }
        }
        Rule::AndR => {
            let (left, right) = (&premises[0], &premises[1]);
            if left.antecedent == right.antecedent {
                for f in universe {
                    let Formula::And(a, b) = f else { continue };
                    let from_left: BTreeSet<FormulaSet> =
                        contexts(&left.succedent, a).into_iter().collect();
                    for delta in contexts(&right.succedent, b) {
                        if from_left.contains(&delta) {
                            emit(
                                Sequent::new(left.antecedent.clone(), with(&delta, f)),
                                vec![(**a).clone(), (**b).clone()],
                            );
                        }
                    }
                }
            }
        }
        Rule::NegL => {
            let p = &premises[0];
            for a in &p.succedent {
                for delta in contexts(&p.succedent, a) {
                    emit(
                        Sequent::new(with(&p.antecedent, &Formula::not(a.clone())), delta),
                        vec![a.clone()],
                    );
                }
            }
        }
        Rule::NegR => {
            let p = &premises[0];
            if let Some(a) = singleton(&p.antecedent) {
                let negated: FormulaSet = p.succedent.iter().cloned().map(Formula::not).collect();
                emit(
                    Sequent::new(negated, [Formula::not(a.clone())].into_iter().collect()),
                    vec![a.clone()],
                );
            }
        }
        Rule::NegNegL => {
            let p = &premises[0];
            for a in &p.antecedent {
                let nn = Formula::not(Formula::not(a.clone()));
                for gamma in contexts(&p.antecedent, a) {
                    emit(
                        Sequent::new(with(&gamma, &nn), p.succedent.clone()),
                        vec![a.clone()],
                    );
                }
            }
        }
        Rule::NegNegR => {
            let p = &premises[0];
            for a in &p.succedent {
                let nn = Formula::not(Formula::not(a.clone()));
                for delta in contexts(&p.succedent, a) {
                    emit(
                        Sequent::new(p.antecedent.clone(), with(&delta, &nn)),
                        vec![a.clone()],
                    );
                }
            }
        }
        Rule::K => {
            let p = &premises[0];
            if let Some(a) = singleton(&p.succedent) {
                let boxed: FormulaSet = p.antecedent.iter().cloned().map(Formula::boxed).collect();
                emit(
                    Sequent::new(boxed, [Formula::boxed(a.clone())].into_iter().collect()),
                    vec![a.clone()],
                );
            }
        }
    }
    let mut seen = BTreeSet::new();
    Ok(out
        .into_iter()
        .filter(|(c, _)| c.formulas().all(|f| universe.contains(f)))
        .filter(|(c, p)| seen.insert((c.clone(), p.clone())))
        .map(|(conclusion, principal)| RuleInstance {
            rule,
            premises: premises.to_vec(),
            conclusion,
            principal,
        })
        .collect())
}

/// Whether `conclusion` follows from `premises` by one application of
/// `rule`. AX and MEM accept any instance of their schema (MEM with an
/// arbitrary antecedent); WKN accepts any componentwise superset.
pub fn is_rule_instance(rule: Rule, premises: &[Sequent], conclusion: &Sequent) -> bool {
    if premises.len() != rule.arity() {
        return false;
    }
    match rule {
        Rule::Ax => {
            conclusion.antecedent.len() == 1 && conclusion.antecedent == conclusion.succedent
        }
        Rule::Mem => {
            conclusion.succedent.len() == 2
                && conclusion.succedent.iter().any(|f| {
                    matches!(f, Formula::Box(_))
                        && conclusion.succedent.contains(&Formula::not(f.clone()))
                })
        }
        Rule::Wkn => conclusion.is_weakening_of(&premises[0]),
        _ => {
            let mut universe = conclusion.all_formulas();
            for p in premises {
                universe.extend(p.formulas().cloned());
            }
            rule_conclusions(rule, premises, &universe)
                .map(|instances| instances.iter().any(|i| &i.conclusion == conclusion))
                .unwrap_or(false)
        }
    }
}
