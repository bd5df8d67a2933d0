//! Truth of formulas and sequents at the worlds of a structure.
//!
//! * `i ⊨ p` iff `i ∈ ρ(p)`
//! * `i ⊨ a & b` iff `i ⊨ a` and `i ⊨ b`
//! * `i ⊨ ~a` iff every `rq`-neighbour of `i` falsifies `a`
//! * `i ⊨ []a` iff every `rm`-successor of `i` satisfies `a`
//!
//! Sequents are read pointwise: `Γ |- Δ` holds at `i` when `i ⊨ Γ` implies
//! `i ⊨ δ` for some `δ ∈ Δ`. The global reading, where some single `δ`
//! must follow from `Γ` at every world, is available as
//! [`EvalMode::Literal`].

use std::collections::HashMap;

use crate::formula::Formula;
pub use crate::formula::Sequent;
use crate::structure::{QuantumModalStructure, StructureError, WorldSet};

/// Pointwise evaluation, following the truth clauses one world at a time.
pub fn eval(s: &QuantumModalStructure, world: usize, f: &Formula) -> Result<bool, StructureError> {
    s.check_world(world)?;
    Ok(eval_unchecked(s, world, f))
}

fn eval_unchecked(s: &QuantumModalStructure, i: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => s.value_of(p).contains(i),
        Formula::And(a, b) => eval_unchecked(s, i, a) && eval_unchecked(s, i, b),
        Formula::Not(a) => s.rq.row(i).iter().all(|j| !eval_unchecked(s, j, a)),
        Formula::Box(a) => s.rm.row(i).iter().all(|l| eval_unchecked(s, l, a)),
    }
}

/// `{ i | i ⊨ f }`, computed set-wise.
pub fn sat_set(s: &QuantumModalStructure, f: &Formula) -> WorldSet {
    match f {
        Formula::Atom(p) => s.value_of(p),
        Formula::And(a, b) => sat_set(s, a).intersection(sat_set(s, b)),
        Formula::Not(a) => s.ortho_complement(sat_set(s, a)),
        Formula::Box(a) => necessity(s, sat_set(s, a)),
    }
}

fn necessity(s: &QuantumModalStructure, inner: WorldSet) -> WorldSet {
    WorldSet::from_worlds((0..s.worlds).filter(|&i| s.rm.row(i).is_subset(inner)))
}

/// Worlds satisfying every member of the antecedent and no member of the
/// succedent.
pub fn failing_worlds(s: &QuantumModalStructure, seq: &Sequent) -> WorldSet {
    let mut out = s.all_worlds();
    for g in &seq.antecedent {
        out = out.intersection(sat_set(s, g));
    }
    for d in &seq.succedent {
        out = out.difference(sat_set(s, d));
    }
    out
}

pub fn holds_at(
    s: &QuantumModalStructure,
    world: usize,
    seq: &Sequent,
) -> Result<bool, StructureError> {
    s.check_world(world)?;
    let premises = seq.antecedent.iter().all(|g| eval_unchecked(s, world, g));
    Ok(!premises || seq.succedent.iter().any(|d| eval_unchecked(s, world, d)))
}

pub fn holds_in(s: &QuantumModalStructure, seq: &Sequent) -> bool {
    failing_worlds(s, seq).is_empty()
}

/// Least world at which the sequent fails.
pub fn find_failing_world(s: &QuantumModalStructure, seq: &Sequent) -> Option<usize> {
    failing_worlds(s, seq).first()
}

/// Which reading of a multi-formula succedent to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// At every world, `Γ` implies some member of `Δ`.
    #[default]
    Pointwise,
    /// Some member of `Δ` follows from `Γ` at every world.
    Literal,
}

/// `Γ ⊨_S Δ` under the chosen reading.
pub fn holds_in_mode(s: &QuantumModalStructure, seq: &Sequent, mode: EvalMode) -> bool {
    match mode {
        EvalMode::Pointwise => holds_in(s, seq),
        EvalMode::Literal => {
            let premises = seq
                .antecedent
                .iter()
                .fold(s.all_worlds(), |acc, g| acc.intersection(sat_set(s, g)));
            seq.succedent
                .iter()
                .any(|d| premises.is_subset(sat_set(s, d)))
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Atom(usize),
    Not(usize),
    Box(usize),
    And(usize, usize),
}

/// A sequent flattened into a straight-line program over its subformulas,
/// for evaluating one goal against many structures.
#[derive(Debug, Clone)]
pub struct CompiledSequent {
    atoms: Vec<String>,
    ops: Vec<Op>,
    antecedent: Vec<usize>,
    succedent: Vec<usize>,
}

impl CompiledSequent {
    pub fn new(seq: &Sequent) -> Self {
        let mut compiled = CompiledSequent {
            atoms: Vec::new(),
            ops: Vec::new(),
            antecedent: Vec::new(),
            succedent: Vec::new(),
        };
        let mut slots = HashMap::new();
        let mut atom_slots = HashMap::new();
        for g in &seq.antecedent {
            let slot = compiled.compile(g, &mut slots, &mut atom_slots);
            compiled.antecedent.push(slot);
        }
        for d in &seq.succedent {
            let slot = compiled.compile(d, &mut slots, &mut atom_slots);
            compiled.succedent.push(slot);
        }
        compiled
    }

    fn compile(
        &mut self,
        f: &Formula,
        slots: &mut HashMap<Formula, usize>,
        atom_slots: &mut HashMap<String, usize>,
    ) -> usize {
        if let Some(&slot) = slots.get(f) {
            return slot;
        }
        let op = match f {
            Formula::Atom(p) => {
                let next = self.atoms.len();
                let idx = *atom_slots.entry(p.to_string()).or_insert(next);
                if idx == next {
                    self.atoms.push(p.to_string());
                }
                Op::Atom(idx)
            }
            Formula::Not(a) => Op::Not(self.compile(a, slots, atom_slots)),
            Formula::Box(a) => Op::Box(self.compile(a, slots, atom_slots)),
            Formula::And(a, b) => {
                let a = self.compile(a, slots, atom_slots);
                let b = self.compile(b, slots, atom_slots);
                Op::And(a, b)
            }
        };
        self.ops.push(op);
        slots.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn sat_sets(&self, s: &QuantumModalStructure) -> Vec<WorldSet> {
        let values: Vec<WorldSet> = self.atoms.iter().map(|a| s.value_of(a)).collect();
        let mut sat = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let set = match *op {
                Op::Atom(a) => values[a],
                Op::Not(a) => s.ortho_complement(sat[a]),
                Op::Box(a) => necessity(s, sat[a]),
                Op::And(a, b) => sat[a].intersection(sat[b]),
            };
            sat.push(set);
        }
        sat
    }

    /// Same as [`failing_worlds`].
    pub fn failing_worlds(&self, s: &QuantumModalStructure) -> WorldSet {
        let sat = self.sat_sets(s);
        let mut out = s.all_worlds();
        for &g in &self.antecedent {
            out = out.intersection(sat[g]);
        }
        for &d in &self.succedent {
            out = out.difference(sat[d]);
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod strategy {
    use crate::formula::{FormulaSet, Sequent};
    use crate::structure::{QuantumModalStructure, Relation};
    use proptest::prelude::*;

    /// Valid structures with up to `max_worlds` worlds over `atoms`.
    pub fn structure(
        max_worlds: usize,
        atoms: &'static [&'static str],
    ) -> BoxedStrategy<QuantumModalStructure> {
        (1..=max_worlds)
            .prop_flat_map(move |k| {
                (
                    proptest::collection::vec(any::<bool>(), k * (k - 1) / 2),
                    proptest::collection::vec(any::<u64>(), k),
                    proptest::collection::vec(any::<usize>(), atoms.len()),
                )
                    .prop_map(move |(edges, columns, picks)| {
                        let mut s = QuantumModalStructure::new(k);
                        let mut e = edges.iter();
                        for i in 0..k {
                            for j in i + 1..k {
                                if *e.next().unwrap() {
                                    s = s.with_rq_edges(&[(i, j)]);
                                }
                            }
                        }
                        let components = s.rq_components();
                        let mut rm = Relation::empty(k);
                        for (l, choice) in columns.iter().enumerate() {
                            for (c, comp) in components.iter().enumerate() {
                                if choice >> c & 1 == 1 {
                                    for i in comp.iter() {
                                        rm.insert(i, l);
                                    }
                                }
                            }
                        }
                        s.rm = rm;
                        let closed = s.closed_sets();
                        for (a, pick) in atoms.iter().zip(picks) {
                            s.valuation
                                .insert(a.to_string(), closed[pick % closed.len()]);
                        }
                        s
                    })
            })
            .boxed()
    }

    pub fn sequent(atoms: &'static [&'static str]) -> BoxedStrategy<Sequent> {
        let f = crate::formula::strategy::formula(atoms, 3);
        (
            proptest::collection::vec(f.clone(), 0..3),
            proptest::collection::vec(f, 0..3),
        )
            .prop_map(|(g, d)| {
                Sequent::new(
                    g.into_iter().collect::<FormulaSet>(),
                    d.into_iter().collect(),
                )
            })
            .boxed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_sequent, strategy::formula};
    use crate::structure::fixtures::{c4_pqr, p3};
    use proptest::prelude::*;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn ws(worlds: &[usize]) -> WorldSet {
        WorldSet::from_worlds(worlds.iter().copied())
    }

    #[test]
    fn eval_examples_on_p3() {
        let s = p3();
        assert!(!eval(&s, 1, &f("~p")).unwrap());
        assert!(eval(&s, 2, &f("~p")).unwrap());
        assert!(eval(&s, 0, &f("~~p")).unwrap());
        assert!(eval(&s, 1, &f("[]q")).unwrap());
        assert!(eval(&s, 3, &f("p")).is_err());
    }

    #[test]
    fn sat_examples_on_c4() {
        let s = c4_pqr();
        assert_eq!(sat_set(&s, &f("~q")), ws(&[3]));
        assert_eq!(sat_set(&s, &f("~r")), ws(&[0]));
        assert_eq!(sat_set(&s, &f("q | r")), s.all_worlds());
        assert_eq!(sat_set(&s, &f("p & (q | r)")), ws(&[0]));
        assert_eq!(sat_set(&s, &f("(p & q) | (p & r)")), WorldSet::EMPTY);
        assert_eq!(sat_set(&s, &f("p")), s.value_of("p"));
    }

    #[test]
    fn distributivity_fails_at_world_zero_of_c4() {
        let s = c4_pqr();
        let seq = parse_sequent("p & (q | r) |- (p & q) | (p & r)").unwrap();
        assert!(!holds_at(&s, 0, &seq).unwrap());
        assert!(!holds_in(&s, &seq));
        assert_eq!(find_failing_world(&s, &seq), Some(0));
        assert_eq!(CompiledSequent::new(&seq).failing_worlds(&s), ws(&[0]));
    }

    #[test]
    fn single_world_counterexample() {
        let s = QuantumModalStructure::new(1).with_valuation("p", &[0]);
        let seq = parse_sequent("p |- q").unwrap();
        assert!(!holds_at(&s, 0, &seq).unwrap());
        assert_eq!(find_failing_world(&s, &seq), Some(0));
    }

    #[test]
    fn empty_sequent_never_holds() {
        let seq = parse_sequent("|-").unwrap();
        for k in 1..=3 {
            assert_eq!(
                find_failing_world(&QuantumModalStructure::new(k), &seq),
                Some(0)
            );
        }
    }

    #[test]
    fn identity_sequent_holds() {
        let seq = parse_sequent("p |- p").unwrap();
        assert!(holds_in(&p3(), &seq));
    }

    #[test]
    fn literal_reading_differs_from_pointwise_on_mem() {
        // p true at 0 only; []q true at 0 (rm = {(2,2)} falsifies it at 2)
        let s = p3()
            .with_valuation("q", &[])
            .with_rm_edges(&[(0, 2), (1, 2), (2, 2)]);
        assert!(s.is_valid());
        let seq = parse_sequent("|- []q, ~[]q").unwrap();
        assert!(holds_in_mode(&s, &seq, EvalMode::Pointwise));
        let split = QuantumModalStructure::new(2)
            .with_rm_edges(&[(1, 1)])
            .with_valuation("q", &[]);
        assert!(split.is_valid());
        assert!(holds_in_mode(&split, &seq, EvalMode::Pointwise));
        assert!(!holds_in_mode(&split, &seq, EvalMode::Literal));
    }

    proptest! {
        #[test]
        fn pointwise_and_setwise_agree(
            s in strategy::structure(5, &["p", "q"]),
            a in formula(&["p", "q"], 4),
        ) {
            let sat = sat_set(&s, &a);
            for i in 0..s.worlds {
                prop_assert_eq!(sat.contains(i), eval(&s, i, &a).unwrap());
            }
        }

        #[test]
        fn sat_sets_are_closed(
            s in strategy::structure(5, &["p", "q"]),
            a in formula(&["p", "q"], 4),
        ) {
            let sat = sat_set(&s, &a);
            prop_assert_eq!(s.ortho_closure(sat), sat);
            prop_assert_eq!(sat_set(&s, &Formula::not(a.clone())), s.ortho_complement(sat));
            prop_assert_eq!(sat_set(&s, &Formula::not(Formula::not(a))), sat);
        }

        #[test]
        fn box_is_rq_invariant(
            s in strategy::structure(5, &["p"]),
            a in formula(&["p"], 3),
        ) {
            let boxed = Formula::boxed(a);
            for (i, j) in s.rq.pairs() {
                prop_assert_eq!(eval(&s, i, &boxed).unwrap(), eval(&s, j, &boxed).unwrap());
            }
        }

        #[test]
        fn weakening_preserves_truth(
            s in strategy::structure(4, &["p", "q"]),
            seq in strategy::sequent(&["p", "q"]),
            extra in formula(&["p", "q"], 3),
        ) {
            let mut left = seq.clone();
            left.antecedent.insert(extra.clone());
            let mut right = seq.clone();
            right.succedent.insert(extra);
            for i in 0..s.worlds {
                if holds_at(&s, i, &seq).unwrap() {
                    prop_assert!(holds_at(&s, i, &left).unwrap());
                    prop_assert!(holds_at(&s, i, &right).unwrap());
                }
            }
        }

        #[test]
        fn excluded_middle_for_boxes_holds_pointwise(
            s in strategy::structure(5, &["p", "q"]),
            seq in strategy::sequent(&["p", "q"]),
            a in formula(&["p", "q"], 3),
        ) {
            let mut mem = Sequent::new(seq.antecedent, Default::default());
            mem.succedent.insert(Formula::boxed(a.clone()));
            mem.succedent.insert(Formula::not(Formula::boxed(a)));
            for i in 0..s.worlds {
                prop_assert!(holds_at(&s, i, &mem).unwrap());
            }
        }

        #[test]
        fn compiled_matches_direct(
            s in strategy::structure(5, &["p", "q"]),
            seq in strategy::sequent(&["p", "q"]),
        ) {
            prop_assert_eq!(CompiledSequent::new(&seq).failing_worlds(&s), failing_worlds(&s, &seq));
            for i in 0..s.worlds {
                prop_assert_eq!(!holds_at(&s, i, &seq).unwrap(), failing_worlds(&s, &seq).contains(i));
            }
        }
    }
}
