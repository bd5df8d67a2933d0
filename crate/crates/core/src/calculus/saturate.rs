//! Forward saturation over a finite formula universe.
//!
//! Sequents are pairs of 128-bit masks over the universe. Only the
//! componentwise-minimal derivable sequents are kept; a sequent is derivable
//! iff some kept member is contained in it, which accounts for WKN. Rules are
//! applied "up to weakening": a premise that must have a particular shape
//! (for instance a singleton antecedent for NEG_R) is obtained by weakening
//! a kept member where needed, and the weakening step is recorded so that
//! derivations can be rebuilt.
//!
//! The main loop is a given-clause loop: sequents wait in a FIFO queue, and
//! when one is selected every rule is applied to it alone and together with
//! every previously selected sequent.

use std::collections::{HashMap, VecDeque};

use super::{CalculusError, Derivation, Rule, RuleInstance};
use crate::formula::{is_subformula_closed, subformula_closure, Formula, FormulaSet, Sequent};

pub const MAX_UNIVERSE: usize = 128;

type Bits = u128;

fn bit(i: usize) -> Bits {
    1 << i
}

fn members(mut bits: Bits) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BitSequent {
    left: Bits,
    right: Bits,
}

impl BitSequent {
    fn new(left: Bits, right: Bits) -> Self {
        BitSequent { left, right }
    }

    fn subsumes(self, other: BitSequent) -> bool {
        self.left & !other.left == 0 && self.right & !other.right == 0
    }
}

/// A subformula-closed formula set with each member numbered and its
/// immediate structure tabulated.
#[derive(Debug, Clone)]
pub struct Universe {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    neg: Vec<Option<usize>>,
    boxed: Vec<Option<usize>>,
    /// `and_left[a]` lists `(b, a&b)`; `and_right[b]` lists `(a, a&b)`.
    and_left: Vec<Vec<(usize, usize)>>,
    and_right: Vec<Vec<(usize, usize)>>,
}

impl Universe {
    pub fn new(formulas: &FormulaSet) -> Result<Self, CalculusError> {
        if formulas.len() > MAX_UNIVERSE {
            return Err(CalculusError::UniverseTooLarge(formulas.len()));
        }
        if !is_subformula_closed(formulas) {
            let missing = subformula_closure(formulas)
                .into_iter()
                .find(|f| !formulas.contains(f))
                .expect("closure adds something");
            return Err(CalculusError::NotSubformulaClosed(missing));
        }
        let list: Vec<Formula> = formulas.iter().cloned().collect();
        let index: HashMap<Formula, usize> = list
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        let n = list.len();
        let mut u = Universe {
            formulas: list,
            index,
            neg: vec![None; n],
            boxed: vec![None; n],
            and_left: vec![Vec::new(); n],
            and_right: vec![Vec::new(); n],
        };
        for (i, f) in u.formulas.iter().enumerate() {
            match f {
                Formula::Atom(_) => {}
                Formula::Not(a) => u.neg[u.index[&**a]] = Some(i),
                Formula::Box(a) => u.boxed[u.index[&**a]] = Some(i),
                Formula::And(a, b) => {
                    let (a, b) = (u.index[&**a], u.index[&**b]);
                    u.and_left[a].push((b, i));
                    u.and_right[b].push((a, i));
                }
            }
        }
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn formulas(&self) -> FormulaSet {
        self.formulas.iter().cloned().collect()
    }

    fn side_bits(&self, side: &FormulaSet) -> Result<Bits, CalculusError> {
        side.iter().try_fold(0, |acc, f| {
            self.index
                .get(f)
                .map(|&i| acc | bit(i))
                .ok_or_else(|| CalculusError::OutsideUniverse(f.clone()))
        })
    }

    fn encode(&self, seq: &Sequent) -> Result<BitSequent, CalculusError> {
        Ok(BitSequent::new(
            self.side_bits(&seq.antecedent)?,
            self.side_bits(&seq.succedent)?,
        ))
    }

    fn side(&self, bits: Bits) -> FormulaSet {
        members(bits).map(|i| self.formulas[i].clone()).collect()
    }

    fn decode(&self, seq: BitSequent) -> Sequent {
        Sequent::new(self.side(seq.left), self.side(seq.right))
    }

    /// `{ ~x | x ∈ bits }`, if every negation is present.
    fn negate_all(&self, bits: Bits) -> Option<Bits> {
        members(bits).try_fold(0, |acc, i| self.neg[i].map(|n| acc | bit(n)))
    }

    fn box_all(&self, bits: Bits) -> Option<Bits> {
        members(bits).try_fold(0, |acc, i| self.boxed[i].map(|b| acc | bit(b)))
    }
}

#[derive(Debug, Clone)]
enum Origin {
    Axiom {
        rule: Rule,
        principal: usize,
    },
    Inference {
        rule: Rule,
        /// Each premise is a recorded entry and the (possibly weakened)
        /// shape in which the rule used it.
        premises: Vec<(usize, BitSequent)>,
        principal: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
struct Entry {
    seq: BitSequent,
    origin: Origin,
}

struct Candidate {
    seq: BitSequent,
    origin: Origin,
}

/// Resumable saturation state.
#[derive(Debug, Clone)]
pub struct Saturator {
    universe: Universe,
    entries: Vec<Entry>,
    alive: Vec<bool>,
    /// Alive entries in insertion order (selected or waiting).
    kept: Vec<usize>,
    /// Selected entries, in selection order.
    active: Vec<usize>,
    queue: VecDeque<usize>,
    steps: usize,
}

impl Saturator {
    /// Seeds every `a |- a` and every `|- []a, ~[]a` in the universe.
    pub fn new(universe: &FormulaSet) -> Result<Self, CalculusError> {
        let universe = Universe::new(universe)?;
        let mut sat = Saturator {
            universe,
            entries: Vec::new(),
            alive: Vec::new(),
            kept: Vec::new(),
            active: Vec::new(),
            queue: VecDeque::new(),
            steps: 0,
        };
        for a in 0..sat.universe.len() {
            sat.insert(Candidate {
                seq: BitSequent::new(bit(a), bit(a)),
                origin: Origin::Axiom {
                    rule: Rule::Ax,
                    principal: a,
                },
            });
        }
        for a in 0..sat.universe.len() {
            if let Some(b) = sat.universe.boxed[a] {
                if let Some(nb) = sat.universe.neg[b] {
                    sat.insert(Candidate {
                        seq: BitSequent::new(0, bit(b) | bit(nb)),
                        origin: Origin::Axiom {
                            rule: Rule::Mem,
                            principal: a,
                        },
                    });
                }
            }
        }
        Ok(sat)
    }

    pub fn is_fixpoint(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Processes up to `max_steps` queued sequents; returns true at fixpoint.
    pub fn run(&mut self, max_steps: usize) -> bool {
        for _ in 0..max_steps {
            if !self.step() {
                return true;
            }
        }
        self.is_fixpoint()
    }

    /// Selects the next queued sequent and applies every rule to it.
    /// Returns false if the queue was empty.
    pub fn step(&mut self) -> bool {
        let Some(given) = self.next_given() else {
            return false;
        };
        self.steps += 1;
        self.active.push(given);
        let mut out = Vec::new();
        self.unary(given, &mut out);
        for &other in &self.active {
            if !self.alive[other] && other != given {
                continue;
            }
            self.binary(given, other, &mut out);
            if other != given {
                self.binary(other, given, &mut out);
            }
        }
        for c in out {
            self.insert(c);
        }
        self.active.retain(|&id| self.alive[id]);
        true
    }

    fn next_given(&mut self) -> Option<usize> {
        while let Some(id) = self.queue.pop_front() {
            if self.alive[id] {
                return Some(id);
            }
        }
        None
    }

    fn insert(&mut self, c: Candidate) {
        if self
            .kept
            .iter()
            .any(|&id| self.entries[id].seq.subsumes(c.seq))
        {
            return;
        }
        let id = self.entries.len();
        let entries = &self.entries;
        let alive = &mut self.alive;
        self.kept.retain(|&k| {
            if c.seq.subsumes(entries[k].seq) {
                alive[k] = false;
                false
            } else {
                true
            }
        });
        self.entries.push(Entry {
            seq: c.seq,
            origin: c.origin,
        });
        self.alive.push(true);
        self.kept.push(id);
        self.queue.push_back(id);
    }

    fn unary(&self, id: usize, out: &mut Vec<Candidate>) {
        let u = &self.universe;
        let s = self.entries[id].seq;
        let from = |rule: Rule,
                    conclusion: BitSequent,
                    shape: BitSequent,
                    principal: Vec<usize>| Candidate {
            seq: conclusion,
            origin: Origin::Inference {
                rule,
                premises: vec![(id, shape)],
                principal,
            },
        };

        for a in members(s.left) {
            for &(b, ab) in &u.and_left[a] {
                let c = BitSequent::new(s.left & !bit(a) | bit(ab), s.right);
                out.push(from(Rule::AndL1, c, s, vec![a, b]));
            }
            for &(other, ab) in &u.and_right[a] {
                let c = BitSequent::new(s.left & !bit(a) | bit(ab), s.right);
                out.push(from(Rule::AndL2, c, s, vec![other, a]));
            }
            if let Some(nna) = u.neg[a].and_then(|na| u.neg[na]) {
                let c = BitSequent::new(s.left & !bit(a) | bit(nna), s.right);
                out.push(from(Rule::NegNegL, c, s, vec![a]));
            }
        }
        for a in members(s.right) {
            if let Some(na) = u.neg[a] {
                let c = BitSequent::new(s.left | bit(na), s.right & !bit(a));
                out.push(from(Rule::NegL, c, s, vec![a]));
                if let Some(nna) = u.neg[na] {
                    let c = BitSequent::new(s.left, s.right & !bit(a) | bit(nna));
                    out.push(from(Rule::NegNegR, c, s, vec![a]));
                }
            }
        }

        // NEG_R needs `a |- D`: use the member itself, or weaken an empty
        // antecedent by each `a`.
        if let Some(negated) = u.negate_all(s.right) {
            let single = s.left.count_ones() == 1;
            if single || s.left == 0 {
                for a in 0..u.len() {
                    if (single && s.left != bit(a)) || u.neg[a].is_none() {
                        continue;
                    }
                    let shape = BitSequent::new(bit(a), s.right);
                    let c = BitSequent::new(negated, bit(u.neg[a].unwrap()));
                    out.push(from(Rule::NegR, c, shape, vec![a]));
                }
            }
        }

        // K needs `G |- a`: likewise for the succedent.
        if let Some(boxed) = u.box_all(s.left) {
            let single = s.right.count_ones() == 1;
            if single || s.right == 0 {
                for a in 0..u.len() {
                    if (single && s.right != bit(a)) || u.boxed[a].is_none() {
                        continue;
                    }
                    let shape = BitSequent::new(s.left, bit(a));
                    let c = BitSequent::new(boxed, bit(u.boxed[a].unwrap()));
                    out.push(from(Rule::K, c, shape, vec![a]));
                }
            }
        }
    }

    /// CUT and AND_R with `first` as the left premise.
    fn binary(&self, first: usize, second: usize, out: &mut Vec<Candidate>) {
        let u = &self.universe;
        let s = self.entries[first].seq;
        let t = self.entries[second].seq;

        for a in members(s.right & t.left) {
            let c = BitSequent::new(s.left | t.left & !bit(a), s.right & !bit(a) | t.right);
            out.push(Candidate {
                seq: c,
                origin: Origin::Inference {
                    rule: Rule::Cut,
                    premises: vec![(first, s), (second, t)],
                    principal: vec![a],
                },
            });
        }

        for a in members(s.right) {
            for &(b, ab) in &u.and_left[a] {
                if t.right & bit(b) == 0 {
                    continue;
                }
                let gamma = s.left | t.left;
                let delta = s.right & !bit(a) | t.right & !bit(b);
                out.push(Candidate {
                    seq: BitSequent::new(gamma, delta | bit(ab)),
                    origin: Origin::Inference {
                        rule: Rule::AndR,
                        premises: vec![
                            (first, BitSequent::new(gamma, delta | bit(a))),
                            (second, BitSequent::new(gamma, delta | bit(b))),
                        ],
                        principal: vec![a, b],
                    },
                });
            }
        }
    }

    /// Snapshot of the current state.
    pub fn derivable_set(&self) -> DerivableSet {
        DerivableSet {
            universe: self.universe.clone(),
            entries: self.entries.clone(),
            minimal: self.kept.clone(),
            fixpoint: self.is_fixpoint(),
            steps: self.steps,
        }
    }

    pub fn into_derivable_set(self) -> DerivableSet {
        let fixpoint = self.is_fixpoint();
        DerivableSet {
            universe: self.universe,
            entries: self.entries,
            minimal: self.kept,
            fixpoint,
            steps: self.steps,
        }
    }

    /// Whether a kept member is contained in `seq`.
    pub fn contains(&self, seq: &Sequent) -> Result<bool, CalculusError> {
        let target = self.universe.encode(seq)?;
        Ok(self
            .kept
            .iter()
            .any(|&id| self.entries[id].seq.subsumes(target)))
    }
}

/// The outcome of a saturation: the minimal derivable sequents over a
/// universe, with the provenance of everything ever recorded.
#[derive(Debug, Clone)]
pub struct DerivableSet {
    universe: Universe,
    entries: Vec<Entry>,
    minimal: Vec<usize>,
    fixpoint: bool,
    steps: usize,
}

impl DerivableSet {
    pub fn universe(&self) -> FormulaSet {
        self.universe.formulas()
    }

    /// True when saturation finished; false when the step budget ran out.
    pub fn is_fixpoint(&self) -> bool {
        self.fixpoint
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// The minimal antichain, in insertion order.
    pub fn minimal(&self) -> Vec<Sequent> {
        self.minimal
            .iter()
            .map(|&id| self.universe.decode(self.entries[id].seq))
            .collect()
    }

    fn subsumer(&self, seq: &Sequent) -> Result<Option<usize>, CalculusError> {
        let target = self.universe.encode(seq)?;
        Ok(self
            .minimal
            .iter()
            .copied()
            .find(|&id| self.entries[id].seq.subsumes(target)))
    }

    fn build(&self, id: usize, memo: &mut HashMap<usize, Derivation>) -> Derivation {
        if let Some(d) = memo.get(&id) {
            return d.clone();
        }
        let entry = &self.entries[id];
        let conclusion = self.universe.decode(entry.seq);
        let d = match &entry.origin {
            Origin::Axiom { rule, principal } => Derivation {
                instance: RuleInstance {
                    rule: *rule,
                    premises: Vec::new(),
                    conclusion,
                    principal: vec![self.universe.formulas[*principal].clone()],
                },
                children: Vec::new(),
            },
            Origin::Inference {
                rule,
                premises,
                principal,
            } => {
                let children: Vec<Derivation> = premises
                    .iter()
                    .map(|&(pid, shape)| {
                        let sub = self.build(pid, memo);
                        if self.entries[pid].seq == shape {
                            sub
                        } else {
                            Derivation::node(Rule::Wkn, self.universe.decode(shape), vec![sub])
                        }
                    })
                    .collect();
                Derivation {
                    instance: RuleInstance {
                        rule: *rule,
                        premises: children.iter().map(|c| c.conclusion().clone()).collect(),
                        conclusion,
                        principal: principal
                            .iter()
                            .map(|&i| self.universe.formulas[i].clone())
                            .collect(),
                    },
                    children,
                }
            }
        };
        memo.insert(id, d.clone());
        d
    }
}

/// Saturates `universe` for at most `budget` selection steps.
pub fn saturate(universe: &FormulaSet, budget: usize) -> Result<DerivableSet, CalculusError> {
    let mut sat = Saturator::new(universe)?;
    sat.run(budget);
    Ok(sat.into_derivable_set())
}

/// Derivability up to weakening. Errors if `seq` leaves the universe.
pub fn contains(ds: &DerivableSet, seq: &Sequent) -> Result<bool, CalculusError> {
    Ok(ds.subsumer(seq)?.is_some())
}

/// Rebuilds a derivation of `seq` from provenance, ending in a WKN step
/// when `seq` properly weakens the minimal member that derives it.
pub fn extract_derivation(ds: &DerivableSet, seq: &Sequent) -> Result<Derivation, CalculusError> {
    let id = ds
        .subsumer(seq)?
        .ok_or_else(|| CalculusError::NotDerivable(seq.clone()))?;
    let d = ds.build(id, &mut HashMap::new());
    if d.conclusion() == seq {
        Ok(d)
    } else {
        Ok(Derivation::node(Rule::Wkn, seq.clone(), vec![d]))
    }
}
