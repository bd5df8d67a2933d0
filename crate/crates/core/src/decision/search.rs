//! The two searches as resumable state machines. Each `advance` call does a
//! bounded slice of work so that a scheduler can interleave them.

use crate::calculus::{check_derivation, extract_derivation, Derivation, Saturator, MAX_UNIVERSE};
use crate::formula::{admissible_closure, Formula, FormulaEnumerator, FormulaSet, Sequent};
use crate::semantics::{holds_at, CompiledSequent};
use crate::structure::{
    BoxMode, QuantumModalStructure, StructureEnumerator, MAX_ENUMERATED_WORLDS,
};

/// Formulas taken from the canonical numbering per universe stage.
pub const STAGE_WIDTH: u64 = 4;

#[derive(Debug)]
pub(crate) enum Progress<T> {
    Pending,
    Found(T),
    Exhausted,
}

/// The universe used at `stage` when proving `seq`.
///
/// Stage 0 is the admissible closure of the sequent's formulas. Stage `t`
/// adds the first `t * STAGE_WIDTH` formulas of the canonical numbering over
/// the sequent's atoms and `~[]a` for every `[]a` present, then closes again.
pub fn universe_stage(seq: &Sequent, stage: usize) -> FormulaSet {
    let mut u = admissible_closure(&seq.all_formulas());
    if stage == 0 {
        return u;
    }
    let atoms: Vec<String> = seq.atoms().into_iter().collect();
    if !atoms.is_empty() {
        let mut numbering = FormulaEnumerator::new(&atoms);
        for i in 0..stage as u64 * STAGE_WIDTH {
            u.insert(numbering.nth_formula(i));
        }
    }
    let mut u = admissible_closure(&u);
    let negated_boxes: Vec<Formula> = u
        .iter()
        .filter(|f| matches!(f, Formula::Box(_)))
        .map(|f| Formula::not(f.clone()))
        .collect();
    u.extend(negated_boxes);
    u
}

/// Saturation over successive universe stages until the goal is derivable.
pub(crate) struct ProveSearch {
    goal: Sequent,
    max_stage: usize,
    step_limit: usize,
    stage: usize,
    saturator: Option<Saturator>,
    done: bool,
}

impl ProveSearch {
    pub(crate) fn new(goal: &Sequent, max_stage: usize, step_limit: usize) -> Self {
        ProveSearch {
            goal: goal.clone(),
            max_stage,
            step_limit,
            stage: 0,
            saturator: None,
            done: false,
        }
    }

    /// The stage currently (or last) being saturated.
    pub(crate) fn stage(&self) -> usize {
        self.stage
    }

    fn next_stage(&mut self) {
        self.saturator = None;
        if self.stage >= self.max_stage {
            self.done = true;
        } else {
            self.stage += 1;
        }
    }

    /// Runs at most `slice` saturation steps.
    pub(crate) fn advance(&mut self, slice: usize) -> Progress<Derivation> {
        let mut budget = slice;
        while !self.done {
            let sat = match self.saturator.as_mut() {
                Some(sat) => sat,
                None => {
                    let u = universe_stage(&self.goal, self.stage);
                    if u.len() > MAX_UNIVERSE {
                        self.done = true;
                        break;
                    }
                    match Saturator::new(&u) {
                        Ok(sat) => self.saturator.insert(sat),
                        Err(_) => {
                            self.done = true;
                            break;
                        }
                    }
                }
            };
            if sat.contains(&self.goal).unwrap_or(false) {
                let ds = sat.derivable_set();
                self.done = true;
                return match extract_derivation(&ds, &self.goal) {
                    Ok(d) if check_derivation(&d) && d.conclusion() == &self.goal => {
                        Progress::Found(d)
                    }
                    _ => Progress::Exhausted,
                };
            }
            if sat.is_fixpoint() || sat.steps() >= self.step_limit {
                self.next_stage();
                continue;
            }
            if budget == 0 {
                return Progress::Pending;
            }
            budget -= 1;
            sat.step();
        }
        Progress::Exhausted
    }
}

/// Prove search run to completion.
pub fn prove(seq: &Sequent, max_stage: usize, step_limit: usize) -> Option<Derivation> {
    let mut search = ProveSearch::new(seq, max_stage, step_limit);
    loop {
        match search.advance(usize::MAX) {
            Progress::Pending => continue,
            Progress::Found(d) => return Some(d),
            Progress::Exhausted => return None,
        }
    }
}

/// A structure and a world at which a sequent fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub structure: QuantumModalStructure,
    pub world: usize,
}

impl Countermodel {
    /// Valid structure, and `seq` fails at `world`.
    pub fn refutes(&self, seq: &Sequent) -> bool {
        self.structure.is_valid() && holds_at(&self.structure, self.world, seq) == Ok(false)
    }
}

/// Structure enumeration for `k = 1, 2, ...` in enumeration order.
pub(crate) struct RefuteSearch {
    goal: Sequent,
    compiled: CompiledSequent,
    atoms: Vec<String>,
    mode: BoxMode,
    dedup: bool,
    max_worlds: usize,
    k: usize,
    enumerator: Option<StructureEnumerator>,
}

impl RefuteSearch {
    pub(crate) fn new(goal: &Sequent, max_worlds: usize, dedup: bool) -> Self {
        // rm is irrelevant to box-free formulas, so one rm per frame suffices
        let mode = if goal.contains_box() {
            BoxMode::Full
        } else {
            BoxMode::EmptyOnly
        };
        RefuteSearch {
            goal: goal.clone(),
            compiled: CompiledSequent::new(goal),
            atoms: goal.atoms().into_iter().collect(),
            mode,
            dedup,
            max_worlds: max_worlds.min(MAX_ENUMERATED_WORLDS),
            k: 0,
            enumerator: None,
        }
    }

    /// Largest world count searched so far.
    pub(crate) fn worlds_tried(&self) -> usize {
        self.k
    }

    /// Examines at most `slice` structures.
    pub(crate) fn advance(&mut self, slice: usize) -> Progress<Countermodel> {
        let mut budget = slice;
        loop {
            let en = match self.enumerator.as_mut() {
                Some(en) => en,
                None => {
                    if self.k >= self.max_worlds {
                        return Progress::Exhausted;
                    }
                    self.k += 1;
                    let en = StructureEnumerator::new(self.k, &self.atoms)
                        .dedup(self.dedup)
                        .box_mode(self.mode);
                    self.enumerator.insert(en)
                }
            };
            if budget == 0 {
                return Progress::Pending;
            }
            budget -= 1;
            match en.next() {
                None => self.enumerator = None,
                Some(structure) => {
                    if let Some(world) = self.compiled.failing_worlds(&structure).first() {
                        let cm = Countermodel { structure, world };
                        if cm.refutes(&self.goal) {
                            return Progress::Found(cm);
                        }
                    }
                }
            }
        }
    }
}

/// The first countermodel in enumeration order with at most `max_worlds`
/// worlds.
pub fn refute(seq: &Sequent, max_worlds: usize, dedup: bool) -> Option<Countermodel> {
    let mut search = RefuteSearch::new(seq, max_worlds, dedup);
    loop {
        match search.advance(usize::MAX) {
            Progress::Pending => continue,
            Progress::Found(cm) => return Some(cm),
            Progress::Exhausted => return None,
        }
    }
}
