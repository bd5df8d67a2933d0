//! Deciding sequents by running proof search and countermodel search side
//! by side.
//!
//! The proof branch saturates growing formula universes
//! ([`universe_stage`]); the model branch enumerates structures with
//! `1, 2, ..., max_worlds` worlds. The first conclusive branch wins. Both
//! are bounded by [`Budgets`], and running out yields [`Verdict::Unknown`].

mod search;

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::calculus::{check_derivation, Derivation};
use crate::formula::{admissible_closure, Formula, Sequent};
use crate::semantics::EvalMode;
use crate::structure::MAX_ENUMERATED_WORLDS;

pub use search::{prove, refute, universe_stage, Countermodel, STAGE_WIDTH};
use search::{Progress, ProveSearch, RefuteSearch};

/// Saturation steps per scheduling slice.
const PROVE_SLICE: usize = 1;
/// Structures per scheduling slice.
const REFUTE_SLICE: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budgets {
    /// Last universe stage to saturate.
    pub max_stage: usize,
    /// Largest structure size to enumerate (capped at 11).
    pub max_worlds: usize,
    /// Saturation steps per stage.
    pub step_limit: usize,
    pub time_limit: Option<Duration>,
    /// Enumerate one structure per isomorphism class.
    pub dedup: bool,
    pub mode: EvalMode,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_stage: 2,
            max_worlds: 4,
            step_limit: 20_000,
            time_limit: None,
            dedup: false,
            mode: EvalMode::Pointwise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    /// One world falsifying the whole sequent.
    Pointwise(Countermodel),
    /// For each succedent member `d`, a countermodel to `Γ |- d`.
    Literal(Vec<(Formula, Countermodel)>),
}

/// What was searched before the budgets ran out.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BudgetReport {
    pub stages_tried: usize,
    pub worlds_tried: usize,
    pub prove_exhausted: bool,
    pub refute_exhausted: bool,
    pub timed_out: bool,
    /// Set for single-formula goals `|- a`.
    pub fmp_bound: Option<u128>,
    /// Model search covered every size up to the bound without a hit.
    pub valid_by_fmp_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Theorem(Derivation),
    NonTheorem(Refutation),
    Unknown(BudgetReport),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Theorem(_) => "theorem",
            Verdict::NonTheorem(_) => "non-theorem",
            Verdict::Unknown(_) => "unknown",
        }
    }

    /// CLI exit code: 0 theorem, 1 non-theorem, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Theorem(_) => 0,
            Verdict::NonTheorem(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }

    /// Re-checks the witness against `seq`.
    pub fn verify(&self, seq: &Sequent, mode: EvalMode) -> bool {
        match self {
            Verdict::Theorem(d) => {
                let c = d.conclusion();
                let shape = match mode {
                    EvalMode::Pointwise => c == seq,
                    EvalMode::Literal => {
                        c == seq
                            || (c.antecedent == seq.antecedent
                                && c.succedent.len() == 1
                                && c.succedent.is_subset(&seq.succedent))
                    }
                };
                shape && check_derivation(d)
            }
            Verdict::NonTheorem(Refutation::Pointwise(cm)) => cm.refutes(seq),
            Verdict::NonTheorem(Refutation::Literal(parts)) => {
                parts.len() == seq.succedent.len()
                    && parts.iter().all(|(d, cm)| {
                        seq.succedent.contains(d)
                            && cm.refutes(&Sequent::new(seq.antecedent.clone(), [d.clone()].into()))
                    })
            }
            Verdict::Unknown(_) => true,
        }
    }
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stages tried: 0..={}, worlds tried: 1..={}",
            self.stages_tried, self.worlds_tried
        )?;
        if self.timed_out {
            write!(f, ", time limit reached")?;
        }
        if self.valid_by_fmp_bound {
            write!(
                f,
                ", valid by FMP bound; derivation search continues for the proof object"
            )?;
        }
        Ok(())
    }
}

/// `2^n` for `n = |admissible_closure(Γ ∪ Δ)|`, saturating at `u128::MAX`.
pub fn fmp_bound(seq: &Sequent) -> u128 {
    let n = admissible_closure(&seq.all_formulas()).len() as u32;
    1u128.checked_shl(n).unwrap_or(u128::MAX)
}

fn single_formula(seq: &Sequent) -> bool {
    seq.antecedent.is_empty() && seq.succedent.len() == 1
}

fn out_of_time(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

enum Outcome<T> {
    Found(T),
    Exhausted,
    Stopped,
}

fn drive<T>(
    mut advance: impl FnMut() -> Progress<T>,
    cancel: &AtomicBool,
    deadline: Option<Instant>,
) -> Outcome<T> {
    loop {
        if cancel.load(Ordering::Relaxed) || out_of_time(deadline) {
            return Outcome::Stopped;
        }
        match advance() {
            Progress::Pending => {}
            Progress::Found(x) => return Outcome::Found(x),
            Progress::Exhausted => return Outcome::Exhausted,
        }
    }
}

struct Tally {
    report: BudgetReport,
    bound_applies: bool,
    verdict: Option<Verdict>,
}

impl Tally {
    fn new(seq: &Sequent, budgets: &Budgets) -> Self {
        let fmp = single_formula(seq).then(|| fmp_bound(seq));
        Tally {
            report: BudgetReport {
                fmp_bound: fmp,
                ..BudgetReport::default()
            },
            bound_applies: fmp
                .is_some_and(|b| b <= budgets.max_worlds.min(MAX_ENUMERATED_WORLDS) as u128),
            verdict: None,
        }
    }

    fn proved(&mut self, out: Outcome<Derivation>, stage: usize) {
        self.report.stages_tried = stage;
        match out {
            Outcome::Found(d) => self.verdict = self.verdict.take().or(Some(Verdict::Theorem(d))),
            Outcome::Exhausted => self.report.prove_exhausted = true,
            Outcome::Stopped => {}
        }
    }

    fn refuted(&mut self, out: Outcome<Countermodel>, worlds: usize) {
        self.report.worlds_tried = worlds;
        match out {
            Outcome::Found(cm) => {
                self.verdict = self
                    .verdict
                    .take()
                    .or(Some(Verdict::NonTheorem(Refutation::Pointwise(cm))))
            }
            Outcome::Exhausted => {
                self.report.refute_exhausted = true;
                self.report.valid_by_fmp_bound = self.bound_applies;
            }
            Outcome::Stopped => {}
        }
    }

    fn finish(mut self, seq: &Sequent, mode: EvalMode, deadline: Option<Instant>) -> Verdict {
        match self.verdict.take() {
            Some(v) if v.verify(seq, mode) => v,
            _ => {
                self.report.timed_out = out_of_time(deadline);
                Verdict::Unknown(self.report)
            }
        }
    }
}

enum Message {
    Prove(Outcome<Derivation>, usize),
    Refute(Outcome<Countermodel>, usize),
}

impl Message {
    fn conclusive(&self) -> bool {
        matches!(
            self,
            Message::Prove(Outcome::Found(_), _) | Message::Refute(Outcome::Found(_), _)
        )
    }
}

/// Decides `seq` with the two branches on separate threads; the first
/// conclusive result cancels the other.
pub fn decide(seq: &Sequent, budgets: &Budgets) -> Verdict {
    if budgets.mode == EvalMode::Literal {
        return decide_literal(seq, budgets);
    }
    let deadline = budgets.time_limit.map(|t| Instant::now() + t);
    let cancel = AtomicBool::new(false);
    let mut tally = Tally::new(seq, budgets);
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        let tx_prove = tx.clone();
        let cancel = &cancel;
        scope.spawn(move || {
            let mut search = ProveSearch::new(seq, budgets.max_stage, budgets.step_limit);
            let out = drive(|| search.advance(PROVE_SLICE), cancel, deadline);
            let _ = tx_prove.send(Message::Prove(out, search.stage()));
        });
        scope.spawn(move || {
            let mut search = RefuteSearch::new(seq, budgets.max_worlds, budgets.dedup);
            let out = drive(|| search.advance(REFUTE_SLICE), cancel, deadline);
            let _ = tx.send(Message::Refute(out, search.worlds_tried()));
        });
        for msg in rx.iter() {
            let stop = msg.conclusive();
            match msg {
                Message::Prove(out, stage) => tally.proved(out, stage),
                Message::Refute(out, worlds) => tally.refuted(out, worlds),
            }
            if stop {
                cancel.store(true, Ordering::Relaxed);
                break;
            }
        }
    });
    tally.finish(seq, budgets.mode, deadline)
}

/// [`decide`] on one thread, alternating fixed slices of each branch.
pub fn decide_round_robin(seq: &Sequent, budgets: &Budgets) -> Verdict {
    if budgets.mode == EvalMode::Literal {
        return decide_literal(seq, budgets);
    }
    let deadline = budgets.time_limit.map(|t| Instant::now() + t);
    let mut tally = Tally::new(seq, budgets);
    let mut prover = Some(ProveSearch::new(seq, budgets.max_stage, budgets.step_limit));
    let mut refuter = Some(RefuteSearch::new(seq, budgets.max_worlds, budgets.dedup));
    while tally.verdict.is_none() && (prover.is_some() || refuter.is_some()) {
        if out_of_time(deadline) {
            if let Some(p) = prover.take() {
                tally.proved(Outcome::Stopped, p.stage());
            }
            if let Some(r) = refuter.take() {
                tally.refuted(Outcome::Stopped, r.worlds_tried());
            }
            break;
        }
        if let Some(p) = prover.as_mut() {
            match p.advance(PROVE_SLICE) {
                Progress::Pending => {}
                Progress::Found(d) => tally.proved(Outcome::Found(d), p.stage()),
                Progress::Exhausted => {
                    tally.proved(Outcome::Exhausted, p.stage());
                    prover = None;
                }
            }
        }
        if tally.verdict.is_some() {
            break;
        }
        if let Some(r) = refuter.as_mut() {
            match r.advance(REFUTE_SLICE) {
                Progress::Pending => {}
                Progress::Found(cm) => tally.refuted(Outcome::Found(cm), r.worlds_tried()),
                Progress::Exhausted => {
                    tally.refuted(Outcome::Exhausted, r.worlds_tried());
                    refuter = None;
                }
            }
        }
    }
    if let Some(p) = &prover {
        tally.report.stages_tried = p.stage();
    }
    if let Some(r) = &refuter {
        tally.report.worlds_tried = r.worlds_tried();
    }
    tally.finish(seq, budgets.mode, deadline)
}

/// One countermodel per succedent member, or `None` if some member has none
/// within `max_worlds`. Sequents with at most one succedent member read the
/// same either way and get a single pointwise countermodel.
pub fn refute_literal(seq: &Sequent, max_worlds: usize, dedup: bool) -> Option<Refutation> {
    if seq.succedent.len() <= 1 {
        return refute(seq, max_worlds, dedup).map(Refutation::Pointwise);
    }
    seq.succedent
        .iter()
        .map(|d| {
            let single = Sequent::new(seq.antecedent.clone(), [d.clone()].into());
            refute(&single, max_worlds, dedup).map(|cm| (d.clone(), cm))
        })
        .collect::<Option<Vec<_>>>()
        .map(Refutation::Literal)
}

/// Literal reading: refute first, then look for a derivation of `Γ |- d`
/// for a single member `d`.
fn decide_literal(seq: &Sequent, budgets: &Budgets) -> Verdict {
    if seq.succedent.len() <= 1 {
        let pointwise = Budgets {
            mode: EvalMode::Pointwise,
            ..budgets.clone()
        };
        return decide(seq, &pointwise);
    }
    let deadline = budgets.time_limit.map(|t| Instant::now() + t);
    let never = AtomicBool::new(false);
    let mut tally = Tally::new(seq, budgets);

    let mut parts = Vec::new();
    for d in &seq.succedent {
        let single = Sequent::new(seq.antecedent.clone(), [d.clone()].into());
        let mut search = RefuteSearch::new(&single, budgets.max_worlds, budgets.dedup);
        let out = drive(|| search.advance(REFUTE_SLICE), &never, deadline);
        tally.report.worlds_tried = tally.report.worlds_tried.max(search.worlds_tried());
        match out {
            Outcome::Found(cm) => parts.push((d.clone(), cm)),
            Outcome::Exhausted => {
                tally.report.refute_exhausted = true;
                break;
            }
            Outcome::Stopped => break,
        }
    }
    if parts.len() == seq.succedent.len() {
        tally.verdict = Some(Verdict::NonTheorem(Refutation::Literal(parts)));
        return tally.finish(seq, budgets.mode, deadline);
    }

    let mut all_exhausted = true;
    for d in &seq.succedent {
        let single = Sequent::new(seq.antecedent.clone(), [d.clone()].into());
        let mut search = ProveSearch::new(&single, budgets.max_stage, budgets.step_limit);
        let out = drive(|| search.advance(PROVE_SLICE), &never, deadline);
        tally.report.stages_tried = tally.report.stages_tried.max(search.stage());
        match out {
            Outcome::Found(d) => {
                tally.verdict = Some(Verdict::Theorem(d));
                break;
            }
            Outcome::Exhausted => {}
            Outcome::Stopped => {
                all_exhausted = false;
                break;
            }
        }
    }
    tally.report.prove_exhausted = tally.verdict.is_none() && all_exhausted;
    tally.finish(seq, budgets.mode, deadline)
}
