//! Collapse of a structure by agreement on an admissible formula set.
//!
//! Worlds are identified when they agree on every formula of `Σ`. On the
//! classes:
//!
//! * `rq*([i],[j])` iff some members of the two classes are `rq`-related;
//! * `rm*([i],[l])` iff for every `[]a ∈ Σ`, `i ⊨ []a` implies `l ⊨ a`;
//! * `ρ*(p)` is the set of classes whose members satisfy `p` when `p ∈ Σ`,
//!   and empty otherwise.

use thiserror::Error;

use crate::formula::{admissible_closure, is_admissible, Formula, FormulaSet};
use crate::semantics::sat_set;
use crate::structure::{QuantumModalStructure, Relation, WorldSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("formula set is not admissible: missing {missing}")]
    NotAdmissible { missing: Formula },
    #[error("box profile differs inside class {class} (worlds {first} and {second})")]
    IllDefined {
        class: usize,
        first: usize,
        second: usize,
    },
}

/// Truth values of the members of `Σ` (in set order) at one world.
pub type Profile = Vec<bool>;

/// `profile(i)[n]` is the truth of the n-th member of `sigma` at world `i`.
pub fn truth_profiles(s: &QuantumModalStructure, sigma: &FormulaSet) -> Vec<Profile> {
    let sats: Vec<WorldSet> = sigma.iter().map(|a| sat_set(s, a)).collect();
    (0..s.worlds)
        .map(|i| sats.iter().map(|set| set.contains(i)).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct Collapse {
    pub source: QuantumModalStructure,
    pub sigma: FormulaSet,
    /// Class of each source world; classes are numbered by least member.
    pub class_of: Vec<usize>,
    pub result: QuantumModalStructure,
}

/// Builds the collapse of `s` by the admissible set `sigma`.
pub fn collapse(
    s: &QuantumModalStructure,
    sigma: &FormulaSet,
) -> Result<Collapse, FiltrationError> {
    if !is_admissible(sigma) {
        let missing = admissible_closure(sigma)
            .into_iter()
            .find(|f| !sigma.contains(f))
            .expect("a non-admissible set misses some formula");
        return Err(FiltrationError::NotAdmissible { missing });
    }
    let profiles = truth_profiles(s, sigma);
    let mut class_of = Vec::with_capacity(s.worlds);
    let mut representatives: Vec<usize> = Vec::new();
    for i in 0..s.worlds {
        match representatives
            .iter()
            .position(|&r| profiles[r] == profiles[i])
        {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(representatives.len());
                representatives.push(i);
            }
        }
    }
    let classes = representatives.len();

    let mut rq = Relation::empty(classes);
    for (i, j) in s.rq.pairs() {
        rq.insert(class_of[i], class_of[j]);
    }

    // Box members of Σ with the satisfaction set of their body.
    let boxes: Vec<(WorldSet, WorldSet)> = sigma
        .iter()
        .filter_map(|f| match f {
            Formula::Box(body) => Some((sat_set(s, f), sat_set(s, body))),
            _ => None,
        })
        .collect();
    for (i, &c) in class_of.iter().enumerate() {
        let rep = representatives[c];
        if boxes
            .iter()
            .any(|(boxed, _)| boxed.contains(i) != boxed.contains(rep))
        {
            return Err(FiltrationError::IllDefined {
                class: c,
                first: rep,
                second: i,
            });
        }
    }
    let mut rm = Relation::empty(classes);
    for (ci, &i) in representatives.iter().enumerate() {
        for (cl, &l) in representatives.iter().enumerate() {
            if boxes
                .iter()
                .all(|(boxed, body)| !boxed.contains(i) || body.contains(l))
            {
                rm.insert(ci, cl);
            }
        }
    }

    let mut result = QuantumModalStructure::new(classes);
    result.rq = rq;
    result.rm = rm;
    for atom in s.valuation.keys().cloned().chain(
        sigma
            .iter()
            .filter_map(|f| f.atom_name().map(str::to_owned)),
    ) {
        let in_sigma = sigma.contains(&Formula::atom(&atom));
        let value = if in_sigma {
            let source = s.value_of(&atom);
            WorldSet::from_worlds(
                representatives
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| source.contains(r))
                    .map(|(c, _)| c),
            )
        } else {
            WorldSet::EMPTY
        };
        result.valuation.insert(atom, value);
    }

    Ok(Collapse {
        source: s.clone(),
        sigma: sigma.clone(),
        class_of,
        result,
    })
}

/// Outcome of checking the three collapse lemmas on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapseReport {
    /// The result satisfies every structure condition.
    pub valid: bool,
    /// `|W*| ≤ 2^|Σ|`.
    pub size_bound: bool,
    /// Every member of `Σ` has the same truth at `i` and at `[i]`.
    pub truth_preserved: bool,
}

impl CollapseReport {
    pub fn all_hold(&self) -> bool {
        self.valid && self.size_bound && self.truth_preserved
    }
}

pub fn verify_collapse(c: &Collapse) -> CollapseReport {
    let valid = c.result.is_valid();
    let n = c.sigma.len();
    let size_bound = n >= 64 || (c.result.worlds as u128) <= 1u128 << n;
    let truth_preserved = c.class_of.len() == c.source.worlds
        && c.class_of.iter().all(|&k| k < c.result.worlds)
        && c.sigma.iter().all(|a| {
            let before = sat_set(&c.source, a);
            let after = sat_set(&c.result, a);
            (0..c.source.worlds).all(|i| before.contains(i) == after.contains(c.class_of[i]))
        });
    CollapseReport {
        valid,
        size_bound,
        truth_preserved,
    }
}
