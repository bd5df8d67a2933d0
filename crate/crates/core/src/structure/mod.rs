//! Finite quantum modal structures.
//!
//! A structure has a reflexive, symmetric non-orthogonality relation `rq`,
//! an accessibility relation `rm` that is forced by `rq`, and a valuation
//! sending each atom to an `rq`-closed set of worlds. A set `X` is closed
//! when `X = X^⊥⊥`, where `X^⊥` holds the worlds `rq`-unrelated to every
//! member of `X`.

mod enumerate;
mod model_file;
mod worldset;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use enumerate::{
    enumerate_structures, structure_count, BoxMode, StructureEnumerator, MAX_ENUMERATED_WORLDS,
};
pub use model_file::{ModelFile, ModelFileError};
pub use worldset::{WorldSet, MAX_WORLDS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed structure: {0}")]
    Malformed(String),
}

/// A binary relation over `0..n`, one successor set per world.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    rows: Vec<WorldSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![WorldSet::EMPTY; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Relation {
            rows: (0..n).map(WorldSet::singleton).collect(),
        }
    }

    pub fn from_rows(rows: Vec<WorldSet>) -> Self {
        Relation { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.get(i).is_some_and(|r| r.contains(j))
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.rows[i].remove(j);
    }

    /// Successors of `i`.
    pub fn row(&self, i: usize) -> WorldSet {
        self.rows[i]
    }

    pub fn rows(&self) -> &[WorldSet] {
        &self.rows
    }

    /// Predecessors of `j`.
    pub fn column(&self, j: usize) -> WorldSet {
        WorldSet::from_worlds((0..self.rows.len()).filter(|&i| self.rows[i].contains(j)))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |j| (i, j)))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// `⟨W, R_Q, R_M, ρ⟩` with `W = {0, ..., worlds - 1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuantumModalStructure {
    pub worlds: usize,
    pub rq: Relation,
    pub rm: Relation,
    pub valuation: BTreeMap<String, WorldSet>,
}

/// A failed side condition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Reflexivity {
        world: usize,
    },
    Symmetry {
        from: usize,
        to: usize,
    },
    Forcing {
        from: usize,
        to: usize,
        neighbor: usize,
    },
    ValuationNotClosed {
        atom: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Reflexivity { world } => write!(f, "reflexivity at {world}"),
            Violation::Symmetry { from, to } => {
                write!(f, "symmetry at ({from},{to}): ({to},{from}) missing")
            }
            Violation::Forcing { from, to, neighbor } => {
                write!(f, "forcing at ({from},{to}) via neighbor {neighbor}")
            }
            Violation::ValuationNotClosed { atom } => {
                write!(f, "valuation of {atom} not R_Q-closed")
            }
        }
    }
}

impl QuantumModalStructure {
    /// `worlds` worlds, `rq` the identity, `rm` empty, every atom false.
    pub fn new(worlds: usize) -> Self {
        QuantumModalStructure {
            worlds,
            rq: Relation::identity(worlds),
            rm: Relation::empty(worlds),
            valuation: BTreeMap::new(),
        }
    }

    /// Adds `rq(i,j)` and `rq(j,i)`.
    pub fn with_rq_edges(mut self, edges: &[(usize, usize)]) -> Self {
        for &(i, j) in edges {
            self.rq.insert(i, j);
            self.rq.insert(j, i);
        }
        self
    }

    pub fn with_rm_edges(mut self, edges: &[(usize, usize)]) -> Self {
        for &(i, l) in edges {
            self.rm.insert(i, l);
        }
        self
    }

    pub fn with_valuation(mut self, atom: &str, worlds: &[usize]) -> Self {
        self.valuation.insert(
            atom.to_string(),
            WorldSet::from_worlds(worlds.iter().copied()),
        );
        self
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::full(self.worlds)
    }

    /// Valuation of `atom`; absent atoms are false everywhere.
    pub fn value_of(&self, atom: &str) -> WorldSet {
        self.valuation.get(atom).copied().unwrap_or(WorldSet::EMPTY)
    }

    pub fn check_world(&self, world: usize) -> Result<(), StructureError> {
        if world < self.worlds {
            Ok(())
        } else {
            Err(StructureError::Malformed(format!(
                "world {world} out of range (structure has {} worlds)",
                self.worlds
            )))
        }
    }

    fn check_shape(&self) -> Result<(), StructureError> {
        if self.worlds == 0 || self.worlds > MAX_WORLDS {
            return Err(StructureError::Malformed(format!(
                "world count {} outside 1..={MAX_WORLDS}",
                self.worlds
            )));
        }
        let full = self.all_worlds();
        for (name, rel) in [("rq", &self.rq), ("rm", &self.rm)] {
            if rel.len() != self.worlds {
                return Err(StructureError::Malformed(format!(
                    "{name} has {} rows, expected {}",
                    rel.len(),
                    self.worlds
                )));
            }
            if let Some((i, j)) = rel.pairs().find(|&(_, j)| !full.contains(j)) {
                return Err(StructureError::Malformed(format!(
                    "{name} pair ({i},{j}) out of range"
                )));
            }
        }
        for (atom, set) in &self.valuation {
            if !set.is_subset(full) {
                return Err(StructureError::Malformed(format!(
                    "valuation of {atom} mentions a world out of range"
                )));
            }
        }
        Ok(())
    }

    /// One violation per failed side condition (per atom for the valuation),
    /// each with the first witness found. Out-of-range data is an error.
    pub fn validate(&self) -> Result<Vec<Violation>, StructureError> {
        self.check_shape()?;
        let mut violations = Vec::new();
        if let Some(world) = (0..self.worlds).find(|&i| !self.rq.contains(i, i)) {
            violations.push(Violation::Reflexivity { world });
        }
        if let Some((from, to)) = self.rq.pairs().find(|&(i, j)| !self.rq.contains(j, i)) {
            violations.push(Violation::Symmetry { from, to });
        }
        let forcing = self.rm.pairs().find_map(|(i, l)| {
            self.rq
                .row(i)
                .iter()
                .find(|&j| !self.rm.contains(j, l))
                .map(|neighbor| Violation::Forcing {
                    from: i,
                    to: l,
                    neighbor,
                })
        });
        violations.extend(forcing);
        for (atom, &set) in &self.valuation {
            if self.ortho_closure(set) != set {
                violations.push(Violation::ValuationNotClosed { atom: atom.clone() });
            }
        }
        Ok(violations)
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.validate(), Ok(v) if v.is_empty())
    }

    /// `X^⊥ = { j | no k in X with rq(j,k) }`.
    pub fn ortho_complement(&self, x: WorldSet) -> WorldSet {
        WorldSet::from_worlds((0..self.worlds).filter(|&j| self.rq.row(j).is_disjoint(x)))
    }

    /// `X^⊥⊥`; `X` is `rq`-closed iff it equals its closure.
    pub fn ortho_closure(&self, x: WorldSet) -> WorldSet {
        self.ortho_complement(self.ortho_complement(x))
    }

    pub fn is_closed(&self, x: WorldSet) -> bool {
        self.ortho_closure(x) == x
    }

    /// Every `rq`-closed set, ordered by bitmask value.
    ///
    /// Closed sets are exactly the intersections of the basic sets
    /// `{x}^⊥` (the empty intersection being `W`), so they are generated by
    /// closing the basic sets under pairwise intersection.
    pub fn closed_sets(&self) -> Vec<WorldSet> {
        let full = self.all_worlds();
        let mut found = std::collections::BTreeSet::from([full]);
        let basic: Vec<WorldSet> = (0..self.worlds)
            .map(|x| self.ortho_complement(WorldSet::singleton(x)))
            .collect();
        let mut frontier = vec![full];
        while let Some(set) = frontier.pop() {
            for &b in &basic {
                let meet = set.intersection(b);
                if found.insert(meet) {
                    frontier.push(meet);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Connected components of `rq` (its transitive closure), ordered by
    /// least member.
    pub fn rq_components(&self) -> Vec<WorldSet> {
        let mut seen = WorldSet::EMPTY;
        let mut components = Vec::new();
        for start in 0..self.worlds {
            if seen.contains(start) {
                continue;
            }
            let mut component = WorldSet::singleton(start);
            let mut frontier = component;
            while !frontier.is_empty() {
                let mut next = WorldSet::EMPTY;
                for w in frontier.iter() {
                    next = next.union(self.rq.row(w));
                }
                frontier = next.difference(component);
                component = component.union(next);
            }
            seen = seen.union(component);
            components.push(component);
        }
        components
    }

    /// Sets `rq` to its reflexive-symmetric closure.
    pub fn complete_rq(&mut self) {
        for i in 0..self.worlds {
            self.rq.insert(i, i);
        }
        let pairs: Vec<_> = self.rq.pairs().collect();
        for (i, j) in pairs {
            self.rq.insert(j, i);
        }
    }
}
