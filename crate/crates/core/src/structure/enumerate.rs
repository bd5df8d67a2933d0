//! Exhaustive enumeration of the valid structures with a fixed number of
//! worlds.
//!
//! The stream is ordered with `rq` outermost (a counter over the
//! upper-triangle bits, pair `(0,1)` least significant), then `rm`, then the
//! valuation. Because `rq` is symmetric, the forcing condition says exactly
//! that each column `{ i | rm(i,l) }` is a union of `rq`-connected
//! components, so `rm` is enumerated as one component subset per target
//! world. Each atom ranges over the closed sets of the frame.

use itertools::Itertools;

use super::{QuantumModalStructure, Relation, WorldSet};

/// Largest world count the enumerator accepts (the `rq` counter is 64-bit).
pub const MAX_ENUMERATED_WORLDS: usize = 11;

/// How `rm` is enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxMode {
    /// Every relation forced by `rq`.
    Full,
    /// Only the empty relation. Sound for searches whose formulas contain no
    /// `[]`, where truth does not depend on `rm`.
    EmptyOnly,
}

struct Frame {
    base: QuantumModalStructure,
    components: Vec<WorldSet>,
    closed: Vec<WorldSet>,
    rm_choice: Vec<u64>,
    val_choice: Vec<usize>,
}

impl Frame {
    fn new(k: usize, rq_mask: u64, atoms: usize) -> Self {
        let mut base = QuantumModalStructure::new(k);
        for (bit, (i, j)) in upper_pairs(k).enumerate() {
            if rq_mask >> bit & 1 == 1 {
                base.rq.insert(i, j);
                base.rq.insert(j, i);
            }
        }
        let components = base.rq_components();
        let closed = base.closed_sets();
        Frame {
            base,
            components,
            closed,
            rm_choice: vec![0; k],
            val_choice: vec![0; atoms],
        }
    }

    fn build(&self, atoms: &[String]) -> QuantumModalStructure {
        let k = self.base.worlds;
        let mut s = self.base.clone();
        let mut rm = Relation::empty(k);
        for (l, &choice) in self.rm_choice.iter().enumerate() {
            for (c, component) in self.components.iter().enumerate() {
                if choice >> c & 1 == 1 {
                    for i in component.iter() {
                        rm.insert(i, l);
                    }
                }
            }
        }
        s.rm = rm;
        for (atom, &v) in atoms.iter().zip(&self.val_choice) {
            s.valuation.insert(atom.clone(), self.closed[v]);
        }
        s
    }

    /// Advances the mixed-radix counter; false once every choice was visited.
    fn advance(&mut self, mode: BoxMode) -> bool {
        for v in self.val_choice.iter_mut() {
            *v += 1;
            if *v < self.closed.len() {
                return true;
            }
            *v = 0;
        }
        if mode == BoxMode::EmptyOnly {
            return false;
        }
        let radix = 1u64 << self.components.len();
        for c in self.rm_choice.iter_mut() {
            *c += 1;
            if *c < radix {
                return true;
            }
            *c = 0;
        }
        false
    }
}

fn upper_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

/// Streams every valid structure with `world_count` worlds and valuations
/// over exactly `atoms` (sorted and deduplicated internally).
pub struct StructureEnumerator {
    k: usize,
    atoms: Vec<String>,
    dedup: bool,
    mode: BoxMode,
    next_rq: u64,
    rq_limit: u64,
    frame: Option<Frame>,
    permutations: Vec<Vec<usize>>,
}

impl StructureEnumerator {
    pub fn new(world_count: usize, atoms: &[String]) -> Self {
        assert!(
            (1..=MAX_ENUMERATED_WORLDS).contains(&world_count),
            "world count {world_count} outside 1..={MAX_ENUMERATED_WORLDS}"
        );
        let mut atoms = atoms.to_vec();
        atoms.sort();
        atoms.dedup();
        let bits = world_count * (world_count - 1) / 2;
        StructureEnumerator {
            k: world_count,
            atoms,
            dedup: false,
            mode: BoxMode::Full,
            next_rq: 0,
            rq_limit: 1u64 << bits,
            frame: None,
            permutations: Vec::new(),
        }
    }

    /// Yield one representative per isomorphism class.
    pub fn dedup(mut self, on: bool) -> Self {
        self.dedup = on;
        if on && self.permutations.is_empty() {
            self.permutations = (0..self.k).permutations(self.k).collect();
        }
        self
    }

    pub fn box_mode(mut self, mode: BoxMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn world_count(&self) -> usize {
        self.k
    }

    fn is_canonical(&self, s: &QuantumModalStructure) -> bool {
        let own = encode(s, None);
        self.permutations
            .iter()
            .all(|perm| own <= encode(s, Some(perm)))
    }
}

impl Iterator for StructureEnumerator {
    type Item = QuantumModalStructure;

    fn next(&mut self) -> Option<QuantumModalStructure> {
        loop {
            if self.frame.is_none() {
                if self.next_rq >= self.rq_limit {
                    return None;
                }
                self.frame = Some(Frame::new(self.k, self.next_rq, self.atoms.len()));
                self.next_rq += 1;
            }
            let frame = self.frame.as_mut().expect("frame present");
            let s = frame.build(&self.atoms);
            if !frame.advance(self.mode) {
                self.frame = None;
            }
            if self.dedup && !self.is_canonical(&s) {
                continue;
            }
            return Some(s);
        }
    }
}

fn permute_set(set: WorldSet, perm: Option<&[usize]>) -> u64 {
    match perm {
        None => set.0,
        Some(perm) => set.iter().fold(0u64, |acc, w| acc | 1u64 << perm[w]),
    }
}

// Encoding of the structure relabelled by `perm` (world i becomes perm[i]):
// rq rows, rm rows, then one mask per atom in sorted order.
fn encode(s: &QuantumModalStructure, perm: Option<&[usize]>) -> Vec<u64> {
    let k = s.worlds;
    let mut out = vec![0u64; 2 * k + s.valuation.len()];
    for i in 0..k {
        let target = perm.map_or(i, |p| p[i]);
        out[target] = permute_set(s.rq.row(i), perm);
        out[k + target] = permute_set(s.rm.row(i), perm);
    }
    for (slot, set) in s.valuation.values().enumerate() {
        out[2 * k + slot] = permute_set(*set, perm);
    }
    out
}

/// `enumerate_structures(k, atoms, dedup)` with every `rm`.
pub fn enumerate_structures(
    world_count: usize,
    atoms: &[String],
    dedup: bool,
) -> StructureEnumerator {
    StructureEnumerator::new(world_count, atoms).dedup(dedup)
}

/// Number of structures the non-deduplicated enumerator yields:
/// the sum over frames of `(2^components)^k * closed^atoms`.
pub fn structure_count(world_count: usize, atom_count: usize, mode: BoxMode) -> u128 {
    let bits = world_count * (world_count - 1) / 2;
    let mut total = 0u128;
    for mask in 0u64..1 << bits {
        let frame = Frame::new(world_count, mask, 0);
        let rm = match mode {
            BoxMode::Full => 1u128 << (frame.components.len() * world_count),
            BoxMode::EmptyOnly => 1,
        };
        total += rm * (frame.closed.len() as u128).pow(atom_count as u32);
    }
    total
}
