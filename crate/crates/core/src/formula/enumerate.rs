//! A canonical numbering of all formulas over a finite atom list.
//!
//! Formulas are ordered by size (node count) first. Within one size the
//! constructor order is `Atom < Not < Box < And`; conjunctions are ordered
//! by the size of the left conjunct, then by the index of the left conjunct,
//! then by the index of the right conjunct. Index 0 is the first atom.

use super::Formula;

/// Number of distinct formulas with exactly `size` nodes over `atom_count`
/// atoms, or `None` on overflow.
pub fn count_of_size(atom_count: usize, size: usize) -> Option<u128> {
    let mut counts = vec![0u128; size + 1];
    for n in 1..=size {
        counts[n] = counts_step(&counts, atom_count, n)?;
    }
    Some(counts[size])
}

fn counts_step(counts: &[u128], atom_count: usize, n: usize) -> Option<u128> {
    if n == 1 {
        return Some(atom_count as u128);
    }
    let mut total = counts[n - 1].checked_mul(2)?;
    for left in 1..n - 1 {
        let right = n - 1 - left;
        total = total.checked_add(counts[left].checked_mul(counts[right])?)?;
    }
    Some(total)
}

/// Unranks `index` into the canonical numbering over `atoms`.
///
/// Panics if `atoms` is empty.
pub fn enumerate_formula(atoms: &[String], index: u64) -> Formula {
    FormulaEnumerator::new(atoms).nth_formula(index)
}

/// Reusable unranking state; keeps the table of per-size counts.
#[derive(Debug, Clone)]
pub struct FormulaEnumerator {
    atoms: Vec<String>,
    counts: Vec<u128>,
}

impl FormulaEnumerator {
    pub fn new(atoms: &[String]) -> Self {
        assert!(
            !atoms.is_empty(),
            "formula enumeration needs at least one atom"
        );
        FormulaEnumerator {
            atoms: atoms.to_vec(),
            counts: vec![0],
        }
    }

    fn count(&mut self, size: usize) -> u128 {
        while self.counts.len() <= size {
            let n = self.counts.len();
            // u64 indices never reach sizes whose count overflows u128
            let c = counts_step(&self.counts, self.atoms.len(), n).unwrap_or(u128::MAX);
            self.counts.push(c);
        }
        self.counts[size]
    }

    pub fn nth_formula(&mut self, index: u64) -> Formula {
        let mut rest = index as u128;
        let mut size = 1;
        loop {
            let c = self.count(size);
            if rest < c {
                return self.unrank(size, rest);
            }
            rest -= c;
            size += 1;
        }
    }

    fn unrank(&mut self, size: usize, mut rank: u128) -> Formula {
        if size == 1 {
            return Formula::atom(&self.atoms[rank as usize]);
        }
        let unary = self.count(size - 1);
        if rank < unary {
            return Formula::not(self.unrank(size - 1, rank));
        }
        rank -= unary;
        if rank < unary {
            return Formula::boxed(self.unrank(size - 1, rank));
        }
        rank -= unary;
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let right_count = self.count(right);
            let block = self.count(left) * right_count;
            if rank < block {
                let l = self.unrank(left, rank / right_count);
                let r = self.unrank(right, rank % right_count);
                return Formula::and(l, r);
            }
            rank -= block;
        }
        unreachable!("rank exceeds the number of formulas of size {size}")
    }

    /// Total number of formulas of size at most `size`.
    pub fn count_up_to(&mut self, size: usize) -> u128 {
        (1..=size).map(|n| self.count(n)).sum()
    }
}
