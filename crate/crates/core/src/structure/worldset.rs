use std::fmt;

/// Maximum number of worlds a structure can hold.
pub const MAX_WORLDS: usize = 64;

/// A set of world indices, stored as a 64-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WorldSet(pub u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    /// `{0, ..., count - 1}`.
    pub fn full(count: usize) -> WorldSet {
        debug_assert!(count <= MAX_WORLDS);
        if count >= 64 {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << count) - 1)
        }
    }

    pub fn singleton(world: usize) -> WorldSet {
        WorldSet(1u64 << world)
    }

    pub fn from_worlds(worlds: impl IntoIterator<Item = usize>) -> WorldSet {
        let mut set = WorldSet::EMPTY;
        for w in worlds {
            set.insert(w);
        }
        set
    }

    pub fn contains(self, world: usize) -> bool {
        world < 64 && self.0 >> world & 1 == 1
    }

    pub fn insert(&mut self, world: usize) {
        self.0 |= 1u64 << world;
    }

    pub fn remove(&mut self, world: usize) {
        self.0 &= !(1u64 << world);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & other.0)
    }

    pub fn difference(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: WorldSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let w = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w)
        })
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
