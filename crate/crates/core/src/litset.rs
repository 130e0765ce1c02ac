use alloc::vec;
use alloc::vec::Vec;

use crate::lang::Lit;

/// Dense set of literals indexed by `Lit::index`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LitSet {
    words: Vec<u64>,
}

impl LitSet {
    pub fn with_fluents(fluents: usize) -> Self {
        LitSet {
            words: vec![0; (2 * fluents).div_ceil(64).max(1)],
        }
    }

    #[inline]
    pub fn contains(&self, lit: Lit) -> bool {
        let i = lit.index();
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Returns true if the literal was newly inserted.
    #[inline]
    pub fn insert(&mut self, lit: Lit) -> bool {
        let i = lit.index();
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, lit: Lit) {
        let i = lit.index();
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// `self |= other & !mask`, returning whether anything changed.
    pub fn union_masked(&mut self, other: &LitSet, mask: &LitSet) -> bool {
        let mut changed = false;
        for ((w, o), m) in self.words.iter_mut().zip(&other.words).zip(&mask.words) {
            let next = *w | (o & !m);
            changed |= next != *w;
            *w = next;
        }
        changed
    }

    pub fn union_with(&mut self, other: &LitSet) -> bool {
        let mut changed = false;
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            let next = *w | o;
            changed |= next != *w;
            *w = next;
        }
        changed
    }

    /// First literal whose complement is also present.
    pub fn first_conflict(&self) -> Option<Lit> {
        for (wi, w) in self.words.iter().enumerate() {
            // positive literal at even bit, negative at the following odd bit
            let pairs = w & (w >> 1) & 0x5555_5555_5555_5555;
            if pairs != 0 {
                let bit = pairs.trailing_zeros() as usize;
                return Some(Lit::from_index(wi * 64 + bit));
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(Lit::from_index(wi * 64 + bit))
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}
