use std::fmt;

/// Dense bitset over interned atom ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AtomSet {
    words: Vec<u64>,
}

impl AtomSet {
    pub fn new(capacity: usize) -> Self {
        AtomSet { words: vec![0; capacity.div_ceil(64)] }
    }

    pub fn from_ids(capacity: usize, ids: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::new(capacity);
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn contains(&self, id: u32) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn insert(&mut self, id: u32) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, id: u32) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        match self.words.get_mut(w) {
            Some(word) => {
                let had = *word >> b & 1 == 1;
                *word &= !(1 << b);
                had
            }
            None => false,
        }
    }

    pub fn contains_all(&self, ids: &[u32]) -> bool {
        ids.iter().all(|&i| self.contains(i))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64u32).filter(move |b| w >> b & 1 == 1).map(move |b| i as u32 * 64 + b)
        })
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn behaves_like_btreeset(ops in proptest::collection::vec((any::<bool>(), 0u32..200), 0..100)) {
            let mut s = AtomSet::new(10);
            let mut model = BTreeSet::new();
            for (add, id) in ops {
                if add {
                    prop_assert_eq!(s.insert(id), model.insert(id));
                } else {
                    prop_assert_eq!(s.remove(id), model.remove(&id));
                }
            }
            prop_assert_eq!(s.iter().collect::<Vec<_>>(), model.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(s.len(), model.len());
        }
    }
}
