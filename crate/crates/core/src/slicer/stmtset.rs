use std::fmt;

use crate::lang::StmtId;

/// Fixed-capacity bit set of statement numbers.
#[derive(Clone, Default)]
pub struct StmtSet {
    words: Vec<u64>,
}

impl StmtSet {
    /// An empty set able to hold statement numbers `0..=max`.
    pub fn with_max(max: StmtId) -> Self {
        StmtSet { words: vec![0; max as usize / 64 + 1] }
    }

    pub fn insert(&mut self, s: StmtId) {
        let (w, b) = (s as usize / 64, s % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn contains(&self, s: StmtId) -> bool {
        self.words.get(s as usize / 64).is_some_and(|w| w & (1 << (s % 64)) != 0)
    }

    pub fn union_with(&mut self, other: &StmtSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = StmtId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(i as StmtId * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<StmtId> {
        self.iter().collect()
    }
}

impl PartialEq for StmtSet {
    fn eq(&self, other: &Self) -> bool {
        let (short, long) = if self.words.len() <= other.words.len() { (self, other) } else { (other, self) };
        short.words.iter().zip(&long.words).all(|(a, b)| a == b)
            && long.words[short.words.len()..].iter().all(|&w| w == 0)
    }
}

impl Eq for StmtSet {}

impl FromIterator<StmtId> for StmtSet {
    fn from_iter<I: IntoIterator<Item = StmtId>>(iter: I) -> Self {
        let mut s = StmtSet::default();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for StmtSet {
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
        fn behaves_like_a_btreeset(a in proptest::collection::vec(0u32..300, 0..60), b in proptest::collection::vec(0u32..300, 0..60)) {
            let mut s: StmtSet = a.iter().copied().collect();
            let t: StmtSet = b.iter().copied().collect();
            s.union_with(&t);
            let expect: BTreeSet<u32> = a.iter().chain(&b).copied().collect();
            prop_assert_eq!(s.to_vec(), expect.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(s.len(), expect.len());
            for x in 0..300 {
                prop_assert_eq!(s.contains(x), expect.contains(&x));
            }
        }
    }

    #[test]
    fn equality_ignores_capacity() {
        let mut a = StmtSet::with_max(500);
        let mut b = StmtSet::default();
        a.insert(3);
        b.insert(3);
        assert_eq!(a, b);
        b.insert(400);
        assert_ne!(a, b);
    }

    #[test]
    fn empty_and_capacity() {
        let s = StmtSet::with_max(130);
        assert!(s.is_empty());
        assert_eq!(s.len(), 0);
        assert!(!s.contains(500));
    }
}
