//! Linear algebra over `F2` on packed bit vectors.

/// A vector over `F2` of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| 64 * k + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// An echelon basis of a subspace, built incrementally. Each stored vector
/// remembers which inserted vectors it combines, so membership queries can
/// return coordinates.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    /// Reduced vectors keyed by pivot.
    rows: Vec<(usize, BitVec, BitVec)>,
    inserted: usize,
    pivots: std::collections::HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon { len, rows: Vec::new(), inserted: 0, pivots: Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis, returning the residue and the
    /// combination of inserted vectors that was added.
    fn reduce_tracked(&self, v: &BitVec) -> (BitVec, Vec<usize>) {
        let mut r = v.clone();
        let mut combo = BitVec::zeros(self.inserted.max(1));
        while let Some(p) = self.lowest_pivot_hit(&r) {
            let (_, row, tag) = &self.rows[p];
            r.xor(row);
            for i in tag.ones() {
                combo.flip(i);
            }
        }
        (r, combo.ones().filter(|&i| i < self.inserted).collect())
    }

    fn lowest_pivot_hit(&self, r: &BitVec) -> Option<usize> {
        r.ones().find_map(|i| self.pivots.get(&i).copied())
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "vector length");
        let id = self.inserted;
        self.inserted += 1;
        let mut r = v.clone();
        let mut tag = BitVec::zeros(self.inserted);
        tag.flip(id);
        while let Some(p) = self.lowest_pivot_hit(&r) {
            let (_, row, t) = &self.rows[p];
            r.xor(row);
            for i in t.ones() {
                tag.flip(i);
            }
        }
        // no set bit of a fully reduced vector is a pivot
        match r.first_one() {
            Some(pivot) => {
                self.pivots.insert(pivot, self.rows.len());
                self.rows.push((pivot, r, tag));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce_tracked(v).0.is_zero()
    }

    /// Indices of inserted vectors summing to `v`, if `v` is in the span.
    pub fn solve(&self, v: &BitVec) -> Option<Vec<usize>> {
        let (r, combo) = self.reduce_tracked(v);
        r.is_zero().then_some(combo)
    }
}

/// Rank of a set of row vectors. Uses a simple elimination that keeps the
/// rows in place, which is faster than [`Echelon`] when no coordinates are
/// needed.
pub fn rank(rows: &[BitVec]) -> usize {
    let mut basis: Vec<BitVec> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in rows {
        let mut r = v.clone();
        for (b, &p) in basis.iter().zip(&pivots) {
            if r.get(p) {
                r.xor(b);
            }
        }
        if let Some(p) = r.first_one() {
            for b in basis.iter_mut() {
                if b.get(p) {
                    b.xor(&r);
                }
            }
            basis.push(r);
            pivots.push(p);
        }
    }
    basis.len()
}

/// A basis of `{x : Σ x_i rows[i] = 0}`.
pub fn left_kernel(rows: &[BitVec]) -> Vec<BitVec> {
    let n = rows.len();
    let mut e = Echelon::new(rows.first().map_or(0, BitVec::len));
    let mut out = Vec::new();
    for (i, v) in rows.iter().enumerate() {
        if !e.insert(v) {
            // the residue vanished: v is a combination of earlier rows
            let (_, combo) = e.reduce_tracked(v);
            let mut k = BitVec::from_indices(n, combo.into_iter().filter(|&j| j != i));
            k.flip(i);
            out.push(k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(len: usize, ones: &[usize]) -> BitVec {
        BitVec::from_indices(len, ones.iter().copied())
    }

    #[test]
    fn small_rank() {
        let rows = [v(3, &[0, 1]), v(3, &[1, 2]), v(3, &[0, 2])];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[v(130, &[129]), v(130, &[0, 129])]), 2);
    }

    #[test]
    fn kernel_of_a_triangle() {
        let rows = [v(3, &[0, 1]), v(3, &[1, 2]), v(3, &[0, 2])];
        assert_eq!(left_kernel(&rows), vec![v(3, &[0, 1, 2])]);
    }

    fn bitvec(len: usize) -> impl Strategy<Value = BitVec> {
        proptest::collection::vec(any::<bool>(), len)
            .prop_map(move |bits| BitVec::from_indices(len, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in proptest::collection::vec(bitvec(70), 0..12)) {
            let r = rank(&rows);
            let k = left_kernel(&rows);
            prop_assert_eq!(r + k.len(), rows.len());
            for x in &k {
                let mut sum = BitVec::zeros(70);
                for i in x.ones() {
                    sum.xor(&rows[i]);
                }
                prop_assert!(sum.is_zero());
            }
        }

        #[test]
        fn solve_recovers_combinations(rows in proptest::collection::vec(bitvec(20), 1..8), pick in any::<u8>()) {
            let mut e = Echelon::new(20);
            for r in &rows {
                e.insert(r);
            }
            let mut target = BitVec::zeros(20);
            for (i, r) in rows.iter().enumerate() {
                if pick >> (i % 8) & 1 == 1 {
                    target.xor(r);
                }
            }
            let combo = e.solve(&target).expect("in span");
            let mut sum = BitVec::zeros(20);
            for i in combo {
                sum.xor(&rows[i]);
            }
            prop_assert_eq!(sum, target);
        }
    }
}
