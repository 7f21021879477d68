//! Multi-index bookkeeping for moments and Weyl-ordered basis elements.
//!
//! A moment of an `M`-dimensional algebra is labelled by a multi-index
//! `i⃗ = (i_1, …, i_M)`; its degree `|i⃗| = i_1 + … + i_M` is the number of
//! operator factors. Words (explicit letter sequences like `x̂_1 x̂_1 x̂_3`)
//! are handled as `Vec<u8>` of zero-based generator labels; a multi-index is
//! the commutative shadow of a word.

use std::fmt;

use thiserror::Error;

/// Exponent vector `(i_1, …, i_M)` labelling a moment `Δ(x_1^{i_1} ⋯ x_M^{i_M})`
/// or the Weyl-ordered basis element `ê_{i⃗}`.
///
/// Ordering is lexicographic on the entries; use [`MultiIndex::cmp_graded`]
/// when a degree-major order is wanted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    /// Builds a multi-index from its exponent entries.
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex { entries }
    }

    /// The zero index of dimension `m` (labelling the identity / the trivial moment).
    pub fn zero(m: usize) -> Self {
        MultiIndex {
            entries: vec![0; m],
        }
    }

    /// The unit index `e_k` (zero-based `k`): a single factor of `x̂_{k+1}`.
    ///
    /// Panics if `k >= m`; generator labels out of range are a programming
    /// error, not a data error.
    pub fn unit(m: usize, k: usize) -> Self {
        assert!(k < m, "generator label {k} out of range for dimension {m}");
        let mut entries = vec![0; m];
        entries[k] = 1;
        MultiIndex { entries }
    }

    /// Number of generators `M`.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total degree `|i⃗| = i_1 + … + i_M`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// Exponent of generator `k` (zero-based).
    pub fn get(&self, k: usize) -> u32 {
        self.entries[k]
    }

    /// The raw exponent entries.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Entrywise sum. Panics on dimension mismatch (indices from different
    /// algebras must never meet).
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex { entries }
    }

    /// `self + e_k`.
    pub fn plus_unit(&self, k: usize) -> MultiIndex {
        let mut entries = self.entries.clone();
        entries[k] += 1;
        MultiIndex { entries }
    }

    /// `self − e_k`, or `None` if the `k`-th exponent is zero.
    pub fn minus_unit(&self, k: usize) -> Option<MultiIndex> {
        if self.entries[k] == 0 {
            return None;
        }
        let mut entries = self.entries.clone();
        entries[k] -= 1;
        Some(MultiIndex { entries })
    }

    /// `i⃗! = i_1! ⋯ i_M!`. Exponents are small (words are capped well below
    /// 21), so this fits a `u64` comfortably.
    pub fn factorial(&self) -> u64 {
        self.entries
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>())
            .product()
    }

    /// Degree-major comparison: first by `|i⃗|`, ties broken with higher
    /// leading exponents first, matching [`indices_of_degree`] order
    /// (`(2,0,0)` before `(1,1,0)` before `(0,2,0)` …).
    pub fn cmp_graded(&self, other: &MultiIndex) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.entries.cmp(&self.entries))
    }

    /// The sorted word realizing this index: `(2,0,1)` ↦ `[0, 0, 2]`.
    pub fn to_word(&self) -> Vec<u8> {
        let mut word = Vec::with_capacity(self.degree() as usize);
        for (k, &e) in self.entries.iter().enumerate() {
            for _ in 0..e {
                word.push(k as u8);
            }
        }
        word
    }

    /// The commutative shadow of a word: counts each letter.
    pub fn from_word(m: usize, word: &[u8]) -> Self {
        let mut entries = vec![0u32; m];
        for &letter in word {
            entries[letter as usize] += 1;
        }
        MultiIndex { entries }
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (pos, e) in self.entries.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of dimension `m` and exact degree `d`, in lexicographic
/// order (descending first entry).
pub fn indices_of_degree(m: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fill_degree(&mut current, 0, d, &mut out);
    out
}

fn fill_degree(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        current[pos] = take;
        fill_degree(current, pos + 1, remaining - take, out);
        current[pos] = 0;
    }
}

/// All multi-indices with `|i⃗| ≤ dmax`, degree-major order.
pub fn indices_up_to(m: usize, dmax: u32) -> Vec<MultiIndex> {
    (0..=dmax).flat_map(|d| indices_of_degree(m, d)).collect()
}

/// All distinct arrangements (multiset permutations) of the word of `idx`,
/// in lexicographic word order. There are `|i⃗|!/i⃗!` of them.
pub fn distinct_arrangements(idx: &MultiIndex) -> Vec<Vec<u8>> {
    let mut counts: Vec<u32> = idx.entries().to_vec();
    let n = idx.degree() as usize;
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    arrange(&mut counts, n, &mut word, &mut out);
    out
}

fn arrange(counts: &mut [u32], n: usize, word: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if word.len() == n {
        out.push(word.clone());
        return;
    }
    for k in 0..counts.len() {
        if counts[k] > 0 {
            counts[k] -= 1;
            word.push(k as u8);
            arrange(counts, n, word, out);
            word.pop();
            counts[k] += 1;
        }
    }
}

/// Errors from the closed-form counting functions.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountingError {
    #[error("algebra dimension must be at least 1, got {got}")]
    DimensionOutOfRange { got: usize },
    #[error("truncation order must be at least {min}, got {got}")]
    OrderOutOfRange { min: u32, got: u32 },
    #[error("count overflows u64 (m = {m}, n = {n})")]
    Overflow { m: usize, n: u32 },
}

/// Binomial coefficient `C(n, k)` with overflow checking.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for step in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - k as u128 + step)?;
        acc /= step; // exact: C(n-k+1..n-k+step) is divisible by step!
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of independent moments of exact degree `n` in dimension `m`:
/// `C(n + m − 1, m − 1)`.
///
/// For `m = 3, n = 2` this is the familiar six second-order moments.
pub fn count_moments(m: usize, n: u32) -> Result<u64, CountingError> {
    if m < 1 {
        return Err(CountingError::DimensionOutOfRange { got: m });
    }
    binomial(n as u64 + m as u64 - 1, m as u64 - 1).ok_or(CountingError::Overflow { m, n })
}

/// Number of scalar conditions that a Casimir constraint contributes at
/// moment order `n`: `C(n + m − 2, m − 1)`, one for each degree-`(n−1)`
/// multi-index labelling the constraint tower.
pub fn count_constraint_conditions(m: usize, n: u32) -> Result<u64, CountingError> {
    if m < 1 {
        return Err(CountingError::DimensionOutOfRange { got: m });
    }
    if n < 1 {
        return Err(CountingError::OrderOutOfRange { min: 1, got: n });
    }
    binomial(n as u64 + m as u64 - 2, m as u64 - 1).ok_or(CountingError::Overflow { m, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degree_and_factorial() {
        let idx = MultiIndex::new(vec![2, 0, 3]);
        assert_eq!(idx.degree(), 5);
        assert_eq!(idx.factorial(), 2 * 6);
        assert_eq!(idx.to_word(), vec![0, 0, 2, 2, 2]);
        assert_eq!(MultiIndex::from_word(3, &[2, 0, 2, 2, 0]), idx);
    }

    #[test]
    fn unit_indices_and_arithmetic() {
        let e1 = MultiIndex::unit(3, 0);
        let e3 = MultiIndex::unit(3, 2);
        assert_eq!(e1.plus(&e3), MultiIndex::new(vec![1, 0, 1]));
        assert_eq!(e1.plus_unit(0), MultiIndex::new(vec![2, 0, 0]));
        assert_eq!(e1.minus_unit(0), Some(MultiIndex::zero(3)));
        assert_eq!(e1.minus_unit(2), None);
    }

    #[test]
    fn enumeration_matches_counting() {
        for m in 1..=4usize {
            for d in 0..=5u32 {
                let listed = indices_of_degree(m, d);
                assert_eq!(listed.len() as u64, count_moments(m, d).unwrap());
                // graded enumeration is consistent with the per-degree one
                let upto: usize = (0..=d).map(|k| indices_of_degree(m, k).len()).sum();
                assert_eq!(indices_up_to(m, d).len(), upto);
            }
        }
    }

    #[test]
    fn known_counts() {
        assert_eq!(count_moments(3, 2).unwrap(), 6);
        assert_eq!(count_moments(3, 3).unwrap(), 10);
        assert_eq!(count_constraint_conditions(2, 2).unwrap(), 2);
        assert_eq!(count_constraint_conditions(3, 2).unwrap(), 3);
        assert_eq!(count_constraint_conditions(3, 3).unwrap(), 6);
        assert_eq!(count_moments(1, 7).unwrap(), 1);
        assert!(matches!(
            count_moments(0, 2),
            Err(CountingError::DimensionOutOfRange { got: 0 })
        ));
        assert!(matches!(
            count_constraint_conditions(3, 0),
            Err(CountingError::OrderOutOfRange { min: 1, got: 0 })
        ));
    }

    #[test]
    fn arrangement_count_is_multinomial() {
        let idx = MultiIndex::new(vec![2, 1, 1]);
        let arr = distinct_arrangements(&idx);
        // 4!/2! = 12 distinct words
        assert_eq!(arr.len(), 12);
        // all distinct, all realizing the same index
        let mut sorted = arr.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), arr.len());
        for w in &arr {
            assert_eq!(MultiIndex::from_word(3, w), idx);
        }
    }

    proptest! {
        /// Adding one dimension splits the moment count into "old" moments and
        /// one new constraint condition per tower slot (Pascal's rule).
        #[test]
        fn pascal_splitting(m in 2usize..6, n in 1u32..8) {
            let whole = count_moments(m, n).unwrap();
            let smaller = count_moments(m - 1, n).unwrap();
            let conditions = count_constraint_conditions(m, n).unwrap();
            prop_assert_eq!(whole, smaller + conditions);
        }

        #[test]
        fn graded_order_is_sorted(m in 1usize..4, d in 0u32..6) {
            let all = indices_up_to(m, d);
            for pair in all.windows(2) {
                prop_assert_eq!(pair[0].cmp_graded(&pair[1]), std::cmp::Ordering::Less);
            }
        }
    }
}
