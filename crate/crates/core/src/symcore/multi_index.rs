use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{factorial, Rational};

/// A word in the letters `1..=dim` taken modulo permutations, i.e. a finite
/// multiset. Stored with letters sorted ascending so equality is structural.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut letters: Vec<usize>) -> Self {
        letters.sort_unstable();
        MultiIndex(letters)
    }

    pub fn single(letter: usize) -> Self {
        MultiIndex(vec![letter])
    }

    /// Multi-index with `counts[i]` copies of the letter `i + 1`.
    pub fn from_counts(counts: &[usize]) -> Self {
        let mut letters = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            letters.extend(std::iter::repeat_n(i + 1, c));
        }
        MultiIndex(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_letter(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    /// Multiplicity of every letter `1..=dim`.
    pub fn counts(&self, dim: usize) -> Vec<usize> {
        let mut counts = vec![0; dim.max(self.max_letter())];
        for &l in &self.0 {
            counts[l - 1] += 1;
        }
        counts
    }

    pub fn count(&self, letter: usize) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// `I!`: product over distinct letters of (multiplicity)!.
    pub fn factorial(&self) -> Rational {
        let mut acc = BigRational::from_integer(BigInt::from(1));
        for c in self.counts(self.max_letter()) {
            acc *= factorial(c);
        }
        acc
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        MultiIndex::new(letters)
    }

    pub fn with(&self, letter: usize) -> MultiIndex {
        self.concat(&MultiIndex::single(letter))
    }

    /// Remove one copy of `letter`, if present.
    pub fn without(&self, letter: usize) -> Option<MultiIndex> {
        let pos = self.0.iter().position(|&l| l == letter)?;
        let mut letters = self.0.clone();
        letters.remove(pos);
        Some(MultiIndex(letters))
    }

    /// Multiset difference `self - other`, if `other` is contained in `self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut rest = self.clone();
        for &l in &other.0 {
            rest = rest.without(l)?;
        }
        Some(rest)
    }

    /// Every sub-multiset `S` of `self` together with the complement and the
    /// multinomial weight `prod_i binom(self[i], S[i])`.
    pub fn splits(&self) -> Vec<(MultiIndex, MultiIndex, u64)> {
        let counts = self.counts(self.max_letter());
        let mut out = Vec::new();
        let mut current = vec![0usize; counts.len()];
        loop {
            let sub = MultiIndex::from_counts(&current);
            let rest_counts: Vec<usize> = counts.iter().zip(&current).map(|(c, s)| c - s).collect();
            let weight = counts
                .iter()
                .zip(&current)
                .map(|(&c, &s)| binomial(c, s))
                .product();
            out.push((sub, MultiIndex::from_counts(&rest_counts), weight));
            // odometer increment
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return out;
                }
                if current[i] < counts[i] {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
                i += 1;
            }
        }
    }

    /// All multi-indices of length `len` in the letters `1..=dim`, in
    /// lexicographic order of their sorted words.
    pub fn all_of_len(dim: usize, len: usize) -> Vec<MultiIndex> {
        fn rec(
            start: usize,
            dim: usize,
            left: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<MultiIndex>,
        ) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for l in start..=dim {
                cur.push(l);
                rec(l, dim, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if len == 0 {
                out.push(MultiIndex::empty());
            }
            return out;
        }
        rec(1, dim, len, &mut Vec::new(), &mut out);
        out
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::int;

    #[test]
    fn canonical_and_factorial() {
        let a = MultiIndex::new(vec![2, 1, 2]);
        assert_eq!(a, MultiIndex::new(vec![2, 2, 1]));
        assert_eq!(a.len(), 3);
        assert_eq!(a.factorial(), int(2));
        assert_eq!(MultiIndex::new(vec![1, 1, 1, 2, 2]).factorial(), int(12));
        assert_eq!(MultiIndex::empty().factorial(), int(1));
    }

    #[test]
    fn concat_is_a_commutative_monoid() {
        let a = MultiIndex::new(vec![1, 3]);
        let b = MultiIndex::new(vec![2]);
        let c = MultiIndex::new(vec![3, 3]);
        assert_eq!(a.concat(&b), b.concat(&a));
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
        assert_eq!(a.concat(&MultiIndex::empty()), a);
    }

    #[test]
    fn splits_weights_sum_to_two_to_the_len() {
        let a = MultiIndex::new(vec![1, 1, 2]);
        let splits = a.splits();
        // (1+1)^|I| = sum of multinomial weights
        assert_eq!(splits.iter().map(|s| s.2).sum::<u64>(), 8);
        for (s, rest, _) in &splits {
            assert_eq!(s.concat(rest), a);
        }
        assert_eq!(splits.len(), 3 * 2);
    }

    #[test]
    fn enumeration_counts() {
        // multisets of size k over d letters: binom(d+k-1, k)
        assert_eq!(MultiIndex::all_of_len(4, 3).len(), 20);
        assert_eq!(MultiIndex::all_of_len(4, 0), vec![MultiIndex::empty()]);
        assert_eq!(MultiIndex::all_of_len(0, 2).len(), 0);
    }
}
