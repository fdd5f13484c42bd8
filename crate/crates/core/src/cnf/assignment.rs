use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// A point of the n-dimensional hypercube.
///
/// Variable `i` (0-based) lives at bit `i % 64` of word `i / 64`; bits past `n` are zero.
/// Ordering is lexicographic on the 0/1 string with variable 1 leftmost.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut a = Self::zeros(n);
        for w in a.words.iter_mut() {
            *w = u64::MAX;
        }
        a.mask_tail();
        a
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut a = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                a.set(i, true);
            }
        }
        a
    }

    pub(crate) fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(n), 0);
        let mut a = Assignment { n, words };
        a.mask_tail();
        a
    }

    /// Point whose 0/1 string, read as a binary numeral, equals `index` (variable 1 is the MSB).
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "index form needs n <= 64");
        let mut a = Self::zeros(n);
        for i in 0..n {
            if (index >> (n - 1 - i)) & 1 == 1 {
                a.set(i, true);
            }
        }
        a
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.n <= 64, "index form needs n <= 64");
        let mut idx = 0u64;
        for i in 0..self.n {
            idx = (idx << 1) | self.get(i) as u64;
        }
        idx
    }

    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let words = (0..words_for(n)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(n, words)
    }

    /// Overwrites with uniform random bits.
    pub(crate) fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for w in self.words.iter_mut() {
            *w = rng.gen();
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.n);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn distance(&self, other: &Assignment) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor(&self, other: &Assignment) -> Assignment {
        debug_assert_eq!(self.n, other.n);
        Assignment {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// The antipode.
    pub fn complement(&self) -> Assignment {
        let mut a = Assignment {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        a.mask_tail();
        a
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(move |i| self.get(i))
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let x = a ^ b;
            if x != 0 {
                let p = x.trailing_zeros();
                return if (a >> p) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.n.cmp(&other.n)
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({self})")
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("invalid assignment character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

/// Shorthand for tests and examples: `bits("0110")`.
pub fn bits(s: &str) -> Assignment {
    s.parse().expect("0/1 string")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn string_round_trip_and_index() {
        let a = bits("0110");
        assert_eq!(a.to_string(), "0110");
        assert_eq!(a.to_index(), 0b0110);
        assert_eq!(Assignment::from_index(4, 6), a);
        assert_eq!(a.weight(), 2);
        assert_eq!(a.complement().to_string(), "1001");
    }

    #[test]
    fn ones_masks_tail() {
        let a = Assignment::ones(70);
        assert_eq!(a.weight(), 70);
        assert_eq!(a.complement().weight(), 0);
    }

    proptest! {
        #[test]
        fn order_matches_string_order(x in 0u64..1024, y in 0u64..1024) {
            let a = Assignment::from_index(10, x);
            let b = Assignment::from_index(10, y);
            prop_assert_eq!(a.cmp(&b), a.to_string().cmp(&b.to_string()));
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }

        #[test]
        fn distance_is_weight_of_xor(v in proptest::collection::vec(any::<bool>(), 1..150),
                                     w in proptest::collection::vec(any::<bool>(), 150)) {
            let a = Assignment::from_bits(&v);
            let b = Assignment::from_bits(&w[..v.len()]);
            let direct = v.iter().zip(&w).filter(|(p, q)| p != q).count();
            prop_assert_eq!(a.distance(&b), direct);
            prop_assert_eq!(a.xor(&b).weight(), direct);
        }
    }
}
