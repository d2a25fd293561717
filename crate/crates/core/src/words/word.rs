use std::fmt;

use crate::error::{Error, Result};

/// Largest supported rank; generators print as `a..z`, inverses as `A..Z`.
pub const MAX_RANK: usize = 26;

/// Position of a letter in the alphabet order `a < A < b < B < …`.
///
/// Letters are nonzero integers: `+i` is the generator `gᵢ`, `−i` its inverse.
pub fn letter_index(x: i32) -> usize {
    2 * (x.unsigned_abs() as usize - 1) + usize::from(x < 0)
}

/// Inverse of [`letter_index`].
pub fn letter_from_index(i: usize) -> i32 {
    let g = (i / 2 + 1) as i32;
    if i.is_multiple_of(2) {
        g
    } else {
        -g
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::InvalidRank(rank));
    }
    Ok(())
}

fn check_letters(rank: usize, letters: &[i32]) -> Result<()> {
    check_rank(rank)?;
    for &x in letters {
        if x == 0 || x.unsigned_abs() as usize > rank {
            return Err(Error::LetterOutOfRange { letter: x, rank });
        }
    }
    Ok(())
}

fn letter_char(x: i32) -> char {
    let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
    if x < 0 {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

fn parse_letters(rank: usize, s: &str) -> Result<Vec<i32>> {
    let s = s.trim();
    if s.is_empty() || s == "e" || s == "1" {
        return Ok(Vec::new());
    }
    let letters = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '.' && *c != '*')
        .map(|c| {
            if c.is_ascii_lowercase() {
                Ok(i32::from(c as u8 - b'a') + 1)
            } else if c.is_ascii_uppercase() {
                Ok(-(i32::from(c as u8 - b'A') + 1))
            } else {
                Err(Error::Parse(format!("invalid letter {c:?} in word {s:?}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    check_letters(rank, &letters)?;
    Ok(letters)
}

/// A word in the generators of the free group of rank `k`, not necessarily reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<i32>,
    rank: usize,
}

impl Word {
    pub fn new(rank: usize, letters: Vec<i32>) -> Result<Self> {
        check_letters(rank, &letters)?;
        Ok(Word { letters, rank })
    }

    pub fn identity(rank: usize) -> Result<Self> {
        Self::new(rank, Vec::new())
    }

    /// Parses `abAB`-style strings; uppercase letters are inverses.
    pub fn parse(rank: usize, s: &str) -> Result<Self> {
        Ok(Word {
            letters: parse_letters(rank, s)?,
            rank,
        })
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != -w[1])
    }

    /// Free reduction by a single left-to-right stack pass.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &x in &self.letters {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word {
            letters: out,
            rank: self.rank,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|x| -x).collect(),
            rank: self.rank,
        }
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word {
            letters,
            rank: self.rank,
        }
        .reduce())
    }

    /// `u · self · u⁻¹`, reduced.
    pub fn conjugate_by(&self, u: &Word) -> Result<Word> {
        u.mul(self)?.mul(&u.inverse())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        self.letters
            .iter()
            .try_for_each(|&x| write!(f, "{}", letter_char(x)))
    }
}

/// Free reduction of a word.
pub fn reduce(w: &Word) -> Word {
    w.reduce()
}

/// A conjugacy class of a nontrivial element: a cyclically reduced word stored
/// as its least rotation in the alphabet order `a < A < b < B < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    // field order gives the (length, lexicographic) ordering
    len: usize,
    key: Vec<u8>,
    rank: usize,
}

impl CyclicWord {
    /// Builds from letters that are already cyclically reduced and rotation-minimal.
    pub(crate) fn from_canonical_indices(rank: usize, key: Vec<u8>) -> Self {
        CyclicWord {
            len: key.len(),
            key,
            rank,
        }
    }

    pub fn parse(rank: usize, s: &str) -> Result<Self> {
        canonical_class(&Word::parse(rank, s)?)
    }

    pub fn letters(&self) -> Vec<i32> {
        self.key
            .iter()
            .map(|&i| letter_from_index(usize::from(i)))
            .collect()
    }

    /// Letters as alphabet positions (`a = 0, A = 1, b = 2, …`).
    pub fn letter_indices(&self) -> &[u8] {
        &self.key
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// A word representing the class.
    pub fn to_word(&self) -> Word {
        Word {
            letters: self.letters(),
            rank: self.rank,
        }
    }

    /// Largest `n` with the class equal to `cⁿ` for some class `c`.
    pub fn power_exponent(&self) -> usize {
        self.len / self.primitive_period()
    }

    fn primitive_period(&self) -> usize {
        let n = self.len;
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.key[i] == self.key[i - p]))
            .unwrap_or(n)
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_period() == self.len
    }

    /// The class `c` with `self = cⁿ`, `n` maximal.
    pub fn primitive_root(&self) -> CyclicWord {
        let p = self.primitive_period();
        CyclicWord::from_canonical_indices(self.rank, self.key[..p].to_vec())
    }

    /// The class of `cⁿ`; the least rotation of a power is the power of the least rotation.
    pub fn pow(&self, n: usize) -> CyclicWord {
        let key = self
            .key
            .iter()
            .copied()
            .cycle()
            .take(self.len * n)
            .collect();
        CyclicWord::from_canonical_indices(self.rank, key)
    }

    /// The class of the inverse element.
    pub fn inverse(&self) -> CyclicWord {
        canonical_class(&self.to_word().inverse())
            .expect("inverse of a nontrivial class is nontrivial")
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

/// Least rotation by Booth's algorithm; returns the starting offset.
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: isize| &s[i as usize % n];
    let mut f = vec![-1isize; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = at(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    k as usize % n
}

/// Cyclic reduction followed by the least rotation.
pub fn canonical_class(w: &Word) -> Result<CyclicWord> {
    let r = w.reduce();
    let mut letters: &[i32] = r.letters();
    while letters.len() >= 2 && letters[0] == -letters[letters.len() - 1] {
        letters = &letters[1..letters.len() - 1];
    }
    if letters.is_empty() {
        return Err(Error::IdentityElement);
    }
    let idx: Vec<u8> = letters.iter().map(|&x| letter_index(x) as u8).collect();
    let k = least_rotation(&idx);
    let key: Vec<u8> = idx[k..].iter().chain(&idx[..k]).copied().collect();
    Ok(CyclicWord::from_canonical_indices(w.rank(), key))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_order() {
        let order: Vec<i32> = (0..6).map(letter_from_index).collect();
        assert_eq!(order, vec![1, -1, 2, -2, 3, -3]);
        for &x in &order {
            assert_eq!(letter_from_index(letter_index(x)), x);
        }
    }

    #[test]
    fn reduction() {
        assert!(Word::parse(2, "aA").unwrap().reduce().is_empty());
        assert_eq!(Word::parse(2, "abBa").unwrap().reduce().to_string(), "aa");
        assert!(matches!(
            Word::new(2, vec![3]),
            Err(Error::LetterOutOfRange { letter: 3, rank: 2 })
        ));
    }

    #[test]
    fn classes() {
        let a = CyclicWord::parse(2, "a").unwrap();
        assert_eq!(CyclicWord::parse(2, "baB").unwrap(), a);
        assert_eq!(
            CyclicWord::parse(2, "ab").unwrap(),
            CyclicWord::parse(2, "ba").unwrap()
        );
        assert_eq!(CyclicWord::parse(2, "abab").unwrap().power_exponent(), 2);
        assert_eq!(
            CyclicWord::parse(2, "bAbA")
                .unwrap()
                .primitive_root()
                .to_string(),
            "Ab"
        );
        assert!(matches!(
            CyclicWord::parse(2, "abBA"),
            Err(Error::IdentityElement)
        ));
    }

    #[test]
    fn booth_matches_naive() {
        let s = [3, 1, 2, 1, 2, 1, 1, 3];
        let k = least_rotation(&s);
        let rot = |k: usize| s[k..].iter().chain(&s[..k]).copied().collect::<Vec<_>>();
        let best = (0..s.len()).map(rot).min().unwrap();
        assert_eq!(rot(k), best);
    }
}
