use rayon::prelude::*;
use serde::Serialize;

use super::word::{letter_from_index, CyclicWord, Word, MAX_RANK};
use crate::error::{Error, Result};
use crate::sft::{Cycle, SubshiftGraph};

/// Default ceiling on the number of classes materialized by one enumeration.
pub const DEFAULT_CLASS_CAP: usize = 4_000_000;

/// Options for [`enumerate_classes_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Skip proper powers `cⁿ`, `n ≥ 2`.
    pub primitive_only: bool,
    /// Fail with `BudgetExceeded` beyond this many classes.
    pub cap: usize,
    /// Split the search by first letter across threads. The output order is
    /// the same either way.
    pub parallel: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            primitive_only: false,
            cap: DEFAULT_CLASS_CAP,
            parallel: true,
        }
    }
}

/// Alphabet position of the inverse letter.
fn inv(i: u8) -> u8 {
    i ^ 1
}

fn is_least_rotation(w: &[u8]) -> bool {
    let n = w.len();
    (1..n).all(|r| {
        for i in 0..n {
            let a = w[(r + i) % n];
            if a != w[i] {
                return a > w[i];
            }
        }
        true
    })
}

fn is_primitive_key(w: &[u8]) -> bool {
    let n = w.len();
    (1..n)
        .filter(|p| n.is_multiple_of(*p))
        .all(|p| (p..n).any(|i| w[i] != w[i - p]))
}

/// Canonical words of length `n` starting with letter `first`, lexicographically.
fn classes_from(rank: usize, n: usize, first: u8, primitive_only: bool) -> Vec<CyclicWord> {
    fn rec(
        rank: usize,
        n: usize,
        primitive_only: bool,
        cur: &mut Vec<u8>,
        out: &mut Vec<CyclicWord>,
    ) {
        let first = cur[0];
        if cur.len() == n {
            let last = cur[n - 1];
            if (n == 1 || last != inv(first))
                && is_least_rotation(cur)
                && (!primitive_only || is_primitive_key(cur))
            {
                out.push(CyclicWord::from_canonical_indices(rank, cur.clone()));
            }
            return;
        }
        let prev = cur[cur.len() - 1];
        // a letter smaller than the first would start a smaller rotation
        for x in first..(2 * rank) as u8 {
            if x == inv(prev) {
                continue;
            }
            cur.push(x);
            rec(rank, n, primitive_only, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, n, primitive_only, &mut vec![first], &mut out);
    out
}

/// Number of conjugacy classes of word length exactly `n`, from the necklace
/// count over closed walks of the coding: `tr Aⁿ = (2k−1)ⁿ + (k−1)(−1)ⁿ + k`.
pub fn class_count(rank: usize, n: usize, primitive_only: bool) -> u128 {
    if n == 0 {
        return 0;
    }
    let trace = |m: usize| -> i128 {
        let k = rank as i128;
        let sign = if m.is_multiple_of(2) { 1 } else { -1 };
        (2 * k - 1).pow(m as u32) + (k - 1) * sign + k
    };
    let total: i128 = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| {
            let weight = if primitive_only {
                mobius(n / d)
            } else {
                totient(n / d) as i128
            };
            weight * trace(d)
        })
        .sum();
    (total / n as i128) as u128
}

fn totient(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: usize) -> i128 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// All conjugacy classes of word length `1..=max_length`, ordered by length and
/// then lexicographically in the alphabet `a < A < b < B < …`.
pub fn enumerate_classes(
    rank: usize,
    max_length: usize,
    primitive_only: bool,
) -> Result<Vec<CyclicWord>> {
    enumerate_classes_with(
        rank,
        max_length,
        EnumerationOptions {
            primitive_only,
            ..Default::default()
        },
    )
}

pub fn enumerate_classes_with(
    rank: usize,
    max_length: usize,
    opts: EnumerationOptions,
) -> Result<Vec<CyclicWord>> {
    if !(2..=MAX_RANK).contains(&rank) {
        return Err(Error::InvalidRank(rank));
    }
    if max_length == 0 {
        return Ok(Vec::new());
    }
    let expected: u128 = (1..=max_length)
        .map(|n| class_count(rank, n, opts.primitive_only))
        .sum();
    if expected > opts.cap as u128 {
        return Err(Error::BudgetExceeded { cap: opts.cap });
    }
    let jobs: Vec<(usize, u8)> = (1..=max_length)
        .flat_map(|n| (0..(2 * rank) as u8).map(move |x| (n, x)))
        .collect();
    let run = |&(n, x): &(usize, u8)| classes_from(rank, n, x, opts.primitive_only);
    let parts: Vec<Vec<CyclicWord>> = if opts.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    Ok(parts.into_iter().flatten().collect())
}

/// The subshift whose cycles are the cyclically reduced words: states are the
/// `2k` letters, with an edge `x → y` unless `y = x⁻¹`.
pub fn free_group_coding(rank: usize) -> Result<SubshiftGraph> {
    if !(2..=MAX_RANK).contains(&rank) {
        return Err(Error::InvalidRank(rank));
    }
    let m = 2 * rank;
    let names: Vec<String> = (0..m)
        .map(|i| Word::new(rank, vec![letter_from_index(i)]).map(|w| w.to_string()))
        .collect::<Result<_>>()?;
    let edges: Vec<(&str, &str)> = (0..m)
        .flat_map(|x| (0..m).filter(move |&y| y != x ^ 1).map(move |y| (x, y)))
        .map(|(x, y)| (names[x].as_str(), names[y].as_str()))
        .collect();
    SubshiftGraph::new(
        &names.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges,
    )
}

/// The cycle of the coding that spells the class.
pub fn class_to_cycle(coding: &SubshiftGraph, c: &CyclicWord) -> Result<Cycle> {
    if coding.num_states() != 2 * c.rank() {
        return Err(Error::RankMismatch {
            expected: coding.num_states() / 2,
            got: c.rank(),
        });
    }
    let states: Vec<usize> = c.letter_indices().iter().map(|&i| usize::from(i)).collect();
    Cycle::from_states(coding, &states)
}

/// One line of the class-list export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub word: String,
    pub length: usize,
    pub primitive_flag: bool,
}

pub fn class_rows(classes: &[CyclicWord]) -> Vec<ClassRow> {
    classes
        .iter()
        .map(|c| ClassRow {
            word: c.to_string(),
            length: c.len(),
            primitive_flag: c.is_primitive(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::topological_entropy;

    #[test]
    fn small_ranks() {
        let one: Vec<String> = enumerate_classes(2, 1, false)
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(one, ["a", "A", "b", "B"]);
        let two = enumerate_classes(2, 2, false).unwrap();
        assert_eq!(two.len() - 4, 8);
        for n in 1..=8 {
            let direct = enumerate_classes(2, n, false)
                .unwrap()
                .iter()
                .filter(|c| c.len() == n)
                .count();
            assert_eq!(direct as u128, class_count(2, n, false), "n = {n}");
            let prim = enumerate_classes(2, n, true)
                .unwrap()
                .iter()
                .filter(|c| c.len() == n)
                .count();
            assert_eq!(prim as u128, class_count(2, n, true), "n = {n}");
        }
    }

    #[test]
    fn coding() {
        let g = free_group_coding(2).unwrap();
        assert_eq!((g.num_states(), g.num_edges()), (4, 12));
        assert!((topological_entropy(&g) - 3f64.ln()).abs() < 1e-12);
        assert_eq!(g.states(), ["a", "A", "b", "B"]);
        let ab = CyclicWord::parse(2, "ab").unwrap();
        assert_eq!(class_to_cycle(&g, &ab).unwrap().label(&g), "a->b->a");
        let g3 = free_group_coding(3).unwrap();
        assert!((topological_entropy(&g3) - 5f64.ln()).abs() < 1e-12);
        assert!(matches!(
            class_to_cycle(&g3, &ab),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let opts = EnumerationOptions {
            cap: 10,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_classes_with(2, 3, opts),
            Err(Error::BudgetExceeded { cap: 10 })
        ));
    }
}
