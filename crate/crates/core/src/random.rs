//! Seeded generators of test instances: irreducible graphs, potentials,
//! roofs, Schottky groups and reduced words.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::rep::{schottky_sl2, MatrixRep};
use crate::sft::{EdgePotential, RoofFunction, SubshiftGraph};
use crate::words::Word;

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A strongly connected graph on `n` states: a Hamiltonian cycle through a
/// random permutation plus every other transition with probability `density`.
pub fn irreducible_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Result<SubshiftGraph> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    for a in 0..n {
        for b in 0..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    SubshiftGraph::from_index_edges(n, &edges)
}

/// The full shift on `k` symbols.
pub fn full_shift(k: usize) -> Result<SubshiftGraph> {
    let edges: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
    SubshiftGraph::from_index_edges(k, &edges)
}

/// Edge values uniform in `[lo, hi)`.
pub fn potential<R: Rng>(
    rng: &mut R,
    g: &SubshiftGraph,
    lo: f64,
    hi: f64,
) -> Result<EdgePotential> {
    EdgePotential::new(
        g,
        (0..g.num_edges()).map(|_| rng.gen_range(lo..hi)).collect(),
    )
}

/// Roof values uniform in `[lo, hi)` with `lo > 0`.
pub fn roof<R: Rng>(rng: &mut R, g: &SubshiftGraph, lo: f64, hi: f64) -> Result<RoofFunction> {
    RoofFunction::new(potential(rng, g, lo, hi)?)
}

/// A state function `u` and its coboundary `u(j) − u(i)`.
pub fn coboundary<R: Rng>(rng: &mut R, g: &SubshiftGraph, scale: f64) -> Result<EdgePotential> {
    let u: Vec<f64> = (0..g.num_states())
        .map(|_| rng.gen_range(-scale..scale))
        .collect();
    EdgePotential::coboundary(g, &u)
}

/// A certified two-generator Schottky group in `SL(2, ℝ)`, conjugated by a
/// random matrix so that neither generator is diagonal.
pub fn schottky<R: Rng>(rng: &mut R) -> Result<MatrixRep> {
    loop {
        let t_a = rng.gen_range(2.0..4.0);
        let t_b = rng.gen_range(2.0..4.0);
        let theta = PI / 4.0 + rng.gen_range(-0.3..0.3);
        let s = schottky_sl2(t_a, t_b, theta)?;
        if s.certificate.passed {
            let p = DMatrix::from_fn(
                2,
                2,
                |i, j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.4..0.4),
            );
            return s.rep.conjugate(&p);
        }
    }
}

/// A reduced word of exactly `len` letters, built by rejecting backtracking.
pub fn reduced_word<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Result<Word> {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=rank as i32);
        let x = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last() != Some(&-x) {
            letters.push(x);
        }
    }
    Word::new(rank, letters)
}

/// A reduced word that is also cyclically reduced.
pub fn cyclically_reduced_word<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Result<Word> {
    loop {
        let w = reduced_word(rng, rank, len)?;
        let l = w.letters();
        if len <= 1 || l[0] != -l[len - 1] {
            return Ok(w);
        }
    }
}
