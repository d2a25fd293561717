use serde::Serialize;

use super::lengths::{length_spectrum, LengthTable};
use crate::error::{Error, Result};
use crate::rep::{LengthFunctional, MatrixRep};
use crate::words::enumerate_classes;

/// Smallest class count required at the lower end of the regression window.
pub const MIN_WINDOW_COUNT: usize = 100;
/// Relative tolerance under which two lengths count as the same atom.
const ATOM_TOL: f64 = 1e-9;
/// Largest number of distinct lengths handled exactly.
const MAX_ATOMS: usize = 64;
/// Smallest mean number of classes per atom for the exact counting function.
const MIN_ATOM_MULTIPLICITY: usize = 16;
/// Grid size of the smoothed counting function.
const GRID_POINTS: usize = 64;
/// Kernel width of the smoothed counting function as a fraction of the window.
/// Smoothing `e^{ht}` with a symmetric kernel rescales it without changing
/// its growth rate, while a wide kernel keeps the estimate smooth in the lengths.
const BANDWIDTH_FRACTION: f64 = 0.125;
/// Relative slope disagreement between window halves that marks an estimate unstable.
const HALF_SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// Few distinct lengths, each shared by many classes: the exact counting
    /// function sampled at each atom.
    Atoms,
    /// Many distinct lengths: a counting function smoothed over one grid cell.
    Smoothed,
}

/// Growth rate `h` of `N(t) = #{[γ] : L(γ) ≤ t}` from a least-squares fit of
/// `log(t·N(t))` against `t` on the upper half `[t_max/2, t_max]` of the data.
///
/// `t_max` is the cutoff times the smallest ratio of length to word length
/// in the table. The shortest class of a given word length does not grow
/// monotonically (even lengths admit short powers that odd lengths lack), so
/// the smallest ratio is what bounds the unseen classes from below.
/// The factor `t` removes the `1/(ht)` prefactor of the prime orbit theorem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub stderr: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// `(t, N(t))` at the sampled thresholds, nondecreasing in both.
    pub samples: Vec<(f64, f64)>,
    pub mode: EstimatorMode,
    /// Slopes fitted separately on the lower and upper halves of the samples.
    pub half_slopes: (f64, f64),
    /// The half slopes differ by more than 10% of the estimate.
    pub unstable: bool,
}

/// Least squares with the standard error of the slope.
fn regression(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let (slope, intercept) = crate::rep::least_squares(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, stderr))
}

/// Twice continuously differentiable step from 0 to 1 on `[0, 1]`.
fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

/// Number of sorted values at most `t`.
fn count_le(sorted: &[f64], t: f64) -> usize {
    sorted.partition_point(|&x| x <= t)
}

pub fn entropy_from_table(table: &LengthTable) -> Result<EntropyEstimate> {
    let cutoff = table.cutoff();
    let t_max = cutoff as f64
        * table
            .entries()
            .iter()
            .map(|e| e.length / e.class.len() as f64)
            .fold(f64::INFINITY, f64::min);
    if !t_max.is_finite() {
        return Err(Error::InsufficientData("length table is empty".into()));
    }
    let mut sorted = table.lengths();
    sorted.sort_by(f64::total_cmp);
    let mut t_min = t_max / 2.0;
    if count_le(&sorted, t_min * (1.0 + ATOM_TOL)) < MIN_WINDOW_COUNT {
        t_min = match sorted.get(MIN_WINDOW_COUNT - 1) {
            Some(&t) => t,
            None => {
                return Err(Error::InsufficientData(format!(
                    "{} classes, need at least {MIN_WINDOW_COUNT}",
                    sorted.len()
                )))
            }
        };
    }
    if !(t_min < t_max * (1.0 - ATOM_TOL)) {
        return Err(Error::InsufficientData(format!(
            "fewer than {MIN_WINDOW_COUNT} classes below the completeness threshold {t_max}"
        )));
    }

    let lo = t_min * (1.0 - ATOM_TOL);
    let hi = t_max * (1.0 + ATOM_TOL);
    let window = &sorted[sorted.partition_point(|&x| x < lo)..count_le(&sorted, hi)];
    let mut atoms: Vec<f64> = Vec::new();
    for &x in window {
        match atoms.last_mut() {
            Some(last) if x - *last <= ATOM_TOL * x.abs() => *last = x,
            _ => atoms.push(x),
        }
        if atoms.len() > MAX_ATOMS {
            break;
        }
    }
    let lattice = atoms.len() >= 3
        && atoms.len() <= MAX_ATOMS
        && window.len() >= MIN_ATOM_MULTIPLICITY * atoms.len();
    let (mode, samples) = if lattice {
        let samples: Vec<(f64, f64)> = atoms
            .iter()
            .map(|&t| (t, count_le(&sorted, t) as f64))
            .collect();
        (EstimatorMode::Atoms, samples)
    } else {
        // The kernel support stays inside the window, where the data is complete.
        let width = BANDWIDTH_FRACTION * (t_max - t_min);
        let step = (t_max - t_min - width) / (GRID_POINTS - 1) as f64;
        let samples: Vec<(f64, f64)> = (0..GRID_POINTS)
            .map(|j| {
                let t = t_min + width / 2.0 + j as f64 * step;
                let below = count_le(&sorted, t - width / 2.0);
                let above = count_le(&sorted, t + width / 2.0);
                let partial: f64 = sorted[below..above]
                    .iter()
                    .map(|&x| smootherstep((t - x) / width + 0.5))
                    .sum();
                (t, below as f64 + partial)
            })
            .collect();
        (EstimatorMode::Smoothed, samples)
    };

    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .map(|&(t, n): &(f64, f64)| (t, (t * n).ln()))
        .unzip();
    let (value, stderr) = regression(&xs, &ys)
        .ok_or_else(|| Error::InsufficientData("degenerate regression window".into()))?;
    if !(value > 0.0) {
        return Err(Error::InsufficientData(format!(
            "counting function does not grow (slope {value})"
        )));
    }
    let half = xs.len() / 2;
    let half_slopes = if half >= 2 && xs.len() - half >= 2 {
        let a = regression(&xs[..half], &ys[..half]).map_or(value, |r| r.0);
        let b = regression(&xs[half..], &ys[half..]).map_or(value, |r| r.0);
        (a, b)
    } else {
        (value, value)
    };
    let unstable = (half_slopes.0 - half_slopes.1).abs() > HALF_SLOPE_TOL * value;
    Ok(EntropyEstimate {
        value,
        stderr,
        t_min,
        t_max,
        samples,
        mode,
        half_slopes,
        unstable,
    })
}

/// Enumerates every class up to `cutoff` and estimates the `φ`-entropy of `ρ`.
pub fn entropy_estimate(
    rep: &MatrixRep,
    functional: &LengthFunctional,
    cutoff: usize,
) -> Result<EntropyEstimate> {
    let classes = enumerate_classes(rep.rank(), cutoff, false)?;
    entropy_from_table(&length_spectrum(rep, functional, &classes)?)
}
