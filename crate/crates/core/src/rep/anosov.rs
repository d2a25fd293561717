use rayon::prelude::*;
use serde::Serialize;

use super::matrixrep::MatrixRep;
use super::projection::cartan_from_tower;
use crate::error::{Error, Result};
use crate::words::CyclicWord;

/// Slope at or below which a root is reported as not growing.
pub const ANOSOV_SLOPE_FLOOR: f64 = 1e-6;

/// Growth of one simple root of the Cartan projection against word length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootGrowth {
    /// Root index `i` of `αᵢ = μᵢ − μᵢ₊₁`, starting at 1.
    pub root: usize,
    pub slope: f64,
    pub intercept: f64,
    /// `min αᵢ(μ(ρ(γ))) / |γ|` over the sample.
    pub min_ratio: f64,
}

/// Empirical Anosov diagnostic: least-squares fits of `αᵢ(μ(ρ(γ)))` against `|γ|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnosovReport {
    pub roots: Vec<RootGrowth>,
    pub classes: usize,
    /// Some root has slope at most [`ANOSOV_SLOPE_FLOOR`].
    pub not_anosov: bool,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub fn anosov_gap_report(rep: &MatrixRep, classes: &[CyclicWord]) -> Result<AnosovReport> {
    if classes.is_empty() {
        return Err(Error::InsufficientData("empty class sample".into()));
    }
    let roots: Vec<Vec<f64>> = classes
        .par_iter()
        .map(|c| Ok(cartan_from_tower(&rep.class_tower(c)?)?.roots()))
        .collect::<Result<_>>()?;
    let lengths: Vec<f64> = classes.iter().map(|c| c.len() as f64).collect();
    let d = rep.dim();
    let mut out = Vec::with_capacity(d - 1);
    for i in 0..d - 1 {
        let ys: Vec<f64> = roots.iter().map(|r| r[i]).collect();
        let (slope, intercept) = least_squares(&lengths, &ys).ok_or_else(|| {
            Error::InsufficientData("all sampled classes have the same length".into())
        })?;
        let min_ratio = ys
            .iter()
            .zip(&lengths)
            .map(|(y, l)| y / l)
            .fold(f64::INFINITY, f64::min);
        out.push(RootGrowth {
            root: i + 1,
            slope,
            intercept,
            min_ratio,
        });
    }
    let not_anosov = out.iter().any(|r| r.slope <= ANOSOV_SLOPE_FLOOR);
    Ok(AnosovReport {
        roots: out,
        classes: classes.len(),
        not_anosov,
    })
}
