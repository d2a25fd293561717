use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::entropy::entropy_from_table;
use super::lengths::length_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{exterior_power_derivative, top_eigen, ScaledMatrix};
use crate::rep::{LengthFunctional, RepFamily, LOXODROMIC_GAP};
use crate::words::{enumerate_classes, letter_index, CyclicWord};

/// Step of the central difference used when perturbation theory does not apply.
pub const FD_STEP: f64 = 1e-5;
/// Step of the central difference of the entropy along a family.
pub const ENTROPY_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthDerivative {
    pub value: f64,
    pub method: DerivativeMethod,
}

/// Velocities of the letters `a, A, b, B, …`: `V` for a generator `g` and
/// `−g⁻¹ V g⁻¹` for its inverse.
fn letter_velocities(family: &RepFamily) -> Vec<DMatrix<f64>> {
    let rep = family.base();
    let mut out = Vec::with_capacity(2 * rep.rank());
    for (i, v) in family.velocity().iter().enumerate() {
        let inv = rep.letter(-(i as i32 + 1));
        out.push(v.clone());
        out.push(-(inv * v * inv));
    }
    out
}

/// `d/ds L(ρ_s(γ))` at `s = 0` by first-order perturbation of the top
/// eigenvalue of every exterior power `Λᵏρ_s(γ)`.
fn analytic_derivative(
    family: &RepFamily,
    functional: &LengthFunctional,
    class: &CyclicWord,
) -> Result<f64> {
    let rep = family.base();
    let d = rep.dim();
    let letters = class.letters();
    let velocities = letter_velocities(family);
    let n = letters.len();
    let mut ds = vec![0.0; d + 1];
    for (k, slot) in ds.iter_mut().enumerate().take(d).skip(1) {
        let level = |x: i32| rep.letter_tower(x).level(k);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(ScaledMatrix::identity(level(letters[0]).dim()));
        for &x in &letters {
            let next = prefix.last().unwrap().mul(level(x));
            prefix.push(next);
        }
        let mut suffix = vec![ScaledMatrix::identity(level(letters[0]).dim()); n + 1];
        for j in (0..n).rev() {
            suffix[j] = level(letters[j]).mul(&suffix[j + 1]);
        }
        let terms: Vec<ScaledMatrix> = letters
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let dm = exterior_power_derivative(rep.letter(x), &velocities[letter_index(x)], k);
                prefix[j].mul(&ScaledMatrix::new(dm)).mul(&suffix[j + 1])
            })
            .collect();
        let a = &prefix[n];
        let top = top_eigen(a.matrix(), LOXODROMIC_GAP)?;
        let pairing = top.left.dot(&top.right);
        if !(pairing.abs() > 0.0) {
            return Err(Error::NonSimpleEigenvalue { gap: top.gap });
        }
        *slot = match ScaledMatrix::sum(&terms) {
            Some(da) => {
                let num = top.left.dot(&(da.matrix() * &top.right));
                num / (top.value * pairing) * (da.log_scale() - a.log_scale()).exp()
            }
            None => 0.0,
        };
    }
    let mut log_det = 0.0;
    for &x in &letters {
        let inv = rep.letter(-x);
        log_det += (inv * &velocities[letter_index(x)]).trace();
    }
    ds[d] = log_det;
    let shift = log_det / d as f64;
    let dlambda: Vec<f64> = (1..=d).map(|i| ds[i] - ds[i - 1] - shift).collect();
    Ok(functional.eval_values(&dlambda))
}

fn class_length(
    family: &RepFamily,
    functional: &LengthFunctional,
    class: &CyclicWord,
    s: f64,
) -> Result<f64> {
    functional.eval(&family.at(s)?.jordan_class(class)?)
}

/// `d/ds|₀ φ(λ(ρ_s(γ)))`. Falls back to a central difference with step
/// [`FD_STEP`] when some exterior power has a non-simple top eigenvalue.
pub fn length_derivative(
    family: &RepFamily,
    functional: &LengthFunctional,
    class: &CyclicWord,
) -> Result<LengthDerivative> {
    if functional.dim() != family.base().dim() {
        return Err(Error::DimensionMismatch {
            expected: family.base().dim(),
            got: functional.dim(),
        });
    }
    if class.rank() != family.base().rank() {
        return Err(Error::RankMismatch {
            expected: family.base().rank(),
            got: class.rank(),
        });
    }
    match analytic_derivative(family, functional, class) {
        Ok(value) => Ok(LengthDerivative {
            value,
            method: DerivativeMethod::Analytic,
        }),
        Err(Error::NonSimpleEigenvalue { .. }) => {
            let plus = class_length(family, functional, class, FD_STEP)?;
            let minus = class_length(family, functional, class, -FD_STEP)?;
            Ok(LengthDerivative {
                value: (plus - minus) / (2.0 * FD_STEP),
                method: DerivativeMethod::FiniteDifference,
            })
        }
        Err(e) => Err(e),
    }
}

/// `‖v‖ = h′/h + max L′/L` over the primitive classes up to the cutoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinslerReport {
    pub value: f64,
    pub maximizing_class: String,
    pub cutoff: usize,
    pub h: f64,
    pub h_stderr: f64,
    pub h_prime: f64,
    /// Entropy step actually used, shrunk to fit the family's interval.
    pub entropy_step: f64,
    /// `max L′/L`.
    pub length_term: f64,
    /// Uncertainty of `h′/h` propagated from the three entropy standard errors.
    pub tolerance: f64,
    /// Classes whose derivative needed the finite-difference fallback.
    pub fd_fallbacks: usize,
    pub entropy_unstable: bool,
}

pub fn finsler_norm_reps(
    family: &RepFamily,
    functional: &LengthFunctional,
    cutoff: usize,
) -> Result<FinslerReport> {
    let base = family.base();
    let classes = enumerate_classes(base.rank(), cutoff, false)?;
    let table = length_spectrum(base, functional, &classes)?;
    let e0 = entropy_from_table(&table)?;
    let (lo, hi) = family.interval();
    let step = ENTROPY_STEP.min(-lo / 2.0).min(hi / 2.0);
    let ep = entropy_from_table(&length_spectrum(&family.at(step)?, functional, &classes)?)?;
    let em = entropy_from_table(&length_spectrum(&family.at(-step)?, functional, &classes)?)?;
    let h = e0.value;
    let h_prime = (ep.value - em.value) / (2.0 * step);

    let derivatives = table
        .entries()
        .par_iter()
        .filter(|e| e.class.is_primitive())
        .map(|e| Ok((e, length_derivative(family, functional, &e.class)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(&CyclicWord, f64)> = None;
    for (e, dl) in &derivatives {
        let r = dl.value / e.length;
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((&e.class, r));
        }
    }
    let (class, length_term) =
        best.ok_or_else(|| Error::InsufficientData("no primitive classes".into()))?;
    let fd_fallbacks = derivatives
        .iter()
        .filter(|(_, dl)| dl.method == DerivativeMethod::FiniteDifference)
        .count();
    let tolerance =
        (ep.stderr + em.stderr) / (2.0 * step * h) + h_prime.abs() * e0.stderr / (h * h);
    Ok(FinslerReport {
        value: h_prime / h + length_term,
        maximizing_class: class.to_string(),
        cutoff,
        h,
        h_stderr: e0.stderr,
        h_prime,
        entropy_step: step,
        length_term,
        tolerance,
        fd_fallbacks,
        entropy_unstable: e0.unstable || ep.unstable || em.unstable,
    })
}
