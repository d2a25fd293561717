use serde::Serialize;

use super::entropy::{entropy_from_table, EntropyEstimate};
use super::lengths::{length_spectrum, LengthTable};
use crate::error::{Error, Result};
use crate::rep::{LengthFunctional, MatrixRep};
use crate::words::enumerate_classes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub cutoff: usize,
    pub value: f64,
}

/// `d(ρ₁, ρ₂) = log(h₂/h₁) + log max L₂/L₁` over the enumerated classes.
///
/// The maximum over a finite set of classes is a lower bound for the
/// supremum over all classes; the trace records how it grows with the cutoff
/// while both entropies stay fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepDistanceReport {
    pub value: f64,
    pub maximizing_class: String,
    pub cutoff: usize,
    pub h1: f64,
    pub h2: f64,
    pub h1_stderr: f64,
    pub h2_stderr: f64,
    pub trace: Vec<TracePoint>,
    /// `max L₂/L₁` at the full cutoff.
    pub length_ratio: f64,
    /// `d(ρ₂, ρ₁)` on the same data.
    pub reverse_value: f64,
    /// `d(ρ₁, ρ₂) + d(ρ₂, ρ₁)`, nonnegative up to rounding.
    pub symmetric_sum: f64,
    /// Always true: the value bounds the distance from below.
    pub lower_bound: bool,
    /// One of the entropy estimates has window halves disagreeing by more than 10%.
    pub entropy_unstable: bool,
    pub functional: String,
}

/// First class attaining the largest `num/den`, with that ratio.
fn max_ratio(num: &LengthTable, den: &LengthTable, cutoff: usize) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (a, b)) in num.entries().iter().zip(den.entries()).enumerate() {
        if a.class.len() > cutoff {
            continue;
        }
        let r = a.length / b.length;
        if r > best.1 {
            best = (i, r);
        }
    }
    best
}

/// Distance between two length tables over the same classes in the same order.
pub fn dth_tables(t1: &LengthTable, t2: &LengthTable) -> Result<RepDistanceReport> {
    if t1.len() != t2.len() {
        return Err(Error::DimensionMismatch {
            expected: t1.len(),
            got: t2.len(),
        });
    }
    if let Some(e) = t1
        .entries()
        .iter()
        .zip(t2.entries())
        .find(|(a, b)| a.class != b.class)
    {
        return Err(Error::Parse(format!(
            "length tables disagree at class {}",
            e.0.class
        )));
    }
    let e1 = entropy_from_table(t1)?;
    let e2 = entropy_from_table(t2)?;
    dth_with_entropies(t1, t2, &e1, &e2)
}

pub(crate) fn dth_with_entropies(
    t1: &LengthTable,
    t2: &LengthTable,
    e1: &EntropyEstimate,
    e2: &EntropyEstimate,
) -> Result<RepDistanceReport> {
    if t1.is_empty() {
        return Err(Error::InsufficientData("no classes to compare".into()));
    }
    let entropy_term = (e2.value / e1.value).ln();
    let cutoff = t1.cutoff();
    let (arg, ratio) = max_ratio(t2, t1, cutoff);
    let (_, reverse_ratio) = max_ratio(t1, t2, cutoff);
    let value = entropy_term + ratio.ln();
    let reverse_value = -entropy_term + reverse_ratio.ln();
    let trace = (1..=cutoff)
        .map(|n| {
            let (_, r) = max_ratio(t2, t1, n);
            TracePoint {
                cutoff: n,
                value: if r.is_finite() {
                    entropy_term + r.ln()
                } else {
                    f64::NAN
                },
            }
        })
        .filter(|p| !p.value.is_nan())
        .collect();
    Ok(RepDistanceReport {
        value,
        maximizing_class: t1.entries()[arg].class.to_string(),
        cutoff,
        h1: e1.value,
        h2: e2.value,
        h1_stderr: e1.stderr,
        h2_stderr: e2.stderr,
        trace,
        length_ratio: ratio,
        reverse_value,
        symmetric_sum: value + reverse_value,
        lower_bound: true,
        entropy_unstable: e1.unstable || e2.unstable,
        functional: t1.functional().to_string(),
    })
}

/// Enumerates every class up to `cutoff` and compares the two spectra.
pub fn dth_reps(
    rep1: &MatrixRep,
    rep2: &MatrixRep,
    functional: &LengthFunctional,
    cutoff: usize,
) -> Result<RepDistanceReport> {
    if rep1.rank() != rep2.rank() {
        return Err(Error::RankMismatch {
            expected: rep1.rank(),
            got: rep2.rank(),
        });
    }
    let classes = enumerate_classes(rep1.rank(), cutoff, false)?;
    let t1 = length_spectrum(rep1, functional, &classes)?;
    let t2 = length_spectrum(rep2, functional, &classes)?;
    dth_tables(&t1, &t2)
}
