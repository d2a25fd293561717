use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rep::{LengthFunctional, MatrixRep};
use crate::words::CyclicWord;

/// Lengths at or below this value are rejected as non-positive.
pub const LENGTH_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LengthEntry {
    pub class: CyclicWord,
    pub length: f64,
}

/// One CSV row of a length table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthRow {
    pub class: String,
    pub word_length: usize,
    pub primitive: bool,
    pub length: f64,
}

/// The marked length spectrum `[γ] ↦ L(γ)` on a finite set of classes, in
/// enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthTable {
    entries: Vec<LengthEntry>,
    cutoff: usize,
    functional: String,
    label: Option<String>,
}

impl LengthTable {
    /// Validates positivity; the cutoff is the largest word length present.
    pub fn new(
        entries: Vec<LengthEntry>,
        functional: impl Into<String>,
        label: Option<String>,
    ) -> Result<Self> {
        for e in &entries {
            if !(e.length > LENGTH_FLOOR && e.length.is_finite()) {
                return Err(Error::NonPositiveLength {
                    class: e.class.to_string(),
                    value: e.length,
                });
            }
        }
        let cutoff = entries.iter().map(|e| e.class.len()).max().unwrap_or(0);
        Ok(LengthTable {
            entries,
            cutoff,
            functional: functional.into(),
            label,
        })
    }

    /// `L(γ) = c·|γ|`: the periods of the free group coding under the constant
    /// roof `c`, whose entropy is `log(2k − 1)/c`.
    pub fn word_length(classes: &[CyclicWord], c: f64) -> Result<Self> {
        let entries = classes
            .iter()
            .map(|k| LengthEntry {
                class: k.clone(),
                length: c * k.len() as f64,
            })
            .collect();
        Self::new(entries, format!("word_length*{c}"), None)
    }

    pub fn entries(&self) -> &[LengthEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn functional(&self) -> &str {
        &self.functional
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.length).collect()
    }

    pub fn get(&self, class: &CyclicWord) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| &e.class == class)
            .map(|e| e.length)
    }

    /// Entries with word length at most `cutoff`, keeping metadata.
    pub fn restrict(&self, cutoff: usize) -> LengthTable {
        let entries: Vec<LengthEntry> = self
            .entries
            .iter()
            .filter(|e| e.class.len() <= cutoff)
            .cloned()
            .collect();
        let cutoff = entries.iter().map(|e| e.class.len()).max().unwrap_or(0);
        LengthTable {
            entries,
            cutoff,
            functional: self.functional.clone(),
            label: self.label.clone(),
        }
    }

    pub fn primitive_only(&self) -> LengthTable {
        LengthTable {
            entries: self
                .entries
                .iter()
                .filter(|e| e.class.is_primitive())
                .cloned()
                .collect(),
            cutoff: self.cutoff,
            functional: self.functional.clone(),
            label: self.label.clone(),
        }
    }

    pub fn rows(&self) -> Vec<LengthRow> {
        self.entries
            .iter()
            .map(|e| LengthRow {
                class: e.class.to_string(),
                word_length: e.class.len(),
                primitive: e.class.is_primitive(),
                length: e.length,
            })
            .collect()
    }
}

/// `L(γ) = φ(λ(ρ(γ)))` for every class, computed in parallel.
pub fn length_spectrum(
    rep: &MatrixRep,
    functional: &LengthFunctional,
    classes: &[CyclicWord],
) -> Result<LengthTable> {
    if functional.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            got: functional.dim(),
        });
    }
    let entries = classes
        .par_iter()
        .map(|c| {
            let lambda = rep.jordan_class(c)?;
            Ok(LengthEntry {
                class: c.clone(),
                length: functional.eval(&lambda)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LengthTable::new(
        entries,
        functional.describe(),
        rep.label().map(str::to_string),
    )
}
