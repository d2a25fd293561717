use nalgebra::{DMatrix, DVector};

use super::projection::{ExteriorTower, JordanVector};
use crate::error::{Error, Result};
use crate::linalg::{eigen_moduli, singular_values, ScaledMatrix};
use crate::words::{canonical_class, letter_index, CyclicWord, Word, MAX_RANK};

/// Smallest accepted ratio `σ_min/σ_max` for a generator matrix.
pub const CONDITION_FLOOR: f64 = 1e-12;
/// Largest accepted `‖g·g⁻¹ − I‖ / (‖g‖‖g⁻¹‖)` for supplied inverses.
const INVERSE_CHECK: f64 = 1e-8;
/// Largest `|μ₂|/|μ₁|` for which the top eigenvalue is measured letter by letter.
const DOMINANCE: f64 = 0.5;
/// Passes of the letter-by-letter power iteration before giving up.
const CYCLIC_PASSES: usize = 8;
/// Relative agreement of consecutive passes that ends the iteration.
const CYCLIC_TOL: f64 = 1e-11;

/// A representation of the free group of rank `k` into `PGL(d, ℝ)`, given by
/// one invertible matrix per generator.
///
/// Generators are stored rescaled to `|det| = 1`; inverses and the exterior
/// powers of both are computed once at construction.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    dim: usize,
    /// Letter matrices in alphabet order `a, A, b, B, …`.
    letters: Vec<DMatrix<f64>>,
    /// Exterior towers of the letter matrices, same order.
    towers: Vec<ExteriorTower>,
    label: Option<String>,
}

fn normalize(m: &DMatrix<f64>, index: usize) -> Result<DMatrix<f64>> {
    let d = m.nrows();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularGenerator { index });
    }
    let sv = singular_values(m)?;
    if !(sv[d - 1] > CONDITION_FLOOR * sv[0]) {
        return Err(Error::SingularGenerator { index });
    }
    let det = m.clone().lu().determinant();
    Ok(m / det.abs().powf(1.0 / d as f64))
}

impl MatrixRep {
    pub fn new(generators: Vec<DMatrix<f64>>, label: Option<String>) -> Result<Self> {
        let rank = generators.len();
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::InvalidRank(rank));
        }
        let dim = generators[0].nrows();
        if dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: dim,
            });
        }
        let mut letters = Vec::with_capacity(2 * rank);
        for (index, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.nrows().max(g.ncols()),
                });
            }
            let g = normalize(g, index)?;
            let inv = g
                .clone()
                .try_inverse()
                .ok_or(Error::SingularGenerator { index })?;
            letters.push(g);
            letters.push(inv);
        }
        let towers = letters
            .iter()
            .map(|m| ExteriorTower::from_matrix(&ScaledMatrix::new(m.clone())))
            .collect();
        Ok(MatrixRep {
            dim,
            letters,
            towers,
            label,
        })
    }

    /// Builds a representation from generators given together with exact
    /// inverses and `log|det|`, bypassing the factorizations in [`MatrixRep::new`]
    /// that lose accuracy on ill-conditioned generators.
    pub(crate) fn from_letter_pairs(
        pairs: Vec<(DMatrix<f64>, DMatrix<f64>, f64)>,
        label: Option<String>,
    ) -> Result<Self> {
        let rank = pairs.len();
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::InvalidRank(rank));
        }
        let dim = pairs[0].0.nrows();
        let mut letters = Vec::with_capacity(2 * rank);
        let mut towers = Vec::with_capacity(2 * rank);
        for (index, (g, inv, log_det)) in pairs.into_iter().enumerate() {
            for m in [&g, &inv] {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.nrows().max(m.ncols()),
                    });
                }
            }
            let residual = (&g * &inv - DMatrix::identity(dim, dim)).amax();
            if !(log_det.is_finite() && residual <= INVERSE_CHECK * g.amax() * inv.amax()) {
                return Err(Error::SingularGenerator { index });
            }
            let c = (-log_det / dim as f64).exp();
            let (g, inv) = (g * c, inv / c);
            towers.push(ExteriorTower::from_pair(&g, &inv, 0.0));
            towers.push(ExteriorTower::from_pair(&inv, &g, 0.0));
            letters.push(g);
            letters.push(inv);
        }
        Ok(MatrixRep {
            dim,
            letters,
            towers,
            label,
        })
    }

    /// Builds a representation from letter matrices in the order generator,
    /// inverse, … together with towers computed by the caller, whose
    /// determinants must already be normalized.
    pub(crate) fn from_letter_towers(
        letters: Vec<(DMatrix<f64>, ExteriorTower)>,
        label: Option<String>,
    ) -> Result<Self> {
        let rank = letters.len() / 2;
        if rank == 0 || rank > MAX_RANK || !letters.len().is_multiple_of(2) {
            return Err(Error::InvalidRank(rank));
        }
        let dim = letters[0].0.nrows();
        let (letters, towers): (Vec<_>, Vec<_>) = letters.into_iter().unzip();
        Ok(MatrixRep {
            dim,
            letters,
            towers,
            label,
        })
    }

    pub fn rank(&self) -> usize {
        self.letters.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Normalized matrix of generator `i` (0-based).
    pub fn generator(&self, i: usize) -> &DMatrix<f64> {
        &self.letters[2 * i]
    }

    pub fn generators(&self) -> Vec<DMatrix<f64>> {
        (0..self.rank())
            .map(|i| self.generator(i).clone())
            .collect()
    }

    /// Matrix of a letter (`+i` generator, `−i` inverse).
    pub fn letter(&self, x: i32) -> &DMatrix<f64> {
        &self.letters[letter_index(x)]
    }

    pub(crate) fn letter_tower(&self, x: i32) -> &ExteriorTower {
        &self.towers[letter_index(x)]
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: rank,
            });
        }
        Ok(())
    }

    /// `ρ(w)` as a running product with power-of-two renormalization.
    pub fn evaluate_word(&self, w: &Word) -> Result<ScaledMatrix> {
        self.check_rank(w.rank())?;
        let mut acc = ScaledMatrix::identity(self.dim);
        for &x in w.letters() {
            acc = acc.mul(&ScaledMatrix::new(self.letter(x).clone()));
        }
        Ok(acc)
    }

    pub fn evaluate_class(&self, c: &CyclicWord) -> Result<ScaledMatrix> {
        self.evaluate_word(&c.to_word())
    }

    /// Exterior powers of `ρ(w)`, each multiplied out letter by letter so that
    /// the partial products of singular values and eigenvalues keep full
    /// relative precision.
    pub fn tower(&self, w: &Word) -> Result<ExteriorTower> {
        self.check_rank(w.rank())?;
        let mut acc = ExteriorTower::identity(self.dim);
        for &x in w.letters() {
            acc = acc.mul(self.letter_tower(x));
        }
        Ok(acc)
    }

    pub fn class_tower(&self, c: &CyclicWord) -> Result<ExteriorTower> {
        self.tower(&c.to_word())
    }

    /// Jordan projection of `ρ(w)`.
    ///
    /// The top eigenvalue of each exterior level is first located in the
    /// multiplied-out tower. When it dominates, its modulus is then measured
    /// by pushing the eigenvector through the letters one at a time: the dense
    /// product of a long word is close to rank one and its eigenvalue can be
    /// much smaller than its norm, which costs digits, while each letter is
    /// well conditioned.
    ///
    /// The word is first replaced by its cyclic reduction, which has the same
    /// eigenvalues. Pushing a vector through `u⁻¹` and then `u` would throw
    /// away exactly the component that `u` later expands.
    pub fn jordan(&self, w: &Word) -> Result<JordanVector> {
        self.check_rank(w.rank())?;
        let w = match canonical_class(w) {
            Ok(c) => c.to_word(),
            Err(Error::IdentityElement) => Word::identity(w.rank())?,
            Err(e) => return Err(e),
        };
        let w = &w;
        let tower = self.tower(w)?;
        let mut levels = 0..;
        let s = tower.partial_sums(|m| {
            let k = levels.next().unwrap_or(0) + 1;
            self.cyclic_radius(w, k, m)
        })?;
        Ok(JordanVector::from_partial_sums(&s))
    }

    pub fn jordan_class(&self, c: &CyclicWord) -> Result<JordanVector> {
        self.jordan(&c.to_word())
    }

    /// Spectral radius of level `k` of the tower of `w`, as a mantissa of `m`.
    fn cyclic_radius(&self, w: &Word, k: usize, m: &ScaledMatrix) -> Result<f64> {
        let moduli = eigen_moduli(m.matrix())?;
        let top = moduli[0];
        if moduli.len() < 2 || !(moduli[1] < DOMINANCE * top) || w.letters().is_empty() {
            return Ok(top);
        }
        let n = m.matrix().nrows();
        let start = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
        let mut v = m.matrix() * (m.matrix() * start);
        let mut previous = f64::NAN;
        for _ in 0..CYCLIC_PASSES {
            let norm = v.norm();
            if !(norm.is_finite() && norm > 0.0) {
                return Ok(top);
            }
            v /= norm;
            let mut growth = 0.0;
            for &x in w.letters().iter().rev() {
                let level = self.letter_tower(x).level(k);
                v = level.matrix() * &v;
                let norm = v.norm();
                if !(norm.is_finite() && norm > 0.0) {
                    return Ok(top);
                }
                growth += norm.ln() + level.log_scale();
                v /= norm;
            }
            // Rounding at each letter leaves a floor of a few ulps per letter
            // in the accumulated growth.
            if (growth - previous).abs() <= CYCLIC_TOL * growth.abs().max(1.0) {
                return Ok((growth - m.log_scale()).exp());
            }
            previous = growth;
        }
        Ok(top)
    }

    /// Applies `f` to every generator matrix and rebuilds the representation.
    pub fn map_generators(&self, f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Result<MatrixRep> {
        MatrixRep::new(
            (0..self.rank()).map(|i| f(self.generator(i))).collect(),
            self.label.clone(),
        )
    }

    /// `P ρ P⁻¹`.
    pub fn conjugate(&self, p: &DMatrix<f64>) -> Result<MatrixRep> {
        if p.nrows() != self.dim || p.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.nrows(),
            });
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or(Error::SingularGenerator { index: 0 })?;
        let pairs = (0..self.rank())
            .map(|i| {
                (
                    p * self.letter(i as i32 + 1) * &p_inv,
                    p * self.letter(-(i as i32 + 1)) * &p_inv,
                    0.0,
                )
            })
            .collect();
        Self::from_letter_pairs(pairs, self.label.clone())
    }
}

impl PartialEq for MatrixRep {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.letters == other.letters
    }
}
