use nalgebra::DMatrix;

use super::matrixrep::MatrixRep;
use super::projection::{ExteriorTower, LOXODROMIC_GAP};
use crate::error::{Error, Result};
use crate::linalg::{
    ordered_schur_vectors_by, orthonormalize, singular_values, wedge_columns, ScaledMatrix,
};
use crate::words::{CyclicWord, Word};

/// A full flag `V₁ ⊂ V₂ ⊂ … ⊂ ℝ^d`, stored as an orthonormal frame whose
/// first `i` columns span `Vᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    frame: DMatrix<f64>,
}

impl Flag {
    /// Flag spanned by the columns of an invertible matrix, in order.
    pub fn from_columns(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let q = orthonormalize(m);
        if q.column_iter().any(|c| !(c.norm() > 0.5)) {
            return Err(Error::SingularGenerator { index: 0 });
        }
        Ok(Flag { frame: q })
    }

    pub fn standard(d: usize) -> Self {
        Flag {
            frame: DMatrix::identity(d, d),
        }
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    /// `g·F`.
    pub fn act(&self, g: &ScaledMatrix) -> Result<Flag> {
        Flag::from_columns(&(g.matrix() * &self.frame))
    }

    /// Largest sine of a principal angle between `Vᵢ` and `Wᵢ` over `1 ≤ i < d`.
    pub fn distance(&self, other: &Flag) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 1..d {
            let a = self.frame.columns(0, i);
            let b = other.frame.columns(0, i);
            let residual = b - a * (a.transpose() * b);
            let s = singular_values(&residual.into_owned())
                .map(|v| v[0])
                .unwrap_or(f64::INFINITY);
            worst = worst.max(s);
        }
        worst
    }

    /// Distance from `g·F` to `F`; zero exactly when `g` preserves the flag.
    pub fn invariance_residual(&self, g: &ScaledMatrix) -> f64 {
        self.act(g)
            .map(|h| h.distance(self))
            .unwrap_or(f64::INFINITY)
    }
}

/// Flag of eigenspaces ordered by decreasing modulus, from a reordered real
/// Schur decomposition. Requires all Jordan gaps above [`LOXODROMIC_GAP`].
pub fn attracting_flag(m: &ScaledMatrix) -> Result<Flag> {
    Ok(Flag {
        frame: ordered_schur_vectors_by(m.matrix(), LOXODROMIC_GAP, true)?,
    })
}

/// Flag of eigenspaces ordered by increasing modulus.
pub fn repelling_flag(m: &ScaledMatrix) -> Result<Flag> {
    Ok(Flag {
        frame: ordered_schur_vectors_by(m.matrix(), LOXODROMIC_GAP, false)?,
    })
}

/// The limit map at the periodic boundary point `u·c^∞`: `ρ(u)` applied to
/// the attracting flag of `ρ(c)`.
pub fn limit_map_periodic(rep: &MatrixRep, c: &CyclicWord, u: &Word) -> Result<Flag> {
    word_attracting_flag(rep, &c.to_word())?.act(&rep.evaluate_word(u)?)
}

/// Passes of the letter-by-letter orthogonal iteration in [`word_attracting_flag`].
const FLAG_PASSES: usize = 64;
/// Flag distance between consecutive passes that ends the iteration.
const FLAG_TOL: f64 = 1e-14;

/// Orthonormal frame of `letter · frame`, with column signs fixed so the
/// triangular factor has a positive diagonal.
fn qr_step(letter: &DMatrix<f64>, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = (letter * frame).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for i in 0..r.nrows() {
        let rii = r[(i, i)];
        if !(rii.abs() > 0.0 && rii.is_finite()) {
            return Err(Error::EigenFailure);
        }
        if rii < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    Ok(q)
}

/// One pass of `ρ(w)` over a frame, applying the letters right to left.
fn flag_pass(rep: &MatrixRep, w: &Word, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = frame.clone();
    for &x in w.letters().iter().rev() {
        q = qr_step(rep.letter(x), &q)?;
    }
    Ok(q)
}

/// Attracting flag of `ρ(w)` by orthogonal iteration through the letters.
///
/// The dense product of a long word spreads its eigenvalues over more
/// orders of magnitude than a double holds, so its Schur vectors lose the
/// lower part of the flag. Each letter is well conditioned, and iterating
/// the word one letter at a time recovers the whole flag. The Schur flag of
/// the product, when available, is the starting point.
pub fn word_attracting_flag(rep: &MatrixRep, w: &Word) -> Result<Flag> {
    let lambda = rep.jordan(w)?;
    if !lambda.is_loxodromic() {
        return Err(Error::NonLoxodromic {
            gap: lambda.min_gap(),
        });
    }
    let mut flag = match attracting_flag(&rep.evaluate_word(w)?) {
        Ok(f) => f,
        Err(_) => Flag::standard(rep.dim()),
    };
    for _ in 0..FLAG_PASSES {
        let next = Flag {
            frame: flag_pass(rep, w, &flag.frame)?,
        };
        let moved = next.distance(&flag);
        flag = next;
        if moved <= FLAG_TOL {
            break;
        }
    }
    Ok(flag)
}

/// Busemann–Iwasawa cocycle in Jordan coordinates: with
/// `pᵢ = log‖Λⁱg (v₁∧…∧vᵢ)‖` for the orthonormal frame of `F`, returns
/// `pᵢ − pᵢ₋₁` shifted to sum zero. Entries follow the flag order, unsorted.
pub fn busemann_cocycle(g: &ScaledMatrix, flag: &Flag) -> Result<Vec<f64>> {
    busemann_from_tower(&ExteriorTower::from_matrix(g), flag)
}

pub fn busemann_from_tower(t: &ExteriorTower, flag: &Flag) -> Result<Vec<f64>> {
    let d = flag.dim();
    if t.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: d,
        });
    }
    let mut p = Vec::with_capacity(d + 1);
    p.push(0.0);
    for k in 1..d {
        let w = wedge_columns(flag.frame(), k);
        let level = t.level(k);
        let image = level.matrix() * &w;
        let norm = image.norm() / w.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::EigenFailure);
        }
        p.push(norm.ln() + level.log_scale());
    }
    p.push(t.log_det());
    let shift = t.log_det() / d as f64;
    Ok(p.windows(2).map(|w| w[1] - w[0] - shift).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn diagonal_flag_is_standard() {
        let g = ScaledMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            3.0, 2.0, 1.0,
        ])));
        let f = attracting_flag(&g).unwrap();
        assert!(f.distance(&Flag::standard(3)) < 1e-15);
        let r = repelling_flag(&g).unwrap();
        let reversed = Flag::from_columns(&DMatrix::from_row_slice(
            3,
            3,
            &[0., 0., 1., 0., 1., 0., 1., 0., 0.],
        ))
        .unwrap();
        assert!(r.distance(&reversed) < 1e-15);
    }

    #[test]
    fn cocycle_of_identity_vanishes() {
        let f = Flag::from_columns(&DMatrix::from_row_slice(
            3,
            3,
            &[1., 2., 0., 0., 1., 1., 1., 0., 3.],
        ))
        .unwrap();
        let s = busemann_cocycle(&ScaledMatrix::identity(3), &f).unwrap();
        assert!(s.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn elliptic_has_no_flag() {
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        let g = ScaledMatrix::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]));
        assert!(matches!(
            attracting_flag(&g),
            Err(Error::NonLoxodromic { .. })
        ));
    }
}
