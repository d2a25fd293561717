use serde::Serialize;

use crate::error::{Error, Result};
use nalgebra::DMatrix;

use crate::linalg::{
    exterior_power, exterior_power_from_inverse, singular_values, spectral_radius, ScaledMatrix,
};

/// Smallest gap `λᵢ − λᵢ₊₁` for which an element counts as loxodromic.
pub const LOXODROMIC_GAP: f64 = 1e-8;

/// The exterior powers `Λ¹g, …, Λ^{d−1}g` of a matrix together with `log|det g|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorTower {
    dim: usize,
    /// `levels[k-1] = Λᵏ g`.
    levels: Vec<ScaledMatrix>,
    log_det: f64,
}

impl ExteriorTower {
    pub fn identity(dim: usize) -> Self {
        let levels = (1..dim)
            .map(|k| ScaledMatrix::identity(crate::linalg::combinations(dim, k).len()))
            .collect();
        ExteriorTower {
            dim,
            levels,
            log_det: 0.0,
        }
    }

    /// Tower of a single matrix. The determinant is taken from `m` itself, so
    /// for long words prefer [`MatrixRep::tower`](super::MatrixRep::tower),
    /// which multiplies the towers of the letters and stays exact.
    pub fn from_matrix(m: &ScaledMatrix) -> Self {
        let dim = m.dim();
        let mant = m.matrix();
        let levels = (1..dim)
            .map(|k| ScaledMatrix::with_scale(exterior_power(mant, k), k as f64 * m.log_scale()))
            .collect();
        let det = mant.clone().lu().determinant();
        ExteriorTower {
            dim,
            levels,
            log_det: det.abs().ln() + dim as f64 * m.log_scale(),
        }
    }

    /// Tower of a matrix with a known inverse and `log|det|`. Levels above
    /// half the dimension come from the inverse, which keeps every minor small.
    pub(crate) fn from_pair(g: &DMatrix<f64>, inv: &DMatrix<f64>, log_det: f64) -> Self {
        let dim = g.nrows();
        let det = log_det.exp();
        let levels = (1..dim)
            .map(|k| {
                ScaledMatrix::new(if 2 * k <= dim {
                    exterior_power(g, k)
                } else {
                    exterior_power_from_inverse(inv, det, k)
                })
            })
            .collect();
        ExteriorTower {
            dim,
            levels,
            log_det,
        }
    }

    /// Tower assembled from precomputed exterior powers `Λ¹, …, Λ^{d−1}`.
    pub(crate) fn from_levels(dim: usize, levels: Vec<ScaledMatrix>, log_det: f64) -> Self {
        debug_assert_eq!(levels.len(), dim - 1);
        ExteriorTower {
            dim,
            levels,
            log_det,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Λᵏ g` for `1 ≤ k < d`.
    pub fn level(&self, k: usize) -> &ScaledMatrix {
        &self.levels[k - 1]
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn mul(&self, rhs: &ExteriorTower) -> ExteriorTower {
        ExteriorTower {
            dim: self.dim,
            levels: self
                .levels
                .iter()
                .zip(&rhs.levels)
                .map(|(a, b)| a.mul(b))
                .collect(),
            log_det: self.log_det + rhs.log_det,
        }
    }

    pub(crate) fn partial_sums(
        &self,
        mut top: impl FnMut(&ScaledMatrix) -> Result<f64>,
    ) -> Result<Vec<f64>> {
        let mut s = Vec::with_capacity(self.dim + 1);
        s.push(0.0);
        for level in &self.levels {
            let t = top(level)?;
            if !(t > 0.0) {
                return Err(Error::EigenFailure);
            }
            s.push(t.ln() + level.log_scale());
        }
        if !self.log_det.is_finite() {
            return Err(Error::EigenFailure);
        }
        s.push(self.log_det);
        Ok(s)
    }
}

/// Jordan or Cartan coordinates: `d` reals, nonincreasing, summing to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct JordanVector(Vec<f64>);

impl JordanVector {
    /// Sorts and removes the mean.
    pub fn new(mut values: Vec<f64>) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.iter_mut().for_each(|v| *v -= mean);
        values.sort_by(|a, b| b.total_cmp(a));
        JordanVector(values)
    }

    /// From partial sums `s₀ = 0, s₁, …, s_d`: `λᵢ = sᵢ − sᵢ₋₁`.
    pub(crate) fn from_partial_sums(s: &[f64]) -> Self {
        JordanVector::new(s.windows(2).map(|w| w[1] - w[0]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Simple roots `αᵢ = λᵢ − λᵢ₊₁`.
    pub fn roots(&self) -> Vec<f64> {
        self.0.windows(2).map(|w| w[0] - w[1]).collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.roots().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn is_loxodromic(&self) -> bool {
        self.min_gap() > LOXODROMIC_GAP
    }
}

/// Jordan coordinates of a tower: differences of `log ρ(Λᵏ g)`.
pub fn jordan_from_tower(t: &ExteriorTower) -> Result<JordanVector> {
    Ok(JordanVector::from_partial_sums(
        &t.partial_sums(|m| spectral_radius(m.matrix()))?,
    ))
}

/// Cartan coordinates of a tower: differences of `log σ₁(Λᵏ g)`.
pub fn cartan_from_tower(t: &ExteriorTower) -> Result<JordanVector> {
    Ok(JordanVector::from_partial_sums(
        &t.partial_sums(|m| Ok(singular_values(m.matrix())?[0]))?,
    ))
}

/// Sorted log-moduli of eigenvalues, zero-sum normalized.
///
/// The value is returned even when some gap is below [`LOXODROMIC_GAP`];
/// callers check [`JordanVector::is_loxodromic`].
pub fn jordan_projection(m: &ScaledMatrix) -> Result<JordanVector> {
    jordan_from_tower(&ExteriorTower::from_matrix(m))
}

/// Sorted log singular values, zero-sum normalized.
pub fn cartan_projection(m: &ScaledMatrix) -> Result<JordanVector> {
    cartan_from_tower(&ExteriorTower::from_matrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn diagonal_examples() {
        let l2 = 2f64.ln();
        let m = ScaledMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            2.0, 1.0, 0.5,
        ])));
        assert!(close(
            jordan_projection(&m).unwrap().values(),
            &[l2, 0.0, -l2],
            1e-15
        ));
        let m = ScaledMatrix::new(DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0 / 3.0]));
        let l3 = 3f64.ln();
        assert!(close(
            jordan_projection(&m).unwrap().values(),
            &[l3, -l3],
            1e-15
        ));
        assert!(close(
            cartan_projection(&m).unwrap().values(),
            &[l3, -l3],
            1e-15
        ));
    }

    #[test]
    fn tower_from_inverse_matches_direct_minors() {
        let g = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 1.0, 0.0, 0.5, 0.3, 1.5, -1.0, 0.0, 0.0, 0.7, 1.2, 0.4, -0.6, 0.0, 0.2, 0.9,
            ],
        );
        let inv = g.clone().try_inverse().unwrap();
        let det = g.clone().lu().determinant();
        let a = ExteriorTower::from_matrix(&ScaledMatrix::new(g.clone()));
        let b = ExteriorTower::from_pair(&g, &inv, det.abs().ln());
        for k in 1..4 {
            let diff = (a.level(k).to_dense() - b.level(k).to_dense()).amax();
            assert!(diff < 1e-12, "level {k}: {diff}");
        }
    }

    #[test]
    fn rotation_has_zero_projections() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let m = ScaledMatrix::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]));
        assert!(close(
            cartan_projection(&m).unwrap().values(),
            &[0.0, 0.0],
            1e-15
        ));
        let j = jordan_projection(&m).unwrap();
        assert!(close(j.values(), &[0.0, 0.0], 1e-15));
        assert!(!j.is_loxodromic());
    }
}
