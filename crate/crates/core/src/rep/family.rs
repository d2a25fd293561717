use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::matrixrep::MatrixRep;
use crate::error::{Error, Result};

type Path = Arc<dyn Fn(f64) -> Result<MatrixRep> + Send + Sync>;

/// Largest entrywise difference accepted between `path(0)` and the base.
const BASE_MATCH_TOL: f64 = 1e-12;

/// A one-parameter family `s ↦ ρ_s` with `ρ₀` the base representation and the
/// generator velocities `d/ds ρ_s(gᵢ)` at `s = 0`.
///
/// Velocities may belong to any positive rescaling of the path: Jordan
/// coordinates are normalized to sum zero, so scalar factors drop out.
#[derive(Clone)]
pub struct RepFamily {
    base: MatrixRep,
    path: Path,
    velocity: Vec<DMatrix<f64>>,
    interval: (f64, f64),
}

impl fmt::Debug for RepFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepFamily")
            .field("base", &self.base)
            .field("velocity", &self.velocity)
            .field("interval", &self.interval)
            .finish()
    }
}

impl RepFamily {
    /// Checks that `path(0)` equals `base` and that the velocities match its shape.
    pub fn new(
        base: MatrixRep,
        path: impl Fn(f64) -> Result<MatrixRep> + Send + Sync + 'static,
        velocity: Vec<DMatrix<f64>>,
        interval: (f64, f64),
    ) -> Result<Self> {
        if velocity.len() != base.rank() {
            return Err(Error::RankMismatch {
                expected: base.rank(),
                got: velocity.len(),
            });
        }
        if let Some(v) = velocity
            .iter()
            .find(|v| v.nrows() != base.dim() || v.ncols() != base.dim())
        {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: v.nrows(),
            });
        }
        if !(interval.0 < 0.0 && 0.0 < interval.1) {
            return Err(Error::Parse(
                "family interval must contain 0 in its interior".into(),
            ));
        }
        let at_zero = path(0.0)?;
        let mismatch = (0..base.rank())
            .map(|i| (at_zero.generator(i) - base.generator(i)).abs().max())
            .fold(0.0, f64::max);
        if at_zero.dim() != base.dim() || !(mismatch <= BASE_MATCH_TOL) {
            return Err(Error::Parse(format!(
                "family at s = 0 differs from the base by {mismatch:e}"
            )));
        }
        Ok(RepFamily {
            base,
            path: Arc::new(path),
            velocity,
            interval,
        })
    }

    pub fn constant(base: MatrixRep) -> Self {
        let d = base.dim();
        let velocity = vec![DMatrix::zeros(d, d); base.rank()];
        let fixed = base.clone();
        RepFamily {
            base,
            path: Arc::new(move |_| Ok(fixed.clone())),
            velocity,
            interval: (-1.0, 1.0),
        }
    }

    /// `ρ_s(gᵢ) = gᵢ + s·Vᵢ`.
    pub fn linear(base: MatrixRep, directions: Vec<DMatrix<f64>>) -> Result<Self> {
        let gens = base.generators();
        let dirs = directions.clone();
        let label = base.label().map(str::to_string);
        Self::new(
            base,
            move |s| {
                MatrixRep::new(
                    gens.iter().zip(&dirs).map(|(g, v)| g + v * s).collect(),
                    label.clone(),
                )
            },
            directions,
            (-0.5, 0.5),
        )
    }

    /// `ρ_s(gᵢ) = gᵢ · exp(s·Xᵢ)`.
    pub fn exponential(base: MatrixRep, generators: Vec<DMatrix<f64>>) -> Result<Self> {
        let gens = base.generators();
        let velocity = gens.iter().zip(&generators).map(|(g, x)| g * x).collect();
        let xs = generators;
        let label = base.label().map(str::to_string);
        Self::new(
            base,
            move |s| {
                MatrixRep::new(
                    gens.iter()
                        .zip(&xs)
                        .map(|(g, x)| g * (x * s).exp())
                        .collect(),
                    label.clone(),
                )
            },
            velocity,
            (-1.0, 1.0),
        )
    }

    /// `ρ_s = exp(sY) ρ exp(−sY)`; every length is constant along it.
    pub fn conjugation(base: MatrixRep, y: DMatrix<f64>) -> Result<Self> {
        let gens = base.generators();
        let velocity = gens.iter().map(|g| &y * g - g * &y).collect();
        let label = base.label().map(str::to_string);
        Self::new(
            base,
            move |s| {
                let p = (&y * s).exp();
                let p_inv = (&y * -s).exp();
                MatrixRep::new(
                    gens.iter().map(|g| &p * g * &p_inv).collect(),
                    label.clone(),
                )
            },
            velocity,
            (-1.0, 1.0),
        )
    }

    pub fn base(&self) -> &MatrixRep {
        &self.base
    }

    pub fn velocity(&self) -> &[DMatrix<f64>] {
        &self.velocity
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn at(&self, s: f64) -> Result<MatrixRep> {
        if s == 0.0 {
            return Ok(self.base.clone());
        }
        (self.path)(s)
    }

    /// The family `s ↦ ρ_{c·s}`, with velocity multiplied by `c`.
    pub fn reparametrize(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parse(format!(
                "reparametrization factor {c} must be positive"
            )));
        }
        let path = Arc::clone(&self.path);
        Ok(RepFamily {
            base: self.base.clone(),
            path: Arc::new(move |s| path(c * s)),
            velocity: self.velocity.iter().map(|v| v * c).collect(),
            interval: (self.interval.0 / c, self.interval.1 / c),
        })
    }
}
