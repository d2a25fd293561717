use serde::Serialize;

use super::projection::JordanVector;
use crate::error::{Error, Result};

/// A linear functional `φ(λ) = Σ cᵢλᵢ` on Jordan coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthFunctional {
    coeffs: Vec<f64>,
    preset: Option<String>,
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

impl LengthFunctional {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse(
                "functional coefficients must be finite".into(),
            ));
        }
        Ok(LengthFunctional {
            coeffs,
            preset: None,
        })
    }

    /// Named functionals on `PGL(d, ℝ)`:
    ///
    /// * `alpha_i` (or `alphai`), `1 ≤ i < d`: the simple root `λᵢ − λᵢ₊₁`;
    /// * `lambda1`: the spectral radius `λ₁`;
    /// * `hilbert`: `λ₁ − λ_d`;
    /// * `two_lambda1`: `2λ₁`;
    /// * `unstable_jacobian`: `(d−1)λ₁ + λ_d`.
    pub fn preset(name: &str, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: d,
            });
        }
        let coeffs = match name {
            "lambda1" => unit(d, 0),
            "hilbert" => {
                let mut v = unit(d, 0);
                v[d - 1] = -1.0;
                v
            }
            "two_lambda1" => {
                let mut v = unit(d, 0);
                v[0] = 2.0;
                v
            }
            "unstable_jacobian" => {
                let mut v = unit(d, 0);
                v[0] = (d - 1) as f64;
                v[d - 1] += 1.0;
                v
            }
            _ => {
                let index = name
                    .strip_prefix("alpha")
                    .map(|rest| rest.trim_start_matches('_'))
                    .filter(|rest| !rest.is_empty())
                    .ok_or_else(|| Error::UnknownPreset(name.to_string()))?
                    .parse::<usize>()
                    .map_err(|_| Error::UnknownPreset(name.to_string()))?;
                if index == 0 || index >= d {
                    return Err(Error::IndexOutOfRange { index, dim: d });
                }
                let mut v = unit(d, index - 1);
                v[index] = -1.0;
                v
            }
        };
        Ok(LengthFunctional {
            coeffs,
            preset: Some(name.to_string()),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn preset_name(&self) -> Option<&str> {
        self.preset.as_deref()
    }

    /// Preset name, or the coefficient list for custom functionals.
    pub fn describe(&self) -> String {
        match &self.preset {
            Some(p) => p.clone(),
            None => format!("{:?}", self.coeffs),
        }
    }

    pub fn eval(&self, v: &JordanVector) -> Result<f64> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(self.eval_values(v.values()))
    }

    pub(crate) fn eval_values(&self, v: &[f64]) -> f64 {
        self.coeffs.iter().zip(v).map(|(c, x)| c * x).sum()
    }

    /// `c·φ`.
    pub fn scale(&self, c: f64) -> LengthFunctional {
        LengthFunctional {
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
            preset: None,
        }
    }
}

/// `(c₁, …, c_d) ↦ (−c_d, …, −c₁)`, so that `ι(φ)(λ(g)) = φ(λ(g⁻¹))`.
pub fn opposition_involution(f: &LengthFunctional) -> LengthFunctional {
    let coeffs: Vec<f64> = f.coeffs.iter().rev().map(|c| -c).collect();
    let preset = if coeffs == f.coeffs {
        f.preset.clone()
    } else {
        None
    };
    LengthFunctional { coeffs, preset }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let l = 2f64.ln();
        let v = JordanVector::new(vec![l, 0.0, -l]);
        assert_eq!(
            LengthFunctional::preset("alpha1", 3)
                .unwrap()
                .eval(&v)
                .unwrap(),
            l
        );
        assert_eq!(
            LengthFunctional::preset("alpha_2", 3)
                .unwrap()
                .eval(&v)
                .unwrap(),
            l
        );
        assert_eq!(
            LengthFunctional::preset("hilbert", 3)
                .unwrap()
                .eval(&v)
                .unwrap(),
            2.0 * l
        );
        assert_eq!(
            LengthFunctional::preset("unstable_jacobian", 3)
                .unwrap()
                .eval(&v)
                .unwrap(),
            l
        );
        assert!(matches!(
            LengthFunctional::preset("alpha3", 3),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        ));
        assert!(matches!(
            LengthFunctional::preset("beta", 3),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn involution() {
        let h = LengthFunctional::preset("hilbert", 4).unwrap();
        assert_eq!(opposition_involution(&h), h);
        let l1 = LengthFunctional::preset("lambda1", 3).unwrap();
        assert_eq!(opposition_involution(&l1).coeffs(), &[-0.0, -0.0, -1.0]);
    }
}
