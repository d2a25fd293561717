use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::matrixrep::MatrixRep;
use super::projection::ExteriorTower;
use crate::error::{Error, Result};
use crate::linalg::{combinations, exterior_power, ScaledMatrix};

/// `ρ*(γ) = ᵗρ(γ)⁻¹`.
pub fn contragredient(rep: &MatrixRep) -> Result<MatrixRep> {
    let label = rep.label().map(|l| format!("{l}*"));
    let gens: Vec<DMatrix<f64>> = (0..rep.rank())
        .map(|i| rep.letter(-(i as i32 + 1)).transpose())
        .collect();
    MatrixRep::new(gens, label)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `(αx + βy)^p (γx + δy)^q` in the monomials `x^{p+q−j} y^j`.
fn product_coefficients(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    p: usize,
    q: usize,
) -> Vec<f64> {
    let n = p + q;
    let mut out = vec![0.0; n + 1];
    for a in 0..=p {
        let left = binomial(p, a) * alpha.powi((p - a) as i32) * beta.powi(a as i32);
        for b in 0..=q {
            let right = binomial(q, b) * gamma.powi((q - b) as i32) * delta.powi(b as i32);
            out[a + b] += left * right;
        }
    }
    out
}

/// The irreducible `d`-dimensional representation of `GL(2)` on degree `d−1`
/// binary forms: row `i` holds the coefficients of `(ax + by)^{d−1−i}(cx + dy)^i`.
pub fn sym_power_matrix(g: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    let n = d - 1;
    let (a, b, c, dd) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        let row = product_coefficients(a, b, c, dd, n - i, i);
        for (j, v) in row.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// `g = R_φ diag(σ₁, σ₂) R_θ` with `σ₁ ≥ |σ₂|`, returned as `(φ, σ₁, σ₂, θ)`.
/// `σ₂` is taken from the determinant so that it keeps full relative precision.
fn svd2(g: &DMatrix<f64>) -> (f64, f64, f64, f64) {
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let (e, f, gg, h) = ((a + d) / 2.0, (a - d) / 2.0, (c + b) / 2.0, (c - b) / 2.0);
    let q = e.hypot(h);
    let r = f.hypot(gg);
    let s1 = q + r;
    let s2 = (a * d - b * c) / s1;
    let a1 = gg.atan2(f);
    let a2 = h.atan2(e);
    ((a2 + a1) / 2.0, s1, s2, (a2 - a1) / 2.0)
}

/// Exterior tower of `sym^{d−1} g` built as `Λᵏ sym R_φ · Λᵏ sym Σ · Λᵏ sym R_θ`.
///
/// Minors of the lifted rotations stay bounded, so every level keeps
/// precision relative to its own norm. Minors of the dense lift cancel badly
/// once the singular values of `g^{d−1}` spread over many orders of magnitude.
fn sym_tower(phi: f64, s1: f64, s2: f64, theta: f64, d: usize) -> ExteriorTower {
    let left = sym_power_matrix(&rotation(phi), d);
    let right = sym_power_matrix(&rotation(theta), d);
    let diag: Vec<f64> = (0..d)
        .map(|i| s1.powi((d - 1 - i) as i32) * s2.powi(i as i32))
        .collect();
    let levels = (1..d)
        .map(|k| {
            let weights: Vec<f64> = combinations(d, k)
                .iter()
                .map(|set| set.iter().map(|&i| diag[i]).product())
                .collect();
            let mut m = exterior_power(&left, k);
            for (j, w) in weights.iter().enumerate() {
                m.column_mut(j).scale_mut(*w);
            }
            ScaledMatrix::new(m * exterior_power(&right, k))
        })
        .collect();
    let log_det = (d * (d - 1) / 2) as f64 * (s1 * s2).abs().ln();
    ExteriorTower::from_levels(d, levels, log_det)
}

/// Composition with the irreducible representation `PGL(2) → PGL(d)`.
pub fn sym_power(rep: &MatrixRep, d: usize) -> Result<MatrixRep> {
    if rep.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rep.dim(),
        });
    }
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d,
        });
    }
    let label = rep.label().map(|l| format!("sym{}({l})", d - 1));
    let mut letters = Vec::with_capacity(2 * rep.rank());
    for x in 1..=rep.rank() as i32 {
        // The inverse tower reverses the factorization of the generator, so
        // both towers are exact inverses of each other up to rounding.
        let (phi, s1, s2, theta) = svd2(rep.letter(x));
        letters.push((
            sym_power_matrix(rep.letter(x), d),
            sym_tower(phi, s1, s2, theta, d),
        ));
        letters.push((
            sym_power_matrix(rep.letter(-x), d),
            sym_tower(-theta, 1.0 / s1, 1.0 / s2, -phi, d),
        ));
    }
    MatrixRep::from_letter_towers(letters, label)
}

/// Block-diagonal sum `ρ₁ ⊕ ρ₂`.
pub fn direct_sum(r1: &MatrixRep, r2: &MatrixRep) -> Result<MatrixRep> {
    if r1.rank() != r2.rank() {
        return Err(Error::RankMismatch {
            expected: r1.rank(),
            got: r2.rank(),
        });
    }
    let (d1, d2) = (r1.dim(), r2.dim());
    let block = |x: i32| {
        let mut m = DMatrix::zeros(d1 + d2, d1 + d2);
        m.view_mut((0, 0), (d1, d1)).copy_from(r1.letter(x));
        m.view_mut((d1, d1), (d2, d2)).copy_from(r2.letter(x));
        m
    };
    let pairs = (1..=r1.rank() as i32)
        .map(|x| (block(x), block(-x), 0.0))
        .collect();
    MatrixRep::from_letter_pairs(pairs, None)
}

fn rotation(theta: f64) -> DMatrix<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Disjointness data for the ping-pong intervals on `ℝP¹`, parametrized by
/// the angle of a line in `[0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PingPongCertificate {
    /// `(center, half_width)` for the attracting and repelling intervals of
    /// `a` and then of `b`.
    pub intervals: Vec<(f64, f64)>,
    /// Smallest distance between two intervals; negative on overlap.
    pub min_gap: f64,
    pub passed: bool,
}

/// A two-generator Schottky subgroup of `SL(2, ℝ)` with its certificate.
#[derive(Debug, Clone)]
pub struct Schottky {
    pub rep: MatrixRep,
    pub certificate: PingPongCertificate,
}

impl Schottky {
    /// The representation, or `CertificateFailed` when the intervals overlap.
    pub fn certified(&self) -> Result<&MatrixRep> {
        if self.certificate.passed {
            Ok(&self.rep)
        } else {
            Err(Error::CertificateFailed {
                min_gap: self.certificate.min_gap,
            })
        }
    }
}

fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

/// `a = diag(e^{tₐ/2}, e^{−tₐ/2})` and `b = R_θ diag(e^{t_b/2}, e^{−t_b/2}) R_θ⁻¹`.
///
/// `tₐ, t_b > 0` are translation lengths (so the traces `2cosh(t/2)` exceed 2)
/// and `θ` rotates the axis of `b` away from that of `a`. A hyperbolic element
/// of translation length `t` maps the complement of the interval of
/// half-width `atan(e^{−t/2})` around its repelling line into the interval of
/// the same half-width around its attracting line, so the group is a Schottky
/// group when the four intervals are disjoint.
pub fn schottky_sl2(t_a: f64, t_b: f64, theta: f64) -> Result<Schottky> {
    for t in [t_a, t_b] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Parse(format!(
                "translation length {t} must be positive"
            )));
        }
    }
    if !theta.is_finite() {
        return Err(Error::Parse("rotation angle must be finite".into()));
    }
    let diag =
        |t: f64| DMatrix::from_row_slice(2, 2, &[(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()]);
    let a = diag(t_a);
    let b = rotation(theta) * diag(t_b) * rotation(-theta);
    let (wa, wb) = ((-t_a / 2.0).exp().atan(), (-t_b / 2.0).exp().atan());
    let intervals = vec![
        (0.0, wa),
        (PI / 2.0, wa),
        (theta.rem_euclid(PI), wb),
        ((theta + PI / 2.0).rem_euclid(PI), wb),
    ];
    let mut min_gap = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            let (ci, wi) = intervals[i];
            let (cj, wj) = intervals[j];
            min_gap = min_gap.min(circle_distance(ci, cj) - wi - wj);
        }
    }
    let rep = MatrixRep::new(vec![a, b], Some(format!("schottky({t_a},{t_b},{theta})")))?;
    Ok(Schottky {
        rep,
        certificate: PingPongCertificate {
            intervals,
            min_gap,
            passed: min_gap > 0.0,
        },
    })
}
