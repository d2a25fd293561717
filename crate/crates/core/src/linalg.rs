//! Dense linear algebra shared by the representation modules: overflow-safe
//! products, exterior powers and the eigen/singular-value helpers built on
//! top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// A matrix stored as `exp(log_scale) * mat` with `max |mat_ij|` in `[1/2, 1]`.
///
/// Rescaling is by powers of two, so renormalization never perturbs entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    mat: DMatrix<f64>,
    log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(mat: DMatrix<f64>) -> Self {
        let mut m = ScaledMatrix {
            mat,
            log_scale: 0.0,
        };
        m.renormalize();
        m
    }

    pub fn with_scale(mat: DMatrix<f64>, log_scale: f64) -> Self {
        let mut m = ScaledMatrix { mat, log_scale };
        m.renormalize();
        m
    }

    pub fn identity(d: usize) -> Self {
        ScaledMatrix::new(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Normalized mantissa matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// The represented matrix. Overflows for very long words; prefer the scaled form.
    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.mat * self.log_scale.exp()
    }

    fn renormalize(&mut self) {
        let max = self.mat.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if max == 0.0 || !max.is_finite() {
            return;
        }
        // frexp: max = m * 2^e with m in [1/2, 1)
        let e = max.log2().floor() as i32 + 1;
        if e != 0 {
            let factor = 2f64.powi(-e);
            self.mat.iter_mut().for_each(|x| *x *= factor);
            self.log_scale += f64::from(e) * LN_2;
        }
    }

    pub fn mul(&self, rhs: &ScaledMatrix) -> ScaledMatrix {
        ScaledMatrix::with_scale(&self.mat * &rhs.mat, self.log_scale + rhs.log_scale)
    }

    pub fn transpose(&self) -> ScaledMatrix {
        ScaledMatrix {
            mat: self.mat.transpose(),
            log_scale: self.log_scale,
        }
    }

    /// Sum of scaled matrices, expressed at the largest scale present.
    pub fn sum(terms: &[ScaledMatrix]) -> Option<ScaledMatrix> {
        let first = terms.first()?;
        let top = terms
            .iter()
            .map(|t| t.log_scale)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = DMatrix::zeros(first.mat.nrows(), first.mat.ncols());
        for t in terms {
            acc += &t.mat * (t.log_scale - top).exp();
        }
        Some(ScaledMatrix::with_scale(acc, top))
    }
}

/// Index sets of size `k` in `0..d`, lexicographic.
pub fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn small_det(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().lu().determinant(),
    }
}

/// `k`-th exterior power in the basis of lexicographically ordered index sets.
pub fn exterior_power(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let d = m.nrows();
    let sets = combinations(d, k);
    let n = sets.len();
    let mut out = DMatrix::zeros(n, n);
    let mut sub = DMatrix::zeros(k, k);
    for (r, rows) in sets.iter().enumerate() {
        for (c, cols) in sets.iter().enumerate() {
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    sub[(a, b)] = m[(i, j)];
                }
            }
            out[(r, c)] = small_det(&sub);
        }
    }
    out
}

/// `Λᵏ g` computed from `g⁻¹` by Jacobi's complementary minor identity
/// `det g[I,J] = ±det g · det g⁻¹[Jᶜ,Iᶜ]`.
///
/// For `k > d/2` this takes smaller minors than [`exterior_power`] and avoids
/// the cancellation in large minors of matrices with a wide spectrum.
pub fn exterior_power_from_inverse(inv: &DMatrix<f64>, det: f64, k: usize) -> DMatrix<f64> {
    let d = inv.nrows();
    let sets = combinations(d, k);
    let low = exterior_power(inv, d - k);
    let mask = |s: &[usize]| s.iter().fold(0u128, |m, &i| m | 1 << i);
    let full = (1u128 << d) - 1;
    let position: std::collections::HashMap<u128, usize> = combinations(d, d - k)
        .iter()
        .enumerate()
        .map(|(i, s)| (mask(s), i))
        .collect();
    let complement: Vec<usize> = sets.iter().map(|s| position[&(full ^ mask(s))]).collect();
    let parity: Vec<usize> = sets.iter().map(|s| s.iter().sum::<usize>() % 2).collect();
    let n = sets.len();
    DMatrix::from_fn(n, n, |r, c| {
        let sign = if (parity[r] + parity[c]).is_multiple_of(2) {
            det
        } else {
            -det
        };
        sign * low[(complement[c], complement[r])]
    })
}

/// Directional derivative of `exterior_power(., k)` at `m` in direction `dm`.
pub fn exterior_power_derivative(m: &DMatrix<f64>, dm: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let d = m.nrows();
    let sets = combinations(d, k);
    let n = sets.len();
    let mut out = DMatrix::zeros(n, n);
    let mut sub = DMatrix::zeros(k, k);
    for (r, rows) in sets.iter().enumerate() {
        for (c, cols) in sets.iter().enumerate() {
            let mut acc = 0.0;
            // d det(S) = sum over rows of det(S with that row replaced by dS's row)
            for replaced in 0..k {
                for (a, &i) in rows.iter().enumerate() {
                    let src = if a == replaced { dm } else { m };
                    for (b, &j) in cols.iter().enumerate() {
                        sub[(a, b)] = src[(i, j)];
                    }
                }
                acc += small_det(&sub);
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// Plücker coordinates of `v_1 ∧ … ∧ v_k` for the first `k` columns of `frame`.
pub fn wedge_columns(frame: &DMatrix<f64>, k: usize) -> DVector<f64> {
    let d = frame.nrows();
    let sets = combinations(d, k);
    let mut sub = DMatrix::zeros(k, k);
    DVector::from_iterator(
        sets.len(),
        sets.iter().map(|rows| {
            for (a, &i) in rows.iter().enumerate() {
                for b in 0..k {
                    sub[(a, b)] = frame[(i, b)];
                }
            }
            small_det(&sub)
        }),
    )
}

/// Parlett–Reinsch balancing with powers of two. Returns `(D⁻¹ M D, diag(D))`.
pub fn balance(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut scale = DVector::from_element(n, 1.0);
    let radix = 2.0_f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            let g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    (a, scale)
}

/// Eigenvalues as `(re, im)` pairs, computed after balancing.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(vec![(m[(0, 0)], 0.0)]);
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let (b, _) = balance(m);
    // The QR iteration can stall on clustered eigenvalues at the tightest
    // deflation threshold; looser thresholds still resolve them to a few ulps.
    // Transposition, dropping the balancing and an orthogonal similarity
    // change the iteration path without changing the spectrum.
    let v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    let reflect = DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared());
    let rotated = &reflect * &b * &reflect;
    let candidates = [b.clone(), b.transpose(), m.clone(), m.transpose(), rotated];
    let schur = [1.0, 64.0, 4096.0, 1e6]
        .iter()
        .flat_map(|f| candidates.iter().map(move |c| (f, c)))
        .find_map(|(f, c)| nalgebra::Schur::try_new(c.clone(), f * f64::EPSILON, 10_000))
        .ok_or(Error::EigenFailure)?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect())
}

/// Moduli of the eigenvalues, sorted nonincreasing.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = eigenvalues(m)?
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Largest eigenvalue modulus. A real dominant eigenvalue is polished by
/// inverse iteration, which recovers full precision when the Schur form
/// had to deflate at a loose threshold.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    let mut values = eigenvalues(m)?;
    values.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let (re, im) = values[0];
    let top = re.hypot(im);
    let second = values.get(1).map_or(0.0, |z| z.0.hypot(z.1));
    if im != 0.0 || !(second < 0.999 * top) {
        return Ok(top);
    }
    Ok(polish_real_eigenvalue(m, re).map_or(top, f64::abs))
}

/// Refines a simple real eigenvalue estimate by shifted inverse iteration
/// followed by a Rayleigh quotient. Returns `None` when the refinement moves
/// the estimate by more than its own uncertainty should allow.
fn polish_real_eigenvalue(m: &DMatrix<f64>, estimate: f64) -> Option<f64> {
    let n = m.nrows();
    let shift = estimate * (1.0 + 1e-10) + f64::MIN_POSITIVE;
    let lu = (m - DMatrix::identity(n, n) * shift).lu();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    for _ in 0..3 {
        v = lu.solve(&v)?;
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        v /= norm;
    }
    let refined = v.dot(&(m * &v));
    ((refined - estimate).abs() <= 1e-6 * estimate.abs()).then_some(refined)
}

/// Singular values, sorted nonincreasing.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let mut v: Vec<f64> = svd.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Null vector of a (numerically) singular square matrix: the right singular
/// vector for the smallest singular value.
fn null_vector(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let v_t = svd.v_t.ok_or(Error::EigenFailure)?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::EigenFailure)?;
    Ok(v_t.row(idx).transpose())
}

/// Dominant eigenvalue together with right and left eigenvectors.
#[derive(Debug, Clone)]
pub struct TopEigen {
    pub value: f64,
    pub right: DVector<f64>,
    pub left: DVector<f64>,
    /// `1 - |μ₂|/|μ₁|`.
    pub gap: f64,
}

/// Dominant eigen-triple of a real matrix whose top eigenvalue is real and
/// simple in modulus; fails with `NonSimpleEigenvalue` otherwise.
pub fn top_eigen(m: &DMatrix<f64>, min_gap: f64) -> Result<TopEigen> {
    let n = m.nrows();
    if n == 1 {
        return Ok(TopEigen {
            value: m[(0, 0)],
            right: DVector::from_element(1, 1.0),
            left: DVector::from_element(1, 1.0),
            gap: 1.0,
        });
    }
    let mut ev = eigenvalues(m)?;
    ev.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let top = ev[0].0.hypot(ev[0].1);
    let second = ev[1].0.hypot(ev[1].1);
    let gap = if top > 0.0 { 1.0 - second / top } else { 0.0 };
    if gap < min_gap || ev[0].1.abs() > min_gap * top {
        return Err(Error::NonSimpleEigenvalue { gap });
    }
    let value = ev[0].0;
    let shift = DMatrix::identity(n, n) * value;
    let right = refine_eigenvector(m, value, null_vector(&(m - &shift))?);
    let mt = m.transpose();
    let left = refine_eigenvector(&mt, value, null_vector(&(&mt - &shift))?);
    Ok(TopEigen {
        value,
        right,
        left,
        gap,
    })
}

/// Two steps of inverse iteration with a slightly perturbed shift.
fn refine_eigenvector(m: &DMatrix<f64>, value: f64, mut v: DVector<f64>) -> DVector<f64> {
    let n = m.nrows();
    let scale = m
        .iter()
        .fold(0.0_f64, |a, x| a.max(x.abs()))
        .max(value.abs());
    let shifted = m - DMatrix::identity(n, n) * (value + 1e-10 * scale);
    let lu = shifted.lu();
    for _ in 0..2 {
        match lu.solve(&v) {
            Some(w) if w.iter().all(|x| x.is_finite()) && w.norm() > 0.0 => {
                v = w.normalize();
            }
            _ => break,
        }
    }
    v
}

/// Orthonormalize columns in order (thin QR via modified Gram–Schmidt with
/// one reorthogonalization pass).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = m.shape();
    let mut q = DMatrix::zeros(n, k);
    for j in 0..k {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let proj = qi.dot(&v);
                v -= qi * proj;
            }
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        }
        q.set_column(j, &v);
    }
    q
}

/// Schur vectors ordered by decreasing eigenvalue modulus for a matrix with
/// real eigenvalues of pairwise distinct moduli.
///
/// Column `i` of the result together with the previous ones spans the sum of
/// the eigenspaces of the `i+1` largest eigenvalues.
pub fn ordered_schur_vectors(m: &DMatrix<f64>, min_gap: f64) -> Result<DMatrix<f64>> {
    ordered_schur_vectors_by(m, min_gap, true)
}

/// As [`ordered_schur_vectors`], with increasing moduli when `descending` is false.
pub fn ordered_schur_vectors_by(
    m: &DMatrix<f64>,
    min_gap: f64,
    descending: bool,
) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let (b, dscale) = balance(m);
    // The QR iteration can stall on clustered eigenvalues at the tightest
    // deflation threshold; looser thresholds still resolve them to a few ulps.
    // Transposition, dropping the balancing and an orthogonal similarity
    // change the iteration path without changing the spectrum.
    let v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    let reflect = DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared());
    let rotated = &reflect * &b * &reflect;
    let candidates = [b.clone(), b.transpose(), m.clone(), m.transpose(), rotated];
    let schur = [1.0, 64.0, 4096.0, 1e6]
        .iter()
        .flat_map(|f| candidates.iter().map(move |c| (f, c)))
        .find_map(|(f, c)| nalgebra::Schur::try_new(c.clone(), f * f64::EPSILON, 10_000))
        .ok_or(Error::EigenFailure)?;
    let (mut q, mut t) = schur.unpack();

    // split any remaining 2×2 blocks that carry real eigenvalues
    let mut k = 0;
    while k + 1 < n {
        if t[(k + 1, k)].abs() > f64::EPSILON * (t[(k, k)].abs() + t[(k + 1, k + 1)].abs()) {
            let (a, bb, c, dd) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
            let tr = a + dd;
            let disc = (a - dd) * (a - dd) / 4.0 + bb * c;
            if disc < 0.0 {
                return Err(Error::NonLoxodromic { gap: 0.0 });
            }
            let mu = tr / 2.0 + disc.sqrt();
            // eigenvector of the block for mu
            let (x, y) = if (mu - a).abs() > (mu - dd).abs() {
                (bb, mu - a)
            } else {
                (mu - dd, c)
            };
            let r = x.hypot(y);
            apply_rotation(&mut t, &mut q, k, x / r, y / r);
            t[(k + 1, k)] = 0.0;
        }
        k += 1;
    }

    // bubble sort the diagonal by modulus using adjacent swaps
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            let (a, b2) = (t[(k, k)], t[(k + 1, k + 1)]);
            let out_of_order = if descending {
                b2.abs() > a.abs()
            } else {
                b2.abs() < a.abs()
            };
            if out_of_order {
                let c = t[(k, k + 1)];
                let (x, y) = (c, b2 - a);
                let r = x.hypot(y);
                if r == 0.0 {
                    continue;
                }
                apply_rotation(&mut t, &mut q, k, x / r, y / r);
                t[(k + 1, k)] = 0.0;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let moduli: Vec<f64> = (0..n).map(|i| t[(i, i)].abs()).collect();
    let gap = moduli
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                (w[0].ln() - w[1].ln()).abs()
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min);
    if gap < min_gap {
        return Err(Error::NonLoxodromic { gap });
    }

    // undo the balancing similarity: flag of M is D · (flag of D⁻¹MD)
    let mut back = q;
    for i in 0..n {
        for j in 0..n {
            back[(i, j)] *= dscale[i];
        }
    }
    Ok(orthonormalize(&back))
}

/// Rotate coordinates `k, k+1` so that the new first basis vector is `(cs, sn)`.
fn apply_rotation(t: &mut DMatrix<f64>, q: &mut DMatrix<f64>, k: usize, cs: f64, sn: f64) {
    let n = t.nrows();
    // T ← Gᵀ T G with G = [[cs, -sn], [sn, cs]] acting on k, k+1
    for j in 0..n {
        let (x, y) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = cs * x + sn * y;
        t[(k + 1, j)] = -sn * x + cs * y;
    }
    for i in 0..n {
        let (x, y) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = cs * x + sn * y;
        t[(i, k + 1)] = -sn * x + cs * y;
    }
    for i in 0..n {
        let (x, y) = (q[(i, k)], q[(i, k + 1)]);
        q[(i, k)] = cs * x + sn * y;
        q[(i, k + 1)] = -sn * x + cs * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalization_keeps_value() {
        let m = DMatrix::from_row_slice(2, 2, &[1000.0, 3.0, -2.0, 0.5]);
        let s = ScaledMatrix::new(m.clone());
        let max = s.matrix().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        assert!((0.5..=1.0).contains(&max));
        assert!((s.to_dense() - m).norm() < 1e-12);
    }

    #[test]
    fn exterior_power_is_multiplicative() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.0, 1.0, 1.5]);
        let b = DMatrix::from_row_slice(3, 3, &[0.2, -1.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.1, 0.7]);
        for k in 1..=3 {
            let lhs = exterior_power(&(&a * &b), k);
            let rhs = exterior_power(&a, k) * exterior_power(&b, k);
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!((exterior_power(&a, 3)[(0, 0)] - a.determinant()).abs() < 1e-12);
    }

    #[test]
    fn exterior_derivative_matches_difference() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.0, 1.0, 1.5]);
        let da = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, -0.3, 0.2, 0.5, 0.0, 1.0, 0.0, 0.2]);
        let h = 1e-6;
        let fd =
            (exterior_power(&(&a + &da * h), 2) - exterior_power(&(&a - &da * h), 2)) / (2.0 * h);
        assert!((fd - exterior_power_derivative(&a, &da, 2)).norm() < 1e-8);
    }

    #[test]
    fn ordered_schur_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0]));
        let q = ordered_schur_vectors(&m, 1e-8).unwrap();
        assert!((q[(1, 0)].abs() - 1.0).abs() < 1e-12);
        assert!((q[(2, 1)].abs() - 1.0).abs() < 1e-12);
        assert!((q[(0, 2)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_eigen_vectors() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 1.0]);
        let te = top_eigen(&m, 1e-8).unwrap();
        let r = &m * &te.right - &te.right * te.value;
        let l = m.transpose() * &te.left - &te.left * te.value;
        assert!(r.norm() < 1e-12 && l.norm() < 1e-12);
    }
}
