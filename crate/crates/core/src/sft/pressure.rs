//! Perron data of weighted transition matrices: pressure, equilibrium
//! states and pressure derivatives for edge potentials.

use nalgebra::DMatrix;

use super::graph::SubshiftGraph;
use super::measure::{integrate, MarkovMeasure};
use super::potential::EdgePotential;
use crate::error::{Error, Result};
use crate::linalg;

/// Power-iteration budget before falling back to the dense eigensolver.
pub const PERRON_MAX_ITER: usize = 100_000;
/// Relative width of the Collatz–Wielandt bracket accepted as converged.
pub const PERRON_TOL: f64 = 1e-13;

/// Perron root and positive eigenvectors of `A_ij = exp(f(i→j) - offset)`.
#[derive(Debug, Clone)]
pub struct PerronData {
    /// Spectral radius of the shifted matrix.
    pub root: f64,
    /// `max f`, removed before exponentiating.
    pub offset: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// Edge weights `exp(f(e) - offset)`.
    pub weights: Vec<f64>,
}

impl PerronData {
    pub fn log_radius(&self) -> f64 {
        self.root.ln() + self.offset
    }
}

/// Weighted matrix–vector product along edges; `transpose` multiplies by Aᵀ.
fn apply(g: &SubshiftGraph, w: &[f64], v: &[f64], transpose: bool, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        if transpose {
            out[j] += w[e] * v[i];
        } else {
            out[i] += w[e] * v[j];
        }
    }
}

/// Power iteration on `A + cI` with the Collatz–Wielandt bracket as stopping rule.
fn power_iteration(g: &SubshiftGraph, w: &[f64], transpose: bool) -> Option<(f64, Vec<f64>)> {
    let n = g.num_states();
    // shift by the largest row sum makes the iteration aperiodic
    let mut rows = vec![0.0; n];
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        rows[if transpose { j } else { i }] += w[e];
    }
    let c = rows.iter().copied().fold(0.0, f64::max);
    let mut v = vec![1.0 / n as f64; n];
    let mut av = vec![0.0; n];
    for _ in 0..PERRON_MAX_ITER {
        apply(g, w, &v, transpose, &mut av);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for k in 0..n {
            let ratio = av[k] / v[k];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi - lo <= PERRON_TOL * hi {
            return Some((0.5 * (lo + hi), v));
        }
        let mut norm = 0.0;
        for k in 0..n {
            av[k] += c * v[k];
            norm += av[k];
        }
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        for k in 0..n {
            v[k] = av[k] / norm;
        }
    }
    None
}

fn dense_perron(g: &SubshiftGraph, w: &[f64], transpose: bool) -> Result<(f64, Vec<f64>)> {
    let n = g.num_states();
    let mut a = DMatrix::zeros(n, n);
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        if transpose {
            a[(j, i)] = w[e];
        } else {
            a[(i, j)] = w[e];
        }
    }
    let ev = linalg::eigenvalues(&a)?;
    let root = ev
        .iter()
        .filter(|(_, im)| im.abs() < 1e-9)
        .map(|(re, _)| *re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(root > 0.0) {
        return Err(Error::ConvergenceFailure("no positive Perron root".into()));
    }
    let shifted = &a - DMatrix::identity(n, n) * root;
    let svd = nalgebra::SVD::try_new(shifted, false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::ConvergenceFailure("dense Perron eigenvector".into()))?;
    let v_t = svd.v_t.ok_or(Error::EigenFailure)?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::EigenFailure)?;
    let mut v: Vec<f64> = v_t.row(idx).iter().map(|x| x.abs()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    if v.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::ConvergenceFailure(
            "Perron vector is not positive".into(),
        ));
    }
    Ok((root, v))
}

fn perron_vector(g: &SubshiftGraph, w: &[f64], transpose: bool) -> Result<(f64, Vec<f64>)> {
    let (root, v) = match power_iteration(g, w, transpose) {
        Some(r) => r,
        None => dense_perron(g, w, transpose)?,
    };
    Ok(newton_polish(g, w, transpose, root, v))
}

/// Newton steps on `(A − λI)v = 0, Σv = 1`, bringing the Perron pair to
/// working precision. Keeps the input if a step fails to reduce the residual.
fn newton_polish(
    g: &SubshiftGraph,
    w: &[f64],
    transpose: bool,
    root: f64,
    v: Vec<f64>,
) -> (f64, Vec<f64>) {
    let n = g.num_states();
    let mut a = DMatrix::zeros(n, n);
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        if transpose {
            a[(j, i)] = w[e];
        } else {
            a[(i, j)] = w[e];
        }
    }
    let residual = |lam: f64, v: &[f64]| -> f64 {
        (0..n)
            .map(|i| ((0..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() - lam * v[i]).abs())
            .fold(0.0, f64::max)
    };
    let (mut lam, mut v) = (root, v);
    let mut res = residual(lam, &v);
    for _ in 0..3 {
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        let mut rhs = nalgebra::DVector::zeros(n + 1);
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                jac[(i, j)] = a[(i, j)];
                av += a[(i, j)] * v[j];
            }
            jac[(i, i)] -= lam;
            jac[(i, n)] = -v[i];
            jac[(n, i)] = 1.0;
            rhs[i] = -(av - lam * v[i]);
        }
        rhs[n] = 1.0 - v.iter().sum::<f64>();
        let Some(delta) = jac.lu().solve(&rhs) else {
            break;
        };
        let cand_v: Vec<f64> = (0..n).map(|i| v[i] + delta[i]).collect();
        let cand_lam = lam + delta[n];
        let cand_res = residual(cand_lam, &cand_v);
        if !(cand_res <= res) || cand_v.iter().any(|x| !(*x > 0.0)) {
            break;
        }
        lam = cand_lam;
        v = cand_v;
        res = cand_res;
        if res == 0.0 {
            break;
        }
    }
    (lam, v)
}

/// Perron root and left/right eigenvectors, with `Σ lᵢ rᵢ = 1`.
pub fn perron_data(g: &SubshiftGraph, f: &EdgePotential) -> Result<PerronData> {
    f.check_graph(g)?;
    let offset = f.max();
    let weights: Vec<f64> = f.values().iter().map(|v| (v - offset).exp()).collect();
    let (root, right) = perron_vector(g, &weights, false)?;
    let (_, mut left) = perron_vector(g, &weights, true)?;
    let pairing: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    left.iter_mut().for_each(|l| *l /= pairing);
    Ok(PerronData {
        root,
        offset,
        right,
        left,
        weights,
    })
}

/// Log of the Perron eigenvalue of the 0/1 transition matrix.
pub fn topological_entropy(g: &SubshiftGraph) -> f64 {
    // a valid graph always has a positive Perron root
    pressure(g, &EdgePotential::zero(g)).unwrap_or(0.0)
}

/// Topological pressure of an edge potential: log spectral radius of `(e^{f(i→j)})`.
pub fn pressure(g: &SubshiftGraph, f: &EdgePotential) -> Result<f64> {
    Ok(perron_data(g, f)?.log_radius())
}

/// Equilibrium state of `f`, built from the Perron eigenvectors.
pub fn equilibrium_measure(g: &SubshiftGraph, f: &EdgePotential) -> Result<MarkovMeasure> {
    let pd = perron_data(g, f)?;
    let n = g.num_states();
    let mut state_weights: Vec<f64> = (0..n).map(|i| pd.left[i] * pd.right[i]).collect();
    let total: f64 = state_weights.iter().sum();
    state_weights.iter_mut().for_each(|w| *w /= total);
    let mut edge_probs: Vec<f64> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| pd.weights[e] * pd.right[j] / (pd.root * pd.right[i]))
        .collect();
    for i in 0..n {
        let s: f64 = g.out_edges(i).iter().map(|&e| edge_probs[e]).sum();
        for &e in g.out_edges(i) {
            edge_probs[e] /= s;
        }
    }
    MarkovMeasure::new(g, state_weights, edge_probs)
}

/// `d/ds P(f + s·direction)` at `s = 0`, equal to `∫ direction d(m_f)`.
pub fn pressure_derivative(
    g: &SubshiftGraph,
    f: &EdgePotential,
    direction: &EdgePotential,
) -> Result<f64> {
    let m = equilibrium_measure(g, f)?;
    integrate(&m, direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> SubshiftGraph {
        SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap()
    }

    fn full_shift(k: usize) -> SubshiftGraph {
        let edges: Vec<_> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
        SubshiftGraph::from_index_edges(k, &edges).unwrap()
    }

    #[test]
    fn full_two_shift_entropy() {
        assert!((topological_entropy(&full_shift(2)) - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn single_cycle_has_zero_entropy() {
        let g = SubshiftGraph::from_index_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(topological_entropy(&g).abs() < 1e-13);
    }

    #[test]
    fn golden_mean_entropy() {
        // largest root of x² = x + 1
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((topological_entropy(&golden_mean()) - phi.ln()).abs() < 1e-13);
        assert!((phi.ln() - 0.4812118).abs() < 1e-7);
    }

    #[test]
    fn constant_shift() {
        let g = full_shift(2);
        let p = pressure(&g, &EdgePotential::constant(&g, 0.5)).unwrap();
        assert!((p - 2f64.ln() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn golden_mean_weighted() {
        let g = golden_mean();
        let f = EdgePotential::new(&g, vec![1.0, 0.0, 0.0]).unwrap();
        // [[e, 1], [1, 0]]: largest root of x² − e x − 1
        let e = 1f64.exp();
        let root = (e + (e * e + 4.0).sqrt()) / 2.0;
        assert!((pressure(&g, &f).unwrap() - root.ln()).abs() < 1e-13);
    }

    #[test]
    fn uniform_measure_on_full_shift() {
        let g = full_shift(2);
        let m = equilibrium_measure(&g, &EdgePotential::zero(&g)).unwrap();
        for &q in m.edge_frequencies() {
            assert!((q - 0.25).abs() < 1e-13);
        }
    }

    #[test]
    fn parry_measure() {
        let g = golden_mean();
        let m = equilibrium_measure(&g, &EdgePotential::zero(&g)).unwrap();
        // Parry: π ∝ (φ², 1)·normalization, P(1→1) = 1/φ
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.edge_probs()[0] - 1.0 / phi).abs() < 1e-12);
        let pi1 = phi * phi / (phi * phi + 1.0);
        assert!((m.state_weights()[0] - pi1).abs() < 1e-12);
        assert!((m.entropy() - phi.ln()).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_constant_direction() {
        let g = golden_mean();
        let f = EdgePotential::new(&g, vec![0.3, -0.2, 1.0]).unwrap();
        let d = pressure_derivative(&g, &f, &EdgePotential::constant(&g, 2.5)).unwrap();
        assert!((d - 2.5).abs() < 1e-12);
    }

    #[test]
    fn dense_fallback_agrees() {
        let g = golden_mean();
        let w = vec![1.0, 1.0, 1.0];
        let (r1, v1) = power_iteration(&g, &w, false).unwrap();
        let (r2, v2) = dense_perron(&g, &w, false).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
