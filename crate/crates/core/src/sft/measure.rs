use super::cycles::Cycle;
use super::graph::SubshiftGraph;
use super::potential::EdgePotential;
use crate::error::{Error, Result};

const MEASURE_TOL: f64 = 1e-12;

/// Shift-invariant Markov measure on a subshift graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    state_weights: Vec<f64>,
    edge_probs: Vec<f64>,
    edge_freqs: Vec<f64>,
    graph: u64,
}

impl MarkovMeasure {
    /// Validates normalization and stationarity (tolerance 1e-12, scaled by state count).
    pub fn new(g: &SubshiftGraph, state_weights: Vec<f64>, edge_probs: Vec<f64>) -> Result<Self> {
        if state_weights.len() != g.num_states() {
            return Err(Error::PotentialLength {
                expected: g.num_states(),
                got: state_weights.len(),
            });
        }
        if edge_probs.len() != g.num_edges() {
            return Err(Error::PotentialLength {
                expected: g.num_edges(),
                got: edge_probs.len(),
            });
        }
        let edge_freqs: Vec<f64> = g
            .edges()
            .iter()
            .zip(&edge_probs)
            .map(|(&(i, _), p)| state_weights[i] * p)
            .collect();
        let m = MarkovMeasure {
            state_weights,
            edge_probs,
            edge_freqs,
            graph: g.fingerprint(),
        };
        m.validate(g)?;
        Ok(m)
    }

    fn validate(&self, g: &SubshiftGraph) -> Result<()> {
        let n = g.num_states() as f64;
        let tol = MEASURE_TOL * n.max(1.0);
        let total: f64 = self.state_weights.iter().sum();
        if (total - 1.0).abs() > tol || self.state_weights.iter().any(|w| *w < -tol) {
            return Err(Error::Parse(format!("state weights sum to {total}")));
        }
        for i in 0..g.num_states() {
            let out: f64 = g.out_edges(i).iter().map(|&e| self.edge_probs[e]).sum();
            if (out - 1.0).abs() > tol {
                return Err(Error::Parse(format!(
                    "transition probabilities at state {i} sum to {out}"
                )));
            }
            let inflow: f64 = g.in_edges(i).iter().map(|&e| self.edge_freqs[e]).sum();
            if (inflow - self.state_weights[i]).abs() > tol {
                return Err(Error::Parse(format!(
                    "measure is not stationary at state {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn state_weights(&self) -> &[f64] {
        &self.state_weights
    }

    pub fn edge_probs(&self) -> &[f64] {
        &self.edge_probs
    }

    /// `state weight × transition probability` per edge.
    pub fn edge_frequencies(&self) -> &[f64] {
        &self.edge_freqs
    }

    pub fn check_graph(&self, g: &SubshiftGraph) -> Result<()> {
        if self.graph != g.fingerprint() {
            return Err(Error::GraphMismatch);
        }
        Ok(())
    }

    /// Markov-chain entropy `−Σ freq(e) log p(e)`.
    pub fn entropy(&self) -> f64 {
        -self
            .edge_freqs
            .iter()
            .zip(&self.edge_probs)
            .filter(|(q, p)| **q > 0.0 && **p > 0.0)
            .map(|(q, p)| q * p.ln())
            .sum::<f64>()
    }
}

/// `∫ f dm = Σ_e freq(e) f(e)`.
pub fn integrate(m: &MarkovMeasure, f: &EdgePotential) -> Result<f64> {
    if m.graph != f.graph_id() {
        return Err(Error::GraphMismatch);
    }
    Ok(m.edge_freqs
        .iter()
        .zip(f.values())
        .map(|(q, v)| q * v)
        .sum())
}

/// Periodic-orbit measure: edge frequencies proportional to traversal counts.
pub fn cycle_measure(g: &SubshiftGraph, a: &Cycle) -> Result<MarkovMeasure> {
    a.check_in(g)?;
    let len = a.len() as f64;
    let mut counts = vec![0usize; g.num_edges()];
    for &e in a.edges() {
        counts[e] += 1;
    }
    let mut visits = vec![0usize; g.num_states()];
    for &e in a.edges() {
        visits[g.edge(e).0] += 1;
    }
    let state_weights: Vec<f64> = visits.iter().map(|&v| v as f64 / len).collect();
    let mut edge_probs = vec![0.0; g.num_edges()];
    for (i, &v) in visits.iter().enumerate() {
        let out = g.out_edges(i);
        if v == 0 {
            for &e in out {
                edge_probs[e] = 1.0 / out.len() as f64;
            }
        } else {
            for &e in out {
                edge_probs[e] = counts[e] as f64 / v as f64;
            }
        }
    }
    let edge_freqs = counts.iter().map(|&c| c as f64 / len).collect();
    let m = MarkovMeasure {
        state_weights,
        edge_probs,
        edge_freqs,
        graph: g.fingerprint(),
    };
    m.validate(g)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> SubshiftGraph {
        SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap()
    }

    #[test]
    fn two_cycle_frequencies() {
        let g = golden_mean();
        let a = Cycle::new(&g, vec![1, 2]).unwrap();
        let m = cycle_measure(&g, &a).unwrap();
        assert_eq!(m.edge_frequencies(), &[0.0, 0.5, 0.5]);
        assert_eq!(m.entropy(), 0.0);
    }

    #[test]
    fn self_loop_frequency() {
        let g = golden_mean();
        let m = cycle_measure(&g, &Cycle::new(&g, vec![0]).unwrap()).unwrap();
        assert_eq!(m.edge_frequencies(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn non_simple_cycle() {
        let g = golden_mean();
        let m = cycle_measure(&g, &Cycle::new(&g, vec![0, 1, 2]).unwrap()).unwrap();
        for &q in m.edge_frequencies() {
            assert!((q - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn integrate_constant_and_cycle() {
        let g = golden_mean();
        let a = Cycle::new(&g, vec![0, 1, 2]).unwrap();
        let m = cycle_measure(&g, &a).unwrap();
        assert!((integrate(&m, &EdgePotential::constant(&g, 3.5)).unwrap() - 3.5).abs() < 1e-15);
        let f = EdgePotential::new(&g, vec![1.0, 2.0, 6.0]).unwrap();
        assert!((integrate(&m, &f).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn graph_mismatch() {
        let g = golden_mean();
        let h = SubshiftGraph::from_index_edges(1, &[(0, 0)]).unwrap();
        let m = cycle_measure(&g, &Cycle::new(&g, vec![0]).unwrap()).unwrap();
        assert_eq!(
            integrate(&m, &EdgePotential::zero(&h)),
            Err(Error::GraphMismatch)
        );
    }
}
