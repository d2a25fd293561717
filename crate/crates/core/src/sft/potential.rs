use super::graph::SubshiftGraph;
use crate::error::{Error, Result};

/// A locally constant potential: one real value per edge of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePotential {
    values: Vec<f64>,
    graph: u64,
}

impl EdgePotential {
    pub fn new(g: &SubshiftGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.num_edges() {
            return Err(Error::PotentialLength {
                expected: g.num_edges(),
                got: values.len(),
            });
        }
        if let Some(edge) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePotential { edge });
        }
        Ok(EdgePotential {
            values,
            graph: g.fingerprint(),
        })
    }

    pub fn constant(g: &SubshiftGraph, c: f64) -> Self {
        EdgePotential {
            values: vec![c; g.num_edges()],
            graph: g.fingerprint(),
        }
    }

    pub fn zero(g: &SubshiftGraph) -> Self {
        Self::constant(g, 0.0)
    }

    /// `f(i→j) = u(j) − u(i)` for a state function `u`.
    pub fn coboundary(g: &SubshiftGraph, u: &[f64]) -> Result<Self> {
        if u.len() != g.num_states() {
            return Err(Error::PotentialLength {
                expected: g.num_states(),
                got: u.len(),
            });
        }
        Self::new(g, g.edges().iter().map(|&(i, j)| u[j] - u[i]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn graph_id(&self) -> u64 {
        self.graph
    }

    pub fn check_graph(&self, g: &SubshiftGraph) -> Result<()> {
        if self.graph != g.fingerprint() {
            return Err(Error::GraphMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &EdgePotential, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.graph != other.graph {
            return Err(Error::GraphMismatch);
        }
        Ok(EdgePotential {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            graph: self.graph,
        })
    }

    pub fn add(&self, other: &EdgePotential) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &EdgePotential) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + t * other`
    pub fn axpy(&self, t: f64, other: &EdgePotential) -> Result<Self> {
        self.zip_with(other, |a, b| a + t * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        EdgePotential {
            values: self.values.iter().map(|v| c * v).collect(),
            graph: self.graph,
        }
    }

    pub fn shift(&self, c: f64) -> Self {
        EdgePotential {
            values: self.values.iter().map(|v| v + c).collect(),
            graph: self.graph,
        }
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }
}

/// A strictly positive edge potential: traversal time per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofFunction(EdgePotential);

impl RoofFunction {
    pub fn new(potential: EdgePotential) -> Result<Self> {
        if let Some((edge, &value)) = potential
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| **v <= 0.0)
        {
            return Err(Error::NonPositiveRoof { edge, value });
        }
        Ok(RoofFunction(potential))
    }

    pub fn from_values(g: &SubshiftGraph, values: Vec<f64>) -> Result<Self> {
        Self::new(EdgePotential::new(g, values)?)
    }

    pub fn constant(g: &SubshiftGraph, c: f64) -> Result<Self> {
        Self::new(EdgePotential::constant(g, c))
    }

    pub fn potential(&self) -> &EdgePotential {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.0.scale(c))
    }
}

impl AsRef<EdgePotential> for RoofFunction {
    fn as_ref(&self) -> &EdgePotential {
        &self.0
    }
}
