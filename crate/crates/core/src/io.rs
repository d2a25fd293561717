//! Input documents: subshift graphs with named edge potentials, matrix
//! representations, and length functionals.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rep::{LengthFunctional, MatrixRep, RepFamily};
use crate::sft::{EdgePotential, SubshiftGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub from: String,
    pub to: String,
}

/// `{"states": [...], "edges": [{"from", "to"}, ...], "potentials": {"name": [...]}}`
/// with one weight per edge, in edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub states: Vec<String>,
    pub edges: Vec<EdgeDocument>,
    #[serde(default)]
    pub potentials: serde_json::Map<String, serde_json::Value>,
}

/// A validated graph with its potentials in document order.
#[derive(Debug, Clone)]
pub struct GraphInput {
    pub graph: SubshiftGraph,
    pub potentials: Vec<(String, EdgePotential)>,
}

impl GraphInput {
    /// The potential called `name`, or the first one when `name` is `None`.
    pub fn potential(&self, name: Option<&str>) -> Result<(String, EdgePotential)> {
        match name {
            Some(n) => self
                .potentials
                .iter()
                .find(|(k, _)| k == n)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("no potential named `{n}`"))),
            None => self
                .potentials
                .first()
                .cloned()
                .ok_or_else(|| Error::Parse("document has no potentials".into())),
        }
    }

    /// The potential called `name` if present, else the one at `position`.
    pub fn potential_or_nth(&self, name: &str, position: usize) -> Result<(String, EdgePotential)> {
        if let Some(p) = self.potentials.iter().find(|(k, _)| k == name) {
            return Ok(p.clone());
        }
        self.potentials.get(position).cloned().ok_or_else(|| {
            Error::Parse(format!(
                "expected a potential named `{name}` or at position {position}"
            ))
        })
    }
}

pub fn parse_graph(text: &str) -> Result<GraphInput> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    graph_from_document(&doc)
}

pub fn graph_from_document(doc: &GraphDocument) -> Result<GraphInput> {
    let edges: Vec<(&str, &str)> = doc
        .edges
        .iter()
        .map(|e| (e.from.as_str(), e.to.as_str()))
        .collect();
    let graph = SubshiftGraph::new(
        &doc.states.iter().map(String::as_str).collect::<Vec<_>>(),
        &edges,
    )?;
    let mut potentials = Vec::with_capacity(doc.potentials.len());
    for (name, value) in &doc.potentials {
        let values: Vec<f64> = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("potential `{name}`: {e}")))?;
        potentials.push((name.clone(), EdgePotential::new(&graph, values)?));
    }
    Ok(GraphInput { graph, potentials })
}

pub fn load_graph(path: &Path) -> Result<GraphInput> {
    parse_graph(&read(path)?)
}

/// `{"rank", "dim", "generators": [[row-major entries], ...], "label"}`, with
/// an optional `"velocity"` of the same shape for the family `gᵢ + s·Vᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDocument {
    pub rank: usize,
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<Vec<f64>>>,
}

impl RepDocument {
    pub fn from_rep(rep: &MatrixRep) -> Self {
        RepDocument {
            rank: rep.rank(),
            dim: rep.dim(),
            generators: rep.generators().iter().map(row_major).collect(),
            label: rep.label().map(str::to_string),
            velocity: None,
        }
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

fn matrices(rows: &[Vec<f64>], rank: usize, dim: usize, what: &str) -> Result<Vec<DMatrix<f64>>> {
    if rows.len() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            got: rows.len(),
        });
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != dim * dim {
                return Err(Error::Parse(format!(
                    "{what} {i} has {} entries, expected {}",
                    r.len(),
                    dim * dim
                )));
            }
            Ok(DMatrix::from_row_slice(dim, dim, r))
        })
        .collect()
}

/// A representation with the velocity of its optional linear family.
#[derive(Debug, Clone)]
pub struct RepInput {
    pub rep: MatrixRep,
    pub velocity: Option<Vec<DMatrix<f64>>>,
}

impl RepInput {
    /// The family `gᵢ + s·Vᵢ`, or the straight line toward `target` when the
    /// document carries no velocity.
    pub fn family(&self, target: Option<&MatrixRep>) -> Result<RepFamily> {
        let directions = match (&self.velocity, target) {
            (Some(v), _) => v.clone(),
            (None, Some(t)) => {
                if t.rank() != self.rep.rank() {
                    return Err(Error::RankMismatch {
                        expected: self.rep.rank(),
                        got: t.rank(),
                    });
                }
                (0..t.rank())
                    .map(|i| t.generator(i) - self.rep.generator(i))
                    .collect()
            }
            (None, None) => {
                return Err(Error::Parse(
                    "a family needs a `velocity` field or a second representation".into(),
                ))
            }
        };
        RepFamily::linear(self.rep.clone(), directions)
    }
}

pub fn parse_rep(text: &str) -> Result<RepInput> {
    let doc: RepDocument = serde_json::from_str(text)?;
    rep_from_document(&doc)
}

pub fn rep_from_document(doc: &RepDocument) -> Result<RepInput> {
    let gens = matrices(&doc.generators, doc.rank, doc.dim, "generator")?;
    let rep = MatrixRep::new(gens, doc.label.clone())?;
    let velocity = match &doc.velocity {
        Some(v) => Some(matrices(v, doc.rank, doc.dim, "velocity")?),
        None => None,
    };
    Ok(RepInput { rep, velocity })
}

pub fn load_rep(path: &Path) -> Result<RepInput> {
    parse_rep(&read(path)?)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum FunctionalDocument {
    Preset { preset: String },
    Coeffs { coeffs: Vec<f64> },
}

/// A functional given as a preset name (`alpha1`, `hilbert`, …), a comma
/// separated coefficient list, inline JSON `{"preset": …}` or `{"coeffs": […]}`,
/// or the path of a file holding that JSON.
pub fn parse_functional(spec: &str, dim: usize) -> Result<LengthFunctional> {
    let spec = spec.trim();
    let json = if spec.starts_with('{') {
        Some(spec.to_string())
    } else if Path::new(spec).is_file() {
        Some(read(Path::new(spec))?)
    } else {
        None
    };
    let functional = match json {
        Some(text) => match serde_json::from_str::<FunctionalDocument>(&text)? {
            FunctionalDocument::Preset { preset } => LengthFunctional::preset(&preset, dim)?,
            FunctionalDocument::Coeffs { coeffs } => LengthFunctional::new(coeffs)?,
        },
        None if spec.contains(',') || spec.parse::<f64>().is_ok() => {
            let coeffs = spec
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("coefficient `{x}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            LengthFunctional::new(coeffs)?
        }
        None => LengthFunctional::preset(spec, dim)?,
    };
    if functional.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: functional.dim(),
        });
    }
    Ok(functional)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
