use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Transition graph of a one-step subshift of finite type.
///
/// Vertices are the symbols, edges the allowed transitions. Only strongly
/// connected graphs (irreducible subshifts) can be constructed.
#[derive(Debug, Clone)]
pub struct SubshiftGraph {
    states: Vec<String>,
    edges: Vec<(usize, usize)>,
    state_index: HashMap<String, usize>,
    edge_index: HashMap<(usize, usize), usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    fingerprint: u64,
}

impl SubshiftGraph {
    /// Builds and validates a graph from state names and `(from, to)` name pairs.
    pub fn new<S: AsRef<str>>(states: &[S], edges: &[(S, S)]) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate state `{s}`")));
            }
        }
        let lookup = |name: &str| {
            state_index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownState(name.to_string()))
        };
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            idx_edges.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Self::from_indices(states, idx_edges)
    }

    /// Builds a graph on states `0..n` named by their index.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let states = (0..n).map(|i| i.to_string()).collect();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::UnknownState(a.max(b).to_string()));
            }
        }
        Self::from_indices(states, edges.to_vec())
    }

    fn from_indices(states: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() || states.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = states.len();
        let state_index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut edge_index = HashMap::new();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if edge_index.insert((a, b), e).is_some() {
                return Err(Error::DuplicateEdge {
                    from: states[a].clone(),
                    to: states[b].clone(),
                });
            }
            out_edges[a].push(e);
            in_edges[b].push(e);
        }
        let mut hasher = DefaultHasher::new();
        states.hash(&mut hasher);
        edges.hash(&mut hasher);
        let g = SubshiftGraph {
            fingerprint: hasher.finish(),
            states,
            edges,
            state_index,
            edge_index,
            out_edges,
            in_edges,
        };
        g.check_irreducible()?;
        // unreachable for n > 1 once irreducibility holds; kept for the single-state case
        for i in 0..n {
            if g.out_edges[i].is_empty() || g.in_edges[i].is_empty() {
                return Err(Error::DanglingState(g.states[i].clone()));
            }
        }
        Ok(g)
    }

    fn check_irreducible(&self) -> Result<()> {
        let fwd = self.bfs(0, false);
        if let Some(j) = fwd.iter().position(|p| p.is_none()) {
            return Err(Error::NotIrreducible {
                from: self.states[0].clone(),
                to: self.states[j].clone(),
            });
        }
        let back = self.bfs(0, true);
        if let Some(j) = back.iter().position(|p| p.is_none()) {
            return Err(Error::NotIrreducible {
                from: self.states[j].clone(),
                to: self.states[0].clone(),
            });
        }
        Ok(())
    }

    /// Breadth-first tree rooted at `root`. Entry `v` holds the tree edge used to
    /// reach `v` (`Some(usize::MAX)` for the root, `None` if unreachable).
    /// With `reverse`, edges are followed backwards, giving paths `v → root`.
    pub(crate) fn bfs(&self, root: usize, reverse: bool) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.states.len()];
        parent[root] = Some(usize::MAX);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let adj = if reverse {
                &self.in_edges[v]
            } else {
                &self.out_edges[v]
            };
            for &e in adj {
                let (a, b) = self.edges[e];
                let w = if reverse { a } else { b };
                if parent[w].is_none() {
                    parent[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn edge_between(&self, from: usize, to: usize) -> Option<usize> {
        self.edge_index.get(&(from, to)).copied()
    }

    pub fn out_edges(&self, state: usize) -> &[usize] {
        &self.out_edges[state]
    }

    pub fn in_edges(&self, state: usize) -> &[usize] {
        &self.in_edges[state]
    }

    /// Structural hash used to detect objects built on different graphs.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// 0/1 transition matrix.
    pub fn adjacency(&self) -> nalgebra::DMatrix<f64> {
        let n = self.num_states();
        let mut a = nalgebra::DMatrix::zeros(n, n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
        }
        a
    }

    pub fn edge_label(&self, e: usize) -> String {
        let (a, b) = self.edges[e];
        format!("{}->{}", self.states[a], self.states[b])
    }
}

impl PartialEq for SubshiftGraph {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.edges == other.edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_subshift() {
        let g = SubshiftGraph::new(&["a"], &[("a", "a")]).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn full_two_shift() {
        let g = SubshiftGraph::from_index_edges(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.edge_between(1, 0), Some(2));
    }

    #[test]
    fn one_way_edge_is_rejected() {
        let err = SubshiftGraph::new(&["1", "2"], &[("1", "2")]).unwrap_err();
        assert!(matches!(err, Error::NotIrreducible { .. }));
        let err =
            SubshiftGraph::new(&["1", "2"], &[("1", "2"), ("1", "1"), ("2", "2")]).unwrap_err();
        assert!(matches!(err, Error::NotIrreducible { .. }), "{err:?}");
    }

    #[test]
    fn duplicate_edge() {
        let err = SubshiftGraph::new(&["a"], &[("a", "a"), ("a", "a")]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { .. }));
    }
}
