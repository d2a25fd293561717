use super::graph::SubshiftGraph;
use super::potential::EdgePotential;
use crate::error::{Error, Result};

/// Default cap on the number of cycles returned by [`enumerate_cycles`].
pub const DEFAULT_CYCLE_CAP: usize = 2_000_000;

/// A closed path, stored as the lexicographically minimal rotation of its
/// edge-index sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    edges: Vec<usize>,
}

/// Lexicographically minimal rotation (naive; cycles are short).
pub(crate) fn min_rotation<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    let mut best = 0;
    for start in 1..n {
        for k in 0..n {
            let a = &seq[(start + k) % n];
            let b = &seq[(best + k) % n];
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    (0..n).map(|k| seq[(best + k) % n].clone()).collect()
}

fn is_min_rotation(seq: &[usize]) -> bool {
    let n = seq.len();
    (1..n).all(|start| {
        for k in 0..n {
            let a = seq[(start + k) % n];
            let b = seq[k];
            if a != b {
                return a > b;
            }
        }
        true
    })
}

impl Cycle {
    /// Validates that `edges` chain into a closed path of `g`.
    pub fn new(g: &SubshiftGraph, edges: Vec<usize>) -> Result<Self> {
        if edges.is_empty() || edges.iter().any(|&e| e >= g.num_edges()) {
            return Err(Error::CycleNotInGraph);
        }
        let n = edges.len();
        for k in 0..n {
            if g.edge(edges[k]).1 != g.edge(edges[(k + 1) % n]).0 {
                return Err(Error::CycleNotInGraph);
            }
        }
        Ok(Cycle {
            edges: min_rotation(&edges),
        })
    }

    /// Cycle through the given state sequence `s₀ → s₁ → … → s₀`.
    pub fn from_states(g: &SubshiftGraph, states: &[usize]) -> Result<Self> {
        let n = states.len();
        let edges = (0..n)
            .map(|k| {
                g.edge_between(states[k], states[(k + 1) % n])
                    .ok_or(Error::CycleNotInGraph)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// Combinatorial length (edge count).
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn check_in(&self, g: &SubshiftGraph) -> Result<()> {
        Cycle::new(g, self.edges.clone()).map(|_| ())
    }

    /// Visited states in traversal order, starting at the source of the first edge.
    pub fn states(&self, g: &SubshiftGraph) -> Vec<usize> {
        self.edges.iter().map(|&e| g.edge(e).0).collect()
    }

    /// Sum of `f` along the cycle.
    pub fn sum(&self, f: &EdgePotential) -> f64 {
        self.edges.iter().map(|&e| f.values()[e]).sum()
    }

    pub fn mean(&self, f: &EdgePotential) -> f64 {
        self.sum(f) / self.len() as f64
    }

    pub fn label(&self, g: &SubshiftGraph) -> String {
        let states = self.states(g);
        let mut s: Vec<&str> = states.iter().map(|&i| g.states()[i].as_str()).collect();
        s.push(&g.states()[states[0]]);
        s.join("->")
    }
}

/// All cycles with at most `max_edge_count` edges, one per rotation class,
/// including non-simple cycles and powers. Sorted by length, then edge sequence.
pub fn enumerate_cycles(g: &SubshiftGraph, max_edge_count: usize) -> Result<Vec<Cycle>> {
    enumerate_cycles_capped(g, max_edge_count, DEFAULT_CYCLE_CAP)
}

pub fn enumerate_cycles_capped(
    g: &SubshiftGraph,
    max_edge_count: usize,
    cap: usize,
) -> Result<Vec<Cycle>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_edge_count);
    for e0 in 0..g.num_edges() {
        path.clear();
        path.push(e0);
        extend(g, e0, max_edge_count, cap, &mut path, &mut out)?;
    }
    out.sort_by(|a: &Cycle, b: &Cycle| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(out)
}

// Depth-first extension using only edges with index >= e0, so every emitted
// sequence starts with its minimum; rotation duplicates are filtered by
// `is_min_rotation`.
fn extend(
    g: &SubshiftGraph,
    e0: usize,
    max_len: usize,
    cap: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Cycle>,
) -> Result<()> {
    let start = g.edge(e0).0;
    let last = *path.last().expect("path is never empty");
    let head = g.edge(last).1;
    if head == start && is_min_rotation(path) {
        if out.len() >= cap {
            return Err(Error::BudgetExceeded { cap });
        }
        out.push(Cycle {
            edges: path.clone(),
        });
    }
    if path.len() == max_len {
        return Ok(());
    }
    for &e in g.out_edges(head) {
        if e >= e0 {
            path.push(e);
            extend(g, e0, max_len, cap, path, out)?;
            path.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> SubshiftGraph {
        SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap()
    }

    #[test]
    fn self_loop_powers() {
        let g = SubshiftGraph::from_index_edges(1, &[(0, 0)]).unwrap();
        let cycles = enumerate_cycles(&g, 3).unwrap();
        assert_eq!(cycles.len(), 3);
        assert_eq!(
            cycles.iter().map(Cycle::len).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn full_two_shift_loops() {
        let g = SubshiftGraph::from_index_edges(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let cycles = enumerate_cycles(&g, 1).unwrap();
        assert_eq!(cycles.len(), 2);
    }

    #[test]
    fn golden_mean_up_to_four() {
        // words over the symbol "1"=self-loop and "12"=excursion, up to rotation
        let g = golden_mean();
        let cycles = enumerate_cycles(&g, 4).unwrap();
        let labels: Vec<String> = cycles.iter().map(|c| c.label(&g)).collect();
        assert_eq!(
            labels,
            vec![
                "1->1",
                "1->1->1",
                "1->2->1",
                "1->1->1->1",
                "1->1->2->1",
                "1->1->1->1->1",
                "1->1->1->2->1",
                "1->2->1->2->1",
            ]
        );
    }

    #[test]
    fn rotation_is_canonical() {
        let g = golden_mean();
        assert_eq!(
            Cycle::new(&g, vec![2, 0, 1]).unwrap(),
            Cycle::new(&g, vec![0, 1, 2]).unwrap()
        );
        assert_eq!(Cycle::new(&g, vec![0, 2]), Err(Error::CycleNotInGraph));
    }

    #[test]
    fn cap_is_enforced() {
        let g = golden_mean();
        assert_eq!(
            enumerate_cycles_capped(&g, 10, 5),
            Err(Error::BudgetExceeded { cap: 5 })
        );
    }
}
