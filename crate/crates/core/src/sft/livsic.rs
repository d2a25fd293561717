use super::cycles::Cycle;
use super::graph::SubshiftGraph;
use super::potential::EdgePotential;
use crate::error::Result;

/// Absolute tolerance on edge residuals `f(i→j) − c − u(j) + u(i)`.
pub const LIVSIC_TOL: f64 = 1e-10;

/// Outcome of reducing an edge potential modulo coboundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct LivsicReduction {
    /// State function with `u(root) = 0`.
    pub u: Vec<f64>,
    /// Candidate constant (mean of `f` over a reference cycle).
    pub c: f64,
    /// `f ~ c` within tolerance on every edge.
    pub is_coboundary_up_to_constant: bool,
    /// Largest edge residual.
    pub max_residual: f64,
    /// A cycle whose mean of `f` differs from `c` when the flag is false.
    pub witness: Option<Cycle>,
}

impl LivsicReduction {
    /// `f` is cohomologous to zero.
    pub fn is_coboundary(&self, tol: f64) -> bool {
        self.is_coboundary_up_to_constant && self.c.abs() <= tol
    }
}

/// Decides whether `f(i→j) = c + u(j) − u(i)` for some state function `u` and
/// constant `c`, by a spanning-tree assignment of `u` and verification of every edge.
pub fn livsic_reduce(g: &SubshiftGraph, f: &EdgePotential) -> Result<LivsicReduction> {
    livsic_reduce_with_tol(g, f, LIVSIC_TOL)
}

pub fn livsic_reduce_with_tol(
    g: &SubshiftGraph,
    f: &EdgePotential,
    tol: f64,
) -> Result<LivsicReduction> {
    f.check_graph(g)?;
    let fv = f.values();
    let root = 0;
    let out_tree = g.bfs(root, false);
    let in_tree = g.bfs(root, true);

    // tree paths root → v and v → root as edge lists
    let path_from_root = |v: usize| {
        let mut p = Vec::new();
        let mut x = v;
        while x != root {
            let e = out_tree[x].expect("irreducible graph");
            p.push(e);
            x = g.edge(e).0;
        }
        p.reverse();
        p
    };
    let path_to_root = |v: usize| {
        let mut p = Vec::new();
        let mut x = v;
        while x != root {
            let e = in_tree[x].expect("irreducible graph");
            p.push(e);
            x = g.edge(e).1;
        }
        p
    };

    // reference cycle: first edge out of the root, closed through the in-tree
    let e0 = g.out_edges(root)[0];
    let mut reference = vec![e0];
    reference.extend(path_to_root(g.edge(e0).1));
    let c = reference.iter().map(|&e| fv[e]).sum::<f64>() / reference.len() as f64;

    // u along the out-tree in BFS order
    let n = g.num_states();
    let mut u = vec![f64::NAN; n];
    u[root] = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| path_from_root(v).len());
    for &v in &order {
        if v != root {
            let e = out_tree[v].expect("irreducible graph");
            let (a, _) = g.edge(e);
            u[v] = u[a] + fv[e] - c;
        }
    }

    let mut max_residual = 0.0_f64;
    let mut worst = None;
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let r = (fv[e] - c - u[j] + u[i]).abs();
        if r > max_residual {
            max_residual = r;
            worst = Some(e);
        }
    }
    let flag = max_residual <= tol;
    let witness = if flag {
        None
    } else {
        let e = worst.expect("nonzero residual has an edge");
        let (i, j) = g.edge(e);
        // either root→j→root or root→i→j→root has a mean different from c
        let loop_j: Vec<usize> = path_from_root(j)
            .into_iter()
            .chain(path_to_root(j))
            .collect();
        let mut through: Vec<usize> = path_from_root(i);
        through.push(e);
        through.extend(path_to_root(j));
        let gap = |walk: &[usize]| {
            if walk.is_empty() {
                0.0
            } else {
                walk.iter().map(|&e| fv[e] - c).sum::<f64>().abs()
            }
        };
        let pick = if gap(&loop_j) > gap(&through) {
            loop_j
        } else {
            through
        };
        Some(Cycle::new(g, pick)?)
    };
    Ok(LivsicReduction {
        u,
        c,
        is_coboundary_up_to_constant: flag,
        max_residual,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> SubshiftGraph {
        SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap()
    }

    #[test]
    fn planted_coboundary() {
        let g =
            SubshiftGraph::from_index_edges(3, &[(0, 0), (0, 1), (1, 2), (2, 0), (1, 0), (2, 2)])
                .unwrap();
        let u0 = [0.4, -1.3, 2.2];
        let f = EdgePotential::coboundary(&g, &u0).unwrap();
        let red = livsic_reduce(&g, &f).unwrap();
        assert!(red.is_coboundary_up_to_constant);
        assert!(red.c.abs() < 1e-15);
        for k in 0..3 {
            assert!((red.u[k] - (u0[k] - u0[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_potential() {
        let g = golden_mean();
        let red = livsic_reduce(&g, &EdgePotential::constant(&g, 0.7)).unwrap();
        assert!(red.is_coboundary_up_to_constant);
        assert!((red.c - 0.7).abs() < 1e-15);
        assert!(red.u.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn golden_mean_witness() {
        let g = golden_mean();
        let f = EdgePotential::new(&g, vec![0.0, 1.0, 0.0]).unwrap();
        let red = livsic_reduce(&g, &f).unwrap();
        assert!(!red.is_coboundary_up_to_constant);
        let w = red.witness.unwrap();
        assert_eq!(w.label(&g), "1->2->1");
        assert!((w.mean(&f) - 0.5).abs() < 1e-15);
        assert_eq!(red.c, 0.0);
    }
}
