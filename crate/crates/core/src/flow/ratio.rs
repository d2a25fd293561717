//! Maximum cycle ratio `max_C Σ_C num / Σ_C den` on a strongly connected graph.
//!
//! Howard policy iteration is the primary solver; Lawler's parametric search
//! (bisection on `t` with positive-cycle detection for `num − t·den`) is the
//! fallback and the independent check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sft::{Cycle, EdgePotential, RoofFunction, SubshiftGraph};

/// Policy-iteration rounds before falling back to Lawler.
pub const HOWARD_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioMethod {
    Howard,
    Lawler,
    Brute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRatio {
    pub value: f64,
    pub cycle: Cycle,
    pub method: RatioMethod,
}

fn ratio_of(edges: &[usize], num: &[f64], den: &[f64]) -> f64 {
    let n: f64 = edges.iter().map(|&e| num[e]).sum();
    let d: f64 = edges.iter().map(|&e| den[e]).sum();
    n / d
}

fn check(g: &SubshiftGraph, num: &EdgePotential, den: &RoofFunction) -> Result<()> {
    num.check_graph(g)?;
    den.potential().check_graph(g)
}

/// Maximum cycle ratio with an attaining cycle (Howard, falling back to Lawler).
pub fn max_cycle_ratio(
    g: &SubshiftGraph,
    numerator: &EdgePotential,
    denominator: &RoofFunction,
) -> Result<CycleRatio> {
    check(g, numerator, denominator)?;
    match howard(g, numerator.values(), denominator.values()) {
        Some(edges) => Ok(CycleRatio {
            value: ratio_of(&edges, numerator.values(), denominator.values()),
            cycle: Cycle::new(g, edges)?,
            method: RatioMethod::Howard,
        }),
        None => max_cycle_ratio_lawler(g, numerator, denominator),
    }
}

/// Policy iteration; `None` when the round budget is exhausted.
fn howard(g: &SubshiftGraph, num: &[f64], den: &[f64]) -> Option<Vec<usize>> {
    let n = g.num_states();
    let scale = num.iter().chain(den).fold(1.0_f64, |a, x| a.max(x.abs()));
    let eps = 1e-12 * scale;
    // initial policy: best single-edge ratio, smallest edge index on ties
    let mut policy: Vec<usize> = (0..n)
        .map(|v| {
            let mut best = g.out_edges(v)[0];
            for &e in g.out_edges(v) {
                if num[e] / den[e] > num[best] / den[best] {
                    best = e;
                }
            }
            best
        })
        .collect();

    for _ in 0..HOWARD_MAX_ITER {
        let (eta, x, cycles) = evaluate_policy(g, &policy, num, den);
        let mut changed = false;
        // improve the cycle value first
        for v in 0..n {
            let mut best = policy[v];
            for &e in g.out_edges(v) {
                let u = g.edge(e).1;
                if eta[u] > eta[g.edge(best).1] + eps {
                    best = e;
                }
            }
            if eta[g.edge(best).1] > eta[v] + eps {
                policy[v] = best;
                changed = true;
            }
        }
        if !changed {
            // then the bias among edges staying at the same value
            for v in 0..n {
                let mut best = policy[v];
                let mut best_val = x[v];
                for &e in g.out_edges(v) {
                    let u = g.edge(e).1;
                    if (eta[u] - eta[v]).abs() <= eps {
                        let val = num[e] - eta[v] * den[e] + x[u];
                        if val > best_val + eps {
                            best_val = val;
                            best = e;
                        }
                    }
                }
                if best != policy[v] {
                    policy[v] = best;
                    changed = true;
                }
            }
        }
        if !changed {
            let best = cycles
                .into_iter()
                .max_by(|a, b| {
                    ratio_of(a, num, den)
                        .total_cmp(&ratio_of(b, num, den))
                        // prefer the earlier cycle on exact ties
                        .then_with(|| b.cmp(a))
                })
                .expect("policy graph has a cycle");
            return Some(best);
        }
    }
    None
}

/// Values `η`, biases `x` and the cycles of the functional graph of `policy`.
fn evaluate_policy(
    g: &SubshiftGraph,
    policy: &[usize],
    num: &[f64],
    den: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<usize>>) {
    let n = g.num_states();
    let next = |v: usize| g.edge(policy[v]).1;
    let mut eta = vec![f64::NAN; n];
    let mut x = vec![f64::NAN; n];
    let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = next(v);
        }
        if state[v] == 1 {
            // new cycle starting at v
            let pos = path.iter().position(|&w| w == v).expect("v is on the path");
            let cyc_nodes = &path[pos..];
            let edges: Vec<usize> = cyc_nodes.iter().map(|&w| policy[w]).collect();
            let value = ratio_of(&edges, num, den);
            let anchor = *cyc_nodes.iter().min().expect("nonempty cycle");
            let apos = cyc_nodes
                .iter()
                .position(|&w| w == anchor)
                .expect("anchor on cycle");
            let k = cyc_nodes.len();
            eta[anchor] = value;
            x[anchor] = 0.0;
            // walk the cycle backwards from the anchor
            for step in 1..k {
                let w = cyc_nodes[(apos + k - step) % k];
                let e = policy[w];
                eta[w] = value;
                x[w] = num[e] - value * den[e] + x[next(w)];
            }
            for &w in cyc_nodes {
                state[w] = 2;
            }
            cycles.push(edges);
            path.truncate(pos);
        }
        // tree nodes, nearest to the resolved part first
        for &w in path.iter().rev() {
            let e = policy[w];
            let u = next(w);
            eta[w] = eta[u];
            x[w] = num[e] - eta[w] * den[e] + x[u];
            state[w] = 2;
        }
    }
    (eta, x, cycles)
}

/// Lawler parametric search; independent of the policy-iteration path.
pub fn max_cycle_ratio_lawler(
    g: &SubshiftGraph,
    numerator: &EdgePotential,
    denominator: &RoofFunction,
) -> Result<CycleRatio> {
    check(g, numerator, denominator)?;
    let num = numerator.values();
    let den = denominator.values();
    let ratios: Vec<f64> = num.iter().zip(den).map(|(a, b)| a / b).collect();
    let lo0 = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = positive_cycle(g, num, den, lo0 - 1.0).ok_or_else(|| {
        Error::ConvergenceFailure("no cycle found below the minimal edge ratio".into())
    })?;
    let mut lo = ratio_of(&best, num, den);
    let tol = 1e-15 * hi.abs().max(lo.abs()).max(1.0);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match positive_cycle(g, num, den, mid) {
            Some(c) if ratio_of(&c, num, den) > lo => {
                lo = ratio_of(&c, num, den);
                best = c;
                if lo > hi {
                    hi = lo;
                }
            }
            _ => hi = mid,
        }
    }
    Ok(CycleRatio {
        value: lo,
        cycle: Cycle::new(g, best)?,
        method: RatioMethod::Lawler,
    })
}

/// A cycle with `Σ (num − t·den) > 0`, found by Bellman–Ford on longest paths.
fn positive_cycle(g: &SubshiftGraph, num: &[f64], den: &[f64], t: f64) -> Option<Vec<usize>> {
    let n = g.num_states();
    let w: Vec<f64> = num.iter().zip(den).map(|(a, b)| a - t * b).collect();
    let eps = 1e-14 * w.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    let mut dist = vec![0.0; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last_relaxed = None;
    for _ in 0..=n {
        last_relaxed = None;
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            if dist[i] + w[e] > dist[j] + eps {
                dist[j] = dist[i] + w[e];
                pred[j] = Some(e);
                last_relaxed = Some(j);
            }
        }
        last_relaxed?;
    }
    // relaxation in round n + 1 implies a positive cycle in the predecessor graph
    let mut v = last_relaxed?;
    for _ in 0..n {
        v = g.edge(pred[v]?).0;
    }
    let start = v;
    let mut edges = Vec::new();
    loop {
        let e = pred[v]?;
        edges.push(e);
        v = g.edge(e).0;
        if v == start {
            break;
        }
        if edges.len() > n {
            return None;
        }
    }
    edges.reverse();
    let total: f64 = edges.iter().map(|&e| w[e]).sum();
    (total > 0.0).then_some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> SubshiftGraph {
        SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap()
    }

    #[test]
    fn equal_num_den() {
        let g = golden_mean();
        let den = RoofFunction::from_values(&g, vec![1.0, 2.0, 3.0]).unwrap();
        let r = max_cycle_ratio(&g, den.potential(), &den).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_cycle_graph() {
        let g = SubshiftGraph::from_index_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let num = EdgePotential::new(&g, vec![1.0, -4.0, 2.0]).unwrap();
        let den = RoofFunction::from_values(&g, vec![1.0, 2.0, 3.0]).unwrap();
        assert!((max_cycle_ratio(&g, &num, &den).unwrap().value + 1.0 / 6.0).abs() < 1e-15);
        assert!((max_cycle_ratio_lawler(&g, &num, &den).unwrap().value + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn golden_mean_ratio() {
        let g = golden_mean();
        let num = EdgePotential::new(&g, vec![1.0, 3.0, 1.0]).unwrap();
        let den = RoofFunction::from_values(&g, vec![1.0, 1.0, 1.0]).unwrap();
        let r = max_cycle_ratio(&g, &num, &den).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.cycle.label(&g), "1->2->1");
        let l = max_cycle_ratio_lawler(&g, &num, &den).unwrap();
        assert_eq!(l.value, 2.0);
    }
}
