//! A fast seeded property suite over the whole library, run by the
//! `self-test` command. Each check compares two independent computations.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::flow::{
    bowen_margulis, dth_flow, flow_entropy, max_cycle_ratio, max_cycle_ratio_lawler,
    renormalized_intersection, SuspensionFlow,
};
use crate::random;
use crate::rep::{
    busemann_from_tower, contragredient, sym_power, word_attracting_flag, LengthFunctional,
};
use crate::repmetrics::{dth_reps, entropy_from_table, LengthTable};
use crate::sft::{livsic_reduce, pressure, pressure_derivative, EdgePotential, SubshiftGraph};
use crate::words::enumerate_classes;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation from the expected identity.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, worst: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        passed: worst <= tolerance,
        worst,
        tolerance,
    }
}

/// `max` that propagates NaN, so a broken computation cannot pass a check.
fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn pressure_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = random::rng(seed);
    let two = random::full_shift(2)?;
    let golden = SubshiftGraph::from_index_edges(2, &[(0, 0), (0, 1), (1, 0)])?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let exact = (pressure(&two, &EdgePotential::zero(&two))? - 2f64.ln())
        .abs()
        .max((pressure(&golden, &EdgePotential::zero(&golden))? - phi.ln()).abs());
    let (mut shift, mut deriv) = (0.0_f64, 0.0_f64);
    for _ in 0..10 {
        let g = random::irreducible_graph(&mut rng, 5, 0.3)?;
        let f = random::potential(&mut rng, &g, -1.0, 1.0)?;
        let dir = random::potential(&mut rng, &g, -1.0, 1.0)?;
        shift = worse(
            shift,
            (pressure(&g, &f.shift(0.37))? - pressure(&g, &f)? - 0.37).abs(),
        );
        let h = 1e-4;
        let fd = (pressure(&g, &f.axpy(h, &dir)?)? - pressure(&g, &f.axpy(-h, &dir)?)?) / (2.0 * h);
        deriv = worse(deriv, (fd - pressure_derivative(&g, &f, &dir)?).abs());
    }
    Ok(vec![
        check(
            "pressure of full 2-shift and golden mean shift",
            exact,
            1e-10,
        ),
        check("pressure shifts by constants", shift, 1e-10),
        check(
            "pressure derivative matches central difference",
            deriv,
            1e-6,
        ),
    ])
}

fn flow_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = random::rng(seed.wrapping_add(1));
    let (mut livsic, mut ratio, mut rigidity, mut triangle, mut abramov) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..10 {
        let g = Arc::new(random::irreducible_graph(&mut rng, 5, 0.35)?);
        let cob = random::coboundary(&mut rng, &g, 1.0)?;
        let red = livsic_reduce(&g, &cob)?;
        livsic = worse(
            livsic,
            if red.is_coboundary(1e-10) {
                red.max_residual
            } else {
                f64::INFINITY
            },
        );
        let num = random::potential(&mut rng, &g, -1.0, 1.0)?;
        let den = random::roof(&mut rng, &g, 0.5, 2.0)?;
        let howard = max_cycle_ratio(&g, &num, &den)?.value;
        let lawler = max_cycle_ratio_lawler(&g, &num, &den)?.value;
        ratio = worse(ratio, (howard - lawler).abs());
        let flows: Vec<SuspensionFlow> = (0..3)
            .map(|_| SuspensionFlow::new(Arc::clone(&g), random::roof(&mut rng, &g, 0.5, 2.0)?))
            .collect::<Result<_>>()?;
        let j = renormalized_intersection(&bowen_margulis(&flows[0])?, &flows[0], &flows[1])?;
        rigidity = worse(rigidity, 1.0 - j);
        let d = |a: usize, b: usize| dth_flow(&flows[a], &flows[b]).map(|r| r.value);
        triangle = worse(worse(triangle, d(0, 2)? - d(0, 1)? - d(1, 2)?), -d(0, 1)?);
        let h = flow_entropy(&flows[0])?;
        let scaled = flow_entropy(&flows[0].scaled(2.5)?)?;
        abramov = worse(abramov, (scaled - h / 2.5).abs());
    }
    Ok(vec![
        check("planted coboundaries are recognized", livsic, 1e-10),
        check(
            "policy iteration agrees with parametric search",
            ratio,
            1e-9,
        ),
        check(
            "renormalized intersection at Bowen-Margulis is at least 1",
            rigidity,
            1e-9,
        ),
        check(
            "flow distance is nonnegative and satisfies the triangle inequality",
            triangle,
            1e-9,
        ),
        check("flow entropy scales inversely with the roof", abramov, 1e-9),
    ])
}

fn rep_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = random::rng(seed.wrapping_add(2));
    let (mut power, mut sym, mut cocycle) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let rep = random::schottky(&mut rng)?;
        let w = random::cyclically_reduced_word(&mut rng, 2, 6)?;
        let tower = rep.tower(&w)?;
        let lambda = rep.jordan(&w)?;
        let cube = rep.jordan(&w.mul(&w)?.mul(&w)?)?;
        for (a, b) in lambda.values().iter().zip(cube.values()) {
            power = worse(power, (3.0 * a - b).abs());
        }
        let d = 4;
        let lifted = sym_power(&rep, d)?.jordan(&w)?;
        let l1 = lambda.values()[0];
        for (i, x) in lifted.values().iter().enumerate() {
            sym = worse(sym, (x - (d as f64 - 1.0 - 2.0 * i as f64) * l1).abs());
        }
        let flag = word_attracting_flag(&rep, &w)?;
        let sigma = busemann_from_tower(&tower, &flag)?;
        for (a, b) in sigma.iter().zip(lambda.values()) {
            cocycle = worse(cocycle, (a - b).abs());
        }
    }
    Ok(vec![
        check("Jordan projection is homogeneous under powers", power, 1e-8),
        check("symmetric powers spread eigenvalues evenly", sym, 1e-8),
        check(
            "Busemann cocycle at the attracting flag is the Jordan projection",
            cocycle,
            1e-8,
        ),
    ])
}

fn distance_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = random::rng(seed.wrapping_add(3));
    let rep = sym_power(&random::schottky(&mut rng)?, 3)?;
    let hilbert = LengthFunctional::preset("hilbert", 3)?;
    let cutoff = 10;
    let self_distance = dth_reps(&rep, &rep, &hilbert, cutoff)?.value.abs();
    let p = nalgebra::DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
    let conj = dth_reps(&rep, &rep.conjugate(&p)?, &hilbert, cutoff)?
        .value
        .abs();
    let dual = dth_reps(&rep, &contragredient(&rep)?, &hilbert, cutoff)?
        .value
        .abs();
    let classes = enumerate_classes(2, 11, false)?;
    let h = entropy_from_table(&LengthTable::word_length(&classes, 1.0)?)?.value;
    Ok(vec![
        check(
            "distance from a representation to itself",
            self_distance,
            1e-10,
        ),
        check("distance to a conjugate representation", conj, 1e-10),
        check("Hilbert distance to the contragredient", dual, 1e-10),
        check(
            "word-length entropy approaches log 3",
            (h / 3f64.ln() - 1.0).abs(),
            0.05,
        ),
    ])
}

/// Runs every check with instances drawn from `seed`.
pub fn self_test(seed: u64) -> Result<SelfTestReport> {
    let mut checks = pressure_checks(seed)?;
    checks.extend(flow_checks(seed)?);
    checks.extend(rep_checks(seed)?);
    checks.extend(distance_checks(seed)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelfTestReport {
        seed,
        checks,
        passed,
    })
}
