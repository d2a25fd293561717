use std::sync::Arc;

use proptest::prelude::*;
use thurston::flow::*;
use thurston::random;
use thurston::sft::*;
use thurston::Error;

fn golden_mean() -> Arc<SubshiftGraph> {
    Arc::new(SubshiftGraph::new(&["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap())
}

/// Maximum ratio over every cycle of length at most the number of states,
/// which covers all simple cycles.
fn brute_ratio(g: &SubshiftGraph, num: &EdgePotential, den: &RoofFunction) -> f64 {
    enumerate_cycles(g, g.num_states())
        .unwrap()
        .iter()
        .map(|c| c.sum(num) / c.sum(den.potential()))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Entropy by bisection on the sign of the pressure, independent of the
/// Newton iteration in the library.
fn bisection_entropy(flow: &SuspensionFlow) -> f64 {
    let p = |h: f64| pressure(flow.base(), &flow.roof().potential().scale(-h)).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    while p(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_flow(seed: u64, n: usize) -> SuspensionFlow {
    let mut rng = random::rng(seed);
    let g = random::irreducible_graph(&mut rng, n, 0.4).unwrap();
    let roof = random::roof(&mut rng, &g, 0.5, 2.0).unwrap();
    SuspensionFlow::new(g, roof).unwrap()
}

fn roof_on(flow: &SuspensionFlow, values: Vec<f64>) -> SuspensionFlow {
    SuspensionFlow::new(
        flow.base_arc(),
        RoofFunction::from_values(flow.base(), values).unwrap(),
    )
    .unwrap()
}

#[test]
fn entropy_examples() {
    let full = Arc::new(random::full_shift(2).unwrap());
    let unit = SuspensionFlow::from_values(full.clone(), vec![1.0; 4]).unwrap();
    assert!((flow_entropy(&unit).unwrap() - 2f64.ln()).abs() < 1e-12);
    let slow = SuspensionFlow::from_values(full, vec![2.0; 4]).unwrap();
    assert!((flow_entropy(&slow).unwrap() - 2f64.ln() / 2.0).abs() < 1e-12);

    // Periods 1 and 5 on the two prime cycles give 1 = e^{-h} + e^{-5h},
    // which has no closed form, so compare with bisection.
    let gm = golden_mean();
    let flow = SuspensionFlow::from_values(gm, vec![1.0, 2.0, 3.0]).unwrap();
    assert!((flow_entropy(&flow).unwrap() - bisection_entropy(&flow)).abs() < 1e-12);

    let err = SuspensionFlow::from_values(
        Arc::new(random::full_shift(2).unwrap()),
        vec![1.0, 0.0, 1.0, 1.0],
    )
    .unwrap_err();
    assert!(matches!(err, Error::NonPositiveRoof { .. }), "{err}");
}

#[test]
fn periods_and_intersections() {
    let gm = golden_mean();
    let f1 = SuspensionFlow::from_values(gm.clone(), vec![1.0, 2.0, 3.0]).unwrap();
    let f2 = SuspensionFlow::from_values(gm.clone(), vec![2.0, 1.0, 1.0]).unwrap();
    let two = Cycle::from_states(&gm, &[0, 1]).unwrap();
    assert_eq!(period(&f1, &two).unwrap(), 5.0);
    let m = cycle_measure(&gm, &two).unwrap();
    assert!((intersection(&m, &f1, &f2).unwrap() - 2.0 / 5.0).abs() < 1e-15);
    let j = renormalized_intersection(&m, &f1, &f2).unwrap();
    let h = (f2.entropy().unwrap(), f1.entropy().unwrap());
    assert!((j - h.0 / h.1 * 0.4).abs() < 1e-12);

    let other = SuspensionFlow::from_values(Arc::new(random::full_shift(2).unwrap()), vec![1.0; 4])
        .unwrap();
    assert!(matches!(
        intersection(&m, &f1, &other),
        Err(Error::GraphMismatch)
    ));
}

#[test]
fn ratio_examples() {
    let gm = golden_mean();
    let num = EdgePotential::new(&gm, vec![1.0, 4.0, 0.0]).unwrap();
    let den = RoofFunction::constant(&gm, 1.0).unwrap();
    let r = max_cycle_ratio(&gm, &num, &den).unwrap();
    assert!((r.value - 2.0).abs() < 1e-12);
    assert_eq!(r.cycle.len(), 2);
    let l = max_cycle_ratio_lawler(&gm, &num, &den).unwrap();
    assert!((l.value - 2.0).abs() < 1e-12);
    assert_eq!(l.method, RatioMethod::Lawler);
}

#[test]
fn distance_examples() {
    let flow = SuspensionFlow::from_values(golden_mean(), vec![1.0, 2.0, 3.0]).unwrap();
    assert_eq!(dth_flow(&flow, &flow).unwrap().value, 0.0);
    let triple = flow.scaled(3.0).unwrap();
    let report = dth_flow(&flow, &triple).unwrap();
    assert_eq!(report.value, 0.0);
    assert!(report.projectively_equivalent);
    assert!((report.h1 / report.h2 - 3.0).abs() < 1e-12);
}

#[test]
fn asymmetric_pair_on_full_three_shift() {
    let full = Arc::new(random::full_shift(3).unwrap());
    let mut rng = random::rng(3);
    let mut found = false;
    for _ in 0..20 {
        let a = SuspensionFlow::new(
            full.clone(),
            random::roof(&mut rng, &full, 0.5, 2.0).unwrap(),
        )
        .unwrap();
        let b = SuspensionFlow::new(
            full.clone(),
            random::roof(&mut rng, &full, 0.5, 2.0).unwrap(),
        )
        .unwrap();
        let ab = dth_flow(&a, &b).unwrap().value;
        let ba = dth_flow(&b, &a).unwrap().value;
        if (ab - ba).abs() > 1e-3 {
            found = true;
            break;
        }
    }
    assert!(found);
}

#[test]
fn finsler_norm_is_one_sided_derivative() {
    for seed in 0..10 {
        let flow = random_flow(seed, 4);
        let mut rng = random::rng(1000 + seed);
        let g = random::potential(&mut rng, flow.base(), -1.0, 1.0).unwrap();
        let tangent = FlowTangent::project(&flow, &g).unwrap();
        let norm = finsler_norm_flow(&flow, &tangent).unwrap();
        let start = renormalized_path(&flow, &tangent, 0.0).unwrap();
        let d = |s: f64| {
            dth_flow(&start, &renormalized_path(&flow, &tangent, s).unwrap())
                .unwrap()
                .value
        };
        // Richardson extrapolation of the forward quotient.
        let s = 1e-3;
        let derivative = 2.0 * d(s / 2.0) / (s / 2.0) - d(s) / s;
        assert!((derivative - norm).abs() < 2e-4, "{derivative} vs {norm}");
    }
}

#[test]
fn pressure_norm_matches_variance_oracle() {
    // Curvature of s ↦ P(−r̂ + s g) is the asymptotic variance of g, so a
    // wider difference of the pressure itself must agree.
    for seed in 0..5 {
        let flow = random_flow(seed, 4);
        let mut rng = random::rng(2000 + seed);
        let g = random::potential(&mut rng, flow.base(), -1.0, 1.0).unwrap();
        let tangent = FlowTangent::project(&flow, &g).unwrap();
        let norm = pressure_norm_flow(&flow, &tangent).unwrap();
        let base = flow.normalized_roof().unwrap().scale(-1.0);
        let dir = tangent.direction();
        let p = |s: f64| pressure(flow.base(), &base.axpy(s, dir).unwrap()).unwrap();
        let step = 1e-3;
        let curvature = (p(step) - 2.0 * p(0.0) + p(-step)) / (step * step);
        let m = bowen_margulis(&flow).unwrap();
        let mean_roof = integrate(&m, &flow.normalized_roof().unwrap()).unwrap();
        let expected = (curvature / mean_roof).sqrt();
        assert!(
            (norm - expected).abs() < 1e-4 * expected.max(1.0),
            "{norm} vs {expected}"
        );
    }
}

fn flow_pair() -> impl Strategy<Value = (SuspensionFlow, SuspensionFlow, SuspensionFlow)> {
    (any::<u64>(), 2usize..7).prop_map(|(seed, n)| {
        let mut rng = random::rng(seed);
        // A single cycle has zero entropy and no normalized roof.
        let g = loop {
            let g = random::irreducible_graph(&mut rng, n, 0.4).unwrap();
            if topological_entropy(&g) > 1e-3 {
                break Arc::new(g);
            }
        };
        let mut make = || {
            SuspensionFlow::new(g.clone(), random::roof(&mut rng, &g, 0.3, 3.0).unwrap()).unwrap()
        };
        (make(), make(), make())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_agrees_with_bisection_and_scales((f, _, _) in flow_pair(), c in 0.2f64..8.0) {
        let h = f.entropy().unwrap();
        prop_assert!((h - bisection_entropy(&f)).abs() < 1e-10);
        let hc = f.scaled(c).unwrap().entropy().unwrap();
        prop_assert!((hc - h / c).abs() < 1e-9 * h.max(1.0));
    }

    #[test]
    fn ratio_solvers_agree((f, _, _) in flow_pair(), seed in any::<u64>()) {
        let g = f.base();
        let mut rng = random::rng(seed);
        let num = random::potential(&mut rng, g, -2.0, 2.0).unwrap();
        let den = f.roof();
        let howard = max_cycle_ratio(g, &num, den).unwrap();
        let lawler = max_cycle_ratio_lawler(g, &num, den).unwrap();
        let brute = brute_ratio(g, &num, den);
        prop_assert!((howard.value - brute).abs() < 1e-9);
        prop_assert!((lawler.value - brute).abs() < 1e-9);
        prop_assert!((howard.cycle.sum(&num) / howard.cycle.sum(den.potential()) - brute).abs() < 1e-9);
    }

    #[test]
    fn rigidity_inequality((f1, f2, _) in flow_pair(), c in 0.3f64..4.0, planted in any::<bool>()) {
        let f2 = if planted {
            let mut rng = random::rng(f1.base().fingerprint());
            let cob = random::coboundary(&mut rng, f1.base(), 0.1).unwrap();
            let values = f1.roof().potential().scale(c).add(&cob).unwrap();
            if values.min() <= 0.0 {
                return Ok(());
            }
            roof_on(&f1, values.values().to_vec())
        } else {
            f2
        };
        let m = bowen_margulis(&f1).unwrap();
        let j = renormalized_intersection(&m, &f1, &f2).unwrap();
        prop_assert!(j >= 1.0 - 1e-9, "{j}");
        let equivalent = projectively_equivalent(&f1, &f2).unwrap().0;
        prop_assert_eq!(equivalent, planted);
        if planted {
            prop_assert!((j - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn distance_axioms((a, b, c) in flow_pair()) {
        let ab = dth_flow(&a, &b).unwrap();
        let bc = dth_flow(&b, &c).unwrap().value;
        let ac = dth_flow(&a, &c).unwrap().value;
        prop_assert!(ab.value >= -1e-12);
        prop_assert!(ac <= ab.value + bc + 1e-9);
        prop_assert_eq!(ab.value == 0.0, ab.projectively_equivalent);
        // The attaining cycle realizes the period ratio.
        let ratio = period(&b, &ab.cycle).unwrap() / period(&a, &ab.cycle).unwrap();
        prop_assert!((ratio - ab.period_ratio).abs() < 1e-12 * ratio);
        for cyc in enumerate_cycles(a.base(), 5).unwrap() {
            let r = period(&b, &cyc).unwrap() / period(&a, &cyc).unwrap();
            prop_assert!(r <= ab.period_ratio * (1.0 + 1e-12));
        }
    }

    #[test]
    fn finsler_norm_is_nonnegative_and_homogeneous((f, _, _) in flow_pair(), seed in any::<u64>(), t in 0.1f64..5.0) {
        let mut rng = random::rng(seed);
        let g = random::potential(&mut rng, f.base(), -1.0, 1.0).unwrap();
        let tangent = FlowTangent::project(&f, &g).unwrap();
        let scaled = FlowTangent::new(&f, tangent.direction().scale(t)).unwrap();
        let n1 = finsler_norm_flow(&f, &tangent).unwrap();
        let nt = finsler_norm_flow(&f, &scaled).unwrap();
        prop_assert!(n1 >= -1e-12);
        prop_assert!((nt - t * n1).abs() < 1e-9 * (1.0 + nt.abs()));
    }
}
