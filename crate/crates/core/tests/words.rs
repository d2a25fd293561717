use std::collections::BTreeSet;

use proptest::prelude::*;
use thurston::random;
use thurston::sft::{enumerate_cycles, topological_entropy, RoofFunction};
use thurston::words::*;
use thurston::Error;

fn word(rank: usize, s: &str) -> Word {
    Word::parse(rank, s).unwrap()
}

/// Free reduction by repeated left-to-right scans, deliberately naive.
fn naive_reduce(letters: &[i32]) -> Vec<i32> {
    let mut v = letters.to_vec();
    loop {
        match (1..v.len()).find(|&i| v[i] == -v[i - 1]) {
            Some(i) => {
                v.drain(i - 1..=i);
            }
            None => return v,
        }
    }
}

/// Canonical key of a letter list: strip inverse end pairs, then take the
/// smallest rotation under the order a < A < b < B.
fn naive_class(letters: &[i32]) -> Vec<usize> {
    let mut v = naive_reduce(letters);
    while v.len() > 1 && v[0] == -v[v.len() - 1] {
        v = v[1..v.len() - 1].to_vec();
    }
    let keys: Vec<usize> = v.iter().map(|&x| letter_index(x)).collect();
    (0..keys.len())
        .map(|r| [&keys[r..], &keys[..r]].concat())
        .min()
        .unwrap_or_default()
}

/// Every cyclically reduced word of length `n`, deduplicated by rotation.
fn brute_classes(rank: usize, n: usize) -> BTreeSet<Vec<usize>> {
    let m = 2 * rank;
    let mut out = BTreeSet::new();
    let total = m.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let keys: Vec<usize> = (0..n)
            .map(|_| {
                let k = c % m;
                c /= m;
                k
            })
            .collect();
        let ok = (0..n).all(|i| keys[(i + 1) % n] != keys[i] ^ 1) || n == 1;
        if ok {
            out.insert(naive_class(
                &keys
                    .iter()
                    .map(|&k| letter_from_index(k))
                    .collect::<Vec<_>>(),
            ));
        }
    }
    out
}

#[test]
fn reduction_examples() {
    assert!(word(2, "aA").reduce().is_empty());
    assert_eq!(word(2, "abBa").reduce(), word(2, "aa"));
    assert!(!word(2, "abBa").is_reduced());
    assert!(matches!(
        Word::parse(2, "ac"),
        Err(Error::LetterOutOfRange { .. })
    ));
}

#[test]
fn canonical_class_examples() {
    assert_eq!(
        canonical_class(&word(2, "baB")).unwrap(),
        CyclicWord::parse(2, "a").unwrap()
    );
    assert_eq!(
        canonical_class(&word(2, "ab")).unwrap(),
        canonical_class(&word(2, "ba")).unwrap()
    );
    assert!(matches!(
        canonical_class(&word(2, "bB")),
        Err(Error::IdentityElement)
    ));
}

#[test]
fn enumeration_examples() {
    let one: Vec<String> = enumerate_classes(2, 1, false)
        .unwrap()
        .iter()
        .map(|c| c.to_string())
        .collect();
    assert_eq!(one, vec!["a", "A", "b", "B"]);
    let two = enumerate_classes(2, 2, false).unwrap();
    assert_eq!(two.iter().filter(|c| c.len() == 2).count(), 8);
    let err = enumerate_classes_with(
        2,
        10,
        EnumerationOptions {
            cap: 100,
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { cap: 100 }));
}

#[test]
fn enumeration_matches_brute_force() {
    for rank in 2..=3 {
        let max = if rank == 2 { 7 } else { 5 };
        let classes = enumerate_classes(rank, max, false).unwrap();
        for n in 1..=max {
            let got: BTreeSet<Vec<usize>> = classes
                .iter()
                .filter(|c| c.len() == n)
                .map(|c| c.letter_indices().iter().map(|&i| usize::from(i)).collect())
                .collect();
            let expected = brute_classes(rank, n);
            assert_eq!(got, expected, "rank {rank}, length {n}");
            assert_eq!(class_count(rank, n, false), expected.len() as u128);
        }
        // Length, then lexicographic order, with no repeats.
        assert!(classes.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn primitive_enumeration_skips_powers() {
    let all = enumerate_classes(2, 8, false).unwrap();
    let prim = enumerate_classes(2, 8, true).unwrap();
    let prim_set: BTreeSet<_> = prim.iter().cloned().collect();
    for c in &all {
        assert_eq!(prim_set.contains(c), c.is_primitive());
    }
    for c in &prim {
        for n in 2..=4 {
            assert!(!prim_set.contains(&c.pow(n)));
        }
    }
    for n in 1..=8 {
        let count = prim.iter().filter(|c| c.len() == n).count() as u128;
        assert_eq!(class_count(2, n, true), count);
    }
}

#[test]
fn class_growth_rate_is_log_three() {
    let counts: Vec<f64> = (1..=14).map(|n| class_count(2, n, false) as f64).collect();
    let cumulative: Vec<f64> = counts
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let xs: Vec<f64> = (8..=14).map(|n| n as f64).collect();
    // Classes of length n number about 3ⁿ/n, so n·N(n) grows like 3ⁿ.
    let ys: Vec<f64> = (8..=14)
        .map(|n| (n as f64 * cumulative[n - 1]).ln())
        .collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope / 3f64.ln() - 1.0).abs() < 0.03, "{slope}");
}

#[test]
fn coding_examples() {
    let g = free_group_coding(2).unwrap();
    assert_eq!((g.num_states(), g.num_edges()), (4, 12));
    assert!((topological_entropy(&g) - 3f64.ln()).abs() < 1e-12);
    let g3 = free_group_coding(3).unwrap();
    assert!((topological_entropy(&g3) - 5f64.ln()).abs() < 1e-12);

    let a = class_to_cycle(&g, &CyclicWord::parse(2, "a").unwrap()).unwrap();
    assert_eq!(a.states(&g), vec![0]);
    let ab = class_to_cycle(&g, &CyclicWord::parse(2, "ab").unwrap()).unwrap();
    assert_eq!(ab.states(&g), vec![0, 2]);
    assert!(matches!(
        class_to_cycle(&g, &CyclicWord::parse(3, "c").unwrap()),
        Err(Error::RankMismatch { .. })
    ));

    let mut rng = random::rng(4);
    let w = random::cyclically_reduced_word(&mut rng, 2, 10).unwrap();
    let c = class_to_cycle(&g, &canonical_class(&w).unwrap()).unwrap();
    assert_eq!(
        c.sum(RoofFunction::constant(&g, 1.0).unwrap().potential()),
        10.0
    );
}

#[test]
fn classes_biject_with_coding_cycles() {
    let g = free_group_coding(2).unwrap();
    let from_classes: BTreeSet<Vec<usize>> = enumerate_classes(2, 6, false)
        .unwrap()
        .iter()
        .map(|c| {
            let cyc = class_to_cycle(&g, c).unwrap();
            let mut e = cyc.edges().to_vec();
            let r = (0..e.len())
                .min_by_key(|&r| [&e[r..], &e[..r]].concat())
                .unwrap();
            e.rotate_left(r);
            e
        })
        .collect();
    let from_cycles: BTreeSet<Vec<usize>> = enumerate_cycles(&g, 6)
        .unwrap()
        .iter()
        .map(|c| {
            let mut e = c.edges().to_vec();
            let r = (0..e.len())
                .min_by_key(|&r| [&e[r..], &e[..r]].concat())
                .unwrap();
            e.rotate_left(r);
            e
        })
        .collect();
    assert_eq!(
        from_classes.len(),
        enumerate_classes(2, 6, false).unwrap().len()
    );
    assert_eq!(from_classes, from_cycles);
}

#[test]
fn conjugation_invariance_over_many_pairs() {
    let mut rng = random::rng(10);
    for i in 0..10_000 {
        let w = random::reduced_word(&mut rng, 2, 1 + i % 12).unwrap();
        let u = random::reduced_word(&mut rng, 2, i % 13).unwrap();
        let c = canonical_class(&w).unwrap();
        assert_eq!(canonical_class(&w.conjugate_by(&u).unwrap()).unwrap(), c);
    }
}

fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    let r = rank as i32;
    prop::collection::vec(
        (1..=r, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }),
        0..max_len,
    )
}

proptest! {
    #[test]
    fn reduce_matches_naive_oracle(v in letters(3, 20)) {
        let w = Word::new(3, v.clone()).unwrap();
        let r = w.reduce();
        prop_assert_eq!(r.letters().to_vec(), naive_reduce(&v));
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(w.mul(&w.inverse()).unwrap().is_empty());
    }

    #[test]
    fn canonical_class_matches_oracle(v in letters(2, 14), u in letters(2, 8)) {
        let w = Word::new(2, v.clone()).unwrap();
        let key = naive_class(&v);
        match canonical_class(&w) {
            Ok(c) => {
                let got: Vec<usize> = c.letter_indices().iter().map(|&i| usize::from(i)).collect();
                prop_assert_eq!(&got, &key);
                prop_assert_eq!(canonical_class(&c.to_word()).unwrap(), c.clone());
                let u = Word::new(2, u).unwrap();
                prop_assert_eq!(canonical_class(&w.conjugate_by(&u).unwrap()).unwrap(), c.clone());
                let root = c.primitive_root();
                prop_assert_eq!(root.pow(c.power_exponent()), c.clone());
                prop_assert_eq!(c.inverse().inverse(), c);
            }
            Err(e) => {
                prop_assert!(matches!(e, Error::IdentityElement));
                prop_assert!(key.is_empty());
            }
        }
    }

    #[test]
    fn display_round_trips(v in letters(4, 16)) {
        let w = Word::new(4, v).unwrap().reduce();
        prop_assert_eq!(Word::parse(4, &w.to_string()).unwrap(), w.clone());
        if let Ok(c) = canonical_class(&w) {
            prop_assert_eq!(CyclicWord::parse(4, &c.to_string()).unwrap(), c);
        }
    }
}
