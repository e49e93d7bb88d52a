use proptest::prelude::*;
use qsat_core::blowup::{decouple, delta_lift, lift_instance};
use qsat_core::filtration::{greedy_filtration, validate, ViolationKind};
use qsat_core::hypergraph::{construct_sdr_deg2, find_sdr, Hypergraph, Matching};
use qsat_core::instance::{residual, sample_generic, ProductState};
use rand::SeedableRng;

fn hypergraph(max_n: usize, max_m: usize, k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Hypergraph> {
    (3..=max_n).prop_flat_map(move |n| {
        let kk = k.clone();
        let edge = kk.prop_flat_map(move |k| proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), k.min(n)));
        proptest::collection::vec(edge.prop_shuffle(), 0..=max_m).prop_map(move |edges| Hypergraph::new(n, edges).unwrap())
    })
}

/// Random hypergraph with every vertex of degree at most 2 and edges of size at least 2.
fn degree_two(seed: u64, n: usize) -> Hypergraph {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (1..=n).flat_map(|v| std::iter::repeat(v).take(rng.random_range(0..=2))).collect();
    stubs.shuffle(&mut rng);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut target = rng.random_range(2..=4);
    for v in stubs {
        if current.contains(&v) {
            continue;
        }
        current.push(v);
        if current.len() == target {
            edges.push(std::mem::take(&mut current));
            target = rng.random_range(2..=4);
        }
    }
    Hypergraph::new(n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matching_or_certificate(g in hypergraph(10, 14, 1..=4)) {
        match find_sdr(&g) {
            Matching::Sdr(s) => prop_assert!(s.is_valid_for(&g)),
            Matching::Hall(h) => prop_assert!(h.is_valid_for(&g)),
        }
    }

    #[test]
    fn json_round_trip(g in hypergraph(8, 8, 1..=3)) {
        prop_assert_eq!(Hypergraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn instance_json_is_bit_exact(g in hypergraph(8, 8, 1..=3), seed in 0u64..1000) {
        let inst = sample_generic(&g, seed);
        let back: qsat_core::QsatInstance = serde_json::from_str(&inst.to_json()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn greedy_is_structurally_valid(g in hypergraph(9, 9, 3..=3)) {
        let f = greedy_filtration(&g);
        // Promoted vertices may close an edge inside the foundation; nothing else can break.
        prop_assert!(validate(&g, &f)
            .iter()
            .all(|v| matches!(v.kind, ViolationKind::RMap | ViolationKind::EdgeInsideFoundation)));
    }

    #[test]
    fn decoupling_invariants(g in hypergraph(8, 8, 3..=3), seed in 0u64..50) {
        let f = greedy_filtration(&g);
        prop_assume!(validate(&g, &f).is_empty());
        let bu = decouple(&g, &f).unwrap();
        prop_assert_eq!(bu.n_tilde(), g.m() + f.b());
        // p is onto and sends lifted edges to their images.
        let mut hit = vec![false; g.n];
        bu.p.iter().for_each(|&v| hit[v - 1] = true);
        prop_assert!(hit.iter().all(|&h| h));
        for (i, e) in bu.gtilde.edges.iter().enumerate() {
            let image: Vec<usize> = e.iter().map(|&x| bu.p[x - 1]).collect();
            prop_assert_eq!(&image, &g.edges[bu.edge_map[i]]);
        }
        prop_assert!(validate(&bu.gtilde, &bu.filtration_tilde).is_empty());
        prop_assert!(bu.filtration_tilde.steps.iter().all(|s| s.adds.is_some()));
        let inst = sample_generic(&g, seed);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = ProductState::random(g.n, &mut rng);
        let a = residual(&inst, &s).unwrap();
        let b = residual(&lift_instance(&bu, &inst), &delta_lift(&bu, &s)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn filtration_json_round_trip(g in hypergraph(8, 8, 3..=3)) {
        let f = greedy_filtration(&g);
        prop_assume!(validate(&g, &f).is_empty());
        let json = serde_json::to_string(&f.spec()).unwrap();
        let back: qsat_core::FiltrationSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.build(&g).unwrap(), f);
    }
}

#[test]
fn deg2_construction_fuzz() {
    for seed in 0..200 {
        let g = degree_two(seed, 5 + (seed as usize % 36));
        let sdr = construct_sdr_deg2(&g).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(sdr.is_valid_for(&g), "seed {seed}");
    }
}
