use qsat_core::blowup::decouple;
use qsat_core::families::{self, Family};
use qsat_core::hypergraph::{find_sdr, structural_predicates, Hypergraph};
use qsat_core::instance::{residual, sample_generic, Constraint, ProductState, QsatInstance};
use qsat_core::oracle::{exact_satisfiable, verify_state};
use qsat_core::solver_bounded::{algorithm_a, BoundedOutcome};
use qsat_core::transfer::{build_qualifiers, build_transfer_functions, qualifier_degree_violations, transfer_degree_violations};
use qsat_core::{solve, SolveConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn guaranteed() -> Vec<Family> {
    vec![
        families::semicycle(6, 3).unwrap(),
        families::crash(2, 3).unwrap(),
        families::crash(3, 3).unwrap(),
        families::modified_torus(2, 3).unwrap(),
        families::modified_torus(3, 3).unwrap(),
        families::fir_tree(2, 3).unwrap(),
        families::chain(5, 3).unwrap(),
    ]
}

#[test]
fn guaranteed_families_solve_and_verify() {
    for fam in guaranteed() {
        let f = fam.filtration.as_ref().unwrap();
        let slack = if fam.name.starts_with("chain") { 0 } else { 1 };
        assert_eq!(fam.b(), Some(fam.n() - fam.m() + slack), "{}", fam.name);
        for seed in 0..5 {
            let inst = sample_generic(&fam.hypergraph, seed);
            let report = solve(&fam.hypergraph, f, &inst, &SolveConfig::default()).unwrap();
            let state = report.state.as_ref().unwrap_or_else(|| panic!("{} seed {seed}: {}", fam.name, report.message));
            assert!(report.residual <= 1e-8, "{} seed {seed}: {}", fam.name, report.residual);
            assert!(!report.best_effort);
            if fam.n() <= 12 {
                let check = verify_state(&inst, state).unwrap();
                assert!(check <= 1e-6, "{} seed {seed}: oracle {check}", fam.name);
            }
        }
    }
}

#[test]
fn degree_and_term_bounds_hold() {
    for fam in guaranteed() {
        let f = fam.filtration.as_ref().unwrap();
        let bu = decouple(&fam.hypergraph, f).unwrap();
        let inst = sample_generic(&fam.hypergraph, 3);
        let g = build_transfer_functions(&bu, &inst);
        let h = build_qualifiers(&bu, &g);
        assert!(transfer_degree_violations(&g, f.b()).is_empty(), "{}", fam.name);
        assert!(qualifier_degree_violations(&h, f.b(), f.radius).is_empty(), "{}", fam.name);
        for p in g.iter().flat_map(|gi| [&gi.0, &gi.1]) {
            let cap: u64 = p.degree_vector().iter().map(|&d| d as u64 + 1).product();
            assert!(p.term_count() as u64 <= cap, "{}", fam.name);
        }
    }
}

#[test]
fn small_type_implies_sdr() {
    let mut all = guaranteed();
    all.extend([families::torus(&[3, 3]).unwrap(), families::running_example(), families::cycle(7, 3).unwrap()]);
    for fam in all {
        let k = fam.hypergraph.uniformity().unwrap();
        if let Some(b) = fam.b() {
            if b + fam.m() < fam.n() + k {
                assert!(find_sdr(&fam.hypergraph).sdr().is_some(), "{}", fam.name);
            }
        }
    }
}

/// Exhaustive check that no linear 3-uniform hypergraph with `m = n` exists below seven vertices.
#[test]
fn linear_square_triple_systems_need_seven_vertices() {
    fn extend(triples: &[[usize; 3]], chosen: &mut Vec<usize>, from: usize, want: usize) -> bool {
        if chosen.len() == want {
            return true;
        }
        (from..triples.len()).any(|t| {
            let ok = chosen.iter().all(|&c| triples[c].iter().filter(|v| triples[t].contains(v)).count() <= 1);
            ok && {
                chosen.push(t);
                let found = extend(triples, chosen, t + 1, want);
                chosen.pop();
                found
            }
        })
    }
    for n in 3..=7 {
        let mut triples = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    triples.push([a, b, c]);
                }
            }
        }
        assert_eq!(extend(&triples, &mut Vec::new(), 0, n), n == 7, "n = {n}");
    }
    let fano = families::fano();
    assert!(structural_predicates(&fano.hypergraph).linear);
    assert_eq!(fano.n(), fano.m());
}

/// Mixed-arity hypergraph with every vertex of degree at most two.
fn bounded_instance(seed: u64) -> QsatInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=9);
    let mut stubs: Vec<usize> = (1..=n).flat_map(|v| std::iter::repeat(v).take(rng.random_range(1..=2))).collect();
    stubs.shuffle(&mut rng);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    while !stubs.is_empty() {
        let k = rng.random_range(1..=3usize);
        let mut e = Vec::new();
        stubs.retain(|&v| {
            if e.len() < k && !e.contains(&v) {
                e.push(v);
                false
            } else {
                true
            }
        });
        edges.push(e);
    }
    let g = Hypergraph::new(n, edges).unwrap();
    let constraints = g
        .edges
        .iter()
        .map(|e| {
            // Product clauses make conflicts and broken chain reactions likely.
            if rng.random_bool(0.3) {
                let index = rng.random_range(0..1usize << e.len());
                Constraint::indicator(e.len(), index)
            } else {
                Constraint::random(e.len(), &mut rng)
            }
        })
        .collect();
    QsatInstance::new(g, constraints, None).unwrap()
}

#[test]
fn bounded_solver_agrees_with_oracle() {
    let (mut solved, mut rejected) = (0, 0);
    for seed in 0..300 {
        let inst = bounded_instance(seed);
        match algorithm_a(&inst).unwrap() {
            BoundedOutcome::Solved { state, residual, .. } => {
                solved += 1;
                assert!(residual <= 1e-8, "seed {seed}: {residual}");
                assert!(verify_state(&inst, &state).unwrap() <= 1e-6, "seed {seed}");
            }
            BoundedOutcome::Reject { .. } => {
                rejected += 1;
                assert!(!exact_satisfiable(&inst).unwrap(), "seed {seed}: rejected a satisfiable instance");
            }
        }
    }
    assert!(solved > 0 && rejected > 0, "{solved} solved, {rejected} rejected");
}

#[test]
fn verifiers_are_consistent() {
    // ‖Hψ‖ ≤ Σ_e √⟨ψ|Π_e|ψ⟩ ≤ m·√residual for normalized ψ.
    let fam = families::crash(2, 3).unwrap();
    for seed in 0..20 {
        let inst = sample_generic(&fam.hypergraph, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = ProductState::random(fam.n(), &mut rng);
        let r = residual(&inst, &s).unwrap();
        let check = verify_state(&inst, &s).unwrap();
        assert!(check <= fam.m() as f64 * r.sqrt() + 1e-12, "seed {seed}");
        assert!(check > 1e-3, "random state looks like a solution at seed {seed}");
    }
}

#[test]
fn fano_generic_is_satisfiable() {
    let fano = families::fano();
    let inst = sample_generic(&fano.hypergraph, 4);
    assert!(exact_satisfiable(&inst).unwrap());
}
