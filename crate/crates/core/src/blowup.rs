//! Decoupling: replaces `G` by a hypergraph `G̃` on `m + b` vertices whose filtration adds
//! a vertex at every step, together with the surjection `p : V(G̃) → V(G)`.

use serde::Serialize;
use thiserror::Error;

use crate::filtration::{validate, Step, TransferFiltration, Violation};
use crate::hypergraph::Hypergraph;
use crate::instance::{ProductState, QsatInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlowupError {
    #[error("filtration does not validate: {0:?}")]
    InvalidFiltration(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Blowup {
    pub gtilde: Hypergraph,
    /// `p[j - 1] = p(j)` for `j` in `1..=m+b`.
    pub p: Vec<usize>,
    pub filtration_tilde: TransferFiltration,
    /// `underline[j - 1] = min p⁻¹(p(j))`.
    pub underline: Vec<usize>,
    /// `(i, underline(i))` for every `i` with `underline(i) < i`, increasing in `i`.
    pub duplicate_pairs: Vec<(usize, usize)>,
    /// Edge `i` of `G̃` is the lift of edge `edge_map[i]` of `G`.
    pub edge_map: Vec<usize>,
    pub b: usize,
}

impl Blowup {
    pub fn n_tilde(&self) -> usize {
        self.gtilde.n
    }

    /// Inverse of `p` restricted to representatives: `rep[v - 1] = min p⁻¹(v)`.
    pub fn representatives(&self, n: usize) -> Vec<usize> {
        let mut rep = vec![0; n];
        for (j, &v) in self.p.iter().enumerate().rev() {
            rep[v - 1] = j + 1;
        }
        rep
    }
}

pub fn decouple(g: &Hypergraph, f: &TransferFiltration) -> Result<Blowup, BlowupError> {
    let violations = validate(g, f);
    if !violations.is_empty() {
        return Err(BlowupError::InvalidFiltration(violations));
    }
    let b = f.b();
    let m = f.m();
    let added = f.added_at(g.n);
    let arrival = |v: usize| added[v - 1].expect("validated filtrations cover every vertex");

    let mut p: Vec<usize> = f.foundation.clone();
    for s in &f.steps {
        let newest = *g.edges[s.edge].iter().max_by_key(|&&v| arrival(v)).expect("edges are nonempty");
        p.push(newest);
    }

    // The first G̃ vertex over v is where v entered the filtration.
    let first_copy = |v: usize| match arrival(v) {
        0 => f.foundation.iter().position(|&x| x == v).expect("foundation vertex") + 1,
        step => b + step,
    };
    let underline: Vec<usize> = p.iter().map(|&v| first_copy(v)).collect();

    let edges: Vec<Vec<usize>> = f
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let own = b + i + 1;
            g.edges[s.edge].iter().map(|&x| if x == p[own - 1] { own } else { first_copy(x) }).collect()
        })
        .collect();
    let gtilde = Hypergraph::new(m + b, edges).expect("lifted edges stay in range");

    let steps: Vec<Step> = (0..m).map(|i| Step { edge: i, adds: Some(b + i + 1) }).collect();
    let filtration_tilde =
        TransferFiltration::new(&gtilde, (1..=b).collect(), steps).expect("decoupled filtration is valid by construction");

    let duplicate_pairs = underline
        .iter()
        .enumerate()
        .filter(|&(j, &u)| u < j + 1)
        .map(|(j, &u)| (j + 1, u))
        .collect();

    Ok(Blowup {
        gtilde,
        p,
        filtration_tilde,
        underline,
        duplicate_pairs,
        edge_map: f.steps.iter().map(|s| s.edge).collect(),
        b,
    })
}

/// The instance on `G̃` carrying, on each lifted edge, the constraint of its image.
pub fn lift_instance(blowup: &Blowup, instance: &QsatInstance) -> QsatInstance {
    QsatInstance {
        hypergraph: blowup.gtilde.clone(),
        constraints: blowup.edge_map.iter().map(|&e| instance.constraints[e].clone()).collect(),
        seed: instance.seed,
    }
}

/// `Δ`: vertex `j` of `G̃` receives the vector of `p(j)`.
pub fn delta_lift(blowup: &Blowup, state: &ProductState) -> ProductState {
    ProductState { vectors: blowup.p.iter().map(|&v| *state.vector(v)).collect() }
}

/// `π`: `Δ` followed by restriction to the foundation.
pub fn project_pi(blowup: &Blowup, state: &ProductState) -> ProductState {
    ProductState { vectors: blowup.p[..blowup.b].iter().map(|&v| *state.vector(v)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{residual, QubitVector};

    fn four_cycle() -> (Hypergraph, TransferFiltration) {
        let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap();
        let steps = vec![
            Step { edge: 0, adds: Some(3) },
            Step { edge: 1, adds: Some(4) },
            Step { edge: 2, adds: None },
            Step { edge: 3, adds: None },
        ];
        let f = TransferFiltration::new(&g, vec![1, 2], steps).unwrap();
        (g, f)
    }

    #[test]
    fn running_example_blowup() {
        let (g, f) = four_cycle();
        let bu = decouple(&g, &f).unwrap();
        assert_eq!(bu.gtilde.edges, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 5], vec![2, 3, 6]]);
        assert_eq!(bu.p, vec![1, 2, 3, 4, 4, 4]);
        assert_eq!(bu.duplicate_pairs, vec![(5, 4), (6, 4)]);
        assert_eq!(bu.filtration_tilde.r_map, f.r_map);
    }

    #[test]
    fn decoupling_semicycle() {
        let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4]]).unwrap();
        let steps = vec![Step { edge: 0, adds: Some(3) }, Step { edge: 1, adds: Some(4) }, Step { edge: 2, adds: None }];
        let f = TransferFiltration::new(&g, vec![1, 2], steps).unwrap();
        let bu = decouple(&g, &f).unwrap();
        assert_eq!(bu.gtilde.n, 5);
        assert_eq!(bu.p, vec![1, 2, 3, 4, 4]);
        assert_eq!(bu.gtilde.edges[2], vec![1, 3, 5]);
    }

    #[test]
    fn nothing_to_decouple() {
        let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let steps = vec![Step { edge: 0, adds: Some(3) }, Step { edge: 1, adds: Some(4) }];
        let f = TransferFiltration::new(&g, vec![1, 2], steps).unwrap();
        let bu = decouple(&g, &f).unwrap();
        assert_eq!(bu.gtilde, g);
        assert_eq!(bu.p, vec![1, 2, 3, 4]);
        assert!(bu.duplicate_pairs.is_empty());
    }

    #[test]
    fn rejects_invalid_filtration() {
        let (g, mut f) = four_cycle();
        f.steps[0].adds = None;
        assert!(matches!(decouple(&g, &f), Err(BlowupError::InvalidFiltration(_))));
    }

    #[test]
    fn lift_and_project() {
        let (g, f) = four_cycle();
        let bu = decouple(&g, &f).unwrap();
        let s = ProductState {
            vectors: (1..=4).map(|i| QubitVector::real(i as f64, 1.0)).collect(),
        };
        let lifted = delta_lift(&bu, &s);
        assert_eq!(lifted.vectors[3], s.vectors[3]);
        assert_eq!(lifted.vectors[4], s.vectors[3]);
        assert_eq!(lifted.vectors[5], s.vectors[3]);
        assert_eq!(project_pi(&bu, &s).vectors, s.vectors[..2].to_vec());
    }

    #[test]
    fn lifted_residual_matches() {
        use rand::SeedableRng;
        let (g, f) = four_cycle();
        let bu = decouple(&g, &f).unwrap();
        let inst = crate::instance::sample_generic(&g, 3);
        let lifted = lift_instance(&bu, &inst);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let s = ProductState::random(4, &mut rng);
        let a = residual(&inst, &s).unwrap();
        let b = residual(&lifted, &delta_lift(&bu, &s)).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
