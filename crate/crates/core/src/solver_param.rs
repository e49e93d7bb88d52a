//! The parameterized solver: decouple, build transfer functions and qualifiers, find a
//! foundation assignment on the qualifier's zero set, extend it, and map it back.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::blowup::{decouple, Blowup, BlowupError};
use crate::filtration::{Step, TransferFiltration};
use crate::hypergraph::Hypergraph;
use crate::instance::{contract_slot, residual, sample_generic, ProductState, QsatInstance, QubitVector};
use crate::rootsolve::{accepted_roots, functional_kernel, gamma, p_from_gammas, specialize_univariate, GammaPair, LinePair};
use crate::transfer::{build_qualifiers, build_transfer_functions, transfer_functions_on, MultiPoly, WPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error("instance does not live on the given hypergraph")]
    InstanceMismatch,
    #[error("outside the guaranteed class: {0}")]
    UnsupportedShape(String),
    #[error("duplicate copies ({i}, {u}) disagree by {defect:e}")]
    InconsistentDuplicates { i: usize, u: usize, defect: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Acceptance threshold on [`residual`].
    pub tol: f64,
    /// Residual contract passed to the root finder.
    pub root_tol: f64,
    /// Largest sine of the angle tolerated between duplicate copies.
    pub collinearity_tol: f64,
    /// Fresh constraint samples tried after the original, when the instance was sampled.
    pub max_seeds: usize,
    /// Random charts tried per instance after the standard one.
    pub basis_retries: usize,
    /// Starting points for the multi-qualifier iteration.
    pub best_effort_starts: usize,
    /// Mixed into the generator for random charts and starting points.
    pub rng_seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-8,
            root_tol: 1e-12,
            collinearity_tol: 1e-6,
            max_seeds: 3,
            basis_retries: 8,
            best_effort_starts: 24,
            rng_seed: 0,
        }
    }
}

/// Transfer-function values this small relative to their scale count as zero.
const VANISHING: f64 = 1e-9;
/// Values this small make the direction of `g_j` unreliable; such roots also try the
/// degenerate branch when the ordinary extension fails.
const NEAR_VANISHING: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub decouple_ms: f64,
    pub transfer_ms: f64,
    pub qualifier_ms: f64,
    pub root_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub state: Option<ProductState>,
    pub residual: f64,
    pub retries: usize,
    pub fallback_used: bool,
    /// Edge of `G` dropped by the degenerate-root branch.
    pub removed_edge: Option<usize>,
    pub best_effort: bool,
    /// Seed of the constraints actually solved; differs from the input after reseeding.
    pub seed_used: Option<u64>,
    pub timings: PhaseTimings,
    pub message: String,
}

/// Solution, its residual, and the edge dropped by the degenerate-root branch if taken.
type Found = (ProductState, f64, Option<usize>);

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Assigns each non-foundation vertex of `G̃` in filtration order: the kernel of its
/// edge's constraint contracted with the vectors already assigned. Up to scale this is
/// `g_i(foundation)` wherever that is nonzero; a vanishing functional gives `(1, 0)`.
pub fn extend_from_foundation(blowup: &Blowup, foundation: &[QubitVector], instance: &QsatInstance) -> ProductState {
    let b = blowup.b;
    let mut vectors: Vec<QubitVector> = foundation.iter().map(QubitVector::normalized).collect();
    for (step, edge) in blowup.gtilde.edges.iter().enumerate() {
        let own = b + step + 1;
        let con = &instance.constraints[blowup.edge_map[step]];
        let mut acc = con.coeffs.clone();
        let mut k = con.k;
        let mut free = edge.iter().position(|&x| x == own).expect("own vertex");
        for &x in edge.iter().filter(|&&x| x != own) {
            let slot = usize::from(free == 0);
            acc = contract_slot(&acc, k, slot, &vectors[x - 1].0);
            k -= 1;
            if slot == 0 {
                free -= 1;
            }
        }
        let v = functional_kernel([acc[0], acc[1]]).unwrap_or(QubitVector::E0);
        vectors.push(v.normalized());
    }
    ProductState { vectors }
}

/// Vertex `x` of `G` takes the vector of `min p⁻¹(x)`, after checking that every pair of
/// duplicate copies agrees up to scale.
pub fn map_back(blowup: &Blowup, state_tilde: &ProductState, n: usize, collinearity_tol: f64) -> Result<ProductState, SolveError> {
    for &(i, u) in &blowup.duplicate_pairs {
        let defect = state_tilde.vector(i).collinearity_defect(state_tilde.vector(u));
        if defect.is_nan() || defect > collinearity_tol {
            return Err(SolveError::InconsistentDuplicates { i, u, defect });
        }
    }
    let reps = blowup.representatives(n);
    Ok(ProductState { vectors: reps.iter().map(|&j| *state_tilde.vector(j)).collect() })
}

fn random_unit<R: Rng>(rng: &mut R) -> QubitVector {
    QubitVector::random(rng).normalized()
}

fn orthogonal(v: &QubitVector) -> QubitVector {
    QubitVector([-v.0[1].conj(), v.0[0].conj()])
}

/// Affine chart for attempt `a`: the standard chart first, then seeded random unitary
/// frames, cycling the moving coordinate from `b` down to 1.
fn chart(b: usize, a: usize, rng: &mut ChaCha8Rng) -> (Vec<QubitVector>, QubitVector, usize) {
    let coord = b - (a % b);
    if a == 0 {
        return (vec![QubitVector::E0; b], QubitVector::E1, coord);
    }
    let base: Vec<QubitVector> = (0..b).map(|_| random_unit(rng)).collect();
    let dir = orthogonal(&base[coord - 1]);
    (base, dir, coord)
}

struct Context<'a> {
    g: &'a Hypergraph,
    blowup: Blowup,
    instance: &'a QsatInstance,
    transfer: Vec<WPoly>,
    cfg: SolveConfig,
}

impl Context<'_> {
    fn verify(&self, state: ProductState) -> Option<(ProductState, f64)> {
        let r = residual(self.instance, &state).ok()?;
        (r <= self.cfg.tol).then_some((state, r))
    }

    /// Ordinary extension; `None` when duplicates disagree or the residual is too large.
    fn extend_and_map(&self, foundation: &[QubitVector]) -> Option<(ProductState, f64)> {
        let tilde = extend_from_foundation(&self.blowup, foundation, self.instance);
        let state = map_back(&self.blowup, &tilde, self.g.n, self.cfg.collinearity_tol).ok()?;
        self.verify(state)
    }

    /// Degenerate branch: `g_j` vanishes at the foundation. Drop the edge that introduced
    /// `j`, promote `j` into the foundation, and solve the single pair on the line
    /// `w′ + x·w″` through the new foundation slot.
    fn fallback(&self, foundation: &[QubitVector], j: usize, (i1, u1): (usize, usize), rng: &mut ChaCha8Rng) -> Option<(ProductState, f64)> {
        let b = self.blowup.b;
        let ft = &self.blowup.filtration_tilde;
        let mut found: Vec<usize> = (1..=b).collect();
        found.push(j);
        let steps: Vec<Step> = ft.steps.iter().copied().filter(|s| s.adds != Some(j)).collect();
        let constraints: Vec<_> = self.blowup.edge_map.iter().map(|&e| self.instance.constraints[e].clone()).collect();
        let f = transfer_functions_on(&self.blowup.gtilde, &constraints, &found, &steps);
        let f: Vec<WPoly> = f.into_iter().collect::<Option<_>>()?;

        for attempt in 0..=self.cfg.basis_retries {
            let line = if attempt == 0 {
                LinePair::default()
            } else {
                let w1 = random_unit(rng);
                LinePair { w1, w2: orthogonal(&w1) }
            };
            let gammas: Vec<GammaPair> = match f.iter().map(|fi| gamma(fi, foundation, &line)).collect() {
                Ok(gs) => gs,
                Err(_) => continue,
            };
            let p = p_from_gammas(&gammas[i1 - 1], &gammas[u1 - 1], &line);
            let roots = if p.is_zero() {
                vec![Complex64::new(0.0, 0.0)]
            } else if p.degree() == 0 {
                // Only root is at infinity on this line.
                continue;
            } else {
                accepted_roots(&p, self.cfg.root_tol)
            };
            for x in roots {
                let tilde = ProductState { vectors: gammas.iter().map(|gm| gm.eval(&line, x).normalized()).collect() };
                if tilde.vectors.iter().any(|v| !v.norm().is_finite()) {
                    continue;
                }
                if let Some(ok) = map_back(&self.blowup, &tilde, self.g.n, self.cfg.collinearity_tol).ok().and_then(|s| self.verify(s)) {
                    return Some(ok);
                }
            }
        }
        None
    }

    /// Tries one foundation assignment: ordinary extension, then the degenerate branch at
    /// the earliest (nearly) vanishing transfer function.
    fn try_foundation(&self, foundation: &[QubitVector], pair: Option<(usize, usize)>, rng: &mut ChaCha8Rng) -> Option<Found> {
        let b = self.blowup.b;
        let magnitudes: Vec<f64> = self.transfer.iter().map(|gi| gi.relative_magnitude(foundation)).collect();
        let vanishing = (b..magnitudes.len()).find(|&i| magnitudes[i] <= VANISHING);
        if vanishing.is_none() {
            if let Some((s, r)) = self.extend_and_map(foundation) {
                return Some((s, r, None));
            }
        }
        let pair = pair?;
        let j = vanishing.or_else(|| (b..magnitudes.len()).find(|&i| magnitudes[i] <= NEAR_VANISHING))? + 1;
        let removed = self.blowup.filtration_tilde.steps.iter().find(|s| s.adds == Some(j)).map(|s| self.blowup.edge_map[s.edge]);
        self.fallback(foundation, j, pair, rng).map(|(s, r)| (s, r, removed))
    }

    fn single_qualifier(&self, h: &MultiPoly, rng: &mut ChaCha8Rng, retries: &mut usize) -> Option<Found> {
        let b = self.blowup.b;
        let pair = self.blowup.duplicate_pairs[0];
        for a in 0..=self.cfg.basis_retries {
            if a > 0 {
                *retries += 1;
            }
            let (base, dir, coord) = chart(b, a, rng);
            let p = specialize_univariate(h, &base, &dir, coord);
            let roots = if p.is_zero() {
                vec![Complex64::new(0.0, 0.0)]
            } else if p.degree() == 0 {
                continue;
            } else {
                accepted_roots(&p, self.cfg.root_tol)
            };
            for x in roots {
                let mut foundation = base.clone();
                let moved = &mut foundation[coord - 1];
                *moved = QubitVector([moved.0[0] + x * dir.0[0], moved.0[1] + x * dir.0[1]]).normalized();
                if let Some(found) = self.try_foundation(&foundation, Some(pair), rng) {
                    return Some(found);
                }
            }
        }
        None
    }

    fn no_qualifier(&self, rng: &mut ChaCha8Rng, retries: &mut usize) -> Option<Found> {
        for a in 0..=self.cfg.basis_retries {
            if a > 0 {
                *retries += 1;
            }
            let foundation: Vec<QubitVector> = (0..self.blowup.b).map(|_| random_unit(rng)).collect();
            if let Some((s, r)) = self.extend_and_map(&foundation) {
                return Some((s, r, None));
            }
        }
        None
    }

    /// Several qualifiers: damped Gauss-Newton on `h_s(base + z·dir) = 0` in a chart,
    /// started once from sequential univariate specializations and then from random points.
    fn multi_qualifier(&self, h: &[MultiPoly], rng: &mut ChaCha8Rng, retries: &mut usize) -> Option<Found> {
        let b = self.blowup.b;
        let h: Vec<MultiPoly> = h.iter().filter(|hs| !hs.is_zero()).cloned().collect();
        let h = &h[..];
        let partials: Vec<Vec<MultiPoly>> = h.iter().map(|hs| (0..2 * b).map(|var| hs.partial(var)).collect()).collect();
        for start in 0..self.cfg.best_effort_starts {
            if start > 0 {
                *retries += 1;
            }
            let base: Vec<QubitVector> = (0..b).map(|_| random_unit(rng)).collect();
            let dirs: Vec<QubitVector> = base.iter().map(orthogonal).collect();
            let mut z: Vec<Complex64> = if start == 0 {
                sequential_start(h, &base, &dirs, self.cfg.root_tol)
            } else {
                (0..b).map(|_| crate::instance::gaussian(rng)).collect()
            };
            if !gauss_newton(h, &partials, &base, &dirs, &mut z) {
                continue;
            }
            let foundation: Vec<QubitVector> = (0..b)
                .map(|j| QubitVector([base[j].0[0] + z[j] * dirs[j].0[0], base[j].0[1] + z[j] * dirs[j].0[1]]).normalized())
                .collect();
            if let Some(found) = self.try_foundation(&foundation, None, rng) {
                return Some(found);
            }
        }
        None
    }
}

fn chart_point(base: &[QubitVector], dirs: &[QubitVector], z: &[Complex64]) -> Vec<QubitVector> {
    base.iter()
        .zip(dirs)
        .zip(z)
        .map(|((b, d), &x)| QubitVector([b.0[0] + x * d.0[0], b.0[1] + x * d.0[1]]))
        .collect()
}

fn sequential_start(h: &[MultiPoly], base: &[QubitVector], dirs: &[QubitVector], root_tol: f64) -> Vec<Complex64> {
    let b = base.len();
    let mut z = vec![Complex64::new(0.0, 0.0); b];
    for (s, hs) in h.iter().enumerate().take(b) {
        let current = chart_point(base, dirs, &z);
        let p = specialize_univariate(hs, &current, &dirs[s], s + 1);
        if let Some(&x) = accepted_roots(&p, root_tol).first() {
            z[s] += x;
        }
    }
    z
}

fn qualifier_defect(h: &[MultiPoly], point: &[QubitVector]) -> f64 {
    h.iter()
        .map(|hs| {
            let scale = hs.eval_abs(point);
            if scale == 0.0 {
                0.0
            } else {
                hs.eval(point).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

fn gauss_newton(h: &[MultiPoly], partials: &[Vec<MultiPoly>], base: &[QubitVector], dirs: &[QubitVector], z: &mut [Complex64]) -> bool {
    let b = base.len();
    let residual_vec = |z: &[Complex64]| -> DVector<Complex64> {
        let pt = chart_point(base, dirs, z);
        DVector::from_iterator(h.len(), h.iter().map(|hs| hs.eval(&pt) / hs.max_coeff()))
    };
    let mut f = residual_vec(z);
    for _ in 0..200 {
        let pt = chart_point(base, dirs, z);
        if qualifier_defect(h, &pt) <= 1e-14 {
            return true;
        }
        let jac = DMatrix::from_fn(h.len(), b, |s, j| {
            let scale = h[s].max_coeff();
            (partials[s][2 * j].eval(&pt) * dirs[j].0[0] + partials[s][2 * j + 1].eval(&pt) * dirs[j].0[1]) / scale
        });
        let Ok(step) = jac.svd(true, true).solve(&(-&f), 1e-12) else { return false };
        let mut t = 1.0;
        let norm0 = f.norm();
        loop {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + d * t).collect();
            let ft = residual_vec(&trial);
            if ft.norm() < norm0 || t < 1e-6 {
                z.copy_from_slice(&trial);
                f = ft;
                break;
            }
            t *= 0.5;
        }
        if z.iter().any(|x| !x.is_finite()) {
            return false;
        }
    }
    qualifier_defect(h, &chart_point(base, dirs, z)) <= 1e-12
}

/// Runs the full pipeline. With one qualifier the foundation comes from a root of its
/// restriction to a line; with none, from any assignment; with several, from a
/// best-effort Newton iteration reported as such.
pub fn solve(g: &Hypergraph, f: &TransferFiltration, instance: &QsatInstance, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    if instance.hypergraph != *g {
        return Err(SolveError::InstanceMismatch);
    }
    let total = Instant::now();
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let blowup = decouple(g, f)?;
    timings.decouple_ms = ms(t);
    let qualifier_count = blowup.duplicate_pairs.len();
    let best_effort = qualifier_count >= 2;

    let mut retries = 0;
    let mut current = instance.clone();
    let reseeds = if instance.seed.is_some() { cfg.max_seeds } else { 0 };
    for reseed in 0..=reseeds {
        if reseed > 0 {
            retries += 1;
            current = sample_generic(g, instance.seed.expect("reseeding only sampled instances") + reseed as u64);
        }
        let mut rng = ChaCha8Rng::seed_from_u64((current.seed.unwrap_or(0) ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(cfg.rng_seed));

        let t = Instant::now();
        let transfer = build_transfer_functions(&blowup, &current);
        timings.transfer_ms += ms(t);
        let t = Instant::now();
        let h = build_qualifiers(&blowup, &transfer);
        timings.qualifier_ms += ms(t);

        let ctx = Context { g, blowup: blowup.clone(), instance: &current, transfer, cfg: *cfg };
        let t = Instant::now();
        let found = match qualifier_count {
            0 => ctx.no_qualifier(&mut rng, &mut retries),
            1 => ctx.single_qualifier(&h[0], &mut rng, &mut retries),
            _ => ctx.multi_qualifier(&h, &mut rng, &mut retries),
        };
        timings.root_ms += ms(t);

        if let Some((state, r, removed_edge)) = found {
            let fallback_used = removed_edge.is_some();
            timings.total_ms = ms(total);
            let message = match (best_effort, fallback_used) {
                (true, _) => format!("best-effort solution for {qualifier_count} qualifiers"),
                (false, true) => "solved through the degenerate-root branch".to_string(),
                (false, false) => "solved".to_string(),
            };
            return Ok(SolveReport {
                state: Some(state),
                residual: r,
                retries,
                fallback_used,
                removed_edge,
                best_effort,
                seed_used: current.seed,
                timings,
                message,
            });
        }
    }
    timings.total_ms = ms(total);
    if best_effort {
        return Err(SolveError::UnsupportedShape(format!(
            "no common root of {qualifier_count} qualifiers found"
        )));
    }
    Ok(SolveReport {
        state: None,
        residual: f64::INFINITY,
        retries,
        fallback_used: false,
        removed_edge: None,
        best_effort,
        seed_used: current.seed,
        timings,
        message: "all charts and seeds exhausted".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::sample_generic;

    fn semicycle3() -> (Hypergraph, TransferFiltration) {
        let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4]]).unwrap();
        let steps = vec![Step { edge: 0, adds: Some(3) }, Step { edge: 1, adds: Some(4) }, Step { edge: 2, adds: None }];
        let f = TransferFiltration::new(&g, vec![1, 2], steps).unwrap();
        (g, f)
    }

    #[test]
    fn semicycle_solves() {
        let (g, f) = semicycle3();
        for seed in 0..5 {
            let inst = sample_generic(&g, seed);
            let rep = solve(&g, &f, &inst, &SolveConfig::default()).unwrap();
            assert!(rep.state.is_some(), "seed {seed}: {}", rep.message);
            assert!(rep.residual <= 1e-8);
            assert_eq!(rep.seed_used, Some(seed));
        }
    }

    #[test]
    fn map_back_rejects_perturbed_duplicate() {
        let (g, f) = semicycle3();
        let bu = decouple(&g, &f).unwrap();
        let mut vectors = vec![QubitVector::E0; 5];
        vectors[4] = QubitVector::real(1.0, 1e-3);
        let err = map_back(&bu, &ProductState { vectors }, 4, 1e-6).unwrap_err();
        assert!(matches!(err, SolveError::InconsistentDuplicates { i: 5, u: 4, .. }));
    }

    #[test]
    fn all_foundation_instance() {
        let g = Hypergraph::new(2, vec![]).unwrap();
        let f = TransferFiltration::new(&g, vec![1, 2], vec![]).unwrap();
        let bu = decouple(&g, &f).unwrap();
        let inst = sample_generic(&g, 0);
        let fnd = [QubitVector::E0, QubitVector::E1];
        let s = extend_from_foundation(&bu, &fnd, &inst);
        assert_eq!(s.vectors, fnd.to_vec());
        let rep = solve(&g, &f, &inst, &SolveConfig::default()).unwrap();
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let (g, f) = semicycle3();
        let other = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![2, 3, 4]]).unwrap();
        let inst = sample_generic(&other, 0);
        assert_eq!(solve(&g, &f, &inst, &SolveConfig::default()), Err(SolveError::InstanceMismatch));
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degenerate_roots_take_the_fallback() {
        use crate::instance::{sharp, Constraint};
        let (g, f) = semicycle3();
        let v = |a: f64, b: f64| sharp(&QubitVector([c(a, 0.3), c(b, -0.2)]));
        let h1 = Constraint::product(&[v(1.0, 0.4), v(-0.7, 1.0), [c(0.2, 0.1), c(1.0, 0.0)]]);
        let h2 = Constraint::product(&[v(0.5, 1.0), v(1.0, 1.3), [c(1.0, -0.5), c(0.3, 0.0)]]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h3 = crate::instance::Constraint::random(3, &mut rng);
        let inst = QsatInstance::new(g.clone(), vec![h1, h2, h3], None).unwrap();
        let rep = solve(&g, &f, &inst, &SolveConfig::default()).unwrap();
        assert!(rep.fallback_used, "{}", rep.message);
        assert!(rep.removed_edge.is_some());
        assert!(rep.residual <= 1e-8);
    }

    #[test]
    fn two_qualifiers_are_best_effort() {
        let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap();
        let steps = vec![
            Step { edge: 0, adds: Some(3) },
            Step { edge: 1, adds: Some(4) },
            Step { edge: 2, adds: None },
            Step { edge: 3, adds: None },
        ];
        let f = TransferFiltration::new(&g, vec![1, 2], steps).unwrap();
        let inst = sample_generic(&g, 1);
        match solve(&g, &f, &inst, &SolveConfig::default()) {
            Ok(rep) => {
                assert!(rep.best_effort);
                assert!(rep.residual <= 1e-8);
            }
            Err(e) => assert!(matches!(e, SolveError::UnsupportedShape(_))),
        }
    }
}
