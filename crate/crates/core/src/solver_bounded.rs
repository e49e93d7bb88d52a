//! The polynomial-time solver for instances in which every qubit occurs in at most two
//! clauses, together with the pseudo-line-graph instance generator.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::instance::{contract_slot, residual, sample_generic, Constraint, ProductState, QsatInstance, QubitVector};
use crate::rootsolve::functional_kernel;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Relative size below which a singular value, contracted functional or transfer image
/// counts as zero.
const RANK_TOL: f64 = 1e-10;
/// Largest value a fully contracted clause may take and still count as satisfied.
const SATISFIED_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundedError {
    #[error("vertex {vertex} occurs in {degree} clauses")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("loop invariant violated: {0}")]
    InvariantViolated(String),
}

/// Maps an assignment of the non-pivot slots to the unique pivot value satisfying the
/// clause, or to zero when the clause is already satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub k: usize,
    /// 2 × 2^{k−1}; columns indexed by the non-pivot slots, first slot most significant.
    pub matrix: DMatrix<Complex64>,
}

impl TransferMatrix {
    pub fn apply(&self, phi: &[Complex64]) -> [Complex64; 2] {
        let out = &self.matrix * DMatrix::from_column_slice(phi.len(), 1, phi);
        [out[0], out[1]]
    }

    fn as_matrix2(&self) -> Matrix2<Complex64> {
        assert_eq!(self.k, 2, "only 2-local transfer matrices are square");
        Matrix2::new(self.matrix[(0, 0)], self.matrix[(0, 1)], self.matrix[(1, 0)], self.matrix[(1, 1)])
    }
}

/// Reorders the coefficients so that slot `pivot` becomes the last (least significant).
fn move_slot_last(coeffs: &[Complex64], k: usize, pivot: usize) -> Vec<Complex64> {
    let low = k - 1 - pivot;
    (0..coeffs.len())
        .map(|new| {
            let bit = new & 1;
            let rest = new >> 1;
            let mask = (1usize << low) - 1;
            let orig = ((rest >> low) << (low + 1)) | (bit << low) | (rest & mask);
            coeffs[orig]
        })
        .collect()
}

/// Transfer matrix from the Schmidt decomposition of the clause's bad state across the
/// cut between slot `pivot` and the rest.
pub fn transfer_matrix(c: &Constraint, pivot: usize) -> TransferMatrix {
    assert!(c.k >= 2 && pivot < c.k, "transfer matrices need k >= 2 and a valid pivot");
    let k = c.k;
    let coeffs = move_slot_last(&c.coeffs, k, pivot);
    let rows = 1usize << (k - 1);
    // The bad state is the conjugate of the functional.
    let psi = DMatrix::from_fn(rows, 2, |a, b| coeffs[2 * a + b].conj());
    let svd = psi.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let alpha = svd.singular_values[0];
    let beta = if svd.singular_values[1] > RANK_TOL * alpha { svd.singular_values[1] } else { 0.0 };
    // ψ = Σ σ_i u_i ⊗ b_i with b_i row i of V^H.
    let b = |i: usize| [v_t[(i, 0)], v_t[(i, 1)]];
    let (b0, b1) = (b(0), b(1));
    let mut matrix = DMatrix::from_element(2, rows, ZERO);
    for col in 0..rows {
        let a0 = u[(col, 0)].conj();
        let a1 = u[(col, 1)].conj();
        for r in 0..2 {
            matrix[(r, col)] = b0[r] * a1 * beta - b1[r] * a0 * alpha;
        }
    }
    TransferMatrix { k, matrix }
}

/// `T_{ψ_m} ⋯ T_{ψ_1}` around a cycle of 2-local clauses.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMatrix(pub Matrix2<Complex64>);

impl CycleMatrix {
    pub fn around(ts: &[TransferMatrix]) -> CycleMatrix {
        CycleMatrix(ts.iter().fold(Matrix2::identity(), |acc, t| t.as_matrix2() * acc))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.norm() == 0.0)
    }

    /// One eigenvector per distinct eigenvalue; both basis vectors for a multiple of
    /// the identity.
    pub fn eigenvectors(&self) -> Vec<QubitVector> {
        let m = self.0;
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 || (b.norm() + c.norm() <= RANK_TOL * scale && (a - d).norm() <= RANK_TOL * scale) {
            return vec![QubitVector::E0, QubitVector::E1];
        }
        let tr = a + d;
        let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        let mut out: Vec<QubitVector> = Vec::new();
        for lambda in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
            let v1 = QubitVector([b, lambda - a]);
            let v2 = QubitVector([lambda - d, c]);
            let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
            if v.norm() > 0.0 && out.iter().all(|w| w.collinearity_defect(&v) > 1e-9) {
                out.push(v.normalized());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundedTrace {
    pub step1_assignments: usize,
    pub step2_assignments: usize,
    pub stacked_equal: usize,
    pub stacked_inside: usize,
    pub cycles: usize,
    pub paths: usize,
    pub fusions: usize,
    pub broken_chain_reactions: usize,
    pub invariant_checks: usize,
    pub step4_assignments: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundedOutcome {
    Solved { state: ProductState, residual: f64, trace: BoundedTrace },
    /// Two linearly independent 1-local clauses meet on `vertex`.
    Reject { vertex: usize },
}

#[derive(Debug, Clone)]
struct WorkClause {
    qubits: Vec<usize>,
    coeffs: Vec<Complex64>,
    arity0: usize,
}

impl WorkClause {
    fn as_constraint(&self) -> Constraint {
        Constraint { k: self.qubits.len(), coeffs: self.coeffs.clone() }
    }
}

fn normalize(coeffs: &mut [Complex64]) -> f64 {
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        coeffs.iter_mut().for_each(|c| *c /= norm);
    }
    norm
}

struct Work {
    clauses: Vec<Option<WorkClause>>,
    incident: Vec<Vec<usize>>,
    assigned: Vec<Option<QubitVector>>,
    queue: VecDeque<(usize, QubitVector)>,
    propagating: bool,
    fusing: bool,
    trace: BoundedTrace,
}

impl Work {
    fn live(&self) -> impl Iterator<Item = (usize, &WorkClause)> {
        self.clauses.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
    }

    fn live_on(&self, v: usize) -> Vec<usize> {
        self.incident[v].iter().copied().filter(|&c| self.clauses[c].is_some()).collect()
    }

    fn clause(&self, c: usize) -> &WorkClause {
        self.clauses[c].as_ref().expect("live clause")
    }

    fn clause_count(&self) -> usize {
        self.live().count()
    }

    /// Fixes `v` and projects every clause on it. While propagating, a clause reduced
    /// to 1-local queues its remaining qubit: the kernel if nonzero, else `(1, 0)`.
    fn assign(&mut self, v: usize, value: QubitVector) -> Result<(), BoundedError> {
        let value = value.normalized();
        self.assigned[v] = Some(value);
        for cid in self.live_on(v) {
            let mut cl = self.clauses[cid].take().expect("live clause");
            let slot = cl.qubits.iter().position(|&q| q == v).expect("incident clause holds v");
            cl.coeffs = contract_slot(&cl.coeffs, cl.qubits.len(), slot, &value.0);
            cl.qubits.remove(slot);
            let norm = normalize(&mut cl.coeffs);
            if cl.qubits.is_empty() {
                if norm > SATISFIED_TOL {
                    return Err(BoundedError::InvariantViolated(format!("clause {cid} left unsatisfied ({norm:e})")));
                }
                continue;
            }
            if norm <= RANK_TOL {
                if cl.qubits.len() == 1 && self.propagating {
                    self.trace.broken_chain_reactions += 1;
                    self.queue.push_back((cl.qubits[0], QubitVector::E0));
                }
                continue;
            }
            if cl.qubits.len() == 1 && self.propagating {
                if self.fusing && cl.arity0 >= 3 {
                    self.trace.fusions += 1;
                }
                let kernel = functional_kernel([cl.coeffs[0], cl.coeffs[1]]).expect("nonzero functional");
                self.queue.push_back((cl.qubits[0], kernel));
            }
            self.clauses[cid] = Some(cl);
        }
        Ok(())
    }

    fn drain(&mut self) -> Result<(), BoundedError> {
        while let Some((y, value)) = self.queue.pop_front() {
            if self.assigned[y].is_none() {
                self.assign(y, value)?;
            }
        }
        Ok(())
    }

    fn step1(&mut self) -> Result<Option<usize>, BoundedError> {
        loop {
            let Some((_, c)) = self.live().find(|(_, c)| c.qubits.len() == 1) else { return Ok(None) };
            let v = c.qubits[0];
            let f = [c.coeffs[0], c.coeffs[1]];
            for other in self.live_on(v) {
                let o = self.clause(other);
                if o.qubits.len() == 1 {
                    let cross = (f[0] * o.coeffs[1] - f[1] * o.coeffs[0]).norm();
                    if cross > RANK_TOL {
                        return Ok(Some(v));
                    }
                }
            }
            let value = functional_kernel(f).expect("nonzero functional");
            self.trace.step1_assignments += 1;
            self.assign(v, value)?;
        }
    }

    fn step2(&mut self) -> Result<(), BoundedError> {
        loop {
            let candidate = (1..self.assigned.len()).find(|&v| {
                let on = self.live_on(v);
                self.assigned[v].is_none() && !on.is_empty() && on.iter().all(|&c| self.clause(c).qubits.len() >= 3)
            });
            let Some(v) = candidate else { return Ok(()) };
            self.trace.step2_assignments += 1;
            self.assign(v, QubitVector::E0)?;
        }
    }

    fn check_invariant(&mut self) -> Result<(), BoundedError> {
        self.trace.invariant_checks += 1;
        if let Some((cid, _)) = self.live().find(|(_, c)| c.qubits.len() == 1) {
            return Err(BoundedError::InvariantViolated(format!("1-local clause {cid} at loop entry")));
        }
        if self.live().next().is_some() && !self.live().any(|(_, c)| c.qubits.len() == 2) {
            return Err(BoundedError::InvariantViolated("clauses remain but none is 2-local".into()));
        }
        Ok(())
    }

    /// Another live clause whose qubits contain those of the 2-local clause `cid`.
    fn stacking(&self, cid: usize) -> Option<usize> {
        let qs = &self.clause(cid).qubits;
        self.live_on(qs[0])
            .into_iter()
            .find(|&o| o != cid && qs.iter().all(|q| self.clause(o).qubits.contains(q)))
    }

    fn other_two_local(&self, w: usize, via: usize) -> Option<(usize, usize)> {
        let next = self.live_on(w).into_iter().find(|&c| c != via)?;
        let cl = self.clause(next);
        (cl.qubits.len() == 2).then(|| (next, if cl.qubits[0] == w { cl.qubits[1] } else { cl.qubits[0] }))
    }

    /// The cycle of 2-local clauses through `cid`, as vertices `x_0, x_1, …` and
    /// clauses `c_i` joining `x_i` to `x_{i+1}` (indices mod length).
    fn cycle_through(&self, cid: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let qs = &self.clause(cid).qubits;
        let (v1, v2) = (qs[0], qs[1]);
        let mut verts = vec![v1, v2];
        let mut clauses = vec![cid];
        let (mut w, mut via) = (v2, cid);
        loop {
            let (next, x) = self.other_two_local(w, via)?;
            clauses.push(next);
            if x == v1 {
                return Some((verts, clauses));
            }
            verts.push(x);
            w = x;
            via = next;
        }
    }

    fn transfer(&self, cid: usize, to: usize) -> TransferMatrix {
        let cl = self.clause(cid);
        let pivot = cl.qubits.iter().position(|&q| q == to).expect("clause holds target");
        transfer_matrix(&cl.as_constraint(), pivot)
    }

    /// Values around the cycle starting from `start` on `x_0`; a chain reaction that
    /// breaks at clause `i` is completed backwards from `x_0`.
    fn cycle_values(&self, verts: &[usize], clauses: &[usize], start: QubitVector) -> Vec<QubitVector> {
        let len = verts.len();
        let mut vals = vec![start];
        let mut broken = None;
        for i in 0..len - 1 {
            let next = QubitVector(self.transfer(clauses[i], verts[i + 1]).apply(&vals[i].0));
            if next.norm() <= RANK_TOL {
                broken = Some(i);
                break;
            }
            vals.push(next.normalized());
        }
        let Some(i) = broken else { return vals };
        let mut back = vec![QubitVector::E0; len - i - 1];
        let mut prev = start;
        for (slot, j) in (i + 1..len).rev().enumerate() {
            let x = QubitVector(self.transfer(clauses[j], verts[j]).apply(&prev.0));
            let x = if x.norm() <= RANK_TOL { QubitVector::E0 } else { x.normalized() };
            back[len - i - 2 - slot] = x;
            prev = x;
        }
        vals.extend(back);
        vals
    }

    fn cycle_defect(&self, verts: &[usize], clauses: &[usize], vals: &[QubitVector]) -> f64 {
        clauses
            .iter()
            .map(|&cid| {
                let cl = self.clause(cid);
                let mut acc = cl.coeffs.clone();
                for &q in &cl.qubits {
                    let pos = verts.iter().position(|&x| x == q).expect("cycle vertex");
                    acc = contract_slot(&acc, acc.len().trailing_zeros() as usize, 0, &vals[pos].0);
                }
                acc[0].norm()
            })
            .fold(0.0, f64::max)
    }

    fn solve_cycle(&mut self, verts: &[usize], clauses: &[usize]) -> Result<(), BoundedError> {
        let ts: Vec<TransferMatrix> = (0..verts.len()).map(|i| self.transfer(clauses[i], verts[(i + 1) % verts.len()])).collect();
        let cm = CycleMatrix::around(&ts);
        let mut starts = cm.eigenvectors();
        starts.extend([QubitVector::E0, QubitVector::E1]);
        let mut best: Option<(f64, Vec<QubitVector>)> = None;
        for s in starts {
            let vals = self.cycle_values(verts, clauses, s);
            let defect = self.cycle_defect(verts, clauses, &vals);
            if best.as_ref().map_or(true, |(d, _)| defect < *d) {
                best = Some((defect, vals));
            }
            if defect <= RANK_TOL {
                break;
            }
        }
        let (_, vals) = best.expect("at least one start");
        let was = self.propagating;
        self.propagating = false;
        for (&v, &val) in verts.iter().zip(&vals) {
            self.assign(v, val)?;
        }
        self.propagating = was;
        Ok(())
    }

    fn step3_iteration(&mut self) -> Result<(), BoundedError> {
        let stacked = self
            .live()
            .filter(|(_, c)| c.qubits.len() == 2)
            .map(|(i, _)| i)
            .collect::<Vec<_>>()
            .into_iter()
            .find_map(|cid| self.stacking(cid).map(|o| (cid, o)));
        self.propagating = true;
        self.fusing = false;
        if let Some((cid, other)) = stacked {
            let qs = self.clause(cid).qubits.clone();
            if self.clause(other).qubits.len() == 2 {
                self.trace.stacked_equal += 1;
                let (u, v) = (qs[0], qs[1]);
                return self.solve_cycle(&[u, v], &[cid, other]);
            }
            self.trace.stacked_inside += 1;
            self.assign(qs[0], QubitVector::E0)?;
            return self.drain();
        }
        let cid = self.live().find(|(_, c)| c.qubits.len() == 2).map(|(i, _)| i).expect("loop condition");
        if let Some((verts, clauses)) = self.cycle_through(cid) {
            self.trace.cycles += 1;
            return self.solve_cycle(&verts, &clauses);
        }
        self.trace.paths += 1;
        self.fusing = true;
        let v1 = self.clause(cid).qubits[0];
        self.assign(v1, QubitVector::E0)?;
        self.drain()
    }
}

/// Runs the bounded-occurrence algorithm. Clauses may have any arity from 1 to `k`;
/// the only rejection comes from conflicting 1-local clauses.
pub fn algorithm_a(instance: &QsatInstance) -> Result<BoundedOutcome, BoundedError> {
    let g = &instance.hypergraph;
    let degrees = g.degrees();
    if let Some(v) = (1..=g.n).find(|&v| degrees[v - 1] > 2) {
        return Err(BoundedError::DegreeTooHigh { vertex: v, degree: degrees[v - 1] });
    }
    let mut incident = vec![Vec::new(); g.n + 1];
    let clauses = g
        .edges
        .iter()
        .zip(&instance.constraints)
        .enumerate()
        .map(|(i, (e, c))| {
            e.iter().for_each(|&v| incident[v].push(i));
            let mut coeffs = c.coeffs.clone();
            normalize(&mut coeffs);
            Some(WorkClause { qubits: e.clone(), coeffs, arity0: e.len() })
        })
        .collect();
    let mut work = Work {
        clauses,
        incident,
        assigned: vec![None; g.n + 1],
        queue: VecDeque::new(),
        propagating: false,
        fusing: false,
        trace: BoundedTrace::default(),
    };

    if let Some(vertex) = work.step1()? {
        return Ok(BoundedOutcome::Reject { vertex });
    }
    work.step2()?;
    while work.live().any(|(_, c)| c.qubits.len() == 2) {
        work.check_invariant()?;
        let before = work.clause_count();
        work.step3_iteration()?;
        if work.clause_count() >= before {
            return Err(BoundedError::InvariantViolated("step 3 removed no clause".into()));
        }
    }
    if let Some((cid, _)) = work.live().next() {
        return Err(BoundedError::InvariantViolated(format!("clause {cid} survives the loop")));
    }
    let vectors = (1..=g.n)
        .map(|v| {
            work.assigned[v].unwrap_or_else(|| {
                work.trace.step4_assignments += 1;
                QubitVector::E0
            })
        })
        .collect();
    let state = ProductState { vectors };
    let residual = residual(instance, &state).expect("state covers every vertex");
    Ok(BoundedOutcome::Solved { state, residual, trace: work.trace })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PseudoLineError {
    #[error("invalid degree profile: {0}")]
    InvalidDegreeProfile(String),
}

/// A simple graph whose first `discs` nodes have degree 3 and remaining `crosses`
/// nodes degree 2. Nodes are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoLineSpec {
    pub discs: usize,
    pub crosses: usize,
    pub edges: Vec<(usize, usize)>,
}

impl PseudoLineSpec {
    pub fn validate(&self) -> Result<(), PseudoLineError> {
        let nodes = self.discs + self.crosses;
        let mut degree = vec![0usize; nodes];
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= nodes || b >= nodes {
                return Err(PseudoLineError::InvalidDegreeProfile(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(PseudoLineError::InvalidDegreeProfile(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(PseudoLineError::InvalidDegreeProfile(format!("parallel edges between {a} and {b}")));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        for (node, &d) in degree.iter().enumerate() {
            let want = if node < self.discs { 3 } else { 2 };
            if d != want {
                return Err(PseudoLineError::InvalidDegreeProfile(format!("node {node} has degree {d}, expected {want}")));
            }
        }
        Ok(())
    }

    /// Six discs on a triangular prism with six of its nine edges subdivided by a cross.
    pub fn prism_example() -> Self {
        let prism = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)];
        let mut edges = Vec::new();
        let mut next = 6;
        for (i, &(a, b)) in prism.iter().enumerate() {
            if i < 6 {
                edges.push((a, next));
                edges.push((next, b));
                next += 1;
            } else {
                edges.push((a, b));
            }
        }
        PseudoLineSpec { discs: 6, crosses: 6, edges }
    }

    /// Uniform simple graph with the given profile, by the configuration model with
    /// rejection. `discs` must be even.
    pub fn random(discs: usize, crosses: usize, seed: u64) -> Result<Self, PseudoLineError> {
        if discs % 2 == 1 {
            return Err(PseudoLineError::InvalidDegreeProfile("odd number of degree-3 nodes".into()));
        }
        let mut stubs: Vec<usize> = (0..discs).flat_map(|d| [d; 3]).chain((discs..discs + crosses).flat_map(|c| [c; 2])).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            stubs.shuffle(&mut rng);
            let spec = PseudoLineSpec { discs, crosses, edges: stubs.chunks(2).map(|p| (p[0], p[1])).collect() };
            if spec.validate().is_ok() {
                return Ok(spec);
            }
        }
        Err(PseudoLineError::InvalidDegreeProfile("no simple graph found".into()))
    }

    /// `H(G)`: each graph edge becomes a vertex; a disc becomes the 3-edge of its three
    /// graph edges; a cross with graph edges `a`, `b` becomes `{a, s, s'}` and `{b, s, s'}`
    /// for two fresh vertices `s`, `s'`.
    pub fn hypergraph(&self) -> Result<Hypergraph, PseudoLineError> {
        self.validate()?;
        let nodes = self.discs + self.crosses;
        let mut incident = vec![Vec::new(); nodes];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            incident[a].push(i + 1);
            incident[b].push(i + 1);
        }
        let mut next = self.edges.len();
        let mut edges = Vec::new();
        for inc in incident.iter().take(self.discs) {
            edges.push(inc.clone());
        }
        for inc in incident.iter().skip(self.discs) {
            let (s, s2) = (next + 1, next + 2);
            next += 2;
            edges.push(vec![inc[0], s, s2]);
            edges.push(vec![inc[1], s, s2]);
        }
        Ok(Hypergraph::new(next, edges).expect("construction stays in range"))
    }
}

pub fn gen_pseudo_line_instance(spec: &PseudoLineSpec, seed: u64) -> Result<QsatInstance, PseudoLineError> {
    Ok(sample_generic(&spec.hypergraph()?, seed))
}
