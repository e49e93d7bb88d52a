//! Quantum k-SAT instances: one rank-1 constraint functional per edge, product states,
//! evaluation and the determinant pairing `♯`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("expected {expected} vectors, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("vertex {0} carries the zero vector")]
    ZeroComponent(usize),
    #[error("constraint {edge}: {reason}")]
    BadConstraint { edge: usize, reason: String },
    #[error("state has {got} vectors for {expected} vertices")]
    StateSize { expected: usize, got: usize },
}

/// Complex numbers as `[re, im]` pairs. Exact round trips rely on serde_json's
/// `float_roundtrip` parser.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Pair(f64, f64);

    fn to_pair(z: &Complex64) -> Pair {
        Pair(z.re, z.im)
    }

    fn from_pair<E: Error>(p: Pair) -> Result<Complex64, E> {
        Ok(Complex64::new(p.0, p.1))
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        from_pair(Pair::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(to_pair).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            Vec::<Pair>::deserialize(d)?.into_iter().map(from_pair).collect()
        }
    }

    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
            [to_pair(&v[0]), to_pair(&v[1])].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
            let [a, b] = <[Pair; 2]>::deserialize(d)?;
            Ok([from_pair(a)?, from_pair(b)?])
        }
    }
}

/// A vector `a₁w₁ + a₂w₂` of the single-qubit space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitVector(#[serde(with = "complex_serde::pair")] pub [Complex64; 2]);

impl QubitVector {
    pub const E0: QubitVector = QubitVector([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    pub const E1: QubitVector = QubitVector([Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);

    pub fn new(a: Complex64, b: Complex64) -> Self {
        QubitVector([a, b])
    }

    pub fn real(a: f64, b: f64) -> Self {
        QubitVector([Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0[0] == Complex64::new(0.0, 0.0) && self.0[1] == Complex64::new(0.0, 0.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        QubitVector([self.0[0] * s, self.0[1] * s])
    }

    pub fn normalized(&self) -> Self {
        self.scale(Complex64::new(1.0 / self.norm(), 0.0))
    }

    /// `|v♯(u)| / (‖v‖‖u‖)`: the sine of the angle between the two lines.
    pub fn collinearity_defect(&self, other: &QubitVector) -> f64 {
        let d = sharp(self);
        (d[0] * other.0[0] + d[1] * other.0[1]).norm() / (self.norm() * other.norm())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        QubitVector([gaussian(rng), gaussian(rng)])
    }
}

/// Coefficients of `v♯`, so that `v♯(u) = f[0]·u₁ + f[1]·u₂ = a₁b₂ − a₂b₁`.
pub fn sharp(v: &QubitVector) -> [Complex64; 2] {
    [-v.0[1], v.0[0]]
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A nonzero functional on `W^{⊗k}`; `coeffs[j]` is its value on the basis tensor whose
/// binary digits are `j` with slot 1 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub k: usize,
    #[serde(with = "complex_serde::vec")]
    pub coeffs: Vec<Complex64>,
}

impl Constraint {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let k = coeffs.len().trailing_zeros() as usize;
        assert_eq!(1 << k, coeffs.len(), "constraint length must be a power of two");
        Constraint { k, coeffs }
    }

    /// Rank-1 functional `f₁ ⊗ … ⊗ f_k`.
    pub fn product(factors: &[[Complex64; 2]]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            coeffs = coeffs.iter().flat_map(|c| [c * f[0], c * f[1]]).collect();
        }
        Constraint { k: factors.len(), coeffs }
    }

    /// Functional that vanishes exactly off the basis tensor `index`.
    pub fn indicator(k: usize, index: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 1 << k];
        coeffs[index] = Complex64::new(1.0, 0.0);
        Constraint { k, coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let coeffs: Vec<Complex64> = (0..1usize << k).map(|_| gaussian(rng)).collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Constraint { k, coeffs: coeffs.into_iter().map(|c| c / norm).collect() }
    }
}

/// Contracts slot `slot` (0-based) of a `k`-slot tensor with `v`.
pub fn contract_slot(coeffs: &[Complex64], k: usize, slot: usize, v: &[Complex64; 2]) -> Vec<Complex64> {
    let stride = 1usize << (k - 1 - slot);
    let mut out = Vec::with_capacity(coeffs.len() / 2);
    for hi in 0..(1usize << slot) {
        let base = hi * 2 * stride;
        for lo in 0..stride {
            out.push(coeffs[base + lo] * v[0] + coeffs[base + stride + lo] * v[1]);
        }
    }
    out
}

pub fn eval_constraint(c: &Constraint, vectors: &[QubitVector]) -> Result<Complex64, InstanceError> {
    if vectors.len() != c.k {
        return Err(InstanceError::ArityMismatch { expected: c.k, got: vectors.len() });
    }
    let mut acc = c.coeffs.clone();
    for v in vectors {
        acc = contract_slot(&acc, acc.len().trailing_zeros() as usize, 0, &v.0);
    }
    Ok(acc[0])
}

/// One nonzero vector per vertex; `vectors[v - 1]` belongs to vertex `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    pub vectors: Vec<QubitVector>,
}

impl ProductState {
    pub fn vector(&self, v: usize) -> &QubitVector {
        &self.vectors[v - 1]
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        ProductState { vectors: (0..n).map(|_| QubitVector::random(rng)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsatInstance {
    pub hypergraph: Hypergraph,
    pub constraints: Vec<Constraint>,
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
struct RawInstance {
    hypergraph: Hypergraph,
    constraints: Vec<Constraint>,
    seed: Option<u64>,
}

impl<'de> Deserialize<'de> for QsatInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(d)?;
        QsatInstance::new(raw.hypergraph, raw.constraints, raw.seed).map_err(serde::de::Error::custom)
    }
}

impl QsatInstance {
    pub fn new(hypergraph: Hypergraph, constraints: Vec<Constraint>, seed: Option<u64>) -> Result<Self, InstanceError> {
        if constraints.len() != hypergraph.m() {
            return Err(InstanceError::ArityMismatch { expected: hypergraph.m(), got: constraints.len() });
        }
        for (e, (c, edge)) in constraints.iter().zip(&hypergraph.edges).enumerate() {
            if c.k != edge.len() || c.coeffs.len() != 1 << c.k {
                return Err(InstanceError::BadConstraint { edge: e, reason: format!("arity {} for edge of size {}", c.k, edge.len()) });
            }
            if c.coeffs.iter().all(|z| z.norm() == 0.0) {
                return Err(InstanceError::BadConstraint { edge: e, reason: "zero functional".into() });
            }
        }
        Ok(QsatInstance { hypergraph, constraints, seed })
    }

    pub fn n(&self) -> usize {
        self.hypergraph.n
    }

    pub fn m(&self) -> usize {
        self.hypergraph.m()
    }

    /// Value of constraint `e` on the slot vectors taken from `state`.
    pub fn eval_edge(&self, e: usize, state: &ProductState) -> Complex64 {
        let slots: Vec<QubitVector> = self.hypergraph.edges[e].iter().map(|&v| *state.vector(v)).collect();
        eval_constraint(&self.constraints[e], &slots).expect("arity checked at construction")
    }

    /// Normalized violation of constraint `e`.
    pub fn edge_residual(&self, e: usize, state: &ProductState) -> f64 {
        let value = self.eval_edge(e, state).norm_sqr();
        let scale: f64 = self.hypergraph.edges[e].iter().map(|&v| state.vector(v).norm().powi(2)).product();
        value / (self.constraints[e].norm().powi(2) * scale)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

/// Samples i.i.d. complex Gaussian coefficients per edge, unit-normalized. Edge `e`
/// draws from stream `e` of a ChaCha generator keyed by `seed`.
pub fn sample_generic(g: &Hypergraph, seed: u64) -> QsatInstance {
    let constraints = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(e as u64);
            Constraint::random(edge.len(), &mut rng)
        })
        .collect();
    QsatInstance { hypergraph: g.clone(), constraints, seed: Some(seed) }
}

/// `max_e |H_e(s)|² / (‖H_e‖² Π‖v‖²)`; zero exactly on satisfying product states and
/// invariant under rescaling any vector.
pub fn residual(instance: &QsatInstance, state: &ProductState) -> Result<f64, InstanceError> {
    if state.vectors.len() != instance.n() {
        return Err(InstanceError::StateSize { expected: instance.n(), got: state.vectors.len() });
    }
    if let Some(v) = state.vectors.iter().position(QubitVector::is_zero) {
        return Err(InstanceError::ZeroComponent(v + 1));
    }
    Ok((0..instance.m()).map(|e| instance.edge_residual(e, state)).fold(0.0, f64::max))
}
