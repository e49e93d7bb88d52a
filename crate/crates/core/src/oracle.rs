//! Brute-force ground truth on the full `2^n`-dimensional space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::instance::{ProductState, QsatInstance};

/// Largest `n` for which the dense Hamiltonian is assembled.
pub const DENSE_CAP: usize = 14;
/// Largest `n` for which eigenvalues are computed.
pub const EIGEN_CAP: usize = 12;
/// Largest `n` for the matrix-free null-space check.
pub const MATRIX_FREE_CAP: usize = 14;
pub const SAT_THRESHOLD: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{n} qubits exceed the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn check_cap(n: usize, cap: usize) -> Result<(), OracleError> {
    if n > cap {
        Err(OracleError::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Normalized bad states `|c⟩ = conj(coeffs)/‖coeffs‖`.
fn bad_states(instance: &QsatInstance) -> Vec<Vec<Complex64>> {
    instance
        .constraints
        .iter()
        .map(|c| {
            let norm = c.norm();
            c.coeffs.iter().map(|z| z.conj() / norm).collect()
        })
        .collect()
}

/// Bit position of vertex `v` in a global basis index; qubit 1 is most significant.
fn bit(n: usize, v: usize) -> usize {
    n - v
}

/// Local index of global basis state `x` restricted to `edge`, first slot most
/// significant.
fn local_index(n: usize, edge: &[usize], x: usize) -> usize {
    edge.iter().fold(0, |acc, &v| (acc << 1) | ((x >> bit(n, v)) & 1))
}

fn with_local(n: usize, edge: &[usize], x: usize, local: usize) -> usize {
    let k = edge.len();
    edge.iter().enumerate().fold(x, |acc, (slot, &v)| {
        let b = (local >> (k - 1 - slot)) & 1;
        (acc & !(1 << bit(n, v))) | (b << bit(n, v))
    })
}

/// `Σ_e |c_e⟩⟨c_e| ⊗ I` as a dense `2^n × 2^n` Hermitian matrix.
pub fn dense_hamiltonian(instance: &QsatInstance) -> Result<DMatrix<Complex64>, OracleError> {
    let n = instance.n();
    check_cap(n, DENSE_CAP)?;
    let dim = 1usize << n;
    let mut h = DMatrix::from_element(dim, dim, ZERO);
    for (edge, c) in instance.hypergraph.edges.iter().zip(bad_states(instance)) {
        let span = 1usize << edge.len();
        for x in 0..dim {
            let lx = local_index(n, edge, x);
            for ly in 0..span {
                let y = with_local(n, edge, x, ly);
                h[(x, y)] += c[lx] * c[ly].conj();
            }
        }
    }
    Ok(h)
}

/// The normalized product vector `v₁ ⊗ ⋯ ⊗ v_n`.
pub fn product_vector(state: &ProductState) -> DVector<Complex64> {
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    for v in &state.vectors {
        let v = v.normalized();
        psi = psi.iter().flat_map(|a| [a * v.0[0], a * v.0[1]]).collect();
    }
    DVector::from_vec(psi)
}

/// `‖Hψ‖ / ‖ψ‖` for an explicit Hamiltonian.
pub fn null_space_check(h: &DMatrix<Complex64>, state: &ProductState) -> Result<f64, OracleError> {
    let expected = 1usize << state.vectors.len().min(usize::BITS as usize - 1);
    if h.nrows() != expected || h.ncols() != expected {
        return Err(OracleError::DimensionMismatch { expected, got: h.nrows() });
    }
    let psi = product_vector(state);
    Ok((h * &psi).norm() / psi.norm())
}

/// `‖Hψ‖ / ‖ψ‖` applying each projector in place, without forming `H`.
pub fn null_space_check_matrix_free(instance: &QsatInstance, state: &ProductState) -> Result<f64, OracleError> {
    let n = instance.n();
    if state.vectors.len() != n {
        return Err(OracleError::DimensionMismatch { expected: n, got: state.vectors.len() });
    }
    check_cap(n, MATRIX_FREE_CAP)?;
    let psi = product_vector(state);
    let mut out = DVector::from_element(psi.len(), ZERO);
    for (edge, c) in instance.hypergraph.edges.iter().zip(bad_states(instance)) {
        let span = 1usize << edge.len();
        // Visit each coset of the edge's qubits once, through its all-zero member.
        for x in (0..psi.len()).filter(|&x| local_index(n, edge, x) == 0) {
            let overlap: Complex64 = (0..span).map(|l| c[l].conj() * psi[with_local(n, edge, x, l)]).sum();
            for (l, cl) in c.iter().enumerate() {
                out[with_local(n, edge, x, l)] += cl * overlap;
            }
        }
    }
    Ok(out.norm() / psi.norm())
}

/// Dense check for `n ≤ 12`, matrix-free above.
pub fn verify_state(instance: &QsatInstance, state: &ProductState) -> Result<f64, OracleError> {
    if instance.n() <= EIGEN_CAP {
        null_space_check(&dense_hamiltonian(instance)?, state)
    } else {
        null_space_check_matrix_free(instance, state)
    }
}

pub fn min_eigenvalue(instance: &QsatInstance) -> Result<f64, OracleError> {
    check_cap(instance.n(), EIGEN_CAP)?;
    let h = dense_hamiltonian(instance)?;
    Ok(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Whether some (possibly entangled) state is annihilated by every constraint.
pub fn exact_satisfiable(instance: &QsatInstance) -> Result<bool, OracleError> {
    if instance.m() == 0 {
        return Ok(true);
    }
    Ok(min_eigenvalue(instance)? <= SAT_THRESHOLD)
}
