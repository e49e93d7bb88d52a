//! Product-state solvers for quantum k-SAT on structured interaction hypergraphs.
//!
//! The parameterized pipeline runs [`filtration`] → [`blowup`] → [`transfer`] →
//! [`rootsolve`] inside [`solver_param::solve`]. Instances in which every qubit occurs
//! at most twice go to [`solver_bounded::algorithm_a`]. [`oracle`] provides the
//! brute-force check used by the tests.

pub mod blowup;
pub mod families;
pub mod filtration;
pub mod hypergraph;
pub mod instance;
pub mod oracle;
pub mod rootsolve;
pub mod solver_bounded;
pub mod solver_param;
pub mod transfer;

pub use blowup::{decouple, Blowup};
pub use families::Family;
pub use filtration::{greedy_filtration, validate, FiltrationSpec, Step, TransferFiltration};
pub use hypergraph::{find_sdr, Hypergraph, Matching};
pub use instance::{residual, sample_generic, Constraint, ProductState, QsatInstance, QubitVector};
pub use solver_bounded::{algorithm_a, BoundedOutcome};
pub use solver_param::{solve, SolveConfig, SolveReport};
