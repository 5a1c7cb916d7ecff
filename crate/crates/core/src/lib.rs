//! Hidden-subgroup oracles over (Z/2Z)^n, Simon's decision algorithm, and the
//! polynomial-method machinery behind its Ω(n) query lower bound.
//!
//! - [`gf2`]: subspaces of (Z/2Z)^n in canonical RREF, enumeration, counting.
//! - [`hiding`]: functions hiding a subgroup, partial assignments, query
//!   accounting.
//! - [`qsim`]: state-vector simulation of Simon's circuit, the decision
//!   algorithm, the generalized solver and a classical collision baseline.
//! - [`polymethod`]: exact acceptance curves Q_n(D), the closed forms for
//!   Q_n^s(D), exact interpolation and the degree check.
//! - [`polybound`]: the degree lower bound for polynomials bounded on powers
//!   of two, an exact simplex for extremal polynomials, and the final query
//!   bound.

pub mod gf2;
pub mod hiding;
pub mod polybound;
pub mod polymethod;
pub mod qsim;
pub mod rational;

pub use gf2::{GroupElement, Subspace};
pub use hiding::{HidingFunction, PartialAssignment, QueryCountingOracle};
pub use polymethod::{AcceptanceCurve, RationalPolynomial, SyntheticAlgorithm};
pub use rational::Rational;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source for task number `task` under a global `seed`.
///
/// Every task gets its own ChaCha stream, so results do not depend on the
/// order or thread in which tasks run.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
