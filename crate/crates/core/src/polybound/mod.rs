//! Degree lower bound for polynomials bounded on 1, 2, 4, …, 2^n with a
//! large derivative somewhere in [1, 2], and the query bound it implies.
//!
//! If |P(2^i)| ≤ 1 for 0 ≤ i ≤ n and |P′(x₀)| ≥ c for some x₀ ∈ [1, 2], then
//! deg P ≥ min(n/2, (n + 2 + log₂ c)/4). Applied to P = 2Q − 1 for the
//! acceptance curve Q of an algorithm with error ε, and combined with
//! deg Q ≤ 2T, it gives T ≥ (n + 2 + log₂(2 − 4ε))/8.

mod extremal;
mod log2;
mod roots;
mod simplex;

use std::fmt;

use num::{BigInt, Float, One, Signed, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polymethod::RationalPolynomial;
use crate::rational::{self, pow2, Rational};

pub use extremal::{
    extremal_search, lemma_cap, ActiveConstraint, ExtremalResult, GridValue, DEFAULT_GRID,
    REFINEMENT_NODES,
};
pub use log2::{log2_bracket, LOG_PRECISION};
pub use roots::{isolate_roots, max_abs_on, squarefree, sturm_sequence, MaxAbs, RootEnclosure};
pub use simplex::{LpSolution, Simplex, SimplexError};

/// Root enclosures for the derivative maximum are this many bits wide.
pub const ROOT_PRECISION: u32 = 40;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("constant must be positive, got {0}")]
    NonPositive(String),
    #[error("error probability must lie in [0, 1/2), got {0}")]
    Epsilon(String),
    #[error("polynomial must have degree at least 1")]
    DegreeTooLow,
    #[error("degree {d} exceeds the {} constraint nodes for n = {n}", n + 1)]
    DegreeAboveNodes { n: usize, d: usize },
    #[error("grid needs at least 2 nodes, got {0}")]
    Grid(usize),
    #[error("inputs must be finite")]
    NonFinite,
    #[error("point is closer to b than to cc")]
    ProjectionPrecondition,
    #[error("projection coincides with b")]
    DegenerateProjection,
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Closed interval [lo, hi] known to contain a real number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "rational::serde_string")]
    pub lo: Rational,
    #[serde(with = "rational::serde_string")]
    pub hi: Rational,
}

impl Bracket {
    pub fn exact(v: Rational) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        (rational::to_f64(&self.lo) + rational::to_f64(&self.hi)) / 2.0
    }

    /// Applies a monotone nondecreasing map to both ends.
    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self {
            lo: f(&self.lo),
            hi: f(&self.hi),
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", rational::to_string(&self.lo))
        } else {
            write!(f, "[{}, {}]", rational::to_string(&self.lo), rational::to_string(&self.hi))
        }
    }
}

fn int(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// min(n/2, (n + 2 + log₂ c)/4).
pub fn degree_bound(n: usize, c: &Rational) -> Result<Bracket, BoundError> {
    if !c.is_positive() {
        return Err(BoundError::NonPositive(rational::to_string(c)));
    }
    let half = int(n) / int(2);
    let log = log2_bracket(c);
    Ok(log.map(|l| ((int(n) + int(2) + l) / int(4)).min(half.clone())))
}

/// 2 − 4ε: the derivative lower bound of 2Q − 1 for an algorithm with
/// error ε on the first two orders.
pub fn reduction_constant(epsilon: &Rational) -> Result<Rational, BoundError> {
    if epsilon.is_negative() || *epsilon >= Rational::new(1.into(), 2.into()) {
        return Err(BoundError::Epsilon(rational::to_string(epsilon)));
    }
    Ok(int(2) - int(4) * epsilon)
}

/// (n + 2 + log₂(2 − 4ε))/8, a lower bound on the query count of any
/// algorithm deciding the problem with error ε.
pub fn theorem_bound(n: usize, epsilon: &Rational) -> Result<Bracket, BoundError> {
    let c = reduction_constant(epsilon)?;
    Ok(log2_bracket(&c).map(|l| (int(n) + int(2) + l) / int(8)))
}

/// 2Q − 1, which maps [0, 1] to [−1, 1].
pub fn to_bounded(q: &RationalPolynomial) -> RationalPolynomial {
    q.scale(&int(2)).sub(&RationalPolynomial::constant(Rational::one()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub degree: usize,
    pub n: usize,
    /// max_{x∈[1,2]} |P′(x)|; the lower end is attained at `argmax`.
    pub c: Bracket,
    #[serde(with = "rational::serde_string")]
    pub argmax: Rational,
    /// min(n/2, (n + 2 + log₂ c)/4) evaluated at the attained c.
    pub bound: Bracket,
    /// Exponents i with |P(2^i)| > 1.
    pub premise_violations: Vec<usize>,
    pub premises_ok: bool,
    /// `None` when the premises fail.
    pub conclusion_ok: Option<bool>,
}

/// Checks the premises |P(2^i)| ≤ 1 exactly, certifies max |P′| on [1, 2],
/// and tests the degree conclusion.
///
/// The conclusion is decided on the lower end of the bound bracket, which
/// is within 2^-42 of the true value; an attained |P′(x₀)| makes the bound
/// itself rigorous.
pub fn check_lemma(p: &RationalPolynomial, n: usize) -> Result<BoundReport, BoundError> {
    let degree = p.degree().filter(|&d| d >= 1).ok_or(BoundError::DegreeTooLow)?;
    let premise_violations: Vec<usize> = (0..=n)
        .filter(|&i| p.eval(&pow2(i as i64)).abs() > Rational::one())
        .collect();
    let premises_ok = premise_violations.is_empty();
    let dp = p.derivative();
    let m = max_abs_on(&dp, &Rational::one(), &int(2), ROOT_PRECISION);
    let bound = degree_bound(n, &m.lower)?;
    let conclusion_ok = premises_ok.then(|| int(degree) >= bound.lo);
    Ok(BoundReport {
        degree,
        n,
        c: Bracket {
            lo: m.lower,
            hi: m.upper,
        },
        argmax: m.argmax,
        bound,
        premise_violations,
        premises_ok,
        conclusion_ok,
    })
}

/// Projection inequality for a complex point α and real b, cc: if
/// |α − cc| ≤ |α − b| then |cc − α|/|b − α| ≥ |cc − Re α|/|b − Re α|.
/// Evaluated exactly: the four floats are scaled by a common power of two
/// to integers and the squared ratios are compared by cross-multiplying.
pub fn projection_ratio_property(alpha: Complex64, b: f64, cc: f64) -> Result<bool, BoundError> {
    let inputs = [alpha.re, alpha.im, b, cc];
    if inputs.iter().any(|x| !x.is_finite()) {
        return Err(BoundError::NonFinite);
    }
    let decoded = inputs.map(Float::integer_decode);
    let floor = decoded.iter().map(|&(_, e, _)| e).min().unwrap_or(0);
    let [p, h, b, cc] = decoded.map(|(m, e, sign)| BigInt::from(sign) * (BigInt::from(m) << (e - floor) as u32));
    let h2 = &h * &h;
    let foot_c = (&cc - &p) * (&cc - &p);
    let foot_b = (&b - &p) * (&b - &p);
    let to_c = &foot_c + &h2;
    let to_b = &foot_b + &h2;
    if to_c > to_b {
        return Err(BoundError::ProjectionPrecondition);
    }
    if foot_b.is_zero() {
        return Err(BoundError::DegenerateProjection);
    }
    Ok(to_c * foot_b >= foot_c * to_b)
}
