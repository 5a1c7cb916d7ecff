//! State-vector simulation of Simon's circuit, the decision algorithm built
//! on it, the generalized hidden-subgroup solver, and a classical collision
//! baseline.
//!
//! Qubit `i` of a state is bit `i` of the basis index. Simon's circuit uses
//! the input register on qubits `0..n` and the output register on `n..2n`.

use std::collections::HashSet;

use num::{BigInt, One, Signed, Zero};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{Gf2Error, GroupElement, Subspace};
use crate::hiding::{HidingError, QueryCountingOracle};
use crate::rational::{self, Rational};

/// Largest state the dense simulator will allocate.
pub const MAX_QUBITS: usize = 22;

/// Above this n, [`SimulationMode::Auto`] switches to the collapsed
/// simulation.
pub const DENSE_MAX_N: usize = 5;

/// Tolerance on the squared norm after each gate.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error(transparent)]
    Hiding(#[from] HidingError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("registers {0:?} and {1:?} overlap")]
    OverlappingRegisters(Register, Register),
    #[error("register {reg:?} does not fit in {qubits} qubits")]
    RegisterOutOfRange { reg: Register, qubits: usize },
    #[error("register width {width} does not match oracle dimension {n}")]
    WidthMismatch { width: usize, n: usize },
    #[error("{0} qubits exceed the dense simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("probability parameter {0} must lie in {1}")]
    InvalidProbability(String, &'static str),
    #[error("query budget {q} exceeds the domain size {domain}")]
    QueryBudget { q: u64, domain: u64 },
}

/// A contiguous block of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    pub start: usize,
    pub width: usize,
}

impl Register {
    pub fn new(start: usize, width: usize) -> Self {
        Self { start, width }
    }

    fn end(self) -> usize {
        self.start + self.width
    }

    fn overlaps(self, other: Register) -> bool {
        self.width > 0 && other.width > 0 && self.start < other.end() && other.start < self.end()
    }

    fn extract(self, index: usize) -> usize {
        (index >> self.start) & ((1usize << self.width) - 1)
    }
}

/// Dense vector of 2^m amplitudes.
#[derive(Clone, Debug)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `qubits` qubits.
    pub fn new(qubits: usize) -> Result<Self, QsimError> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self, QsimError> {
        if qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, reg: Register) -> Result<(), QsimError> {
        if reg.end() > self.qubits {
            Err(QsimError::RegisterOutOfRange {
                reg,
                qubits: self.qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Hadamard on every qubit of `reg`.
    pub fn apply_hadamard_layer(&mut self, reg: Register) -> Result<(), QsimError> {
        self.check(reg)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in reg.start..reg.end() {
            let stride = 1usize << q;
            for base in (0..self.amps.len()).step_by(stride << 1) {
                for i in base..base + stride {
                    let (a, b) = (self.amps[i], self.amps[i + stride]);
                    self.amps[i] = (a + b) * s;
                    self.amps[i + stride] = (a - b) * s;
                }
            }
        }
        Ok(())
    }

    /// O|x, y, z⟩ = |x, y ⊕ f(x), z⟩, charged as one query.
    pub fn apply_oracle(
        &mut self,
        oracle: &mut QueryCountingOracle<'_>,
        x: Register,
        y: Register,
    ) -> Result<(), QsimError> {
        self.check(x)?;
        self.check(y)?;
        if x.overlaps(y) {
            return Err(QsimError::OverlappingRegisters(x, y));
        }
        let n = oracle.n();
        for reg in [x, y] {
            if reg.width != n {
                return Err(QsimError::WidthMismatch {
                    width: reg.width,
                    n,
                });
            }
        }
        let table = oracle.table();
        // XOR into y is an involution, so the permutation is a set of swaps
        for idx in 0..self.amps.len() {
            let fx = table[x.extract(idx)] as usize;
            let j = idx ^ (fx << y.start);
            if j > idx {
                self.amps.swap(idx, j);
            }
        }
        oracle.charge_quantum();
        Ok(())
    }

    /// Marginal outcome distribution of measuring `reg`.
    pub fn register_distribution(&self, reg: Register) -> Result<Vec<f64>, QsimError> {
        self.check(reg)?;
        let mut dist = vec![0.0; 1 << reg.width];
        for (idx, a) in self.amps.iter().enumerate() {
            dist[reg.extract(idx)] += a.norm_sqr();
        }
        Ok(dist)
    }
}

fn sample_discrete<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let total: f64 = dist.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in dist.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    // rounding left u just past the last positive mass
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// How one round of Simon's circuit is simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    /// Dense state vector on 2n qubits.
    Dense,
    /// Measure the output register first (it commutes with the final
    /// Hadamards), leaving a uniform superposition over one level set of f,
    /// then sample the Fourier transform of that level set.
    Collapsed,
    /// Dense for n ≤ [`DENSE_MAX_N`], collapsed above.
    #[default]
    Auto,
}

/// One H⊗O⊗H round: returns the measured input register y.
pub fn simon_round<R: Rng + ?Sized>(
    oracle: &mut QueryCountingOracle<'_>,
    mode: SimulationMode,
    rng: &mut R,
) -> Result<GroupElement, QsimError> {
    let n = oracle.n();
    let dense = match mode {
        SimulationMode::Dense => true,
        SimulationMode::Collapsed => false,
        SimulationMode::Auto => n <= DENSE_MAX_N,
    };
    let y = if dense {
        dense_round(oracle, rng)?
    } else {
        collapsed_round(oracle, rng)
    };
    Ok(GroupElement::new(y, n)?)
}

fn dense_round<R: Rng + ?Sized>(
    oracle: &mut QueryCountingOracle<'_>,
    rng: &mut R,
) -> Result<u32, QsimError> {
    let n = oracle.n();
    let (x, y) = (Register::new(0, n), Register::new(n, n));
    let mut state = StateVector::new(2 * n)?;
    state.apply_hadamard_layer(x)?;
    state.apply_oracle(oracle, x, y)?;
    state.apply_hadamard_layer(x)?;
    debug_assert!((state.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
    let dist = state.register_distribution(x)?;
    Ok(sample_discrete(&dist, rng) as u32)
}

fn collapsed_round<R: Rng + ?Sized>(oracle: &mut QueryCountingOracle<'_>, rng: &mut R) -> u32 {
    let n = oracle.n();
    // the output register reads f(x0) for uniform x0
    let x0 = rng.gen_range(0..1u32 << n);
    let value = oracle.table()[x0 as usize];
    oracle.charge_quantum();
    let level: Vec<u32> = oracle.preimages(value).to_vec();
    let shifted = Subspace::span_bits(n, level.iter().map(|&p| p ^ x0));
    if shifted.order() == level.len() as u64 {
        // level set is a coset x0 + K: outcome uniform on K^⊥
        let dual = shifted.orthogonal_complement();
        let mut y = 0u32;
        for &row in dual.rows() {
            if rng.gen::<bool>() {
                y ^= row;
            }
        }
        return y;
    }
    // arbitrary level set S: P(y) = |Σ_{x∈S} (−1)^{x·y}|² / (|S| 2^n)
    let mut w = vec![0i64; 1 << n];
    for &p in &level {
        w[p as usize] = 1;
    }
    walsh_hadamard(&mut w);
    let scale = (level.len() as f64) * (1u64 << n) as f64;
    let dist: Vec<f64> = w.iter().map(|&c| (c * c) as f64 / scale).collect();
    sample_discrete(&dist, rng) as u32
}

fn walsh_hadamard(w: &mut [i64]) {
    let mut h = 1;
    while h < w.len() {
        for base in (0..w.len()).step_by(h << 1) {
            for i in base..base + h {
                let (a, b) = (w[i], w[i + h]);
                w[i] = a + b;
                w[i + h] = a - b;
            }
        }
        h <<= 1;
    }
}

/// Exact outcome law of one Simon round for a function hiding H: uniform on
/// H^⊥ with mass |H|/2^n per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundDistribution {
    support: Subspace,
}

impl RoundDistribution {
    pub fn support(&self) -> &Subspace {
        &self.support
    }

    pub fn probability(&self, y: GroupElement) -> Result<Rational, QsimError> {
        Ok(if self.support.member(y)? {
            Rational::new(BigInt::one(), BigInt::from(self.support.order()))
        } else {
            Rational::zero()
        })
    }

    /// Probabilities indexed by y.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.support.ambient_dim();
        let p = 1.0 / self.support.order() as f64;
        let mut out = vec![0.0; 1 << n];
        for y in self.support.elements() {
            out[y.index()] = p;
        }
        out
    }
}

pub fn simon_round_distribution(h: &Subspace) -> RoundDistribution {
    RoundDistribution {
        support: h.orthogonal_complement(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Measurement result 1: the function is judged one-to-one.
    Accept,
    /// Measurement result 0: a period was found.
    Reject,
}

/// Outcome of the final check of [`simon_decide`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairTest {
    /// f(0) = f(s̃).
    Collision,
    /// f(0) ≠ f(s̃).
    Distinct,
    /// The samples spanned everything; two padding queries were charged.
    Padded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub samples: Vec<GroupElement>,
    pub candidate: Option<GroupElement>,
    pub pair_test: PairTest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub verdict: Verdict,
    pub queries: u64,
    pub transcript: Transcript,
}

/// Smallest j ≥ 0 with 2^j · p ≥ 1, i.e. ⌈log₂(1/p)⌉ for p in (0, 1].
pub fn ceil_log2_inverse(p: &Rational) -> u32 {
    debug_assert!(p.is_positive());
    let mut j = 0;
    let mut scaled = p.clone();
    while scaled < Rational::one() {
        scaled *= BigInt::from(2);
        j += 1;
    }
    j
}

fn check_open_unit(p: &Rational, upper: Rational, label: &'static str) -> Result<(), QsimError> {
    if !p.is_positive() || *p >= upper {
        return Err(QsimError::InvalidProbability(rational::to_string(p), label));
    }
    Ok(())
}

/// Sampling rounds r = n − 1 + ⌈log₂(1/ε)⌉ used by [`simon_decide`].
pub fn simon_rounds(n: usize, epsilon: &Rational) -> Result<usize, QsimError> {
    check_open_unit(epsilon, rational::ratio(1, 2), "(0, 1/2)")?;
    Ok(n.saturating_sub(1) + ceil_log2_inverse(epsilon) as usize)
}

/// Total queries of [`simon_decide`]: the rounds plus the two pair-test
/// evaluations, which are charged on every run.
pub fn simon_query_count(n: usize, epsilon: &Rational) -> Result<u64, QsimError> {
    Ok(simon_rounds(n, epsilon)? as u64 + 2)
}

/// Simon's decision algorithm with one-sided error.
///
/// Collects r samples y, forms V = span{y}, and tests the smallest nonzero
/// s̃ ∈ V^⊥ by comparing f(0) with f(s̃); rejects exactly when they
/// collide. One-to-one functions are always accepted. When V is the whole
/// space there is no candidate and the two pair-test queries are spent on
/// f(0) as padding, so every run costs the same number of queries.
///
/// The verdict is unspecified for functions outside Simon's promise.
pub fn simon_decide<R: Rng + ?Sized>(
    oracle: &mut QueryCountingOracle<'_>,
    epsilon: &Rational,
    mode: SimulationMode,
    rng: &mut R,
) -> Result<DecisionOutcome, QsimError> {
    let n = oracle.n();
    let rounds = simon_rounds(n, epsilon)?;
    let start = oracle.queries();
    let mut samples = Vec::with_capacity(rounds);
    let mut span = Subspace::trivial(n);
    for _ in 0..rounds {
        let y = simon_round(oracle, mode, rng)?;
        span.insert_bits(y.bits());
        samples.push(y);
    }
    let candidate = span.orthogonal_complement().min_nonzero();
    let (verdict, pair_test) = match candidate {
        Some(s) => {
            let at_zero = oracle.query_bits(0);
            let at_s = oracle.query_bits(s.bits());
            if at_zero == at_s {
                (Verdict::Reject, PairTest::Collision)
            } else {
                (Verdict::Accept, PairTest::Distinct)
            }
        }
        None => {
            oracle.query_bits(0);
            oracle.query_bits(0);
            (Verdict::Accept, PairTest::Padded)
        }
    };
    Ok(DecisionOutcome {
        verdict,
        queries: oracle.queries() - start,
        transcript: Transcript {
            samples,
            candidate,
            pair_test,
        },
    })
}

/// Recovers an arbitrary hidden subgroup as V^⊥, where V spans
/// n + ⌈log₂(1/δ)⌉ samples. Correct with probability at least 1 − δ.
pub fn hsp_solve<R: Rng + ?Sized>(
    oracle: &mut QueryCountingOracle<'_>,
    delta: &Rational,
    mode: SimulationMode,
    rng: &mut R,
) -> Result<Subspace, QsimError> {
    check_open_unit(delta, Rational::one(), "(0, 1)")?;
    let n = oracle.n();
    let rounds = n + ceil_log2_inverse(delta) as usize;
    let mut span = Subspace::trivial(n);
    for _ in 0..rounds {
        let y = simon_round(oracle, mode, rng)?;
        span.insert_bits(y.bits());
    }
    Ok(span.orthogonal_complement())
}

/// Classical randomized baseline: query q distinct uniform points and
/// reject iff two of them collide.
pub fn classical_decide<R: Rng + ?Sized>(
    oracle: &mut QueryCountingOracle<'_>,
    q: u64,
    rng: &mut R,
) -> Result<Verdict, QsimError> {
    let domain = 1u64 << oracle.n();
    if q > domain {
        return Err(QsimError::QueryBudget { q, domain });
    }
    let points = rand::seq::index::sample(rng, domain as usize, q as usize);
    let mut seen = HashSet::with_capacity(q as usize);
    let mut verdict = Verdict::Accept;
    for p in points.iter() {
        if !seen.insert(oracle.query_bits(p as u32)) {
            verdict = Verdict::Reject;
        }
    }
    Ok(verdict)
}

/// Probability that [`classical_decide`] with q queries sees a collision on
/// a period instance: 1 − ∏_{i=1}^{q−1} (2^n − 2i)/(2^n − i).
pub fn classical_detection_probability(n: usize, q: u64) -> Rational {
    let domain = BigInt::one() << n;
    let mut miss = Rational::one();
    for i in 1..q {
        let num = &domain - BigInt::from(2 * i);
        if !num.is_positive() {
            miss = Rational::zero();
            break;
        }
        miss *= Rational::new(num, &domain - BigInt::from(i));
    }
    Rational::one() - miss
}
