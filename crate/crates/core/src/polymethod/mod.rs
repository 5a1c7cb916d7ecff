//! Acceptance curves Q_n(D) and the polynomial-method degree check.
//!
//! Q_n(D) is the probability that an algorithm accepts a uniformly random
//! function hiding a uniformly random subgroup of order D. Every T-query
//! algorithm has a curve of degree at most 2T in D; [`degree_check`]
//! verifies that claim on exact curves.

mod polynomial;
mod qns;
mod synthetic;

use std::collections::HashMap;

use num::{BigInt, One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{self, Gf2Error, GroupElement, Subspace};
use crate::hiding::{random_hiding_function, HidingError, HidingFunction, QueryCountingOracle};
use crate::qsim::{self, QsimError};
use crate::rational::{self, Rational};

pub use polynomial::{interpolate, RationalPolynomial};
pub use qns::{
    avoidance_probability, containment_ratio, decompose_general, order_exponent, qns_bruteforce,
    qns_constant, qns_general, qns_injective, AvoidanceProbability, GeneralDecomposition,
    MAX_DIFFERENCES,
};
pub use synthetic::{compose_qn, SyntheticAlgorithm, SyntheticTerm};

/// Largest n for which [`exact_qn_simon`] runs.
pub const EXACT_MAX_N: usize = 4;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Hiding(#[from] HidingError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("order {order} is not a power of two in [1, 2^{n}]")]
    InvalidOrder { order: u64, n: usize },
    #[error("assignment is not constant")]
    NotConstant,
    #[error("assignment is not injective")]
    NotInjective,
    #[error("inclusion-exclusion gave {inclusion_exclusion}, direct filtering gave {direct}")]
    PathMismatch {
        inclusion_exclusion: String,
        direct: String,
    },
    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("{0} distinct differences exceed the inclusion-exclusion limit")]
    TooManyDifferences(usize),
    #[error("curve has monte-carlo points; a degree claim needs exact values")]
    NotExact,
    #[error("exact computation supports n <= {cap}, got n = {n}")]
    ExactCap { n: usize, cap: usize },
    #[error("term domain of size {size} exceeds 2T = {}", 2 * queries)]
    DomainTooLarge { size: usize, queries: u64 },
    #[error("acceptance value {0} lies outside [0, 1]")]
    AcceptanceOutOfRange(String),
    #[error("curve must have one point per order 2^d, d = 0..=n")]
    MalformedCurve,
    #[error("at least one trial is required")]
    NoTrials,
}

/// Value of Q_n at one order D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "kebab-case")]
pub enum PointValue {
    Exact {
        #[serde(with = "rational::serde_string")]
        value: Rational,
    },
    MonteCarlo { mean: f64, stderr: f64, trials: u64 },
}

impl PointValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            PointValue::Exact { value } => rational::to_f64(value),
            PointValue::MonteCarlo { mean, .. } => *mean,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            PointValue::Exact { value } => Some(value),
            PointValue::MonteCarlo { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub order: u64,
    #[serde(flatten)]
    pub value: PointValue,
}

/// Q_n(2^d) for d = 0..=n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCurve {
    pub n: usize,
    /// Query count T of the algorithm.
    pub queries: u64,
    pub algorithm: String,
    pub points: Vec<CurvePoint>,
}

impl AcceptanceCurve {
    /// Checks the point layout and that every value lies in [0, 1].
    pub fn validate(&self) -> Result<(), PolyError> {
        if self.points.len() != self.n + 1
            || self
                .points
                .iter()
                .enumerate()
                .any(|(d, p)| p.order != 1u64 << d)
        {
            return Err(PolyError::MalformedCurve);
        }
        for p in &self.points {
            let ok = match &p.value {
                PointValue::Exact { value } => !value.is_negative() && *value <= Rational::one(),
                PointValue::MonteCarlo { mean, .. } => (0.0..=1.0).contains(mean),
            };
            if !ok {
                let shown = match &p.value {
                    PointValue::Exact { value } => rational::to_string(value),
                    PointValue::MonteCarlo { mean, .. } => mean.to_string(),
                };
                return Err(PolyError::AcceptanceOutOfRange(shown));
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.points.iter().all(|p| p.value.exact().is_some())
    }

    pub fn value(&self, order: u64) -> Option<&PointValue> {
        self.points.iter().find(|p| p.order == order).map(|p| &p.value)
    }
}

/// Builds an exact curve from a per-order evaluator.
pub fn exact_curve(
    n: usize,
    queries: u64,
    algorithm: &str,
    mut value: impl FnMut(u64) -> Result<Rational, PolyError>,
) -> Result<AcceptanceCurve, PolyError> {
    let points = (0..=n)
        .map(|d| {
            let order = 1u64 << d;
            Ok(CurvePoint {
                order,
                value: PointValue::Exact {
                    value: value(order)?,
                },
            })
        })
        .collect::<Result<_, PolyError>>()?;
    let curve = AcceptanceCurve {
        n,
        queries,
        algorithm: algorithm.to_string(),
        points,
    };
    curve.validate()?;
    Ok(curve)
}

/// Distribution over the span V of the samples collected so far.
type SpanLaw = HashMap<Subspace, Rational>;

/// Runs the sampling rounds on span states. `step` lists (y, P(y)) for one
/// round; the law of V after `rounds` rounds is returned.
fn span_law(n: usize, step: &[(u32, Rational)], rounds: usize) -> SpanLaw {
    let mut law: SpanLaw = HashMap::from([(Subspace::trivial(n), Rational::one())]);
    for _ in 0..rounds {
        let mut next: SpanLaw = HashMap::with_capacity(law.len() * 2);
        for (v, p) in &law {
            for (y, q) in step {
                let mut w = v.clone();
                w.insert_bits(*y);
                *next.entry(w).or_insert_with(Rational::zero) += p * q;
            }
        }
        law = next;
    }
    law
}

/// Accept probability of the decision algorithm given the law of V and a
/// test telling whether f(0) = f(s̃) for a candidate s̃.
fn accept_from_law(law: &SpanLaw, collides: impl Fn(GroupElement) -> bool) -> Rational {
    let mut accept = Rational::zero();
    for (v, p) in law {
        match v.orthogonal_complement().min_nonzero() {
            Some(s) if collides(s) => {}
            _ => accept += p,
        }
    }
    accept
}

/// Exact accept probability of [`qsim::simon_decide`] on any function hiding
/// `h`, using that every round is uniform on H^⊥.
pub fn simon_accept_probability(h: &Subspace, epsilon: &Rational) -> Result<Rational, PolyError> {
    let n = h.ambient_dim();
    let rounds = qsim::simon_rounds(n, epsilon)?;
    let dual = h.orthogonal_complement();
    let mass = Rational::new(BigInt::one(), BigInt::from(dual.order()));
    let step: Vec<(u32, Rational)> = dual
        .elements()
        .map(|y| (y.bits(), mass.clone()))
        .collect();
    let law = span_law(n, &step, rounds);
    Ok(accept_from_law(&law, |s| h.member(s).unwrap_or(false)))
}

/// Exact accept probability of [`qsim::simon_decide`] on the concrete
/// function `f`: the round law comes from the Fourier transform of f's
/// level sets and the pair test reads f itself. Agrees with
/// [`simon_accept_probability`] on f's hidden subgroup.
pub fn simon_accept_probability_of(
    f: &HidingFunction,
    epsilon: &Rational,
) -> Result<Rational, PolyError> {
    let n = f.n();
    if n > EXACT_MAX_N {
        return Err(PolyError::ExactCap { n, cap: EXACT_MAX_N });
    }
    let rounds = qsim::simon_rounds(n, epsilon)?;
    let size = 1usize << n;
    let mut levels: HashMap<u32, Vec<u32>> = HashMap::new();
    for (x, &v) in f.values().iter().enumerate() {
        levels.entry(v).or_default().push(x as u32);
    }
    // P(y) = Σ_levels |Σ_{x∈S} (−1)^{x·y}|² / 4^n
    let mut weight = vec![0i64; size];
    for level in levels.values() {
        for (y, w) in weight.iter_mut().enumerate() {
            let c: i64 = level
                .iter()
                .map(|&x| if (x & y as u32).count_ones().is_multiple_of(2) { 1 } else { -1 })
                .sum();
            *w += c * c;
        }
    }
    let scale = BigInt::from(size * size);
    let step: Vec<(u32, Rational)> = weight
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(y, &w)| (y as u32, Rational::new(BigInt::from(w), scale.clone())))
        .collect();
    let law = span_law(n, &step, rounds);
    let values = f.values();
    Ok(accept_from_law(&law, |s| values[0] == values[s.index()]))
}

/// Q_n(D) of [`qsim::simon_decide`], exact, for n ≤ [`EXACT_MAX_N`].
pub fn exact_qn_simon(n: usize, epsilon: &Rational, order: u64) -> Result<Rational, PolyError> {
    if n > EXACT_MAX_N {
        return Err(PolyError::ExactCap { n, cap: EXACT_MAX_N });
    }
    let d = order_exponent(n, order)?;
    let subgroups = gf2::enumerate_subspaces(n, d)?;
    let mut total = Rational::zero();
    for h in &subgroups {
        total += simon_accept_probability(h, epsilon)?;
    }
    Ok(total / Rational::from_integer(BigInt::from(subgroups.len())))
}

/// The exact curve of [`qsim::simon_decide`].
pub fn simon_exact_curve(n: usize, epsilon: &Rational) -> Result<AcceptanceCurve, PolyError> {
    let queries = qsim::simon_query_count(n, epsilon)?;
    exact_curve(n, queries, "simon", |order| exact_qn_simon(n, epsilon, order))
}

/// The exact curve of a synthetic algorithm via [`compose_qn`].
pub fn synthetic_exact_curve(alg: &SyntheticAlgorithm) -> Result<AcceptanceCurve, PolyError> {
    exact_curve(alg.n(), alg.queries(), "synthetic", |order| compose_qn(alg, order))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub polynomial: RationalPolynomial,
    /// `None` for the zero polynomial.
    pub degree: Option<usize>,
    /// 2T.
    pub bound: u64,
    /// 2T − degree (2T for the zero polynomial).
    pub margin: i64,
    pub pass: bool,
}

/// Interpolates an exact curve on D = 2^d and compares its degree with 2T.
pub fn degree_check(curve: &AcceptanceCurve, queries: u64) -> Result<DegreeReport, PolyError> {
    curve.validate()?;
    let points = curve
        .points
        .iter()
        .map(|p| {
            let y = p.value.exact().ok_or(PolyError::NotExact)?;
            Ok((Rational::from_integer(BigInt::from(p.order)), y.clone()))
        })
        .collect::<Result<Vec<_>, PolyError>>()?;
    let polynomial = interpolate(&points)?;
    let degree = polynomial.degree();
    let bound = 2 * queries;
    let margin = bound as i64 - degree.unwrap_or(0) as i64;
    Ok(DegreeReport {
        polynomial,
        degree,
        bound,
        margin,
        pass: margin >= 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over √trials.
    pub stderr: f64,
    pub trials: u64,
}

impl From<McEstimate> for PointValue {
    fn from(e: McEstimate) -> Self {
        PointValue::MonteCarlo {
            mean: e.mean,
            stderr: e.stderr,
            trials: e.trials,
        }
    }
}

/// Monte Carlo estimate of Q_n(D). Trial i draws H uniformly among
/// subgroups of order D and f uniformly among functions hiding H from
/// `task_rng(seed, i)`, then runs `alg` with the same generator.
pub fn estimate_qn<F>(
    mut alg: F,
    n: usize,
    order: u64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, PolyError>
where
    F: FnMut(&mut QueryCountingOracle<'_>, &mut ChaCha8Rng) -> Result<bool, PolyError>,
{
    if trials == 0 {
        return Err(PolyError::NoTrials);
    }
    let d = order_exponent(n, order)?;
    let mut accepted = 0u64;
    for i in 0..trials {
        let mut rng = crate::task_rng(seed, i);
        let h = gf2::random_subspace(n, d, &mut rng)?;
        let f = random_hiding_function(&h, &mut rng);
        let mut oracle = QueryCountingOracle::new(&f);
        if alg(&mut oracle, &mut rng)? {
            accepted += 1;
        }
    }
    let t = trials as f64;
    let mean = accepted as f64 / t;
    let var = if trials > 1 {
        // Bernoulli samples: Σ(x − mean)² = k(1 − mean)
        accepted as f64 * (1.0 - mean) / (t - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr: (var / t).sqrt(),
        trials,
    })
}

/// Monte Carlo curve over every order 2^d.
pub fn estimate_curve<F>(
    mut alg: F,
    n: usize,
    queries: u64,
    algorithm: &str,
    trials: u64,
    seed: u64,
) -> Result<AcceptanceCurve, PolyError>
where
    F: FnMut(&mut QueryCountingOracle<'_>, &mut ChaCha8Rng) -> Result<bool, PolyError>,
{
    let points = (0..=n)
        .map(|d| {
            let order = 1u64 << d;
            // distinct seed per order keeps points independent
            let est = estimate_qn(&mut alg, n, order, trials, seed.wrapping_add(d as u64 * 0x9E37_79B9))?;
            Ok(CurvePoint {
                order,
                value: est.into(),
            })
        })
        .collect::<Result<_, PolyError>>()?;
    let curve = AcceptanceCurve {
        n,
        queries,
        algorithm: algorithm.to_string(),
        points,
    };
    curve.validate()?;
    Ok(curve)
}

/// Adapter running [`qsim::simon_decide`] inside [`estimate_qn`].
pub fn simon_trial(
    epsilon: Rational,
) -> impl FnMut(&mut QueryCountingOracle<'_>, &mut ChaCha8Rng) -> Result<bool, PolyError> {
    move |oracle, rng| {
        let out = qsim::simon_decide(oracle, &epsilon, qsim::SimulationMode::Auto, rng)?;
        Ok(out.verdict == qsim::Verdict::Accept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiding::enumerate_hiding_functions;
    use crate::rational::{int, pow2, ratio};
    use rand::SeedableRng;

    fn quarter() -> Rational {
        ratio(1, 4)
    }

    #[test]
    fn simon_curve_endpoints() {
        for n in 1..=EXACT_MAX_N {
            assert_eq!(exact_qn_simon(n, &quarter(), 1).unwrap(), int(1));
            assert_eq!(exact_qn_simon(n, &quarter(), 1 << n).unwrap(), int(0));
        }
    }

    #[test]
    fn simon_period_case_meets_error_bound() {
        for n in 2..=EXACT_MAX_N {
            let r = qsim::simon_rounds(n, &quarter()).unwrap() as i64;
            let q2 = exact_qn_simon(n, &quarter(), 2).unwrap();
            assert!(q2 <= pow2(n as i64 - 1 - r), "n={n}: {q2}");
            assert!(q2 <= quarter());
        }
    }

    #[test]
    fn label_invariance_of_exact_accept_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for d in 0..=n {
                for h in gf2::enumerate_subspaces(n, d).unwrap() {
                    let by_subgroup = simon_accept_probability(&h, &quarter()).unwrap();
                    for _ in 0..2 {
                        let f = random_hiding_function(&h, &mut rng);
                        assert_eq!(simon_accept_probability_of(&f, &quarter()).unwrap(), by_subgroup);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_cap_is_enforced() {
        assert!(matches!(
            exact_qn_simon(5, &quarter(), 2),
            Err(PolyError::ExactCap { n: 5, cap: 4 })
        ));
    }

    #[test]
    fn degree_check_on_simon_n3() {
        let curve = simon_exact_curve(3, &quarter()).unwrap();
        let report = degree_check(&curve, curve.queries).unwrap();
        assert!(report.pass);
        assert!(report.degree.unwrap() <= 3);
    }

    #[test]
    fn degree_check_refuses_monte_carlo() {
        let mut curve = simon_exact_curve(2, &quarter()).unwrap();
        curve.points[1].value = PointValue::MonteCarlo {
            mean: 0.1,
            stderr: 0.01,
            trials: 100,
        };
        assert!(matches!(degree_check(&curve, 5), Err(PolyError::NotExact)));
    }

    #[test]
    fn empty_algorithm_has_degree_zero() {
        let alg = SyntheticAlgorithm::new(
            3,
            0,
            vec![SyntheticTerm {
                assignment: crate::PartialAssignment::new(3).unwrap(),
                alpha: int(1),
            }],
        )
        .unwrap();
        let report = degree_check(&synthetic_exact_curve(&alg).unwrap(), 0).unwrap();
        assert_eq!(report.degree, Some(0));
        assert_eq!(report.margin, 0);
        assert!(report.pass);
    }

    #[test]
    fn synthetic_degree_at_most_twice_queries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let alg = SyntheticAlgorithm::random(3, 2, 3, &mut rng).unwrap();
            let report = degree_check(&synthetic_exact_curve(&alg).unwrap(), alg.queries()).unwrap();
            assert!(report.degree.unwrap_or(0) <= 2, "{}", report.polynomial);
        }
    }

    #[test]
    fn monte_carlo_matches_exact_simon() {
        let est = estimate_qn(simon_trial(quarter()), 3, 1, 200, 1).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
        let est = estimate_qn(simon_trial(quarter()), 3, 2, 10_000, 2).unwrap();
        let exact = rational::to_f64(&exact_qn_simon(3, &quarter(), 2).unwrap());
        assert!((est.mean - exact).abs() <= 3.0 * est.stderr.max(1e-3), "{est:?} vs {exact}");
    }

    #[test]
    fn monte_carlo_matches_compose_for_synthetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let alg = SyntheticAlgorithm::random(2, 2, 3, &mut rng).unwrap();
        for order in [1u64, 2, 4] {
            let est = estimate_qn(|o, r| alg.run(o, r), 2, order, 10_000, 9).unwrap();
            let exact = rational::to_f64(&compose_qn(&alg, order).unwrap());
            assert!((est.mean - exact).abs() <= 3.0 * est.stderr.max(1e-3), "{est:?} vs {exact}");
        }
    }

    #[test]
    fn curve_json_carries_provenance() {
        let curve = simon_exact_curve(2, &quarter()).unwrap();
        let json = serde_json::to_value(&curve).unwrap();
        assert_eq!(json["points"][0]["provenance"], "exact");
        assert_eq!(json["points"][0]["value"], "1/1");
        let back: AcceptanceCurve = serde_json::from_value(json).unwrap();
        assert_eq!(back, curve);

        let mc = estimate_curve(simon_trial(quarter()), 2, 5, "simon", 50, 0).unwrap();
        let json = serde_json::to_value(&mc).unwrap();
        assert_eq!(json["points"][2]["provenance"], "monte-carlo");
    }

    #[test]
    fn out_of_range_points_are_rejected() {
        let curve = exact_curve(1, 0, "bad", |_| Ok(int(2)));
        assert!(matches!(curve, Err(PolyError::AcceptanceOutOfRange(_))));
    }

    #[test]
    fn averaging_over_functions_equals_averaging_over_subgroups() {
        let n = 2;
        for d in 0..=n {
            let mut sum = Rational::zero();
            let mut count = 0i64;
            for h in gf2::enumerate_subspaces(n, d).unwrap() {
                for f in enumerate_hiding_functions(&h).unwrap() {
                    sum += simon_accept_probability_of(&f, &quarter()).unwrap();
                    count += 1;
                }
            }
            assert_eq!(sum / int(count), exact_qn_simon(n, &quarter(), 1 << d).unwrap());
        }
    }
}
