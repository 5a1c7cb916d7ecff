use std::collections::BTreeSet;

use num::{BigInt, One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{qns::qns_general, PolyError};
use crate::gf2::{self, GroupElement};
use crate::hiding::{enumerate_hiding_functions, HidingFunction, PartialAssignment, QueryCountingOracle};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticTerm {
    pub assignment: PartialAssignment,
    #[serde(with = "rational::serde_string")]
    pub alpha: Rational,
}

/// An algorithm given directly by its acceptance polynomial
/// P(f) = Σ α_s I_s(f) with every |dom(s)| ≤ 2T.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SyntheticRecord", into = "SyntheticRecord")]
pub struct SyntheticAlgorithm {
    n: usize,
    queries: u64,
    terms: Vec<SyntheticTerm>,
}

#[derive(Serialize, Deserialize)]
struct SyntheticRecord {
    n: usize,
    queries: u64,
    terms: Vec<SyntheticTerm>,
}

impl From<SyntheticAlgorithm> for SyntheticRecord {
    fn from(a: SyntheticAlgorithm) -> Self {
        Self {
            n: a.n,
            queries: a.queries,
            terms: a.terms,
        }
    }
}

impl TryFrom<SyntheticRecord> for SyntheticAlgorithm {
    type Error = PolyError;

    fn try_from(r: SyntheticRecord) -> Result<Self, Self::Error> {
        SyntheticAlgorithm::new(r.n, r.queries, r.terms)
    }
}

impl SyntheticAlgorithm {
    pub fn new(n: usize, queries: u64, terms: Vec<SyntheticTerm>) -> Result<Self, PolyError> {
        for t in &terms {
            if t.assignment.dim() != n {
                return Err(gf2::Gf2Error::DimensionMismatch {
                    expected: n,
                    found: t.assignment.dim(),
                }
                .into());
            }
            if t.assignment.len() as u64 > 2 * queries {
                return Err(PolyError::DomainTooLarge {
                    size: t.assignment.len(),
                    queries,
                });
            }
        }
        Ok(Self { n, queries, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The declared query complexity T.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn terms(&self) -> &[SyntheticTerm] {
        &self.terms
    }

    /// max |dom(s)| over the terms.
    pub fn max_domain(&self) -> usize {
        self.terms.iter().map(|t| t.assignment.len()).max().unwrap_or(0)
    }

    /// P(f) = Σ α_s I_s(f).
    pub fn acceptance(&self, f: &HidingFunction) -> Result<Rational, PolyError> {
        let mut p = Rational::zero();
        for t in &self.terms {
            if f.extends(&t.assignment)? {
                p += &t.alpha;
            }
        }
        Ok(p)
    }

    /// Checks 0 ≤ P(f) ≤ 1 over every hiding function (n ≤ 3).
    pub fn validate_exhaustive(&self) -> Result<(), PolyError> {
        for k in 0..=self.n {
            for h in gf2::enumerate_subspaces(self.n, k)? {
                for f in enumerate_hiding_functions(&h)? {
                    let p = self.acceptance(&f)?;
                    if p < Rational::zero() || p > Rational::one() {
                        return Err(PolyError::AcceptanceOutOfRange(rational::to_string(&p)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the algorithm against a black box: queries the union of all
    /// domains, then accepts with probability P(f).
    pub fn run<R: Rng + ?Sized>(
        &self,
        oracle: &mut QueryCountingOracle<'_>,
        rng: &mut R,
    ) -> Result<bool, PolyError> {
        let points: BTreeSet<GroupElement> = self
            .terms
            .iter()
            .flat_map(|t| t.assignment.points())
            .collect();
        let mut seen = std::collections::HashMap::new();
        for p in points {
            seen.insert(p, oracle.query(p)?);
        }
        let mut p = Rational::zero();
        for t in &self.terms {
            if t.assignment.iter().all(|(x, v)| seen[&x] == v) {
                p += &t.alpha;
            }
        }
        Ok(rng.gen::<f64>() < rational::to_f64(&p))
    }

    /// A random valid algorithm with `terms` indicator terms whose domains
    /// have at most `max_domain` points.
    ///
    /// Shape: P = (c₀ + Σ w_i I_{s_i} − Σ u_j I_{t_j}) / Z with c₀ = Σ u_j
    /// and Z = c₀ + Σ w_i, so 0 ≤ P ≤ 1 for every f.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        max_domain: usize,
        terms: usize,
        rng: &mut R,
    ) -> Result<Self, PolyError> {
        let size = 1u32 << n;
        let max_domain = max_domain.min(size as usize);
        let mut raw: Vec<(PartialAssignment, i64)> = Vec::new();
        for i in 0..terms {
            // the first term always uses the full domain budget
            let len = if i == 0 {
                max_domain
            } else {
                rng.gen_range(1..=max_domain.max(1))
            };
            let mut s = PartialAssignment::new(n)?;
            while s.len() < len {
                let p = GroupElement::new(rng.gen_range(0..size), n)?;
                if s.get(p).is_none() {
                    // few distinct values so repeated-value terms show up
                    s.insert(p, rng.gen_range(0..size.min(3)))?;
                }
            }
            let w: i64 = rng.gen_range(1..=5);
            raw.push((s, if rng.gen_bool(0.5) { w } else { -w }));
        }
        let c0: i64 = raw.iter().filter(|(_, w)| *w < 0).map(|(_, w)| -w).sum();
        let z = c0 + raw.iter().filter(|(_, w)| *w > 0).map(|(_, w)| w).sum::<i64>();
        let mut out = Vec::new();
        if c0 > 0 {
            out.push(SyntheticTerm {
                assignment: PartialAssignment::new(n)?,
                alpha: Rational::new(BigInt::from(c0), BigInt::from(z)),
            });
        }
        for (s, w) in raw {
            out.push(SyntheticTerm {
                assignment: s,
                alpha: Rational::new(BigInt::from(w), BigInt::from(z)),
            });
        }
        Self::new(n, max_domain.div_ceil(2) as u64, out)
    }
}

/// Q_n(D) = Σ α_s Q_n^s(D).
pub fn compose_qn(alg: &SyntheticAlgorithm, order: u64) -> Result<Rational, PolyError> {
    let mut q = Rational::zero();
    for t in &alg.terms {
        q += &t.alpha * qns_general(alg.n, &t.assignment, order)?;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::enumerate_subspaces;
    use crate::rational::{int, pow2, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn term(n: usize, pairs: &[(u32, u32)], alpha: Rational) -> SyntheticTerm {
        SyntheticTerm {
            assignment: PartialAssignment::from_pairs(n, pairs.iter().copied()).unwrap(),
            alpha,
        }
    }

    /// Average of P(f) over every function hiding a subgroup of order D.
    fn brute_qn(alg: &SyntheticAlgorithm, order: u64) -> Rational {
        let d = order.trailing_zeros() as usize;
        let mut sum = Rational::zero();
        let mut count = 0i64;
        for h in enumerate_subspaces(alg.n(), d).unwrap() {
            for f in enumerate_hiding_functions(&h).unwrap() {
                sum += alg.acceptance(&f).unwrap();
                count += 1;
            }
        }
        sum / int(count)
    }

    #[test]
    fn compose_examples() {
        let empty = SyntheticAlgorithm::new(2, 0, vec![term(2, &[], int(1))]).unwrap();
        let single = SyntheticAlgorithm::new(3, 1, vec![term(3, &[(5, 6)], int(1))]).unwrap();
        for order in [1, 2, 4] {
            assert_eq!(compose_qn(&empty, order).unwrap(), int(1));
        }
        for order in [1, 2, 4, 8] {
            assert_eq!(compose_qn(&single, order).unwrap(), pow2(-3));
        }
    }

    #[test]
    fn compose_matches_function_average_at_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let alg = SyntheticAlgorithm::random(2, 3, 4, &mut rng).unwrap();
            alg.validate_exhaustive().unwrap();
            for order in [1, 2, 4] {
                assert_eq!(compose_qn(&alg, order).unwrap(), brute_qn(&alg, order));
            }
        }
    }

    #[test]
    fn domain_bound_is_enforced() {
        let t = term(2, &[(0, 1), (1, 2), (2, 3)], ratio(1, 2));
        assert!(matches!(
            SyntheticAlgorithm::new(2, 1, vec![t.clone()]),
            Err(PolyError::DomainTooLarge { .. })
        ));
        assert!(SyntheticAlgorithm::new(2, 2, vec![t]).is_ok());
    }

    #[test]
    fn out_of_range_acceptance_is_reported() {
        let alg = SyntheticAlgorithm::new(2, 0, vec![term(2, &[], int(2))]).unwrap();
        assert!(matches!(
            alg.validate_exhaustive(),
            Err(PolyError::AcceptanceOutOfRange(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let alg = SyntheticAlgorithm::new(
            2,
            1,
            vec![term(2, &[], ratio(1, 3)), term(2, &[(0, 1), (3, 1)], ratio(2, 3))],
        )
        .unwrap();
        let json = serde_json::to_string(&alg).unwrap();
        assert!(json.contains("\"1/3\""));
        assert!(json.contains("\"11\""));
        let back: SyntheticAlgorithm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, alg);
    }
}
