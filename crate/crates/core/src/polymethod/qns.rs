//! Q_n^s(D): the probability that a uniformly random function hiding a
//! subgroup of order D extends the partial assignment s.

use num::{BigInt, One, Zero};

use super::PolyError;
use crate::gf2::{self, GroupElement, Subspace};
use crate::hiding::{count_extensions, PartialAssignment};
use crate::rational::{pow2, Rational};

/// Inclusion–exclusion runs over subsets of the difference set; beyond this
/// many distinct differences the expansion is refused.
pub const MAX_DIFFERENCES: usize = 20;

/// log₂ D, checking that D is a power of two in [1, 2^n].
pub fn order_exponent(n: usize, order: u64) -> Result<usize, PolyError> {
    if !order.is_power_of_two() || order.trailing_zeros() as usize > n {
        return Err(PolyError::InvalidOrder { order, n });
    }
    Ok(order.trailing_zeros() as usize)
}

fn check_dim(n: usize, s: &PartialAssignment) -> Result<(), PolyError> {
    if s.dim() != n {
        return Err(gf2::Gf2Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        }
        .into());
    }
    Ok(())
}

/// ∏_{0≤i<dp} (2^{d−i} − 1)/(2^{n−i} − 1): the fraction of d-dimensional
/// subspaces that contain a fixed dp-dimensional one. Zero when dp > d.
pub fn containment_ratio(n: usize, dp: usize, d: usize) -> Rational {
    let one = Rational::one();
    (0..dp).fold(Rational::one(), |acc, i| {
        acc * (pow2(d as i64 - i as i64) - &one) / (pow2((n - i) as i64) - &one)
    })
}

/// 1 / (m (m−1) ⋯ (m−k+1)) for m = 2^n: the chance that k prescribed
/// cosets receive k prescribed distinct labels.
fn inverse_falling(n: usize, skip: u64, k: u64) -> Rational {
    let m = BigInt::one() << n;
    let mut den = BigInt::one();
    for i in skip..skip + k {
        den *= &m - BigInt::from(i);
    }
    Rational::new(BigInt::one(), den)
}

/// Brute-force oracle: Σ_H count_extensions(H, s) / Σ_H count_extensions(H, ∅)
/// over every subgroup H of order D.
pub fn qns_bruteforce(n: usize, s: &PartialAssignment, order: u64) -> Result<Rational, PolyError> {
    check_dim(n, s)?;
    let d = order_exponent(n, order)?;
    let empty = PartialAssignment::new(n)?;
    let mut hits = BigInt::zero();
    let mut total = BigInt::zero();
    for h in gf2::enumerate_subspaces(n, d)? {
        hits += BigInt::from(count_extensions(&h, s)?);
        total += BigInt::from(count_extensions(&h, &empty)?);
    }
    Ok(Rational::new(hits, total))
}

/// Constant s: translate so the first point is 0, let d' be the dimension of
/// the span of the translated domain; then
/// Q_n^s(D) = 2^{−n} ∏_{0≤i<d'} (2^{d−i} − 1)/(2^{n−i} − 1).
pub fn qns_constant(n: usize, s: &PartialAssignment, order: u64) -> Result<Rational, PolyError> {
    check_dim(n, s)?;
    let d = order_exponent(n, order)?;
    if !s.is_constant() {
        return Err(PolyError::NotConstant);
    }
    let points = s.points();
    let Some(&base) = points.first() else {
        return Ok(Rational::one());
    };
    let span = Subspace::span_bits(n, points.iter().map(|p| p.bits() ^ base.bits()));
    Ok(pow2(-(n as i64)) * containment_ratio(n, span.dim(), d))
}

/// λ: probability that a uniform d-dimensional subspace contains none of
/// the pairwise differences of `points`, by two independent routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoidanceProbability {
    /// Σ_{S ⊆ E} (−1)^{|S|} · #{H ⊇ span S} / β(n, d).
    pub inclusion_exclusion: Rational,
    /// Direct filtering of the enumerated subspaces; `None` above the
    /// enumeration cap.
    pub direct: Option<Rational>,
}

fn distinct_differences(points: &[GroupElement]) -> Vec<u32> {
    let mut diffs: Vec<u32> = points
        .iter()
        .enumerate()
        .flat_map(|(i, a)| points[i + 1..].iter().map(move |b| a.bits() ^ b.bits()))
        .collect();
    diffs.sort_unstable();
    diffs.dedup();
    diffs
}

pub fn avoidance_probability(
    n: usize,
    points: &[GroupElement],
    d: usize,
) -> Result<AvoidanceProbability, PolyError> {
    let diffs = distinct_differences(points);
    if diffs.len() > MAX_DIFFERENCES {
        return Err(PolyError::TooManyDifferences(diffs.len()));
    }
    if d > n {
        return Err(gf2::Gf2Error::DimensionOutOfRange { n, k: d }.into());
    }
    let mut ie = Rational::zero();
    for subset in 0u32..1 << diffs.len() {
        let span = Subspace::span_bits(
            n,
            diffs
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .map(|(_, &e)| e),
        );
        let term = containment_ratio(n, span.dim(), d);
        if subset.count_ones() % 2 == 0 {
            ie += term;
        } else {
            ie -= term;
        }
    }
    let direct = if n <= gf2::enumeration_cap() {
        let subs = gf2::enumerate_subspaces(n, d)?;
        let good = subs
            .iter()
            .filter(|h| diffs.iter().all(|&e| !h.contains_bits(e)))
            .count();
        Some(Rational::new(BigInt::from(good), BigInt::from(subs.len())))
    } else {
        None
    };
    Ok(AvoidanceProbability {
        inclusion_exclusion: ie,
        direct,
    })
}

fn agreed(lambda: AvoidanceProbability) -> Result<Rational, PolyError> {
    match lambda.direct {
        Some(direct) if direct != lambda.inclusion_exclusion => Err(PolyError::PathMismatch {
            inclusion_exclusion: crate::rational::to_string(&lambda.inclusion_exclusion),
            direct: crate::rational::to_string(&direct),
        }),
        _ => Ok(lambda.inclusion_exclusion),
    }
}

/// Injective s on k points: Q_n^s(D) = ν·λ with ν = (2^n − k)!/(2^n)! and λ
/// from [`avoidance_probability`]. Both λ routes must agree.
pub fn qns_injective(n: usize, s: &PartialAssignment, order: u64) -> Result<Rational, PolyError> {
    check_dim(n, s)?;
    let d = order_exponent(n, order)?;
    if !s.is_injective() {
        return Err(PolyError::NotInjective);
    }
    let nu = inverse_falling(n, 0, s.len() as u64);
    let lambda = agreed(avoidance_probability(n, &s.points(), d)?)?;
    Ok(nu * lambda)
}

/// The factorisation Q_n^s(D) = Q₁ · Q₂ used by [`qns_general`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralDecomposition {
    /// s translated so its first point is 0, with every repeated-value
    /// point a replaced by a − (first point of its value group) ↦ b₁.
    pub folded_constant: PartialAssignment,
    /// dim H', H' the span of `folded_constant`'s domain.
    pub folded_dim: usize,
    /// The value classes collide modulo H', so no hiding function extends s.
    pub contradictory: bool,
    /// Q₁ = qns_constant(folded_constant).
    pub constant_factor: Rational,
    /// Q₂ = P(f extends s | f extends folded_constant), counted on G/H'.
    pub conditional_factor: Rational,
}

impl GeneralDecomposition {
    pub fn value(&self) -> Rational {
        &self.constant_factor * &self.conditional_factor
    }
}

/// Splits s into its folded constant part and the injective remainder on
/// the quotient G/H'.
///
/// Given H ⊇ H' and f(0) = b₁, the remaining l − 1 value classes need
/// representatives in distinct nonzero cosets of H, which is an avoidance
/// event for H/H' inside G/H' ≅ (Z/2Z)^{n−d'}, and their labels must be
/// the prescribed ones among the 2^n − 1 values other than b₁.
pub fn decompose_general(
    n: usize,
    s: &PartialAssignment,
    order: u64,
) -> Result<GeneralDecomposition, PolyError> {
    check_dim(n, s)?;
    let d = order_exponent(n, order)?;
    let groups = s.value_groups();
    let mut folded = PartialAssignment::new(n)?;
    let Some((b1, first_group)) = groups.first() else {
        return Ok(GeneralDecomposition {
            folded_constant: folded,
            folded_dim: 0,
            contradictory: false,
            constant_factor: Rational::one(),
            conditional_factor: Rational::one(),
        });
    };
    let origin = first_group[0];
    folded.insert(GroupElement::zero(n), *b1)?;
    for (_, pts) in &groups {
        for &p in &pts[1..] {
            folded.insert(p + pts[0], *b1)?;
        }
    }
    let h_prime = Subspace::span_bits(n, folded.points().iter().map(|p| p.bits()));
    let dp = h_prime.dim();
    let quotient = h_prime.quotient_map();
    let mut reps = Vec::with_capacity(groups.len());
    for (_, pts) in &groups {
        reps.push(quotient.project(pts[0] + origin)?);
    }
    let mut sorted = reps.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let contradictory = sorted.len() != reps.len();

    let constant_factor = qns_constant(n, &folded, order)?;
    let conditional_factor = if contradictory || d < dp {
        Rational::zero()
    } else {
        let lambda = agreed(avoidance_probability(n - dp, &reps, d - dp)?)?;
        inverse_falling(n, 1, groups.len() as u64 - 1) * lambda
    };
    Ok(GeneralDecomposition {
        folded_constant: folded,
        folded_dim: dp,
        contradictory,
        constant_factor,
        conditional_factor,
    })
}

/// Any s: Q_n^s(D) = Q₁ · Q₂, zero for contradictory s.
pub fn qns_general(n: usize, s: &PartialAssignment, order: u64) -> Result<Rational, PolyError> {
    Ok(decompose_general(n, s, order)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pa(n: usize, pairs: &[(u32, u32)]) -> PartialAssignment {
        PartialAssignment::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        for order in [1, 2, 4] {
            assert_eq!(qns_bruteforce(2, &pa(2, &[]), order).unwrap(), Rational::one());
            assert_eq!(qns_bruteforce(2, &pa(2, &[(0, 2)]), order).unwrap(), ratio(1, 4));
        }
        assert_eq!(
            qns_bruteforce(2, &pa(2, &[(0, 2), (1, 2)]), 2).unwrap(),
            ratio(1, 12)
        );
        assert!(matches!(
            qns_bruteforce(2, &pa(2, &[]), 3),
            Err(PolyError::InvalidOrder { .. })
        ));
        assert!(qns_bruteforce(2, &pa(2, &[]), 8).is_err());
    }

    #[test]
    fn constant_examples() {
        let single = pa(2, &[(0, 2)]);
        let pair = pa(2, &[(0, 2), (1, 2)]);
        for order in [1, 2, 4] {
            assert_eq!(qns_constant(2, &single, order).unwrap(), ratio(1, 4));
        }
        assert_eq!(qns_constant(2, &pair, 1).unwrap(), Rational::zero());
        assert_eq!(qns_constant(2, &pair, 2).unwrap(), ratio(1, 12));
        assert_eq!(qns_constant(2, &pair, 4).unwrap(), ratio(1, 4));
        for n in 1..=4 {
            let all: Vec<(u32, u32)> = (0..1u32 << n).map(|g| (g, 1)).collect();
            assert_eq!(
                qns_constant(n, &pa(n, &all), 1 << n).unwrap(),
                pow2(-(n as i64))
            );
        }
        assert!(matches!(
            qns_constant(2, &pa(2, &[(0, 2), (1, 3)]), 2),
            Err(PolyError::NotConstant)
        ));
    }

    #[test]
    fn injective_examples() {
        let s = pa(2, &[(0, 2), (1, 3)]);
        assert_eq!(qns_injective(2, &s, 1).unwrap(), ratio(1, 12));
        assert_eq!(qns_injective(2, &s, 2).unwrap(), ratio(1, 18));
        assert_eq!(qns_injective(2, &s, 4).unwrap(), Rational::zero());
        let lambda = avoidance_probability(2, &s.points(), 1).unwrap();
        assert_eq!(lambda.inclusion_exclusion, ratio(2, 3));
        assert_eq!(lambda.direct, Some(ratio(2, 3)));
        assert!(matches!(
            qns_injective(2, &pa(2, &[(0, 2), (1, 2)]), 2),
            Err(PolyError::NotInjective)
        ));
    }

    #[test]
    fn general_examples() {
        let s = pa(2, &[(0, 2), (3, 2), (1, 3)]);
        assert_eq!(qns_general(2, &s, 1).unwrap(), Rational::zero());
        assert_eq!(qns_general(2, &s, 2).unwrap(), ratio(1, 36));
        assert_eq!(qns_general(2, &s, 4).unwrap(), Rational::zero());
        for order in [1, 2, 4] {
            assert_eq!(
                qns_general(2, &s, order).unwrap(),
                qns_bruteforce(2, &s, order).unwrap()
            );
        }
    }

    #[test]
    fn general_reduces_to_special_cases() {
        let constant = pa(3, &[(1, 5), (6, 5), (7, 5)]);
        let injective = pa(3, &[(1, 5), (6, 2), (7, 0)]);
        for order in [1, 2, 4, 8] {
            assert_eq!(
                qns_general(3, &constant, order).unwrap(),
                qns_constant(3, &constant, order).unwrap()
            );
            assert_eq!(
                qns_general(3, &injective, order).unwrap(),
                qns_injective(3, &injective, order).unwrap()
            );
        }
    }

    #[test]
    fn contradiction_is_detected() {
        let consistent = pa(2, &[(0, 1), (3, 1), (1, 2), (2, 2)]);
        assert!(!decompose_general(2, &consistent, 2).unwrap().contradictory);

        // H' = <01>, yet 10 and 11 carry different values in one coset
        let split = pa(2, &[(0, 1), (1, 1), (2, 3), (3, 2)]);
        let dec = decompose_general(2, &split, 2).unwrap();
        assert!(dec.contradictory);
        assert_eq!(dec.value(), Rational::zero());
        assert_eq!(qns_bruteforce(2, &split, 2).unwrap(), Rational::zero());

        // folding 011 − 001 = 010 onto b1 = 1 clashes with s(010) = 3
        let folded_clash = pa(3, &[(0, 1), (1, 2), (3, 2), (2, 3)]);
        let dec = decompose_general(3, &folded_clash, 4).unwrap();
        assert!(dec.contradictory);
        for order in [1, 2, 4, 8] {
            assert_eq!(qns_general(3, &folded_clash, order).unwrap(), Rational::zero());
            assert_eq!(qns_bruteforce(3, &folded_clash, order).unwrap(), Rational::zero());
        }
    }

    #[test]
    fn conditional_factor_is_a_conditional_probability() {
        let cases = [
            pa(3, &[(0, 1), (3, 1), (5, 2), (6, 2)]),
            pa(3, &[(2, 4), (7, 4), (1, 3)]),
            pa(3, &[(1, 0), (2, 6), (4, 6), (7, 5)]),
        ];
        for s in &cases {
            for order in [1u64, 2, 4, 8] {
                let dec = decompose_general(3, s, order).unwrap();
                let joint = qns_bruteforce(3, s, order).unwrap();
                assert_eq!(dec.value(), joint);
                // translating the assignment leaves Q_n^s unchanged
                let shift = s.points()[0];
                let moved = PartialAssignment::from_pairs(
                    3,
                    s.iter().map(|(p, v)| ((p + shift).bits(), v)),
                )
                .unwrap();
                assert_eq!(qns_bruteforce(3, &moved, order).unwrap(), joint);
                let base = qns_bruteforce(3, &dec.folded_constant, order).unwrap();
                assert_eq!(base, dec.constant_factor);
                if !base.is_zero() {
                    assert_eq!(joint / base, dec.conditional_factor);
                }
            }
        }
    }

    #[test]
    fn conditional_factor_is_the_quotient_injective_value_rescaled() {
        // Q₂ equals the injective value of s' on G/H' at order D/D', once the
        // range of size 2^{n−d'} is swapped for the 2^n − 1 values left after b₁
        let cases = [
            pa(3, &[(0, 1), (3, 1), (5, 2), (6, 2)]),
            pa(3, &[(2, 4), (7, 4), (1, 3)]),
            pa(3, &[(1, 0), (2, 6), (4, 6), (7, 5)]),
            pa(4, &[(0, 9), (5, 9), (3, 2), (12, 7)]),
        ];
        for s in &cases {
            let n = s.dim();
            let dec = decompose_general(n, s, 1).unwrap();
            if dec.contradictory {
                assert!(dec.conditional_factor.is_zero());
                continue;
            }
            let h_prime = Subspace::span_bits(n, dec.folded_constant.points().iter().map(|p| p.bits()));
            let quotient = h_prime.quotient_map();
            let groups = s.value_groups();
            let origin = groups[0].1[0];
            let reduced = PartialAssignment::from_pairs(
                n - dec.folded_dim,
                groups
                    .iter()
                    .enumerate()
                    .map(|(i, (_, pts))| (quotient.project(pts[0] + origin).unwrap().bits(), i as u32)),
            )
            .unwrap();
            let l = groups.len() as u64;
            let rescale = inverse_falling(n, 1, l - 1) / inverse_falling(n - dec.folded_dim, 0, l);
            for d in dec.folded_dim..=n {
                let dec = decompose_general(n, s, 1 << d).unwrap();
                let literal = qns_injective(n - dec.folded_dim, &reduced, 1 << (d - dec.folded_dim)).unwrap();
                assert_eq!(dec.conditional_factor, literal * &rescale);
            }
        }
    }
}
