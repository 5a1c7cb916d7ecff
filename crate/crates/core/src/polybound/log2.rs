//! Rational brackets for log₂ of a positive rational.

use num::{BigInt, BigUint, Integer, One, Signed, Zero};

use super::Bracket;
use crate::rational::{pow2, Rational};

/// Target bracket width, as a power of two.
pub const LOG_PRECISION: u32 = 40;

fn power_of_two_exponent(v: &BigInt) -> Option<i64> {
    let m = v.magnitude();
    let tz = m.trailing_zeros()?;
    (m >> tz == BigUint::one()).then_some(tz as i64)
}

/// ⌊log₂ c⌋ for c > 0.
fn floor_log2(c: &Rational) -> i64 {
    let mut k = c.numer().bits() as i64 - c.denom().bits() as i64;
    // now 2^(k−1) < c < 2^(k+1)
    if *c < pow2(k) {
        k -= 1;
    }
    k
}

/// log₂ y for y ∈ [1, 2) by repeated squaring in `frac`-bit fixed point.
/// Returns (lower, upper) after `steps` output bits.
fn fraction_bits(y: &Rational, frac: u64, steps: u32) -> (Rational, Rational) {
    let one = BigInt::one() << frac;
    let two = &one << 1u32;
    let scaled = y * Rational::from_integer(one.clone());
    // lower track rounds down, upper track rounds up
    let mut lo = scaled.floor().to_integer();
    let mut hi = scaled.ceil().to_integer();
    let mut lo_sum = Rational::zero();
    let mut hi_sum = Rational::zero();
    for i in 1..=steps {
        lo = (&lo * &lo) >> frac;
        let sq = &hi * &hi;
        hi = sq.div_ceil(&one);
        if lo >= two {
            lo >>= 1u32;
            lo_sum += pow2(-(i as i64));
        }
        if hi >= two {
            hi = hi.div_ceil(&BigInt::from(2));
            hi_sum += pow2(-(i as i64));
        }
    }
    // the upper track's remaining value lies in [1, 2], worth at most 2^-steps
    (lo_sum, hi_sum + pow2(-(steps as i64)))
}

/// Bracket on log₂ c with width at most 2^-[`LOG_PRECISION`]; exact when c
/// is a power of two.
pub fn log2_bracket(c: &Rational) -> Bracket {
    debug_assert!(c.is_positive());
    if let (Some(a), Some(b)) = (power_of_two_exponent(c.numer()), power_of_two_exponent(c.denom())) {
        return Bracket::exact(Rational::from_integer((a - b).into()));
    }
    let k = floor_log2(c);
    let y = c / pow2(k);
    let base = Rational::from_integer(k.into());
    let target = pow2(-(LOG_PRECISION as i64));
    let mut frac = 128u64;
    loop {
        let (lo, hi) = fraction_bits(&y, frac, LOG_PRECISION + 1);
        if &hi - &lo <= target {
            return Bracket {
                lo: &base + lo,
                hi: &base + hi,
            };
        }
        frac *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, to_f64};
    use proptest::prelude::*;

    #[test]
    fn powers_of_two_are_exact() {
        assert_eq!(log2_bracket(&int(1)), Bracket::exact(int(0)));
        assert_eq!(log2_bracket(&int(1024)), Bracket::exact(int(10)));
        assert_eq!(log2_bracket(&ratio(1, 64)), Bracket::exact(int(-6)));
    }

    #[test]
    fn three_is_bracketed() {
        let b = log2_bracket(&int(3));
        let truth = 3f64.log2();
        assert!(to_f64(&b.lo) <= truth && truth <= to_f64(&b.hi));
        assert!(b.width() <= pow2(-40));
        // 2^lo ≤ 3 checked exactly via lo < 1.585 < hi on a known rational
        assert!(b.lo < ratio(158_497, 100_000) && b.hi > ratio(158_496, 100_000));
    }

    proptest! {
        #[test]
        fn bracket_contains_float_log(num in 1i64..1_000_000, den in 1i64..1_000_000) {
            let c = ratio(num, den);
            let b = log2_bracket(&c);
            let truth = (num as f64).log2() - (den as f64).log2();
            prop_assert!(b.lo <= b.hi);
            prop_assert!(b.width() <= pow2(-40));
            prop_assert!(to_f64(&b.lo) <= truth + 1e-9 && truth - 1e-9 <= to_f64(&b.hi));
        }
    }
}
