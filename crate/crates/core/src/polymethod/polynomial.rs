use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::PolyError;
use crate::rational::{self, Rational};

/// Univariate polynomial with exact rational coefficients, lowest degree
/// first. Trailing zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "PolynomialRecord", into = "PolynomialRecord")]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRecord {
    #[serde(with = "rational::serde_string_vec")]
    coefficients: Vec<Rational>,
}

impl From<PolynomialRecord> for RationalPolynomial {
    fn from(r: PolynomialRecord) -> Self {
        Self::new(r.coefficients)
    }
}

impl From<RationalPolynomial> for PolynomialRecord {
    fn from(p: RationalPolynomial) -> Self {
        Self {
            coefficients: p.coeffs,
        }
    }
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial x.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), crate::rational::int(1)])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        Self::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&crate::rational::int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead = divisor.leading_coefficient()?.clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Upper bound for |p(x)| on |x| ≤ r: Σ |c_i| r^i.
    pub fn magnitude_bound(&self, r: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * r + c.abs())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

/// The unique polynomial of degree < `points.len()` through `points`,
/// by Newton divided differences in exact arithmetic.
pub fn interpolate(points: &[(Rational, Rational)]) -> Result<RationalPolynomial, PolyError> {
    let xs: Vec<&Rational> = points.iter().map(|(x, _)| x).collect();
    for (i, a) in xs.iter().enumerate() {
        if xs[..i].contains(a) {
            return Err(PolyError::DuplicateAbscissa(rational::to_string(a)));
        }
    }
    let m = points.len();
    let mut table: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..m {
        for i in (level..m).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Horner on the Newton form
    let mut p = RationalPolynomial::zero();
    for i in (0..m).rev() {
        let shift = RationalPolynomial::new(vec![-xs[i].clone(), crate::rational::int(1)]);
        p = p.mul(&shift).add(&RationalPolynomial::constant(table[i].clone()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> RationalPolynomial {
        RationalPolynomial::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        assert_eq!(poly(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(poly(&[0, 0]).degree(), None);
        assert!(poly(&[]).is_zero());
    }

    #[test]
    fn interpolation_examples() {
        let constant: Vec<_> = [1, 2, 4, 8].iter().map(|&x| (int(x), ratio(3, 7))).collect();
        assert_eq!(interpolate(&constant).unwrap().degree(), Some(0));

        let linear: Vec<_> = [1, 2, 4, 8, 16].iter().map(|&x| (int(x), int(x - 1))).collect();
        assert_eq!(interpolate(&linear).unwrap(), poly(&[-1, 1]));

        // (1/8)(D − 1)/7 at D = 1, 2, 4, 8
        let curve: Vec<_> = [1, 2, 4, 8]
            .iter()
            .map(|&d| (int(d), ratio(d - 1, 56)))
            .collect();
        let p = interpolate(&curve).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.coefficients(), &[ratio(-1, 56), ratio(1, 56)]);
    }

    #[test]
    fn duplicate_abscissae_are_rejected() {
        let pts = vec![(int(1), int(0)), (int(1), int(1))];
        assert!(matches!(interpolate(&pts), Err(PolyError::DuplicateAbscissa(_))));
    }

    #[test]
    fn derivative_and_division() {
        let p = poly(&[1, -3, 0, 2]);
        assert_eq!(p.derivative(), poly(&[-3, 0, 6]));
        let d = poly(&[-1, 1]);
        let (q, r) = p.div_rem(&d).unwrap();
        assert_eq!(q.mul(&d).add(&r), p);
        assert!(r.degree().unwrap_or(0) < 1);
        assert_eq!(r, RationalPolynomial::constant(p.eval(&int(1))));
    }

    proptest! {
        #[test]
        fn interpolation_recovers_low_degree_polynomials(
            coeffs in prop::collection::vec(-50i64..50, 0..6),
            extra in 0usize..3,
        ) {
            let p = poly(&coeffs);
            let nodes = coeffs.len() + extra;
            let pts: Vec<_> = (0..nodes)
                .map(|i| { let x = int(1 << i); (x.clone(), p.eval(&x)) })
                .collect();
            let q = interpolate(&pts).unwrap();
            prop_assert_eq!(q, p);
        }
    }
}
