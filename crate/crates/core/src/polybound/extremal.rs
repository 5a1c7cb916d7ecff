//! Extremal polynomials: the largest derivative at x₀ ∈ [1, 2] a degree-d
//! polynomial can have while staying in [−1, 1] on 1, 2, 4, …, 2^n.
//!
//! The LP is written in the values u_j = P(2^j) + 1 ∈ [0, 2] at the first
//! d + 1 nodes, with P recovered by Lagrange interpolation. In those
//! variables every right-hand side is nonnegative (u = 0 is P ≡ −1), so the
//! slack basis starts the simplex.

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::simplex::{Simplex, SimplexError};
use super::BoundError;
use crate::polymethod::RationalPolynomial;
use crate::rational::{self, pow2, Rational};

pub const DEFAULT_GRID: usize = 33;

/// Extra nodes placed in each neighboring coarse cell of the best node.
pub const REFINEMENT_NODES: usize = 16;

/// A node 2^exponent where the witness touches ±1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveConstraint {
    pub exponent: usize,
    /// +1 or −1.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridValue {
    #[serde(with = "rational::serde_string")]
    pub x0: Rational,
    #[serde(with = "rational::serde_string")]
    pub c_star: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub n: usize,
    pub d: usize,
    /// Node attaining the best value, after refinement.
    #[serde(with = "rational::serde_string")]
    pub x0: Rational,
    #[serde(with = "rational::serde_string")]
    pub c_star: Rational,
    pub witness: RationalPolynomial,
    pub active_constraints: Vec<ActiveConstraint>,
    /// Optimum at each coarse node.
    pub coarse: Vec<GridValue>,
    /// Best refined value minus best coarse value.
    #[serde(with = "rational::serde_string")]
    pub refinement_gain: Rational,
    /// 2^(4d − n − 2) when 2d ≤ n.
    #[serde(with = "rational::serde_string_opt")]
    pub lemma_cap: Option<Rational>,
    pub within_cap: bool,
    pub pivots: usize,
}

impl ExtremalResult {
    pub fn coarse_best(&self) -> Rational {
        self.coarse
            .iter()
            .map(|g| g.c_star.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// 2^(4d − n − 2).
pub fn lemma_cap(n: usize, d: usize) -> Rational {
    pow2(4 * d as i64 - n as i64 - 2)
}

/// Lagrange basis on the nodes 2^0..2^d.
fn lagrange_basis(d: usize) -> Vec<RationalPolynomial> {
    let nodes: Vec<Rational> = (0..=d).map(|j| pow2(j as i64)).collect();
    (0..=d)
        .map(|j| {
            let mut p = RationalPolynomial::constant(Rational::one());
            for (k, xk) in nodes.iter().enumerate() {
                if k != j {
                    let factor = RationalPolynomial::new(vec![-xk.clone(), Rational::one()]);
                    p = p.mul(&factor).scale(&(&nodes[j] - xk).recip());
                }
            }
            p
        })
        .collect()
}

struct ExtremalLp {
    basis: Vec<RationalPolynomial>,
    derivatives: Vec<RationalPolynomial>,
    simplex: Simplex,
}

impl ExtremalLp {
    fn new(n: usize, d: usize) -> Result<Self, SimplexError> {
        let basis = lagrange_basis(d);
        let two = Rational::from_integer(2.into());
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..=d {
            let mut row = vec![Rational::zero(); d + 1];
            row[j] = Rational::one();
            a.push(row);
            b.push(two.clone());
        }
        for i in d + 1..=n {
            let x = pow2(i as i64);
            let row: Vec<Rational> = basis.iter().map(|l| l.eval(&x)).collect();
            // P(x) = Σ u_j L_j(x) − 1 with Σ L_j ≡ 1
            a.push(row.clone());
            b.push(two.clone());
            a.push(row.into_iter().map(|v| -v).collect());
            b.push(Rational::zero());
        }
        let derivatives = basis.iter().map(RationalPolynomial::derivative).collect();
        Ok(Self {
            basis,
            derivatives,
            simplex: Simplex::new(&a, &b)?,
        })
    }

    fn solve(&mut self, x0: &Rational) -> Result<(Rational, RationalPolynomial), SimplexError> {
        let c: Vec<Rational> = self.derivatives.iter().map(|l| l.eval(x0)).collect();
        let sol = self.simplex.maximize(&c)?;
        let mut p = RationalPolynomial::constant(-Rational::one());
        for (u, l) in sol.x.iter().zip(&self.basis) {
            p = p.add(&l.scale(u));
        }
        Ok((sol.value, p))
    }
}

fn node(k: usize, steps: usize) -> Rational {
    Rational::one() + Rational::new(BigInt::from(k), BigInt::from(steps))
}

/// Maximizes P′(x₀) over degree-≤d polynomials with |P(2^i)| ≤ 1 for
/// i = 0..=n, over `grid` equispaced x₀ in [1, 2] and then a finer grid in
/// the two cells around the best node.
pub fn extremal_search(n: usize, d: usize, grid: usize) -> Result<ExtremalResult, BoundError> {
    if d > n {
        return Err(BoundError::DegreeAboveNodes { n, d });
    }
    if grid < 2 {
        return Err(BoundError::Grid(grid));
    }
    let cap = (2 * d <= n).then(|| lemma_cap(n, d));
    if d == 0 {
        let witness = RationalPolynomial::zero();
        return Ok(ExtremalResult {
            n,
            d,
            x0: Rational::one(),
            c_star: Rational::zero(),
            active_constraints: active_constraints(&witness, n),
            witness,
            coarse: (0..grid)
                .map(|k| GridValue {
                    x0: node(k, grid - 1),
                    c_star: Rational::zero(),
                })
                .collect(),
            refinement_gain: Rational::zero(),
            within_cap: true,
            lemma_cap: cap.clone(),
            pivots: 0,
        });
    }
    let mut lp = ExtremalLp::new(n, d)?;
    let steps = grid - 1;
    let mut coarse = Vec::with_capacity(grid);
    let mut best: Option<(Rational, Rational, RationalPolynomial, usize)> = None;
    for k in 0..grid {
        let x0 = node(k, steps);
        let (value, p) = lp.solve(&x0)?;
        coarse.push(GridValue {
            x0: x0.clone(),
            c_star: value.clone(),
        });
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((x0, value, p, k));
        }
    }
    let (mut x0, mut c_star, mut witness, k) = best.expect("grid is nonempty");
    let coarse_best = c_star.clone();
    let fine = steps * (REFINEMENT_NODES + 1);
    let centre = k * (REFINEMENT_NODES + 1);
    let lo = centre.saturating_sub(REFINEMENT_NODES + 1);
    let hi = (centre + REFINEMENT_NODES + 1).min(fine);
    for j in lo..=hi {
        if j % (REFINEMENT_NODES + 1) == 0 {
            continue;
        }
        let x = node(j, fine);
        let (value, p) = lp.solve(&x)?;
        if value > c_star {
            x0 = x;
            c_star = value;
            witness = p;
        }
    }
    let within_cap = cap.as_ref().is_none_or(|c| c_star <= *c);
    Ok(ExtremalResult {
        n,
        d,
        refinement_gain: &c_star - coarse_best,
        active_constraints: active_constraints(&witness, n),
        x0,
        c_star,
        witness,
        coarse,
        within_cap,
        lemma_cap: cap.clone(),
        pivots: lp.simplex.pivots(),
    })
}

fn active_constraints(p: &RationalPolynomial, n: usize) -> Vec<ActiveConstraint> {
    (0..=n)
        .filter_map(|i| {
            let v = p.eval(&pow2(i as i64));
            (v.abs() == Rational::one()).then(|| ActiveConstraint {
                exponent: i,
                sign: if v.is_positive() { 1 } else { -1 },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn linear_cases() {
        let r = extremal_search(4, 1, DEFAULT_GRID).unwrap();
        assert_eq!(r.c_star, ratio(2, 15));
        assert_eq!(r.lemma_cap, Some(ratio(1, 4)));
        assert!(r.within_cap);
        assert_eq!(r.refinement_gain, int(0));
        let r = extremal_search(2, 1, DEFAULT_GRID).unwrap();
        assert_eq!(r.c_star, ratio(2, 3));
    }

    #[test]
    fn zero_degree_is_flat() {
        let r = extremal_search(5, 0, 3).unwrap();
        assert_eq!(r.c_star, int(0));
        assert!(r.coarse.iter().all(|g| g.c_star.is_zero()));
    }

    #[test]
    fn witness_is_feasible_and_attains_optimum() {
        for (n, d) in [(6usize, 2usize), (8, 3), (7, 3)] {
            let r = extremal_search(n, d, 9).unwrap();
            for i in 0..=n {
                assert!(r.witness.eval(&pow2(i as i64)).abs() <= int(1));
            }
            assert_eq!(r.witness.derivative().eval(&r.x0), r.c_star);
            assert!(r.witness.degree().unwrap() <= d);
            assert!(!r.active_constraints.is_empty());
            assert!(r.within_cap);
        }
    }

    /// Best P′(x₀) over all vertices of the feasible polytope: every choice
    /// of d + 1 nodes and signs, interpolated and kept when feasible.
    fn vertex_enumeration(n: usize, d: usize, x0: &Rational) -> Rational {
        let mut best = Rational::zero();
        for mask in 0u32..1 << (n + 1) {
            if mask.count_ones() as usize != d + 1 {
                continue;
            }
            let nodes: Vec<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
            for signs in 0u32..1 << (d + 1) {
                let pts: Vec<_> = nodes
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (pow2(i as i64), int(if signs >> k & 1 == 1 { 1 } else { -1 })))
                    .collect();
                let p = crate::polymethod::interpolate(&pts).unwrap();
                if (0..=n).all(|i| p.eval(&pow2(i as i64)).abs() <= int(1)) {
                    best = best.max(p.derivative().eval(x0));
                }
            }
        }
        best
    }

    #[test]
    fn matches_vertex_enumeration() {
        for (n, d) in [(1, 1), (3, 1), (4, 1), (4, 2), (5, 2), (6, 3), (6, 2)] {
            let r = extremal_search(n, d, 5).unwrap();
            for g in &r.coarse {
                assert_eq!(g.c_star, vertex_enumeration(n, d, &g.x0), "n={n} d={d} x0={}", g.x0);
            }
        }
        for n in 1..=8 {
            let r = extremal_search(n, 1, 5).unwrap();
            assert_eq!(r.c_star, Rational::new(2.into(), (BigInt::one() << n) - 1));
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(extremal_search(3, 4, 5), Err(BoundError::DegreeAboveNodes { .. })));
        assert!(matches!(extremal_search(3, 1, 1), Err(BoundError::Grid(1))));
    }
}
