//! Dense exact-rational primal simplex for `max cᵀx s.t. Ax ≤ b, x ≥ 0`
//! with `b ≥ 0`, so the slack basis is feasible from the start. Bland's
//! rule guarantees termination under degeneracy.

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("right-hand side of row {0} is negative")]
    NegativeRhs(usize),
    #[error("objective is unbounded")]
    Unbounded,
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    /// Values of the structural variables.
    pub x: Vec<Rational>,
    /// Rows whose constraint holds with equality.
    pub tight_rows: Vec<usize>,
}

/// Tableau that keeps its basis between solves, so re-optimizing with a
/// nearby objective starts from the previous optimum.
#[derive(Clone, Debug)]
pub struct Simplex {
    vars: usize,
    /// rows × (vars + rows) coefficients; the slack block starts at `vars`.
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Simplex {
    pub fn new(a: &[Vec<Rational>], b: &[Rational]) -> Result<Self, SimplexError> {
        if a.len() != b.len() {
            return Err(SimplexError::Shape {
                expected: a.len(),
                found: b.len(),
            });
        }
        let m = a.len();
        let vars = a.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(m);
        for (i, row) in a.iter().enumerate() {
            if row.len() != vars {
                return Err(SimplexError::Shape {
                    expected: vars,
                    found: row.len(),
                });
            }
            if b[i].is_negative() {
                return Err(SimplexError::NegativeRhs(i));
            }
            let mut full = row.clone();
            full.extend((0..m).map(|j| Rational::from_integer((i == j).into())));
            rows.push(full);
        }
        Ok(Self {
            vars,
            rows,
            rhs: b.to_vec(),
            basis: (vars..vars + m).collect(),
            pivots: 0,
        })
    }

    /// Total pivots performed over the lifetime of this tableau.
    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Maximizes `cᵀx` starting from the current basis.
    pub fn maximize(&mut self, c: &[Rational]) -> Result<LpSolution, SimplexError> {
        if c.len() != self.vars {
            return Err(SimplexError::Shape {
                expected: self.vars,
                found: c.len(),
            });
        }
        let width = self.vars + self.rows.len();
        let cost = |j: usize| c.get(j).cloned().unwrap_or_else(Rational::zero);
        loop {
            // reduced cost c_j − c_Bᵀ B⁻¹A_j, entering index by Bland's rule
            let entering = (0..width).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut red = cost(j);
                for (i, &bv) in self.basis.iter().enumerate() {
                    if bv < self.vars && !self.rows[i][j].is_zero() {
                        red -= &c[bv] * &self.rows[i][j];
                    }
                }
                red.is_positive()
            });
            let Some(col) = entering else { break };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (r, _) = leave.ok_or(SimplexError::Unbounded)?;
            self.pivot(r, col);
        }
        let mut x = vec![Rational::zero(); self.vars];
        let mut slack = vec![Rational::zero(); self.rows.len()];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.vars {
                x[bv] = self.rhs[i].clone();
            } else {
                slack[bv - self.vars] = self.rhs[i].clone();
            }
        }
        let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
        let tight_rows = (0..self.rows.len()).filter(|&i| slack[i].is_zero()).collect();
        Ok(LpSolution {
            value,
            x,
            tight_rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let a = vec![ints(&[1, 0]), ints(&[0, 2]), ints(&[3, 2])];
        let mut lp = Simplex::new(&a, &ints(&[4, 12, 18])).unwrap();
        let sol = lp.maximize(&ints(&[3, 5])).unwrap();
        assert_eq!(sol.value, int(36));
        assert_eq!(sol.x, ints(&[2, 6]));
        assert_eq!(sol.tight_rows, vec![1, 2]);
    }

    #[test]
    fn warm_start_reoptimizes() {
        let a = vec![ints(&[1, 0]), ints(&[0, 2]), ints(&[3, 2])];
        let mut lp = Simplex::new(&a, &ints(&[4, 12, 18])).unwrap();
        lp.maximize(&ints(&[3, 5])).unwrap();
        let sol = lp.maximize(&ints(&[1, 0])).unwrap();
        assert_eq!(sol.value, int(4));
        let mut cold = Simplex::new(&a, &ints(&[4, 12, 18])).unwrap();
        assert_eq!(cold.maximize(&ints(&[1, 0])).unwrap().value, int(4));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule
        let a = vec![
            vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)],
            vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)],
            ints(&[0, 0, 1, 0]),
        ];
        let mut lp = Simplex::new(&a, &ints(&[0, 0, 1])).unwrap();
        let sol = lp
            .maximize(&[ratio(3, 4), int(-150), ratio(1, 50), int(-6)])
            .unwrap();
        assert_eq!(sol.value, ratio(1, 20));
    }

    #[test]
    fn errors() {
        let a = vec![ints(&[1, -1])];
        assert_eq!(
            Simplex::new(&a, &ints(&[-1])).unwrap_err(),
            SimplexError::NegativeRhs(0)
        );
        let mut lp = Simplex::new(&a, &ints(&[1])).unwrap();
        assert_eq!(lp.maximize(&ints(&[0, 1])).unwrap_err(), SimplexError::Unbounded);
    }
}
