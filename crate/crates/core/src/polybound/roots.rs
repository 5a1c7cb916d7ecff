//! Real-root isolation by Sturm sequences and exact bisection, and the
//! resulting certified maximum of |p| on an interval.

use num::{Signed, Zero};

use crate::polymethod::RationalPolynomial;
use crate::rational::{pow2, Rational};

/// A real root, either known exactly or enclosed in `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootEnclosure {
    Exact(Rational),
    Interval { lo: Rational, hi: Rational },
}

impl RootEnclosure {
    pub fn midpoint(&self) -> Rational {
        match self {
            RootEnclosure::Exact(r) => r.clone(),
            RootEnclosure::Interval { lo, hi } => (lo + hi) / Rational::from_integer(2.into()),
        }
    }

    pub fn width(&self) -> Rational {
        match self {
            RootEnclosure::Exact(_) => Rational::zero(),
            RootEnclosure::Interval { lo, hi } => hi - lo,
        }
    }
}

fn monic(p: &RationalPolynomial) -> RationalPolynomial {
    match p.leading_coefficient() {
        Some(l) => p.scale(&l.recip()),
        None => p.clone(),
    }
}

pub fn gcd(a: &RationalPolynomial, b: &RationalPolynomial) -> RationalPolynomial {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    monic(&a)
}

/// p / gcd(p, p′): same roots, all simple.
pub fn squarefree(p: &RationalPolynomial) -> RationalPolynomial {
    let g = gcd(p, &p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return p.clone();
    }
    p.div_rem(&g).expect("nonzero gcd").0
}

/// Sturm chain p, p′, −rem(p, p′), … of a nonzero polynomial.
pub fn sturm_sequence(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).expect("nonzero divisor");
        seq.push(r.scale(&Rational::from_integer((-1).into())));
    }
    seq.pop();
    seq
}

fn variations(seq: &[RationalPolynomial], x: &Rational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|q| q.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots of `p` in `[lo, hi]`, each either exact or enclosed
/// in an interval of width at most `2^-precision`.
pub fn isolate_roots(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
    precision: u32,
) -> Vec<RootEnclosure> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let sf = squarefree(p);
    if sf.eval(lo).is_zero() {
        out.push(RootEnclosure::Exact(lo.clone()));
    }
    let seq = sturm_sequence(&sf);
    let width = pow2(-(precision as i64));
    // for squarefree chains V(a) − V(b) counts roots in (a, b]
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let count = variations(&seq, &a) - variations(&seq, &b);
        if count == 0 {
            continue;
        }
        if count == 1 && sf.eval(&b).is_zero() {
            out.push(RootEnclosure::Exact(b));
            continue;
        }
        if count == 1 && &b - &a <= width {
            out.push(RootEnclosure::Interval { lo: a, hi: b });
            continue;
        }
        let m = (&a + &b) / Rational::from_integer(2.into());
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by_key(RootEnclosure::midpoint);
    out
}

/// Certified bracket on max_{x ∈ [lo, hi]} |p(x)|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxAbs {
    /// |p(argmax)|, an attained value.
    pub lower: Rational,
    pub upper: Rational,
    pub argmax: Rational,
}

/// Endpoints plus critical points (roots of p′) located to `2^-precision`.
/// The upper end adds half an enclosure width times a bound on |p′| over
/// the interval.
pub fn max_abs_on(p: &RationalPolynomial, lo: &Rational, hi: &Rational, precision: u32) -> MaxAbs {
    let dp = p.derivative();
    let crit = isolate_roots(&dp, lo, hi, precision);
    let mut candidates = vec![lo.clone(), hi.clone()];
    let mut slack = Rational::zero();
    let reach = lo.abs().max(hi.abs());
    for r in &crit {
        candidates.push(r.midpoint());
        if let RootEnclosure::Interval { .. } = r {
            let w = r.width() / Rational::from_integer(2.into());
            slack = slack.max(w * dp.magnitude_bound(&reach));
        }
    }
    let (argmax, lower) = candidates
        .into_iter()
        .map(|x| {
            let v = p.eval(&x).abs();
            (x, v)
        })
        .max_by(|a, b| a.1.cmp(&b.1))
        .expect("two endpoints");
    MaxAbs {
        upper: &lower + slack,
        lower,
        argmax,
    }
}
