//! The full lower-bound chain on exact Simon curves: the degree of Q is at
//! most 2T, P = 2Q − 1 meets the bounded-polynomial premises, and the
//! degree bound and query bound it yields sit below what was measured.

use num::{One, Signed};

use simonlab::polybound::{check_lemma, degree_bound, theorem_bound, to_bounded};
use simonlab::polymethod::{degree_check, simon_exact_curve};
use simonlab::rational::{int, ratio, Rational};

#[test]
fn bounds_squeeze_the_exact_simon_curve() {
    let epsilon = ratio(1, 4);
    for n in 2..=4usize {
        let curve = simon_exact_curve(n, &epsilon).unwrap();
        let t = curve.queries;
        let report = degree_check(&curve, t).unwrap();
        let q = &report.polynomial;
        let degree = report.degree.unwrap();
        assert!(report.pass, "n={n}: deg {degree} > 2T");

        // achieved error: Q(1) is exact 1, so it all sits at D = 2
        let q1 = q.eval(&int(1));
        let q2 = q.eval(&int(2));
        assert_eq!(q1, Rational::one());
        let achieved = (Rational::one() - &q1).max(q2.clone());
        assert!(achieved <= epsilon);

        let p = to_bounded(q);
        let lemma = check_lemma(&p, n).unwrap();
        assert!(lemma.premises_ok, "n={n}: {:?}", lemma.premise_violations);
        // mean value theorem on [1, 2]
        let required = int(2) - int(4) * &achieved;
        assert!(lemma.c.lo >= required, "n={n}: c={} < {required}", lemma.c);
        assert_eq!(lemma.conclusion_ok, Some(true));

        // deg Q ≥ lemma bound at the guaranteed constant, and ≤ 2T
        let lower = degree_bound(n, &required).unwrap();
        assert!(int(degree as i64) >= lower.lo);
        let t = Rational::from_integer(t.into());
        assert!(&t * int(2) >= lower.hi);
        for eps in [&epsilon, &achieved] {
            let theorem = theorem_bound(n, eps).unwrap();
            assert!(!theorem.lo.is_negative());
            assert!(t >= theorem.hi);
        }
    }
}

#[test]
fn curve_values_at_the_ends() {
    let epsilon = ratio(1, 4);
    for n in 1..=4usize {
        let curve = simon_exact_curve(n, &epsilon).unwrap();
        let last = curve.value(1 << n).unwrap().exact().unwrap();
        assert_eq!(*last, int(0));
    }
}
