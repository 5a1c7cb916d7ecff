//! Exact check suite behind `verify-paper`. Every check is deterministic for
//! a given seed; a check that errors is recorded as a failure.

use std::time::Instant;

use anyhow::{bail, ensure, Result};
use num::{BigUint, One};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use simonlab::gf2::{self, count_containing, count_subgroups, enumerate_subspaces};
use simonlab::hiding::{random_hiding_function, PartialAssignment};
use simonlab::polybound::{
    check_lemma, extremal_search, projection_ratio_property, theorem_bound, to_bounded, Bracket,
    DEFAULT_GRID,
};
use simonlab::polymethod::{
    degree_check, qns_bruteforce, qns_general, simon_accept_probability,
    simon_accept_probability_of, simon_exact_curve, synthetic_exact_curve, EXACT_MAX_N,
};
use simonlab::qsim::simon_query_count;
use simonlab::rational::{int, ratio, Rational};
use simonlab::{task_rng, GroupElement, SyntheticAlgorithm};

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: &'static str,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub elapsed_ms: u128,
}

#[derive(Serialize)]
pub struct Ledger {
    pub max_n: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    /// Run-dependent fields; everything else is reproducible.
    pub metadata: Metadata,
}

type CheckFn = fn(usize, u64) -> Result<String>;

const CHECKS: [(&str, CheckFn); 11] = [
    ("subgroup_counts", subgroup_counts),
    ("containing_counts", containing_counts),
    ("qns_closed_forms", qns_closed_forms),
    ("simon_label_invariance", simon_label_invariance),
    ("simon_degree", simon_degree),
    ("simon_gap", simon_gap),
    ("synthetic_degree", synthetic_degree),
    ("lemma_on_simon_curves", lemma_on_simon_curves),
    ("extremal_frontier", extremal_frontier),
    ("theorem_bound", theorem_bound_values),
    ("projection_property", projection_property),
];

pub fn run(max_n: usize, seed: u64) -> Ledger {
    let start = Instant::now();
    let checks: Vec<Check> = CHECKS
        .iter()
        .map(|&(name, check)| match check(max_n, seed) {
            Ok(detail) => Check { name, status: "pass", detail },
            Err(e) => Check { name, status: "fail", detail: format!("{e:#}") },
        })
        .collect();
    let passed = checks.iter().filter(|c| c.status == "pass").count();
    Ledger {
        max_n,
        seed,
        failed: checks.len() - passed,
        passed,
        checks,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: start.elapsed().as_millis(),
        },
    }
}

fn exact_n(max_n: usize) -> usize {
    max_n.min(EXACT_MAX_N)
}

fn subgroup_counts(max_n: usize, _: u64) -> Result<String> {
    let top = max_n.min(gf2::enumeration_cap());
    for n in 0..=top {
        for k in 0..=n {
            let listed = enumerate_subspaces(n, k)?.len();
            ensure!(
                count_subgroups(n, k) == BigUint::from(listed),
                "n={n} k={k}: formula {} vs {listed} enumerated",
                count_subgroups(n, k)
            );
        }
    }
    Ok(format!("n <= {top}"))
}

fn containing_counts(max_n: usize, _: u64) -> Result<String> {
    let top = exact_n(max_n);
    let mut pairs = 0;
    for n in 1..=top {
        for dp in 0..=n {
            for hp in enumerate_subspaces(n, dp)? {
                for k in 0..=n {
                    let filtered =
                        enumerate_subspaces(n, k)?.iter().filter(|h| hp.is_subspace_of(h)).count();
                    ensure!(
                        count_containing(n, &hp, k)? == BigUint::from(filtered),
                        "n={n} H'={} k={k}",
                        hp.to_text()
                    );
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} (H', k) pairs for n <= {top}"))
}

fn random_assignment(n: usize, rng: &mut impl Rng) -> Result<PartialAssignment> {
    let size = 1u32 << n;
    let len = rng.gen_range(0..=size.min(5)) as usize;
    let mut s = PartialAssignment::new(n)?;
    while s.len() < len {
        let p = GroupElement::new(rng.gen_range(0..size), n)?;
        if s.get(p).is_none() {
            s.insert(p, rng.gen_range(0..size.min(3)))?;
        }
    }
    Ok(s)
}

fn qns_closed_forms(max_n: usize, seed: u64) -> Result<String> {
    let top = max_n.min(3);
    let mut rng = task_rng(seed, 3);
    let mut cases = 0;
    for n in 1..=top {
        for _ in 0..40 {
            let s = random_assignment(n, &mut rng)?;
            for d in 0..=n {
                let order = 1u64 << d;
                let fast = qns_general(n, &s, order)?;
                let slow = qns_bruteforce(n, &s, order)?;
                ensure!(fast == slow, "n={n} D={order}: {fast} vs {slow}");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (assignment, D) cases for n <= {top}"))
}

fn simon_label_invariance(max_n: usize, seed: u64) -> Result<String> {
    let top = exact_n(max_n);
    let eps = ratio(1, 4);
    let mut rng = task_rng(seed, 4);
    let mut subgroups = 0;
    for n in 1..=top {
        for k in 0..=n {
            for h in enumerate_subspaces(n, k)? {
                let by_subgroup = simon_accept_probability(&h, &eps)?;
                let f = random_hiding_function(&h, &mut rng);
                let by_function = simon_accept_probability_of(&f, &eps)?;
                ensure!(by_subgroup == by_function, "H={}: {by_subgroup} vs {by_function}", h.to_text());
                subgroups += 1;
            }
        }
    }
    Ok(format!("{subgroups} subgroups for n <= {top}"))
}

fn simon_degree(max_n: usize, _: u64) -> Result<String> {
    let top = exact_n(max_n);
    let eps = ratio(1, 4);
    let mut degrees = Vec::new();
    for n in 1..=top {
        let curve = simon_exact_curve(n, &eps)?;
        let report = degree_check(&curve, curve.queries)?;
        ensure!(report.pass, "n={n}: degree {:?} above {}", report.degree, report.bound);
        degrees.push(format!("n={n}:{}<={}", report.degree.unwrap_or(0), report.bound));
    }
    Ok(degrees.join(" "))
}

fn simon_gap(max_n: usize, _: u64) -> Result<String> {
    let top = exact_n(max_n);
    let eps = ratio(1, 4);
    let mut values = Vec::new();
    for n in 1..=top {
        let curve = simon_exact_curve(n, &eps)?;
        ensure!(curve.queries == n as u64 + 3, "n={n}: {} queries", curve.queries);
        let at = |order| curve.value(order).and_then(|v| v.exact().cloned());
        let (Some(q1), Some(q2)) = (at(1), at(2)) else {
            bail!("n={n}: curve lacks exact points");
        };
        ensure!(q1.is_one(), "n={n}: Q(1)={q1}");
        ensure!(q2 <= eps, "n={n}: Q(2)={q2}");
        values.push(format!("Q{n}(2)={q2}"));
    }
    Ok(values.join(" "))
}

fn synthetic_degree(max_n: usize, seed: u64) -> Result<String> {
    let n = max_n.clamp(1, 3);
    let mut rng = task_rng(seed, 7);
    let count = 20;
    for i in 0..count {
        let budget = 1 + i % (1 << n).min(6);
        let alg = SyntheticAlgorithm::random(n, budget, 1 + i % 5, &mut rng)?;
        let curve = synthetic_exact_curve(&alg)?;
        let report = degree_check(&curve, alg.queries())?;
        let degree = report.degree.unwrap_or(0);
        ensure!(
            report.pass && degree <= alg.max_domain(),
            "algorithm {i}: degree {degree} with max domain {}",
            alg.max_domain()
        );
    }
    Ok(format!("{count} random algorithms at n={n}"))
}

fn lemma_on_simon_curves(max_n: usize, _: u64) -> Result<String> {
    let top = exact_n(max_n);
    let eps = ratio(1, 4);
    for n in 2..=top {
        let curve = simon_exact_curve(n, &eps)?;
        let q = degree_check(&curve, curve.queries)?.polynomial;
        let report = check_lemma(&to_bounded(&q), n)?;
        ensure!(report.premises_ok, "n={n}: {:?}", report.premise_violations);
        ensure!(report.conclusion_ok == Some(true), "n={n}: degree {} below {}", report.degree, report.bound);
        ensure!(report.c.lo >= int(2) - int(4) * &eps, "n={n}: c={}", report.c);
    }
    Ok(format!("P = 2Q - 1 for 2 <= n <= {top}"))
}

fn extremal_frontier(max_n: usize, _: u64) -> Result<String> {
    let top = (3 * max_n).clamp(4, 12);
    let mut cells = 0;
    for n in 2..=top {
        for d in 1..=n / 2 {
            let r = extremal_search(n, d, DEFAULT_GRID)?;
            ensure!(r.within_cap, "n={n} d={d}: c*={} above cap", r.c_star);
            let report = check_lemma(&r.witness, n)?;
            ensure!(report.premises_ok, "n={n} d={d}: witness violates premises");
            ensure!(report.conclusion_ok == Some(true), "n={n} d={d}: witness breaks the bound");
            cells += 1;
        }
    }
    for (n, d, expected) in [(2, 1, ratio(2, 3)), (4, 1, ratio(2, 15))] {
        let got = extremal_search(n, d, DEFAULT_GRID)?.c_star;
        ensure!(got == expected, "c*({n},{d}) = {got}, expected {expected}");
    }
    Ok(format!("{cells} cells for n <= {top}"))
}

fn theorem_bound_values(_: usize, _: u64) -> Result<String> {
    let quarter = ratio(1, 4);
    for n in 1..=64usize {
        let bound = theorem_bound(n, &quarter)?;
        ensure!(bound == Bracket::exact(ratio(n as i64 + 2, 8)), "n={n}: {bound}");
        let t = simon_query_count(n, &quarter)?;
        ensure!(Rational::from_integer(t.into()) >= bound.hi, "n={n}: T={t} below {bound}");
    }
    Ok("(n+2)/8 below n+3 for n <= 64".into())
}

fn projection_property(_: usize, seed: u64) -> Result<String> {
    let mut rng = task_rng(seed, 11);
    let target = 10_000;
    let mut tested = 0;
    while tested < target {
        let b: f64 = rng.gen_range(-10.0..10.0);
        let cc: f64 = rng.gen_range(-10.0..10.0);
        let mut re: f64 = rng.gen_range(-20.0..20.0);
        let im: f64 = rng.gen_range(-10.0..10.0);
        // reflect onto cc's side of the bisector
        if (re - cc).abs() > (re - b).abs() {
            re = b + cc - re;
        }
        match projection_ratio_property(Complex64::new(re, im), b, cc) {
            Ok(true) => tested += 1,
            Ok(false) => bail!("counterexample alpha={re}+{im}i b={b} cc={cc}"),
            Err(_) => {}
        }
    }
    Ok(format!("{tested} random inputs"))
}
