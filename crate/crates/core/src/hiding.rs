//! Functions hiding a subgroup of (Z/2Z)^n, partial assignments, and the
//! query-counting black box.
//!
//! The range X is fixed to {0, …, 2^n − 1}. A function hides H when
//! f(g) = f(g') ⟺ g − g' ∈ H, i.e. it is constant on cosets of H and takes
//! distinct values on distinct cosets.

use std::collections::{BTreeMap, HashMap};

use num::{BigUint, One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{self, Gf2Error, GroupElement, Subspace};

/// Largest n for which [`enumerate_hiding_functions`] lists every function.
pub const HIDING_ENUMERATION_CAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HidingError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("table has {found} entries, expected 2^{n} = {expected}")]
    TableLength { n: usize, expected: usize, found: usize },
    #[error("value {value} lies outside the range X = {{0, …, 2^{n} − 1}}")]
    ValueOutOfRange { value: u32, n: usize },
    #[error("point {point} is assigned two different values")]
    ConflictingAssignment { point: GroupElement },
    #[error("table does not hide the given subgroup")]
    NotHiding,
    #[error("Simon promise case must be 1 or 2, got {0}")]
    InvalidCase(u8),
    #[error("exhaustive enumeration of hiding functions needs n <= {cap}, got {n}")]
    EnumerationCap { n: usize, cap: usize },
}

fn check_table(n: usize, values: &[u32]) -> Result<(), HidingError> {
    let expected = 1usize << n;
    if values.len() != expected {
        return Err(HidingError::TableLength {
            n,
            expected,
            found: values.len(),
        });
    }
    if let Some(&value) = values.iter().find(|&&v| v as usize >= expected) {
        return Err(HidingError::ValueOutOfRange { value, n });
    }
    Ok(())
}

/// Whether the table `values` (indexed by group element) hides `h`.
///
/// Equivalent to the pairwise condition but linear in 2^n: constant on
/// every coset, injective across cosets.
pub fn hides(values: &[u32], h: &Subspace) -> Result<bool, HidingError> {
    let n = h.ambient_dim();
    check_table(n, values)?;
    let mut by_rep: Vec<Option<u32>> = vec![None; values.len()];
    let mut rep_of_value: HashMap<u32, u32> = HashMap::new();
    for (g, &v) in values.iter().enumerate() {
        let rep = h.coset_rep_bits(g as u32);
        match by_rep[rep as usize] {
            Some(existing) if existing != v => return Ok(false),
            Some(_) => {}
            None => {
                by_rep[rep as usize] = Some(v);
                if rep_of_value.insert(v, rep).is_some() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The subgroup hidden by `values`, if any. The table length must be a power
/// of two.
pub fn hidden_subgroup_of(values: &[u32]) -> Option<Subspace> {
    if !values.len().is_power_of_two() {
        return None;
    }
    let n = values.len().trailing_zeros() as usize;
    if n > gf2::MAX_ELEMENT_DIM {
        return None;
    }
    let kernel: Vec<u32> = (0..values.len() as u32)
        .filter(|&g| values[g as usize] == values[0])
        .collect();
    if !kernel.len().is_power_of_two() {
        return None;
    }
    let span = Subspace::span_bits(n, kernel.iter().copied());
    if span.order() != kernel.len() as u64 {
        return None;
    }
    match hides(values, &span) {
        Ok(true) => Some(span),
        _ => None,
    }
}

/// A function (Z/2Z)^n → X together with the subgroup it hides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HidingFunctionRecord", into = "HidingFunctionRecord")]
pub struct HidingFunction {
    n: usize,
    values: Vec<u32>,
    hidden: Subspace,
}

/// JSON shape: `{"n": int, "values": [int], "hidden_basis": [bitstrings]}`.
#[derive(Serialize, Deserialize)]
struct HidingFunctionRecord {
    n: usize,
    values: Vec<u32>,
    hidden_basis: Vec<String>,
}

impl From<HidingFunction> for HidingFunctionRecord {
    fn from(f: HidingFunction) -> Self {
        Self {
            n: f.n,
            hidden_basis: f.hidden.basis_strings(),
            values: f.values,
        }
    }
}

impl TryFrom<HidingFunctionRecord> for HidingFunction {
    type Error = HidingError;

    fn try_from(r: HidingFunctionRecord) -> Result<Self, Self::Error> {
        let hidden = Subspace::from_basis_strings(r.n, &r.hidden_basis)?;
        HidingFunction::new(r.values, hidden)
    }
}

impl HidingFunction {
    /// Validates that `values` hides `hidden`.
    pub fn new(values: Vec<u32>, hidden: Subspace) -> Result<Self, HidingError> {
        if !hides(&values, &hidden)? {
            return Err(HidingError::NotHiding);
        }
        Ok(Self {
            n: hidden.ambient_dim(),
            values,
            hidden,
        })
    }

    /// Builds a function from a bare table, recovering its hidden subgroup.
    pub fn from_table(values: Vec<u32>) -> Result<Self, HidingError> {
        let hidden = hidden_subgroup_of(&values).ok_or(HidingError::NotHiding)?;
        Self::new(values, hidden)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hidden(&self) -> &Subspace {
        &self.hidden
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn eval(&self, g: GroupElement) -> Result<u32, HidingError> {
        if g.dim() != self.n {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n,
                found: g.dim(),
            }
            .into());
        }
        Ok(self.values[g.index()])
    }

    /// Whether `self` agrees with `s` on dom(s): the indicator I_s(f).
    pub fn extends(&self, s: &PartialAssignment) -> Result<bool, HidingError> {
        if s.dim() != self.n {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n,
                found: s.dim(),
            }
            .into());
        }
        Ok(s.entries.iter().all(|(&p, &v)| self.values[p as usize] == v))
    }

    /// The restriction of `self` to `points`.
    pub fn restrict(&self, points: &[GroupElement]) -> Result<PartialAssignment, HidingError> {
        let mut s = PartialAssignment::new(self.n)?;
        for &p in points {
            s.insert(p, self.eval(p)?)?;
        }
        Ok(s)
    }
}

/// Uniformly random function hiding `h`: the 2^n/|H| cosets receive a
/// uniformly random injective labelling drawn by partial Fisher–Yates.
pub fn random_hiding_function<R: Rng + ?Sized>(h: &Subspace, rng: &mut R) -> HidingFunction {
    let n = h.ambient_dim();
    let size = 1usize << n;
    let cosets = size >> h.dim();
    let mut pool: Vec<u32> = (0..size as u32).collect();
    for i in 0..cosets {
        let j = rng.gen_range(i..size);
        pool.swap(i, j);
    }
    let mut values = vec![0u32; size];
    let mut next = 0;
    for g in 0..size as u32 {
        // a coset's representative is its minimum, so it is met first
        let rep = h.coset_rep_bits(g);
        values[g as usize] = if rep == g {
            next += 1;
            pool[next - 1]
        } else {
            values[rep as usize]
        };
    }
    HidingFunction {
        n,
        values,
        hidden: h.clone(),
    }
}

/// The two cases of Simon's promise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromiseCase {
    /// (1) f is one-to-one.
    Injective,
    /// (2) f(w) = f(w') ⟺ w = w' or w = w' + s for some s ≠ 0.
    Period,
}

impl TryFrom<u8> for PromiseCase {
    type Error = HidingError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Self::Injective),
            2 => Ok(Self::Period),
            other => Err(HidingError::InvalidCase(other)),
        }
    }
}

/// A uniformly random instance of Simon's promise problem. In the period
/// case the secret s ≠ 0 is uniform.
pub fn simon_instance<R: Rng + ?Sized>(
    n: usize,
    case: PromiseCase,
    rng: &mut R,
) -> Result<HidingFunction, HidingError> {
    let h = match case {
        PromiseCase::Injective => {
            if n > gf2::MAX_ELEMENT_DIM {
                return Err(Gf2Error::DimensionTooLarge(n).into());
            }
            Subspace::trivial(n)
        }
        PromiseCase::Period => gf2::random_subspace(n, 1, rng)?,
    };
    Ok(random_hiding_function(&h, rng))
}

/// Every function hiding `h` (n ≤ [`HIDING_ENUMERATION_CAP`]).
pub fn enumerate_hiding_functions(h: &Subspace) -> Result<Vec<HidingFunction>, HidingError> {
    let n = h.ambient_dim();
    if n > HIDING_ENUMERATION_CAP {
        return Err(HidingError::EnumerationCap {
            n,
            cap: HIDING_ENUMERATION_CAP,
        });
    }
    let size = 1u32 << n;
    let reps: Vec<u32> = (0..size).filter(|&g| h.coset_rep_bits(g) == g).collect();
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(reps.len());
    let mut used = vec![false; size as usize];
    fn rec(
        h: &Subspace,
        reps: &[u32],
        labels: &mut Vec<u32>,
        used: &mut [bool],
        out: &mut Vec<HidingFunction>,
    ) {
        if labels.len() == reps.len() {
            let n = h.ambient_dim();
            let values = (0..1u32 << n)
                .map(|g| {
                    let rep = h.coset_rep_bits(g);
                    labels[reps.binary_search(&rep).expect("rep listed")]
                })
                .collect();
            out.push(HidingFunction {
                n,
                values,
                hidden: h.clone(),
            });
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                labels.push(v as u32);
                rec(h, reps, labels, used, out);
                labels.pop();
                used[v] = false;
            }
        }
    }
    rec(h, &reps, &mut labels, &mut used, &mut out);
    Ok(out)
}

/// A partial function s : (Z/2Z)^n ⇀ X.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartialAssignmentRecord", into = "PartialAssignmentRecord")]
pub struct PartialAssignment {
    n: usize,
    entries: BTreeMap<u32, u32>,
}

/// JSON shape: `{"n": int, "entries": [["bitstring", value], …]}`.
#[derive(Serialize, Deserialize)]
struct PartialAssignmentRecord {
    n: usize,
    entries: Vec<(String, u32)>,
}

impl From<PartialAssignment> for PartialAssignmentRecord {
    fn from(s: PartialAssignment) -> Self {
        Self {
            n: s.n,
            entries: s.iter().map(|(g, v)| (g.to_string(), v)).collect(),
        }
    }
}

impl TryFrom<PartialAssignmentRecord> for PartialAssignment {
    type Error = HidingError;

    fn try_from(r: PartialAssignmentRecord) -> Result<Self, Self::Error> {
        let mut s = PartialAssignment::new(r.n)?;
        for (bits, v) in r.entries {
            s.insert(GroupElement::parse_bits(&bits)?, v)?;
        }
        Ok(s)
    }
}

impl PartialAssignment {
    pub fn new(n: usize) -> Result<Self, HidingError> {
        if n > gf2::MAX_ELEMENT_DIM {
            return Err(Gf2Error::DimensionTooLarge(n).into());
        }
        Ok(Self {
            n,
            entries: BTreeMap::new(),
        })
    }

    /// Builds an assignment from `(point bits, value)` pairs.
    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, HidingError> {
        let mut s = Self::new(n)?;
        for (p, v) in pairs {
            s.insert(GroupElement::new(p, n)?, v)?;
        }
        Ok(s)
    }

    /// Adds `point ↦ value`. Re-inserting the same pair is a no-op; a
    /// different value for an existing point is an error.
    pub fn insert(&mut self, point: GroupElement, value: u32) -> Result<(), HidingError> {
        if point.dim() != self.n {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n,
                found: point.dim(),
            }
            .into());
        }
        if value as u64 >= 1u64 << self.n {
            return Err(HidingError::ValueOutOfRange { value, n: self.n });
        }
        match self.entries.insert(point.bits(), value) {
            Some(old) if old != value => {
                self.entries.insert(point.bits(), old);
                Err(HidingError::ConflictingAssignment { point })
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// |dom(s)|.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, point: GroupElement) -> Option<u32> {
        self.entries.get(&point.bits()).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GroupElement, u32)> + '_ {
        self.entries
            .iter()
            .map(move |(&p, &v)| (GroupElement::from_bits_unchecked(p, self.n), v))
    }

    pub fn points(&self) -> Vec<GroupElement> {
        self.iter().map(|(p, _)| p).collect()
    }

    /// Whether all points share one value (vacuously true when empty).
    pub fn is_constant(&self) -> bool {
        let mut vals = self.entries.values();
        match vals.next() {
            None => true,
            Some(first) => vals.all(|v| v == first),
        }
    }

    /// Whether distinct points carry distinct values.
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.entries.values().all(|v| seen.insert(*v))
    }

    /// Points grouped by value, groups ordered by their smallest point.
    pub fn value_groups(&self) -> Vec<(u32, Vec<GroupElement>)> {
        let mut groups: Vec<(u32, Vec<GroupElement>)> = Vec::new();
        for (p, v) in self.iter() {
            match groups.iter_mut().find(|(gv, _)| *gv == v) {
                Some((_, pts)) => pts.push(p),
                None => groups.push((v, vec![p])),
            }
        }
        groups
    }
}

/// Number of functions hiding `h` that extend `s`.
///
/// Zero when `s` contradicts the hiding structure (two points of one coset
/// with different values, or two cosets sharing a value). Otherwise the
/// v cosets touched by `s` are fixed and the remaining ones receive an
/// injective labelling from the 2^n − v unused values: the falling factorial
/// (2^n − v)(2^n − v − 1)⋯(2^n − 2^n/|H| + 1).
pub fn count_extensions(h: &Subspace, s: &PartialAssignment) -> Result<BigUint, HidingError> {
    let n = h.ambient_dim();
    if s.dim() != n {
        return Err(Gf2Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        }
        .into());
    }
    let mut value_of_rep: HashMap<u32, u32> = HashMap::new();
    let mut rep_of_value: HashMap<u32, u32> = HashMap::new();
    for (p, v) in s.iter() {
        let rep = h.coset_rep_bits(p.bits());
        if let Some(&existing) = value_of_rep.get(&rep) {
            if existing != v {
                return Ok(BigUint::zero());
            }
            continue;
        }
        if rep_of_value.get(&v).is_some_and(|&r| r != rep) {
            return Ok(BigUint::zero());
        }
        value_of_rep.insert(rep, v);
        rep_of_value.insert(v, rep);
    }
    let range = 1u64 << n;
    let cosets = range >> h.dim();
    let fixed = value_of_rep.len() as u64;
    let mut count = BigUint::one();
    for i in 0..cosets - fixed {
        count *= range - fixed - i;
    }
    Ok(count)
}

/// Lazily built inverse table: for each value, the points mapping to it.
#[derive(Clone, Debug)]
struct PreimageIndex {
    offsets: Vec<u32>,
    points: Vec<u32>,
}

impl PreimageIndex {
    fn build(values: &[u32]) -> Self {
        let mut offsets = vec![0u32; values.len() + 1];
        for &v in values {
            offsets[v as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut cursor = offsets.clone();
        let mut points = vec![0u32; values.len()];
        for (g, &v) in values.iter().enumerate() {
            points[cursor[v as usize] as usize] = g as u32;
            cursor[v as usize] += 1;
        }
        Self { offsets, points }
    }

    fn get(&self, value: u32) -> &[u32] {
        let (a, b) = (
            self.offsets[value as usize] as usize,
            self.offsets[value as usize + 1] as usize,
        );
        &self.points[a..b]
    }
}

/// Black-box access to a hiding function that counts every evaluation,
/// classical or quantum. Single-owner: one oracle per run.
#[derive(Debug)]
pub struct QueryCountingOracle<'a> {
    f: &'a HidingFunction,
    queries: u64,
    index: Option<PreimageIndex>,
}

impl<'a> QueryCountingOracle<'a> {
    pub fn new(f: &'a HidingFunction) -> Self {
        Self {
            f,
            queries: 0,
            index: None,
        }
    }

    pub fn n(&self) -> usize {
        self.f.n
    }

    /// Evaluations so far.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// One classical evaluation.
    pub fn query(&mut self, x: GroupElement) -> Result<u32, HidingError> {
        let v = self.f.eval(x)?;
        self.queries += 1;
        Ok(v)
    }

    pub(crate) fn query_bits(&mut self, x: u32) -> u32 {
        self.queries += 1;
        self.f.values[x as usize]
    }

    /// Table access for simulating the unitary O; the caller charges the
    /// query through [`Self::charge_quantum`].
    pub(crate) fn table(&self) -> &[u32] {
        &self.f.values
    }

    pub(crate) fn charge_quantum(&mut self) {
        self.queries += 1;
    }

    /// Points x with f(x) = `value`; simulator-side bookkeeping, not a query.
    pub(crate) fn preimages(&mut self, value: u32) -> &[u32] {
        let values = &self.f.values;
        self.index
            .get_or_insert_with(|| PreimageIndex::build(values))
            .get(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{enumerate_subspaces_capped, rref};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn pairwise_hides(values: &[u32], h: &Subspace) -> bool {
        let n = h.ambient_dim();
        (0..values.len()).all(|a| {
            (0..values.len()).all(|b| {
                let diff = GroupElement::new((a ^ b) as u32, n).unwrap();
                (values[a] == values[b]) == h.member(diff).unwrap()
            })
        })
    }

    #[test]
    fn hides_examples() {
        assert!(hides(&[0, 1, 2, 3], &Subspace::trivial(2)).unwrap());
        assert!(hides(&[2, 2, 2, 2], &Subspace::full(2)).unwrap());
        let h01 = rref(2, &[g("01")]).unwrap();
        let h10 = rref(2, &[g("10")]).unwrap();
        assert!(hides(&[0, 0, 1, 1], &h01).unwrap());
        assert!(!hides(&[0, 0, 1, 1], &h10).unwrap());
        assert!(hides(&[0, 0, 1], &h01).is_err());
    }

    #[test]
    fn hides_matches_pairwise_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let values: Vec<u32> = (0..8).map(|_| rng.gen_range(0..4)).collect();
            for k in 0..=3 {
                for h in enumerate_subspaces_capped(3, k, 5).unwrap() {
                    assert_eq!(hides(&values, &h).unwrap(), pairwise_hides(&values, &h));
                }
            }
        }
    }

    #[test]
    fn hidden_subgroup_examples() {
        assert_eq!(
            hidden_subgroup_of(&[3, 1, 0, 2]),
            Some(Subspace::trivial(2))
        );
        assert_eq!(
            hidden_subgroup_of(&[0, 0, 1, 1]),
            Some(rref(2, &[g("01")]).unwrap())
        );
        assert_eq!(hidden_subgroup_of(&[0, 0, 0, 1]), None);
        // kernel {00, 11} is a subgroup but the other coset is split
        assert_eq!(hidden_subgroup_of(&[0, 1, 2, 0]), None);
        assert_eq!(hidden_subgroup_of(&[0, 1, 2]), None);
    }

    #[test]
    fn random_functions_hide_their_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..=4 {
            for h in enumerate_subspaces_capped(4, k, 5).unwrap() {
                let f = random_hiding_function(&h, &mut rng);
                assert!(hides(f.values(), &h).unwrap());
                let distinct: std::collections::HashSet<_> = f.values().iter().collect();
                assert_eq!(distinct.len() as u64, 16 / h.order());
                assert_eq!(hidden_subgroup_of(f.values()).as_ref(), Some(&h));
            }
        }
        let f = random_hiding_function(&rref(2, &[g("01")]).unwrap(), &mut rng);
        let v = f.values();
        assert_eq!(v[0], v[1]);
        assert_eq!(v[2], v[3]);
        assert_ne!(v[0], v[2]);
    }

    #[test]
    fn constant_function_value_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u32; 4];
        for _ in 0..4000 {
            let f = random_hiding_function(&Subspace::full(2), &mut rng);
            assert!(f.values().iter().all(|&v| v == f.values()[0]));
            counts[f.values()[0] as usize] += 1;
        }
        // binomial(4000, 1/4): sigma ≈ 27.4
        for c in counts {
            assert!((c as f64 - 1000.0).abs() < 4.0 * 27.4, "{counts:?}");
        }
    }

    #[test]
    fn simon_instance_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=6 {
            let f1 = simon_instance(n, PromiseCase::Injective, &mut rng).unwrap();
            assert_eq!(f1.hidden().dim(), 0);
            let f2 = simon_instance(n, PromiseCase::Period, &mut rng).unwrap();
            assert_eq!(f2.hidden().dim(), 1);
        }
        assert!(PromiseCase::try_from(3).is_err());
    }

    #[test]
    fn simon_secret_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 10_000;
        let mut counts = [0u32; 8];
        for _ in 0..trials {
            let f = simon_instance(3, PromiseCase::Period, &mut rng).unwrap();
            counts[f.hidden().basis()[0].index()] += 1;
        }
        assert_eq!(counts[0], 0);
        let p = 1.0 / 7.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - trials as f64 * p).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn extends_examples() {
        let f = HidingFunction::new(vec![3, 3, 0, 0], rref(2, &[g("01")]).unwrap()).unwrap();
        assert!(f.extends(&PartialAssignment::new(2).unwrap()).unwrap());
        assert!(f
            .extends(&PartialAssignment::from_pairs(2, [(0, 3)]).unwrap())
            .unwrap());
        assert!(!f
            .extends(&PartialAssignment::from_pairs(2, [(0, 2)]).unwrap())
            .unwrap());
        let r = f.restrict(&[g("01"), g("10")]).unwrap();
        assert!(f.extends(&r).unwrap());
        assert!(f
            .extends(&PartialAssignment::new(3).unwrap())
            .is_err());
    }

    #[test]
    fn partial_assignment_validation() {
        let mut s = PartialAssignment::new(2).unwrap();
        s.insert(g("01"), 3).unwrap();
        s.insert(g("01"), 3).unwrap();
        assert_eq!(s.len(), 1);
        assert!(matches!(
            s.insert(g("01"), 2),
            Err(HidingError::ConflictingAssignment { .. })
        ));
        assert_eq!(s.get(g("01")), Some(3));
        assert!(matches!(
            s.insert(g("10"), 4),
            Err(HidingError::ValueOutOfRange { .. })
        ));
        assert!(s.insert(g("100"), 1).is_err());
    }

    #[test]
    fn count_extension_examples() {
        let t = Subspace::trivial(2);
        let e = PartialAssignment::new(2).unwrap();
        assert_eq!(count_extensions(&t, &e).unwrap(), BigUint::from(24u32));
        let h = rref(2, &[g("01")]).unwrap();
        let bad = PartialAssignment::from_pairs(2, [(0, 2), (1, 3)]).unwrap();
        assert_eq!(count_extensions(&h, &bad).unwrap(), BigUint::zero());
        let one = PartialAssignment::from_pairs(2, [(0, 2)]).unwrap();
        assert_eq!(count_extensions(&h, &one).unwrap(), BigUint::from(3u32));
        // two cosets forced to share a value
        let shared = PartialAssignment::from_pairs(2, [(0, 2), (2, 2)]).unwrap();
        assert_eq!(count_extensions(&h, &shared).unwrap(), BigUint::zero());
    }

    #[test]
    fn count_extensions_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3usize {
            for k in 0..=n {
                for h in enumerate_subspaces_capped(n, k, 5).unwrap() {
                    let all = enumerate_hiding_functions(&h).unwrap();
                    let empty = PartialAssignment::new(n).unwrap();
                    assert_eq!(count_extensions(&h, &empty).unwrap(), BigUint::from(all.len()));
                    for _ in 0..10 {
                        let size = rng.gen_range(1..=3usize.min(1 << n));
                        let mut s = PartialAssignment::new(n).unwrap();
                        while s.len() < size {
                            let p = GroupElement::new(rng.gen_range(0..1 << n), n).unwrap();
                            let _ = s.insert(p, rng.gen_range(0..1 << n));
                        }
                        let brute = all.iter().filter(|f| f.extends(&s).unwrap()).count();
                        assert_eq!(count_extensions(&h, &s).unwrap(), BigUint::from(brute));
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_counts_every_query() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = simon_instance(4, PromiseCase::Period, &mut rng).unwrap();
        let mut o = QueryCountingOracle::new(&f);
        for x in 0..16 {
            assert_eq!(o.query(GroupElement::new(x, 4).unwrap()).unwrap(), f.values()[x as usize]);
        }
        assert_eq!(o.queries(), 16);
        let v = f.values()[5];
        let pre: Vec<u32> = o.preimages(v).to_vec();
        assert_eq!(pre.len(), 2);
        assert!(pre.contains(&5));
        assert_eq!(o.queries(), 16);
    }

    #[test]
    fn json_shape() {
        let f = HidingFunction::new(vec![0, 0, 1, 1], rref(2, &[g("01")]).unwrap()).unwrap();
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"n": 2, "values": [0, 0, 1, 1], "hidden_basis": ["01"]})
        );
        let back: HidingFunction = serde_json::from_value(json).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::json!({"n": 2, "values": [0, 1, 1, 1], "hidden_basis": ["01"]});
        assert!(serde_json::from_value::<HidingFunction>(bad).is_err());
    }
}
