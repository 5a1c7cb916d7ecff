//! Linear algebra over GF(2): elements of (Z/2Z)^n, subspaces in canonical
//! reduced row-echelon form, enumeration and counting of subspaces.
//!
//! Bit strings are written most-significant bit first, so the string `"011"`
//! is the element with integer value 3 and the leftmost column is the highest
//! bit. Lexicographic order on strings coincides with integer order.

use std::fmt;
use std::str::FromStr;

use num::{BigUint, One, Zero};
use rand::Rng;
use serde_with::{DeserializeFromStr, SerializeDisplay};
use thiserror::Error;

/// Largest ambient dimension accepted for group elements.
pub const MAX_ELEMENT_DIM: usize = 24;

/// Default cap for exhaustive subspace enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 5;

/// Environment variable overriding [`DEFAULT_ENUMERATION_CAP`].
pub const ENUMERATION_CAP_ENV: &str = "SIMONLAB_MAX_N";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} exceeds the supported maximum of {MAX_ELEMENT_DIM}")]
    DimensionTooLarge(usize),
    #[error("value {bits:#b} does not fit in {n} bits")]
    ValueOutOfRange { bits: u32, n: usize },
    #[error("enumeration of subspaces of (Z/2Z)^{n} exceeds the cap {cap}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("subspace dimension {k} exceeds ambient dimension {n}")]
    DimensionOutOfRange { n: usize, k: usize },
    #[error("invalid bit string {0:?}")]
    Parse(String),
}

/// The enumeration cap in force: `SIMONLAB_MAX_N` when set to a valid
/// integer, otherwise [`DEFAULT_ENUMERATION_CAP`].
pub fn enumeration_cap() -> usize {
    std::env::var(ENUMERATION_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(MAX_ELEMENT_DIM))
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

fn check_dim(n: usize) -> Result<(), Gf2Error> {
    if n > MAX_ELEMENT_DIM {
        Err(Gf2Error::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

fn mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// An element of (Z/2Z)^n. Addition is XOR; every element is its own inverse.
/// Serializes as its MSB-first bit string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, SerializeDisplay, DeserializeFromStr)]
pub struct GroupElement {
    bits: u32,
    n: u8,
}

impl GroupElement {
    pub fn new(bits: u32, n: usize) -> Result<Self, Gf2Error> {
        check_dim(n)?;
        if bits & !mask(n) != 0 {
            return Err(Gf2Error::ValueOutOfRange { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Builds an element from bits already known to fit; callers inside the
    /// crate use this on values produced by masking.
    pub(crate) fn from_bits_unchecked(bits: u32, n: usize) -> Self {
        debug_assert!(n <= MAX_ELEMENT_DIM && bits & !mask(n) == 0);
        Self { bits, n: n as u8 }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_bits_unchecked(0, n.min(MAX_ELEMENT_DIM))
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn dim(self) -> usize {
        self.n as usize
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Inner product over GF(2).
    pub fn dot(self, other: Self) -> bool {
        (self.bits & other.bits).count_ones() % 2 == 1
    }

    /// Group operation; fails when dimensions differ.
    pub fn try_add(self, other: Self) -> Result<Self, Gf2Error> {
        if self.n != other.n {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self + other)
    }

    /// Parses an MSB-first bit string; the dimension is the string length.
    pub fn parse_bits(s: &str) -> Result<Self, Gf2Error> {
        let s = s.trim();
        if s.len() > MAX_ELEMENT_DIM || s.chars().any(|c| c != '0' && c != '1') {
            return Err(Gf2Error::Parse(s.to_string()));
        }
        let bits = if s.is_empty() {
            0
        } else {
            u32::from_str_radix(s, 2).map_err(|_| Gf2Error::Parse(s.to_string()))?
        };
        Ok(Self::from_bits_unchecked(bits, s.len()))
    }
}

impl std::ops::Add for GroupElement {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        Self {
            bits: self.bits ^ rhs.bits,
            n: self.n,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.dim()).rev() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for GroupElement {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_bits(s)
    }
}

fn leading_bit(v: u32) -> u32 {
    debug_assert!(v != 0);
    31 - v.leading_zeros()
}

/// A subspace of (Z/2Z)^n stored as its reduced row-echelon basis.
///
/// Rows are ordered by strictly decreasing leading bit (left-to-right pivot
/// columns in string notation) and every pivot bit is clear in all other
/// rows, so two subspaces are equal exactly when their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    rows: Vec<u32>,
}

impl Subspace {
    /// The trivial subgroup {0}.
    pub fn trivial(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    /// The whole group (Z/2Z)^n.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            rows: (0..n).rev().map(|i| 1u32 << i).collect(),
        }
    }

    /// Span of `vectors`, all of which must live in dimension `n`.
    pub fn span(n: usize, vectors: &[GroupElement]) -> Result<Self, Gf2Error> {
        check_dim(n)?;
        let mut s = Self::trivial(n);
        for &v in vectors {
            if v.dim() != n {
                return Err(Gf2Error::DimensionMismatch {
                    expected: n,
                    found: v.dim(),
                });
            }
            s.insert_bits(v.bits);
        }
        Ok(s)
    }

    pub(crate) fn span_bits(n: usize, vectors: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::trivial(n);
        for v in vectors {
            s.insert_bits(v);
        }
        s
    }

    /// Reduces `v` against the basis, clearing every pivot bit.
    fn reduce_bits(&self, mut v: u32) -> u32 {
        for &row in &self.rows {
            if v >> leading_bit(row) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Adds `v` to the spanning set. Returns `true` when the dimension grew.
    pub(crate) fn insert_bits(&mut self, v: u32) -> bool {
        let v = self.reduce_bits(v);
        if v == 0 {
            return false;
        }
        let p = leading_bit(v);
        for row in &mut self.rows {
            if *row >> p & 1 == 1 {
                *row ^= v;
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|&r| leading_bit(r) < p)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, v);
        true
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of elements, 2^dim.
    pub fn order(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn basis(&self) -> Vec<GroupElement> {
        self.rows
            .iter()
            .map(|&r| GroupElement::from_bits_unchecked(r, self.n))
            .collect()
    }

    pub(crate) fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Pivot bit positions, one per basis row, in decreasing order.
    pub fn pivots(&self) -> Vec<u32> {
        self.rows.iter().map(|&r| leading_bit(r)).collect()
    }

    fn check_element(&self, g: GroupElement) -> Result<(), Gf2Error> {
        if g.dim() != self.n {
            Err(Gf2Error::DimensionMismatch {
                expected: self.n,
                found: g.dim(),
            })
        } else {
            Ok(())
        }
    }

    pub fn member(&self, g: GroupElement) -> Result<bool, Gf2Error> {
        self.check_element(g)?;
        Ok(self.contains_bits(g.bits))
    }

    pub(crate) fn contains_bits(&self, v: u32) -> bool {
        self.reduce_bits(v) == 0
    }

    /// Lexicographically smallest element of the coset `g + H`.
    ///
    /// Reducing by the RREF basis clears every pivot bit, and any nonzero
    /// combination of rows sets its highest pivot, so the reduced vector is
    /// the minimum of the coset.
    pub fn coset_representative(&self, g: GroupElement) -> Result<GroupElement, Gf2Error> {
        self.check_element(g)?;
        Ok(GroupElement::from_bits_unchecked(self.reduce_bits(g.bits), self.n))
    }

    pub(crate) fn coset_rep_bits(&self, v: u32) -> u32 {
        self.reduce_bits(v)
    }

    /// Whether `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.n == other.n && self.rows.iter().all(|&r| other.contains_bits(r))
    }

    /// The sum `self + other`.
    pub fn join(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        if self.n != other.n {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut s = self.clone();
        for &r in &other.rows {
            s.insert_bits(r);
        }
        Ok(s)
    }

    /// {y : y·h = 0 for all h in H}.
    pub fn orthogonal_complement(&self) -> Subspace {
        let pivots = self.pivots();
        let mut out = Subspace::trivial(self.n);
        for free in 0..self.n as u32 {
            if pivots.contains(&free) {
                continue;
            }
            // y has the free bit set, and each pivot bit chosen so the
            // corresponding row is orthogonal to y.
            let mut y = 1u32 << free;
            for &row in &self.rows {
                if row >> free & 1 == 1 {
                    y |= 1 << leading_bit(row);
                }
            }
            out.insert_bits(y);
        }
        out
    }

    /// Smallest nonzero element, i.e. the basis row with the lowest pivot.
    pub fn min_nonzero(&self) -> Option<GroupElement> {
        self.rows
            .last()
            .map(|&r| GroupElement::from_bits_unchecked(r, self.n))
    }

    /// All 2^dim elements, in no particular order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let k = self.dim();
        (0u64..1u64 << k).map(move |c| {
            let mut v = 0u32;
            for (i, &r) in self.rows.iter().enumerate() {
                if c >> i & 1 == 1 {
                    v ^= r;
                }
            }
            GroupElement::from_bits_unchecked(v, self.n)
        })
    }

    /// The projection (Z/2Z)^n → (Z/2Z)^n / H, identified with
    /// (Z/2Z)^(n - dim H) by dropping pivot columns.
    pub fn quotient_map(&self) -> QuotientMap {
        let pivots = self.pivots();
        let kept: Vec<u32> = (0..self.n as u32).filter(|b| !pivots.contains(b)).collect();
        QuotientMap {
            subgroup: self.clone(),
            kept,
        }
    }

    /// One basis row per line, RREF order.
    pub fn to_text(&self) -> String {
        self.basis()
            .iter()
            .map(|g| format!("{g}\n"))
            .collect()
    }

    /// Parses the line format of [`Subspace::to_text`]. Rows need not be
    /// reduced; the span is re-canonicalised.
    pub fn from_text(n: usize, text: &str) -> Result<Subspace, Gf2Error> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(GroupElement::parse_bits)
            .collect::<Result<Vec<_>, _>>()?;
        Subspace::span(n, &rows)
    }

    /// Basis rows as bit strings.
    pub fn basis_strings(&self) -> Vec<String> {
        self.basis().iter().map(ToString::to_string).collect()
    }

    pub fn from_basis_strings(n: usize, rows: &[String]) -> Result<Subspace, Gf2Error> {
        let rows = rows
            .iter()
            .map(|r| GroupElement::parse_bits(r))
            .collect::<Result<Vec<_>, _>>()?;
        Subspace::span(n, &rows)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.basis().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Projection onto a quotient group; see [`Subspace::quotient_map`].
#[derive(Clone, Debug)]
pub struct QuotientMap {
    subgroup: Subspace,
    kept: Vec<u32>,
}

impl QuotientMap {
    pub fn target_dim(&self) -> usize {
        self.kept.len()
    }

    pub fn project(&self, g: GroupElement) -> Result<GroupElement, Gf2Error> {
        let rep = self.subgroup.coset_representative(g)?.bits;
        let mut out = 0u32;
        for (i, &b) in self.kept.iter().enumerate() {
            out |= (rep >> b & 1) << i;
        }
        Ok(GroupElement::from_bits_unchecked(out, self.kept.len()))
    }
}

/// Canonical RREF of the span of `vectors`.
pub fn rref(n: usize, vectors: &[GroupElement]) -> Result<Subspace, Gf2Error> {
    Subspace::span(n, vectors)
}

/// Every k-dimensional subspace of (Z/2Z)^n exactly once.
///
/// Generates RREF matrices directly: choose the pivot columns, then fill
/// each row's free entries (non-pivot columns right of its pivot).
pub fn enumerate_subspaces(n: usize, k: usize) -> Result<Vec<Subspace>, Gf2Error> {
    enumerate_subspaces_capped(n, k, enumeration_cap())
}

pub fn enumerate_subspaces_capped(
    n: usize,
    k: usize,
    cap: usize,
) -> Result<Vec<Subspace>, Gf2Error> {
    if n > cap {
        return Err(Gf2Error::EnumerationCap { n, cap });
    }
    if k > n {
        return Err(Gf2Error::DimensionOutOfRange { n, k });
    }
    let mut out = Vec::new();
    for pivot_mask in 0u32..(1u32 << n) {
        if pivot_mask.count_ones() as usize != k {
            continue;
        }
        let pivots: Vec<u32> = (0..n as u32)
            .rev()
            .filter(|&b| pivot_mask >> b & 1 == 1)
            .collect();
        // (row index, bit position) of every free entry
        let slots: Vec<(usize, u32)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &p)| {
                (0..p)
                    .filter(|&b| pivot_mask >> b & 1 == 0)
                    .map(move |b| (row, b))
            })
            .collect();
        for fill in 0u64..(1u64 << slots.len()) {
            let mut rows: Vec<u32> = pivots.iter().map(|&p| 1u32 << p).collect();
            for (i, &(row, b)) in slots.iter().enumerate() {
                if fill >> i & 1 == 1 {
                    rows[row] |= 1 << b;
                }
            }
            out.push(Subspace { n, rows });
        }
    }
    Ok(out)
}

/// Number of k-dimensional subspaces of (Z/2Z)^n (the Gaussian binomial at
/// q = 2). Zero when k > n.
pub fn count_subgroups(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= (&one << (n - i)) - &one;
        den *= (&one << (k - i)) - &one;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Number of k-dimensional subspaces of (Z/2Z)^n containing `hp`, counted
/// through the quotient (Z/2Z)^n / hp ≅ (Z/2Z)^(n - dim hp).
pub fn count_containing(n: usize, hp: &Subspace, k: usize) -> Result<BigUint, Gf2Error> {
    if hp.ambient_dim() != n {
        return Err(Gf2Error::DimensionMismatch {
            expected: n,
            found: hp.ambient_dim(),
        });
    }
    let dp = hp.dim();
    if k < dp || k > n {
        return Ok(BigUint::zero());
    }
    Ok(count_subgroups(n - dp, k - dp))
}

/// A uniformly random k-dimensional subspace, drawn as the span of a
/// uniformly random independent k-tuple (each subspace has the same number
/// of spanning tuples).
pub fn random_subspace<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Subspace, Gf2Error> {
    check_dim(n)?;
    if k > n {
        return Err(Gf2Error::DimensionOutOfRange { n, k });
    }
    let mut s = Subspace::trivial(n);
    while s.dim() < k {
        let v = rng.gen_range(0..=mask(n));
        s.insert_bits(v);
    }
    Ok(s)
}
