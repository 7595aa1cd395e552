//! The rational divisor-class vector space of a moduli space of pointed
//! genus-one curves, and the expansion of tautological classes in its free
//! boundary basis.
//!
//! A [`Space`] is the pair `(n, m)`: `m = 0` selects the space of stable
//! `n`-pointed genus-one curves, `1 <= m <= n-1` the normalized model
//! allowing elliptic l-fold points with `l <= m`. Its rational Picard group
//! is freely generated by `lambda` together with the boundary divisors
//! `delta_{0,S}` for subsets `S` of the marks with `2 <= |S| <= n-m`.
//! [`DivisorClass`] stores a vector in this basis as an exact sparse map;
//! [`expand`] writes each tautological class in it:
//!
//! ```text
//! delta_irr = 12 lambda
//! psi_i     = lambda + sum_{i in S} delta_{0,S}
//! psi       = n lambda + sum |S| delta_{0,S}
//! K (stack) = (n-11) lambda + sum (|S|-2) delta_{0,S}
//! K (coarse)= K (stack) - delta_{0,[n]}         (the correction only
//!              survives on m = 0, where [n] is in the basis)
//! D(s)      = (s+n-12) lambda + sum (|S|-1) delta_{0,S}
//! ```
//!
//! The coarse canonical class subtracts `delta_{0,[n]}` because the map from
//! the stack to its coarse space is ramified along that divisor. The
//! boundary sum in the canonical class runs over the whole basis.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{rat, Rat};

/// Hard cap on `n`: a mark set must fit one machine word.
pub const MAX_N: u32 = 62;

/// Default bound on `n` for operations that enumerate all `2^n` subsets.
pub const DEFAULT_ENUM_CAP: u32 = 16;

/// Subset-enumeration bound; `MSTABLE_ENUM_CAP` overrides the default.
pub fn enum_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("MSTABLE_ENUM_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_ENUM_CAP)
            .min(MAX_N)
    })
}

fn check_enum(n: u32) -> Result<(), Error> {
    let cap = enum_cap();
    if n > cap {
        return Err(Error::EnumCap { n, cap });
    }
    Ok(())
}

/// A subset of the marked points `{1, ..., n}`, stored as a bitmask.
///
/// Equality and ordering are canonical bitmask comparisons; bit `i-1`
/// records mark `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkSet(u64);

impl MarkSet {
    pub const EMPTY: MarkSet = MarkSet(0);

    pub fn from_mask(mask: u64) -> Self {
        MarkSet(mask)
    }

    /// Builds a set from 1-based mark indices, validating against `n`.
    pub fn from_marks<I: IntoIterator<Item = u32>>(marks: I, n: u32) -> Result<Self, Error> {
        let mut mask = 0u64;
        for mark in marks {
            if mark < 1 || mark > n {
                return Err(Error::BadMark { mark, n });
            }
            mask |= 1 << (mark - 1);
        }
        Ok(MarkSet(mask))
    }

    /// The full set `{1, ..., n}`.
    pub fn full(n: u32) -> Self {
        debug_assert!(n <= MAX_N);
        if n == 0 {
            MarkSet(0)
        } else {
            MarkSet(u64::MAX >> (64 - n))
        }
    }

    pub fn singleton(mark: u32) -> Self {
        MarkSet(1 << (mark - 1))
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, mark: u32) -> bool {
        mark >= 1 && mark <= MAX_N && self.0 & (1 << (mark - 1)) != 0
    }

    pub fn is_subset_of(&self, other: &MarkSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(&self, other: &MarkSet) -> MarkSet {
        MarkSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: &MarkSet) -> MarkSet {
        MarkSet(self.0 & other.0)
    }

    pub fn complement_in(&self, n: u32) -> MarkSet {
        MarkSet(MarkSet::full(n).0 & !self.0)
    }

    pub fn min_mark(&self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() + 1)
        }
    }

    /// 1-based marks in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=MAX_N).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Canonical key form: comma-joined ascending 1-based indices.
    pub fn key(&self) -> String {
        let marks: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        marks.join(",")
    }

    /// Parses the canonical `"1,2,5"` key form.
    pub fn parse_key(key: &str, n: u32) -> Result<Self, Error> {
        let mut marks = Vec::new();
        for part in key.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let mark: u32 = part
                .parse()
                .map_err(|_| Error::BadMark { mark: 0, n })?;
            marks.push(mark);
        }
        MarkSet::from_marks(marks, n)
    }
}

impl fmt::Display for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Debug for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// Order used when listing basis elements: cardinality first, then bitmask.
pub fn basis_order(a: &MarkSet, b: &MarkSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then(a.mask().cmp(&b.mask()))
}

/// The pair `(n, m)` selecting a moduli space of pointed genus-one curves.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub n: u32,
    pub m: u32,
}

impl Space {
    pub fn new(n: u32, m: u32) -> Result<Self, Error> {
        if n < 1 || n > MAX_N || m >= n {
            return Err(Error::BadSpace { n, m });
        }
        Ok(Space { n, m })
    }

    /// Largest cardinality of a boundary index set on this space.
    pub fn max_boundary_size(&self) -> u32 {
        self.n - self.m
    }

    /// Is `S` the index of a boundary divisor here, i.e. `2 <= |S| <= n-m`?
    pub fn admits_boundary(&self, s: &MarkSet) -> bool {
        let size = s.len();
        size >= 2 && size <= self.max_boundary_size() && s.is_subset_of(&MarkSet::full(self.n))
    }

    fn check_boundary(&self, s: &MarkSet) -> Result<(), Error> {
        if !s.is_subset_of(&MarkSet::full(self.n)) {
            return Err(Error::BadMark {
                mark: s.iter().find(|&i| i > self.n).unwrap_or(0),
                n: self.n,
            });
        }
        if !self.admits_boundary(s) {
            return Err(Error::Cardinality {
                size: s.len(),
                max: self.max_boundary_size(),
            });
        }
        Ok(())
    }

    /// All boundary index sets, ordered by (cardinality, bitmask).
    pub fn boundary_sets(&self) -> Result<Vec<MarkSet>, Error> {
        check_enum(self.n)?;
        let mut sets: Vec<MarkSet> = (0..(1u64 << self.n))
            .map(MarkSet::from_mask)
            .filter(|s| self.admits_boundary(s))
            .collect();
        sets.sort_by(basis_order);
        Ok(sets)
    }

    /// Basis size `1 + #{S : 2 <= |S| <= n-m}` without enumerating subsets.
    pub fn basis_len(&self) -> u128 {
        let mut count: u128 = 1;
        for size in 2..=self.max_boundary_size() {
            count += binomial(self.n, size);
        }
        count
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={})", self.n, self.m)
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// One element of the free basis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisLabel {
    Lambda,
    Boundary(MarkSet),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Lambda => write!(f, "lambda"),
            BasisLabel::Boundary(s) => write!(f, "delta_0,{}", s),
        }
    }
}

/// Basis labels in deterministic order: `lambda` first, then mark sets by
/// (cardinality, bitmask).
pub fn enumerate_basis(space: Space) -> Result<Vec<BasisLabel>, Error> {
    let mut labels = vec![BasisLabel::Lambda];
    labels.extend(space.boundary_sets()?.into_iter().map(BasisLabel::Boundary));
    Ok(labels)
}

/// A divisor class in the free basis `{lambda} u {delta_{0,S}}`, stored
/// sparsely with no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    space: Space,
    lambda: Rat,
    boundary: BTreeMap<MarkSet, Rat>,
}

impl DivisorClass {
    pub fn zero(space: Space) -> Self {
        DivisorClass {
            space,
            lambda: Rat::zero(),
            boundary: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn lambda_coeff(&self) -> &Rat {
        &self.lambda
    }

    /// Coefficient of `delta_{0,S}` (zero when absent).
    pub fn boundary_coeff(&self, s: &MarkSet) -> Rat {
        self.boundary.get(s).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn boundary_iter(&self) -> impl Iterator<Item = (&MarkSet, &Rat)> {
        self.boundary.iter()
    }

    pub fn set_lambda(&mut self, c: Rat) {
        self.lambda = c;
    }

    pub fn set_boundary(&mut self, s: MarkSet, c: Rat) -> Result<(), Error> {
        self.space.check_boundary(&s)?;
        if c.is_zero() {
            self.boundary.remove(&s);
        } else {
            self.boundary.insert(s, c);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.boundary.is_empty()
    }

    fn check_same_space(&self, other: &DivisorClass) -> Result<(), Error> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left_n: self.space.n,
                left_m: self.space.m,
                right_n: other.space.n,
                right_m: other.space.m,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &DivisorClass) -> Result<DivisorClass, Error> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        out.lambda = &out.lambda + &other.lambda;
        for (s, c) in &other.boundary {
            let sum = out.boundary_coeff(s) + c.clone();
            if sum.is_zero() {
                out.boundary.remove(s);
            } else {
                out.boundary.insert(*s, sum);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DivisorClass) -> Result<DivisorClass, Error> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> DivisorClass {
        if c.is_zero() {
            return DivisorClass::zero(self.space);
        }
        DivisorClass {
            space: self.space,
            lambda: &self.lambda * c,
            boundary: self
                .boundary
                .iter()
                .map(|(s, v)| (*s, v * c))
                .collect(),
        }
    }

    /// The class `lambda`.
    pub fn lambda_class(space: Space) -> Self {
        let mut d = DivisorClass::zero(space);
        d.lambda = Rat::one();
        d
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.lambda.is_zero() {
            write!(f, "{} lambda", self.lambda)?;
            first = false;
        }
        let mut sets: Vec<&MarkSet> = self.boundary.keys().collect();
        sets.sort_by(|a, b| basis_order(a, b));
        for s in sets {
            let c = &self.boundary[s];
            if first {
                write!(f, "{} delta_0,{}", c, s)?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {} delta_0,{}", -c, s)?;
            } else {
                write!(f, " + {} delta_0,{}", c, s)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} on {}]", self, self.space)
    }
}

#[derive(Serialize, Deserialize)]
struct DivisorClassJson {
    n: u32,
    m: u32,
    lambda: Rat,
    boundary: BTreeMap<String, Rat>,
}

impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = DivisorClassJson {
            n: self.space.n,
            m: self.space.m,
            lambda: self.lambda.clone(),
            boundary: self
                .boundary
                .iter()
                .map(|(s, c)| (s.key(), c.clone()))
                .collect(),
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = DivisorClassJson::deserialize(deserializer)?;
        let space = Space::new(json.n, json.m).map_err(serde::de::Error::custom)?;
        let mut out = DivisorClass::zero(space);
        out.lambda = json.lambda;
        for (key, c) in json.boundary {
            let s = MarkSet::parse_key(&key, json.n).map_err(serde::de::Error::custom)?;
            out.set_boundary(s, c).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// A tautological divisor class, prior to expansion in the boundary basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TautClass {
    Lambda,
    DeltaIrr,
    Delta0S(MarkSet),
    Delta0,
    Delta,
    PsiI(u32),
    Psi,
    /// Canonical class of the coarse space (carries the `-delta_{0,[n]}`
    /// ramification correction on m = 0).
    K,
    /// Canonical class in the stack convention, `13 lambda - 2 delta + psi`.
    KStack,
    Ds(Rat),
}

impl fmt::Display for TautClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TautClass::Lambda => write!(f, "lambda"),
            TautClass::DeltaIrr => write!(f, "delta_irr"),
            TautClass::Delta0S(s) => write!(f, "delta_0,{}", s),
            TautClass::Delta0 => write!(f, "delta_0"),
            TautClass::Delta => write!(f, "delta"),
            TautClass::PsiI(i) => write!(f, "psi_{}", i),
            TautClass::Psi => write!(f, "psi"),
            TautClass::K => write!(f, "K"),
            TautClass::KStack => write!(f, "K_stack"),
            TautClass::Ds(s) => write!(f, "D({})", s),
        }
    }
}

impl FromStr for TautClass {
    type Err = Error;

    /// Accepts `lambda`, `delta_irr`, `delta0`, `delta`, `psi`, `psi_3`,
    /// `delta0{1,3}`, `K`, `K_stack`, and `D(11/2)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let raw = s.trim();
        let lower = raw.to_ascii_lowercase();
        let bad = || Error::Usage(format!("unknown class {:?}", raw));
        match lower.as_str() {
            "lambda" => return Ok(TautClass::Lambda),
            "delta_irr" | "deltairr" | "delta-irr" => return Ok(TautClass::DeltaIrr),
            "delta0" | "delta_0" => return Ok(TautClass::Delta0),
            "delta" => return Ok(TautClass::Delta),
            "psi" => return Ok(TautClass::Psi),
            "k" => return Ok(TautClass::K),
            "k_stack" | "kstack" => return Ok(TautClass::KStack),
            _ => {}
        }
        if let Some(rest) = lower
            .strip_prefix("psi_")
            .or_else(|| lower.strip_prefix("psi"))
        {
            let i: u32 = rest.parse().map_err(|_| bad())?;
            return Ok(TautClass::PsiI(i));
        }
        for prefix in ["delta0{", "delta_0{", "delta0,{", "delta_0,{"] {
            if let Some(rest) = lower.strip_prefix(prefix) {
                let inner = rest.strip_suffix('}').ok_or_else(bad)?;
                let set = MarkSet::parse_key(inner, MAX_N)?;
                return Ok(TautClass::Delta0S(set));
            }
        }
        if let Some(rest) = lower.strip_prefix("d(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            return Ok(TautClass::Ds(inner.parse()?));
        }
        if let Some(rest) = lower.strip_prefix("d:") {
            return Ok(TautClass::Ds(rest.parse()?));
        }
        Err(bad())
    }
}

/// Expands a tautological class in the free basis of `space`.
pub fn expand(space: Space, cls: &TautClass) -> Result<DivisorClass, Error> {
    let mut out = DivisorClass::zero(space);
    match cls {
        TautClass::Lambda => {
            out.lambda = Rat::one();
        }
        TautClass::DeltaIrr => {
            out.lambda = rat(12);
        }
        TautClass::Delta0S(s) => {
            space.check_boundary(s)?;
            out.set_boundary(*s, Rat::one())?;
        }
        TautClass::Delta0 => {
            for s in space.boundary_sets()? {
                out.set_boundary(s, Rat::one())?;
            }
        }
        TautClass::Delta => {
            out.lambda = rat(12);
            for s in space.boundary_sets()? {
                out.set_boundary(s, Rat::one())?;
            }
        }
        TautClass::PsiI(i) => {
            if *i < 1 || *i > space.n {
                return Err(Error::BadIndex {
                    index: *i,
                    n: space.n,
                });
            }
            out.lambda = Rat::one();
            for s in space.boundary_sets()? {
                if s.contains(*i) {
                    out.set_boundary(s, Rat::one())?;
                }
            }
        }
        TautClass::Psi => {
            out.lambda = rat(space.n as i64);
            for s in space.boundary_sets()? {
                out.set_boundary(s, rat(s.len() as i64))?;
            }
        }
        TautClass::KStack => {
            out.lambda = rat(space.n as i64 - 11);
            for s in space.boundary_sets()? {
                out.set_boundary(s, rat(s.len() as i64 - 2))?;
            }
        }
        TautClass::K => {
            out = expand(space, &TautClass::KStack)?;
            let full = MarkSet::full(space.n);
            if space.admits_boundary(&full) {
                let c = out.boundary_coeff(&full) - Rat::one();
                out.set_boundary(full, c)?;
            }
        }
        TautClass::Ds(s) => {
            out.lambda = s + &rat(space.n as i64 - 12);
            for set in space.boundary_sets()? {
                out.set_boundary(set, rat(set.len() as i64 - 1))?;
            }
        }
    }
    Ok(out)
}
