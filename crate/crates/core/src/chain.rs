//! Ground types for the two supported chains: the finite chain `X_n` and the
//! rational line ℚ, together with the exact interval algebra used everywhere
//! else.
//!
//! Intervals denote sets of *rationals* only. Because ℚ is dense, adjacent
//! intervals merge aggressively: `(0,1) ∪ [1,2]` is the single interval
//! `(0,2]`. Canonical form (sorted, disjoint, unmergeable) makes structural
//! equality coincide with set equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar. Always stored reduced with positive denominator.
pub type Rat = num_rational::BigRational;

/// Shorthand constructor for a rational from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand constructor for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("empty set has no signature or gaps")]
    EmptySet,
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// The finite chain `{1 < 2 < … < n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteChain {
    n: usize,
}

impl FiniteChain {
    pub fn new(n: usize) -> Result<Self, ChainError> {
        if n == 0 {
            return Err(ChainError::InvalidInterval("chain size must be ≥ 1".into()));
        }
        Ok(FiniteChain { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Iterator over the chain elements `1..=n`.
    pub fn elements(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        1 <= x && x <= self.n
    }
}

/// A rational extended with the two infinities. `NegInf < Finite(q) < PosInf`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRat {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl ExtRat {
    pub fn finite(q: impl Into<Rat>) -> Self {
        ExtRat::Finite(q.into())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(q: Rat) -> Self {
        ExtRat::Finite(q)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => write!(f, "-inf"),
            ExtRat::Finite(q) => write!(f, "{}", q),
            ExtRat::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtRat {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "inf" | "+inf" => Ok(ExtRat::PosInf),
            "-inf" => Ok(ExtRat::NegInf),
            _ => {
                let q = Rat::from_str(s)
                    .map_err(|e| ChainError::Parse(format!("bad rational {s:?}: {e}")))?;
                Ok(ExtRat::Finite(q))
            }
        }
    }
}

/// A nonempty interval of rationals with open/closed endpoint flags.
///
/// Invariants: `lo < hi`, or `lo == hi` with both endpoints closed (a
/// singleton); infinite endpoints are never closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QInterval {
    lo: ExtRat,
    lo_closed: bool,
    hi: ExtRat,
    hi_closed: bool,
}

impl QInterval {
    pub fn new(lo: ExtRat, lo_closed: bool, hi: ExtRat, hi_closed: bool) -> Result<Self, ChainError> {
        if !lo.is_finite() && lo_closed || !hi.is_finite() && hi_closed {
            return Err(ChainError::InvalidInterval(
                "infinite endpoint cannot be closed".into(),
            ));
        }
        match lo.cmp(&hi) {
            Ordering::Less => Ok(QInterval { lo, lo_closed, hi, hi_closed }),
            Ordering::Equal if lo_closed && hi_closed => {
                Ok(QInterval { lo, lo_closed, hi, hi_closed })
            }
            _ => Err(ChainError::InvalidInterval(format!(
                "degenerate interval with lo={lo}, hi={hi}"
            ))),
        }
    }

    /// The singleton `[q,q]`.
    pub fn singleton(q: Rat) -> Self {
        QInterval {
            lo: ExtRat::Finite(q.clone()),
            lo_closed: true,
            hi: ExtRat::Finite(q),
            hi_closed: true,
        }
    }

    /// The whole rational line `(-inf, inf)`.
    pub fn all() -> Self {
        QInterval { lo: ExtRat::NegInf, lo_closed: false, hi: ExtRat::PosInf, hi_closed: false }
    }

    /// Bounded interval with finite rational endpoints.
    pub fn bounded(lo: Rat, lo_closed: bool, hi: Rat, hi_closed: bool) -> Result<Self, ChainError> {
        QInterval::new(ExtRat::Finite(lo), lo_closed, ExtRat::Finite(hi), hi_closed)
    }

    pub fn lo(&self) -> &ExtRat {
        &self.lo
    }

    pub fn hi(&self) -> &ExtRat {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, q: &Rat) -> bool {
        let x = ExtRat::Finite(q.clone());
        let above = match self.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Some rational inside the interval (dense chain: always exists).
    pub fn sample(&self) -> Rat {
        match (&self.lo, &self.hi) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                if self.lo_closed {
                    a.clone()
                } else if self.hi_closed && a != b {
                    b.clone()
                } else {
                    (a + b) / rat_int(2)
                }
            }
            (ExtRat::Finite(a), ExtRat::PosInf) => {
                if self.lo_closed {
                    a.clone()
                } else {
                    a + rat_int(1)
                }
            }
            (ExtRat::NegInf, ExtRat::Finite(b)) => {
                if self.hi_closed {
                    b.clone()
                } else {
                    b - rat_int(1)
                }
            }
            _ => rat_int(0),
        }
    }

    /// True when `self ∪ other` is again a single interval over ℚ
    /// (they overlap, or touch at a point at least one of them contains).
    fn mergeable(&self, other: &QInterval) -> bool {
        // Order so that a starts no later than b.
        let (a, b) = if starts_before(self, other) { (self, other) } else { (other, self) };
        match a.hi.cmp(&b.lo) {
            Ordering::Greater => true,
            Ordering::Equal => a.hi_closed || b.lo_closed,
            Ordering::Less => false,
        }
    }

    fn merge(&self, other: &QInterval) -> QInterval {
        let (lo, lo_closed) = min_start(self, other);
        let (hi, hi_closed) = max_end(self, other);
        QInterval { lo: lo.clone(), lo_closed, hi: hi.clone(), hi_closed }
    }

    /// Intersection with another interval, if nonempty.
    pub fn intersect(&self, other: &QInterval) -> Option<QInterval> {
        let (lo, lo_closed) = if start_key(self) >= start_key(other) {
            (self.lo.clone(), self.lo_closed)
        } else {
            (other.lo.clone(), other.lo_closed)
        };
        let (hi, hi_closed) = if end_key(self) <= end_key(other) {
            (self.hi.clone(), self.hi_closed)
        } else {
            (other.hi.clone(), other.hi_closed)
        };
        QInterval::new(lo, lo_closed, hi, hi_closed).ok()
    }

    /// The (up to two) intervals of `self ∖ other`.
    pub fn subtract(&self, other: &QInterval) -> Vec<QInterval> {
        let mut out = Vec::new();
        match self.intersect(other) {
            None => out.push(self.clone()),
            Some(mid) => {
                if let Ok(left) =
                    QInterval::new(self.lo.clone(), self.lo_closed, mid.lo.clone(), !mid.lo_closed)
                {
                    out.push(left);
                }
                if let Ok(right) =
                    QInterval::new(mid.hi.clone(), !mid.hi_closed, self.hi.clone(), self.hi_closed)
                {
                    out.push(right);
                }
            }
        }
        out
    }
}

// Start ordering: closed endpoints start "earlier" at equal positions.
fn start_key(i: &QInterval) -> (ExtRat, bool) {
    (i.lo.clone(), !i.lo_closed)
}

fn end_key(i: &QInterval) -> (ExtRat, bool) {
    (i.hi.clone(), i.hi_closed)
}

fn starts_before(a: &QInterval, b: &QInterval) -> bool {
    start_key(a) <= start_key(b)
}

fn min_start<'a>(a: &'a QInterval, b: &'a QInterval) -> (&'a ExtRat, bool) {
    if starts_before(a, b) {
        (&a.lo, a.lo_closed)
    } else {
        (&b.lo, b.lo_closed)
    }
}

fn max_end<'a>(a: &'a QInterval, b: &'a QInterval) -> (&'a ExtRat, bool) {
    if end_key(a) >= end_key(b) {
        (&a.hi, a.hi_closed)
    } else {
        (&b.hi, b.hi_closed)
    }
}

impl fmt::Display for QInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

impl FromStr for QInterval {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        let open = chars.next().ok_or_else(|| ChainError::Parse("empty interval".into()))?;
        let close = s.chars().last().unwrap();
        let lo_closed = match open {
            '[' => true,
            '(' => false,
            _ => return Err(ChainError::Parse(format!("bad interval start in {s:?}"))),
        };
        let hi_closed = match close {
            ']' => true,
            ')' => false,
            _ => return Err(ChainError::Parse(format!("bad interval end in {s:?}"))),
        };
        let body = &s[1..s.len() - 1];
        let (lo_s, hi_s) = body
            .split_once(',')
            .ok_or_else(|| ChainError::Parse(format!("missing comma in {s:?}")))?;
        let lo = ExtRat::from_str(lo_s)?;
        let hi = ExtRat::from_str(hi_s)?;
        QInterval::new(lo, lo_closed, hi, hi_closed)
    }
}

/// A finite union of disjoint rational intervals in canonical form: parts
/// sorted, pairwise disjoint, and no two mergeable into one interval over ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalUnion {
    parts: Vec<QInterval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    /// The whole rational line.
    pub fn all() -> Self {
        IntervalUnion { parts: vec![QInterval::all()] }
    }

    /// Canonicalize an arbitrary list of intervals. The denoted set of
    /// rationals is preserved.
    pub fn normalize(parts: Vec<QInterval>) -> Self {
        let mut parts = parts;
        parts.sort_by_key(start_key);
        let mut out: Vec<QInterval> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                Some(last) if last.mergeable(&p) => *last = last.merge(&p),
                _ => out.push(p),
            }
        }
        IntervalUnion { parts: out }
    }

    pub fn from_interval(i: QInterval) -> Self {
        IntervalUnion { parts: vec![i] }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[QInterval] {
        &self.parts
    }

    pub fn contains(&self, q: &Rat) -> bool {
        self.parts.iter().any(|p| p.contains(q))
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        IntervalUnion::normalize(parts)
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                if let Some(i) = a.intersect(b) {
                    parts.push(i);
                }
            }
        }
        IntervalUnion::normalize(parts)
    }

    pub fn subtract(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = self.parts.clone();
        for b in &other.parts {
            parts = parts.iter().flat_map(|a| a.subtract(b)).collect();
        }
        IntervalUnion::normalize(parts)
    }

    /// Set equality; canonical form makes this structural equality.
    pub fn set_eq(&self, other: &IntervalUnion) -> bool {
        self == other
    }

    /// Max/min/boundedness facts of the denoted set.
    pub fn signature(&self) -> Result<Signature, ChainError> {
        union_signature(self)
    }

    /// Attained-side flags for each gap between consecutive parts.
    pub fn gaps(&self) -> Result<Vec<(bool, bool)>, ChainError> {
        gap_list(self)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, "}}")
    }
}

impl FromStr for IntervalUnion {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = if let Some(stripped) = s.strip_prefix('{') {
            stripped
                .strip_suffix('}')
                .ok_or_else(|| ChainError::Parse(format!("unbalanced braces in {s:?}")))?
        } else {
            // A bare interval is accepted as a one-part union.
            return Ok(IntervalUnion::from_interval(QInterval::from_str(s)?));
        };
        let body = body.trim();
        if body.is_empty() {
            return Ok(IntervalUnion::empty());
        }
        // Split on commas that separate intervals, not the comma inside each.
        let mut parts = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (k, c) in body.char_indices() {
            match c {
                '[' | '(' => depth += 1,
                ']' | ')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| ChainError::Parse(format!("unbalanced interval in {s:?}")))?
                }
                ',' if depth == 0 => {
                    parts.push(QInterval::from_str(&body[start..k])?);
                    start = k + 1;
                }
                _ => {}
            }
        }
        parts.push(QInterval::from_str(&body[start..])?);
        Ok(IntervalUnion::normalize(parts))
    }
}

/// Order-theoretic facts about a nonempty set of rationals: whether its
/// min/max exist and whether it is bounded below/above in ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub has_min: bool,
    pub has_max: bool,
    pub bounded_below: bool,
    pub bounded_above: bool,
}

impl Signature {
    /// Signature of any nonempty subset of a finite chain.
    pub fn finite() -> Self {
        Signature { has_min: true, has_max: true, bounded_below: true, bounded_above: true }
    }
}

/// Signature of a nonempty union: the min exists iff the leftmost part is
/// left-closed (hence finite there), dually for the max.
pub fn union_signature(u: &IntervalUnion) -> Result<Signature, ChainError> {
    let first = u.parts.first().ok_or(ChainError::EmptySet)?;
    let last = u.parts.last().unwrap();
    Ok(Signature {
        has_min: first.lo_closed,
        has_max: last.hi_closed,
        bounded_below: first.lo.is_finite(),
        bounded_above: last.hi.is_finite(),
    })
}

/// One `(left_attained, right_attained)` entry per gap between consecutive
/// parts: whether the left part attains its sup and the right part its inf.
/// These two booleans settle, for every rational in the gap, whether
/// `max{t < x}` or `min{t > x}` exists in the denoted set.
pub fn gap_list(u: &IntervalUnion) -> Result<Vec<(bool, bool)>, ChainError> {
    if u.parts.is_empty() {
        return Err(ChainError::EmptySet);
    }
    Ok(u.parts
        .windows(2)
        .map(|w| (w[0].hi_closed, w[1].lo_closed))
        .collect())
}

/// Exact one-rational arithmetic helpers shared by the symbolic layer.
pub fn is_zero(q: &Rat) -> bool {
    q.is_zero()
}

pub fn is_positive(q: &Rat) -> bool {
    q.is_positive()
}

pub fn one() -> Rat {
    Rat::one()
}
