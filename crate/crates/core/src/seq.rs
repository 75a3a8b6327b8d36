//! Eventually periodic binary sequences `w·(p)^∞` in canonical form.
//!
//! Every value of [`EpSeq`] is canonical: the period is primitive and the
//! preperiod is as short as possible. Equality of values is therefore equality
//! of the infinite sequences they denote, and `Ord` is the lexicographic order
//! with `0 < 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("symbol {0:?} is not a binary digit")]
    InvalidSymbol(char),
    #[error("period must be non-empty")]
    EmptyPeriod,
    #[error("malformed sequence literal {0:?}: expected w(p) with p non-empty")]
    Malformed(String),
    #[error("sequences are not strictly increasing")]
    NotIncreasing,
    #[error("no eventually periodic sequence lies strictly between {0} and {1}")]
    NoBetween(EpSeq, EpSeq),
}

/// A finite binary word. Symbols are stored as `0u8` / `1u8`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self, SeqError> {
        if let Some(&b) = symbols.iter().find(|&&b| b > 1) {
            return Err(SeqError::InvalidSymbol(char::from(b'0'.wrapping_add(b))));
        }
        Ok(Word(symbols))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl FromStr for Word {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, SeqError> {
        parse_bits(s).map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bits(f, &self.0)
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>, SeqError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(SeqError::InvalidSymbol(other)),
        })
        .collect()
}

fn write_bits(f: &mut fmt::Formatter<'_>, bits: &[u8]) -> fmt::Result {
    for &b in bits {
        f.write_str(if b == 0 { "0" } else { "1" })?;
    }
    Ok(())
}

/// Eventually periodic sequence `pre · per^∞`, always canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpSeq {
    pre: Vec<u8>,
    per: Vec<u8>,
}

impl EpSeq {
    /// Builds the canonical form of `pre · per^∞`.
    pub fn new(pre: &[u8], per: &[u8]) -> Result<Self, SeqError> {
        if per.is_empty() {
            return Err(SeqError::EmptyPeriod);
        }
        for &b in pre.iter().chain(per) {
            if b > 1 {
                return Err(SeqError::InvalidSymbol(char::from(b'0'.wrapping_add(b))));
            }
        }
        Ok(Self::canonical(pre.to_vec(), per.to_vec()))
    }

    /// Canonical form from word strings, e.g. `canonicalize("1", "01")` is `(10)`.
    pub fn canonicalize(pre: &str, per: &str) -> Result<Self, SeqError> {
        let pre = parse_bits(pre)?;
        let per = parse_bits(per)?;
        Self::new(&pre, &per)
    }

    /// The purely periodic sequence `w^∞`.
    pub fn periodic(w: &[u8]) -> Self {
        Self::new(&[], w).expect("periodic word must be non-empty and binary")
    }

    /// The constant sequence `b^∞`.
    pub fn constant(b: u8) -> Self {
        Self::periodic(&[b])
    }

    /// `w · x` for a finite word `w`.
    pub fn prepend(w: &[u8], x: &EpSeq) -> Self {
        let mut pre = w.to_vec();
        pre.extend_from_slice(&x.pre);
        Self::canonical(pre, x.per.clone())
    }

    /// `w · x` where `w` is the first `n` symbols of `self`.
    pub fn splice(&self, n: usize, tail: &EpSeq) -> Self {
        Self::prepend(&self.prefix(n), tail)
    }

    fn canonical(mut pre: Vec<u8>, per: Vec<u8>) -> Self {
        let mut per = primitive_root(per);
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EpSeq { pre, per }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.per
    }

    pub fn pre_len(&self) -> usize {
        self.pre.len()
    }

    pub fn per_len(&self) -> usize {
        self.per.len()
    }

    /// Number of distinct shifts, `|pre| + |per|`.
    pub fn orbit_len(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    /// Symbol at 0-based index `i`.
    pub fn at(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    pub fn first(&self) -> u8 {
        self.at(0)
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// `σⁿ(self)`.
    pub fn shift(&self, n: usize) -> Self {
        if n <= self.pre.len() {
            return EpSeq {
                pre: self.pre[n..].to_vec(),
                per: self.per.clone(),
            };
        }
        let k = (n - self.pre.len()) % self.per.len();
        let mut per = self.per.clone();
        per.rotate_left(k);
        EpSeq { pre: Vec::new(), per }
    }

    /// All distinct shifts `σ⁰ … σ^{|pre|+|per|-1}`, in order.
    pub fn shifts(&self) -> impl Iterator<Item = EpSeq> + '_ {
        (0..self.orbit_len()).map(move |n| self.shift(n))
    }

    /// Bitwise complement.
    pub fn complement(&self) -> Self {
        EpSeq {
            pre: self.pre.iter().map(|b| 1 - b).collect(),
            per: self.per.iter().map(|b| 1 - b).collect(),
        }
    }

    /// Compares against a finite word on the word's length.
    /// Returns `None` when the word is a prefix of `self`.
    pub fn cmp_word(&self, w: &[u8]) -> Option<Ordering> {
        w.iter()
            .enumerate()
            .find(|(i, &b)| self.at(*i) != b)
            .map(|(i, &b)| self.at(i).cmp(&b))
    }

    /// First index where the two sequences differ.
    pub fn first_difference(&self, other: &EpSeq) -> Option<usize> {
        let horizon = self.pre.len().max(other.pre.len()) + self.per.len().lcm(&other.per.len());
        (0..horizon).find(|&i| self.at(i) != other.at(i))
    }

    /// True when `self ⪯ σⁿ(self)` for every `n ≥ 0`.
    pub fn is_shift_minimal(&self) -> bool {
        self.shifts().skip(1).all(|s| *self <= s)
    }

    /// True when `σⁿ(self) ⪯ self` for every `n ≥ 0`.
    pub fn is_shift_maximal(&self) -> bool {
        self.shifts().skip(1).all(|s| s <= *self)
    }

    /// A sequence `z` with `x ≺ z ≺ y`.
    ///
    /// With `k` the first difference, the result is `x|_j · 1 · y` for the first
    /// `j > k` with `x_j = 0`, or failing that `y|_j · 0 · x` for the first `j > k`
    /// with `y_j = 1`.
    pub fn strictly_between(x: &EpSeq, y: &EpSeq) -> Result<EpSeq, SeqError> {
        let k = match x.first_difference(y) {
            Some(k) if x.at(k) < y.at(k) => k,
            _ => return Err(SeqError::NotIncreasing),
        };
        let xt = x.shift(k + 1);
        if let Some(o) = (0..xt.orbit_len()).find(|&i| xt.at(i) == 0) {
            let j = k + 1 + o;
            let mut w = x.prefix(j);
            w.push(1);
            return Ok(EpSeq::prepend(&w, y));
        }
        let yt = y.shift(k + 1);
        if let Some(o) = (0..yt.orbit_len()).find(|&i| yt.at(i) == 1) {
            let j = k + 1 + o;
            let mut w = y.prefix(j);
            w.push(0);
            return Ok(EpSeq::prepend(&w, x));
        }
        Err(SeqError::NoBetween(x.clone(), y.clone()))
    }
}

fn primitive_root(per: Vec<u8>) -> Vec<u8> {
    let n = per.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| per[i] == per[i - d]) {
            return per[..d].to_vec();
        }
    }
    per
}

impl Ord for EpSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            Some(i) => self.at(i).cmp(&other.at(i)),
            None => Ordering::Equal,
        }
    }
}

impl PartialOrd for EpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bits(f, &self.pre)?;
        f.write_str("(")?;
        write_bits(f, &self.per)?;
        f.write_str(")")
    }
}

impl fmt::Debug for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpSeq({self})")
    }
}

impl FromStr for EpSeq {
    type Err = SeqError;

    /// Parses `w(p)`; `w` may be empty, `p` may not. A trailing `^∞` or `^inf`
    /// after the closing parenthesis is accepted and ignored.
    fn from_str(s: &str) -> Result<Self, SeqError> {
        let t = s.trim();
        let t = t
            .strip_suffix("^∞")
            .or_else(|| t.strip_suffix("^inf"))
            .unwrap_or(t);
        let malformed = || SeqError::Malformed(s.to_string());
        let open = t.find('(').ok_or_else(malformed)?;
        let body = t[open + 1..].strip_suffix(')').ok_or_else(malformed)?;
        if body.contains(['(', ')']) || t[..open].contains(')') {
            return Err(malformed());
        }
        let pre = parse_bits(&t[..open])?;
        let per = parse_bits(body)?;
        Self::new(&pre, &per)
    }
}

impl Serialize for EpSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EpSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
