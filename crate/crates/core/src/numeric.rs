//! Intermediate β-transformations `T(x) = βx + α mod 1` in decimal fixed point.
//!
//! Reals are integers scaled by `10^precision`. Hits within `tie_epsilon` of the
//! critical point are resolved by a one-sided limit or reported as ambiguous.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kneading::KneadingPair;
use crate::poly::{smallest_root_in_unit, IntPoly};
use crate::seq::{EpSeq, Word};
use crate::survivor::{first_ascent_prefix, first_descent_prefix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("cannot parse {0:?} as a decimal number")]
    BadDecimal(String),
    #[error("(β, α) = ({0}, {1}) lies outside 1 < β ≤ 2, 0 ≤ α ≤ 2 - β")]
    OutOfDelta(String, String),
    #[error("precision must be at least 20 digits")]
    LowPrecision,
    #[error("no repeated orbit point within depth {0}; kneading sequence left incomplete")]
    Incomplete(usize),
}

/// Default working precision in decimal digits.
pub const DEFAULT_PRECISION: usize = 50;
/// Tolerance for detecting a repeated orbit point.
pub const REPEAT_TOLERANCE: f64 = 1e-8;

/// A fixed-point real: `raw / 10^precision`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(pub BigInt);

#[derive(Debug, Clone)]
pub struct MapParams {
    precision: usize,
    scale: BigInt,
    beta: Fixed,
    alpha: Fixed,
    c: Fixed,
    tie: BigInt,
}

/// Named values accepted wherever a decimal β is expected.
fn named_beta(name: &str, scale: &BigInt) -> Option<BigInt> {
    // Largest X with P(X / scale) ≤ 0 for the minimal polynomial P, homogenised.
    let homog: fn(&BigInt, &BigInt) -> BigInt = match name {
        "golden" | "phi" => |x, s| x * x - x * s - s * s,
        "tribonacci" => |x, s| x * x * x - x * x * s - x * s * s - s * s * s,
        _ => return None,
    };
    let (mut lo, mut hi) = (scale.clone(), scale * 2u32);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if homog(&mid, scale).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(lo)
}

impl MapParams {
    /// Parses β and α as decimal strings. β may also be `golden` or `tribonacci`;
    /// α may be `symmetric` for `1 - β/2`.
    pub fn new(beta: &str, alpha: &str, precision: usize) -> Result<Self, NumericError> {
        if precision < 20 {
            return Err(NumericError::LowPrecision);
        }
        let scale = BigInt::from(10u32).pow(precision as u32);
        let b = match named_beta(beta.trim(), &scale) {
            Some(v) => v,
            None => parse_decimal(beta, precision)?,
        };
        let a = if alpha.trim() == "symmetric" {
            &scale - (&b >> 1)
        } else {
            parse_decimal(alpha, precision)?
        };
        let out_of_delta = || NumericError::OutOfDelta(beta.to_string(), alpha.to_string());
        let two = &scale * 2u32;
        if b <= scale || b > two || a.is_negative() || a > &two - &b {
            return Err(out_of_delta());
        }
        let c = ((&scale - &a) * &scale).div_floor(&b);
        let tie = BigInt::from(10u32).pow(10);
        Ok(MapParams { precision, beta: Fixed(b), alpha: Fixed(a), c: Fixed(c), tie, scale })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn beta(&self) -> &Fixed {
        &self.beta
    }

    pub fn alpha(&self) -> &Fixed {
        &self.alpha
    }

    pub fn c(&self) -> &Fixed {
        &self.c
    }

    pub fn beta_f64(&self) -> f64 {
        self.to_f64(&self.beta)
    }

    pub fn to_f64(&self, x: &Fixed) -> f64 {
        // Keep 17 significant digits before converting.
        let drop = self.precision.saturating_sub(17) as u32;
        let q = &x.0 / BigInt::from(10u32).pow(drop);
        q.to_f64().unwrap_or(f64::NAN) / 10f64.powi((self.precision - drop as usize) as i32)
    }

    pub fn parse(&self, s: &str) -> Result<Fixed, NumericError> {
        parse_decimal(s, self.precision).map(Fixed)
    }

    /// `num / den` at working precision.
    pub fn ratio(&self, num: u64, den: u64) -> Fixed {
        Fixed((&self.scale * num).div_floor(&BigInt::from(den)))
    }

    pub fn zero(&self) -> Fixed {
        Fixed(BigInt::zero())
    }

    pub fn one(&self) -> Fixed {
        Fixed(self.scale.clone())
    }

    /// Renders a fixed-point value with `digits` decimals.
    pub fn format(&self, x: &Fixed, digits: usize) -> String {
        let digits = digits.min(self.precision);
        let q = &x.0 / BigInt::from(10u32).pow((self.precision - digits) as u32);
        let (int, frac) = q.abs().div_rem(&BigInt::from(10u32).pow(digits as u32));
        let sign = if q.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac:0>digits$}")
        }
    }

    /// `T(x)`; the branch is `x < c`.
    pub fn map_eval(&self, x: &Fixed) -> Fixed {
        let mut y = (&self.beta.0 * &x.0).div_floor(&self.scale) + &self.alpha.0;
        if x.0 >= self.c.0 {
            y -= &self.scale;
        }
        Fixed(y.clamp(BigInt::zero(), self.scale.clone()))
    }

    fn near_c(&self, x: &Fixed) -> bool {
        (&x.0 - &self.c.0).abs() < self.tie
    }

    /// Itinerary of `x` together with the orbit point used before each symbol.
    pub fn orbit(&self, x: &Fixed, depth: usize, side: Side) -> (Itinerary, Vec<Fixed>) {
        let mut word = Vec::with_capacity(depth);
        let mut points = Vec::with_capacity(depth);
        let mut ties = 0;
        let mut ambiguous = false;
        let mut y = x.clone();
        while word.len() < depth {
            points.push(y.clone());
            if self.near_c(&y) {
                ties += 1;
                match side {
                    Side::Plus => {
                        word.push(1);
                        y = self.zero();
                    }
                    Side::Minus => {
                        word.push(0);
                        y = self.one();
                    }
                    Side::None => {
                        ambiguous = true;
                        points.pop();
                        break;
                    }
                }
                continue;
            }
            word.push(u8::from(y.0 > self.c.0));
            y = self.map_eval(&y);
        }
        let truncated_at = word.len();
        let it = Itinerary { word: Word::new(word).expect("binary"), truncated_at, ambiguous, ties };
        (it, points)
    }

    pub fn itinerary(&self, x: &Fixed, depth: usize, side: Side) -> Itinerary {
        self.orbit(x, depth, side).0
    }

    /// Prefixes of `k₊ = 1·τ(0)` and `k₋ = 0·τ(1)` of length `depth`.
    pub fn kneading_prefixes(&self, depth: usize) -> KneadingPrefixes {
        let depth = depth.max(2);
        let plus = self.itinerary(&self.zero(), depth - 1, Side::Plus);
        let minus = self.itinerary(&self.one(), depth - 1, Side::Minus);
        KneadingPrefixes {
            kplus: prepend_word(1, &plus.word),
            kminus: prepend_word(0, &minus.word),
            ties: plus.ties + minus.ties,
        }
    }

    /// `τ(x±)` closed into an eventually periodic sequence at the first repeated
    /// orbit point, if one occurs within `depth` steps.
    pub fn complete_itinerary(&self, x: &Fixed, depth: usize, side: Side) -> Option<EpSeq> {
        let (it, points) = self.orbit(x, depth, side);
        if it.ambiguous {
            return None;
        }
        let tol = (REPEAT_TOLERANCE * 1e18) as u64;
        let tol = BigInt::from(tol) * &self.scale / BigInt::from(10u64.pow(18));
        close_orbit(it.word.as_slice(), &points, &tol)
    }

    /// Kneading pair completed by orbit repetition.
    pub fn complete_kneading(&self, depth: usize) -> Result<KneadingPair, NumericError> {
        let plus = self.complete_itinerary(&self.zero(), depth, Side::Plus);
        let minus = self.complete_itinerary(&self.one(), depth, Side::Minus);
        match (plus, minus) {
            (Some(p), Some(m)) => Ok(KneadingPair::new(EpSeq::prepend(&[1], &p), EpSeq::prepend(&[0], &m))
                .expect("leading symbols are fixed")),
            _ => Err(NumericError::Incomplete(depth)),
        }
    }

    /// Escape-time simulation in `f64` over an equispaced grid of `[0, 1]`.
    pub fn escape_survivors(&self, a: f64, b: f64, n_points: usize, n_iters: usize) -> EscapeReport {
        let n_points = n_points.max(2);
        let points: Vec<f64> = (0..n_points).map(|i| i as f64 / (n_points - 1) as f64).collect();
        self.escape_survivors_at(a, b, &points, n_iters)
    }

    /// Escape-time simulation from the given starting points.
    pub fn escape_survivors_at(&self, a: f64, b: f64, points: &[f64], n_iters: usize) -> EscapeReport {
        let beta = self.beta_f64();
        let alpha = self.to_f64(&self.alpha);
        let c = self.to_f64(&self.c);
        let outcomes: Vec<Option<usize>> = points
            .par_iter()
            .map(|&x0| {
                let mut x = x0;
                for n in 0..n_iters {
                    if a < x && x < b {
                        return Some(n);
                    }
                    x = if x < c { beta * x + alpha } else { beta * x + alpha - 1.0 };
                    x = x.clamp(0.0, 1.0);
                }
                None
            })
            .collect();
        let mut histogram = vec![0usize; n_iters];
        let mut survivors = Vec::new();
        for (&x, o) in points.iter().zip(&outcomes) {
            match o {
                Some(n) => histogram[*n] += 1,
                None => survivors.push(x),
            }
        }
        EscapeReport {
            surviving_fraction: survivors.len() as f64 / points.len().max(1) as f64,
            histogram,
            flagged_points: survivors.iter().filter(|&&x| (x - c).abs() < 1e-12).count(),
            survivors,
        }
    }
}

fn prepend_word(b: u8, w: &Word) -> Word {
    let mut v = vec![b];
    v.extend_from_slice(w.as_slice());
    Word::new(v).expect("binary")
}

/// First `i` whose orbit point repeats an earlier one within `tol` with the same
/// symbol, and whose remaining symbols agree with the implied period.
fn close_orbit(word: &[u8], points: &[Fixed], tol: &BigInt) -> Option<EpSeq> {
    for i in 1..points.len() {
        for j in 0..i {
            if word[i] != word[j] || (&points[i].0 - &points[j].0).abs() >= *tol {
                continue;
            }
            let p = i - j;
            if (i..word.len()).all(|k| word[k] == word[k - p]) {
                return Some(EpSeq::new(&word[..j], &word[j..i]).expect("period is non-empty"));
            }
        }
    }
    None
}

/// Truncation of a lower bound known only through a prefix:
/// `(w|_m)^∞` for the first descent `m` decided within the prefix.
pub fn truncate_lower_prefix(w: &[u8]) -> Option<EpSeq> {
    first_descent_prefix(w).map(|m| EpSeq::periodic(&w[..m]))
}

/// Upper-bound counterpart of [`truncate_lower_prefix`].
pub fn truncate_upper_prefix(w: &[u8]) -> Option<EpSeq> {
    first_ascent_prefix(w).map(|m| EpSeq::periodic(&w[..m]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
    None,
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            "none" => Ok(Side::None),
            other => Err(format!("unknown side {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itinerary {
    pub word: Word,
    pub truncated_at: usize,
    /// Set when a hit on the critical point stopped the itinerary (side `None`).
    pub ambiguous: bool,
    /// Number of critical hits resolved by the one-sided convention.
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingPrefixes {
    pub kplus: Word,
    pub kminus: Word,
    pub ties: usize,
}

impl KneadingPrefixes {
    /// `β ≈ 1/t₀` from the truncated kneading series `Σ (k₊ᵢ - k₋ᵢ) tⁱ`.
    pub fn beta_estimate(&self) -> Option<f64> {
        let coeffs: Vec<i64> = self
            .kplus
            .as_slice()
            .iter()
            .zip(self.kminus.as_slice())
            .map(|(&p, &m)| i64::from(p) - i64::from(m))
            .collect();
        smallest_root_in_unit(&IntPoly::from_i64(&coeffs)).map(|r| 1.0 / r.midpoint())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub surviving_fraction: f64,
    /// `histogram[n]` counts grid points that entered the hole at step `n`.
    pub histogram: Vec<usize>,
    /// Survivors sitting on the critical point, where `f64` cannot pick a branch.
    pub flagged_points: usize,
    #[serde(skip)]
    pub survivors: Vec<f64>,
}

fn parse_decimal(s: &str, precision: usize) -> Result<BigInt, NumericError> {
    let bad = || NumericError::BadDecimal(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut digits = String::from(if int.is_empty() { "0" } else { int });
    let mut f: String = frac.chars().take(precision).collect();
    while f.len() < precision {
        f.push('0');
    }
    digits.push_str(&f);
    let v = BigInt::from_str(&digits).map_err(|_| bad())?;
    Ok(if neg { -v } else { v })
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Fixed {
    pub fn cmp_raw(&self, other: &Fixed) -> Ordering {
        self.0.cmp(&other.0)
    }
}
