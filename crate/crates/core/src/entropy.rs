//! Kneading determinants, topological entropy and Hausdorff dimension.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kneading::{HoleKneading, KneadingError, KneadingPair};
use crate::poly::{smallest_root_in_unit, IntPoly, RootBracket};
use crate::seq::EpSeq;
use crate::survivor::{survivor_shift, SurvivorShift};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntropyError {
    #[error("entropy is zero; β is undefined")]
    ZeroEntropy,
    #[error(transparent)]
    Kneading(#[from] KneadingError),
}

/// `K(t) = K₊(t) - K₋(t)` as `numerator / ∏(1 - tᵖ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingDeterminant {
    pub numerator: IntPoly,
    pub denominator_periods: Vec<usize>,
}

/// `K(t)` in lowest terms, with `denominator(0) > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDeterminant {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
}

impl fmt::Display for ReducedDeterminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.numerator, self.denominator)
    }
}

/// Generating series `Σ xᵢ tⁱ` of an eventually periodic sequence as `A(t) / (1 - tᵖ)`.
fn series_numerator(x: &EpSeq) -> IntPoly {
    let p = x.per_len();
    let pre = IntPoly::from_bits(x.preperiod());
    let per = IntPoly::from_bits(x.period());
    &(&pre * &IntPoly::one_minus_pow(p)) + &(&IntPoly::monomial(x.pre_len()) * &per)
}

impl KneadingDeterminant {
    pub fn new(kplus: &EpSeq, kminus: &EpSeq) -> Self {
        let (a, p) = (series_numerator(kplus), kplus.per_len());
        let (b, q) = (series_numerator(kminus), kminus.per_len());
        if p == q {
            KneadingDeterminant { numerator: &a - &b, denominator_periods: vec![p] }
        } else {
            KneadingDeterminant {
                numerator: &(&a * &IntPoly::one_minus_pow(q)) - &(&b * &IntPoly::one_minus_pow(p)),
                denominator_periods: vec![p, q],
            }
        }
    }

    pub fn of_pair(pair: &KneadingPair) -> Self {
        Self::new(pair.kplus(), pair.kminus())
    }

    pub fn denominator(&self) -> IntPoly {
        self.denominator_periods
            .iter()
            .fold(IntPoly::from_i64(&[1]), |acc, &p| &acc * &IntPoly::one_minus_pow(p))
    }

    /// Cancels common cyclotomic factors.
    pub fn reduce(&self) -> ReducedDeterminant {
        let mut num = self.numerator.clone();
        let mut den = self.denominator();
        let max_p = self.denominator_periods.iter().copied().max().unwrap_or(1);
        for d in 1..=max_p {
            if !self.denominator_periods.iter().any(|p| p % d == 0) {
                continue;
            }
            let phi = IntPoly::cyclotomic(d);
            while let (Some(n2), Some(d2)) = (num.div_exact(&phi), den.div_exact(&phi)) {
                if num.is_zero() {
                    break;
                }
                num = n2;
                den = d2;
            }
        }
        if den.constant_term().is_negative() {
            num = -&num;
            den = -&den;
        }
        ReducedDeterminant { numerator: num, denominator: den }
    }

    /// Partial sum of `K₊ - K₋` evaluated at `t` over the first `n` terms.
    pub fn truncated_series(kplus: &EpSeq, kminus: &EpSeq, n: usize, t: f64) -> f64 {
        (0..n)
            .rev()
            .fold(0.0, |acc, i| acc * t + f64::from(kplus.at(i)) - f64::from(kminus.at(i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyFlag {
    /// The smallest root was found as an unresolved cluster, not a sign change.
    TangentialRoot,
}

impl fmt::Display for EntropyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("tangential_root")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub t0: Option<RootBracket>,
    /// Natural-log entropy, `-ln t₀`, or 0.
    pub entropy: f64,
    pub flags: Vec<EntropyFlag>,
}

impl EntropyResult {
    pub fn zero() -> Self {
        EntropyResult { t0: None, entropy: 0.0, flags: Vec::new() }
    }

    pub fn bits(&self) -> f64 {
        self.entropy / std::f64::consts::LN_2
    }
}

pub fn smallest_root(k: &KneadingDeterminant) -> EntropyResult {
    match smallest_root_in_unit(&k.reduce().numerator) {
        None => EntropyResult::zero(),
        Some(r) => EntropyResult {
            entropy: -r.midpoint().ln(),
            flags: if r.tangential { vec![EntropyFlag::TangentialRoot] } else { Vec::new() },
            t0: Some(r),
        },
    }
}

/// Entropy of the Lorenz shift `Ω(k₊, k₋)`.
pub fn pair_entropy(pair: &KneadingPair) -> EntropyResult {
    smallest_root(&KneadingDeterminant::of_pair(pair))
}

/// Entropy of a survivor shift; degenerate shifts have entropy 0.
pub fn shift_entropy(shift: &SurvivorShift) -> EntropyResult {
    match shift.as_pair() {
        Some(pair) => pair_entropy(&pair),
        None => EntropyResult::zero(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorEntropy {
    pub shift: SurvivorShift,
    pub result: EntropyResult,
}

pub fn survivor_entropy(pair: &KneadingPair, h: &HoleKneading) -> Result<SurvivorEntropy, KneadingError> {
    let shift = survivor_shift(h, pair)?;
    let result = shift_entropy(&shift);
    Ok(SurvivorEntropy { shift, result })
}

/// `β = 1/t₀` for the pair's Lorenz shift.
pub fn beta_from_kneading(pair: &KneadingPair) -> Result<f64, EntropyError> {
    let r = pair_entropy(pair);
    r.t0.map(|b| 1.0 / b.midpoint()).ok_or(EntropyError::ZeroEntropy)
}

/// `h / ln β`, clamped to `[0, 1]`.
pub fn dimension(beta: f64, entropy: &EntropyResult) -> f64 {
    if entropy.t0.is_none() {
        return 0.0;
    }
    (entropy.entropy / beta.ln()).clamp(0.0, 1.0)
}
