//! Kneading pairs, Lorenz-shift membership and symbolic holes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::EpSeq;
use crate::survivor::Flip;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KneadingError {
    #[error("k+ must start with 1 and k- with 0, got ({0}, {1})")]
    InvalidPair(EpSeq, EpSeq),
    #[error("kneading pair is not admissible")]
    NotAdmissiblePair,
    #[error("hole bound {0} has the wrong leading symbol for its side")]
    InvalidBound(EpSeq),
    #[error("hole has no critical endpoint")]
    NotCriticalHole,
    #[error("survivor set is contained in the fixed points 0 and 1")]
    DegenerateHole,
    #[error("flip iteration exceeded cap {cap}")]
    IterationCapExceeded { cap: usize, trace: Vec<Flip> },
    #[error("internal invariant violated: {message}")]
    Internal { message: String, trace: Vec<Flip> },
}

/// Kneading invariants `(k₊, k₋)` of an expansive Lorenz map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KneadingPair {
    kplus: EpSeq,
    kminus: EpSeq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Admissibility {
    HsAdmissible,
    WeakOnly,
    NotAdmissible,
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Admissibility::HsAdmissible => "hs-admissible",
            Admissibility::WeakOnly => "weak-only",
            Admissibility::NotAdmissible => "not-admissible",
        })
    }
}

impl KneadingPair {
    pub fn new(kplus: EpSeq, kminus: EpSeq) -> Result<Self, KneadingError> {
        if kplus.first() != 1 || kminus.first() != 0 {
            return Err(KneadingError::InvalidPair(kplus, kminus));
        }
        Ok(KneadingPair { kplus, kminus })
    }

    /// Pair of the doubling map, whose Lorenz shift is the full shift.
    pub fn full_shift() -> Self {
        KneadingPair {
            kplus: "1(0)".parse().unwrap(),
            kminus: "0(1)".parse().unwrap(),
        }
    }

    pub fn kplus(&self) -> &EpSeq {
        &self.kplus
    }

    pub fn kminus(&self) -> &EpSeq {
        &self.kminus
    }

    /// `k(0) = σ(k₊)`.
    pub fn k0(&self) -> EpSeq {
        self.kplus.shift(1)
    }

    /// `k(1) = σ(k₋)`.
    pub fn k1(&self) -> EpSeq {
        self.kminus.shift(1)
    }

    /// Pair of the map conjugated by `x ↦ 1 - x`.
    pub fn mirror(&self) -> Self {
        KneadingPair {
            kplus: self.kminus.complement(),
            kminus: self.kplus.complement(),
        }
    }

    pub fn classify(&self) -> Admissibility {
        let (k0, k1) = (self.k0(), self.k1());
        let plus_strict = self.kplus.shifts().all(|x| k0 <= x && x < k1);
        let minus_strict = self.kminus.shifts().all(|x| k0 < x && x <= k1);
        if plus_strict && minus_strict {
            return Admissibility::HsAdmissible;
        }
        if within(&self.kplus, &k0, &k1) && within(&self.kminus, &k0, &k1) {
            Admissibility::WeakOnly
        } else {
            Admissibility::NotAdmissible
        }
    }

    /// Membership of `w` in the Lorenz shift `Ω(k₊, k₋)`.
    pub fn shift_contains(&self, w: &EpSeq) -> Result<bool, KneadingError> {
        if self.classify() == Admissibility::NotAdmissible {
            return Err(KneadingError::NotAdmissiblePair);
        }
        Ok(within(w, &self.k0(), &self.k1()))
    }
}

impl fmt::Display for KneadingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.kplus, self.kminus)
    }
}

/// True when `lo ⪯ σⁿ(w) ⪯ hi` for all `n ≥ 0`.
pub fn within(w: &EpSeq, lo: &EpSeq, hi: &EpSeq) -> bool {
    w.shifts().all(|x| *lo <= x && x <= *hi)
}

/// Which kind of hole a [`HoleKneading`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HoleAnchor {
    /// `(a, b)` with `a ⩽ c ⩽ b`.
    Critical,
    /// `(0, t)`; only the upper bound is meaningful.
    Zero,
    /// `(s, 1)`; only the lower bound is meaningful.
    One,
}

/// Symbolic hole.
///
/// For a critical hole, `a_lower` is `τ(a−)` and `b_upper` is `τ(b+)`; a side
/// equal to the critical point may be left as `None` until [`normalize`](Self::normalize).
/// For a zero-anchored hole `(0, t)`, `b_upper` holds `τ(t+)`; for a one-anchored
/// hole `(s, 1)`, `a_lower` holds `τ(s−)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HoleKneading {
    pub anchor: HoleAnchor,
    pub a_lower: Option<EpSeq>,
    pub b_upper: Option<EpSeq>,
    pub a_is_critical: bool,
    pub b_is_critical: bool,
}

impl HoleKneading {
    /// Hole `(a, b)` around the critical point; `None` marks a critical side.
    pub fn around_critical(a_lower: Option<EpSeq>, b_upper: Option<EpSeq>) -> Result<Self, KneadingError> {
        if let Some(a) = a_lower.as_ref().filter(|a| a.first() != 0) {
            return Err(KneadingError::InvalidBound(a.clone()));
        }
        if let Some(b) = b_upper.as_ref().filter(|b| b.first() != 1) {
            return Err(KneadingError::InvalidBound(b.clone()));
        }
        Ok(HoleKneading {
            anchor: HoleAnchor::Critical,
            a_is_critical: a_lower.is_none(),
            b_is_critical: b_upper.is_none(),
            a_lower,
            b_upper,
        })
    }

    /// Hole `(0, t)` given `τ(t+)`.
    pub fn at_zero(t_upper: EpSeq) -> Self {
        HoleKneading {
            anchor: HoleAnchor::Zero,
            a_lower: None,
            b_upper: Some(t_upper),
            a_is_critical: false,
            b_is_critical: false,
        }
    }

    /// Hole `(s, 1)` given `τ(s−)`.
    pub fn at_one(s_lower: EpSeq) -> Self {
        HoleKneading {
            anchor: HoleAnchor::One,
            a_lower: Some(s_lower),
            b_upper: None,
            a_is_critical: false,
            b_is_critical: false,
        }
    }

    /// Substitutes `k₋` for a critical `a` and `k₊` for a critical `b`.
    pub fn normalize(&self, pair: &KneadingPair) -> HoleKneading {
        let mut h = self.clone();
        if h.anchor == HoleAnchor::Critical {
            if h.a_is_critical {
                h.a_lower = Some(pair.kminus().clone());
            }
            if h.b_is_critical {
                h.b_upper = Some(pair.kplus().clone());
            }
        }
        h
    }

    /// True when the survivor set reduces to the fixed points.
    pub fn is_degenerate(&self) -> bool {
        let starts = |x: &Option<EpSeq>, b: u8| x.as_ref().is_some_and(|x| x.first() == b && x.at(1) == b);
        match self.anchor {
            HoleAnchor::Critical => starts(&self.b_upper, 1) || starts(&self.a_lower, 0),
            HoleAnchor::Zero => self.b_upper.as_ref().is_some_and(|t| t.first() == 1),
            HoleAnchor::One => self.a_lower.as_ref().is_some_and(|s| s.first() == 0),
        }
    }

    /// Lower and upper constraint bounds `(L, U)` of `S⁺ = {w : L ⪯ σⁿ(w) ⪯ U}`.
    pub fn constraint_bounds(&self, pair: &KneadingPair) -> (EpSeq, EpSeq) {
        let h = self.normalize(pair);
        match h.anchor {
            HoleAnchor::Critical => (
                h.b_upper.expect("normalized").shift(1),
                h.a_lower.expect("normalized").shift(1),
            ),
            HoleAnchor::Zero => (h.b_upper.expect("zero hole bound"), pair.k1()),
            HoleAnchor::One => (pair.k0(), h.a_lower.expect("one hole bound")),
        }
    }

    /// Moves a hole with a critical endpoint to the boundary: `(c, b)` becomes
    /// `(0, f(b))` and `(a, c)` becomes `(f(a), 1)`.
    pub fn to_boundary(&self, pair: &KneadingPair) -> Result<HoleKneading, KneadingError> {
        if self.anchor != HoleAnchor::Critical || !(self.a_is_critical || self.b_is_critical) {
            return Err(KneadingError::NotCriticalHole);
        }
        let h = self.normalize(pair);
        if h.a_is_critical {
            Ok(HoleKneading::at_zero(h.b_upper.expect("normalized").shift(1)))
        } else {
            Ok(HoleKneading::at_one(h.a_lower.expect("normalized").shift(1)))
        }
    }
}
