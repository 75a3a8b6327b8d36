//! Maximal intervals of constant survivor set, and bifurcation-set membership.
//!
//! A plateau is described by the upper kneading sequences `τ(b_l+)`, `τ(b_r+)` of
//! its endpoints. Holes `(c, b)` and `(a, b)` with `a < c` follow different case
//! trees; the variant where `a` moves and `b` is fixed is obtained from the
//! `b` routine through the symmetry `x ↦ 1 - x`, which complements every
//! sequence and reverses the order.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kneading::{within, HoleKneading, KneadingError, KneadingPair};
use crate::seq::EpSeq;
use crate::survivor::{first_descent, survivor_shift, Flip, SurvivorShift};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlateauError {
    #[error("bound {0} is not purely periodic")]
    NonPeriodicBound(EpSeq),
    #[error("survivor set is degenerate")]
    DegenerateHole,
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error("case analysis invariant violated: {message}")]
    Internal { message: String, trace: Vec<Flip> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateauEndpoint {
    pub kneading: EpSeq,
    pub closed: bool,
}

/// Branch of the case analysis that produced a plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlateauCase {
    /// `σ(b)` is already the smallest possible value; the plateau is `{b}`.
    Trivial,
    /// Critical `a`, `(b, k₋)` weak-admissible.
    CriticalUnchanged,
    /// Critical `a`, only the lower bound changed.
    CriticalLowerChanged,
    /// Critical `a`, upper bound changed; subcase 1 to 4.
    CriticalUpperChanged(u8),
    /// `a < c`, upper bound `σ(a)` unchanged.
    InteriorUpperFixed,
    /// `a < c`, upper bound changed; subcase 1 to 5.
    InteriorUpperChanged(u8),
}

impl fmt::Display for PlateauCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlateauCase::Trivial => f.write_str("trivial"),
            PlateauCase::CriticalUnchanged => f.write_str("critical.case1"),
            PlateauCase::CriticalLowerChanged => f.write_str("critical.case2"),
            PlateauCase::CriticalUpperChanged(k) => write!(f, "critical.case3.subcase{k}"),
            PlateauCase::InteriorUpperFixed => f.write_str("interior.case1"),
            PlateauCase::InteriorUpperChanged(k) => write!(f, "interior.case2.subcase{k}"),
        }
    }
}

/// Which endpoint of the hole moves along the plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlateauSide {
    /// `b` moves; endpoints are upper kneading sequences `τ(·+)`.
    Upper,
    /// `a` moves; endpoints are lower kneading sequences `τ(·−)`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plateau {
    pub left: PlateauEndpoint,
    pub right: PlateauEndpoint,
    pub case: PlateauCase,
    pub side: PlateauSide,
    pub survivor: SurvivorShift,
}

impl Plateau {
    /// Whether `x` lies in the plateau, with endpoint closedness respected.
    pub fn contains(&self, x: &EpSeq) -> bool {
        let above = if self.left.closed { *x >= self.left.kneading } else { *x > self.left.kneading };
        let below = if self.right.closed { *x <= self.right.kneading } else { *x < self.right.kneading };
        above && below
    }

    fn mirrored(&self) -> Plateau {
        let side = match self.side {
            PlateauSide::Upper => PlateauSide::Lower,
            PlateauSide::Lower => PlateauSide::Upper,
        };
        Plateau {
            left: PlateauEndpoint { kneading: self.right.kneading.complement(), closed: self.right.closed },
            right: PlateauEndpoint { kneading: self.left.kneading.complement(), closed: self.left.closed },
            case: self.case,
            side,
            survivor: mirror_survivor(&self.survivor),
        }
    }
}

fn mirror_survivor(s: &SurvivorShift) -> SurvivorShift {
    SurvivorShift {
        s: s.t.complement(),
        t: s.s.complement(),
        degenerate: s.degenerate,
        flips: Vec::new(),
    }
}

fn internal(message: String) -> PlateauError {
    PlateauError::Internal { message, trace: Vec::new() }
}

fn endpoint(kneading: EpSeq, closed: bool) -> PlateauEndpoint {
    PlateauEndpoint { kneading, closed }
}

fn one(x: &EpSeq) -> EpSeq {
    EpSeq::prepend(&[1], x)
}

/// `w|_{r-1} · 0 · tail` where `w = s₁…s_r` and `s_r` must be 1.
fn lower_last(s: &EpSeq, tail: &EpSeq, survivor: &SurvivorShift) -> Result<EpSeq, PlateauError> {
    let r = s.per_len();
    let mut w = s.period().to_vec();
    if w[r - 1] != 1 {
        return Err(PlateauError::Internal {
            message: format!("last period digit of {s} is not 1"),
            trace: survivor.flips.clone(),
        });
    }
    w[r - 1] = 0;
    Ok(EpSeq::prepend(&w, tail))
}

/// Survivor shift and shape checks shared by both case trees.
fn prepare(pair: &KneadingPair, h: &HoleKneading, b_upper: &EpSeq) -> Result<Option<SurvivorShift>, PlateauError> {
    if b_upper.first() != 1 {
        return Err(KneadingError::InvalidBound(b_upper.clone()).into());
    }
    let survivor = survivor_shift(h, pair)?;
    if survivor.degenerate {
        return Err(PlateauError::DegenerateHole);
    }
    if b_upper.shift(1) == EpSeq::constant(0) {
        return Ok(None);
    }
    if !b_upper.is_periodic() {
        return Err(PlateauError::NonPeriodicBound(b_upper.clone()));
    }
    Ok(Some(survivor))
}

fn trivial(pair: &KneadingPair, h: &HoleKneading, b_upper: &EpSeq) -> Result<Plateau, PlateauError> {
    Ok(Plateau {
        left: endpoint(b_upper.clone(), true),
        right: endpoint(b_upper.clone(), true),
        case: PlateauCase::Trivial,
        side: PlateauSide::Upper,
        survivor: survivor_shift(h, pair)?,
    })
}

/// Plateau `I(b)` of the hole `(c, b)`.
pub fn plateau_at_critical(pair: &KneadingPair, b_upper: &EpSeq) -> Result<Plateau, PlateauError> {
    let h = HoleKneading::around_critical(None, Some(b_upper.clone()))?;
    let Some(survivor) = prepare(pair, &h, b_upper)? else {
        return trivial(pair, &h, b_upper);
    };
    let (l, u) = h.constraint_bounds(pair);
    let (s, t) = (&survivor.s, &survivor.t);
    let k0 = pair.k0();

    let (left, case) = if *s == l && *t == u {
        let p = l.per_len();
        (endpoint(one(&l.splice(p, &k0)), true), PlateauCase::CriticalUnchanged)
    } else if *t == u {
        let r = s.per_len();
        (endpoint(one(&s.splice(r, &k0)), true), PlateauCase::CriticalLowerChanged)
    } else {
        let r = s.per_len();
        let q = (1..u.orbit_len())
            .find(|&n| u.shift(n) < *s)
            .ok_or_else(|| internal(format!("no shift of {u} falls below {s}")))?;
        let x = u.shift(q);
        let gamma = lower_last(s, t, &survivor)?;
        if x <= gamma {
            (endpoint(one(&gamma), false), PlateauCase::CriticalUpperChanged(1))
        } else if x.at(r - 1) == 1 {
            (endpoint(one(&s.splice(r, &k0)), false), PlateauCase::CriticalUpperChanged(2))
        } else if let Some(m) = first_descent(&x) {
            (endpoint(one(&x.splice(m, &k0)), true), PlateauCase::CriticalUpperChanged(4))
        } else {
            (endpoint(one(&x), false), PlateauCase::CriticalUpperChanged(3))
        }
    };
    Ok(Plateau {
        left,
        right: endpoint(one(s), true),
        case,
        side: PlateauSide::Upper,
        survivor,
    })
}

/// Plateau `I(b)` of the hole `(a, b)` with `a < c < b`, `a` fixed.
pub fn plateau_interior(pair: &KneadingPair, a_lower: &EpSeq, b_upper: &EpSeq) -> Result<Plateau, PlateauError> {
    let h = HoleKneading::around_critical(Some(a_lower.clone()), Some(b_upper.clone()))?;
    let Some(survivor) = prepare(pair, &h, b_upper)? else {
        return trivial(pair, &h, b_upper);
    };
    let (_, u) = h.constraint_bounds(pair);
    let (s, t) = (&survivor.s, &survivor.t);
    let r = s.per_len();

    let (left, case) = if *t == u {
        (lower_last(s, &u, &survivor)?, PlateauCase::InteriorUpperFixed)
    } else {
        let i = (1..u.orbit_len()).find(|&n| u.shift(n) < *s);
        let j = (1..u.orbit_len()).find(|&n| u.shift(n) > u);
        match (i, j) {
            (None, _) => (lower_last(s, t, &survivor)?, PlateauCase::InteriorUpperChanged(1)),
            (Some(i), Some(j)) if j < i => (lower_last(s, t, &survivor)?, PlateauCase::InteriorUpperChanged(1)),
            (Some(i), _) => {
                let x = u.shift(i);
                let eta = lower_last(s, t, &survivor)?;
                if x <= eta {
                    (eta, PlateauCase::InteriorUpperChanged(2))
                } else if x.at(r - 1) == 1 {
                    (lower_last(s, &u, &survivor)?, PlateauCase::InteriorUpperChanged(3))
                } else if let Some(m) = first_descent(&x) {
                    if x.at(m - 1) != 1 {
                        return Err(PlateauError::Internal {
                            message: format!("digit {m} of {x} is not 1"),
                            trace: survivor.flips.clone(),
                        });
                    }
                    let mut w = x.prefix(m);
                    w[m - 1] = 0;
                    (EpSeq::prepend(&w, &u), PlateauCase::InteriorUpperChanged(5))
                } else {
                    (x, PlateauCase::InteriorUpperChanged(4))
                }
            }
        }
    };
    Ok(Plateau {
        left: endpoint(one(&left), false),
        right: endpoint(one(s), true),
        case,
        side: PlateauSide::Upper,
        survivor,
    })
}

/// Plateau `I(a)` of the hole `(a, b)` with `b` fixed, via the mirror symmetry.
/// `b_upper = None` means `b = c`.
pub fn plateau_lower(pair: &KneadingPair, a_lower: &EpSeq, b_upper: Option<&EpSeq>) -> Result<Plateau, PlateauError> {
    let mpair = pair.mirror();
    let ma = a_lower.complement();
    let p = match b_upper {
        None => plateau_at_critical(&mpair, &ma)?,
        Some(b) => plateau_interior(&mpair, &b.complement(), &ma)?,
    };
    Ok(p.mirrored())
}

/// Membership of `b` in the bifurcation set: `σ(b) ⪯ σⁿ(b) ⪯ σ(a)` for all `n`.
/// `a_lower = None` means `a = c`.
pub fn in_bifurcation_set(pair: &KneadingPair, a_lower: Option<&EpSeq>, b_upper: &EpSeq) -> bool {
    let upper = a_lower.map_or_else(|| pair.k1(), |a| a.shift(1));
    within(b_upper, &b_upper.shift(1), &upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InteriorDiffers,
    RightEndpointDiffers,
    LeftEndpointDiffers,
    LeftEndpointAttained,
    BeyondRightSame,
    BelowLeftSame,
    SurvivorError,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: EpSeq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateauReport {
    pub samples: Vec<EpSeq>,
    pub violations: Vec<Violation>,
}

impl PlateauReport {
    pub fn verified(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default number of interior samples for [`verify_plateau`].
pub const DEFAULT_SAMPLES: usize = 8;

/// Checks a plateau empirically. `fixed` is the kneading sequence of the fixed
/// hole endpoint (`None` for the critical point).
pub fn verify_plateau(
    pair: &KneadingPair,
    fixed: Option<&EpSeq>,
    plateau: &Plateau,
    n_samples: usize,
) -> PlateauReport {
    if plateau.side == PlateauSide::Lower {
        let mfixed = fixed.map(EpSeq::complement);
        let mut report = verify_plateau(&pair.mirror(), mfixed.as_ref(), &plateau.mirrored(), n_samples);
        for v in report.samples.iter_mut() {
            *v = v.complement();
        }
        for v in report.violations.iter_mut() {
            v.witness = v.witness.complement();
        }
        report.violations.sort();
        return report;
    }

    let survivor_at = |b: &EpSeq| -> Option<SurvivorShift> {
        let h = HoleKneading::around_critical(fixed.cloned(), Some(b.clone())).ok()?;
        survivor_shift(&h, pair).ok()
    };
    let realizable = |z: &EpSeq| z.first() == 1 && within(z, &pair.k0(), &pair.k1());
    let base = &plateau.survivor;
    let (lo, hi) = (&plateau.left.kneading, &plateau.right.kneading);

    let samples = interior_samples(lo, hi, n_samples, &realizable);
    let mut violations: Vec<Violation> = samples
        .par_iter()
        .filter_map(|z| match survivor_at(z) {
            Some(sv) if sv == *base => None,
            Some(_) => Some(Violation { kind: ViolationKind::InteriorDiffers, witness: z.clone() }),
            None => Some(Violation { kind: ViolationKind::SurvivorError, witness: z.clone() }),
        })
        .collect();

    if survivor_at(hi).as_ref() != Some(base) {
        violations.push(Violation { kind: ViolationKind::RightEndpointDiffers, witness: hi.clone() });
    }
    if lo != hi && realizable(lo) {
        let same = survivor_at(lo).as_ref() == Some(base);
        if plateau.left.closed && !same {
            violations.push(Violation { kind: ViolationKind::LeftEndpointDiffers, witness: lo.clone() });
        } else if !plateau.left.closed && same {
            violations.push(Violation { kind: ViolationKind::LeftEndpointAttained, witness: lo.clone() });
        }
    }
    if let Some(z) = approach(hi, &EpSeq::constant(1), true, &realizable) {
        if survivor_at(&z).as_ref() == Some(base) {
            violations.push(Violation { kind: ViolationKind::BeyondRightSame, witness: z });
        }
    }
    if let Some(z) = approach(pair.kplus(), lo, false, &realizable) {
        if survivor_at(&z).as_ref() == Some(base) {
            violations.push(Violation { kind: ViolationKind::BelowLeftSame, witness: z });
        }
    }
    violations.sort();
    PlateauReport { samples, violations }
}

/// Up to `n` realizable sequences strictly between `lo` and `hi`, found by
/// breadth-first bisection.
fn interior_samples(lo: &EpSeq, hi: &EpSeq, n: usize, keep: &dyn Fn(&EpSeq) -> bool) -> Vec<EpSeq> {
    let mut out = Vec::new();
    let mut queue = std::collections::VecDeque::from([(lo.clone(), hi.clone())]);
    let mut budget = 64 * n.max(1);
    while let Some((a, b)) = queue.pop_front() {
        if out.len() >= n || budget == 0 {
            break;
        }
        budget -= 1;
        let Ok(z) = EpSeq::strictly_between(&a, &b) else { continue };
        if keep(&z) {
            out.push(z.clone());
        }
        queue.push_back((a, z.clone()));
        queue.push_back((z, b));
    }
    out.sort();
    out
}

/// A realizable sequence strictly between `lo` and `hi`, pushed towards `lo`
/// (`toward_lo`) or `hi` by repeated bisection.
fn approach(lo: &EpSeq, hi: &EpSeq, toward_lo: bool, keep: &dyn Fn(&EpSeq) -> bool) -> Option<EpSeq> {
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut best = None;
    for _ in 0..12 {
        let Ok(z) = EpSeq::strictly_between(&a, &b) else { break };
        if keep(&z) {
            best = Some(z.clone());
        }
        if toward_lo {
            b = z;
        } else {
            a = z;
        }
    }
    best
}
