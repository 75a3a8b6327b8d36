//! Survivor shifts: self-admissible truncation of the constraint bounds and
//! the digit-flip iteration that makes `(1s, 0t)` weak-admissible.

use serde::{Deserialize, Serialize};

use crate::kneading::{within, HoleKneading, KneadingError, KneadingPair};
use crate::seq::EpSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipKind {
    TruncateLower,
    TruncateUpper,
    RaiseLower,
    LowerUpper,
}

/// One step of the survivor construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flip {
    pub kind: FlipKind,
    pub position: usize,
    pub before: EpSeq,
    pub after: EpSeq,
}

/// Survivor shift `Ω(1s, 0t)`.
///
/// When `degenerate` is set the survivor set lies in `{0^∞, 1^∞}` and `s`, `t`
/// hold the bounds reached when that was detected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivorShift {
    pub s: EpSeq,
    pub t: EpSeq,
    pub degenerate: bool,
    pub flips: Vec<Flip>,
}

impl PartialEq for SurvivorShift {
    fn eq(&self, other: &Self) -> bool {
        match (self.degenerate, other.degenerate) {
            (true, true) => true,
            (false, false) => self.s == other.s && self.t == other.t,
            _ => false,
        }
    }
}

impl Eq for SurvivorShift {}

impl SurvivorShift {
    /// Membership of `w` in the survivor shift.
    pub fn contains(&self, w: &EpSeq) -> bool {
        !self.degenerate && within(w, &self.s, &self.t)
    }

    /// Ambient pair `(1s, 0t)`; `None` when degenerate.
    pub fn as_pair(&self) -> Option<KneadingPair> {
        if self.degenerate {
            return None;
        }
        KneadingPair::new(EpSeq::prepend(&[1], &self.s), EpSeq::prepend(&[0], &self.t)).ok()
    }
}

/// Smallest `m ≥ 1` with `σᵐ(x) ≺ x`, if any.
pub fn first_descent(x: &EpSeq) -> Option<usize> {
    (1..x.orbit_len()).find(|&m| x.shift(m) < *x)
}

/// Smallest `m ≥ 1` with `σᵐ(x) ≻ x`, if any.
pub fn first_ascent(x: &EpSeq) -> Option<usize> {
    (1..x.orbit_len()).find(|&m| x.shift(m) > *x)
}

/// Compares `σᵐ(w)` with `w` using only the finite word `w`; `None` if undecided.
fn shift_cmp_prefix(w: &[u8], m: usize) -> Option<std::cmp::Ordering> {
    (m..w.len()).map(|i| w[i].cmp(&w[i - m])).find(|o| o.is_ne())
}

/// [`first_descent`] for a sequence known only through the prefix `w`.
/// Every earlier shift must be decided to be larger within the prefix.
pub fn first_descent_prefix(w: &[u8]) -> Option<usize> {
    for m in 1..w.len() {
        match shift_cmp_prefix(w, m)? {
            std::cmp::Ordering::Less => return Some(m),
            _ => continue,
        }
    }
    None
}

/// [`first_ascent`] for a sequence known only through the prefix `w`.
pub fn first_ascent_prefix(w: &[u8]) -> Option<usize> {
    for m in 1..w.len() {
        match shift_cmp_prefix(w, m)? {
            std::cmp::Ordering::Greater => return Some(m),
            _ => continue,
        }
    }
    None
}

/// Self-admissible (shift-minimal) replacement for a lower bound `L`.
pub fn lower_self_admissible(l: &EpSeq) -> EpSeq {
    match first_descent(l) {
        Some(m) => EpSeq::periodic(&l.prefix(m)),
        None => l.clone(),
    }
}

/// Self-admissible (shift-maximal) replacement for an upper bound `U`.
pub fn upper_self_admissible(u: &EpSeq) -> EpSeq {
    match first_ascent(u) {
        Some(m) => EpSeq::periodic(&u.prefix(m)),
        None => u.clone(),
    }
}

/// Applies [`lower_self_admissible`] to `σ(bold-b)`.
pub fn self_admissibilize_lower(b_upper: &EpSeq) -> EpSeq {
    lower_self_admissible(&b_upper.shift(1))
}

/// Applies [`upper_self_admissible`] to `σ(bold-a)`.
pub fn self_admissibilize_upper(a_lower: &EpSeq) -> EpSeq {
    upper_self_admissible(&a_lower.shift(1))
}

/// Survivor shift of a hole, with degenerate holes mapped to a degenerate shift.
pub fn survivor_shift(h: &HoleKneading, pair: &KneadingPair) -> Result<SurvivorShift, KneadingError> {
    let (l, u) = h.constraint_bounds(pair);
    survivor_from_bounds(&l, &u)
}

/// Like [`survivor_shift`] but reports degeneracy as [`KneadingError::DegenerateHole`].
pub fn weak_admissibilize(h: &HoleKneading, pair: &KneadingPair) -> Result<SurvivorShift, KneadingError> {
    let shift = survivor_shift(h, pair)?;
    if shift.degenerate {
        return Err(KneadingError::DegenerateHole);
    }
    Ok(shift)
}

/// Survivor shift of `{w : L ⪯ σⁿ(w) ⪯ U for all n}`.
pub fn survivor_from_bounds(l: &EpSeq, u: &EpSeq) -> Result<SurvivorShift, KneadingError> {
    let mut trace = Vec::new();
    let mut s = lower_self_admissible(l);
    if s != *l {
        trace.push(Flip {
            kind: FlipKind::TruncateLower,
            position: first_descent(l).unwrap_or(0),
            before: l.clone(),
            after: s.clone(),
        });
    }
    let mut t = upper_self_admissible(u);
    if t != *u {
        trace.push(Flip {
            kind: FlipKind::TruncateUpper,
            position: first_ascent(u).unwrap_or(0),
            before: u.clone(),
            after: t.clone(),
        });
    }

    let cap = s.orbit_len() * t.orbit_len() * 4;
    let mut flips = 0usize;
    loop {
        if s.first() == 1 || t.first() == 0 || s > t {
            return Ok(SurvivorShift { s, t, degenerate: true, flips: trace });
        }
        if flips >= cap {
            return Err(KneadingError::IterationCapExceeded { cap, trace });
        }
        if let Some(p) = (1..s.orbit_len()).find(|&n| s.shift(n) > t) {
            let mut w = s.prefix(p);
            if w[p - 1] != 0 {
                return Err(internal(format!("digit {p} of {s} is not 0"), trace));
            }
            w[p - 1] = 1;
            let next = EpSeq::periodic(&w);
            trace.push(Flip { kind: FlipKind::RaiseLower, position: p, before: s, after: next.clone() });
            s = next;
        } else if let Some(q) = (1..t.orbit_len()).find(|&n| t.shift(n) < s) {
            let mut w = t.prefix(q);
            if w[q - 1] != 1 {
                return Err(internal(format!("digit {q} of {t} is not 1"), trace));
            }
            w[q - 1] = 0;
            let next = EpSeq::periodic(&w);
            trace.push(Flip { kind: FlipKind::LowerUpper, position: q, before: t, after: next.clone() });
            t = next;
        } else {
            return Ok(SurvivorShift { s, t, degenerate: false, flips: trace });
        }
        flips += 1;
    }
}

fn internal(message: String, trace: Vec<Flip>) -> KneadingError {
    KneadingError::Internal { message, trace }
}
