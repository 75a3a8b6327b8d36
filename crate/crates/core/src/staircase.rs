//! Dimension of the survivor set of `T_{β,α}` as one hole endpoint sweeps a grid.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::entropy::{dimension, shift_entropy, EntropyResult};
use crate::kneading::{HoleKneading, KneadingError, KneadingPair};
use crate::numeric::{truncate_lower_prefix, Fixed, MapParams, NumericError, Side};
use crate::plateau::{plateau_at_critical, plateau_interior, Plateau};
use crate::seq::EpSeq;
use crate::survivor::{survivor_shift, SurvivorShift};

pub const CSV_HEADER: &str = "endpoint,s,t,t0_lo,t0_hi,entropy_nats,entropy_bits,dimension,plateau_case,flags";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaircaseError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error("grid needs at least 2 points")]
    Grid,
    #[error("fixed endpoint {0} must lie left of the critical point")]
    FixedBound(String),
}

/// Which hole is swept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MovingHole {
    /// `(0, t)` for `t ∈ [0, 1]`.
    Zero,
    /// `(c, b)` for `b ∈ [c, 1]`.
    Critical,
    /// `(a, b)` for fixed `a < c` and `b ∈ [c, 1]`.
    FixedLower(String),
}

#[derive(Debug, Clone)]
pub struct StaircaseConfig {
    pub beta: String,
    pub alpha: String,
    pub hole: MovingHole,
    pub grid: usize,
    pub depth: usize,
    pub precision: usize,
}

impl StaircaseConfig {
    pub fn new(beta: &str, alpha: &str, hole: MovingHole, grid: usize) -> Self {
        StaircaseConfig {
            beta: beta.into(),
            alpha: alpha.into(),
            hole,
            grid,
            depth: 64,
            precision: crate::numeric::DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    /// No repeated orbit point; the bound was replaced by its prefix truncation.
    TruncatedBound,
    /// Neither completion nor truncation was possible; the dimension is the
    /// midpoint of the bracket given by the two extreme tails of the prefix.
    BracketedBound,
    /// No value could be computed.
    IncompleteBound,
    /// The orbit hit the critical point and was continued one-sidedly.
    CriticalHit,
    Degenerate,
    TangentialRoot,
    /// The plateau computed at this row disagrees with the row's survivor shift.
    PlateauMismatch,
    /// The map's own kneading pair did not close up; its prefixes were padded
    /// outward (`k₊` with `0^∞`, `k₋` with `1^∞`).
    PaddedAmbient,
}

impl RowFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RowFlag::TruncatedBound => "truncated_bound",
            RowFlag::BracketedBound => "bracketed_bound",
            RowFlag::IncompleteBound => "incomplete_bound",
            RowFlag::CriticalHit => "critical_hit",
            RowFlag::Degenerate => "degenerate",
            RowFlag::TangentialRoot => "tangential_root",
            RowFlag::PlateauMismatch => "plateau_mismatch",
            RowFlag::PaddedAmbient => "padded_ambient",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StaircaseRow {
    pub index: usize,
    /// Moving endpoint, 12 decimals.
    pub endpoint: String,
    /// Itinerary prefix of the moving endpoint's lower constraint.
    pub prefix: Vec<u8>,
    pub survivor: Option<SurvivorShift>,
    pub entropy: EntropyResult,
    pub dimension: f64,
    /// Lower and upper dimension bounds for bracketed rows.
    pub dimension_bracket: Option<(f64, f64)>,
    /// Plateau expressed in the coordinate of the prefix.
    pub plateau: Option<Plateau>,
    pub flags: Vec<RowFlag>,
}

#[derive(Debug, Clone)]
pub struct Staircase {
    pub pair: KneadingPair,
    pub beta: f64,
    pub rows: Vec<StaircaseRow>,
}

pub fn staircase(cfg: &StaircaseConfig) -> Result<Staircase, StaircaseError> {
    if cfg.grid < 2 {
        return Err(StaircaseError::Grid);
    }
    let p = MapParams::new(&cfg.beta, &cfg.alpha, cfg.precision)?;
    let (pair, padded) = match p.complete_kneading(cfg.depth) {
        Ok(pair) => (pair, false),
        Err(NumericError::Incomplete(_)) => {
            let pre = p.kneading_prefixes(cfg.depth);
            let kplus = EpSeq::new(pre.kplus.as_slice(), &[0]).map_err(|_| NumericError::Incomplete(cfg.depth))?;
            let kminus = EpSeq::new(pre.kminus.as_slice(), &[1]).map_err(|_| NumericError::Incomplete(cfg.depth))?;
            (KneadingPair::new(kplus, kminus)?, true)
        }
        Err(e) => return Err(e.into()),
    };
    let a_lower = match &cfg.hole {
        MovingHole::FixedLower(a) => {
            let x = p.parse(a)?;
            if x.0 >= p.c().0 {
                return Err(StaircaseError::FixedBound(a.clone()));
            }
            let seq = p
                .complete_itinerary(&x, cfg.depth, Side::Minus)
                .ok_or(NumericError::Incomplete(cfg.depth))?;
            Some(seq)
        }
        _ => None,
    };
    let beta = p.beta_f64();
    let mut rows: Vec<StaircaseRow> = (0..cfg.grid)
        .into_par_iter()
        .map(|i| row(&p, &pair, cfg, a_lower.as_ref(), i))
        .collect();
    if padded {
        for r in &mut rows {
            r.flags.push(RowFlag::PaddedAmbient);
            r.flags.sort();
        }
    }
    Ok(Staircase { pair, beta, rows })
}

fn grid_point(p: &MapParams, hole: &MovingHole, i: usize, n: usize) -> Fixed {
    let frac = p.ratio(i as u64, (n - 1) as u64);
    match hole {
        MovingHole::Zero => frac,
        _ => {
            let span = &p.one().0 - &p.c().0;
            Fixed(&p.c().0 + (span * frac.0) / &p.one().0)
        }
    }
}

fn row(p: &MapParams, pair: &KneadingPair, cfg: &StaircaseConfig, a: Option<&EpSeq>, i: usize) -> StaircaseRow {
    let x = grid_point(p, &cfg.hole, i, cfg.grid);
    let (it, _) = p.orbit(&x, cfg.depth, Side::Plus);
    let mut flags = Vec::new();
    if it.ties > 0 {
        flags.push(RowFlag::CriticalHit);
    }
    // Lower constraint L is τ(t+) for (0, t) and σ(τ(b+)) otherwise.
    let skip = usize::from(cfg.hole != MovingHole::Zero);
    let prefix = it.word.as_slice()[skip..].to_vec();
    let completed = p.complete_itinerary(&x, cfg.depth, Side::Plus).map(|s| s.shift(skip));
    let lower = completed.or_else(|| {
        let t = truncate_lower_prefix(&prefix);
        if t.is_some() {
            flags.push(RowFlag::TruncatedBound);
        }
        t
    });
    let mut out = StaircaseRow {
        index: i,
        endpoint: p.format(&x, 12),
        prefix,
        survivor: None,
        entropy: EntropyResult::zero(),
        dimension: 0.0,
        dimension_bracket: None,
        plateau: None,
        flags,
    };
    let build = |lower: EpSeq| match cfg.hole {
        MovingHole::Zero => Ok(HoleKneading::at_zero(lower)),
        MovingHole::Critical => HoleKneading::around_critical(None, Some(EpSeq::prepend(&[1], &lower))),
        MovingHole::FixedLower(_) => HoleKneading::around_critical(a.cloned(), Some(EpSeq::prepend(&[1], &lower))),
    };
    let Some(lower) = lower else {
        // Entropy is non-increasing in the lower bound, so prefix·0^∞ and
        // prefix·1^∞ bracket it.
        let dims: Vec<Option<f64>> = [0u8, 1]
            .iter()
            .map(|&tail| {
                let x = EpSeq::new(&out.prefix, &[tail]).expect("non-empty period");
                let sh = build(x).and_then(|h| survivor_shift(&h, pair)).ok()?;
                Some(dimension(p.beta_f64(), &shift_entropy(&sh)))
            })
            .collect();
        match (dims[0], dims[1]) {
            (Some(hi), Some(lo)) => {
                out.flags.push(RowFlag::BracketedBound);
                out.dimension = (hi + lo) / 2.0;
                out.dimension_bracket = Some((lo, hi));
                out.entropy.entropy = out.dimension * p.beta_f64().ln();
            }
            _ => out.flags.push(RowFlag::IncompleteBound),
        }
        out.flags.sort();
        return out;
    };
    let hole = build(lower);
    let Ok(shift) = hole.and_then(|h| survivor_shift(&h, pair)) else {
        out.flags.push(RowFlag::IncompleteBound);
        return out;
    };
    if shift.degenerate {
        out.flags.push(RowFlag::Degenerate);
    } else {
        let b = EpSeq::prepend(&[1], &shift.s);
        let plateau = match a {
            None => plateau_at_critical(pair, &b),
            Some(a) => plateau_interior(pair, a, &b),
        };
        if let Ok(pl) = plateau {
            if pl.survivor != shift {
                out.flags.push(RowFlag::PlateauMismatch);
            }
            out.plateau = Some(if cfg.hole == MovingHole::Zero { shifted(&pl) } else { pl });
        }
    }
    out.entropy = shift_entropy(&shift);
    if out.entropy.t0.as_ref().is_some_and(|r| r.tangential) {
        out.flags.push(RowFlag::TangentialRoot);
    }
    out.dimension = dimension(p.beta_f64(), &out.entropy);
    out.survivor = Some(shift);
    out.flags.sort();
    out
}

/// Re-expresses a plateau of `b` in the coordinate `σ(b)`.
fn shifted(pl: &Plateau) -> Plateau {
    let mut q = pl.clone();
    q.left.kneading = pl.left.kneading.shift(1);
    q.right.kneading = pl.right.kneading.shift(1);
    q
}

impl StaircaseRow {
    /// Whether the row's bound lies in `pl`, decided on the finite prefix alone.
    pub fn decidably_in(&self, pl: &Plateau) -> Option<bool> {
        use std::cmp::Ordering::*;
        let lo = pl.left.kneading.cmp_word(&self.prefix)?;
        let hi = pl.right.kneading.cmp_word(&self.prefix)?;
        Some(lo == Less && hi == Greater)
    }

    pub fn plateau_case(&self) -> String {
        self.plateau.as_ref().map(|p| p.case.to_string()).unwrap_or_default()
    }

    pub fn flag_string(&self) -> String {
        self.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";")
    }
}

/// Decimal with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

impl Staircase {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (s, t) = r.survivor.as_ref().map_or((String::new(), String::new()), |sh| {
                (sh.s.to_string(), sh.t.to_string())
            });
            let (lo, hi) = r.entropy.t0.as_ref().map_or((String::new(), String::new()), |b| {
                (fmt_sig(b.lo.to_f64(), 15), fmt_sig(b.hi.to_f64(), 15))
            });
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.endpoint,
                s,
                t,
                lo,
                hi,
                fmt_sig(r.entropy.entropy, 15),
                fmt_sig(r.entropy.bits(), 15),
                fmt_sig(r.dimension, 15),
                r.plateau_case(),
                r.flag_string()
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "endpoint": r.endpoint,
                    "s": r.survivor.as_ref().map(|x| x.s.to_string()),
                    "t": r.survivor.as_ref().map(|x| x.t.to_string()),
                    "t0_lo": r.entropy.t0.as_ref().map(|b| fmt_sig(b.lo.to_f64(), 15)),
                    "t0_hi": r.entropy.t0.as_ref().map(|b| fmt_sig(b.hi.to_f64(), 15)),
                    "entropy_nats": r.entropy.entropy,
                    "entropy_bits": r.entropy.bits(),
                    "dimension": r.dimension,
                    "plateau_case": r.plateau_case(),
                    "plateau": r.plateau.as_ref().map(|p| serde_json::json!({
                        "left": p.left.kneading.to_string(),
                        "left_closed": p.left.closed,
                        "right": p.right.kneading.to_string(),
                        "right_closed": p.right.closed,
                    })),
                    "flags": r.flags,
                })
            })
            .collect();
        serde_json::json!({
            "schema": SCHEMA_VERSION,
            "kplus": self.pair.kplus().to_string(),
            "kminus": self.pair.kminus().to_string(),
            "beta": self.beta,
            "rows": rows,
        })
    }
}
