//! Exact symbolic dynamics of expansive Lorenz maps with a hole at the critical point.
//!
//! Sequences are eventually periodic and handled exactly ([`seq::EpSeq`]).
//! From a kneading pair and a hole the crate builds the survivor shift,
//! its plateau, its entropy and, for intermediate β-transformations, the
//! Hausdorff dimension of the survivor set.

pub mod entropy;
pub mod numeric;
pub mod kneading;
pub mod oracle;
pub mod plateau;
pub mod poly;
pub mod seq;
pub mod staircase;
pub mod survivor;

pub use kneading::{Admissibility, HoleAnchor, HoleKneading, KneadingError, KneadingPair};
pub use seq::{EpSeq, SeqError, Word};
pub use survivor::{survivor_from_bounds, survivor_shift, weak_admissibilize, Flip, FlipKind, SurvivorShift};
