//! The small-cache scheme for `alpha <= alpha_b1`: disjoint placement of
//! `Gamma f` bits per file, an order-2 XOR set over all user pairs, and a
//! `2K - 1` phase schedule.
//!
//! File layout used throughout (bit offsets within `W_n`):
//!
//! ```text
//! [ seg 0 | seg 1 | ... | seg K-1 | private (alpha f T) | common (f(1 - Gamma - alpha T)) ]
//!   <- gamma f each, cached ->       <------------- never cached ------------------->
//! ```
//!
//! Segment `k` of every file lives in user `k`'s cache. Users and files are
//! 0-based.

mod coverage;
mod delivery;
mod placement;
mod schedule;

use bitvec::prelude::*;
use serde::Serializer;

pub use coverage::{coverage_ledger, CoverageReport, UserCoverage};
pub use delivery::{build_xor_set, split_uncached, RequestVector, UncachedSplit, XorMessage};
pub use placement::{build_placement, PlacementPlan, SubfileId};
pub use schedule::{build_phase_schedule, suggest_file_size, PayloadClass, Phase, PhaseSchedule};

pub type Bits = BitVec<u8, Msb0>;

/// Hex of the bit string, MSB first, zero-padded to whole bytes.
pub fn to_hex(bits: &BitSlice<u8, Msb0>) -> String {
    let mut owned: Bits = bits.to_bitvec();
    owned.set_uninitialized(false);
    owned.as_raw_slice().iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn serialize_bits<S: Serializer>(bits: &Bits, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_hex(bits))
}
