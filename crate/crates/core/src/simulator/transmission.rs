use std::fmt::Write as _;

use serde::Serialize;

use super::Library;
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};
use crate::scheme::{build_xor_set, serialize_bits, Bits, PhaseSchedule, PlacementPlan, RequestVector, SubfileId, UncachedSplit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum UnitKind {
    XorMulticast {
        pair: (usize, usize),
        components: [SubfileId; 2],
        #[serde(serialize_with = "serialize_bits")]
        payload: Bits,
    },
    /// Chunk of user's common part starting at bit `offset`.
    MatCommon {
        user: usize,
        offset: u64,
        #[serde(serialize_with = "serialize_bits")]
        payload: Bits,
    },
    /// Chunk of user's private part starting at bit `offset`.
    ZfPrivate {
        user: usize,
        offset: u64,
        #[serde(serialize_with = "serialize_bits")]
        payload: Bits,
    },
}

impl UnitKind {
    pub fn tag(&self) -> &'static str {
        match self {
            UnitKind::XorMulticast { .. } => "XOR",
            UnitKind::MatCommon { .. } => "MAT",
            UnitKind::ZfPrivate { .. } => "ZF",
        }
    }

    pub fn payload(&self) -> &Bits {
        match self {
            UnitKind::XorMulticast { payload, .. }
            | UnitKind::MatCommon { payload, .. }
            | UnitKind::ZfPrivate { payload, .. } => payload,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeliveredUnit {
    pub phase: usize,
    #[serde(with = "rational::serde_rational")]
    pub start: Rational,
    #[serde(with = "rational::serde_rational")]
    pub end: Rational,
    #[serde(flatten)]
    pub kind: UnitKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransmissionLog {
    pub k: usize,
    pub private_bits: u64,
    pub common_bits: u64,
    pub units: Vec<DeliveredUnit>,
}

impl TransmissionLog {
    pub fn count(&self, tag: &str) -> usize {
        self.units.iter().filter(|u| u.kind.tag() == tag).count()
    }

    pub fn bits(&self, tag: &str) -> u64 {
        self.units.iter().filter(|u| u.kind.tag() == tag).map(|u| u.kind.payload().len() as u64).sum()
    }

    /// One unit per line: `phase tag users bits offset`, tab separated.
    /// XOR offsets count bits into the phase, the others count bits into
    /// the user's piece of its file.
    pub fn trace(&self) -> String {
        let mut out = String::from("# phase\ttag\tusers\tbits\toffset\n");
        let mut xor_offset = 0;
        for u in &self.units {
            let bits = u.kind.payload().len();
            let (users, offset) = match &u.kind {
                UnitKind::XorMulticast { pair, .. } => {
                    let at = xor_offset;
                    xor_offset += bits as u64;
                    (format!("{}+{}", pair.0, pair.1), at)
                }
                UnitKind::MatCommon { user, offset, .. } | UnitKind::ZfPrivate { user, offset, .. } => {
                    (user.to_string(), *offset)
                }
            };
            let _ = writeln!(out, "{}\t{}\t{users}\t{bits}\t{offset}", u.phase, u.kind.tag());
        }
        out
    }
}

/// Packs units back to back on a pipe of `rate` bits per slot starting at
/// the phase start.
struct Pipe<'a> {
    phase: usize,
    start: &'a Rational,
    end: Rational,
    rate: Rational,
    used: u64,
}

impl Pipe<'_> {
    fn place(&mut self, bits: u64) -> Result<(Rational, Rational)> {
        let from = self.start + int(self.used) / &self.rate;
        self.used += bits;
        let to = self.start + int(self.used) / &self.rate;
        if to > self.end {
            return Err(Error::RateBudget {
                phase: self.phase,
                detail: format!("{} bits exceed the phase budget", self.used),
            });
        }
        Ok((from, to))
    }
}

fn require_full(phase: usize, what: &str, used: u64, capacity: &Rational) -> Result<()> {
    if int(used) != *capacity {
        return Err(Error::RateBudget {
            phase,
            detail: format!("{what}: {used} bits sent, budget {}", rational::fmt_rational(capacity)),
        });
    }
    Ok(())
}

/// Lays every unit on the schedule. XORs go out in phase 1 in pair order,
/// common parts in phase K in user order, and each user's private part is
/// spread over all phases, phase `j` carrying bits up to
/// `floor(alpha f * end_j)`.
pub fn run_delivery(
    plan: &PlacementPlan,
    schedule: &PhaseSchedule,
    split: &UncachedSplit,
    library: &Library,
    requests: &RequestVector,
) -> Result<TransmissionLog> {
    let f = plan.file_bits;
    let k = plan.users();
    let fi = int(f);
    let mut units = Vec::new();
    let mut zf_sent = 0u64;

    for phase in &schedule.phases {
        let j = phase.index;
        let rate = int(phase.streams) * &schedule.common_rate * &fi;
        let mut pipe = Pipe { phase: j, start: &phase.start, end: phase.end(), rate, used: 0 };

        if j == 1 {
            for x in build_xor_set(plan, requests, library) {
                if x.payload.is_empty() {
                    continue;
                }
                let (start, end) = pipe.place(x.payload.len() as u64)?;
                units.push(DeliveredUnit {
                    phase: j,
                    start,
                    end,
                    kind: UnitKind::XorMulticast { pair: x.pair, components: x.components, payload: x.payload },
                });
            }
            require_full(j, "XOR load", pipe.used, &schedule.common_capacity_bits(j, f))?;
        } else if j == k {
            for user in 0..k {
                let payload = library.common_part(plan, split, requests.file_of(user)).to_bitvec();
                if payload.is_empty() {
                    continue;
                }
                let (start, end) = pipe.place(payload.len() as u64)?;
                units.push(DeliveredUnit { phase: j, start, end, kind: UnitKind::MatCommon { user, offset: 0, payload } });
            }
            require_full(j, "common load", pipe.used, &schedule.common_capacity_bits(j, f))?;
        }

        let by_end = schedule.zf_capacity_bits(f, &phase.end());
        let target = rational::floor_u64(&by_end).unwrap_or(0).min(split.p_bits);
        if target > zf_sent {
            for user in 0..k {
                let piece = library.private_part(plan, split, requests.file_of(user));
                let payload = piece[zf_sent as usize..target as usize].to_bitvec();
                units.push(DeliveredUnit {
                    phase: j,
                    start: phase.start.clone(),
                    end: phase.end(),
                    kind: UnitKind::ZfPrivate { user, offset: zf_sent, payload },
                });
            }
            zf_sent = target;
        }
    }

    let last = schedule.phases.len();
    require_full(last, "ZF load per user", zf_sent, &schedule.zf_capacity_bits(f, &schedule.total))?;
    if split.p_bits != zf_sent {
        return Err(Error::RateBudget { phase: last, detail: format!("private part {} bits, sent {zf_sent}", split.p_bits) });
    }

    Ok(TransmissionLog { k, private_bits: split.p_bits, common_bits: split.pbar_bits, units })
}
