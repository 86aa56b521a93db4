use std::collections::BTreeMap;

use super::{Library, TransmissionLog, UnitKind};
use crate::error::{Error, Result};
use crate::scheme::{Bits, PlacementPlan, RequestVector, SubfileId};

/// Contents of one user's cache after placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCache {
    pub user: usize,
    pub entries: BTreeMap<SubfileId, Bits>,
}

pub fn fill_cache(plan: &PlacementPlan, library: &Library, user: usize) -> UserCache {
    let entries = plan.cache_assignment[user]
        .iter()
        .map(|&id| (id, library.subfile(plan, id).to_bitvec()))
        .collect();
    UserCache { user, entries }
}

/// Concatenates chunks `(offset, bits)` into one piece of `len` bits,
/// failing on any gap or overlap.
fn assemble(user: usize, what: &str, mut chunks: Vec<(u64, &Bits)>, len: u64) -> Result<Bits> {
    chunks.sort_by_key(|c| c.0);
    let mut out = Bits::with_capacity(len as usize);
    for (offset, bits) in chunks {
        if offset != out.len() as u64 {
            return Err(Error::MissingUnit { user, what: format!("{what} bits {}..{offset}", out.len()) });
        }
        out.extend_from_bitslice(bits);
    }
    if out.len() as u64 != len {
        return Err(Error::MissingUnit { user, what: format!("{what} bits {}..{len}", out.len()) });
    }
    Ok(out)
}

/// Rebuilds `W_{R_k}` as segments `0..K` (own segment from the cache, the
/// rest from XORs), then the private part, then the common part.
pub fn decode_user(
    user: usize,
    cache: &UserCache,
    log: &TransmissionLog,
    plan: &PlacementPlan,
    requests: &RequestVector,
) -> Result<Bits> {
    let k = plan.users();
    let want = requests.file_of(user);
    let mut segments: Vec<Option<Bits>> = vec![None; k];
    let own = SubfileId { file: want, segment: user };
    segments[user] = Some(
        cache
            .entries
            .get(&own)
            .cloned()
            .ok_or_else(|| Error::MissingUnit { user, what: format!("cached subfile {own:?}") })?,
    );

    let mut private = Vec::new();
    let mut common = Vec::new();
    for unit in &log.units {
        match &unit.kind {
            UnitKind::XorMulticast { pair, components, payload } => {
                let (wanted, companion) = if pair.0 == user {
                    (components[0], components[1])
                } else if pair.1 == user {
                    (components[1], components[0])
                } else {
                    continue;
                };
                let side = cache.entries.get(&companion).ok_or_else(|| Error::MissingUnit {
                    user,
                    what: format!("companion {companion:?} for XOR {pair:?}"),
                })?;
                let mut bits = payload.clone();
                bits ^= side.as_bitslice();
                segments[wanted.segment] = Some(bits);
            }
            UnitKind::ZfPrivate { user: u, offset, payload } if *u == user => private.push((*offset, payload)),
            UnitKind::MatCommon { user: u, offset, payload } if *u == user => common.push((*offset, payload)),
            _ => {}
        }
    }

    let mut out = Bits::with_capacity(plan.file_bits as usize);
    for (segment, bits) in segments.into_iter().enumerate() {
        match bits {
            Some(bits) => out.extend_from_bitslice(&bits),
            None if plan.subfile_bits == 0 => {}
            None => return Err(Error::MissingUnit { user, what: format!("segment {segment} of file {want}") }),
        }
    }
    out.extend_from_bitslice(&assemble(user, "private", private, log.private_bits)?);
    out.extend_from_bitslice(&assemble(user, "common", common, log.common_bits)?);
    debug_assert_eq!(out.len() as u64, plan.file_bits);
    Ok(out)
}
