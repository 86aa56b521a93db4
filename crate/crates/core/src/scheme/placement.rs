use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, int};

/// Segment `segment` of file `file`, i.e. `W^c_{file, segment}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SubfileId {
    pub file: u64,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementPlan {
    pub params: SystemParams,
    pub file_bits: u64,
    /// `gamma f`
    pub subfile_bits: u64,
    /// `Gamma f`
    pub cached_part_bits: u64,
    /// `(1 - Gamma) f`
    pub uncached_part_bits: u64,
    /// `cache_assignment[k]` lists `(n, k)` for every file `n`.
    pub cache_assignment: Vec<Vec<SubfileId>>,
}

impl PlacementPlan {
    pub fn users(&self) -> usize {
        self.cache_assignment.len()
    }

    pub fn cache_load_bits(&self, user: usize) -> u64 {
        self.cache_assignment[user].len() as u64 * self.subfile_bits
    }

    pub fn segment_range(&self, segment: usize) -> Range<usize> {
        let len = self.subfile_bits as usize;
        segment * len..(segment + 1) * len
    }

    pub fn uncached_range(&self) -> Range<usize> {
        self.cached_part_bits as usize..self.file_bits as usize
    }
}

/// Placement with no overlap between caches: user `k` stores segment `k` of
/// every file.
pub fn build_placement(params: &SystemParams) -> Result<PlacementPlan> {
    if !params.is_small_cache() {
        return Err(Error::Precondition("placement needs Gamma <= 1".into()));
    }
    let f = params.file_size()?;
    let sub = params.gamma() * int(f);
    if !rational::is_integer(&sub) {
        let base = params.gamma().denom().clone();
        let base: u64 = base.try_into().unwrap_or(u64::MAX);
        return Err(Error::Indivisible {
            f,
            base,
            detail: format!("gamma f = {}", rational::fmt_rational(&sub)),
        });
    }
    let subfile_bits = rational::floor_u64(&sub).expect("non-negative");
    let k = params.k() as usize;
    let cached_part_bits = subfile_bits * k as u64;
    let cache_assignment = (0..k)
        .map(|segment| (0..params.n()).map(|file| SubfileId { file, segment }).collect())
        .collect();
    Ok(PlacementPlan {
        params: params.clone(),
        file_bits: f,
        subfile_bits,
        cached_part_bits,
        uncached_part_bits: f - cached_part_bits,
        cache_assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn plan(k: u64, n: u64, m: u64, f: u64) -> Result<PlacementPlan> {
        build_placement(&SystemParams::new(k, n, int(m), Some(f)).unwrap())
    }

    #[test]
    fn k4_sizes() {
        let p = plan(4, 8, 1, 96).unwrap();
        assert_eq!(p.subfile_bits, 12);
        assert_eq!(p.cached_part_bits, 48);
        assert_eq!(p.uncached_part_bits, 48);
        for k in 0..4 {
            assert_eq!(p.cache_load_bits(k), 96);
        }
    }

    #[test]
    fn caches_are_disjoint_and_within_budget() {
        let p = plan(5, 10, 2, 50).unwrap();
        let mut seen = HashSet::new();
        for (k, cache) in p.cache_assignment.iter().enumerate() {
            assert_eq!(p.cache_load_bits(k), 2 * 50);
            for id in cache {
                assert!(seen.insert(*id), "{id:?} cached twice");
                assert_eq!(id.segment, k);
            }
        }
    }

    #[test]
    fn no_cache() {
        let p = plan(4, 8, 0, 96).unwrap();
        assert_eq!(p.subfile_bits, 0);
        assert_eq!(p.uncached_part_bits, 96);
        assert_eq!(p.cache_load_bits(0), 0);
    }

    #[test]
    fn indivisible_file_size() {
        match plan(4, 8, 1, 100) {
            Err(Error::Indivisible { base, .. }) => assert_eq!(base, 8),
            other => panic!("{other:?}"),
        }
        assert!(build_placement(&SystemParams::new(4, 8, int(1), None).unwrap()).is_err());
        assert!(build_placement(&SystemParams::new(4, 4, int(2), Some(8)).unwrap()).is_err());
    }
}
