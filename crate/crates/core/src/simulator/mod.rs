//! Bit-exact run of the first-branch scheme over a lossless scheduled pipe.
//!
//! Library bits come from SplitMix64 (Vigna's 64-bit mixer) seeded with the
//! run seed. Files are filled in order `0..N`; each file takes
//! `ceil(f / 64)` consecutive outputs, each output contributing its bits
//! most-significant first, and unused bits of the last output are dropped.
//! The first three outputs for seed 0 are `0xe220a8397b1dcdaf`,
//! `0x6e789e6aa1b965f4` and `0x06c45d188009454f`.

mod decode;
mod transmission;
mod verify;

use bitvec::prelude::*;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::Result;
use crate::params::SystemParams;
use crate::scheme::{Bits, PlacementPlan, SubfileId, UncachedSplit};

pub use decode::{decode_user, fill_cache, UserCache};
pub use transmission::{run_delivery, DeliveredUnit, TransmissionLog, UnitKind};
pub use verify::{simulate, verify_all, SimReport, UserVerdict};

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    seed: u64,
    files: Vec<Bits>,
}

pub fn generate_library(params: &SystemParams, seed: u64) -> Result<Library> {
    let f = params.file_size()? as usize;
    let mut rng = rng(seed);
    let files = (0..params.n())
        .map(|_| {
            let mut bits = Bits::with_capacity(f.next_multiple_of(64));
            while bits.len() < f {
                bits.extend_from_bitslice(rng.next_u64().view_bits::<Msb0>());
            }
            bits.truncate(f);
            bits
        })
        .collect();
    Ok(Library { seed, files })
}

impl Library {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn file(&self, n: u64) -> &BitSlice<u8, Msb0> {
        &self.files[n as usize]
    }

    pub fn subfile(&self, plan: &PlacementPlan, id: SubfileId) -> &BitSlice<u8, Msb0> {
        &self.file(id.file)[plan.segment_range(id.segment)]
    }

    /// The zero-forced piece, right after the cached part.
    pub fn private_part(&self, plan: &PlacementPlan, split: &UncachedSplit, n: u64) -> &BitSlice<u8, Msb0> {
        let start = plan.cached_part_bits as usize;
        &self.file(n)[start..start + split.p_bits as usize]
    }

    /// The common-stream piece, at the end of the file.
    pub fn common_part(&self, plan: &PlacementPlan, split: &UncachedSplit, n: u64) -> &BitSlice<u8, Msb0> {
        let start = (plan.cached_part_bits + split.p_bits) as usize;
        &self.file(n)[start..start + split.pbar_bits as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn splitmix_vectors() {
        let mut r = rng(0);
        assert_eq!(r.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(r.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(r.next_u64(), 0x06c45d188009454f);
    }

    #[test]
    fn library_shape_and_bit_order() {
        let p = SystemParams::new(4, 8, int(1), Some(96)).unwrap();
        let lib = generate_library(&p, 0).unwrap();
        assert_eq!(lib.len(), 8);
        assert!((0..8).all(|n| lib.file(n).len() == 96));
        // 0xe2 = 1110_0010
        let head: Vec<bool> = lib.file(0)[..8].iter().by_vals().collect();
        assert_eq!(head, [true, true, true, false, false, false, true, false]);
        // file 1 starts on the third output
        assert_eq!(lib.file(1)[..8].load_be::<u8>(), 0x06);
    }

    #[test]
    fn library_determinism() {
        let p = SystemParams::new(4, 8, int(1), Some(96)).unwrap();
        assert_eq!(generate_library(&p, 0).unwrap(), generate_library(&p, 0).unwrap());
        assert_ne!(generate_library(&p, 0).unwrap().files, generate_library(&p, 1).unwrap().files);
        assert!(generate_library(&SystemParams::new(4, 8, int(1), None).unwrap(), 0).is_err());
    }
}
