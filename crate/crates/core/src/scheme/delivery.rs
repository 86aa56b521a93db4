use num::{One, Signed};
use rand_core::RngCore;
use serde::Serialize;

use super::{placement::SubfileId, serialize_bits, Bits, PlacementPlan};
use crate::analysis::Alpha;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, int, Rational};
use crate::simulator::Library;

/// File requested by each user. Repeats are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RequestVector(Vec<u64>);

impl RequestVector {
    pub fn new(params: &SystemParams, files: Vec<u64>) -> Result<Self> {
        if files.len() as u64 != params.k() {
            return Err(Error::InvalidRequests(format!(
                "expected {} requests, got {}",
                params.k(),
                files.len()
            )));
        }
        if let Some(bad) = files.iter().find(|&&n| n >= params.n()) {
            return Err(Error::InvalidRequests(format!(
                "file index {bad} outside 0..{}",
                params.n()
            )));
        }
        Ok(RequestVector(files))
    }

    /// User `k` asks for file `k`.
    pub fn distinct(params: &SystemParams) -> Self {
        RequestVector((0..params.k()).collect())
    }

    pub fn random<R: RngCore>(params: &SystemParams, rng: &mut R) -> Self {
        RequestVector((0..params.k()).map(|_| rng.next_u64() % params.n()).collect())
    }

    pub fn file_of(&self, user: usize) -> u64 {
        self.0[user]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sizes of the two never-cached pieces of each requested file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UncachedSplit {
    /// `alpha f T`, sent by zero-forcing.
    pub p_bits: u64,
    /// `f (1 - Gamma - alpha T)`, sent on the common streams.
    pub pbar_bits: u64,
}

pub fn split_uncached(params: &SystemParams, alpha: &Alpha, t: &Rational) -> Result<UncachedSplit> {
    let f = params.file_size()?;
    let p = alpha.value() * t * int(f);
    let pbar = (Rational::one() - params.big_gamma()) * int(f) - &p;
    if pbar.is_negative() {
        return Err(Error::Precondition(format!(
            "common part f(1 - Gamma - alpha T) = {} is negative; alpha is outside the first-branch regime",
            rational::fmt_rational(&pbar)
        )));
    }
    if !rational::is_integer(&p) {
        return Err(Error::Indivisible {
            f,
            base: p.denom().try_into().unwrap_or(u64::MAX),
            detail: format!("alpha f T = {}", rational::fmt_rational(&p)),
        });
    }
    if !rational::is_integer(&pbar) {
        return Err(Error::Indivisible {
            f,
            base: pbar.denom().try_into().unwrap_or(u64::MAX),
            detail: format!("f(1 - Gamma - alpha T) = {}", rational::fmt_rational(&pbar)),
        });
    }
    Ok(UncachedSplit {
        p_bits: rational::floor_u64(&p).expect("non-negative"),
        pbar_bits: rational::floor_u64(&pbar).expect("non-negative"),
    })
}

/// `W^c_{R_a, b} xor W^c_{R_b, a}` for users `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XorMessage {
    pub pair: (usize, usize),
    /// `components[0]` is wanted by `pair.0`, `components[1]` by `pair.1`.
    pub components: [SubfileId; 2],
    #[serde(serialize_with = "serialize_bits")]
    pub payload: Bits,
}

impl XorMessage {
    /// Component wanted by `user`, and the companion it already caches.
    pub fn parts_for(&self, user: usize) -> Option<(SubfileId, SubfileId)> {
        match user {
            u if u == self.pair.0 => Some((self.components[0], self.components[1])),
            u if u == self.pair.1 => Some((self.components[1], self.components[0])),
            _ => None,
        }
    }
}

/// All `C(K, 2)` order-2 XORs, pairs in lexicographic order.
pub fn build_xor_set(plan: &PlacementPlan, requests: &RequestVector, library: &Library) -> Vec<XorMessage> {
    let k = plan.users();
    let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let left = SubfileId { file: requests.file_of(a), segment: b };
            let right = SubfileId { file: requests.file_of(b), segment: a };
            let mut payload = library.subfile(plan, left).to_bitvec();
            payload ^= library.subfile(plan, right);
            out.push(XorMessage { pair: (a, b), components: [left, right], payload });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::scheme::build_placement;
    use crate::simulator::generate_library;

    fn params(k: u64, n: u64, m: u64, f: u64) -> SystemParams {
        SystemParams::new(k, n, int(m), Some(f)).unwrap()
    }

    #[test]
    fn split_sizes() {
        let p = params(4, 8, 1, 96);
        let s = split_uncached(&p, &Alpha::zero(), &ratio(19, 12)).unwrap();
        assert_eq!(s, UncachedSplit { p_bits: 0, pbar_bits: 48 });
        let a = Alpha::new(ratio(12, 25)).unwrap();
        let s = split_uncached(&p, &a, &ratio(25, 24)).unwrap();
        assert_eq!(s, UncachedSplit { p_bits: 48, pbar_bits: 0 });
        let s = split_uncached(&params(4, 8, 0, 96), &Alpha::zero(), &ratio(25, 12)).unwrap();
        assert_eq!(s, UncachedSplit { p_bits: 0, pbar_bits: 96 });
    }

    #[test]
    fn split_rejects_overload() {
        let p = params(4, 8, 1, 96);
        let a = Alpha::new(ratio(3, 5)).unwrap();
        assert!(matches!(split_uncached(&p, &a, &ratio(19, 12)), Err(Error::Precondition(_))));
        let a = Alpha::new(ratio(1, 7)).unwrap();
        assert!(matches!(split_uncached(&p, &a, &ratio(1, 1)), Err(Error::Indivisible { .. })));
    }

    #[test]
    fn requests() {
        let p = params(4, 8, 1, 96);
        assert!(RequestVector::new(&p, vec![0, 1, 2]).is_err());
        assert!(RequestVector::new(&p, vec![0, 1, 2, 8]).is_err());
        let r = RequestVector::new(&p, vec![3, 3, 3, 3]).unwrap();
        assert_eq!(r.file_of(2), 3);
        assert_eq!(RequestVector::distinct(&p).as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn xor_set_shape() {
        let p = params(4, 8, 1, 96);
        let plan = build_placement(&p).unwrap();
        let lib = generate_library(&p, 5).unwrap();
        let xs = build_xor_set(&plan, &RequestVector::distinct(&p), &lib);
        assert_eq!(xs.len(), 6);
        for user in 0..4 {
            assert_eq!(xs.iter().filter(|x| x.parts_for(user).is_some()).count(), 3);
        }
        for x in &xs {
            assert_eq!(x.payload.len(), 12);
            let (a, b) = x.pair;
            assert!(a < b);
            let mut expect = lib.subfile(&plan, SubfileId { file: a as u64, segment: b }).to_bitvec();
            expect ^= lib.subfile(&plan, SubfileId { file: b as u64, segment: a });
            assert_eq!(x.payload, expect);
        }
    }

    #[test]
    fn xor_set_same_file_and_two_users() {
        let p = params(4, 8, 1, 96);
        let plan = build_placement(&p).unwrap();
        let lib = generate_library(&p, 9).unwrap();
        let same = RequestVector::new(&p, vec![5; 4]).unwrap();
        for x in build_xor_set(&plan, &same, &lib) {
            let (k, i) = x.pair;
            let mut expect = lib.subfile(&plan, SubfileId { file: 5, segment: i }).to_bitvec();
            expect ^= lib.subfile(&plan, SubfileId { file: 5, segment: k });
            assert_eq!(x.payload, expect);
        }

        let p = params(2, 2, 1, 4);
        let plan = build_placement(&p).unwrap();
        let lib = generate_library(&p, 1).unwrap();
        let xs = build_xor_set(&plan, &RequestVector::distinct(&p), &lib);
        assert_eq!(xs.len(), 1);
        assert_eq!(xs[0].components, [SubfileId { file: 0, segment: 1 }, SubfileId { file: 1, segment: 0 }]);
    }
}
