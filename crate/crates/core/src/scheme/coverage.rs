use std::collections::BTreeSet;

use num::Zero;
use serde::Serialize;

use super::{PlacementPlan, PhaseSchedule, RequestVector, SubfileId, UncachedSplit};
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserCoverage {
    pub user: usize,
    pub bits_from_own_cache: u64,
    pub bits_from_xors: u64,
    pub bits_from_zf: u64,
    pub bits_from_mat_common: u64,
    pub total: u64,
}

/// Where each bit of every requested file comes from, plus anything that
/// does not add up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub file_bits: u64,
    pub users: Vec<UserCoverage>,
    pub violations: Vec<String>,
}

impl CoverageReport {
    pub fn is_complete(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn coverage_ledger(
    plan: &PlacementPlan,
    schedule: &PhaseSchedule,
    split: &UncachedSplit,
    requests: &RequestVector,
) -> CoverageReport {
    let f = plan.file_bits;
    let k = plan.users();
    let mut violations = Vec::new();

    if requests.len() != k {
        violations.push(format!("{} requests for {k} users", requests.len()));
    }
    if schedule.k as usize != k {
        violations.push(format!("schedule built for K={} but plan has K={k}", schedule.k));
    }

    let caches: Vec<BTreeSet<SubfileId>> =
        plan.cache_assignment.iter().map(|c| c.iter().copied().collect()).collect();
    for (user, cache) in caches.iter().enumerate() {
        if plan.cache_load_bits(user) != plan.params.n() * plan.subfile_bits {
            violations.push(format!("user {user}: cache load {} bits", plan.cache_load_bits(user)));
        }
        for other in caches.iter().skip(user + 1) {
            if cache.intersection(other).next().is_some() {
                violations.push(format!("user {user}: cache overlaps another cache"));
            }
        }
    }

    let users = (0..k.min(requests.len()))
        .map(|user| {
            let own = SubfileId { file: requests.file_of(user), segment: user };
            if !caches[user].contains(&own) {
                violations.push(format!("user {user}: own subfile {own:?} not cached"));
            }
            let mut xor_bits = 0;
            for other in (0..k).filter(|&i| i != user) {
                let companion = SubfileId { file: requests.file_of(other), segment: user };
                if caches[user].contains(&companion) {
                    xor_bits += plan.subfile_bits;
                } else {
                    violations.push(format!("user {user}: companion {companion:?} of XOR with {other} not cached"));
                }
            }
            let row = UserCoverage {
                user,
                bits_from_own_cache: plan.subfile_bits,
                bits_from_xors: xor_bits,
                bits_from_zf: split.p_bits,
                bits_from_mat_common: split.pbar_bits,
                total: plan.subfile_bits + xor_bits + split.p_bits + split.pbar_bits,
            };
            if row.total != f {
                violations.push(format!("user {user}: {} of {f} bits covered", row.total));
            }
            row
        })
        .collect();

    if schedule.k as usize == k && k >= 2 {
        let k64 = k as u64;
        let xor_load = int(k64 * (k64 - 1) / 2 * plan.subfile_bits);
        let cap = schedule.common_capacity_bits(1, f);
        if xor_load != cap {
            violations.push(format!(
                "phase 1: {} XOR bits against capacity {}",
                rational::fmt_rational(&xor_load),
                rational::fmt_rational(&cap)
            ));
        }
        let common_load = int(k64 * split.pbar_bits);
        let cap = schedule.common_capacity_bits(k, f);
        if common_load != cap {
            violations.push(format!(
                "phase {k}: {} common bits against capacity {}",
                rational::fmt_rational(&common_load),
                rational::fmt_rational(&cap)
            ));
        }
        let zf_cap = schedule.zf_capacity_bits(f, &schedule.total);
        if int(split.p_bits) != zf_cap {
            violations.push(format!(
                "ZF: {} bits per user against capacity {}",
                split.p_bits,
                rational::fmt_rational(&zf_cap)
            ));
        }
        if schedule.phases.iter().any(|p| p.duration < Rational::zero()) {
            violations.push("negative phase duration".into());
        }
    }

    CoverageReport { file_bits: f, users, violations }
}
