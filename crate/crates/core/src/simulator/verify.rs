use serde::Serialize;

use super::{decode_user, fill_cache, generate_library, run_delivery, TransmissionLog};
use crate::analysis::{achievable_t_small, Alpha};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, Rational};
use crate::scheme::{
    build_phase_schedule, build_placement, coverage_ledger, split_uncached, suggest_file_size, to_hex, CoverageReport,
    RequestVector,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserVerdict {
    pub user: usize,
    pub requested: u64,
    pub matched: bool,
    pub decoded_hex: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub params: SystemParams,
    pub alpha: Alpha,
    pub seed: u64,
    pub requests: RequestVector,
    pub users: Vec<UserVerdict>,
    #[serde(with = "rational::serde_rational")]
    pub airtime: Rational,
    #[serde(with = "rational::serde_rational")]
    pub theorem_t: Rational,
    pub airtime_matches: bool,
    pub xor_units: usize,
    pub common_units: usize,
    pub zf_units: usize,
    pub coverage: CoverageReport,
    pub success: bool,
}

/// Runs placement, delivery and decoding once. Requests default to user
/// `k` asking for file `k`.
pub fn simulate(
    params: &SystemParams,
    alpha: &Alpha,
    seed: u64,
    requests: Option<RequestVector>,
) -> Result<(SimReport, TransmissionLog)> {
    let f = params.file_size()?;
    let base = suggest_file_size(params, alpha)?;
    if f % base != 0 {
        let t = achievable_t_small(params, alpha)?.0;
        let private = t.exact().map(|t| alpha.value() * t).unwrap_or_default();
        return Err(Error::Indivisible {
            f,
            base,
            detail: format!(
                "needs whole gamma f and alpha T f with gamma = {}, alpha T = {}",
                rational::fmt_rational(params.gamma()),
                rational::fmt_rational(&private)
            ),
        });
    }
    let requests = requests.unwrap_or_else(|| RequestVector::distinct(params));
    if requests.len() as u64 != params.k() {
        return Err(Error::InvalidRequests(format!("expected {} requests, got {}", params.k(), requests.len())));
    }

    let plan = build_placement(params)?;
    let schedule = build_phase_schedule(params, alpha)?;
    let split = split_uncached(params, alpha, &schedule.total)?;
    let library = generate_library(params, seed)?;
    let log = run_delivery(&plan, &schedule, &split, &library, &requests)?;
    let coverage = coverage_ledger(&plan, &schedule, &split, &requests);

    let users = (0..plan.users())
        .map(|user| {
            let cache = fill_cache(&plan, &library, user);
            let decoded = decode_user(user, &cache, &log, &plan, &requests)?;
            let requested = requests.file_of(user);
            Ok(UserVerdict {
                user,
                requested,
                matched: decoded.as_bitslice() == library.file(requested),
                decoded_hex: to_hex(&decoded),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let theorem_t = achievable_t_small(params, alpha)?
        .0
        .exact()
        .cloned()
        .ok_or_else(|| Error::Precondition("simulation needs exact arithmetic".into()))?;
    let airtime = schedule.total.clone();
    let airtime_matches = airtime == theorem_t;
    let success = airtime_matches && coverage.is_complete() && users.iter().all(|u| u.matched);
    let report = SimReport {
        params: params.clone(),
        alpha: alpha.clone(),
        seed,
        requests,
        users,
        airtime,
        theorem_t,
        airtime_matches,
        xor_units: log.count("XOR"),
        common_units: log.count("MAT"),
        zf_units: log.count("ZF"),
        coverage,
        success,
    };
    Ok((report, log))
}

pub fn verify_all(params: &SystemParams, alpha: &Alpha, seed: u64, requests: Option<RequestVector>) -> Result<SimReport> {
    simulate(params, alpha, seed, requests).map(|(report, _)| report)
}
