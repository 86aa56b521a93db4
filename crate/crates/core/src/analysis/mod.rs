//! Closed-form delivery times, CSIT breakpoints, the converse bound, gap
//! ratios and the audits built on them.
//!
//! Every formula is generic over [`Scalar`](crate::scalar::Scalar): instances
//! with `K <= EXACT_LIMIT` are evaluated in exact rationals, larger ones in
//! `f64`. The cumulative cache size `Gamma = K M / N` selects between the
//! small-cache piecewise expression (`Gamma <= 1`) and the large-cache one.

mod asymptotic;
mod audit;
mod bounds;
mod savings;
pub(crate) mod theorem;

use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, JsonRational, Rational, Value};

pub use asymptotic::{asymptotic_ratio, large_k_gap_trend, local_caching_ratio, LargeKPoint};
pub use audit::{
    audit_continuity, audit_lemma1, ContinuityCheck, ContinuityReport, Lemma1Report,
};
pub use bounds::{gap, lower_bound_t, sqrt_sample_bound};
pub use savings::{compare_savings, csit_savings_closed, csit_savings_oracle, SavingsComparison};
pub use theorem::{
    achievable_t, achievable_t_large, achievable_t_small, alpha_breakpoint, eta_branch_t,
    first_branch_t, full_csit_threshold, select_eta, Achievable,
};

/// CSIT quality exponent in `[0, 1]`, held exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alpha(Rational);

impl Alpha {
    pub fn new(value: Rational) -> Result<Self> {
        if value < Rational::zero() || value > Rational::one() {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {}",
                rational::fmt_rational(&value)
            )));
        }
        Ok(Alpha(value))
    }

    pub fn zero() -> Self {
        Alpha(Rational::zero())
    }

    pub fn one() -> Self {
        Alpha(Rational::one())
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Alpha::new(rational::from_f64(x)?)
    }

    /// `{0, step, 2 step, ..., 1}` for `step = 1/count`.
    pub fn uniform_grid(count: u64) -> Vec<Alpha> {
        (0..=count)
            .map(|i| Alpha(rational::ratio(i as i64, count as i64)))
            .collect()
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Alpha::new(rational::parse_rational(s)?)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::fmt_rational(&self.0))
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JsonRational(&self.0).serialize(s)
    }
}

/// Which piece of the achievable delivery time is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "eta")]
pub enum RegimeTag {
    /// Small caches, `alpha < alpha_b1`: the disjoint-placement scheme.
    FirstBranch,
    /// Small caches, `alpha_b(eta) <= alpha < alpha_b(eta+1)`.
    EtaBranch(u64),
    /// Small caches, CSIT good enough that `T = 1 - gamma`.
    FullCsitBranch,
    /// `Gamma > 1`.
    LargeGamma,
}

impl RegimeTag {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeTag::FirstBranch => "FirstBranch",
            RegimeTag::EtaBranch(_) => "EtaBranch",
            RegimeTag::FullCsitBranch => "FullCsitBranch",
            RegimeTag::LargeGamma => "LargeGamma",
        }
    }

    pub fn eta(&self) -> Option<u64> {
        match self {
            RegimeTag::EtaBranch(eta) => Some(*eta),
            _ => None,
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeTag::EtaBranch(eta) => write!(f, "EtaBranch({eta})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Everything the analysis knows about one `(params, alpha)` point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformancePoint {
    pub t: Value,
    pub dof: Value,
    pub t_lb: Value,
    pub argmax_s: u64,
    pub gap: Value,
    pub regime: RegimeTag,
    /// Closed-form CSIT savings; only defined for `Gamma <= 1`.
    pub delta: Option<Value>,
}

pub fn evaluate(params: &SystemParams, alpha: &Alpha) -> Result<PerformancePoint> {
    let ach = achievable_t(params, alpha)?;
    let (t_lb, argmax_s) = lower_bound_t(params, alpha);
    let gap = bounds::gap_from(&ach.t, &t_lb);
    let delta = if params.is_small_cache() {
        Some(csit_savings_closed(params, alpha)?)
    } else {
        None
    };
    Ok(PerformancePoint {
        t: ach.t,
        dof: ach.dof,
        t_lb,
        argmax_s,
        gap,
        regime: ach.regime,
        delta,
    })
}
