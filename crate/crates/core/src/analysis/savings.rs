//! CSIT savings `delta(gamma, alpha)`: how much less current-CSIT quality the
//! cache-aided system needs to match a cacheless system's per-user delivery
//! time scaled by `1 - gamma`.
//!
//! The cacheless reference is `H_K / (1 - a + a H_K)`, the small-cache
//! first-branch expression at `Gamma = 0`.

use serde::Serialize;

use super::theorem::{achievable_t_small, select_in, Inputs};
use super::{Alpha, RegimeTag};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{Rational, Value};
use crate::scalar::Scalar;

fn closed_in<S: Scalar>(x: &Inputs<S>) -> S {
    let k = x.k;
    let ks = S::from_u64(k);
    let hk = S::harmonic(k);
    let one = S::one();
    match select_in(x) {
        RegimeTag::FirstBranch => {
            x.gamma.clone() * (ks.clone() - hk.clone()) / (hk.clone() - x.big_gamma.clone())
                * (x.alpha.clone() + one / (hk - S::one()))
        }
        RegimeTag::EtaBranch(eta) => {
            let eta_s = S::from_u64(eta);
            (one - x.alpha.clone()) * (ks.clone() * S::harmonic(eta) - eta_s * hk.clone())
                / (ks * S::harmonic(eta + 1) * (hk - S::one()))
        }
        _ => one - x.alpha.clone(),
    }
}

/// Piecewise closed form, branch chosen by the active regime.
pub fn csit_savings_closed(params: &SystemParams, alpha: &Alpha) -> Result<Value> {
    if !params.is_small_cache() {
        return Err(Error::Precondition("CSIT savings are defined for Gamma <= 1".into()));
    }
    Ok(if params.exact_mode() {
        Value::Exact(closed_in(&Inputs::<Rational>::of(params, alpha)))
    } else {
        Value::Approx(closed_in(&Inputs::<f64>::of(params, alpha)))
    })
}

/// Bisection on the defining inequality: the least `a'` in `[0, 1]` with
/// `(1 - gamma) H_K / (1 - a' + a' H_K) <= T(gamma, alpha)`, minus `alpha`.
pub fn csit_savings_oracle(params: &SystemParams, alpha: &Alpha) -> Result<f64> {
    let (t, _) = achievable_t_small(params, alpha)?;
    let t = t.to_f64();
    let hk = f64::harmonic(params.k());
    let rest = 1.0 - crate::rational::to_f64(params.gamma());
    let holds = |a: f64| rest * hk / (1.0 - a + a * hk) <= t;

    let target = if holds(0.0) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(target.min(1.0) - alpha.to_f64())
}

/// Closed form next to the oracle. The oracle is authoritative; `agrees`
/// records whether the two are within `tol`.
#[derive(Debug, Clone, Serialize)]
pub struct SavingsComparison {
    pub alpha: Alpha,
    pub regime: RegimeTag,
    pub closed: Value,
    pub oracle: f64,
    pub abs_diff: f64,
    pub agrees: bool,
}

pub fn compare_savings(params: &SystemParams, alpha: &Alpha, tol: f64) -> Result<SavingsComparison> {
    let closed = csit_savings_closed(params, alpha)?;
    let oracle = csit_savings_oracle(params, alpha)?;
    let regime = super::select_eta(params, alpha)?;
    let abs_diff = (closed.to_f64() - oracle).abs();
    Ok(SavingsComparison {
        alpha: alpha.clone(),
        regime,
        closed,
        oracle,
        abs_diff,
        agrees: abs_diff <= tol,
    })
}
