//! Large-`K` behaviour with vanishing per-user caches.

use num::One;
use serde::Serialize;

use super::{achievable_t_large, bounds, Alpha};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, Rational};
use crate::scalar::Scalar;

fn sqrt_cache_params(k: u64, zeta: f64) -> Result<SystemParams> {
    // N = K, so M = K gamma = K^zeta.
    let m = rational::from_f64((k as f64).powf(zeta))?;
    SystemParams::new(k, k, m, None)
}

/// `T(gamma = K^-(1-zeta), alpha = 0) / H_K`, the caching gain relative to
/// the cacheless delivery time. Tends to `1 - zeta` as `K` grows.
pub fn asymptotic_ratio(k: u64, zeta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("K < 2 (K={k})")));
    }
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::Domain(format!("zeta must lie in [0, 1), got {zeta}")));
    }
    let params = sqrt_cache_params(k, zeta)?;
    let t = achievable_t_large(&params, &Alpha::zero())?;
    Ok(t.to_f64() / f64::harmonic(k))
}

/// Gain of uncoded local caching: `1 - gamma`.
pub fn local_caching_ratio(params: &SystemParams) -> Rational {
    Rational::one() - params.gamma()
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeKPoint {
    pub k: u64,
    pub m: f64,
    pub t: f64,
    pub t_lb: f64,
    pub argmax_s: u64,
    pub gap: f64,
}

/// Gap at `N = K`, `gamma = K^{-1/2}` for each `K`.
pub fn large_k_gap_trend(ks: &[u64], alpha: &Alpha) -> Result<Vec<LargeKPoint>> {
    ks.iter()
        .map(|&k| {
            let params = sqrt_cache_params(k, 0.5)?;
            let t = super::achievable_t(&params, alpha)?.t;
            let (t_lb, argmax_s) = bounds::lower_bound_t(&params, alpha);
            let gap = bounds::gap_from(&t, &t_lb).to_f64();
            Ok(LargeKPoint {
                k,
                m: rational::to_f64(params.m()),
                t: t.to_f64(),
                t_lb: t_lb.to_f64(),
                argmax_s,
                gap,
            })
        })
        .collect()
}
