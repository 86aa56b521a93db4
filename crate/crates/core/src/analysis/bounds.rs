//! Converse bound on the optimal delivery time and the resulting gap.

use num::Zero;

use super::Alpha;
use crate::error::Result;
use crate::harmonic::harmonic;
use crate::params::SystemParams;
use crate::rational::{self, Rational, Value};
use crate::scalar::Scalar;

/// `max_s (H_s - M s / floor(N/s)) / (H_s alpha + 1 - alpha)` over
/// `1 <= s <= s_max`; ties resolve to the smallest `s`.
fn lower_bound_in<S: Scalar>(n: u64, m: &S, alpha: &S, s_max: u64) -> (S, u64) {
    let mut h = S::zero();
    let mut best: Option<(S, u64)> = None;
    for s in 1..=s_max {
        h = h + S::one() / S::from_u64(s);
        let v = lower_bound_term(n, m, alpha, s, &h);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    best.expect("s range is never empty")
}

/// Exact maximum located in `f64` first: only the `s` whose float term is
/// within `1e-9` of the float maximum are evaluated exactly, which keeps
/// `K` near the exact limit tractable.
fn lower_bound_exact(n: u64, m: &Rational, alpha: &Rational, s_max: u64) -> (Rational, u64) {
    let (mf, af) = (rational::to_f64(m), rational::to_f64(alpha));
    let mut h = 0.0;
    let terms: Vec<f64> = (1..=s_max)
        .map(|s| {
            h += 1.0 / s as f64;
            lower_bound_term(n, &mf, &af, s, &h)
        })
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-9 * top.abs().max(1.0);
    let mut best: Option<(Rational, u64)> = None;
    for (s, _) in (1..=s_max).zip(&terms).filter(|(_, &v)| v >= top - slack) {
        let v = lower_bound_term(n, m, alpha, s, &harmonic(s));
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    best.expect("s range is never empty")
}

fn lower_bound_term<S: Scalar>(n: u64, m: &S, alpha: &S, s: u64, h_s: &S) -> S {
    let s_s = S::from_u64(s);
    let penalty = m.clone() * s_s / S::from_u64(n / s);
    (h_s.clone() - penalty) / (h_s.clone() * alpha.clone() + S::one() - alpha.clone())
}

/// Users per subset scanned by the bound: `min(K, floor(N/M))`, or `K` when
/// caches are empty.
pub(crate) fn s_max(params: &SystemParams) -> u64 {
    if params.m().is_zero() {
        return params.k();
    }
    let cap = rational::floor_u64(&(Rational::from_integer(params.n().into()) / params.m()))
        .unwrap_or(u64::MAX);
    params.k().min(cap)
}

/// Lower bound on the optimal delivery time and the maximising `s`.
pub fn lower_bound_t(params: &SystemParams, alpha: &Alpha) -> (Value, u64) {
    let s_max = s_max(params);
    if params.exact_mode() {
        let (v, s) = lower_bound_exact(params.n(), params.m(), alpha.value(), s_max);
        (Value::Exact(v), s)
    } else {
        let m = rational::to_f64(params.m());
        let (v, s) = lower_bound_in(params.n(), &m, &alpha.to_f64(), s_max);
        (Value::Approx(v), s)
    }
}

/// Bound term at `s_c = floor(sqrt K)` for `alpha = 0`, the subset size the
/// analytic gap argument picks. Never exceeds the scanned maximum.
pub fn sqrt_sample_bound(params: &SystemParams) -> Value {
    let mut s_c = (params.k() as f64).sqrt().floor() as u64;
    while s_c * s_c > params.k() {
        s_c -= 1;
    }
    while (s_c + 1) * (s_c + 1) <= params.k() {
        s_c += 1;
    }
    let s_c = s_c.clamp(1, s_max(params));
    if params.exact_mode() {
        let h = harmonic(s_c);
        Value::Exact(lower_bound_term(params.n(), params.m(), &Rational::zero(), s_c, &h))
    } else {
        let h = f64::harmonic(s_c);
        let m = rational::to_f64(params.m());
        Value::Approx(lower_bound_term(params.n(), &m, &0.0, s_c, &h))
    }
}

pub(crate) fn gap_from(t: &Value, t_lb: &Value) -> Value {
    if t.is_zero() {
        // whole library cached: nothing to deliver, bound is zero too
        return Value::Exact(Rational::from_integer(1.into()));
    }
    t.ratio(t_lb)
}

/// `T / T_lb`, at least 1.
pub fn gap(params: &SystemParams, alpha: &Alpha) -> Result<Value> {
    let t = super::achievable_t(params, alpha)?.t;
    let (t_lb, _) = lower_bound_t(params, alpha);
    Ok(gap_from(&t, &t_lb))
}
