//! Achievable delivery time: the small-cache piecewise expression, its
//! CSIT breakpoints, and the large-cache (`Gamma >= 1`) expression.

use num::One;
use serde::Serialize;

use super::{Alpha, RegimeTag};
use crate::error::{Error, Result};
use crate::harmonic::harmonic_general;
use crate::params::SystemParams;
use crate::rational::{self, Rational, Value};
use crate::scalar::Scalar;

/// Operands of one evaluation, converted to the working number type.
pub(crate) struct Inputs<S> {
    pub k: u64,
    pub gamma: S,
    pub big_gamma: S,
    pub alpha: S,
}

impl<S: Scalar> Inputs<S> {
    pub fn of(params: &SystemParams, alpha: &Alpha) -> Self {
        Inputs {
            k: params.k(),
            gamma: S::from_rational(params.gamma()),
            big_gamma: S::from_rational(params.big_gamma()),
            alpha: S::from_rational(alpha.value()),
        }
    }
}

/// `(eta - Gamma) / (Gamma (H_K - H_eta - 1) + eta)`.
pub(crate) fn breakpoint_in<S: Scalar>(k: u64, big_gamma: &S, eta: u64) -> S {
    let eta_s = S::from_u64(eta);
    let denom = big_gamma.clone() * (S::harmonic(k) - S::harmonic(eta) - S::one()) + eta_s.clone();
    (eta_s - big_gamma.clone()) / denom
}

/// `(H_K - Gamma) / (1 - alpha + alpha H_K)`.
pub(crate) fn first_branch_in<S: Scalar>(k: u64, big_gamma: &S, alpha: &S) -> S {
    let hk = S::harmonic(k);
    (hk.clone() - big_gamma.clone()) / (S::one() - alpha.clone() + alpha.clone() * hk)
}

/// `(K - Gamma)(H_K - H_eta) / ((K - eta) + alpha (eta + K (H_K - H_eta - 1)))`.
pub(crate) fn eta_branch_in<S: Scalar>(k: u64, big_gamma: &S, eta: u64, alpha: &S) -> S {
    let ks = S::from_u64(k);
    let eta_s = S::from_u64(eta);
    let diff = S::harmonic(k) - S::harmonic(eta);
    let num = (ks.clone() - big_gamma.clone()) * diff.clone();
    let den = (ks.clone() - eta_s.clone()) + alpha.clone() * (eta_s + ks * (diff - S::one()));
    num / den
}

/// `(K - 1 - Gamma) / ((K - 1)(1 - gamma))`.
pub(crate) fn full_csit_threshold_in<S: Scalar>(k: u64, gamma: &S, big_gamma: &S) -> S {
    let km1 = S::from_u64(k - 1);
    (km1.clone() - big_gamma.clone()) / (km1 * (S::one() - gamma.clone()))
}

pub(crate) fn select_in<S: Scalar>(x: &Inputs<S>) -> RegimeTag {
    let k = x.k;
    if x.alpha < breakpoint_in(k, &x.big_gamma, 1) {
        return RegimeTag::FirstBranch;
    }
    if x.alpha >= full_csit_threshold_in(k, &x.gamma, &x.big_gamma) || k < 3 {
        return RegimeTag::FullCsitBranch;
    }
    // Breakpoints increase with eta; find the largest eta in [1, K-2] whose
    // breakpoint does not exceed alpha.
    let (mut lo, mut hi) = (1u64, k - 2);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if breakpoint_in(k, &x.big_gamma, mid) <= x.alpha {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    RegimeTag::EtaBranch(lo)
}

pub(crate) fn small_in<S: Scalar>(x: &Inputs<S>) -> (S, RegimeTag) {
    let regime = select_in(x);
    let t = match regime {
        RegimeTag::FirstBranch => first_branch_in(x.k, &x.big_gamma, &x.alpha),
        RegimeTag::EtaBranch(eta) => eta_branch_in(x.k, &x.big_gamma, eta, &x.alpha),
        _ => S::one() - x.gamma.clone(),
    };
    (t, regime)
}

/// `(1 - gamma) D / (alpha D + (1 - alpha)(1 - gamma))` with `D = H_K - H_Gamma`.
pub(crate) fn large_in<S: Scalar>(gamma: &S, alpha: &S, spread: S) -> S {
    let rest = S::one() - gamma.clone();
    if rest.is_zero() {
        return S::zero();
    }
    let den = alpha.clone() * spread.clone() + (S::one() - alpha.clone()) * rest.clone();
    rest * spread / den
}

fn require_small(params: &SystemParams) -> Result<()> {
    if params.is_small_cache() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "small-cache regime needs Gamma <= 1, got Gamma = {}",
            rational::fmt_rational(params.big_gamma())
        )))
    }
}

/// CSIT breakpoint `alpha_b(eta)` for `1 <= eta <= K-1`.
pub fn alpha_breakpoint(params: &SystemParams, eta: u64) -> Result<Value> {
    require_small(params)?;
    if eta == 0 || eta >= params.k() {
        return Err(Error::Domain(format!(
            "eta must lie in [1, {}], got {eta}",
            params.k() - 1
        )));
    }
    let big_gamma = params.big_gamma();
    Ok(if params.exact_mode() {
        Value::Exact(breakpoint_in(params.k(), big_gamma, eta))
    } else {
        Value::Approx(breakpoint_in(params.k(), &rational::to_f64(big_gamma), eta))
    })
}

/// CSIT quality above which `T = 1 - gamma` is achievable (and optimal).
pub fn full_csit_threshold(params: &SystemParams) -> Value {
    if params.exact_mode() {
        Value::Exact(full_csit_threshold_in(params.k(), params.gamma(), params.big_gamma()))
    } else {
        Value::Approx(full_csit_threshold_in(
            params.k(),
            &rational::to_f64(params.gamma()),
            &rational::to_f64(params.big_gamma()),
        ))
    }
}

/// Active branch for `Gamma <= 1`. At a breakpoint the higher branch wins.
pub fn select_eta(params: &SystemParams, alpha: &Alpha) -> Result<RegimeTag> {
    require_small(params)?;
    Ok(if params.exact_mode() {
        select_in(&Inputs::<Rational>::of(params, alpha))
    } else {
        select_in(&Inputs::<f64>::of(params, alpha))
    })
}

/// Piecewise achievable `T` for `Gamma <= 1`.
pub fn achievable_t_small(params: &SystemParams, alpha: &Alpha) -> Result<(Value, RegimeTag)> {
    require_small(params)?;
    Ok(if params.exact_mode() {
        let (t, r) = small_in(&Inputs::<Rational>::of(params, alpha));
        (Value::Exact(t), r)
    } else {
        let (t, r) = small_in(&Inputs::<f64>::of(params, alpha));
        (Value::Approx(t), r)
    })
}

/// First-branch expression `T'` evaluated at any `alpha`, regardless of
/// which branch is active there.
pub fn first_branch_t(params: &SystemParams, alpha: &Alpha) -> Result<Value> {
    require_small(params)?;
    Ok(if params.exact_mode() {
        Value::Exact(first_branch_in(params.k(), params.big_gamma(), alpha.value()))
    } else {
        let x = Inputs::<f64>::of(params, alpha);
        Value::Approx(first_branch_in(x.k, &x.big_gamma, &x.alpha))
    })
}

/// Branch expression `T'^{eta}` for `1 <= eta <= K-1`, at any `alpha`.
pub fn eta_branch_t(params: &SystemParams, eta: u64, alpha: &Alpha) -> Result<Value> {
    require_small(params)?;
    if eta == 0 || eta >= params.k() {
        return Err(Error::Domain(format!("eta must lie in [1, {}], got {eta}", params.k() - 1)));
    }
    Ok(if params.exact_mode() {
        Value::Exact(eta_branch_in(params.k(), params.big_gamma(), eta, alpha.value()))
    } else {
        let x = Inputs::<f64>::of(params, alpha);
        Value::Approx(eta_branch_in(x.k, &x.big_gamma, eta, &x.alpha))
    })
}

/// Achievable `T` for `Gamma >= 1`. Non-integer `Gamma` goes through the
/// real-argument harmonic number and is therefore approximate.
pub fn achievable_t_large(params: &SystemParams, alpha: &Alpha) -> Result<Value> {
    let big_gamma = params.big_gamma();
    if *big_gamma < Rational::one() {
        return Err(Error::Precondition(format!(
            "large-cache regime needs Gamma >= 1, got Gamma = {}",
            rational::fmt_rational(big_gamma)
        )));
    }
    let k = params.k();
    if params.exact_mode() && rational::is_integer(big_gamma) {
        let hg = crate::harmonic::harmonic(rational::floor_u64(big_gamma).unwrap_or(0));
        let spread = crate::harmonic::harmonic(k) - hg;
        return Ok(Value::Exact(large_in(params.gamma(), alpha.value(), spread)));
    }
    let hk = f64::harmonic(k);
    let spread = hk - harmonic_general(rational::to_f64(big_gamma))?;
    let gamma = rational::to_f64(params.gamma());
    Ok(Value::Approx(large_in(&gamma, &alpha.to_f64(), spread)))
}

/// Achievable delivery time with its per-user DoF `(1 - gamma) / T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Achievable {
    pub t: Value,
    pub dof: Value,
    pub regime: RegimeTag,
}

/// Routes on `Gamma <= 1`. When the whole library fits in every cache
/// (`T = 0`) the DoF is reported as 1.
pub fn achievable_t(params: &SystemParams, alpha: &Alpha) -> Result<Achievable> {
    let (t, regime) = if params.is_small_cache() {
        achievable_t_small(params, alpha)?
    } else {
        (achievable_t_large(params, alpha)?, RegimeTag::LargeGamma)
    };
    let rest = Value::Exact(Rational::one() - params.gamma());
    let dof = if t.is_zero() {
        Value::Exact(Rational::one())
    } else {
        rest.ratio(&t)
    };
    Ok(Achievable { t, dof, regime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::harmonic;
    use crate::rational::{int, ratio};
    use num::Zero;

    fn params(k: u64, n: u64, m: Rational) -> SystemParams {
        SystemParams::new(k, n, m, None).unwrap()
    }

    fn alpha(num: i64, den: i64) -> Alpha {
        Alpha::new(ratio(num, den)).unwrap()
    }

    #[test]
    fn breakpoints_k4_half() {
        let p = params(4, 8, int(1));
        let bp = |e| alpha_breakpoint(&p, e).unwrap();
        assert_eq!(bp(1), Value::Exact(ratio(12, 25)));
        assert_eq!(bp(2), Value::Exact(ratio(36, 43)));
        assert_eq!(bp(3), Value::Exact(ratio(20, 21)));
        assert_eq!(full_csit_threshold(&p), Value::Exact(ratio(20, 21)));
        assert!(alpha_breakpoint(&p, 0).is_err());
        assert!(alpha_breakpoint(&p, 4).is_err());
    }

    #[test]
    fn selection_k4_half() {
        let p = params(4, 8, int(1));
        let sel = |a: Alpha| select_eta(&p, &a).unwrap();
        assert_eq!(sel(alpha(3, 10)), RegimeTag::FirstBranch);
        assert_eq!(sel(alpha(1, 2)), RegimeTag::EtaBranch(1));
        assert_eq!(sel(alpha(9, 10)), RegimeTag::EtaBranch(2));
        assert_eq!(sel(alpha(96, 100)), RegimeTag::FullCsitBranch);
        // ties go to the higher branch
        assert_eq!(sel(alpha(12, 25)), RegimeTag::EtaBranch(1));
        assert_eq!(sel(alpha(36, 43)), RegimeTag::EtaBranch(2));
        assert_eq!(sel(alpha(20, 21)), RegimeTag::FullCsitBranch);
    }

    #[test]
    fn small_values() {
        let p = params(4, 8, int(1));
        let t = |a: Alpha| achievable_t_small(&p, &a).unwrap().0;
        assert_eq!(t(Alpha::zero()), Value::Exact(ratio(19, 12)));
        assert_eq!(t(Alpha::one()), Value::Exact(ratio(7, 8)));
        let at_b1 = alpha(12, 25);
        assert_eq!(t(at_b1.clone()), Value::Exact(ratio(25, 24)));
        assert_eq!(first_branch_t(&p, &at_b1).unwrap(), Value::Exact(ratio(25, 24)));
        assert_eq!(eta_branch_t(&p, 1, &at_b1).unwrap(), Value::Exact(ratio(25, 24)));
        assert!(achievable_t_small(&params(4, 4, int(2)), &Alpha::zero()).is_err());
    }

    #[test]
    fn eta_branch_values_at_equal_alpha() {
        let p = params(4, 8, int(1));
        let a = alpha(9, 10);
        let t1 = eta_branch_t(&p, 1, &a).unwrap().to_f64();
        let t2 = eta_branch_t(&p, 2, &a).unwrap().to_f64();
        assert!((t1 - 0.902_777_777_777_777_8).abs() < 1e-12);
        assert!((t2 - 0.887_681_159_420_289_9).abs() < 1e-12);
        // the last branch expression is exactly 1 - gamma
        assert_eq!(eta_branch_t(&p, 3, &a).unwrap(), Value::Exact(ratio(7, 8)));
    }

    #[test]
    fn large_values() {
        let p = params(4, 4, int(2));
        assert_eq!(achievable_t_large(&p, &Alpha::zero()).unwrap(), Value::Exact(ratio(7, 12)));
        assert_eq!(achievable_t_large(&p, &Alpha::one()).unwrap(), Value::Exact(ratio(1, 2)));
        assert!(achievable_t_large(&params(4, 8, int(1)), &Alpha::zero()).is_err());
        let full = params(4, 4, int(4));
        assert_eq!(achievable_t(&full, &Alpha::zero()).unwrap().t, Value::Exact(int(0)));
    }

    #[test]
    fn large_non_integer_gamma() {
        let p = params(1000, 1000, ratio(158, 5));
        let t = achievable_t_large(&p, &Alpha::zero()).unwrap();
        assert!(!t.is_exact());
        let expect = rational::to_f64(&harmonic(1000)) - harmonic_general(31.6).unwrap();
        assert!((t.to_f64() - expect).abs() < 1e-12);
        assert!((t.to_f64() - 3.4394).abs() < 1e-3);
    }

    #[test]
    fn unit_gamma_regimes() {
        // At Gamma = 1 the eta = 1 branch is the large-cache expression; the
        // higher small-cache branches only improve on it.
        for k in 2..=12u64 {
            let p = params(k, k, int(1));
            for a in Alpha::uniform_grid(20) {
                let (small, regime) = achievable_t_small(&p, &a).unwrap();
                let large = achievable_t_large(&p, &a).unwrap();
                let (small, large) = (small.exact().unwrap().clone(), large.exact().unwrap().clone());
                if regime == RegimeTag::EtaBranch(1) || a.value() == &Rational::zero() {
                    assert_eq!(small, large, "K={k} alpha={a}");
                } else {
                    assert!(small <= large, "K={k} alpha={a}");
                }
            }
        }
    }

    #[test]
    fn dispatch_and_dof() {
        for k in 2..=20u64 {
            let p = params(k, k, int(0));
            let a = achievable_t(&p, &Alpha::zero()).unwrap();
            assert_eq!(a.t, Value::Exact(harmonic(k)));
            assert_eq!(a.dof, Value::Exact(Rational::one() / harmonic(k)));
        }
        let a = achievable_t(&params(4, 8, int(1)), &Alpha::zero()).unwrap();
        assert_eq!(a.dof, Value::Exact(ratio(21, 38)));
        assert_eq!(achievable_t(&params(4, 4, int(2)), &Alpha::zero()).unwrap().regime, RegimeTag::LargeGamma);
    }

    #[test]
    fn float_mode_tracks_exact_mode() {
        // Same formulas through f64 on a small instance.
        let p = params(6, 12, ratio(3, 2));
        for a in Alpha::uniform_grid(40) {
            let exact = small_in(&Inputs::<Rational>::of(&p, &a));
            let approx = small_in(&Inputs::<f64>::of(&p, &a));
            assert_eq!(exact.1, approx.1, "alpha={a}");
            assert!((rational::to_f64(&exact.0) - approx.0).abs() < 1e-12);
        }
    }
}
