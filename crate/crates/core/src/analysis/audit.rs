//! Structural audits of the small-cache piecewise expression: monotonicity
//! of breakpoints and branch expressions in `eta`, and agreement of the
//! branch expressions at each breakpoint.

use num::{One, Zero};
use serde::Serialize;

use super::theorem::{breakpoint_in, eta_branch_in, first_branch_in, full_csit_threshold_in};
use super::{Alpha, RegimeTag};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, Rational, Value};
use crate::scalar::Scalar;

/// Breakpoints must increase with `eta`, and at a common `alpha < 1` the
/// branch expression `T'^{eta}` must decrease with `eta`.
///
/// Two degenerate cases are checked for equality instead: `Gamma = 0`, where
/// every breakpoint equals 1, and `alpha = 1`, where all branch expressions
/// collapse to `1 - gamma`.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub k: u64,
    pub big_gamma: Value,
    pub breakpoints: Vec<Value>,
    pub degenerate: bool,
    pub breakpoint_failures: Vec<u64>,
    pub branch_failures: Vec<(u64, Alpha)>,
    pub comparisons: usize,
    pub passed: bool,
}

fn lemma1_in<S: Scalar>(params: &SystemParams, alphas: &[Alpha]) -> Lemma1Report {
    let k = params.k();
    let g = S::from_rational(params.big_gamma());
    let degenerate = params.big_gamma().is_zero();
    let bps: Vec<S> = (1..k).map(|eta| breakpoint_in(k, &g, eta)).collect();

    let mut comparisons = 0;
    let mut breakpoint_failures = Vec::new();
    for eta in 1..k.saturating_sub(1) {
        let (lo, hi) = (&bps[eta as usize - 1], &bps[eta as usize]);
        let ok = if degenerate { lo == hi } else { hi > lo };
        comparisons += 1;
        if !ok {
            breakpoint_failures.push(eta);
        }
    }

    let mut branch_failures = Vec::new();
    for a in alphas {
        let a_s = S::from_rational(a.value());
        let at_one = a.value().is_one();
        for eta in 1..k.saturating_sub(1) {
            let t_lo = eta_branch_in(k, &g, eta, &a_s);
            let t_hi = eta_branch_in(k, &g, eta + 1, &a_s);
            let ok = if at_one { t_lo == t_hi } else { t_lo > t_hi };
            comparisons += 1;
            if !ok {
                branch_failures.push((eta, a.clone()));
            }
        }
    }

    let passed = breakpoint_failures.is_empty() && branch_failures.is_empty();
    Lemma1Report {
        k,
        big_gamma: S::from_rational(params.big_gamma()).into_value(),
        breakpoints: bps.into_iter().map(Scalar::into_value).collect(),
        degenerate,
        breakpoint_failures,
        branch_failures,
        comparisons,
        passed,
    }
}

pub fn audit_lemma1(params: &SystemParams, alphas: &[Alpha]) -> Result<Lemma1Report> {
    if !params.is_small_cache() {
        return Err(Error::Precondition("Lemma audit needs Gamma <= 1".into()));
    }
    Ok(if params.exact_mode() {
        lemma1_in::<Rational>(params, alphas)
    } else {
        lemma1_in::<f64>(params, alphas)
    })
}

/// The two branch expressions meeting at one breakpoint.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityCheck {
    pub eta: u64,
    #[serde(with = "rational::serde_rational")]
    pub alpha: Rational,
    pub left_branch: RegimeTag,
    #[serde(with = "rational::serde_rational")]
    pub left: Rational,
    pub right_branch: RegimeTag,
    #[serde(with = "rational::serde_rational")]
    pub right: Rational,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub k: u64,
    pub checks: Vec<ContinuityCheck>,
    /// `alpha_b(K-1) == (K-1-Gamma) / ((K-1)(1-gamma))`.
    pub full_csit_identity: bool,
}

impl ContinuityReport {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(|c| c.agrees)
    }
}

fn branch_value(k: u64, g: &Rational, gamma: &Rational, tag: RegimeTag, a: &Rational) -> Rational {
    match tag {
        RegimeTag::FirstBranch => first_branch_in(k, g, a),
        RegimeTag::EtaBranch(eta) => eta_branch_in(k, g, eta, a),
        _ => Rational::one() - gamma,
    }
}

/// Evaluates, in exact arithmetic, the branch expression active just below
/// each breakpoint `alpha_b(eta)` and the one selected at it.
pub fn audit_continuity(params: &SystemParams) -> Result<ContinuityReport> {
    if !params.is_small_cache() {
        return Err(Error::Precondition("continuity audit needs Gamma <= 1".into()));
    }
    if !params.exact_mode() {
        return Err(Error::Precondition(format!(
            "continuity audit is exact-only (K <= {})",
            crate::params::EXACT_LIMIT
        )));
    }
    let k = params.k();
    let g = params.big_gamma();
    let gamma = params.gamma();
    let branch_for = |eta: u64| {
        if eta == 0 {
            RegimeTag::FirstBranch
        } else if eta >= k - 1 {
            RegimeTag::FullCsitBranch
        } else {
            RegimeTag::EtaBranch(eta)
        }
    };
    let checks = (1..k)
        .map(|eta| {
            let alpha = breakpoint_in(k, g, eta);
            let left_branch = branch_for(eta - 1);
            let right_branch = branch_for(eta);
            let left = branch_value(k, g, gamma, left_branch, &alpha);
            let right = branch_value(k, g, gamma, right_branch, &alpha);
            let agrees = left == right;
            ContinuityCheck { eta, alpha, left_branch, left, right_branch, right, agrees }
        })
        .collect();
    let full_csit_identity = breakpoint_in(k, g, k - 1) == full_csit_threshold_in(k, gamma, g);
    Ok(ContinuityReport { k, checks, full_csit_identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn k4_half() {
        let p = SystemParams::new(4, 8, int(1), None).unwrap();
        let r = audit_lemma1(&p, &Alpha::uniform_grid(20)).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(
            r.breakpoints,
            vec![
                Value::Exact(ratio(12, 25)),
                Value::Exact(ratio(36, 43)),
                Value::Exact(ratio(20, 21))
            ]
        );
    }

    #[test]
    fn two_users_is_vacuous() {
        let p = SystemParams::new(2, 4, int(1), None).unwrap();
        let r = audit_lemma1(&p, &Alpha::uniform_grid(10)).unwrap();
        assert!(r.passed);
        assert_eq!(r.comparisons, 0);
    }

    #[test]
    fn cacheless_breakpoints_coincide() {
        let p = SystemParams::new(6, 6, int(0), None).unwrap();
        let r = audit_lemma1(&p, &Alpha::uniform_grid(10)).unwrap();
        assert!(r.degenerate && r.passed);
        assert!(r.breakpoints.iter().all(|b| *b == Value::Exact(int(1))));
    }

    #[test]
    fn first_breakpoint_is_continuous() {
        let p = SystemParams::new(4, 8, int(1), None).unwrap();
        let r = audit_continuity(&p).unwrap();
        assert!(r.full_csit_identity);
        let first = &r.checks[0];
        assert_eq!(first.alpha, ratio(12, 25));
        assert_eq!(first.left, ratio(25, 24));
        assert!(first.agrees);
    }

    #[test]
    fn higher_breakpoints_jump_down() {
        // T'^{eta} > T'^{eta+1} at equal alpha < 1, so the value drops at
        // each breakpoint past the first.
        let p = SystemParams::new(4, 8, int(1), None).unwrap();
        let r = audit_continuity(&p).unwrap();
        assert_eq!(r.checks[1].left, ratio(3913, 4248));
        assert_eq!(r.checks[1].right, ratio(43, 48));
        assert_eq!(r.checks[2].left, ratio(1029, 1168));
        assert_eq!(r.checks[2].right, ratio(7, 8));
        assert!(r.checks[1..].iter().all(|c| !c.agrees && c.left > c.right));
    }
}
