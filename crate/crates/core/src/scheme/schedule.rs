use num::{BigInt, Integer, One, Zero};
use serde::Serialize;

use crate::analysis::theorem::{breakpoint_in, first_branch_in};
use crate::analysis::Alpha;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PayloadClass {
    /// Phases `1..=K-1`: the order-2 XORs enter in phase 1 and are relayed
    /// through higher-order MAT phases.
    XorRelay,
    /// Phases `K..=2K-1`: the never-cached common parts.
    MatCommon,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase {
    /// 1-based.
    pub index: usize,
    pub class: PayloadClass,
    /// Order of the MAT messages sent in this phase.
    pub mat_order: u64,
    /// Parallel common streams, `K - mat_order + 1`.
    pub streams: u64,
    /// Whether this phase injects new content (phases 1 and K) rather than
    /// relaying overheard combinations.
    pub fresh: bool,
    #[serde(with = "rational::serde_rational")]
    pub start: Rational,
    #[serde(with = "rational::serde_rational")]
    pub duration: Rational,
}

impl Phase {
    pub fn end(&self) -> Rational {
        &self.start + &self.duration
    }
}

/// Exact durations of the `2K - 1` phases, in units of file transmissions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSchedule {
    pub k: u64,
    pub alpha: Alpha,
    pub phases: Vec<Phase>,
    #[serde(with = "rational::serde_rational")]
    pub t1: Rational,
    #[serde(with = "rational::serde_rational")]
    pub t_first_part: Rational,
    #[serde(with = "rational::serde_rational")]
    pub t_k: Rational,
    #[serde(with = "rational::serde_rational")]
    pub t_second_part: Rational,
    #[serde(with = "rational::serde_rational")]
    pub total: Rational,
    /// Common-stream rate, as a fraction of `f` bits per slot.
    #[serde(with = "rational::serde_rational")]
    pub common_rate: Rational,
    /// ZF rate per user, as a fraction of `f` bits per slot.
    #[serde(with = "rational::serde_rational")]
    pub zf_rate: Rational,
}

impl PhaseSchedule {
    pub fn phase(&self, index: usize) -> &Phase {
        &self.phases[index - 1]
    }

    pub fn durations(&self) -> Vec<Rational> {
        self.phases.iter().map(|p| p.duration.clone()).collect()
    }

    /// Common bits phase `index` can carry over all its streams.
    pub fn common_capacity_bits(&self, index: usize, f: u64) -> Rational {
        let p = self.phase(index);
        int(p.streams) * &self.common_rate * int(f) * &p.duration
    }

    /// ZF bits one user can receive from time 0 up to `until`.
    pub fn zf_capacity_bits(&self, f: u64, until: &Rational) -> Rational {
        &self.zf_rate * int(f) * until
    }
}

fn check_regime(params: &SystemParams, alpha: &Alpha) -> Result<()> {
    if !params.is_small_cache() {
        return Err(Error::Precondition(format!(
            "schedule needs Gamma <= 1, got Gamma = {}",
            rational::fmt_rational(params.big_gamma())
        )));
    }
    if !params.exact_mode() {
        return Err(Error::Precondition(format!(
            "schedule is built in exact arithmetic, K must be <= {}",
            crate::params::EXACT_LIMIT
        )));
    }
    if alpha.value().is_one() {
        return Err(Error::Precondition("schedule needs alpha < 1".into()));
    }
    let breakpoint = breakpoint_in(params.k(), params.big_gamma(), 1);
    if *alpha.value() > breakpoint {
        return Err(Error::AboveFirstBreakpoint { alpha: alpha.value().clone(), breakpoint });
    }
    Ok(())
}

/// Phase durations of the first-branch scheme for `alpha` in `[0, alpha_b1]`.
pub fn build_phase_schedule(params: &SystemParams, alpha: &Alpha) -> Result<PhaseSchedule> {
    check_regime(params, alpha)?;
    let k = params.k();
    let a = alpha.value();
    let one_minus_a = Rational::one() - a;
    let big_gamma = params.big_gamma();
    let t = first_branch_in(k, big_gamma, a);

    let t1 = params.gamma() * int(k * (k - 1) / 2) / (int(k - 1) * &one_minus_a);
    let t_k = (Rational::one() - big_gamma - a * &t) / &one_minus_a;

    let mut phases = Vec::with_capacity(2 * k as usize - 1);
    let mut clock = Rational::zero();
    for j in 1..2 * k {
        let (class, mat_order, duration) = if j < k {
            (PayloadClass::XorRelay, j + 1, &t1 * Rational::new(BigInt::from(2), BigInt::from(j + 1)))
        } else {
            (PayloadClass::MatCommon, j - k + 1, &t_k / int(j - k + 1))
        };
        phases.push(Phase {
            index: j as usize,
            class,
            mat_order,
            streams: k - mat_order + 1,
            fresh: j == 1 || j == k,
            start: clock.clone(),
            duration: duration.clone(),
        });
        clock += duration;
    }
    let t_first_part: Rational = phases[..k as usize - 1].iter().map(|p| &p.duration).sum();
    let t_second_part = &clock - &t_first_part;
    debug_assert_eq!(clock, t);

    Ok(PhaseSchedule {
        k,
        alpha: alpha.clone(),
        phases,
        t1,
        t_first_part,
        t_k,
        t_second_part,
        total: clock,
        common_rate: one_minus_a,
        zf_rate: a.clone(),
    })
}

/// Least `f` for which every segment of the scheme at `alpha` is a whole
/// number of bits. Any multiple of it also works.
pub fn suggest_file_size(params: &SystemParams, alpha: &Alpha) -> Result<u64> {
    check_regime(params, alpha)?;
    let t = first_branch_in(params.k(), params.big_gamma(), alpha.value());
    let private = alpha.value() * t;
    let base = params.gamma().denom().lcm(private.denom());
    u64::try_from(&base)
        .map_err(|_| Error::Domain(format!("least valid file size {base} exceeds 64 bits")))
}
