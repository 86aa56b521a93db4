//! System parameters `(K, N, M, f)` and their derived cache ratios.

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Largest user count evaluated in exact rational arithmetic. Above this the
/// analysis runs in `f64` (relative tolerance 1e-9).
pub const EXACT_LIMIT: u64 = 10_000;

/// A validated `(K, N, M, f)` instance.
///
/// `gamma = M/N` and `big_gamma = K M / N` are stored exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemParams {
    k: u64,
    n: u64,
    #[serde(with = "rational::serde_rational")]
    m: Rational,
    f: Option<u64>,
    #[serde(with = "rational::serde_rational")]
    gamma: Rational,
    #[serde(rename = "Gamma", with = "rational::serde_rational")]
    big_gamma: Rational,
}

/// Checks the model assumptions and derives `gamma` and `Gamma`.
pub fn validate_params(k: u64, n: u64, m: Rational, f: Option<u64>) -> Result<SystemParams> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("K < 2 (K={k})")));
    }
    if n < k {
        return Err(Error::InvalidParams(format!("N < K (N={n}, K={k})")));
    }
    if m.is_negative() {
        return Err(Error::InvalidParams(format!("M < 0 (M={})", rational::fmt_rational(&m))));
    }
    if m > int(n) {
        return Err(Error::InvalidParams(format!(
            "M > N (M={}, N={n})",
            rational::fmt_rational(&m)
        )));
    }
    if f == Some(0) {
        return Err(Error::InvalidParams("f must be positive".into()));
    }
    let gamma = &m / int(n);
    let big_gamma = &gamma * int(k);
    Ok(SystemParams { k, n, m, f, gamma, big_gamma })
}

impl SystemParams {
    pub fn new(k: u64, n: u64, m: Rational, f: Option<u64>) -> Result<Self> {
        validate_params(k, n, m, f)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn f(&self) -> Option<u64> {
        self.f
    }

    /// Per-user normalised cache size `M/N`.
    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// Cumulative normalised cache size `K M / N`.
    pub fn big_gamma(&self) -> &Rational {
        &self.big_gamma
    }

    pub fn with_file_size(&self, f: u64) -> Result<Self> {
        validate_params(self.k, self.n, self.m.clone(), Some(f))
    }

    pub fn file_size(&self) -> Result<u64> {
        self.f
            .ok_or_else(|| Error::Precondition("file size f is required here".into()))
    }

    pub fn is_small_cache(&self) -> bool {
        self.big_gamma <= int(1)
    }

    pub fn is_cacheless(&self) -> bool {
        self.m.is_zero()
    }

    pub fn exact_mode(&self) -> bool {
        self.k <= EXACT_LIMIT
    }
}
