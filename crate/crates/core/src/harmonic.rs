//! Harmonic numbers.
//!
//! `harmonic(n)` is exact and memoised; `harmonic_general(x)` extends the
//! sequence to real arguments through `H(x) = digamma(x + 1) + euler_gamma`,
//! which is what a non-integer cumulative cache size needs.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num::{BigInt, BigUint, Integer, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

static CACHE: OnceLock<RwLock<HashMap<u64, Rational>>> = OnceLock::new();

/// Exact `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
///
/// Computed as `sum(L / i) / L` with `L = lcm(1..=n)` and reduced once.
/// Results are cached process-wide.
pub fn harmonic(n: u64) -> Rational {
    let cache = CACHE.get_or_init(Default::default);
    if let Some(h) = cache.read().expect("harmonic cache poisoned").get(&n) {
        return h.clone();
    }
    let h = harmonic_uncached(n);
    cache.write().expect("harmonic cache poisoned").insert(n, h.clone());
    h
}

fn harmonic_uncached(n: u64) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    let mut lcm = BigUint::one();
    for i in 2..=n {
        let r = (&lcm % i).to_u64().expect("remainder below i");
        lcm *= i / r.gcd(&i);
    }
    let num: BigUint = (1..=n).map(|i| &lcm / i).sum();
    Rational::new(BigInt::from(num), BigInt::from(lcm))
}

/// `H(x)` for real `x > 0`.
pub fn harmonic_general(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("harmonic_general needs x > 0, got {x}")));
    }
    Ok(digamma(x + 1.0) + EULER_MASCHERONI)
}

/// Harmonic number of an integer index as a double.
pub fn harmonic_f64(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        digamma(n as f64 + 1.0) + EULER_MASCHERONI
    }
}

/// Digamma for `x > 0`: upward recurrence to `x >= 16`, then the
/// asymptotic expansion through the `x^-10` term.
pub fn digamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 16.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let tail = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + x.ln() - 0.5 * inv - tail
}
