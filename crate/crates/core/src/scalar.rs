//! Number abstraction so each closed form is written once and evaluated
//! either exactly or in `f64`.

use std::fmt::Debug;

use num::Num;

use crate::harmonic;
use crate::rational::{self, Rational, Value};

pub trait Scalar: Num + Clone + PartialOrd + Debug {
    fn from_rational(r: &Rational) -> Self;
    fn from_u64(n: u64) -> Self;
    fn harmonic(n: u64) -> Self;
    fn to_f64(&self) -> f64;
    fn into_value(self) -> Value;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_u64(n: u64) -> Self {
        rational::int(n)
    }

    fn harmonic(n: u64) -> Self {
        harmonic::harmonic(n)
    }

    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }

    fn into_value(self) -> Value {
        Value::Exact(self)
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn harmonic(n: u64) -> Self {
        harmonic::harmonic_f64(n)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn into_value(self) -> Value {
        Value::Approx(self)
    }
}
