//! Fixed-format number rendering for machine-readable reports.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that identical values always serialize to identical bytes. Rationals are
//! written as `"num/den"`.

use num_rational::BigRational;
use serde::Serializer;

use crate::exact::fmt_rational;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn f64_str<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_f64(*x))
}

pub fn opt_f64_str<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_f64(*v)),
        None => s.serialize_none(),
    }
}

pub fn rational_str<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn opt_rational_str<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(v) => s.serialize_str(&fmt_rational(v)),
        None => s.serialize_none(),
    }
}

pub fn display_str<T: std::fmt::Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
