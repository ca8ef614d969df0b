//! Exact integer and rational helpers shared by the counting modules.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, t| acc * (n - t))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    falling(n, k) / factorial(k)
}

/// `(n-1)!!` for even `n`: the number of perfect matchings of `K_n`.
pub fn perfect_matching_count(n: u64) -> BigUint {
    debug_assert!(n.is_multiple_of(2));
    (1..n).step_by(2).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn ratio_u(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// The exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// `"num/den"` with the fraction in lowest terms.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(falling(7, 3), BigUint::from(210u32));
        assert_eq!(falling(2, 3), BigUint::zero());
        assert_eq!(binomial(10, 4), BigUint::from(210u32));
        assert_eq!(perfect_matching_count(6), BigUint::from(15u32));
        assert_eq!(perfect_matching_count(12), BigUint::from(10395u32));
        assert_eq!(perfect_matching_count(0), BigUint::one());
    }

    #[test]
    fn rational_format() {
        assert_eq!(fmt_rational(&ratio(6, 8)), "3/4");
        assert_eq!(fmt_rational(&rational_from_f64(0.5).unwrap()), "1/2");
    }
}
