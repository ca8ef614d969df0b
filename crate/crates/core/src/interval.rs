//! Closed floating-point intervals with outward rounding.
//!
//! Every operation widens its result by at least one ulp on each side, so the
//! true real value of a computation is always contained in the interval. Lower
//! bounds are reported from `lo`, upper bounds from `hi`.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Extra ulps added around libm transcendental results.
const LIBM_SLACK: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn down(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| acc.next_down())
}

fn up(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| acc.next_up())
}

// Plain methods rather than operator traits: every step rounds outward.
#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// An interval holding a single value that is exactly representable.
    pub fn exact(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses a rational number.
    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Interval::exact(0.0);
        }
        let f = r.to_f64().unwrap_or(if r.is_positive() { f64::INFINITY } else { f64::NEG_INFINITY });
        let iv = Interval { lo: down(f, 1), hi: up(f, 1) };
        if r.is_positive() {
            iv.clamp_min(0.0)
        } else {
            iv
        }
    }

    pub fn from_u64(n: u64) -> Self {
        let f = n as f64;
        if f as u64 == n && f < 9_007_199_254_740_992.0 {
            Interval::exact(f)
        } else {
            Interval { lo: down(f, 1), hi: up(f, 1) }
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp_min(self, m: f64) -> Self {
        Interval { lo: self.lo.max(m), hi: self.hi.max(m) }
    }

    pub fn clamp(self, min: f64, max: f64) -> Self {
        Interval { lo: self.lo.clamp(min, max), hi: self.hi.clamp(min, max) }
    }

    pub fn add(self, o: Self) -> Self {
        Interval { lo: down(self.lo + o.lo, 1), hi: up(self.hi + o.hi, 1) }
    }

    pub fn sub(self, o: Self) -> Self {
        Interval { lo: down(self.lo - o.hi, 1), hi: up(self.hi - o.lo, 1) }
    }

    pub fn neg(self) -> Self {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo, 1), hi: up(hi, 1) }
    }

    /// Division by a strictly positive interval.
    pub fn div(self, o: Self) -> Self {
        assert!(o.lo > 0.0, "division by interval touching zero");
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo, 1), hi: up(hi, 1) }
    }

    pub fn sqrt(self) -> Self {
        let lo = if self.lo <= 0.0 { 0.0 } else { down(self.lo.sqrt(), 1).max(0.0) };
        let hi = if self.hi <= 0.0 { 0.0 } else { up(self.hi.sqrt(), 1) };
        Interval { lo, hi }
    }

    pub fn exp(self) -> Self {
        if self.lo == 0.0 && self.hi == 0.0 {
            return Interval::exact(1.0);
        }
        Interval {
            lo: down(self.lo.exp(), LIBM_SLACK).max(0.0),
            hi: up(self.hi.exp(), LIBM_SLACK),
        }
    }

    /// Natural log of a strictly positive interval.
    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0, "log of interval touching zero");
        Interval { lo: down(self.lo.ln(), LIBM_SLACK), hi: up(self.hi.ln(), LIBM_SLACK) }
    }

    /// `ln(1 + x)` for `x > -1`.
    pub fn ln_1p(self) -> Self {
        if self.lo == 0.0 && self.hi == 0.0 {
            return self;
        }
        let lo = if self.lo <= -1.0 { f64::NEG_INFINITY } else { down(self.lo.ln_1p(), LIBM_SLACK) };
        let hi = if self.hi <= -1.0 { f64::NEG_INFINITY } else { up(self.hi.ln_1p(), LIBM_SLACK) };
        Interval { lo, hi }
    }

    pub fn scale(self, k: u64) -> Self {
        self.mul(Interval::from_u64(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rational_enclosure_contains_value() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        let iv = Interval::from_rational(&r);
        assert!(iv.lo() < 1.0 / 3.0 + 1e-17 && iv.hi() > 1.0 / 3.0 - 1e-17);
        assert!(iv.lo() < iv.hi());
    }

    #[test]
    fn exact_zero_stays_zero() {
        let iv = Interval::from_rational(&BigRational::zero());
        assert_eq!(iv.lo(), 0.0);
        assert_eq!(iv.hi(), 0.0);
    }

    #[test]
    fn ops_enclose_reference_values() {
        let a = Interval::exact(0.1);
        let b = Interval::exact(0.7);
        let s = a.add(b);
        assert!(s.contains(0.1 + 0.7));
        let p = a.mul(b).exp().ln();
        assert!(p.lo() <= 0.07 && p.hi() >= 0.07);
        let q = Interval::exact(2.0).sqrt();
        assert!(q.contains(std::f64::consts::SQRT_2));
        let l = Interval::exact(-0.5).ln_1p();
        assert!(l.contains((0.5f64).ln()));
    }
}
