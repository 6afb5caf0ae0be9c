//! Forward-mode dual numbers.
//!
//! The discrete geometry routines are generic over [`Real`] so that the same
//! code path yields both plain `f64` values and exact directional derivatives
//! (used for the grid branch of the path-energy gradient and as a cross-check
//! for the hand-derived curve gradients).

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lift(x: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln_1p(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn abs(self) -> Self;
    fn zero() -> Self {
        Self::lift(0.0)
    }
}

impl Real for f64 {
    #[inline]
    fn lift(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Value plus one derivative, propagated by the chain rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    #[inline]
    pub fn var(v: f64) -> Self {
        Dual { v, d: 1.0 }
    }
    #[inline]
    pub fn con(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

impl PartialOrd for Dual {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, o: Dual) -> Dual {
        Dual {
            v: self.v / o.v,
            d: (self.d * o.v - self.v * o.d) / (o.v * o.v),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

impl Real for Dual {
    #[inline]
    fn lift(x: f64) -> Self {
        Dual::con(x)
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        // d(sqrt) blows up at 0; the callers guard against zero-length elements.
        Dual { v: s, d: if s > 0.0 { self.d / (2.0 * s) } else { 0.0 } }
    }
    fn ln_1p(self) -> Self {
        Dual { v: self.v.ln_1p(), d: self.d / (1.0 + self.v) }
    }
    fn atan2(self, x: Self) -> Self {
        let y = self;
        let denom = x.v * x.v + y.v * y.v;
        Dual {
            v: y.v.atan2(x.v),
            d: if denom > 0.0 { (x.v * y.d - y.v * x.d) / denom } else { 0.0 },
        }
    }
    fn abs(self) -> Self {
        Dual { v: self.v.abs(), d: if self.v >= 0.0 { self.d } else { -self.d } }
    }
}
