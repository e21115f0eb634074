//! Floating-point types the time steppers run in: binary64 and
//! double-double (about 32 significant digits).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::exact::Rational;

pub use qd::Quad as DoubleDouble;

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;
    /// Nearest value, up to the precision of the type.
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_rational(r: &Rational) -> Self {
        crate::exact::to_f64(r)
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// `m` as a double-double; exact when `m` fits in 106 bits.
fn big_to_dd(m: &BigInt) -> DoubleDouble {
    let hi = m.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return DoubleDouble::from(hi);
    }
    let rest = m - BigInt::from_f64(hi).unwrap_or_else(BigInt::zero);
    DoubleDouble::from(hi) + DoubleDouble::from(rest.to_f64().unwrap_or(0.0))
}

impl Real for DoubleDouble {
    fn from_f64(v: f64) -> Self {
        DoubleDouble::from(v)
    }

    fn from_rational(r: &Rational) -> Self {
        if r.is_zero() {
            return DoubleDouble::ZERO;
        }
        let (n, d) = (r.numer().abs(), r.denom().clone());
        // scale so the integer quotient carries about 110 bits
        let shift = 110 - (n.bits() as i64 - d.bits() as i64);
        let m = if shift >= 0 {
            (n << shift as usize) / d
        } else {
            n / (d << (-shift) as usize)
        };
        let mut v = big_to_dd(&m);
        // multiply by 2^-shift in exactly representable pieces
        let mut e = -shift;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            let f = 2f64.powi(step as i32);
            v = DoubleDouble(v.0 * f, v.1 * f);
            e -= step;
        }
        if r.is_negative() {
            -v
        } else {
            v
        }
    }

    fn to_f64(self) -> f64 {
        self.0 + self.1
    }

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
}
