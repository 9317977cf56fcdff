//! Exact arithmetic in the quadratic field ℚ(√2).
//!
//! Normalized adjacency entries of the weighted graphs in this crate are
//! always of the form `q` or `q·√2` with `q` rational, because every degree
//! is a power of two times a small integer. [`QSqrt2`] lets identities between
//! matrix powers be checked with `==` instead of a tolerance.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// `rational + surd·√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub rational: Rational,
    pub surd: Rational,
}

impl QSqrt2 {
    pub fn new(rational: Rational, surd: Rational) -> Self {
        Self { rational, surd }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::new(q, Rational::zero())
    }

    pub fn sqrt2() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    /// Exact square root of a nonnegative rational, when it lies in ℚ(√2).
    pub fn sqrt_of(q: Rational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        // √(n/d) = √(n·d)/d
        let (n, d) = (*q.numer(), *q.denom());
        let prod = n.checked_mul(d)?;
        if let Some(s) = exact_isqrt(prod) {
            return Some(Self::from_rational(Rational::new(s, d)));
        }
        if prod % 2 == 0 {
            if let Some(s) = exact_isqrt(prod / 2) {
                return Some(Self::new(Rational::zero(), Rational::new(s, d)));
            }
        }
        None
    }

    /// Field norm `r² − 2s²`.
    pub fn norm(&self) -> Rational {
        self.rational * self.rational - Rational::from_integer(2) * self.surd * self.surd
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational, -self.surd)
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Self::new(c.rational / n, c.surd / n))
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.rational.numer().to_f64().unwrap_or(f64::NAN) / self.rational.denom().to_f64().unwrap_or(f64::NAN);
        let s = self.surd.numer().to_f64().unwrap_or(f64::NAN) / self.surd.denom().to_f64().unwrap_or(f64::NAN);
        r + s * std::f64::consts::SQRT_2
    }
}

fn exact_isqrt(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let s = v.sqrt();
    (s * s == v).then_some(s)
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rational + rhs.rational, self.surd + rhs.surd)
    }
}

impl AddAssign for QSqrt2 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rational - rhs.rational, self.surd - rhs.surd)
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.surd)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = Rational::from_integer(2);
        Self::new(
            self.rational * rhs.rational + two * self.surd * rhs.surd,
            self.rational * rhs.surd + self.surd * rhs.rational,
        )
    }
}

impl Div for QSqrt2 {
    type Output = Self;
    /// Panics on division by zero, like the rational it wraps.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip().expect("division by zero in Q(sqrt 2)")
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.surd.is_zero()) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}√2", self.surd),
            (false, false) => write!(f, "{} + {}√2", self.rational, self.surd),
        }
    }
}
