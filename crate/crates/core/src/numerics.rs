//! Exact integer/rational arithmetic and the combinatorial primitives the
//! rest of the crate is built on.
//!
//! Exact values are [`BigInt`] / [`BigRational`] from the `num` family.
//! [`RealValue`] carries either an exact rational or a float and keeps track
//! of which one it is, so that zero tests stay exact whenever possible.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default tolerance for deciding that a float value is zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

/// Falling factorial `(x)_q = x (x-1) ... (x-q+1)`, with `(x)_0 = 1`.
///
/// Total in `x`: negative arguments are evaluated by the product definition.
pub fn falling_factorial(x: i64, q: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..q as i64 {
        let factor = x - i;
        if factor == 0 {
            return BigInt::zero();
        }
        acc *= factor;
    }
    acc
}

/// Falling factorial of a big argument.
pub fn falling_factorial_big(x: &BigInt, q: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..q {
        let factor = x - BigInt::from(i);
        if factor.is_zero() {
            return BigInt::zero();
        }
        acc *= factor;
    }
    acc
}

/// Falling factorial in `i128`, `None` on overflow.
pub fn falling_factorial_i128(x: i128, q: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..q as i128 {
        let factor = x - i;
        if factor == 0 {
            return Some(0);
        }
        acc = acc.checked_mul(factor)?;
    }
    Some(acc)
}

/// Binomial coefficient; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = core::cmp::min(k as u64, n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient as `u128`, `None` on overflow. Zero out of range.
pub fn binomial_u128(n: u64, k: i64) -> Option<u128> {
    if k < 0 || k as u64 > n {
        return Some(0);
    }
    let k = core::cmp::min(k as u64, n - k as u64);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// `n!` exactly.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `ln(n!)` in double precision.
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `Π num_i! / Π den_i!` in double precision.
///
/// Factorials are paired largest-with-largest so that only the quotients
/// `a!/b!` are ever multiplied out; the running product is kept near unity
/// by alternating growing and shrinking factors.
pub fn factorial_ratio(num: &[u32], den: &[u32]) -> f64 {
    let mut num: alloc::vec::Vec<u32> = num.to_vec();
    let mut den: alloc::vec::Vec<u32> = den.to_vec();
    let len = num.len().max(den.len());
    num.resize(len, 0);
    den.resize(len, 0);
    num.sort_unstable_by(|a, b| b.cmp(a));
    den.sort_unstable_by(|a, b| b.cmp(a));
    let mut up: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
    let mut down: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
    for (a, b) in num.iter().zip(den.iter()) {
        if a > b {
            up.extend((b + 1..=*a).map(|k| k as f64));
        } else {
            down.extend((a + 1..=*b).map(|k| k as f64));
        }
    }
    let mut acc = 1.0;
    let (mut i, mut j) = (0, 0);
    while i < up.len() || j < down.len() {
        if j >= down.len() || (i < up.len() && acc <= 1.0) {
            acc *= up[i];
            i += 1;
        } else {
            acc /= down[j];
            j += 1;
        }
    }
    acc
}

/// Converts an exact rational to the nearest double.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge magnitudes: fall back to a ratio of floats
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Builds `num/den` in canonical form. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer power of a rational (negative exponents invert).
pub fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let base = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// A real number that is either exact or a double.
///
/// Mixed arithmetic promotes to `Float`; an exact result is never produced
/// from a float operand.
#[derive(Clone, Debug, PartialEq)]
pub enum RealValue {
    Exact(BigRational),
    Float(f64),
}

impl RealValue {
    pub fn zero_exact() -> Self {
        RealValue::Exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RealValue::Exact(_))
    }

    /// Exact zero test. Floats are never exactly zero here unless they are
    /// literally `0.0`; use [`RealValue::is_zero_within`] for tolerance tests.
    pub fn is_zero(&self) -> bool {
        match self {
            RealValue::Exact(x) => x.is_zero(),
            RealValue::Float(x) => *x == 0.0,
        }
    }

    /// Zero test: exact for `Exact`, `|x| <= tol` for `Float`.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            RealValue::Exact(x) => x.is_zero(),
            RealValue::Float(x) => x.abs() <= tol,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RealValue::Exact(x) => rational_to_f64(x),
            RealValue::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            RealValue::Exact(x) => Some(x),
            RealValue::Float(_) => None,
        }
    }

    pub fn abs(&self) -> RealValue {
        match self {
            RealValue::Exact(x) => RealValue::Exact(x.abs()),
            RealValue::Float(x) => RealValue::Float(x.abs()),
        }
    }
}

impl fmt::Display for RealValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealValue::Exact(x) => write!(f, "{x}"),
            RealValue::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<BigRational> for RealValue {
    fn from(x: BigRational) -> Self {
        RealValue::Exact(x)
    }
}

impl From<f64> for RealValue {
    fn from(x: f64) -> Self {
        RealValue::Float(x)
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for RealValue {
            type Output = RealValue;
            fn $method(self, rhs: RealValue) -> RealValue {
                match (self, rhs) {
                    (RealValue::Exact(a), RealValue::Exact(b)) => RealValue::Exact(a $op b),
                    (a, b) => RealValue::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl<'a> $trait<&'a RealValue> for &'a RealValue {
            type Output = RealValue;
            fn $method(self, rhs: &'a RealValue) -> RealValue {
                match (self, rhs) {
                    (RealValue::Exact(a), RealValue::Exact(b)) => RealValue::Exact(a $op b),
                    (a, b) => RealValue::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);

impl Neg for RealValue {
    type Output = RealValue;
    fn neg(self) -> RealValue {
        match self {
            RealValue::Exact(x) => RealValue::Exact(-x),
            RealValue::Float(x) => RealValue::Float(-x),
        }
    }
}

/// Integer square root (floor) of a non-negative integer.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    // correct the float estimate
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
