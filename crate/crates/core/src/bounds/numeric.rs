//! Decimal approximations with directed rounding: roots and logarithms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{rational_pow, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

impl Rounding {
    fn flip(self) -> Self {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
        }
    }
}

/// `scaled / 10^digits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    scaled: BigInt,
    digits: u32,
}

fn ten_pow(digits: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), digits as usize)
}

impl Decimal {
    pub fn new(scaled: BigInt, digits: u32) -> Self {
        Decimal { scaled, digits }
    }

    /// Rounds `v` to `digits` fractional digits toward −∞ (`Down`) or +∞ (`Up`).
    pub fn from_rational(v: &Rational, digits: u32, rounding: Rounding) -> Self {
        let x = v * Rational::from_integer(ten_pow(digits));
        let scaled = match rounding {
            Rounding::Down => x.floor().to_integer(),
            Rounding::Up => x.ceil().to_integer(),
        };
        Decimal { scaled, digits }
    }

    /// Round-half-even, for display values that are not bounds.
    pub fn nearest(v: &Rational, digits: u32) -> Self {
        let x = v * Rational::from_integer(ten_pow(digits));
        let fl = x.floor();
        let frac = &x - &fl;
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let mut scaled = fl.to_integer();
        if frac > half || (frac == half && scaled.is_odd()) {
            scaled += 1;
        }
        Decimal { scaled, digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.scaled.clone(), ten_pow(self.digits))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.scaled.is_negative() { "-" } else { "" };
        let mag = self.scaled.abs().to_string();
        if self.digits == 0 {
            return write!(f, "{sign}{mag}");
        }
        let digits = self.digits as usize;
        let padded = if mag.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
        } else {
            mag
        };
        let (int, frac) = padded.split_at(padded.len() - digits);
        write!(f, "{sign}{int}.{frac}")
    }
}

/// Decimal `r` with `r^n ≤ v` (`Down`) or `r^n ≥ v` (`Up`), exact to `digits`
/// fractional digits. Negative `v` is accepted for odd `n`.
pub fn nth_root_directed(v: &Rational, n: u32, digits: u32, rounding: Rounding) -> Result<Decimal> {
    if n == 0 {
        return Err(Error::InvalidArgument("root index must be positive".into()));
    }
    if v.is_negative() {
        if n.is_multiple_of(2) {
            return Err(Error::NegativeMean { k: n });
        }
        let r = nth_root_directed(&-v, n, digits, rounding.flip())?;
        return Ok(Decimal::new(-r.scaled, digits));
    }
    let scale = ten_pow(digits);
    let target = v.numer() * num_traits::pow(scale, n as usize);
    let den = v.denom();
    let floor_arg = target.div_floor(den);
    let mut r = floor_arg.nth_root(n);
    let exact = num_traits::pow(r.clone(), n as usize) * den == target;
    if rounding == Rounding::Up && !exact {
        r += 1;
    }
    let out = Decimal::new(r, digits);
    let back = rational_pow(&out.to_rational(), n);
    let ok = match rounding {
        Rounding::Down => &back <= v,
        Rounding::Up => &back >= v,
    };
    if !ok {
        return Err(Error::InvalidArgument("directed root failed verification".into()));
    }
    Ok(out)
}

/// Bounds `lo ≤ ln y ≤ hi` for `1 ≤ y`, via `ln y = 2 atanh((y-1)/(y+1))`.
/// The gap is below `10^-digits`.
fn ln_near_one(y: &Rational, digits: u32) -> (Rational, Rational) {
    let z = (y - Rational::one()) / (y + Rational::one());
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let tol = Rational::new(BigInt::one(), ten_pow(digits));
    let z2 = &z * &z;
    let tail_scale = Rational::from_integer(BigInt::from(2)) / (Rational::one() - &z2);
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut i: u64 = 0;
    loop {
        sum += &power * Rational::new(BigInt::from(2), BigInt::from(2 * i + 1));
        power *= &z2;
        i += 1;
        // remaining terms ≤ 2 z^{2i+1} / ((2i+1)(1 - z²))
        let tail = &power * &tail_scale / Rational::from_integer(BigInt::from(2 * i + 1));
        if tail < tol {
            return (sum.clone(), sum + tail);
        }
    }
}

/// Rational bounds `lo ≤ ln x ≤ hi` with `hi - lo` of order `10^-digits`.
pub fn ln_bounds(x: &Rational, digits: u32) -> Result<(Rational, Rational)> {
    if !x.is_positive() {
        return Err(Error::NonPositive {
            what: "logarithm argument",
        });
    }
    if x < &Rational::one() {
        let (lo, hi) = ln_bounds(&x.recip(), digits)?;
        return Ok((-hi, -lo));
    }
    let mut j: u64 = 0;
    let two = Rational::from_integer(BigInt::from(2));
    let mut y = x.clone();
    while y >= two {
        y /= &two;
        j += 1;
    }
    let extra = (j.max(1) as f64).log10().ceil() as u32 + 1;
    let (l2_lo, l2_hi) = ln_near_one(&two, digits + extra);
    let (ly_lo, ly_hi) = ln_near_one(&y, digits + 1);
    let jr = Rational::from_integer(BigInt::from(j));
    Ok((&jr * l2_lo + ly_lo, jr * l2_hi + ly_hi))
}
