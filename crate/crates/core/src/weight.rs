//! Arithmetic backends for probabilities.
//!
//! Every probability-carrying type in the crate is generic over [`Weight`].
//! Two backends exist: `f64` for general work and [`Exact`] (arbitrary
//! precision rationals) for identity checks on small graphs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational probability.
pub type Exact = BigRational;

pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `true` when arithmetic is exact and tolerances collapse to equality.
    const EXACT: bool;

    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as u64, 1)
    }

    fn to_f64(&self) -> f64;

    /// Equality in exact mode, `|a - b| <= tol` otherwise.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    /// Text form used in tables: `p/q` for rationals, 17 significant
    /// digits for floats.
    fn render(&self) -> String;

    fn parse_weight(s: &str) -> Result<Self>;

    fn is_negative_weight(&self) -> bool {
        *self < Self::zero()
    }
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn render(&self) -> String {
        render_f64(*self)
    }

    fn parse_weight(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| Error::parse_weight(s))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::parse_weight(s))?;
            return Ok(num / den);
        }
        s.parse().map_err(|_| Error::parse_weight(s))
    }
}

impl Weight for Exact {
    const EXACT: bool = true;

    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_weight(s: &str) -> Result<Self> {
        parse_exact(s.trim()).ok_or_else(|| Error::parse_weight(s))
    }
}

/// 17 significant digits, scientific notation. Round-trips every `f64`.
pub fn render_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" vs "0" differences leaking into byte-level comparisons
        return "0".to_string();
    }
    format!("{:.16e}", x)
}

/// Parses `a/b`, an integer, or a decimal with optional exponent into an
/// exact rational. `0.7` becomes `7/10`, not the nearest binary fraction.
fn parse_exact(s: &str) -> Option<Exact> {
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_exact(num.trim())?;
        let den = parse_exact(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Converts between backends. Float to exact goes through the decimal
/// rendering, so `0.7` maps to `7/10`.
pub fn convert<A: Weight, B: Weight>(a: &A) -> B {
    if A::EXACT == B::EXACT {
        // same backend: render/parse is lossless for both
        return B::parse_weight(&a.render()).expect("rendered weight parses");
    }
    if B::EXACT {
        let shortest = format!("{}", a.to_f64());
        B::parse_weight(&shortest).expect("float renders as decimal")
    } else {
        B::parse_weight(&format!("{}", a.to_f64())).expect("float parses")
    }
}
