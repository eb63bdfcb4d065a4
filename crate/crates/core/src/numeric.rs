//! Arithmetic backends and exact integer combinatorics.
//!
//! Every probability-valued routine is generic over [`Scalar`], implemented
//! for `f64` (tolerance `1e-9`) and [`BigRational`] (exact).

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic mode selector used by the CLI and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    /// Comparison slack: `1e-9` for floats, zero for exact arithmetic.
    fn tol() -> Self;

    fn from_biguint(v: &BigUint) -> Self;

    fn from_rational(v: &BigRational) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn powu(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("integer conversion")
    }

    fn of_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer conversion")
    }

    /// Text form used in dumps: 12 significant digits or an exact `a/b`.
    fn render(&self) -> String;

    /// JSON value: a number for floats, an `a/b` string for rationals.
    fn to_json(&self) -> serde_json::Value;

    /// `floor(self)` for non-negative values.
    fn floor_u64(&self) -> u64;

    /// Lossless text form: shortest round-trip decimal or `a/b`.
    fn to_exact_text(&self) -> String;

    fn parse_exact_text(text: &str) -> Result<Self>;

    /// `|a - b| <= tol` scaled by magnitude for floats.
    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        let diff = (self.clone() - other.clone()).abs();
        if Self::MODE == Mode::Rational {
            return diff <= tol.clone();
        }
        let scale = Self::one() + max_of(self.abs(), other.abs());
        diff <= tol.clone() * scale
    }
}

fn max_of<S: PartialOrd>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn tol() -> Self {
        1e-9
    }

    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(v: &BigRational) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn powu(&self, e: u64) -> Self {
        match i32::try_from(e) {
            Ok(e) => self.powi(e),
            Err(_) => self.powf(e as f64),
        }
    }

    fn render(&self) -> String {
        format_sig(*self, 12)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }

    fn floor_u64(&self) -> u64 {
        self.floor() as u64
    }

    fn to_exact_text(&self) -> String {
        self.to_string()
    }

    fn parse_exact_text(text: &str) -> Result<Self> {
        text.trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse number `{text}`")))
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Rational;

    fn tol() -> Self {
        BigRational::zero()
    }

    fn from_biguint(v: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(v.clone()))
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.render())
    }

    fn floor_u64(&self) -> u64 {
        self.floor().to_integer().to_u64().unwrap_or(0)
    }

    fn to_exact_text(&self) -> String {
        self.render()
    }

    fn parse_exact_text(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

/// Formats `x` with `sig` significant digits, trimming trailing zeros.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Parses `"a/b"`, an integer, or a finite decimal (optionally with exponent)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse number `{text}`"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0")
        .parse()
        .map_err(|_| bad())?;
    let all = all / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Parses a number in the requested arithmetic.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    parse_rational(text).map(|r| S::from_rational(&r))
}

/// `C(n, k)` as a big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` with the convention that negative arguments give zero.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

/// Multinomial coefficient `n! / prod(parts!)` where `n = sum(parts)`.
pub fn multinomial<I: IntoIterator<Item = u64>>(parts: I) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for part in parts {
        total += part;
        acc *= binomial(total, part);
    }
    acc
}
