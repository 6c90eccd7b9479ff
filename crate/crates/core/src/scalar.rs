//! Numbers the engine computes with: exact rationals or binary floats of a
//! configurable precision.
//!
//! Arithmetic between two exact values stays exact. As soon as a float is
//! involved the result is a float at the larger of the operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu::base::Sign;
use dashu::float::round::mode::HalfEven;
use dashu::float::FBig;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{DomainErrorKind, Error, Result};

/// Binary floating point with round-half-even.
pub type Float = FBig<HalfEven, 2>;

/// Working precision (bits) used when an exact computation has to fall back
/// to floating point and nothing else fixes the precision.
pub const DEFAULT_PRECISION: usize = 128;

/// Smallest float precision a [`Scalar`] will carry.
pub const MIN_PRECISION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Exact,
    /// Binary float with the given precision in bits.
    Float(usize),
}

impl NumericMode {
    pub fn is_exact(self) -> bool {
        matches!(self, NumericMode::Exact)
    }

    /// Convert `value` into this mode. Floats are never turned back into
    /// exact values.
    pub fn coerce(self, value: &Scalar) -> Result<Scalar> {
        match self {
            NumericMode::Exact => match value {
                Scalar::Exact(_) => Ok(value.clone()),
                Scalar::Float(_) => Err(Error::MixedMode),
            },
            NumericMode::Float(p) => Ok(value.promote(p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(RBig),
    Float(Float),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(RBig::ZERO)
    }

    pub fn one() -> Self {
        Scalar::Exact(RBig::ONE)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(RBig::from(n))
    }

    /// `numer / denom`; panics if `denom` is zero.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar::Exact(RBig::from_parts_signed(IBig::from(numer), IBig::from(denom)))
    }

    pub fn exact(value: RBig) -> Self {
        Scalar::Exact(value)
    }

    /// Wrap a float, raising its precision to at least [`MIN_PRECISION`].
    pub fn float(value: Float) -> Self {
        if value.precision() < MIN_PRECISION {
            Scalar::Float(value.with_precision(MIN_PRECISION).value())
        } else {
            Scalar::Float(value)
        }
    }

    /// Parse a numeric literal.
    ///
    /// Integers (`3`, `-7`) and rationals (`19/6`) are exact; decimal and
    /// scientific literals (`1.3`, `2e-5`) become floats at `precision` bits.
    pub fn parse(text: &str, precision: usize) -> Option<Scalar> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n = parse_integer(n.trim())?;
            let d = parse_integer(d.trim())?;
            if d.is_zero() {
                return None;
            }
            return Some(Scalar::Exact(RBig::from_parts_signed(n, d)));
        }
        if let Some(n) = parse_integer(text) {
            return Some(Scalar::Exact(RBig::from(n)));
        }
        let exact = parse_decimal_exact(text)?;
        Some(Scalar::Exact(exact).promote(precision))
    }

    /// Parse a literal, reading decimals as the exact fractions they denote.
    pub fn parse_exact(text: &str) -> Option<Scalar> {
        match Scalar::parse(text, MIN_PRECISION)? {
            s @ Scalar::Exact(_) => Some(s),
            Scalar::Float(_) => parse_decimal_exact(text.trim()).map(Scalar::Exact),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Precision in bits, `None` for exact values.
    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(f) => Some(f.precision()),
        }
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Scalar::Exact(_) => NumericMode::Exact,
            Scalar::Float(f) => NumericMode::Float(f.precision()),
        }
    }

    pub fn as_exact(&self) -> Option<&RBig> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&Float> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(f) => Some(f),
        }
    }

    /// Value as a float of exactly `precision` bits (at least [`MIN_PRECISION`]).
    pub fn to_float(&self, precision: usize) -> Float {
        let precision = precision.max(MIN_PRECISION);
        match self {
            Scalar::Exact(r) => r.to_float::<HalfEven, 2>(precision).value(),
            Scalar::Float(f) if f.precision() == precision => f.clone(),
            Scalar::Float(f) => f.clone().with_precision(precision).value(),
        }
    }

    /// Same value as a float at `precision` bits.
    pub fn promote(&self, precision: usize) -> Scalar {
        Scalar::Float(self.to_float(precision))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_float::<HalfEven, 2>(64).value().to_f64().value(),
            Scalar::Float(f) => f.to_f64().value(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => f.repr().is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Float(f) => f.repr().is_one(),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let sign = match self {
            Scalar::Exact(r) => r.sign(),
            Scalar::Float(f) => f.sign(),
        };
        match sign {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Whether the value is an integer (exact values only).
    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_int(),
            Scalar::Float(_) => false,
        }
    }

    /// Numeric ordering; exact and float values are compared exactly.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Scalar::Exact(a), Scalar::Float(b)) => a.cmp(&float_to_rational(b)),
            (Scalar::Float(a), Scalar::Exact(b)) => float_to_rational(a).cmp(b),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(DomainErrorKind::DivisionByZero.into());
        }
        Ok(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => {
                let p = max_precision(self, rhs);
                Scalar::Float(self.to_float(p) / rhs.to_float(p))
            }
        })
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().checked_div(self)
    }

    /// Integer power; exact for exact bases.
    pub fn powi(&self, exponent: i64) -> Result<Scalar> {
        if exponent < 0 && self.is_zero() {
            return Err(DomainErrorKind::DivisionByZero.into());
        }
        let magnitude = exponent.unsigned_abs() as usize;
        let raised = match self {
            Scalar::Exact(r) => Scalar::Exact(r.pow(magnitude)),
            Scalar::Float(f) => Scalar::Float(f.powi(IBig::from(magnitude))),
        };
        if exponent < 0 {
            raised.recip()
        } else {
            Ok(raised)
        }
    }

    /// Rational power. Integer exponents go through [`Scalar::powi`];
    /// anything else is computed in floating point (`precision` applies when
    /// the base is exact) and needs a non-negative base.
    pub fn pow_rational(&self, exponent: &RBig, precision: usize) -> Result<Scalar> {
        if exponent.is_int() {
            let e = i64::try_from(exponent.numerator())
                .map_err(|_| Error::InvalidArgument("exponent out of range".into()))?;
            return self.powi(e);
        }
        match self.signum() {
            -1 => Err(DomainErrorKind::FractionalPowerOfNegative.into()),
            0 if exponent.sign() == Sign::Negative => Err(DomainErrorKind::DivisionByZero.into()),
            0 => Ok(Scalar::Float(Scalar::zero().to_float(self.working_precision(precision)))),
            _ => {
                let p = self.working_precision(precision);
                let base = self.to_float(p);
                let e: Float = exponent.to_float::<HalfEven, 2>(p).value();
                check_exponent(base.ln().to_f64().value() * exponent.to_f64().value())?;
                Ok(Scalar::Float(with_context(base.powf(&e), p)))
            }
        }
    }

    /// e^x. Always a float.
    pub fn exp(&self, precision: usize) -> Result<Scalar> {
        check_exponent(self.to_f64())?;
        let p = self.working_precision(precision);
        Ok(Scalar::Float(with_context(self.to_float(p).exp(), p)))
    }

    /// Natural logarithm. Always a float.
    pub fn ln(&self, precision: usize) -> Result<Scalar> {
        if self.signum() <= 0 {
            return Err(DomainErrorKind::LogNonPositive.into());
        }
        let p = self.working_precision(precision);
        Ok(Scalar::Float(with_context(self.to_float(p).ln(), p)))
    }

    fn working_precision(&self, fallback: usize) -> usize {
        self.precision().unwrap_or(fallback).max(MIN_PRECISION)
    }

    /// `n!` as an exact scalar.
    pub fn factorial(n: usize) -> Scalar {
        let f = (1..=n).fold(UBig::ONE, |acc, k| acc * UBig::from(k));
        Scalar::Exact(RBig::from(f))
    }

    /// Number of decimal significant digits that round-trip a float of
    /// `precision` bits.
    pub fn decimal_digits(precision: usize) -> usize {
        (precision as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }
}

fn max_precision(a: &Scalar, b: &Scalar) -> usize {
    a.precision()
        .into_iter()
        .chain(b.precision())
        .max()
        .unwrap_or(DEFAULT_PRECISION)
}

fn float_to_rational(f: &Float) -> RBig {
    RBig::try_from(f.clone()).expect("finite float")
}

fn parse_integer(text: &str) -> Option<IBig> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.strip_prefix('+').unwrap_or(text).parse().ok()
}

/// `e^x` for `|x|` beyond about `10^18` has a binary exponent outside the
/// float format's range.
fn check_exponent(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() < 1e18 {
        Ok(())
    } else {
        Err(DomainErrorKind::Overflow.into())
    }
}

/// Results that happen to be exact (`ln 1`, `exp 0`) come back from the
/// float library without a precision; put it back.
fn with_context(f: Float, precision: usize) -> Float {
    if f.precision() == precision {
        f
    } else {
        f.with_precision(precision).value()
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
pub fn parse_decimal_exact(text: &str) -> Option<RBig> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => {
            let e = &body[i + 1..];
            let e_digits = e.strip_prefix(['-', '+']).unwrap_or(e);
            if e_digits.is_empty() || !e_digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            (&body[..i], e.parse::<i64>().ok()?)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: IBig = format!("{int_part}{frac_part}0").parse().ok()?;
    let shift = exponent - frac_part.len() as i64 - 1;
    let ten = RBig::from(10u8);
    let scale = ten.pow(shift.unsigned_abs() as usize);
    let mut value = RBig::from(digits);
    value = if shift >= 0 { value * scale } else { value / scale };
    Some(if negative { -value } else { value })
}

impl fmt::Display for Scalar {
    /// Exact values print as `p/q` (or `p` for integers); floats print in
    /// decimal with enough digits to read back the same binary value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denominator().is_one() {
                    write!(f, "{}", r.numerator())
                } else {
                    write!(f, "{}/{}", r.numerator(), r.denominator())
                }
            }
            Scalar::Float(x) => {
                let digits = Scalar::decimal_digits(x.precision());
                let decimal = x.clone().with_base_and_precision::<10>(digits).value();
                write!(f, "{decimal}")
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r.clone()),
            Scalar::Float(x) => Scalar::Float(-x.clone()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => {
                        let p = max_precision(self, rhs);
                        Scalar::Float(self.to_float(p).$method(rhs.to_float(p)))
                    }
                }
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<RBig> for Scalar {
    fn from(r: RBig) -> Self {
        Scalar::Exact(r)
    }
}
