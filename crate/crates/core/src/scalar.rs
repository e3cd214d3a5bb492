//! The two numeric modes: exact big rationals and binary floats.
//!
//! Generic code only uses field operations, comparisons and a tolerance-aware
//! equality, so every identity is checked the same way in both modes: exactly
//! for [`Rational`], to a relative tolerance for `f64`.

use alloc::format;
use alloc::string::String;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Default relative tolerance for float-mode comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    /// `true` for exact arithmetic; tolerances are ignored in that case.
    const EXACT: bool;
    const MODE: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn div_ref(&self, other: &Self) -> Self;

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Natural logarithm, evaluated in floating point.
    fn ln(&self) -> f64;

    /// Exact equality in rational mode; `|a-b| <= tol * max(1, |a|, |b|)` in float mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Strict positivity (float mode: `> tol`).
    fn is_positive(&self, tol: f64) -> bool;

    fn abs_diff(&self, other: &Self) -> Self;

    /// `n/d` in rational mode, 17 significant digits in float mode.
    fn render(&self) -> String;

    /// Relative residual of an identity `lhs = rhs`, for reports.
    fn residual(lhs: &Self, rhs: &Self) -> f64 {
        let (a, b) = (lhs.to_f64(), rhs.to_f64());
        let scale = a.abs().max(b.abs()).max(1.0);
        (a - b).abs() / scale
    }

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items
            .into_iter()
            .fold(Self::zero(), |acc, v| acc.add_ref(v))
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() && (v != 0.0 || Zero::is_zero(self)) {
                return v;
            }
        }
        // Huge numerators/denominators: go through logarithms.
        let sign = if self.is_negative() { -1.0 } else { 1.0 };
        sign * libm::exp(big_ln(self.numer().abs()) - big_ln(self.denom().clone()))
    }
    fn ln(&self) -> f64 {
        big_ln(self.numer().clone()) - big_ln(self.denom().clone())
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn is_positive(&self, _tol: f64) -> bool {
        Signed::is_positive(self)
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn residual(lhs: &Self, rhs: &Self) -> f64 {
        if lhs == rhs {
            0.0
        } else {
            let d = Scalar::to_f64(&(lhs - rhs).abs());
            let scale = Scalar::to_f64(&lhs.abs())
                .max(Scalar::to_f64(&rhs.abs()))
                .max(1.0);
            // Never report an exact mismatch as a zero residual.
            (d / scale).max(f64::MIN_POSITIVE)
        }
    }
}

/// `ln` of a positive big integer without overflowing `f64`.
fn big_ln(n: BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return libm::log(ToPrimitive::to_f64(&n).unwrap_or(f64::NAN));
    }
    let shift = bits - 64;
    let top: BigInt = &n >> shift;
    libm::log(ToPrimitive::to_f64(&top).unwrap_or(f64::NAN)) + shift as f64 * core::f64::consts::LN_2
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ln(&self) -> f64 {
        libm::log(*self)
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= tol * scale
    }
    fn is_positive(&self, tol: f64) -> bool {
        *self > tol
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn render(&self) -> String {
        render_f64(*self)
    }
}

/// Decimal rendering with 17 significant digits (`inf` for +infinity).
pub fn render_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Parses `n/d`, an integer, or a decimal literal such as `0.25` or `1e-12`
/// (converted exactly).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.starts_with(['+', '-']) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if shift >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-shift) as usize))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_renders_reduced() {
        let r = Rational::from_ratio(6, 8);
        assert_eq!(r.render(), "3/4");
        assert_eq!(parse_rational("3/4"), Some(r.clone()));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.75"), Some(r.clone()));
        assert_eq!(parse_rational("75e-2"), Some(r));
        assert_eq!(parse_rational("-1.5"), Some(Rational::from_ratio(-3, 2)));
        assert_eq!(parse_rational("1e-12"), Some(Rational::from_ratio(1, 1_000_000_000_000)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn float_tolerance_is_relative_above_one() {
        assert!(1e6f64.approx_eq(&(1e6 + 1e-7), 1e-12));
        assert!(!1e6f64.approx_eq(&(1e6 + 1e-3), 1e-12));
        assert!(0.0f64.approx_eq(&1e-13, 1e-12));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(big.clone() * 3, big * 4);
        assert_eq!(Scalar::to_f64(&r), 0.75);
        let tiny = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(2), 2000));
        assert!(Scalar::to_f64(&tiny) == 0.0 || Scalar::to_f64(&tiny) < 1e-300);
        assert!((Scalar::ln(&tiny) + 2000.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn exact_residual_never_zero_on_mismatch() {
        let a = Rational::from_ratio(1, 3);
        let b = Rational::from_ratio(1, 3) + Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), 400));
        assert!(Rational::residual(&a, &b) > 0.0);
        assert_eq!(Rational::residual(&a, &a), 0.0);
    }
}
