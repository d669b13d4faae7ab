//! Exact scalars: rationals and quadratic surds `a + b·√d`.
//!
//! Reduced cost functions divide terminal-terminal edges by √2 or by
//! `(1 + √3) / 2`, so thresholds such as `gain > 0` have to be decided in
//! `Q(√d)`. Every element carries its radicand; elements with a zero
//! irrational part are plain rationals and combine with any radicand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p`, `p/q` or a decimal like `1.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac = BigInt::from_str(frac).ok()?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(numer, scale));
    }
    BigInt::from_str(text).ok().map(Rational::from_integer)
}

/// Formats a rational as `p` or `p/q`.
pub fn fraction_string(value: &Rational) -> String {
    value.to_string()
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

fn is_squarefree(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u32;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// An element `rational + irrational·√radicand` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: Rational,
    irrational: Rational,
    /// 0 exactly when `irrational == 0`.
    radicand: u32,
}

impl Surd {
    pub fn new(rational: Rational, irrational: Rational, radicand: u32) -> Surd {
        if irrational.is_zero() {
            return Surd::from_rational(rational);
        }
        assert!(is_squarefree(radicand), "radicand {radicand} must be squarefree and > 1");
        Surd { rational, irrational, radicand }
    }

    pub fn from_rational(rational: Rational) -> Surd {
        Surd { rational, irrational: Rational::zero(), radicand: 0 }
    }

    pub fn from_integer(value: i64) -> Surd {
        Surd::from_rational(integer(value))
    }

    pub fn zero() -> Surd {
        Surd::from_integer(0)
    }

    pub fn one() -> Surd {
        Surd::from_integer(1)
    }

    /// `√d` for a squarefree `d > 1`.
    pub fn sqrt(d: u32) -> Surd {
        Surd::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.irrational
    }

    pub fn radicand(&self) -> Option<u32> {
        (self.radicand != 0).then_some(self.radicand)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational.clone())
    }

    fn joint_radicand(&self, other: &Surd) -> u32 {
        match (self.radicand, other.radicand) {
            (0, d) | (d, 0) => d,
            (a, b) if a == b => a,
            (a, b) => panic!("cannot combine elements of Q(√{a}) and Q(√{b})"),
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sign = |q: &Rational| -> i32 {
            if q.is_positive() {
                1
            } else if q.is_negative() {
                -1
            } else {
                0
            }
        };
        let a = sign(&self.rational);
        let b = sign(&self.irrational);
        if b == 0 {
            return a;
        }
        if a == 0 || a == b {
            return b;
        }
        // a and b have opposite signs: compare a² with b²·d.
        let lhs = &self.rational * &self.rational;
        let rhs = &self.irrational * &self.irrational * integer(self.radicand as i64);
        match lhs.cmp(&rhs) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Galois conjugate `a - b√d`.
    pub fn conjugate(&self) -> Surd {
        Surd { rational: self.rational.clone(), irrational: -&self.irrational, radicand: self.radicand }
    }

    pub fn recip(&self) -> Surd {
        assert!(!self.is_zero(), "division by zero");
        if self.is_rational() {
            return Surd::from_rational(self.rational.recip());
        }
        // (a + b√d)^-1 = (a - b√d) / (a² - d b²)
        let norm = &self.rational * &self.rational
            - &self.irrational * &self.irrational * integer(self.radicand as i64);
        Surd::new(&self.rational / &norm, -&self.irrational / &norm, self.radicand)
    }

    pub fn scale(&self, factor: &Rational) -> Surd {
        Surd::new(&self.rational * factor, &self.irrational * factor, self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        let root = (self.radicand as f64).sqrt();
        rational_to_f64(&self.rational) + rational_to_f64(&self.irrational) * root
    }
}

impl Default for Surd {
    fn default() -> Self {
        Surd::zero()
    }
}

impl From<Rational> for Surd {
    fn from(value: Rational) -> Surd {
        Surd::from_rational(value)
    }
}

impl From<&Rational> for Surd {
    fn from(value: &Rational) -> Surd {
        Surd::from_rational(value.clone())
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, other: &Surd) -> Surd {
        let d = self.joint_radicand(other);
        Surd::new(&self.rational + &other.rational, &self.irrational + &other.irrational, d)
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, other: &Surd) -> Surd {
        let d = self.joint_radicand(other);
        Surd::new(&self.rational - &other.rational, &self.irrational - &other.irrational, d)
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, other: &Surd) -> Surd {
        if self.is_rational() {
            return other.scale(&self.rational);
        }
        if other.is_rational() {
            return self.scale(&other.rational);
        }
        let d = self.joint_radicand(other);
        let rational = &self.rational * &other.rational
            + &self.irrational * &other.irrational * integer(d as i64);
        let irrational = &self.rational * &other.irrational + &self.irrational * &other.rational;
        Surd::new(rational, irrational, d)
    }
}

impl<'a> Div<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn div(self, other: &Surd) -> Surd {
        if other.is_rational() {
            assert!(!other.rational.is_zero(), "division by zero");
            return self.scale(&other.rational.recip());
        }
        self * &other.recip()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $method(self, other: Surd) -> Surd {
                (&self).$method(&other)
            }
        }
        impl<'a> $tr<&'a Surd> for Surd {
            type Output = Surd;
            fn $method(self, other: &Surd) -> Surd {
                (&self).$method(other)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { rational: -self.rational, irrational: -self.irrational, radicand: self.radicand }
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -(self.clone())
    }
}

impl std::iter::Sum for Surd {
    fn sum<I: Iterator<Item = Surd>>(iter: I) -> Surd {
        iter.fold(Surd::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Surd> for Surd {
    fn sum<I: Iterator<Item = &'a Surd>>(iter: I) -> Surd {
        iter.fold(Surd::zero(), |acc, x| &acc + x)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Surd) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Surd) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for Surd {
    /// `p/q`, or `p/q + r/s*sqrt(d)` when irrational.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rational);
        }
        write!(f, "{} + {}*sqrt({})", self.rational, self.irrational, self.radicand)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse ring element {0:?}")]
pub struct ParseSurdError(pub String);

impl FromStr for Surd {
    type Err = ParseSurdError;

    /// Accepts `p/q`, `sqrtD`, `sqrt(D)`, `r*sqrt(D)` and `p/q + r/s*sqrt(D)`.
    fn from_str(text: &str) -> Result<Surd, ParseSurdError> {
        let err = || ParseSurdError(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_radical = |term: &str| -> Option<Surd> {
            let (coeff, rest) = match term.find("sqrt") {
                Some(pos) => (&term[..pos], &term[pos + 4..]),
                None => return None,
            };
            let radicand: u32 = rest.trim_start_matches('(').trim_end_matches(')').parse().ok()?;
            if !is_squarefree(radicand) {
                return None;
            }
            let coeff = coeff.trim_end_matches('*');
            let coeff = coeff.strip_prefix('+').unwrap_or(coeff);
            let coeff = match coeff {
                "" => Rational::one(),
                "-" => -Rational::one(),
                c => parse_rational(c)?,
            };
            Some(Surd::new(Rational::zero(), coeff, radicand))
        };
        if !compact.contains("sqrt") {
            return parse_rational(&compact).map(Surd::from_rational).ok_or_else(err);
        }
        // split "a+b*sqrt(d)" at the last sign that is not a leading sign
        let bytes = compact.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'/' | b'*' | b'+' | b'-')
        });
        match split {
            Some(i) if !compact[..i].contains("sqrt") => {
                let head = parse_rational(&compact[..i]).ok_or_else(err)?;
                let tail = parse_radical(&compact[i..]).ok_or_else(err)?;
                Ok(&Surd::from_rational(head) + &tail)
            }
            _ => parse_radical(&compact).ok_or_else(err),
        }
    }
}

/// Ordered field interface used by the exact simplex and the dual routines.
pub trait Field: Clone + fmt::Debug + fmt::Display + Ord + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn over(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rational(value: &Rational) -> Self;
    fn from_surd(value: &Surd) -> Option<Self>;
    fn to_surd(&self) -> Surd;

    fn from_i64(value: i64) -> Self {
        Self::from_rational(&integer(value))
    }

    fn positive(&self) -> bool {
        *self > Self::zero_value()
    }

    fn negative(&self) -> bool {
        *self < Self::zero_value()
    }
}

impl Field for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }
    fn from_surd(value: &Surd) -> Option<Self> {
        value.to_rational()
    }
    fn to_surd(&self) -> Surd {
        Surd::from_rational(self.clone())
    }
}

impl Field for Surd {
    fn zero_value() -> Self {
        Surd::zero()
    }
    fn one_value() -> Self {
        Surd::one()
    }
    fn is_zero_value(&self) -> bool {
        Surd::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rational(value: &Rational) -> Self {
        Surd::from_rational(value.clone())
    }
    fn from_surd(value: &Surd) -> Option<Self> {
        Some(value.clone())
    }
    fn to_surd(&self) -> Surd {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Surd {
        text.parse().unwrap()
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 2√2 - 3 < 0 since 8 < 9
        assert_eq!(s("-3 + 2*sqrt(2)").signum(), -1);
        // 6√2 - 3 > 4 since 72 > 49
        assert!(s("-3 + 6*sqrt(2)") > Surd::from_integer(4));
        assert_eq!(s("2 - 1*sqrt(3)").signum(), 1);
        assert_eq!((s("sqrt2") * s("sqrt2")), Surd::from_integer(2));
    }

    #[test]
    fn reciprocal_rationalizes() {
        let x = s("1 + sqrt(3)");
        let four = Surd::from_integer(4);
        // 4 / (1 + √3) = 2√3 - 2
        assert_eq!(&four / &x, s("-2 + 2*sqrt(3)"));
        assert_eq!(&x * &x.recip(), Surd::one());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(s("sqrt3"), Surd::sqrt(3));
        assert_eq!(s("3/2"), Surd::from_rational(rational(3, 2)));
        assert_eq!(s("-1/2 + 3/4*sqrt(2)").to_string(), "-1/2 + 3/4*sqrt(2)");
        assert_eq!(s("-sqrt(2)"), -Surd::sqrt(2));
        assert!("sqrt(4)".parse::<Surd>().is_err());
        assert_eq!(parse_rational("1.25"), Some(rational(5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rational(-1, 2)));
    }

    #[test]
    #[should_panic]
    fn mixed_radicands_panic() {
        let _ = Surd::sqrt(2) + Surd::sqrt(3);
    }
}
