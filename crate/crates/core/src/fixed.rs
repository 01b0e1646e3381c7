//! Decimal fixed-point reals with a rigorous absolute error bound.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// The interval `[m − e, m + e] · 10^(−scale)`, known to contain the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedReal {
    mantissa: BigInt,
    scale: u32,
    /// In units of `10^(−scale)`.
    error: BigUint,
}

pub(crate) fn pow10(n: u32) -> BigInt {
    BigInt::from(10u32).pow(n)
}

/// `⌈a / b⌉` for positive `b`.
fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Rounds `a / b` to the nearest integer (ties away from zero), `b > 0`.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if BigInt::from(2) * r >= *b {
        q + 1
    } else {
        q
    }
}

fn to_uint(x: BigInt) -> BigUint {
    x.to_biguint().unwrap_or_default()
}

impl FixedReal {
    pub fn new(mantissa: BigInt, scale: u32, error: BigUint) -> Self {
        FixedReal {
            mantissa,
            scale,
            error,
        }
    }

    pub fn exact(mantissa: BigInt, scale: u32) -> Self {
        Self::new(mantissa, scale, BigUint::zero())
    }

    pub fn from_int(n: i64, scale: u32) -> Self {
        Self::exact(BigInt::from(n) * pow10(scale), scale)
    }

    /// Nearest representable value to `num / den`, with 1 ulp of error.
    pub fn from_ratio(num: i64, den: i64, scale: u32) -> Self {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let m = div_round(&(BigInt::from(num) * pow10(scale)), &BigInt::from(den));
        Self::new(m, scale, BigUint::one())
    }

    /// Parses a plain decimal such as `-0.5629` exactly; needs at most `scale`
    /// fractional digits.
    pub fn parse(s: &str, scale: u32) -> Result<Self> {
        let bad = || Error::Parse(format!("not a decimal: {s:?}"));
        let (neg, body) = match s.trim().strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.trim()),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > scale as usize {
            return Err(bad());
        }
        let digits = format!("{int}{frac}{}", "0".repeat(scale as usize - frac.len()));
        let mut m: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            m = -m;
        }
        Ok(Self::exact(m, scale))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn error_ulps(&self) -> &BigUint {
        &self.error
    }

    pub fn midpoint_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        m / 10f64.powi(self.scale as i32)
    }

    /// Same value at another scale; lowering the scale rounds (+1 ulp).
    pub fn rescale(&self, scale: u32) -> FixedReal {
        match scale.cmp(&self.scale) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let f = pow10(scale - self.scale);
                FixedReal::new(&self.mantissa * &f, scale, &self.error * to_uint(f))
            }
            Ordering::Less => {
                let f = pow10(self.scale - scale);
                let err = div_ceil(&BigInt::from(self.error.clone()), &f) + 1;
                FixedReal::new(div_round(&self.mantissa, &f), scale, to_uint(err))
            }
        }
    }

    /// Bound on the absolute error as an exact rational.
    pub fn error_bound(&self) -> BigRational {
        BigRational::new(BigInt::from(self.error.clone()), pow10(self.scale))
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(
            &self.mantissa - BigInt::from(self.error.clone()),
            pow10(self.scale),
        )
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(
            &self.mantissa + BigInt::from(self.error.clone()),
            pow10(self.scale),
        )
    }

    /// `Some(sign)` when the whole enclosure lies on one side of zero.
    pub fn certified_sign(&self) -> Option<Ordering> {
        let e = BigInt::from(self.error.clone());
        if self.mantissa > e {
            Some(Ordering::Greater)
        } else if self.mantissa < -e {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// True when `|value| ≤ 10^(−digits)` is guaranteed.
    pub fn certainly_below(&self, digits: u32) -> bool {
        self.abs_upper() <= BigRational::new(BigInt::one(), pow10(digits))
    }

    pub fn abs_upper(&self) -> BigRational {
        BigRational::new(
            self.mantissa.abs() + BigInt::from(self.error.clone()),
            pow10(self.scale),
        )
    }

    fn same_scale(&self, other: &FixedReal) {
        assert_eq!(self.scale, other.scale, "scale mismatch");
    }

    pub fn add(&self, other: &FixedReal) -> FixedReal {
        self.same_scale(other);
        FixedReal::new(
            &self.mantissa + &other.mantissa,
            self.scale,
            &self.error + &other.error,
        )
    }

    pub fn sub(&self, other: &FixedReal) -> FixedReal {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FixedReal {
        FixedReal::new(-&self.mantissa, self.scale, self.error.clone())
    }

    pub fn mul(&self, other: &FixedReal) -> FixedReal {
        self.same_scale(other);
        let f = pow10(self.scale);
        let (a, b) = (&self.mantissa, &other.mantissa);
        let (ea, eb) = (
            BigInt::from(self.error.clone()),
            BigInt::from(other.error.clone()),
        );
        let spread = a.abs() * &eb + b.abs() * &ea + &ea * &eb;
        let err = div_ceil(&spread, &f) + 1;
        FixedReal::new(div_round(&(a * b), &f), self.scale, to_uint(err))
    }

    pub fn mul_int(&self, n: i64) -> FixedReal {
        FixedReal::new(
            &self.mantissa * n,
            self.scale,
            &self.error * n.unsigned_abs(),
        )
    }

    pub fn div(&self, other: &FixedReal) -> Result<FixedReal> {
        self.same_scale(other);
        let f = pow10(self.scale);
        let (a, b) = (&self.mantissa, &other.mantissa);
        let (ea, eb) = (
            BigInt::from(self.error.clone()),
            BigInt::from(other.error.clone()),
        );
        let margin = b.abs() - &eb;
        if !margin.is_positive() {
            return Err(Error::Certification(
                "division by an interval containing 0".into(),
            ));
        }
        // |x/y − a/b| ≤ (ea·|b| + |a|·eb) / (|b|·(|b| − eb))
        let spread = (&ea * b.abs() + a.abs() * &eb) * &f;
        let err = div_ceil(&spread, &(b.abs() * &margin)) + 1;
        let q = div_round(&(a * &f * b.signum()), &b.abs());
        Ok(FixedReal::new(q, self.scale, to_uint(err)))
    }

    pub fn sqrt(&self) -> Result<FixedReal> {
        let e = BigInt::from(self.error.clone());
        let low = &self.mantissa - &e;
        if !low.is_positive() {
            return Err(Error::Certification(
                "square root of a non-positive enclosure".into(),
            ));
        }
        let f = pow10(self.scale);
        let root = (&self.mantissa * &f).sqrt();
        // |√X − √Y| · 10^s ≤ |X − Y| · 10^s / √(low · 10^s)
        let denom = (&low * &f).sqrt();
        if denom.is_zero() {
            return Err(Error::Certification("square root too close to 0".into()));
        }
        let err = div_ceil(&(&e * &f), &denom) + 1;
        Ok(FixedReal::new(root, self.scale, to_uint(err)))
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits
    /// (truncated toward zero).
    pub fn to_decimal(&self, digits: u32) -> String {
        let m = if digits >= self.scale {
            &self.mantissa * pow10(digits - self.scale)
        } else {
            &self.mantissa / pow10(self.scale - digits)
        };
        let neg = m.is_negative();
        let s = m.abs().to_string();
        let s = format!("{s:0>width$}", width = digits as usize + 1);
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Number of fractional digits guaranteed by the error bound.
    pub fn certified_digits(&self) -> u32 {
        let e = &self.error * 2u32;
        if e.is_zero() {
            return self.scale;
        }
        let len = e.to_string().len() as u32;
        self.scale.saturating_sub(len)
    }

    /// Whether the printed decimal is the truncation or the rounding of every
    /// value in the enclosure, i.e. whether each printed digit is confirmed.
    pub fn matches_printed(&self, printed: &str) -> bool {
        let frac_len = printed.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
        let Ok(p) = FixedReal::parse(printed, frac_len) else {
            return false;
        };
        let p = BigRational::new(p.mantissa, pow10(frac_len));
        let ulp = BigRational::new(BigInt::one(), pow10(frac_len));
        let half = &ulp / BigInt::from(2);
        let (lo, hi) = (self.lower(), self.upper());
        let rounded = lo >= &p - &half && hi <= &p + &half;
        let truncated = if p.is_negative() || printed.trim().starts_with('-') {
            lo > &p - &ulp && hi <= p
        } else {
            lo >= p && hi < &p + &ulp
        };
        rounded || truncated
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.certified_digits();
        write!(f, "{}", self.to_decimal(d))
    }
}

/// JSON form with exact integers as decimal strings.
#[derive(Serialize)]
pub struct FixedRealJson {
    pub mantissa: String,
    pub scale: u32,
    pub error: String,
    pub value: String,
}

impl From<&FixedReal> for FixedRealJson {
    fn from(x: &FixedReal) -> Self {
        FixedRealJson {
            mantissa: x.mantissa.to_string(),
            scale: x.scale,
            error: x.error.to_string(),
            value: x.to_string(),
        }
    }
}

/// π by Machin's formula `π = 16 arctan(1/5) − 4 arctan(1/239)`.
pub fn pi(scale: u32) -> FixedReal {
    let guard = 10;
    let s = scale + guard;
    let a = arctan_inv(5, s).mul_int(16);
    let b = arctan_inv(239, s).mul_int(4);
    a.sub(&b).rescale(scale)
}

/// `arctan(1/n)` for an integer `n ≥ 2`.
fn arctan_inv(n: i64, scale: u32) -> FixedReal {
    let one = pow10(scale);
    let n2 = BigInt::from(n * n);
    let mut power = div_round(&one, &BigInt::from(n));
    let mut sum = BigInt::zero();
    let mut k = 0i64;
    let mut terms = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &n2;
        k += 1;
        terms += 1;
    }
    // Each term carries at most 3 ulps of rounding; the alternating tail
    // after the last nonzero power is below 1 ulp.
    FixedReal::new(sum, scale, BigUint::from(3 * terms + 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: &str =
        "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899";

    #[test]
    fn pi_digits() {
        let p = pi(70);
        assert!(p.matches_printed(&PI[..68]));
        assert!(!p.matches_printed(
            "3.14159265358979323846264338327950288419716939937510582097494459230783"
        ));
        assert!(p.error_ulps() < &BigUint::from(1000u32));
    }

    #[test]
    fn arithmetic_encloses() {
        let s = 30;
        let third = FixedReal::from_ratio(1, 3, s);
        let one = third.mul_int(3);
        assert!(one.lower() <= BigRational::one() && one.upper() >= BigRational::one());
        let two = FixedReal::from_int(2, s);
        let r = two.sqrt().unwrap();
        assert!(r.matches_printed("1.4142135623730950488016887242"));
        let q = FixedReal::from_int(1, s)
            .div(&FixedReal::from_int(7, s))
            .unwrap();
        assert!(q.matches_printed("0.1428571428571428571428571428"));
        let m = FixedReal::from_ratio(-5, 4, s).mul(&FixedReal::from_ratio(3, 2, s));
        assert!(m.matches_printed("-1.875"));
    }

    #[test]
    fn printed_matching() {
        let x = FixedReal::parse("0.123456", 10).unwrap();
        assert!(x.matches_printed("0.1234"));
        assert!(x.matches_printed("0.12346"));
        assert!(!x.matches_printed("0.1236"));
        let y = FixedReal::parse("-0.5629765", 10).unwrap();
        assert!(y.matches_printed("-0.562976"));
        assert!(y.matches_printed("-0.562977"));
        assert!(!y.matches_printed("-0.562978"));
        assert_eq!(y.to_decimal(3), "-0.562");
        assert!(FixedReal::from_int(0, 5)
            .div(&FixedReal::from_int(0, 5))
            .is_err());
    }
}
