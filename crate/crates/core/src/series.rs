//! Truncated formal power series with exact integer coefficients, the Möbius
//! sieve, and the generating functions built from them.
//!
//! Every operation takes its truncation order explicitly. A series of order
//! `N` knows its coefficients of `x⁰ … x^N`; results never claim more terms
//! than their inputs support.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    /// Series of order `coeffs.len() − 1`.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        IntSeries { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        IntSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigInt::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^k`; panics beyond the truncation order.
    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> IntSeries {
        let order = order.min(self.order());
        IntSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &IntSeries) -> IntSeries {
        let order = self.order().min(other.order());
        IntSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntSeries) -> IntSeries {
        let order = self.order().min(other.order());
        IntSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntSeries {
        IntSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &IntSeries, order: usize) -> IntSeries {
        let order = order.min(self.order()).min(other.order());
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntSeries { coeffs: out }
    }

    pub fn power(&self, n: u32, order: usize) -> IntSeries {
        let order = order.min(self.order());
        let mut result = IntSeries::one(order);
        let mut base = self.truncate(order);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, order);
            }
        }
        result
    }

    /// `self(inner(x))` through `order`; needs `inner(0) = 0`.
    pub fn compose(&self, inner: &IntSeries, order: usize) -> Result<IntSeries> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstant);
        }
        let order = order.min(self.order()).min(inner.order());
        // Horner in the inner series.
        let mut acc = IntSeries::zero(order);
        for k in (0..=order).rev() {
            acc = acc.mul(inner, order);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> IntSeries {
        if self.order() == 0 {
            return IntSeries::zero(0);
        }
        IntSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        }
    }

    /// Multiplicative inverse; the constant term must be ±1.
    pub fn reciprocal(&self, order: usize) -> Result<IntSeries> {
        let c0 = &self.coeffs[0];
        if c0.abs() != BigInt::one() {
            return Err(Error::NonUnitConstant);
        }
        let order = order.min(self.order());
        let mut inv = vec![BigInt::zero(); order + 1];
        inv[0] = c0.clone();
        for n in 1..=order {
            let mut s = BigInt::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    s += &self.coeffs[i] * &inv[n - i];
                }
            }
            // c0 = ±1 is its own inverse.
            inv[n] = -(s * c0);
        }
        Ok(IntSeries { coeffs: inv })
    }

    /// Compositional inverse `R` with `self(R(x)) = x` through `order`.
    ///
    /// Solves for `r_n` one order at a time: the `x^n` coefficient of
    /// `S(R)` is `s₁·r_n` plus terms in `r₁ … r_{n−1}` only.
    pub fn revert(&self, order: usize) -> Result<IntSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstant);
        }
        if self.order() < 1 || self.coeffs[1].abs() != BigInt::one() {
            return Err(Error::NonUnitLinear);
        }
        let order = order.min(self.order());
        let s = &self.coeffs;
        let s1 = s[1].clone();
        // pow[j][i] = [x^i] R^j
        let mut pow = vec![vec![BigInt::zero(); order + 1]; order + 1];
        let mut r = vec![BigInt::zero(); order + 1];
        if order >= 1 {
            r[1] = s1.clone();
            pow[1][1] = s1.clone();
        }
        for n in 2..=order {
            let mut rest = BigInt::zero();
            for j in 2..=n {
                let mut c = BigInt::zero();
                for i in 1..=n + 1 - j {
                    if !r[i].is_zero() && !pow[j - 1][n - i].is_zero() {
                        c += &r[i] * &pow[j - 1][n - i];
                    }
                }
                if !s[j].is_zero() {
                    rest += &s[j] * &c;
                }
                pow[j][n] = c;
            }
            r[n] = -(rest * &s1);
            pow[1][n] = r[n].clone();
        }
        Ok(IntSeries { coeffs: r })
    }
}

impl fmt::Display for IntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "x".to_string(),
                (1, false) => format!("{mag}x"),
                (_, true) => format!("x^{k}"),
                (_, false) => format!("{mag}x^{k}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, "+O(x^{})", self.order() + 1)
    }
}

/// `μ(0..=n)` by a linear sieve; index 0 holds 0.
pub fn mobius_upto(n: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n + 1];
    if n == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut m = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// `M(x) = Σ_{k≥1} μ(k) x^k` through order `n`.
pub fn mobius_series(n: usize) -> IntSeries {
    IntSeries::new(mobius_upto(n).into_iter().map(BigInt::from).collect())
}

/// The reversion of the Möbius series: `a_k` counts natural exact covering
/// systems with `k` classes.
pub fn a_series(n: usize) -> IntSeries {
    mobius_series(n)
        .revert(n)
        .expect("the Möbius series has a unit linear term")
}

/// `A_m(x) = M(A(x)^m)`, the systems with gcd exactly `m`.
pub fn am_series(m: u32, n: usize) -> IntSeries {
    assert!(m >= 1, "gcd index must be positive");
    let a = a_series(n);
    am_series_from(&a, m, n)
}

pub(crate) fn am_series_from(a: &IntSeries, m: u32, n: usize) -> IntSeries {
    if m as usize > n {
        return IntSeries::zero(n);
    }
    let am = a.power(m, n);
    mobius_series(n)
        .compose(&am, n)
        .expect("A^m has zero constant term")
}

/// Schröder numbers: leaf counts of trees with no unary vertices.
///
/// From `2T² − (1+x)T + x = 0`: `t_n = [n=1] − t_{n−1} + 2·Σ t_i t_{n−i}`.
pub fn schroeder_series(n: usize) -> IntSeries {
    let mut t = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let mut v = if k == 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        v -= &t[k - 1];
        let mut conv = BigInt::zero();
        for i in 1..k {
            conv += &t[i] * &t[k - i];
        }
        v += conv * 2;
        t[k] = v;
    }
    IntSeries::new(t)
}

/// `G(u) = M(u)/u = Σ μ(k) u^{k−1}` through order `n`.
pub fn g_series(n: usize) -> IntSeries {
    let mu = mobius_upto(n + 1);
    IntSeries::new(mu[1..].iter().map(|&m| BigInt::from(m)).collect())
}

/// `φ(u) = u/M(u) = 1/G(u)` through order `n`.
pub fn phi_series(n: usize) -> IntSeries {
    g_series(n).reciprocal(n).expect("G(0) = 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &IntSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(4), 0);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(7), -1);
        assert_eq!(mobius(30), -1);
        let mu = mobius_upto(1000);
        for n in 1..=1000u64 {
            assert_eq!(mu[n as usize], mobius(n), "n = {n}");
        }
    }

    #[test]
    fn mobius_series_prefix() {
        let m = mobius_series(15);
        assert_eq!(
            ints(&m),
            vec![0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1]
        );
        assert_eq!(mobius(14), 1);
        assert_eq!(*mobius_series(30).coeff(30), BigInt::from(-1));
    }

    #[test]
    fn power_and_compose() {
        let s = IntSeries::from_i64s(&[0, 1, 1, 0, 0]);
        assert_eq!(ints(&s.power(2, 4)), vec![0, 0, 1, 2, 1]);
        let m = mobius_series(20);
        assert_eq!(m.compose(&IntSeries::x(20), 20).unwrap(), m);
        assert_eq!(
            m.compose(&IntSeries::one(20), 20),
            Err(Error::NonZeroConstant)
        );
        assert_eq!(ints(&s.derivative()), vec![1, 2, 0, 0]);
    }

    #[test]
    fn reversion_examples() {
        assert_eq!(ints(&a_series(8)), vec![0, 1, 1, 3, 10, 39, 160, 691, 3081]);
        assert_eq!(IntSeries::x(10).revert(10).unwrap(), IntSeries::x(10));
        let catalan = IntSeries::from_i64s(&[0, 1, -1, 0, 0, 0])
            .revert(5)
            .unwrap();
        assert_eq!(ints(&catalan), vec![0, 1, 1, 2, 5, 14]);
        assert_eq!(
            IntSeries::from_i64s(&[1, 1]).revert(1),
            Err(Error::NonZeroConstant)
        );
        assert_eq!(
            IntSeries::from_i64s(&[0, 2, 1]).revert(2),
            Err(Error::NonUnitLinear)
        );
        // negative unit linear term
        let s = IntSeries::from_i64s(&[0, -1, 1, 0, 0, 0, 0]);
        let r = s.revert(6).unwrap();
        assert_eq!(s.compose(&r, 6).unwrap(), IntSeries::x(6));
    }

    #[test]
    fn am_series_examples() {
        assert_eq!(am_series(1, 12), IntSeries::x(12));
        let a2 = am_series(2, 8);
        assert_eq!(ints(&a2)[2..], [1, 2, 6, 22, 88, 372, 1636]);
        let a = a_series(16);
        let total = (1..=16).fold(IntSeries::zero(16), |acc, m| {
            acc.add(&am_series_from(&a, m, 16))
        });
        assert_eq!(total, a);
    }

    #[test]
    fn schroeder_values() {
        assert_eq!(
            ints(&schroeder_series(10)),
            vec![0, 1, 1, 3, 11, 45, 197, 903, 4279, 20793, 103049]
        );
        let t = schroeder_series(20);
        let a = a_series(20);
        for k in 1..=20 {
            assert!(t.coeff(k) >= a.coeff(k));
        }
    }

    #[test]
    fn phi_prefix() {
        assert_eq!(ints(&phi_series(9)), vec![1, 1, 2, 3, 6, 9, 17, 28, 50, 83]);
    }

    #[test]
    fn reciprocal_roundtrip() {
        let g = g_series(30);
        let phi = g.reciprocal(30).unwrap();
        assert_eq!(g.mul(&phi, 30), IntSeries::one(30));
        assert_eq!(
            IntSeries::from_i64s(&[2, 1]).reciprocal(1),
            Err(Error::NonUnitConstant)
        );
    }

    #[test]
    fn display() {
        assert_eq!(
            IntSeries::from_i64s(&[0, 1, -1, 3]).to_string(),
            "x-x^2+3x^3+O(x^4)"
        );
        assert_eq!(IntSeries::zero(2).to_string(), "0+O(x^3)");
    }
}
