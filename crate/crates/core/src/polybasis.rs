//! Diagonals of the size/gcd table as polynomials in the binomial basis.
//!
//! With `F(x) = A(x)/x`, the coefficient `[x^n] F(x)^g` counts natural
//! systems of size `g + n` and gcd `g` once `g > n`, and expanding
//! `F^g = Σ_k C(g,k) (F − 1)^k` gives the polynomial
//! `f_n(g) = Σ_k c_{n,k} C(g,k)` with `c_{n,k} = [x^n] (F − 1)^k`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinat::binomial;
use crate::series::{a_series, IntSeries};

/// `c_{n,k}` for `0 ≤ k, n ≤ n_max`.
#[derive(Clone, Debug)]
pub struct BinomialTable {
    /// c[k][n] = [x^n] (F − 1)^k
    c: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    pub fn new(n_max: usize) -> Self {
        let order = n_max + 1;
        let f_minus_one = shifted_a(order).sub(&IntSeries::one(order));
        let mut c = Vec::with_capacity(order);
        let mut power = IntSeries::one(order);
        for _ in 0..=n_max {
            c.push(power.coeffs().to_vec());
            power = power.mul(&f_minus_one, order);
        }
        BinomialTable { c }
    }

    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `c_{n,k}`; zero for `k > n`, and `c_{n,0} = [n = 0]`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        assert!(n <= self.n_max(), "n = {n} beyond table limit");
        if k > n {
            return BigInt::zero();
        }
        self.c[k][n].clone()
    }

    pub fn polynomial(&self, n: usize) -> BinomialPolynomial {
        BinomialPolynomial {
            n,
            coeffs: (1..=n).map(|k| self.get(n, k)).collect(),
        }
    }
}

/// `F(x) = A(x)/x` to `order` terms.
fn shifted_a(order: usize) -> IntSeries {
    let a = a_series(order + 1);
    IntSeries::new(a.coeffs()[1..=order].to_vec())
}

/// `B(x) = (A(x)/x − 1 − x)/x`, the part of `F` beyond its linear term.
pub fn remainder_series(order: usize) -> IntSeries {
    let f = shifted_a(order + 1);
    let mut coeffs = vec![BigInt::zero(); order];
    for (i, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = f.coeff(i + 1).clone();
    }
    IntSeries::new(coeffs)
}

/// `f_n(x) = Σ_{k=1..n} c_{n,k} C(x,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialPolynomial {
    pub n: usize,
    /// `coeffs[k−1] = c_{n,k}`
    pub coeffs: Vec<BigInt>,
}

impl BinomialPolynomial {
    pub fn eval(&self, g: u64) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigInt::from(binomial(g, i as u64 + 1)))
            .sum()
    }
}

pub fn binomial_coeffs(n: usize) -> BinomialPolynomial {
    assert!(n >= 1, "n must be positive");
    BinomialTable::new(n).polynomial(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FValue {
    pub value: BigInt,
    /// `g > n`: only then does `f_n(g)` count systems of size `g + n` and gcd `g`.
    pub counts_systems: bool,
}

pub fn evaluate_f(n: usize, g: u64) -> FValue {
    FValue {
        value: binomial_coeffs(n).eval(g),
        counts_systems: g > n as u64,
    }
}

/// `Σ_{j=0..ℓ} (−1)^j C(ℓ,j) c_{m+ℓ−j, m−j}`; equals `3^ℓ` when `m ≥ ℓ`.
pub fn backward_difference(table: &BinomialTable, l: usize, m: usize) -> BigInt {
    assert!(m >= l, "need m ≥ ℓ");
    let mut acc = BigInt::zero();
    for j in 0..=l {
        let term = BigInt::from(binomial(l as u64, j as u64)) * table.get(m + l - j, m - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn backward_difference_check(l: usize, m: usize) -> BigInt {
    backward_difference(&BinomialTable::new(m + l), l, m)
}

/// `[x^ℓ] B(x)^ℓ`, which the differences reduce to.
pub fn remainder_power_coeff(l: usize) -> BigInt {
    if l == 0 {
        return BigInt::one();
    }
    let b = remainder_series(l + 1);
    b.power(l as u32, l + 1).coeff(l).clone()
}
