//! Certified evaluation of the Möbius series `M(x) = Σ μ(k) x^k` and of
//! `G(u) = M(u)/u` on `|x| ≤ 0.71`, their roots, and the constants in
//! `a_k ~ c γ^k k^(−3/2)`.
//!
//! Every returned [`FixedReal`] encloses the true value: the Horner rounding,
//! the truncation tail and the uncertainty of the argument are all bounded.
//! Coefficients of both series are bounded by 1 in absolute value, so the
//! `j`-th derivative has tail `Σ_{i>N} i^j r^(i−j)` and Lipschitz constant
//! `(j+1)!/(1−r)^(j+2)` on the disc of radius `r`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed::{pi, pow10, FixedReal, FixedRealJson};
use crate::series::{mobius, mobius_upto};

/// Extra decimal digits carried beyond the requested precision.
pub const GUARD: u32 = 12;

const DOMAIN_NUM: i64 = 71;
const DOMAIN_DEN: i64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Base {
    /// `M(x) = Σ_{i≥1} μ(i) x^i`
    M,
    /// `G(u) = Σ_{i≥0} μ(i+1) u^i`
    G,
}

impl Base {
    fn coeff(self, i: usize) -> i64 {
        match self {
            Base::M if i == 0 => 0,
            Base::M => mobius(i as u64) as i64,
            Base::G => mobius(i as u64 + 1) as i64,
        }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// Falling factorial `i (i−1) … (i−j+1)`.
fn falling(i: usize, j: usize) -> BigInt {
    (0..j).fold(BigInt::one(), |a, t| a * (i - t))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A rational upper bound on `|x|` over the enclosure, coarsened to four
/// decimals so that powers stay cheap.
fn radius_bound(x: &FixedReal) -> BigRational {
    let r = x.abs_upper();
    let coarse = (r * BigInt::from(10_000)).ceil();
    BigRational::new(coarse.to_integer(), BigInt::from(10_000))
}

fn ceil_ulps(v: &BigRational, scale: u32) -> BigUint {
    let scaled = (v * pow10(scale)).ceil().to_integer();
    scaled.to_biguint().unwrap_or_default()
}

/// `Σ_{i>n} i^j r^(i−j)` bounded by a geometric series from term `n+1`.
fn tail_bound(n: usize, j: usize, r: &BigRational) -> Option<BigRational> {
    let n1 = BigInt::from(n + 1);
    let n2 = BigInt::from(n + 2);
    let q = BigRational::new(n2.pow(j as u32), n1.pow(j as u32)) * r;
    if q >= BigRational::one() {
        return None;
    }
    let first = BigRational::from(n1.pow(j as u32)) * r.pow((n + 1 - j) as i32);
    Some(first / (BigRational::one() - q))
}

/// The `j`-th derivative of `base` at `x`, at the scale of `x`.
fn eval(base: Base, j: usize, x: &FixedReal) -> Result<FixedReal> {
    let scale = x.scale();
    let r = radius_bound(x);
    if r > ratio(DOMAIN_NUM, DOMAIN_DEN) {
        return Err(Error::OutOfDomain(x.to_decimal(6)));
    }
    // Pick N from a float estimate, then confirm it with exact arithmetic.
    let rf = r.to_f64().unwrap_or(0.71).max(1e-300);
    let target = BigRational::new(BigInt::one(), pow10(scale + 1));
    let mut n = j + 1;
    while (n as f64 + 1.0).ln() * j as f64 + (n + 1 - j) as f64 * rf.ln()
        > -((scale + 3) as f64) * std::f64::consts::LN_10
    {
        n += 1;
    }
    let tail = loop {
        match tail_bound(n, j, &r) {
            Some(t) if t <= target => break t,
            _ => n += 8,
        }
    };

    let f = pow10(scale);
    let xm = x.mantissa();
    let mut acc = BigInt::zero();
    for i in (j..=n).rev() {
        acc = round_div(&(&acc * xm), &f);
        let c = base.coeff(i);
        if c != 0 {
            acc += falling(i, j) * c * &f;
        }
    }
    let mut err = BigUint::from(n + 1) + ceil_ulps(&tail, scale);
    if !x.error_ulps().is_zero() {
        let lip = BigRational::from(factorial(j + 1)) / (BigRational::one() - &r).pow(j as i32 + 2);
        let spread = lip * BigRational::from(BigInt::from(x.error_ulps().clone()));
        err += spread.ceil().to_integer().to_biguint().unwrap_or_default();
    }
    Ok(FixedReal::new(acc, scale, err))
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if BigInt::from(2) * r >= *b {
        q + 1
    } else {
        q
    }
}

/// `M(x)`, at the scale of `x`. Requires `|x| ≤ 0.71` over the enclosure.
pub fn eval_m(x: &FixedReal) -> Result<FixedReal> {
    eval(Base::M, 0, x)
}

pub fn eval_m_prime(x: &FixedReal) -> Result<FixedReal> {
    eval(Base::M, 1, x)
}

pub fn eval_m_double_prime(x: &FixedReal) -> Result<FixedReal> {
    eval(Base::M, 2, x)
}

/// `G(u) = M(u)/u`, continued to `G(0) = 1`.
pub fn eval_g(u: &FixedReal) -> Result<FixedReal> {
    eval(Base::G, 0, u)
}

pub fn eval_g_prime(u: &FixedReal) -> Result<FixedReal> {
    eval(Base::G, 1, u)
}

/// Float evaluation, only used to seed root refinement.
fn eval_f64(base: Base, j: usize, x: f64) -> f64 {
    let mu = mobius_upto(400);
    let mut acc = 0.0;
    for i in (j..=400).rev() {
        let c = match base {
            Base::M => mu[i] as f64,
            Base::G => mu.get(i + 1).copied().unwrap_or(0) as f64,
        };
        let fall: f64 = (0..j).map(|t| (i - t) as f64).product();
        acc = acc * x + c * fall;
    }
    acc
}

fn bisect_f64(base: Base, j: usize, mut lo: f64, mut hi: f64) -> f64 {
    let flo = eval_f64(base, j, lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (eval_f64(base, j, mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn from_f64(v: f64, scale: u32) -> FixedReal {
    FixedReal::parse(&format!("{v:.17}"), scale.max(17))
        .expect("formatted float parses")
        .rescale(scale)
        .exact_midpoint()
}

impl FixedReal {
    /// The midpoint as an exact value, dropping the error bound.
    fn exact_midpoint(&self) -> FixedReal {
        FixedReal::exact(self.mantissa().clone(), self.scale())
    }
}

/// Which side of the root the certified function-free interval lies on.
#[derive(Clone, Copy)]
enum Side {
    /// No root on `[0, root)`.
    FromZeroUp,
    /// No root on `(root, 0]`.
    FromZeroDown,
}

/// Refines a simple root of the `j`-th derivative of `base` near `seed` and
/// certifies it to `digits` fractional digits. The root is also certified to
/// be the only one between 0 and itself.
fn certified_root(base: Base, j: usize, seed: f64, digits: u32, side: Side) -> Result<FixedReal> {
    let scale = digits + GUARD;
    let mut x = from_f64(seed, scale);
    for _ in 0..64 {
        let fx = eval(base, j, &x)?;
        let dfx = eval(base, j + 1, &x)?;
        let step = fx.exact_midpoint().div(&dfx.exact_midpoint())?;
        x = x.sub(&step).exact_midpoint();
        if step.mantissa().abs() <= BigInt::from(1000) {
            break;
        }
    }
    let delta = FixedReal::exact(pow10(GUARD - 2), scale);
    let lo = eval(base, j, &x.sub(&delta))?;
    let hi = eval(base, j, &x.add(&delta))?;
    match (lo.certified_sign(), hi.certified_sign()) {
        (Some(a), Some(b)) if a != b => {}
        _ => {
            return Err(Error::Certification(format!(
                "no sign change around {}",
                x.to_decimal(digits)
            )))
        }
    }
    certify_isolated(base, j, &x, side)?;
    Ok(FixedReal::new(
        x.mantissa().clone(),
        scale,
        pow10(GUARD - 2).to_biguint().expect("positive"),
    ))
}

/// Certifies there is no other root between 0 and `root`: the function is
/// sign-definite away from the root, and monotone close to it.
fn certify_isolated(base: Base, j: usize, root: &FixedReal, side: Side) -> Result<()> {
    let w = ratio(1, 1000);
    let rt = BigRational::new(root.mantissa().clone(), pow10(root.scale()));
    let (far, near) = match side {
        Side::FromZeroUp => ((BigRational::zero(), &rt - &w), (&rt - &w, &rt + &w)),
        Side::FromZeroDown => ((&rt + &w, BigRational::zero()), (&rt - &w, &rt + &w)),
    };
    certify_sign(base, j, &far.0, &far.1, 0)?;
    certify_sign(base, j + 1, &near.0, &near.1, 0)
}

/// Certifies that the `j`-th derivative of `base` has no zero on `[a, b]`.
fn certify_sign(base: Base, j: usize, a: &BigRational, b: &BigRational, depth: u32) -> Result<()> {
    if depth > 40 {
        return Err(Error::Certification(
            "sign certification did not converge".into(),
        ));
    }
    let scale = 30;
    let mid = (a + b) / BigInt::from(2);
    let m = FixedReal::exact((&mid * pow10(scale)).round().to_integer(), scale);
    let v = eval(base, j, &m)?;
    let mid_exact = BigRational::new(m.mantissa().clone(), pow10(scale));
    let reach = (&mid_exact - a).abs().max((b - &mid_exact).abs());
    let r = mid_exact.abs() + &reach;
    let lip = BigRational::from(factorial(j + 1)) / (BigRational::one() - r).pow(j as i32 + 2);
    let floor = BigRational::new(
        v.mantissa().abs() - BigInt::from(v.error_ulps().clone()),
        pow10(scale),
    );
    if floor > lip * reach {
        return Ok(());
    }
    certify_sign(base, j, a, &mid, depth + 1)?;
    certify_sign(base, j, &mid, b, depth + 1)
}

/// `τ`: the positive root of `M′`.
pub fn find_tau(digits: u32) -> Result<FixedReal> {
    let seed = bisect_f64(Base::M, 1, 0.2, 0.45);
    certified_root(Base::M, 1, seed, digits, Side::FromZeroUp)
}

/// `α`: the positive root of `G`, i.e. the smallest positive zero of `M`.
pub fn find_alpha(digits: u32) -> Result<FixedReal> {
    let seed = bisect_f64(Base::G, 0, 0.5, 0.65);
    certified_root(Base::G, 0, seed, digits, Side::FromZeroUp)
}

/// `β`: the negative root of `M′`.
pub fn find_beta(digits: u32) -> Result<FixedReal> {
    let seed = bisect_f64(Base::M, 1, -0.65, -0.45);
    certified_root(Base::M, 1, seed, digits, Side::FromZeroDown)
}

#[derive(Clone, Debug)]
pub struct Constants {
    pub digits: u32,
    pub tau: FixedReal,
    /// `ρ = M(τ)`
    pub rho: FixedReal,
    /// `γ = 1/ρ`
    pub gamma: FixedReal,
    /// `M″(τ)`
    pub m2_tau: FixedReal,
    /// `d₁ = √(−2ρ / M″(τ))`
    pub d1: FixedReal,
    /// `c = d₁ / (2√π)`
    pub c: FixedReal,
}

#[derive(Serialize)]
pub struct ConstantsJson {
    pub digits: u32,
    pub tau: FixedRealJson,
    pub rho: FixedRealJson,
    pub gamma: FixedRealJson,
    pub m2_tau: FixedRealJson,
    pub d1: FixedRealJson,
    pub c: FixedRealJson,
}

impl Constants {
    pub fn named(&self) -> [(&'static str, &FixedReal); 6] {
        [
            ("tau", &self.tau),
            ("rho", &self.rho),
            ("gamma", &self.gamma),
            ("M''(tau)", &self.m2_tau),
            ("d1", &self.d1),
            ("c", &self.c),
        ]
    }

    pub fn to_json(&self) -> ConstantsJson {
        ConstantsJson {
            digits: self.digits,
            tau: (&self.tau).into(),
            rho: (&self.rho).into(),
            gamma: (&self.gamma).into(),
            m2_tau: (&self.m2_tau).into(),
            d1: (&self.d1).into(),
            c: (&self.c).into(),
        }
    }
}

fn require_digits(name: &str, x: &FixedReal, digits: u32) -> Result<()> {
    if x.error_bound() <= BigRational::new(BigInt::one(), pow10(digits)) {
        Ok(())
    } else {
        Err(Error::Certification(format!(
            "{name} not certified to {digits} digits"
        )))
    }
}

/// All constants with absolute error at most `10^(−digits)`.
pub fn constants(digits: u32) -> Result<Constants> {
    let tau = find_tau(digits + 5)?;
    let rho = eval_m(&tau)?;
    let m2_tau = eval_m_double_prime(&tau)?;
    let scale = tau.scale();
    let one = FixedReal::from_int(1, scale);
    let gamma = one.div(&rho)?;
    let d1 = rho.mul_int(-2).div(&m2_tau)?.sqrt()?;
    let two_sqrt_pi = pi(scale).sqrt()?.mul_int(2);
    let c = d1.div(&two_sqrt_pi)?;
    let out = Constants {
        digits,
        tau,
        rho,
        gamma,
        m2_tau,
        d1,
        c,
    };
    for (name, x) in out.named() {
        require_digits(name, x, digits)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub k: usize,
    pub ratio: f64,
    /// `(ratio − target) / target`
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioTable {
    pub target: f64,
    pub rows: Vec<RatioRow>,
    /// Whether `|gap|` decreases strictly along the rows.
    pub monotone: bool,
}

fn ratio_table(values: &[(usize, f64)], gamma: f64, target: f64) -> RatioTable {
    let rows: Vec<RatioRow> = values
        .iter()
        .map(|&(k, a)| {
            let kf = k as f64;
            let ratio = (a.ln() + 1.5 * kf.ln() - kf * gamma.ln()).exp();
            RatioRow {
                k,
                ratio,
                gap: (ratio - target) / target,
            }
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs());
    RatioTable {
        target,
        rows,
        monotone,
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `a_k k^(3/2) γ^(−k)` against `c`, for `k` in `ks`; `a[k]` is `a_k`.
pub fn ratio_check(
    a: &[BigUint],
    ks: std::ops::RangeInclusive<usize>,
    consts: &Constants,
) -> RatioTable {
    let values: Vec<(usize, f64)> = ks.map(|k| (k, big_to_f64(&a[k]))).collect();
    ratio_table(
        &values,
        consts.gamma.midpoint_f64(),
        consts.c.midpoint_f64(),
    )
}

/// `m τ^(m−1) M′(τ^m) c`, the limit of `a_{k,m} k^(3/2) γ^(−k)`.
pub fn gcd_ratio_target(m: u32, consts: &Constants) -> Result<FixedReal> {
    let tau = &consts.tau;
    let mut tau_m1 = FixedReal::from_int(1, tau.scale());
    for _ in 1..m {
        tau_m1 = tau_m1.mul(tau);
    }
    let tau_m = tau_m1.mul(tau);
    Ok(tau_m1
        .mul(&eval_m_prime(&tau_m)?)
        .mul_int(m as i64)
        .mul(&consts.c))
}

/// `a_{k,m} k^(3/2) γ^(−k)` against [`gcd_ratio_target`]; `column[k]` is `a_{k,m}`.
pub fn gcd_ratio_check(
    column: &[BigUint],
    ks: std::ops::RangeInclusive<usize>,
    m: u32,
    consts: &Constants,
) -> Result<RatioTable> {
    let target = gcd_ratio_target(m, consts)?.midpoint_f64();
    let values: Vec<(usize, f64)> = ks.map(|k| (k, big_to_f64(&column[k]))).collect();
    Ok(ratio_table(&values, consts.gamma.midpoint_f64(), target))
}

#[derive(Clone, Debug)]
pub struct IdentityResidual {
    pub x: FixedReal,
    /// `Σ_m M(x^m) − x`
    pub lambert: FixedReal,
    /// `Σ_m m x^(m−1) M′(x^m) − 1`
    pub derivative: FixedReal,
    /// Terms used in each sum.
    pub terms: usize,
}

impl IdentityResidual {
    pub fn below(&self, digits: u32) -> bool {
        self.lambert.certainly_below(digits) && self.derivative.certainly_below(digits)
    }
}

/// Adds `±bound` to the enclosure.
fn widen(x: &FixedReal, bound: &BigRational) -> FixedReal {
    let extra = ceil_ulps(bound, x.scale());
    FixedReal::new(x.mantissa().clone(), x.scale(), x.error_ulps() + extra)
}

/// Number of terms `T` with `(T+1) r^T / ((1−r)^2 (1 − r(T+2)/(T+1))) ≤ 10^(−digits)`,
/// and that bound, which dominates both identity tails.
fn identity_terms(r: &BigRational, digits: u32) -> (usize, BigRational) {
    let target = BigRational::new(BigInt::one(), pow10(digits));
    let one = BigRational::one();
    let mut t = 1usize;
    loop {
        let q = r * BigRational::new(BigInt::from(t + 2), BigInt::from(t + 1));
        if q < one {
            let bound = BigRational::from(BigInt::from(t + 1)) * r.pow(t as i32)
                / ((&one - r).pow(2) * (&one - q));
            if bound <= target {
                return (t, bound);
            }
        }
        t += 1;
    }
}

/// Residuals of `Σ_{m≥1} M(x^m) = x` and `Σ_{m≥1} m x^(m−1) M′(x^m) = 1`,
/// with the omitted tails included in the enclosures.
///
/// `|M(y)| ≤ |y|/(1−|y|)` and `|M′(y)| ≤ 1/(1−|y|)^2` bound the tails.
pub fn identity_residuals(x: &FixedReal, digits: u32) -> Result<IdentityResidual> {
    let scale = x.scale();
    let r = radius_bound(x);
    let (terms, tail) = identity_terms(&r, digits + 2);
    let mut power = FixedReal::from_int(1, scale);
    let mut lambert = x.neg();
    let mut derivative = FixedReal::from_int(-1, scale);
    for m in 1..=terms {
        let prev = power.clone();
        power = power.mul(x);
        lambert = lambert.add(&eval_m(&power)?);
        derivative = derivative.add(&prev.mul(&eval_m_prime(&power)?).mul_int(m as i64));
    }
    Ok(IdentityResidual {
        x: x.clone(),
        lambert: widen(&lambert, &tail),
        derivative: widen(&derivative, &tail),
        terms,
    })
}

/// `Σ_{m≥2} m τ^(m−1) M′(τ^m) − 1`, which vanishes because `M′(τ) = 0`.
pub fn tau_weight_residual(tau: &FixedReal, digits: u32) -> Result<FixedReal> {
    let res = identity_residuals(tau, digits)?;
    Ok(res.derivative.sub(&eval_m_prime(tau)?))
}

/// `(φ(u) − u φ′(u)) − M′(u)/G(u)²` with `φ = 1/G`.
pub fn characteristic_residual(u: &FixedReal) -> Result<FixedReal> {
    let scale = u.scale();
    let one = FixedReal::from_int(1, scale);
    let g = eval_g(u)?;
    let g2 = g.mul(&g);
    let phi = one.div(&g)?;
    let phi_prime = eval_g_prime(u)?.neg().div(&g2)?;
    let lhs = phi.sub(&u.mul(&phi_prime));
    let rhs = eval_m_prime(u)?.div(&g2)?;
    Ok(lhs.sub(&rhs))
}

/// A decimal argument as an exact value at `digits + GUARD`.
pub fn point(s: &str, digits: u32) -> Result<FixedReal> {
    FixedReal::parse(s, digits + GUARD)
}
