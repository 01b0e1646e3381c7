//! Counts of natural exact covering systems by size, gcd and lcm.
//!
//! A system with gcd divisible by `n` corresponds bijectively to an `n`-tuple
//! of natural systems (its contraction pieces); sizes add, and the gcd and
//! lcm are `n` times the gcd and lcm taken over the pieces. Counting the
//! systems of size `k` and gcd exactly `n` therefore sums, over compositions
//! `(j₁ … j_n)` of `k` and piece gcds `(m₁ … m_n)` with `gcd mᵢ = 1`, the
//! products `Π a_{jᵢ,mᵢ}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::mobius_upto;

/// `a_{k,m}` for `1 ≤ m ≤ k ≤ max_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    /// rows[k][m]; index 0 unused in both coordinates.
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn max_size(&self) -> usize {
        self.rows.len() - 1
    }

    /// `a_{k,m}`; zero outside `1 ≤ m ≤ k`.
    pub fn get(&self, k: usize, m: usize) -> BigUint {
        if k == 0 || m == 0 || m > k {
            return BigUint::zero();
        }
        assert!(
            k <= self.max_size(),
            "size {k} beyond table limit {}",
            self.max_size()
        );
        self.rows[k][m].clone()
    }

    /// `a_k = Σ_m a_{k,m}`.
    pub fn row_sum(&self, k: usize) -> BigUint {
        self.rows[k].iter().sum()
    }

    /// CSV with header `k,m,count`, rows for every `1 ≤ m ≤ k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,count\n");
        for k in 1..=self.max_size() {
            for m in 1..=k {
                out.push_str(&format!("{k},{m},{}\n", self.rows[k][m]));
            }
        }
        out
    }

    pub fn truncated(&self, max_size: usize) -> CountTable {
        CountTable {
            rows: self.rows[..=max_size.min(self.max_size())].to_vec(),
        }
    }

    /// Loads a cached table if it covers `max_size`, otherwise computes and
    /// stores one.
    pub fn load_or_compute(max_size: usize, cache: &Path) -> Result<CountTable> {
        if cache.exists() {
            let text = fs::read_to_string(cache).map_err(|e| Error::Cache(e.to_string()))?;
            let table = CountTable::from_cache_json(&text)?;
            if table.max_size() >= max_size {
                return Ok(table.truncated(max_size));
            }
        }
        let table = count_size_gcd(max_size);
        if let Some(dir) = cache.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
            }
        }
        fs::write(cache, table.to_cache_json()).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(table)
    }

    pub fn to_cache_json(&self) -> String {
        let entries = (1..=self.max_size())
            .flat_map(|k| (1..=k).map(move |m| (k, m)))
            .map(|(k, m)| CacheEntry {
                k,
                m,
                count: self.rows[k][m].to_string(),
            })
            .collect();
        let file = CacheFile {
            format: CACHE_FORMAT.to_string(),
            version: CACHE_VERSION,
            max_size: self.max_size(),
            entries,
        };
        serde_json::to_string_pretty(&file).expect("cache serializes")
    }

    pub fn from_cache_json(text: &str) -> Result<CountTable> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))?;
        if file.format != CACHE_FORMAT || file.version != CACHE_VERSION {
            return Err(Error::Cache(format!(
                "unsupported cache format {} v{}",
                file.format, file.version
            )));
        }
        let k_max = file.max_size;
        let mut rows = vec![Vec::new(); k_max + 1];
        for (k, row) in rows.iter_mut().enumerate().skip(1) {
            *row = vec![BigUint::zero(); k + 1];
        }
        let mut seen = 0usize;
        for e in file.entries {
            if e.m == 0 || e.m > e.k || e.k > k_max {
                return Err(Error::Cache(format!(
                    "entry ({}, {}) out of range",
                    e.k, e.m
                )));
            }
            rows[e.k][e.m] = e
                .count
                .parse()
                .map_err(|_| Error::Cache(format!("bad count {:?}", e.count)))?;
            seen += 1;
        }
        if seen != k_max * (k_max + 1) / 2 {
            return Err(Error::Cache("cache is missing entries".into()));
        }
        Ok(CountTable { rows })
    }
}

const CACHE_FORMAT: &str = "necs-count-table";
const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    max_size: usize,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    k: usize,
    m: usize,
    count: String,
}

/// Computes `a_{k,m}` for `1 ≤ m ≤ k ≤ max_size`.
///
/// The gcd-1 condition on the piece gcds is applied by Möbius inversion over
/// a common divisor `d`: with `S_{j,d} = Σ_{d | m} a_{j,m}`, the tuple sum is
/// `Σ_d μ(d) Π S_{jᵢ,d}`, and summing over compositions turns the product
/// into the `x^k` coefficient of `P_d(x)^n`, `P_d = Σ_j S_{j,d} x^j`.
/// Rows are filled in increasing size; entries within a row are independent.
pub fn count_size_gcd(max_size: usize) -> CountTable {
    assert!(max_size >= 1, "max_size must be positive");
    let mut primitive = vec![BigUint::zero(); max_size + 1];
    primitive[1] = BigUint::from(1u32);
    count_from_primitive(&primitive)
}

/// The same recurrence for any family closed under contraction and
/// reassembly, given its gcd-1 counts: `primitive[k]` systems of size `k`
/// with gcd 1 (index 0 ignored). Natural systems have `primitive = [_, 1, 0, …]`.
pub fn count_from_primitive(primitive: &[BigUint]) -> CountTable {
    let max_size = primitive.len().saturating_sub(1);
    assert!(max_size >= 1, "max_size must be positive");
    let mu = mobius_upto(max_size);
    let mut rows: Vec<Vec<BigUint>> = vec![Vec::new(); max_size + 1];
    rows[1] = vec![BigUint::zero(), primitive[1].clone()];
    for k in 2..=max_size {
        // d ranges over possible common divisors of the piece gcds.
        let per_d: Vec<Vec<BigInt>> = (1..k)
            .into_par_iter()
            .map(|d| {
                if mu[d] == 0 {
                    return Vec::new();
                }
                let p = divisor_sums(&rows, k, d);
                power_coefficients(&p, k)
            })
            .collect();
        let mut row = vec![BigUint::zero(); k + 1];
        for (n, slot) in row.iter_mut().enumerate().skip(2) {
            let mut acc = BigInt::zero();
            for (d_idx, coeffs) in per_d.iter().enumerate() {
                if let Some(c) = coeffs.get(n) {
                    let d = d_idx + 1;
                    match mu[d] {
                        1 => acc += c,
                        -1 => acc -= c,
                        _ => {}
                    }
                }
            }
            debug_assert!(!acc.is_negative());
            *slot = acc.to_biguint().expect("counts are nonnegative");
        }
        row[1] = primitive[k].clone();
        rows[k] = row;
    }
    CountTable { rows }
}

/// `P_d` truncated to degree `k − 1`: coefficient `j` is `Σ_{d | m} a_{j,m}`.
fn divisor_sums(rows: &[Vec<BigUint>], k: usize, d: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); k];
    for (j, slot) in p.iter_mut().enumerate().skip(1) {
        let s: BigUint = (d..=j).step_by(d).map(|m| &rows[j][m]).sum();
        *slot = BigInt::from(s);
    }
    p
}

/// `[x^k] P^n` for `n = 0..=k`, with `P` given through degree `k − 1`.
fn power_coefficients(p: &[BigInt], k: usize) -> Vec<BigInt> {
    let val = p.iter().position(|c| !c.is_zero()).unwrap_or(k);
    let mut out = vec![BigInt::zero(); k + 1];
    let mut power = vec![BigInt::zero(); k + 1];
    power[0] = BigInt::from(1);
    for n in 1..=k {
        if n * val > k {
            break;
        }
        let mut next = vec![BigInt::zero(); k + 1];
        for (i, a) in power.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in p.iter().enumerate() {
                if i + j > k {
                    break;
                }
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        power = next;
        out[n] = power[k].clone();
    }
    out
}

/// An lcm value, or the bucket for values beyond the configured limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lcm {
    Exact(u64),
    Overflow,
}

impl fmt::Display for Lcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lcm::Exact(l) => write!(f, "{l}"),
            Lcm::Overflow => f.write_str("overflow"),
        }
    }
}

impl Lcm {
    fn join(self, other: Lcm, limit: u64) -> Lcm {
        match (self, other) {
            (Lcm::Exact(a), Lcm::Exact(b)) => {
                let l = a.lcm(&b);
                if l > limit {
                    Lcm::Overflow
                } else {
                    Lcm::Exact(l)
                }
            }
            _ => Lcm::Overflow,
        }
    }

    fn times(self, n: u64, limit: u64) -> Lcm {
        match self {
            Lcm::Exact(a) => match a.checked_mul(n) {
                Some(l) if l <= limit => Lcm::Exact(l),
                _ => Lcm::Overflow,
            },
            Lcm::Overflow => Lcm::Overflow,
        }
    }
}

/// `a_{k,m,ℓ}`: counts by size, gcd and lcm. Lcm values above `lcm_max`
/// are pooled per `(k, m)` in an explicit [`Lcm::Overflow`] bucket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcmCountTable {
    max_size: usize,
    lcm_max: u64,
    entries: BTreeMap<(usize, usize, Lcm), BigUint>,
}

impl LcmCountTable {
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn lcm_max(&self) -> u64 {
        self.lcm_max
    }

    pub fn get(&self, k: usize, m: usize, l: u64) -> BigUint {
        self.entries
            .get(&(k, m, Lcm::Exact(l)))
            .cloned()
            .unwrap_or_default()
    }

    pub fn overflow(&self, k: usize, m: usize) -> BigUint {
        self.entries
            .get(&(k, m, Lcm::Overflow))
            .cloned()
            .unwrap_or_default()
    }

    pub fn has_overflow(&self) -> bool {
        self.entries.keys().any(|(_, _, l)| *l == Lcm::Overflow)
    }

    /// Nonzero entries in `(k, m, ℓ)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Lcm, &BigUint)> {
        self.entries.iter().map(|(&(k, m, l), c)| (k, m, l, c))
    }

    /// `Σ_ℓ a_{k,m,ℓ}`, overflow bucket included.
    pub fn marginal(&self, k: usize, m: usize) -> BigUint {
        self.entries
            .range((k, m, Lcm::Exact(0))..=(k, m, Lcm::Overflow))
            .map(|(_, c)| c)
            .sum()
    }

    /// CSV with header `k,m,l,count`; only nonzero entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,l,count\n");
        for (k, m, l, c) in self.entries() {
            out.push_str(&format!("{k},{m},{l},{c}\n"));
        }
        out
    }
}

type LcmRow = Vec<(usize, Lcm, BigUint)>;

/// Computes `a_{k,m,ℓ}` for all `k ≤ max_size`.
pub fn count_size_gcd_lcm(max_size: usize, lcm_max: u64) -> LcmCountTable {
    assert!(max_size >= 1, "max_size must be positive");
    let lcm_max = lcm_max.max(1);
    // by_size[j] lists (gcd, lcm, count) for natural systems of size j.
    let mut by_size: Vec<LcmRow> = vec![Vec::new(); max_size + 1];
    by_size[1] = vec![(1, Lcm::Exact(1), BigUint::from(1u32))];
    for k in 2..=max_size {
        let rows: Vec<LcmRow> = (2..=k)
            .into_par_iter()
            .map(|n| lcm_row(&by_size, k, n, lcm_max))
            .collect();
        by_size[k] = rows.into_iter().flatten().collect();
    }
    let mut entries = BTreeMap::new();
    for (k, row) in by_size.iter().enumerate() {
        for (m, l, c) in row {
            entries.insert((k, *m, *l), c.clone());
        }
    }
    LcmCountTable {
        max_size,
        lcm_max,
        entries,
    }
}

/// Entries of size `k` and gcd exactly `n`: tuples of `n` pieces with
/// coprime gcds, lcm `n · lcm(pieces)`.
fn lcm_row(by_size: &[LcmRow], k: usize, n: usize, lcm_max: u64) -> LcmRow {
    // state: (size so far, gcd of piece gcds so far (0 = none), lcm so far)
    let mut states: HashMap<(usize, usize, Lcm), BigUint> = HashMap::new();
    states.insert((0, 0, Lcm::Exact(1)), BigUint::from(1u32));
    for t in 1..=n {
        let cap = k - (n - t);
        let mut next: HashMap<(usize, usize, Lcm), BigUint> = HashMap::new();
        for ((sum, g, l), c) in &states {
            for j in 1..=cap.saturating_sub(*sum) {
                for (pg, pl, pc) in &by_size[j] {
                    let key = (sum + j, g.gcd(pg), l.join(*pl, lcm_max));
                    *next.entry(key).or_default() += c * pc;
                }
            }
        }
        states = next;
    }
    let mut out: BTreeMap<Lcm, BigUint> = BTreeMap::new();
    for ((sum, g, l), c) in states {
        if sum == k && g == 1 {
            *out.entry(l.times(n as u64, lcm_max)).or_default() += c;
        }
    }
    out.into_iter().map(|(l, c)| (n, l, c)).collect()
}

/// The set of lcm values attained by natural systems of size `k`.
///
/// Only attainability is tracked: a system of gcd divisible by `n` has lcm
/// `n · lcm(ℓ₁ … ℓ_n)` over arbitrary natural pieces with sizes summing to `k`.
pub fn distinct_lcm_values(k: usize) -> BTreeSet<u64> {
    lcm_value_sets(k).pop().unwrap_or_default()
}

/// Number of distinct lcm values at size `k`.
pub fn lcm_value_count(k: usize) -> usize {
    distinct_lcm_values(k).len()
}

/// `sets[j]` = attainable lcm values at size `j`, for `j ≤ k`.
pub fn lcm_value_sets(k: usize) -> Vec<BTreeSet<u64>> {
    let mut sets: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); k + 1];
    if k == 0 {
        return sets;
    }
    sets[1].insert(1);
    for s in 2..=k {
        let found: Vec<BTreeSet<u64>> = (2..=s)
            .into_par_iter()
            .map(|n| {
                let mut states: HashSet<(usize, u64)> = HashSet::from([(0, 1)]);
                for t in 1..=n {
                    let cap = s - (n - t);
                    let mut next = HashSet::new();
                    for &(sum, l) in &states {
                        for j in 1..=cap.saturating_sub(sum) {
                            for &pl in &sets[j] {
                                next.insert((sum + j, l.lcm(&pl)));
                            }
                        }
                    }
                    states = next;
                }
                states
                    .into_iter()
                    .filter(|&(sum, _)| sum == s)
                    .map(|(_, l)| l * n as u64)
                    .collect()
            })
            .collect();
        sets[s] = found.into_iter().flatten().collect();
    }
    sets
}
