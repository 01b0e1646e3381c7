//! Residue classes and finite covering systems of the integers.
//!
//! A [`CoveringSystem`] is stored in canonical order: classes sorted by
//! modulus, then offset, with no duplicates. Set equality is therefore plain
//! sequence equality, which the enumeration and shift code rely on.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trees::Tree;

/// The residue class `{x : x ≡ offset (mod modulus)}`.
///
/// Field order matters: the derived ordering is by modulus, then offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueClass {
    modulus: u64,
    offset: u64,
}

impl ResidueClass {
    pub fn new(offset: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if offset >= modulus {
            return Err(Error::InvalidClass { offset, modulus });
        }
        Ok(ResidueClass { modulus, offset })
    }

    /// Caller guarantees `offset < modulus`.
    pub(crate) const fn new_unchecked(offset: u64, modulus: u64) -> Self {
        ResidueClass { modulus, offset }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, x: i64) -> bool {
        (x as i128).rem_euclid(self.modulus as i128) as u64 == self.offset
    }

    /// Two classes are disjoint iff their offsets differ modulo the gcd of the moduli.
    pub fn is_disjoint(&self, other: &ResidueClass) -> bool {
        let g = self.modulus.gcd(&other.modulus);
        self.offset % g != other.offset % g
    }

    /// Image under the `⟨b, c⟩`-expansion: `⟨b + c·a, c·n⟩`.
    pub fn expand(&self, b: u64, c: u64) -> ResidueClass {
        ResidueClass {
            modulus: c * self.modulus,
            offset: b + c * self.offset,
        }
    }

    pub fn shift(&self, t: i64) -> ResidueClass {
        let n = self.modulus as i128;
        ResidueClass {
            modulus: self.modulus,
            offset: (self.offset as i128 + t as i128).rem_euclid(n) as u64,
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.offset, self.modulus)
    }
}

/// A finite, nonempty set of residue classes in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoveringSystem {
    classes: Vec<ResidueClass>,
}

impl CoveringSystem {
    /// Builds a system from classes in any order. Duplicates are rejected.
    pub fn new(mut classes: Vec<ResidueClass>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::EmptySystem);
        }
        classes.sort_unstable();
        if let Some(w) = classes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateClass(w[0]));
        }
        Ok(CoveringSystem { classes })
    }

    /// Caller guarantees the classes are nonempty, sorted and distinct.
    pub(crate) fn from_sorted_unchecked(classes: Vec<ResidueClass>) -> Self {
        debug_assert!(!classes.is_empty());
        debug_assert!(classes.windows(2).all(|w| w[0] < w[1]));
        CoveringSystem { classes }
    }

    /// Sorts and wraps classes already known to be distinct.
    pub(crate) fn from_distinct(mut classes: Vec<ResidueClass>) -> Self {
        classes.sort_unstable();
        Self::from_sorted_unchecked(classes)
    }

    /// The system `{⟨0,1⟩}`, i.e. ℤ itself.
    pub fn trivial() -> Self {
        CoveringSystem {
            classes: vec![ResidueClass::new_unchecked(0, 1)],
        }
    }

    /// The full residue system `{⟨0,n⟩, …, ⟨n−1,n⟩}`.
    pub fn full(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(CoveringSystem {
            classes: (0..n).map(|a| ResidueClass::new_unchecked(a, n)).collect(),
        })
    }

    /// Convenience constructor from `(offset, modulus)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        let classes = pairs
            .iter()
            .map(|&(a, n)| ResidueClass::new(a, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(classes)
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }

    pub fn gcd(&self) -> u64 {
        self.classes.iter().fold(0, |g, c| g.gcd(&c.modulus))
    }

    /// Least common multiple of the moduli.
    ///
    /// Panics if the lcm does not fit in a `u64`; use [`Self::lcm_big`] for
    /// arbitrary input.
    pub fn lcm(&self) -> u64 {
        self.classes.iter().fold(1u64, |l, c| {
            let g = l.gcd(&c.modulus);
            (l / g)
                .checked_mul(c.modulus)
                .expect("lcm of moduli overflows u64")
        })
    }

    pub fn lcm_big(&self) -> BigUint {
        self.classes
            .iter()
            .fold(BigUint::one(), |l, c| l.lcm(&BigUint::from(c.modulus)))
    }

    pub fn contains(&self, class: &ResidueClass) -> bool {
        self.classes.binary_search(class).is_ok()
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        let cs = &self.classes;
        (0..cs.len()).all(|i| cs[i + 1..].iter().all(|d| cs[i].is_disjoint(d)))
    }

    /// True iff the classes partition ℤ: pairwise disjoint and `Σ 1/nᵢ = 1`.
    pub fn is_exact(&self) -> bool {
        if !self.is_pairwise_disjoint() {
            return false;
        }
        let l = self.lcm_big();
        let total: BigUint = self
            .classes
            .iter()
            .map(|c| &l / BigUint::from(c.modulus))
            .sum();
        total == l
    }

    /// The `⟨b, c⟩`-expansion `{⟨b + c·aᵢ, c·nᵢ⟩}`.
    pub fn expand(&self, b: u64, c: u64) -> Result<CoveringSystem> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        if b >= c {
            return Err(Error::InvalidClass {
                offset: b,
                modulus: c,
            });
        }
        // Expansion is monotone in (modulus, offset), so order is preserved.
        Ok(CoveringSystem {
            classes: self.classes.iter().map(|x| x.expand(b, c)).collect(),
        })
    }

    /// Replaces `target` by its `r`-split `{⟨a + j·n, r·n⟩ : 0 ≤ j < r}`.
    pub fn r_split(&self, target: &ResidueClass, r: u64) -> Result<CoveringSystem> {
        if r < 2 {
            return Err(Error::SplitTooSmall(r));
        }
        let pos = self
            .classes
            .binary_search(target)
            .map_err(|_| Error::ClassNotFound(*target))?;
        let mut classes = self.classes.clone();
        classes.remove(pos);
        let (a, n) = (target.offset, target.modulus);
        classes.extend((0..r).map(|j| ResidueClass::new_unchecked(a + j * n, r * n)));
        Ok(Self::from_distinct(classes))
    }

    /// Splits a system with `n | gcd` into `n` pieces by residue mod `n`.
    ///
    /// Piece `i` (0-based) collects `⟨(a − i)/n, m/n⟩` for every `⟨a, m⟩` with
    /// `a ≡ i (mod n)`. For an exact input every piece is exact; an empty
    /// piece means the input was not exact and is reported as such.
    pub fn contract(&self, n: u64) -> Result<Vec<CoveringSystem>> {
        if n < 2 {
            return Err(Error::SplitTooSmall(n));
        }
        let gcd = self.gcd();
        if gcd % n != 0 {
            return Err(Error::NotDivisor { n, gcd });
        }
        let mut pieces: Vec<Vec<ResidueClass>> = vec![Vec::new(); n as usize];
        for c in &self.classes {
            let i = c.offset % n;
            pieces[i as usize].push(ResidueClass::new_unchecked(
                (c.offset - i) / n,
                c.modulus / n,
            ));
        }
        pieces
            .into_iter()
            .map(|p| {
                if p.is_empty() {
                    Err(Error::NotExact)
                } else {
                    Ok(Self::from_distinct(p))
                }
            })
            .collect()
    }

    /// Inverse of [`Self::contract`]: `⋃ᵢ E⟨i, n⟩(pieces[i])` with `n = pieces.len()`.
    pub fn reassemble(pieces: &[CoveringSystem]) -> Result<CoveringSystem> {
        let n = pieces.len() as u64;
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        let classes = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.classes.iter().map(move |c| c.expand(i as u64, n)))
            .collect();
        Ok(Self::from_distinct(classes))
    }

    /// Decides membership in the set of natural exact covering systems.
    ///
    /// A natural system of size > 1 has gcd > 1, and for any prime `p` dividing
    /// the gcd it is natural iff all `p` contraction pieces are natural.
    pub fn is_natural(&self) -> Result<bool> {
        if !self.is_exact() {
            return Err(Error::NotExact);
        }
        Ok(natural_rec(self))
    }

    /// A split tree whose leaf labels reproduce this system, if it is natural.
    pub fn natural_witness(&self) -> Result<Option<Tree>> {
        if !self.is_exact() {
            return Err(Error::NotExact);
        }
        Ok(witness_rec(self))
    }

    pub fn shift(&self, t: i64) -> CoveringSystem {
        Self::from_distinct(self.classes.iter().map(|c| c.shift(t)).collect())
    }

    /// The least system in the shift orbit and the least `t ∈ [0, lcm)` reaching it.
    ///
    /// The least shifted system always starts with `⟨0, n₀⟩`, `n₀` the smallest
    /// modulus, so only shifts moving some class of modulus `n₀` to offset 0
    /// are compared.
    pub fn canonical_shift(&self) -> (CoveringSystem, u64) {
        let l = self.lcm();
        let n0 = self.classes[0].modulus;
        let groups = ModulusGroups::new(&self.classes);
        let first = &groups.groups[0].1;

        let mut candidates: Vec<u64> = first
            .iter()
            .flat_map(|&a| {
                let base = (n0 - a) % n0;
                (0..l / n0).map(move |j| base + j * n0)
            })
            .collect();
        candidates.sort_unstable();

        let mut best_t = candidates[0];
        let mut best = groups.shifted(best_t);
        let mut scratch = Vec::new();
        for &t in &candidates[1..] {
            if groups.shifted_cmp(t, &best, &mut scratch) == Ordering::Less {
                best = groups.shifted(t);
                best_t = t;
            }
        }
        let classes = groups.flatten(&best);
        (Self::from_sorted_unchecked(classes), best_t)
    }

    /// Parses the line format: one `a mod n` per line, `#` comments, blank lines ignored.
    pub fn parse_text(input: &str) -> Result<CoveringSystem> {
        let mut classes = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || {
                Error::Parse(format!(
                    "line {}: expected `a mod n`, got {raw:?}",
                    lineno + 1
                ))
            };
            let mut parts = line.split_whitespace();
            let a = parts.next().ok_or_else(bad)?;
            let kw = parts.next().ok_or_else(bad)?;
            let n = parts.next().ok_or_else(bad)?;
            if kw != "mod" || parts.next().is_some() {
                return Err(bad());
            }
            let a: u64 = a.parse().map_err(|_| bad())?;
            let n: u64 = n.parse().map_err(|_| bad())?;
            classes.push(ResidueClass::new(a, n)?);
        }
        CoveringSystem::new(classes)
    }

    pub fn to_text(&self) -> String {
        self.classes
            .iter()
            .map(|c| format!("{} mod {}\n", c.offset, c.modulus))
            .collect()
    }

    /// Parses a JSON array of `[a, n]` pairs.
    pub fn parse_json(input: &str) -> Result<CoveringSystem> {
        let pairs: Vec<(u64, u64)> =
            serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_pairs(&pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.pairs()).expect("pairs serialize")
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.classes.iter().map(|c| (c.offset, c.modulus)).collect()
    }
}

impl fmt::Display for CoveringSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.classes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for CoveringSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoveringSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(u64, u64)>::deserialize(d)?;
        Self::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n % 2 == 0 {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 2;
    }
    n
}

fn natural_rec(c: &CoveringSystem) -> bool {
    if c.size() == 1 {
        return true;
    }
    let g = c.gcd();
    if g == 1 {
        return false;
    }
    match c.contract(smallest_prime_factor(g)) {
        Ok(pieces) => pieces.iter().all(natural_rec),
        Err(_) => false,
    }
}

fn witness_rec(c: &CoveringSystem) -> Option<Tree> {
    if c.size() == 1 {
        return Some(Tree::leaf());
    }
    let g = c.gcd();
    if g == 1 {
        return None;
    }
    let pieces = c.contract(smallest_prime_factor(g)).ok()?;
    let children = pieces.iter().map(witness_rec).collect::<Option<Vec<_>>>()?;
    Some(Tree::node(children))
}

/// Offsets grouped by modulus, in increasing modulus order.
struct ModulusGroups {
    groups: Vec<(u64, Vec<u64>)>,
}

impl ModulusGroups {
    fn new(classes: &[ResidueClass]) -> Self {
        let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
        for c in classes {
            match groups.last_mut() {
                Some((n, offs)) if *n == c.modulus => offs.push(c.offset),
                _ => groups.push((c.modulus, vec![c.offset])),
            }
        }
        ModulusGroups { groups }
    }

    fn shifted(&self, t: u64) -> Vec<Vec<u64>> {
        self.groups
            .iter()
            .map(|(n, offs)| {
                let mut v: Vec<u64> = offs.iter().map(|a| (a + t % n) % n).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Compares `shifted(t)` against `best` group by group, stopping early.
    fn shifted_cmp(&self, t: u64, best: &[Vec<u64>], scratch: &mut Vec<u64>) -> Ordering {
        for ((n, offs), b) in self.groups.iter().zip(best) {
            scratch.clear();
            scratch.extend(offs.iter().map(|a| (a + t % n) % n));
            scratch.sort_unstable();
            match scratch.as_slice().cmp(b.as_slice()) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn flatten(&self, offsets: &[Vec<u64>]) -> Vec<ResidueClass> {
        self.groups
            .iter()
            .zip(offsets)
            .flat_map(|((n, _), offs)| {
                offs.iter()
                    .map(move |&a| ResidueClass::new_unchecked(a, *n))
            })
            .collect()
    }
}
