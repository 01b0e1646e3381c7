//! Exhaustive search for exact covering systems, natural or not.
//!
//! An exact covering system with lcm `L = Π pᵢ^αᵢ` and `k` classes satisfies
//! `k ≥ 1 + Σ αᵢ(pᵢ − 1)` (Znám), so only finitely many lcm values are
//! possible for each size. For each candidate `L` the search works on the
//! bitset `ℤ/L`: it repeatedly takes the uncovered residue `x` lying in the
//! fewest still-usable classes and branches on the class `⟨x mod d, d⟩`,
//! `d | L`, that covers it. Each system is reached along exactly one branch.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::congruence::{CoveringSystem, ResidueClass};
use crate::counting::{count_from_primitive, CountTable};
use crate::enumeration::table_cmp;
use crate::series::IntSeries;

#[derive(Clone, Debug, Default)]
pub struct EcsConfig {
    /// Only lcm values up to this bound are searched.
    pub max_modulus: Option<u64>,
    /// Wall-clock limit for the whole search.
    pub budget: Option<Duration>,
    /// Keep only systems whose moduli have gcd 1.
    pub gcd_one: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// Every candidate lcm was searched to the end.
    Complete,
    /// The time budget ran out; the systems found so far are a subset.
    BudgetExhausted,
    /// Some candidate lcm values exceeded `max_modulus` and were skipped.
    ModulusCapped,
}

#[derive(Clone, Debug)]
pub struct EcsReport {
    pub status: SearchStatus,
    /// Sorted in table order.
    pub systems: Vec<CoveringSystem>,
    pub searched_lcms: Vec<u64>,
    pub skipped_lcms: Vec<u64>,
    pub nodes: u64,
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Lcm values permitted for a size-`k` exact cover by the bound
/// `Σ αᵢ(pᵢ − 1) ≤ k − 1`, in increasing order.
///
/// With `gcd_one`, values with fewer than three distinct primes are dropped:
/// classes with coprime moduli always meet, so a gcd-1 exact cover needs, for
/// every prime `p | L`, a modulus prime to `p`, and those moduli must
/// pairwise share a prime.
pub fn candidate_lcms(k: usize, gcd_one: bool) -> Vec<u64> {
    let budget = k.saturating_sub(1) as u64;
    let primes: Vec<u64> = (2..=budget + 1).filter(|&p| is_prime(p)).collect();
    let mut out = Vec::new();
    fn rec(
        primes: &[u64],
        i: usize,
        left: u64,
        l: u64,
        distinct: usize,
        gcd_one: bool,
        out: &mut Vec<u64>,
    ) {
        if i == primes.len() {
            if !gcd_one || distinct >= 3 {
                out.push(l);
            }
            return;
        }
        let p = primes[i];
        let mut pow = 1u64;
        let mut cost = 0;
        loop {
            rec(
                primes,
                i + 1,
                left - cost,
                l * pow,
                distinct + usize::from(pow > 1),
                gcd_one,
                out,
            );
            cost += p - 1;
            if cost > left {
                break;
            }
            pow *= p;
        }
    }
    rec(&primes, 0, budget, 1, 0, gcd_one, &mut out);
    out.sort_unstable();
    out
}

struct Search<'a> {
    l: u64,
    k: usize,
    /// Divisors of `l` that are at least 2, ascending.
    divisors: Vec<u64>,
    /// Index of class `⟨a, divisors[i]⟩` is `base[i] + a`.
    base: Vec<usize>,
    /// slots[x·τ + i]: index of the class `⟨x mod divisors[i], divisors[i]⟩`.
    slots: Vec<u32>,
    /// Number of covered residues in each class.
    blocked: Vec<u32>,
    /// feasible[r][u]: `u` is a sum of exactly `r` values `L/d`.
    feasible: Vec<Vec<bool>>,
    covered: Vec<u64>,
    uncovered: u64,
    chosen: Vec<ResidueClass>,
    gcd_one: bool,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
    nodes: u64,
    found: Vec<CoveringSystem>,
}

impl<'a> Search<'a> {
    fn new(
        k: usize,
        l: u64,
        gcd_one: bool,
        deadline: Option<Instant>,
        stop: &'a AtomicBool,
    ) -> Self {
        let divs: Vec<u64> = divisors(l).into_iter().filter(|&d| d >= 2).collect();
        let weights: Vec<u64> = divs.iter().map(|d| l / d).collect();
        let mut base = Vec::with_capacity(divs.len());
        let mut total = 0usize;
        for &d in &divs {
            base.push(total);
            total += d as usize;
        }
        let slots = (0..l)
            .flat_map(|x| {
                divs.iter()
                    .zip(&base)
                    .map(move |(&d, &b)| (b as u64 + x % d) as u32)
            })
            .collect();
        Search {
            l,
            k,
            slots,
            feasible: feasibility(l, &weights, k),
            divisors: divs,
            base,
            blocked: vec![0; total],
            covered: vec![0; l.div_ceil(64) as usize],
            uncovered: l,
            chosen: Vec::with_capacity(k),
            gcd_one,
            deadline,
            stop,
            nodes: 0,
            found: Vec::new(),
        }
    }

    fn index(&self, d: u64) -> usize {
        self.divisors
            .binary_search(&d)
            .expect("modulus divides the lcm")
    }

    fn weight_fits(&self, i: usize) -> bool {
        let w = self.l / self.divisors[i];
        let remaining = self.k - self.chosen.len();
        remaining >= 1
            && w <= self.uncovered
            && self.feasible[remaining - 1][(self.uncovered - w) as usize]
    }

    fn free(&self, i: usize, a: u64) -> bool {
        self.blocked[self.base[i] + a as usize] == 0
    }

    /// Whether `⟨a, d⟩` can be added with the rest still completable.
    fn can_place(&self, a: u64, d: u64) -> bool {
        let i = self.index(d);
        self.weight_fits(i) && self.free(i, a)
    }

    fn mark(&mut self, a: u64, d: u64, cover: bool) {
        let mut x = a;
        while x < self.l {
            self.covered[(x / 64) as usize] ^= 1 << (x % 64);
            let t = self.divisors.len();
            let row = x as usize * t;
            for &slot in &self.slots[row..row + t] {
                if cover {
                    self.blocked[slot as usize] += 1;
                } else {
                    self.blocked[slot as usize] -= 1;
                }
            }
            x += d;
        }
    }

    fn place(&mut self, a: u64, d: u64) {
        self.mark(a, d, true);
        self.uncovered -= self.l / d;
        self.chosen.push(ResidueClass::new_unchecked(a, d));
    }

    fn unplace(&mut self) {
        let c = self.chosen.pop().expect("a placed class");
        self.mark(c.offset(), c.modulus(), false);
        self.uncovered += self.l / c.modulus();
    }

    fn out_of_time(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % 4096 == 1 {
            if let Some(t) = self.deadline {
                if Instant::now() >= t {
                    self.stop.store(true, AtomicOrdering::Relaxed);
                }
            }
        }
        self.stop.load(AtomicOrdering::Relaxed)
    }

    /// Completes the current partial cover, branching on the uncovered
    /// residue that lies in the fewest usable classes.
    fn complete(&mut self) {
        if self.out_of_time() {
            return;
        }
        let remaining = self.k - self.chosen.len();
        if remaining == 0 || self.uncovered == 0 {
            if remaining == 0 && self.uncovered == 0 {
                self.record();
            }
            return;
        }
        let t = self.divisors.len();
        let usable: Vec<usize> = (0..t).filter(|&i| self.weight_fits(i)).collect();
        let mut best: Option<(u64, usize)> = None;
        'scan: for (w, &word) in self.covered.iter().enumerate() {
            let mut free_bits = !word;
            while free_bits != 0 {
                let x = w as u64 * 64 + free_bits.trailing_zeros() as u64;
                free_bits &= free_bits - 1;
                if x >= self.l {
                    break 'scan;
                }
                let row = &self.slots[x as usize * t..(x as usize + 1) * t];
                let options = usable
                    .iter()
                    .filter(|&&i| self.blocked[row[i] as usize] == 0)
                    .count();
                if best.is_none_or(|(_, n)| options < n) {
                    best = Some((x, options));
                    if options <= 1 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((x, options)) = best else { return };
        if options == 0 {
            return;
        }
        for i in usable {
            let d = self.divisors[i];
            if self.free(i, x % d) {
                self.place(x % d, d);
                self.complete();
                self.unplace();
            }
        }
    }

    /// Places, for each prime from `primes[i]` on that no chosen modulus
    /// avoids yet, a class whose modulus avoids it; then completes.
    fn place_full(&mut self, primes: &[u64], i: usize) {
        if i == primes.len() {
            self.complete();
            return;
        }
        let p = primes[i];
        if self.chosen.iter().any(|c| c.modulus() % p != 0) {
            self.place_full(primes, i + 1);
            return;
        }
        for j in 0..self.divisors.len() {
            let d = self.divisors[j];
            if d % p != 0 && self.weight_fits(j) {
                for a in 0..d {
                    if self.free(j, a) {
                        self.place(a, d);
                        self.place_full(primes, i + 1);
                        self.unplace();
                    }
                }
            }
        }
    }

    fn record(&mut self) {
        let lcm = self.chosen.iter().fold(1u64, |a, c| a.lcm(&c.modulus()));
        if lcm != self.l {
            return;
        }
        if self.gcd_one && self.chosen.iter().fold(0u64, |a, c| a.gcd(&c.modulus())) != 1 {
            return;
        }
        self.found
            .push(CoveringSystem::from_distinct(self.chosen.clone()));
    }
}

fn feasibility(l: u64, weights: &[u64], k: usize) -> Vec<Vec<bool>> {
    let size = l as usize + 1;
    let mut table = vec![vec![false; size]; k + 1];
    table[0][0] = true;
    for r in 1..=k {
        let (prev, rest) = table.split_at_mut(r);
        let prev = &prev[r - 1];
        let cur = &mut rest[0];
        for (u, &ok) in prev.iter().enumerate() {
            if ok {
                for &w in weights {
                    let v = u + w as usize;
                    if v < size {
                        cur[v] = true;
                    }
                }
            }
        }
    }
    table
}

/// A unit of parallel work for one candidate lcm.
#[derive(Clone, Copy, Debug)]
enum Task {
    /// All covers whose class through 0 has modulus `d0`.
    Plain { l: u64, d0: u64 },
    /// Gcd-1 covers containing `⟨0, d0⟩` (modulus prime to the least prime
    /// of `l`) and, if given, the class `⟨b, m⟩`.
    Primitive {
        l: u64,
        d0: u64,
        second: Option<(u64, u64)>,
    },
}

fn distinct_primes(l: u64) -> Vec<u64> {
    factorize(l).into_iter().map(|(p, _)| p).collect()
}

/// Gcd-1 tasks for `l`.
///
/// Each cover has a class whose modulus is prime to the least prime `p₁`;
/// shifting puts it at offset 0. If that modulus `d0` is divisible by the
/// next prime `p`, the cover also has a class `⟨b, m⟩` with `p ∤ m`, and
/// shifts by multiples of `d0` move `b` to the range `[0, gcd(d0, m))`.
/// Orbits are restored by closing the results under all shifts.
fn primitive_tasks(l: u64) -> Vec<Task> {
    let primes = distinct_primes(l);
    let mut tasks = Vec::new();
    for d0 in divisors(l)
        .into_iter()
        .filter(|&d| d >= 2 && d % primes[0] != 0)
    {
        match primes[1..].iter().find(|&&p| d0 % p == 0) {
            None => tasks.push(Task::Primitive {
                l,
                d0,
                second: None,
            }),
            Some(&p) => {
                for m in divisors(l).into_iter().filter(|&m| m >= 2 && m % p != 0) {
                    for b in 0..d0.gcd(&m) {
                        // ⟨b, m⟩ meets ⟨0, d0⟩ iff b ≡ 0 (mod gcd)
                        if b % d0.gcd(&m) != 0 {
                            tasks.push(Task::Primitive {
                                l,
                                d0,
                                second: Some((m, b)),
                            });
                        }
                    }
                }
            }
        }
    }
    tasks
}

fn run_task(
    task: Task,
    k: usize,
    gcd_one: bool,
    deadline: Option<Instant>,
    stop: &AtomicBool,
    nodes: &AtomicU64,
) -> Vec<CoveringSystem> {
    let found = match task {
        Task::Plain { l: 1, .. } => {
            if k == 1 {
                vec![CoveringSystem::trivial()]
            } else {
                Vec::new()
            }
        }
        Task::Plain { l, d0 } => {
            let mut s = Search::new(k, l, gcd_one, deadline, stop);
            if s.can_place(0, d0) {
                s.place(0, d0);
                s.complete();
            }
            nodes.fetch_add(s.nodes, AtomicOrdering::Relaxed);
            s.found
        }
        Task::Primitive { l, d0, second } => {
            let mut s = Search::new(k, l, true, deadline, stop);
            let primes = distinct_primes(l);
            if s.can_place(0, d0) {
                s.place(0, d0);
                match second {
                    Some((m, b)) if s.can_place(b, m) => {
                        s.place(b, m);
                        s.place_full(&primes, 1);
                    }
                    Some(_) => {}
                    None => s.place_full(&primes, 1),
                }
            }
            nodes.fetch_add(s.nodes, AtomicOrdering::Relaxed);
            s.found
        }
    };
    found
}

/// Searches every candidate lcm for exact covers with exactly `k` classes.
pub fn enumerate_ecs(k: usize, config: &EcsConfig) -> EcsReport {
    assert!(k >= 1, "size must be positive");
    let deadline = config.budget.map(|b| Instant::now() + b);
    let stop = AtomicBool::new(false);
    let nodes = AtomicU64::new(0);
    let (searched, skipped): (Vec<u64>, Vec<u64>) = candidate_lcms(k, config.gcd_one)
        .into_iter()
        .partition(|&l| config.max_modulus.is_none_or(|m| l <= m));

    let tasks: Vec<Task> = searched
        .iter()
        .flat_map(|&l| {
            if config.gcd_one {
                primitive_tasks(l)
            } else {
                divisors(l)
                    .into_iter()
                    .filter(|&d| d >= 2 || l == 1)
                    .map(|d0| Task::Plain { l, d0 })
                    .collect()
            }
        })
        .collect();
    let found: Vec<CoveringSystem> = tasks
        .par_iter()
        .map(|&t| run_task(t, k, config.gcd_one, deadline, &stop, &nodes))
        .flatten()
        .collect();
    let mut systems = if config.gcd_one {
        close_under_shifts(found)
    } else {
        found
    };
    systems.sort_by(table_cmp);
    let status = if stop.load(AtomicOrdering::Relaxed) {
        SearchStatus::BudgetExhausted
    } else if !skipped.is_empty() {
        SearchStatus::ModulusCapped
    } else {
        SearchStatus::Complete
    };
    EcsReport {
        status,
        systems,
        searched_lcms: searched,
        skipped_lcms: skipped,
        nodes: nodes.load(AtomicOrdering::Relaxed),
    }
}

fn close_under_shifts(found: Vec<CoveringSystem>) -> Vec<CoveringSystem> {
    let mut all = HashSet::new();
    for c in found {
        if all.contains(&c) {
            continue;
        }
        for t in 0..c.lcm() {
            all.insert(c.shift(t as i64));
        }
    }
    all.into_iter().collect()
}

fn divisors(l: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=l)
        .take_while(|d| d * d <= l)
        .filter(|d| l % d == 0)
        .collect();
    let big: Vec<u64> = out
        .iter()
        .rev()
        .map(|d| l / d)
        .filter(|&e| e * e != l)
        .collect();
    out.extend(big);
    out
}

/// Counts of all exact covers by size and gcd up to `max_size`.
///
/// Contraction by `n | gcd` is a bijection onto `n`-tuples of arbitrary exact
/// covers, so only the gcd-1 column needs a search; the rest follows from the
/// same recurrence as for natural systems.
pub fn ecs_count_table(max_size: usize, config: &EcsConfig) -> (CountTable, SearchStatus) {
    let mut primitive = vec![BigUint::default(); max_size + 1];
    primitive[1] = BigUint::from(1u32);
    let mut status = SearchStatus::Complete;
    let start = Instant::now();
    for (k, slot) in primitive.iter_mut().enumerate().skip(2) {
        let gcd_config = EcsConfig {
            gcd_one: true,
            budget: config.budget.map(|b| b.saturating_sub(start.elapsed())),
            ..config.clone()
        };
        let report = enumerate_ecs(k, &gcd_config);
        *slot = BigUint::from(report.systems.len());
        if report.status != SearchStatus::Complete && status == SearchStatus::Complete {
            status = report.status;
        }
    }
    (count_from_primitive(&primitive), status)
}

/// `B(x) = Σ b_k x^k`, the number of exact covers of each size, through `order`.
pub fn ecs_series(order: usize, config: &EcsConfig) -> (IntSeries, SearchStatus) {
    let (table, status) = ecs_count_table(order, config);
    let mut coeffs = vec![BigInt::zero(); order + 1];
    for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = BigInt::from(table.row_sum(k));
    }
    (IntSeries::new(coeffs), status)
}
