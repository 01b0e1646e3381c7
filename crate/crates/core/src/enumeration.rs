//! Explicit generation of natural exact covering systems.
//!
//! A natural system of size `k > 1` and gcd `n` contracts by `n` into `n`
//! natural pieces whose gcds are coprime, and every such tuple of pieces
//! reassembles to a distinct system. Walking compositions of `k`, coprime
//! gcd tuples and products of smaller piece lists therefore emits each
//! system exactly once without any deduplication.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_integer::Integer;
use rayon::prelude::*;

use crate::combinat::compositions;
use crate::congruence::CoveringSystem;

/// Natural systems of every size below some bound, grouped by gcd.
///
/// `levels[j][g]` holds the systems of size `j` and gcd `g`, in generation
/// order.
pub struct PieceCache {
    levels: Vec<Vec<Vec<CoveringSystem>>>,
}

impl PieceCache {
    /// Materializes every natural system of size `≤ max_size`.
    pub fn new(max_size: usize) -> Self {
        let mut cache = PieceCache {
            levels: vec![
                Vec::new(),
                vec![Vec::new(), vec![CoveringSystem::trivial()]],
            ],
        };
        for j in 2..=max_size {
            let mut level = vec![Vec::new(); j + 1];
            for (g, slot) in level.iter_mut().enumerate().skip(2) {
                *slot = cache
                    .shards(j, g)
                    .par_iter()
                    .map(|parts| {
                        let mut out = Vec::new();
                        cache.visit_shard(parts, &mut |c| out.push(c.clone()));
                        out
                    })
                    .flatten()
                    .collect();
            }
            cache.levels.push(level);
        }
        cache
    }

    pub fn max_size(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn get(&self, size: usize, gcd: usize) -> &[CoveringSystem] {
        self.levels
            .get(size)
            .and_then(|l| l.get(gcd))
            .map_or(&[], Vec::as_slice)
    }

    /// Top-level branches for systems of size `k` and gcd `n ≥ 2`: one
    /// composition of `k` into `n` parts each.
    fn shards(&self, k: usize, n: usize) -> Vec<Vec<usize>> {
        assert!(
            k <= self.max_size() + 1,
            "piece cache too small for size {k}"
        );
        compositions(k, n)
    }

    /// Emits every system whose contraction pieces have sizes `parts`.
    fn visit_shard(&self, parts: &[usize], f: &mut dyn FnMut(&CoveringSystem)) {
        let options: Vec<Vec<usize>> = parts
            .iter()
            .map(|&j| (1..=j).filter(|&g| !self.get(j, g).is_empty()).collect())
            .collect();
        let mut pick = vec![0usize; parts.len()];
        loop {
            let gcds: Vec<usize> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            if gcds.iter().fold(0, |a, g| a.gcd(g)) == 1 {
                let lists: Vec<&[CoveringSystem]> = parts
                    .iter()
                    .zip(&gcds)
                    .map(|(&j, &g)| self.get(j, g))
                    .collect();
                product(&lists, &mut Vec::with_capacity(parts.len()), f);
            }
            if !advance(&mut pick, &options) {
                break;
            }
        }
    }
}

/// Odometer step over `pick[i] < options[i].len()`, first index fastest.
fn advance(pick: &mut [usize], options: &[Vec<usize>]) -> bool {
    for (p, o) in pick.iter_mut().zip(options) {
        *p += 1;
        if *p < o.len() {
            return true;
        }
        *p = 0;
    }
    false
}

fn product<'a>(
    lists: &[&'a [CoveringSystem]],
    chosen: &mut Vec<&'a CoveringSystem>,
    f: &mut dyn FnMut(&CoveringSystem),
) {
    let idx = chosen.len();
    if idx == lists.len() {
        let pieces: Vec<CoveringSystem> = chosen.iter().map(|&c| c.clone()).collect();
        f(&CoveringSystem::reassemble(&pieces).expect("nonempty tuple"));
        return;
    }
    for c in lists[idx] {
        chosen.push(c);
        product(lists, chosen, f);
        chosen.pop();
    }
}

/// A unit of enumeration work: systems of size `k` and gcd `n` whose
/// pieces have the given sizes.
#[derive(Clone, Debug)]
struct Shard {
    n: usize,
    parts: Vec<usize>,
}

fn plan(k: usize, gcd: Option<usize>) -> Vec<Shard> {
    let gcds: Vec<usize> = match gcd {
        Some(m) => vec![m],
        None => (2..=k).collect(),
    };
    gcds.into_iter()
        .filter(|&n| n >= 2 && n <= k)
        .flat_map(|n| {
            compositions(k, n)
                .into_iter()
                .map(move |parts| Shard { n, parts })
        })
        .collect()
}

fn size_one(gcd: Option<usize>) -> Vec<CoveringSystem> {
    match gcd {
        None | Some(1) => vec![CoveringSystem::trivial()],
        Some(_) => Vec::new(),
    }
}

/// Calls `f` on every natural system of size `k` (and gcd `gcd`, if given).
///
/// The order is the generation order: by gcd, then composition of `k` in
/// colexicographic order, then piece gcds, then pieces. It does not depend
/// on the thread pool.
pub fn for_each_necs<F: FnMut(&CoveringSystem)>(k: usize, gcd: Option<usize>, mut f: F) {
    assert!(k >= 1, "size must be positive");
    if k == 1 {
        size_one(gcd).iter().for_each(f);
        return;
    }
    let cache = PieceCache::new(k - 1);
    for shard in plan(k, gcd) {
        debug_assert!(shard.n == shard.parts.len());
        cache.visit_shard(&shard.parts, &mut f);
    }
}

/// Every natural system of size `k` (and gcd `gcd`), in table order
/// (see [`table_cmp`]). Shards run in parallel.
pub fn enumerate_necs(k: usize, gcd: Option<usize>) -> Vec<CoveringSystem> {
    assert!(k >= 1, "size must be positive");
    if k == 1 {
        return size_one(gcd);
    }
    let cache = PieceCache::new(k - 1);
    let mut out: Vec<CoveringSystem> = plan(k, gcd)
        .par_iter()
        .map(|s| {
            let mut v = Vec::new();
            cache.visit_shard(&s.parts, &mut |c| v.push(c.clone()));
            v
        })
        .flatten()
        .collect();
    out.par_sort_by(table_cmp);
    out
}

/// Number of systems the enumeration emits, without keeping them.
pub fn count_necs_stream(k: usize, gcd: Option<usize>) -> u64 {
    assert!(k >= 1, "size must be positive");
    if k == 1 {
        return size_one(gcd).len() as u64;
    }
    let cache = PieceCache::new(k - 1);
    plan(k, gcd)
        .par_iter()
        .map(|s| {
            let mut n = 0u64;
            cache.visit_shard(&s.parts, &mut |_| n += 1);
            n
        })
        .sum()
}

/// Shift-class representatives (least element of each orbit) of the
/// natural systems of size `k`, in table order.
pub fn shift_classes(k: usize) -> Vec<CoveringSystem> {
    assert!(k >= 1, "size must be positive");
    if k == 1 {
        return vec![CoveringSystem::trivial()];
    }
    let cache = PieceCache::new(k - 1);
    let set = plan(k, None)
        .par_iter()
        .map(|s| {
            let mut local = HashSet::new();
            cache.visit_shard(&s.parts, &mut |c| {
                local.insert(c.canonical_shift().0);
            });
            local
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let mut out: Vec<CoveringSystem> = set.into_iter().collect();
    out.sort_by(table_cmp);
    out
}

/// `s(k)`: the number of shift classes of natural systems of size `k`.
pub fn shift_class_count(k: usize) -> usize {
    shift_classes(k).len()
}

/// Row order of the size-≤4 table: by lcm, then by the class sequence with
/// each class compared by offset first and modulus second.
pub fn table_cmp(a: &CoveringSystem, b: &CoveringSystem) -> Ordering {
    a.lcm().cmp(&b.lcm()).then_with(|| {
        let key = |c: &CoveringSystem| -> Vec<(u64, u64)> { c.pairs() };
        key(a).cmp(&key(b))
    })
}

/// Tab-separated `size, system, gcd, lcm` rows for every natural system of
/// size at most `max_size`, with a header line.
pub fn render_table(max_size: usize) -> String {
    let mut out = String::from("size\tsystem\tgcd\tlcm\n");
    for k in 1..=max_size {
        for c in enumerate_necs(k, None) {
            out.push_str(&format!("{k}\t{c}\t{}\t{}\n", c.gcd(), c.lcm()));
        }
    }
    out
}
