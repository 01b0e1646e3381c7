//! Small combinatorial helpers shared by the counting and enumeration code.

use num_bigint::BigUint;
use num_traits::One;

/// Visits every composition of `total` into `parts` positive parts, in
/// colexicographic order (last part varies slowest).
pub fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: usize, mut f: F) {
    if parts == 0 || total < parts {
        return;
    }
    let mut buf = vec![0; parts];
    colex_rec(total, parts, &mut buf, &mut f);
}

fn colex_rec<F: FnMut(&[usize])>(total: usize, parts: usize, buf: &mut [usize], f: &mut F) {
    if parts == 1 {
        buf[0] = total;
        f(buf);
        return;
    }
    for last in 1..=total - (parts - 1) {
        buf[parts - 1] = last;
        colex_rec(total - last, parts - 1, buf, f);
    }
}

pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_composition(total, parts, |c| out.push(c.to_vec()));
    out
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
