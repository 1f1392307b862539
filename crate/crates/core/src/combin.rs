//! Small combinatorial helpers: binomials and lexicographic subset walks.

use std::ops::ControlFlow;

use num::BigUint;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Advance `comb` to the next `comb.len()`-subset of `[0, n)` in
/// lexicographic order. Returns `false` once the last subset has been passed.
pub fn next_combination(comb: &mut [u32], n: u32) -> bool {
    let k = comb.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (k - i) as u32 {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visit every `k`-subset of `[0, n)` in lexicographic order until the
/// visitor breaks.
pub fn for_each_combination<B>(
    n: u32,
    k: u32,
    mut visit: impl FnMut(&[u32]) -> ControlFlow<B>,
) -> Option<B> {
    if k > n {
        return None;
    }
    let mut comb: Vec<u32> = (0..k).collect();
    loop {
        if let ControlFlow::Break(b) = visit(&comb) {
            return Some(b);
        }
        if !next_combination(&mut comb, n) {
            return None;
        }
    }
}

/// All `k`-subsets of `[0, n)` in lexicographic order.
pub fn combinations(n: u32, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_combination::<()>(n, k, |c| {
        out.push(c.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Bit mask of a vertex set; requires every vertex `< 128`.
#[inline]
pub fn mask_of(set: &[u32]) -> u128 {
    set.iter().fold(0u128, |m, &v| m | (1u128 << v))
}

pub fn mask_to_vec(mut mask: u128) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros());
        mask &= mask - 1;
    }
    out
}
