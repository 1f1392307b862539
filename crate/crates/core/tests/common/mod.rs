//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's search, verification or construction code.

#![allow(dead_code)]

use lotteryforge::SetSystem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// All `k`-subsets of `[0, n)` as bit masks, lexicographic order.
pub fn subsets(n: u32, k: u32) -> Vec<u128> {
    fn rec(start: u32, n: u32, left: u32, acc: u128, out: &mut Vec<u128>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..n {
            if n - v < left {
                break;
            }
            rec(v + 1, n, left - 1, acc | 1 << v, out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

pub fn bits(mask: u128) -> Vec<u32> {
    (0..128).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Per candidate block, the set of probe sets it satisfies, as a mask over
/// probe indices (at most 128 probes).
fn incidence(n: u32, k: u32, r: u32, p: u32) -> (Vec<u128>, u128) {
    let probes = subsets(n, p);
    assert!(probes.len() <= 128, "oracle handles at most 128 probe sets");
    let full = if probes.len() == 128 {
        u128::MAX
    } else {
        (1u128 << probes.len()) - 1
    };
    let cands = subsets(n, k)
        .into_iter()
        .map(|c| {
            probes
                .iter()
                .enumerate()
                .filter(|(_, &t)| (c & t).count_ones() >= r)
                .fold(0u128, |m, (i, _)| m | 1 << i)
        })
        .collect();
    (cands, full)
}

/// Whether some `size` candidate blocks jointly satisfy every probe set.
pub fn exists_of_size(n: u32, k: u32, r: u32, p: u32, size: usize) -> bool {
    let (cands, full) = incidence(n, k, r, p);
    fn rec(cands: &[u128], start: usize, left: usize, acc: u128, full: u128) -> bool {
        if acc == full {
            return true;
        }
        if left == 0 {
            return false;
        }
        (start..cands.len()).any(|i| rec(cands, i + 1, left - 1, acc | cands[i], full))
    }
    rec(&cands, 0, size, 0, full)
}

/// Minimum lottery size by plain enumeration of block subsets.
pub fn brute_min(n: u32, k: u32, r: u32, p: u32) -> u64 {
    (0..)
        .find(|&s| exists_of_size(n, k, r, p, s))
        .expect("the complete system always works") as u64
}

/// Direct lottery check over masks.
pub fn is_lottery(blocks: &[Vec<u32>], n: u32, r: u32, p: u32) -> bool {
    let masks: Vec<u128> = blocks
        .iter()
        .map(|b| b.iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    subsets(n, p)
        .into_iter()
        .all(|t| masks.iter().any(|&b| (b & t).count_ones() >= r))
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// lcm of `prod (x_j - x_i)` over increasing `len`-sequences in `[0, k)`.
pub fn brute_m_lcm(k: u32, len: u32) -> u128 {
    subsets(k, len).into_iter().fold(1u128, |acc, m| {
        let xs = bits(m);
        let mut d: u128 = 1;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                d *= (xs[j] - xs[i]) as u128;
            }
        }
        acc / gcd(acc, d) * d
    })
}

/// Determinant by permutation expansion.
pub fn leibniz_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    loop {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let term: i128 = (0..n).map(|i| m[i][perm[i]]).product();
        total += if inversions % 2 == 0 { term } else { -term };
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return total;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// Every `z in Z_N^k` with `sum_j j^i z_j = 0 (mod N)` for `i < k - r`, as
/// vertex sets `{j N + z_j}`.
pub fn brute_gdd(part: u32, k: u32, r: u32) -> Vec<Vec<u32>> {
    let n = part as u64;
    let rows = k - r;
    let mut out = Vec::new();
    let total = (part as u64).pow(k);
    for code in 0..total {
        let z: Vec<u64> = (0..k).map(|j| code / n.pow(k - 1 - j) % n).collect();
        let kernel = (0..rows).all(|i| {
            let s: u64 = (0..k as u64)
                .map(|j| (j.pow(i) % n) * z[j as usize] % n)
                .sum();
            s.is_multiple_of(n)
        });
        if kernel {
            out.push((0..k).map(|j| j * part + z[j as usize] as u32).collect());
        }
    }
    out.sort();
    out
}

/// A random `k`-uniform system on `n` vertices; each block kept with
/// probability `density`.
pub fn random_system(rng: &mut ChaCha8Rng, n: u32, k: u32, density: f64) -> SetSystem {
    let blocks = subsets(n, k)
        .into_iter()
        .filter(|_| rng.gen_bool(density))
        .map(bits);
    SetSystem::new(n, k, blocks).unwrap()
}

/// Does `host` (an `r`-graph) contain a clique on `p` vertices, i.e. a
/// `p`-set all of whose `r`-subsets are blocks.
pub fn brute_has_clique(host: &SetSystem, p: u32) -> bool {
    let blocks: std::collections::HashSet<u128> = host
        .blocks()
        .iter()
        .map(|b| b.iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    subsets(host.n(), p).into_iter().any(|s| {
        let verts = bits(s);
        subsets(p, host.k()).into_iter().all(|sub| {
            let m = bits(sub).iter().fold(0u128, |m, &i| m | 1 << verts[i as usize]);
            blocks.contains(&m)
        })
    })
}
