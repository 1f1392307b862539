//! Constructions: transversal designs over `Z_N`, greedy coverings, patch
//! families, and the composition `H -> H_N` that turns an `(m, k, r, p)`
//! lottery system into an `(mN, k, r, p)` one.

use std::fmt;

use num::rational::BigRational;
use num::{BigInt, BigUint, One, ToPrimitive};

use crate::combin::{binomial, binomial_big, for_each_combination, mask_to_vec};
use crate::error::{Error, Result};
use crate::modular::{m_lcm, power_matrix, unit_inverse};
use crate::setsystem::{Params, SetSystem, Vertex};
use crate::verify::{verify_covering, verify_lottery_threads};

/// Largest block count any construction here will materialize.
const MAX_BLOCKS: u128 = 20_000_000;

/// `parts` groups of `part_size` vertices; vertex `(j, z)` is `j * part_size + z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartiteLayout {
    parts: u32,
    part_size: u32,
}

impl PartiteLayout {
    pub fn new(parts: u32, part_size: u32) -> Result<Self> {
        if parts == 0 || part_size == 0 {
            return Err(Error::param("layout needs at least one part of positive size"));
        }
        if parts.checked_mul(part_size).is_none() {
            return Err(Error::Capacity("layout vertex count overflows".into()));
        }
        Ok(PartiteLayout { parts, part_size })
    }

    pub fn parts(&self) -> u32 {
        self.parts
    }

    pub fn part_size(&self) -> u32 {
        self.part_size
    }

    pub fn vertex_count(&self) -> u32 {
        self.parts * self.part_size
    }

    pub fn vertex(&self, part: u32, z: u32) -> Vertex {
        part * self.part_size + z
    }

    /// The projection onto parts.
    pub fn part_of(&self, v: Vertex) -> u32 {
        v / self.part_size
    }
}

/// Modulus `M` such that `gdd(N, k, r)` needs `N = 1 (mod M)`; `1` when `r = k`.
pub fn gdd_modulus(k: u32, r: u32) -> Result<BigUint> {
    if r < 1 || r > k {
        return Err(Error::param(format!("need 1 <= r <= k, got k={k}, r={r}")));
    }
    if r == k {
        Ok(BigUint::one())
    } else {
        m_lcm(k, k - r)
    }
}

fn check_congruence(what: &str, part_size: u32, k: u32, r: u32) -> Result<()> {
    let modulus = gdd_modulus(k, r)?;
    if BigUint::from(part_size) % &modulus != BigUint::one() % &modulus {
        return Err(Error::Precondition(format!(
            "{what} requires N ≡ 1 (mod {modulus}), got N = {part_size}"
        )));
    }
    Ok(())
}

/// The `k`-partite transversal design `G_{N,k,r}`: `N^r` blocks, one per
/// kernel vector `z` of the power matrix `[j^i]` (`i < k - r`), so that any
/// `r` vertices from distinct parts lie in exactly one block.
///
/// Coordinates `z_0..z_{r-1}` are free; the rest are solved through the
/// inverse of the Vandermonde submatrix on columns `r..k`.
pub fn gdd(part_size: u32, k: u32, r: u32) -> Result<SetSystem> {
    if k < 2 || r < 1 || r > k {
        return Err(Error::param(format!(
            "gdd needs k >= 2 and 1 <= r <= k, got k={k}, r={r}"
        )));
    }
    let what = format!("gdd(N={part_size}, k={k}, r={r})");
    if part_size == 0 || (r < k && part_size < 2) {
        return Err(Error::Precondition(format!("{what} needs N >= 2")));
    }
    if r < k {
        check_congruence(&what, part_size, k, r)?;
    }
    let layout = PartiteLayout::new(k, part_size)?;
    let count = (part_size as u128).checked_pow(r).unwrap_or(u128::MAX);
    if count > MAX_BLOCKS {
        return Err(Error::Capacity(format!("{what} would have {count} blocks")));
    }

    let n = part_size as u64;
    let delta = (k - r) as usize;
    let (free_part, solver) = if delta == 0 {
        (None, None)
    } else {
        let a = power_matrix(k as usize, delta, n)?;
        let free: Vec<usize> = (0..r as usize).collect();
        let fixed: Vec<usize> = (r as usize..k as usize).collect();
        let inv = unit_inverse(&a.select_columns(&fixed)?).map_err(|e| match e {
            Error::NonUnit { .. } => Error::Defect(format!(
                "{what}: Vandermonde submatrix not invertible despite congruence"
            )),
            other => other,
        })?;
        (Some(a.select_columns(&free)?), Some(inv))
    };

    let mut blocks = Vec::with_capacity(count as usize);
    let mut z = vec![0u64; r as usize];
    loop {
        let mut block: Vec<Vertex> = z
            .iter()
            .enumerate()
            .map(|(j, &zj)| layout.vertex(j as u32, zj as u32))
            .collect();
        if let (Some(free), Some(inv)) = (&free_part, &solver) {
            // A_free z + A_fixed y = 0  =>  y = -A_fixed^{-1} A_free z
            let rhs: Vec<u64> = free.mul_vec(&z)?.into_iter().map(|x| (n - x) % n).collect();
            let y = inv.mul_vec(&rhs)?;
            block.extend(
                y.iter()
                    .enumerate()
                    .map(|(i, &yi)| layout.vertex(r + i as u32, yi as u32)),
            );
        }
        blocks.push(block);

        let mut i = z.len();
        loop {
            if i == 0 {
                return Ok(SetSystem::from_valid_blocks(layout.vertex_count(), k, blocks));
            }
            i -= 1;
            z[i] += 1;
            if z[i] < n {
                break;
            }
            z[i] = 0;
        }
    }
}

/// Greedy `k`-blocks over `[0, n)` until every `p`-subset meets a chosen
/// block in at least `r` vertices. Each step takes the lexicographically
/// least block among those satisfying the most outstanding `p`-subsets.
pub(crate) fn greedy_system(n: u32, k: u32, r: u32, p: u32) -> Result<SetSystem> {
    if r < 1 || r > k || k > n || r > p {
        return Err(Error::param(format!(
            "greedy ({n},{k},{r},{p}) needs 1 <= r <= k <= n and r <= p"
        )));
    }
    if p > n {
        return Ok(SetSystem::empty(n, k));
    }
    if n > 128 {
        return Err(Error::Capacity(format!("greedy search on {n} > 128 vertices")));
    }
    let work = binomial(n as u64, k as u64).saturating_mul(binomial(n as u64, p as u64));
    if work > 400_000_000 {
        return Err(Error::Capacity(format!(
            "greedy ({n},{k},{r},{p}) needs {work} incidence checks"
        )));
    }
    let candidates = all_masks(n, k);
    let targets = all_masks(n, p);

    let mut hits: Vec<Vec<u32>> = vec![Vec::new(); candidates.len()];
    let mut hit_by: Vec<Vec<u32>> = vec![Vec::new(); targets.len()];
    for (ti, &t) in targets.iter().enumerate() {
        for (ci, &c) in candidates.iter().enumerate() {
            if (c & t).count_ones() >= r {
                hits[ci].push(ti as u32);
                hit_by[ti].push(ci as u32);
            }
        }
    }
    let mut gain: Vec<usize> = hits.iter().map(Vec::len).collect();
    let mut done = vec![false; targets.len()];
    let mut outstanding = targets.len();
    let mut chosen = Vec::new();
    while outstanding > 0 {
        let (best, &g) = gain
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("at least one candidate block");
        if g == 0 {
            return Err(Error::Defect("greedy stalled with uncovered sets".into()));
        }
        chosen.push(mask_to_vec(candidates[best]));
        for &t in &hits[best] {
            if !done[t as usize] {
                done[t as usize] = true;
                outstanding -= 1;
                for &c in &hit_by[t as usize] {
                    gain[c as usize] -= 1;
                }
            }
        }
    }
    Ok(SetSystem::from_valid_blocks(n, k, chosen))
}

fn all_masks(n: u32, k: u32) -> Vec<u128> {
    let mut out = Vec::new();
    for_each_combination::<()>(n, k, |c| {
        out.push(crate::combin::mask_of(c));
        std::ops::ControlFlow::Continue(())
    });
    out
}

/// A greedy `(n, k, r)`-covering: every `r`-subset of `[0, n)` lies in a block.
pub fn greedy_covering(n: u32, k: u32, r: u32) -> Result<SetSystem> {
    let cover = greedy_system(n, k, r, r)?;
    let verdict = verify_covering(&cover, r)?;
    if !verdict.ok {
        return Err(Error::Defect(format!("greedy covering failed: {verdict}")));
    }
    Ok(cover)
}

/// Size of the covering placed on one part for one block size `k'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringUse {
    pub vertex: u32,
    pub block_size: u32,
    pub strength: u32,
    pub size: usize,
}

/// The patch family `B`: for each base vertex `v` and `k' in [k-r+2, k]`,
/// every `k`-set whose trace on `X_v` is a block of an
/// `(N, k', k'-(k-r))`-covering and whose other `k - k'` vertices project to
/// at most `r - 2` base vertices.
pub fn patches(m: u32, part_size: u32, k: u32, r: u32) -> Result<SetSystem> {
    patch_family(m, part_size, k, r).map(|(b, _)| b)
}

fn patch_family(m: u32, part_size: u32, k: u32, r: u32) -> Result<(SetSystem, Vec<CoveringUse>)> {
    if m < 1 || r < 1 || r > k {
        return Err(Error::param(format!(
            "patches need m >= 1 and 1 <= r <= k, got m={m}, k={k}, r={r}"
        )));
    }
    if part_size < k {
        return Err(Error::Precondition(format!(
            "patches need N >= k, got N={part_size}, k={k}"
        )));
    }
    let layout = PartiteLayout::new(m, part_size)?;
    let n = layout.vertex_count();
    let delta = k - r;
    let mut blocks = Vec::new();
    let mut uses = Vec::new();
    for k_prime in (delta + 2)..=k {
        let strength = k_prime - delta;
        let cover = greedy_covering(part_size, k_prime, strength)?;
        let outside = k - k_prime;
        let estimate = (cover.len() as u128)
            .saturating_mul(m as u128)
            .saturating_mul(binomial((n - part_size) as u64, outside as u64));
        if estimate > MAX_BLOCKS {
            return Err(Error::Capacity(format!(
                "patch family for k'={k_prime} could reach {estimate} blocks"
            )));
        }
        for v in 0..m {
            uses.push(CoveringUse {
                vertex: v,
                block_size: k_prime,
                strength,
                size: cover.len(),
            });
            for c in cover.blocks() {
                let base: Vec<Vertex> = c.iter().map(|&x| layout.vertex(v, x)).collect();
                let mut ext = Extension {
                    layout,
                    home: v,
                    max_parts: r.saturating_sub(2) as usize,
                    chosen: base,
                    parts: Vec::new(),
                    out: &mut blocks,
                };
                ext.run(0, outside);
            }
        }
    }
    Ok((SetSystem::from_valid_blocks(n, k, blocks), uses))
}

struct Extension<'a> {
    layout: PartiteLayout,
    home: u32,
    max_parts: usize,
    chosen: Vec<Vertex>,
    parts: Vec<u32>,
    out: &'a mut Vec<Vec<Vertex>>,
}

impl Extension<'_> {
    fn run(&mut self, start: Vertex, remaining: u32) {
        if remaining == 0 {
            let mut block = self.chosen.clone();
            block.sort_unstable();
            self.out.push(block);
            return;
        }
        for u in start..self.layout.vertex_count() {
            let part = self.layout.part_of(u);
            if part == self.home {
                continue;
            }
            let fresh = !self.parts.contains(&part);
            if fresh && self.parts.len() == self.max_parts {
                continue;
            }
            if fresh {
                self.parts.push(part);
            }
            self.chosen.push(u);
            self.run(u + 1, remaining - 1);
            self.chosen.pop();
            if fresh {
                self.parts.pop();
            }
        }
    }
}

/// Audit record of one composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionReport {
    pub m: u32,
    pub part_size: u32,
    pub k: u32,
    pub r: u32,
    pub p: u32,
    /// `N^r * |H|`.
    pub size_a: usize,
    pub size_b: usize,
    /// Blocks shared by `A` and `B`, removed once in the union.
    pub overlap: usize,
    pub total: usize,
    pub covering_sizes: Vec<CoveringUse>,
    /// `|H_N| / C(mN, r)`.
    pub density: BigRational,
    pub verified: bool,
}

impl fmt::Display for CompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "compose m={} N={} k={} r={} p={}",
            self.m, self.part_size, self.k, self.r, self.p
        )?;
        writeln!(f, "size_A={}", self.size_a)?;
        writeln!(f, "size_B={}", self.size_b)?;
        writeln!(f, "overlap={}", self.overlap)?;
        writeln!(f, "total={}", self.total)?;
        let mut seen = Vec::new();
        for u in &self.covering_sizes {
            if !seen.contains(&u.block_size) {
                seen.push(u.block_size);
                writeln!(
                    f,
                    "covering k'={} strength={} size={} (per part, {} parts)",
                    u.block_size, u.strength, u.size, self.m
                )?;
            }
        }
        writeln!(
            f,
            "density={} ≈ {:.6}",
            crate::solve::fmt_ratio(&self.density),
            self.density.to_f64().unwrap_or(f64::NAN)
        )?;
        write!(f, "verified={}", self.verified)
    }
}

/// Composes an `(m, k, r, p)`-lottery system `H` into an `(mN, k, r, p)`-one:
/// each block `e` carries a copy of `gdd(N, k, r)` with part `j` placed on
/// the clones of `e`'s `j`-th vertex, and the patch family covers the
/// `r`-sets with repeated projections. The result is verified before return.
pub fn compose(h: &SetSystem, params: &Params, part_size: u32) -> Result<(SetSystem, CompositionReport)> {
    compose_threads(h, params, part_size, 0)
}

pub fn compose_threads(
    h: &SetSystem,
    params: &Params,
    part_size: u32,
    threads: usize,
) -> Result<(SetSystem, CompositionReport)> {
    let (m, k, r, p) = (params.n(), params.k(), params.r(), params.p());
    if h.n() != m || h.k() != k {
        return Err(Error::param(format!(
            "H is (n={}, k={}) but parameters are ({params})",
            h.n(),
            h.k()
        )));
    }
    let base = verify_lottery_threads(h, params, threads)?;
    if !base.ok {
        return Err(Error::Precondition(format!(
            "H is not an ({params})-lottery system: {base}"
        )));
    }
    if part_size < k {
        return Err(Error::Precondition(format!(
            "compose needs N >= k, got N={part_size}, k={k}"
        )));
    }
    let what = format!("compose(N={part_size}, k={k}, r={r})");
    if r < k && part_size < 2 {
        return Err(Error::Precondition(format!("{what} needs N >= 2")));
    }
    check_congruence(&what, part_size, k, r)?;

    let design = if k >= 2 {
        gdd(part_size, k, r)?
    } else {
        // k = r = 1: every single clone is its own block
        SetSystem::new(part_size, 1, (0..part_size).map(|z| vec![z]))?
    };
    let mut blocks = Vec::with_capacity(design.len() * h.len());
    for e in h.blocks() {
        for g in design.blocks() {
            blocks.push(
                g.iter()
                    .map(|&x| e[(x / part_size) as usize] * part_size + x % part_size)
                    .collect::<Vec<_>>(),
            );
        }
    }
    let size_a = blocks.len();
    debug_assert_eq!(size_a as u128, (part_size as u128).pow(r) * h.len() as u128);
    let (patch, covering_sizes) = patch_family(m, part_size, k, r)?;
    let size_b = patch.len();
    blocks.extend(patch.into_blocks());
    let n = m * part_size;
    let composed = SetSystem::from_valid_blocks(n, k, blocks);
    let total = composed.len();
    let overlap = size_a + size_b - total;

    let target = Params::new(n, k, r, p)?;
    let verdict = verify_lottery_threads(&composed, &target, threads)?;
    if !verdict.ok {
        return Err(Error::Defect(format!(
            "composed system fails ({target}) lottery check: {verdict}"
        )));
    }
    let density = BigRational::new(
        BigInt::from(total),
        BigInt::from(binomial_big(n as u64, r as u64)),
    );
    let report = CompositionReport {
        m,
        part_size,
        k,
        r,
        p,
        size_a,
        size_b,
        overlap,
        total,
        covering_sizes,
        density,
        verified: verdict.ok,
    };
    Ok((composed, report))
}
