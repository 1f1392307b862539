//! Uniform set systems (`k`-graphs) and the structural operations on them.

use std::collections::HashSet;
use std::fmt;

use crate::combin::{binomial, for_each_combination, next_combination};
use crate::error::{Error, Result};

/// Vertices are dense 0-based indices.
pub type Vertex = u32;

/// Default largest pattern (in non-isolated vertices) accepted by
/// [`contains_subgraph`].
pub const DEFAULT_PATTERN_BUDGET: usize = 10;

/// Lottery parameters `(n, k, r, p)`.
///
/// Valid when `1 <= r <= k <= n` and `r <= p`. A probe size `p > n` is
/// accepted: the lottery property is then vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    n: u32,
    k: u32,
    r: u32,
    p: u32,
}

impl Params {
    pub fn new(n: u32, k: u32, r: u32, p: u32) -> Result<Self> {
        if r < 1 || r > k || k > n {
            return Err(Error::param(format!(
                "({n},{k},{r},{p}): need 1 <= r <= k <= n"
            )));
        }
        if p < r {
            return Err(Error::param(format!("({n},{k},{r},{p}): need r <= p")));
        }
        Ok(Params { n, k, r, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Same `(k, r, p)` on a different vertex count.
    pub fn with_n(&self, n: u32) -> Result<Self> {
        Params::new(n, self.k, self.r, self.p)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.n, self.k, self.r, self.p)
    }
}

/// A `k`-uniform block system on the vertices `[0, n)`, kept in canonical
/// form: every block ascending, blocks distinct and sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetSystem {
    n: u32,
    k: u32,
    blocks: Vec<Vec<Vertex>>,
}

impl SetSystem {
    /// Builds a system from arbitrary blocks. Vertices inside a block may
    /// come in any order; repeated blocks collapse.
    pub fn new<I>(n: u32, k: u32, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Vertex>>,
    {
        let mut out = Vec::new();
        for mut block in blocks {
            block.sort_unstable();
            check_block(n, k, &block)?;
            out.push(block);
        }
        out.sort_unstable();
        out.dedup();
        Ok(SetSystem { n, k, blocks: out })
    }

    pub fn empty(n: u32, k: u32) -> Self {
        SetSystem { n, k, blocks: Vec::new() }
    }

    /// All `C(n, k)` blocks.
    pub fn complete(n: u32, k: u32) -> Self {
        let mut blocks = Vec::with_capacity(binomial(n as u64, k as u64).min(1 << 20) as usize);
        for_each_combination::<()>(n, k, |c| {
            blocks.push(c.to_vec());
            std::ops::ControlFlow::Continue(())
        });
        SetSystem { n, k, blocks }
    }

    /// Sorts and deduplicates blocks that are already individually valid.
    pub(crate) fn from_valid_blocks(n: u32, k: u32, mut blocks: Vec<Vec<Vertex>>) -> Self {
        blocks.sort_unstable();
        blocks.dedup();
        debug_assert!(blocks.iter().all(|b| check_block(n, k, b).is_ok()));
        SetSystem { n, k, blocks }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<Vertex>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<Vertex>> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `block` must be ascending.
    pub fn contains_block(&self, block: &[Vertex]) -> bool {
        self.blocks
            .binary_search_by(|b| b.as_slice().cmp(block))
            .is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n as usize];
        for b in &self.blocks {
            for &v in b {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    /// Blocks as bit masks. Fails when `n > 128`.
    pub fn masks(&self) -> Result<Vec<u128>> {
        if self.n > 128 {
            return Err(Error::Capacity(format!(
                "{} vertices; bit-mask routines support at most 128",
                self.n
            )));
        }
        Ok(self.blocks.iter().map(|b| crate::combin::mask_of(b)).collect())
    }
}

fn check_block(n: u32, k: u32, block: &[Vertex]) -> Result<()> {
    if block.len() != k as usize {
        return Err(Error::Structural(format!(
            "block {block:?} has {} vertices, expected {k}",
            block.len()
        )));
    }
    if let Some(&v) = block.iter().find(|&&v| v >= n) {
        return Err(Error::Structural(format!(
            "block {block:?}: vertex {v} outside [0, {n})"
        )));
    }
    if block.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Structural(format!(
            "block {block:?} repeats a vertex"
        )));
    }
    Ok(())
}

/// A family of forbidden `r`-graphs, each taken up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenFamily {
    arity: u32,
    members: Vec<SetSystem>,
    pair_covering: bool,
}

impl ForbiddenFamily {
    pub fn new(arity: u32, members: Vec<SetSystem>) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| m.k() != arity) {
            return Err(Error::param(format!(
                "family of arity {arity} has a {}-uniform member",
                m.k()
            )));
        }
        let mut pair_covering = true;
        for m in &members {
            if arity < 2 || !is_pair_covering(m)? {
                pair_covering = false;
            }
        }
        Ok(ForbiddenFamily {
            arity,
            members,
            pair_covering,
        })
    }

    /// The one-member family `{K_p^r}`.
    pub fn complete(p: u32, r: u32) -> Result<Self> {
        if r < 1 || r > p {
            return Err(Error::param(format!("K_{p}^{r}: need 1 <= r <= p")));
        }
        ForbiddenFamily::new(r, vec![SetSystem::complete(p, r)])
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn members(&self) -> &[SetSystem] {
        &self.members
    }

    /// Whether every member is pair-covering.
    pub fn is_pair_covering(&self) -> bool {
        self.pair_covering
    }
}

/// The `r`-shadow: all `r`-subsets of blocks of `sys`.
pub fn shadow(sys: &SetSystem, r: u32) -> Result<SetSystem> {
    if r < 1 || r > sys.k() {
        return Err(Error::param(format!(
            "shadow size {r} outside [1, {}]",
            sys.k()
        )));
    }
    if r == sys.k() {
        return Ok(sys.clone());
    }
    let mut out = Vec::new();
    let mut idx: Vec<u32> = (0..r).collect();
    for b in sys.blocks() {
        idx.iter_mut().enumerate().for_each(|(i, x)| *x = i as u32);
        loop {
            out.push(idx.iter().map(|&i| b[i as usize]).collect());
            if !next_combination(&mut idx, sys.k()) {
                break;
            }
        }
    }
    Ok(SetSystem::from_valid_blocks(sys.n(), r, out))
}

/// All `k`-subsets of `[0, n)` missing from `sys`.
pub fn complement_system(sys: &SetSystem) -> SetSystem {
    let mut out = Vec::new();
    for_each_combination::<()>(sys.n(), sys.k(), |c| {
        if !sys.contains_block(c) {
            out.push(c.to_vec());
        }
        std::ops::ControlFlow::Continue(())
    });
    SetSystem {
        n: sys.n(),
        k: sys.k(),
        blocks: out,
    }
}

/// Whether every two vertices that lie in some block lie in a common block.
/// Vertices in no block are ignored.
pub fn is_pair_covering(sys: &SetSystem) -> Result<bool> {
    if sys.k() < 2 {
        return Err(Error::param("pair-covering needs block size >= 2"));
    }
    let n = sys.n() as usize;
    let mut adj = vec![false; n * n];
    let mut used = vec![false; n];
    for b in sys.blocks() {
        for (i, &u) in b.iter().enumerate() {
            used[u as usize] = true;
            for &v in &b[i + 1..] {
                adj[u as usize * n + v as usize] = true;
            }
        }
    }
    let present: Vec<usize> = (0..n).filter(|&v| used[v]).collect();
    for (i, &u) in present.iter().enumerate() {
        for &v in &present[i + 1..] {
            if !adj[u * n + v] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `host` contains a copy of `pattern`: an injection of the
/// pattern's vertices into the host's sending every pattern block onto a
/// host block.
pub fn contains_subgraph(host: &SetSystem, pattern: &SetSystem) -> Result<bool> {
    contains_subgraph_with_budget(host, pattern, DEFAULT_PATTERN_BUDGET)
}

pub fn contains_subgraph_with_budget(
    host: &SetSystem,
    pattern: &SetSystem,
    budget: usize,
) -> Result<bool> {
    if host.k() != pattern.k() {
        return Err(Error::param(format!(
            "uniformity mismatch: host {} vs pattern {}",
            host.k(),
            pattern.k()
        )));
    }
    let pdeg = pattern.degrees();
    let mut active: Vec<usize> = (0..pattern.n() as usize).filter(|&v| pdeg[v] > 0).collect();
    if active.len() > budget {
        return Err(Error::Capacity(format!(
            "pattern has {} non-isolated vertices, budget is {budget}",
            active.len()
        )));
    }
    if pattern.n() > host.n() || pattern.len() > host.len() {
        return Ok(false);
    }
    if pattern.is_empty() {
        return Ok(true);
    }

    active.sort_by(|&a, &b| pdeg[b].cmp(&pdeg[a]).then(a.cmp(&b)));
    let mut position = vec![usize::MAX; pattern.n() as usize];
    for (i, &v) in active.iter().enumerate() {
        position[v] = i;
    }
    // blocks to check once their last vertex (in search order) is placed
    let mut closing: Vec<Vec<&[Vertex]>> = vec![Vec::new(); active.len()];
    for b in pattern.blocks() {
        let last = b.iter().map(|&v| position[v as usize]).max().unwrap_or(0);
        closing[last].push(b);
    }

    let search = Embedding {
        host_blocks: host.blocks().iter().map(|b| b.as_slice()).collect(),
        host_deg: host.degrees(),
        pattern_deg: active.iter().map(|&v| pdeg[v]).collect(),
        active,
        closing,
    };
    let mut image = vec![Vertex::MAX; pattern.n() as usize];
    let mut used = vec![false; host.n() as usize];
    Ok(search.extend(0, &mut image, &mut used))
}

struct Embedding<'a> {
    host_blocks: HashSet<&'a [Vertex]>,
    host_deg: Vec<usize>,
    pattern_deg: Vec<usize>,
    active: Vec<usize>,
    closing: Vec<Vec<&'a [Vertex]>>,
}

impl Embedding<'_> {
    fn extend(&self, pos: usize, image: &mut [Vertex], used: &mut [bool]) -> bool {
        if pos == self.active.len() {
            return true;
        }
        let v = self.active[pos];
        let mut mapped = Vec::new();
        for h in 0..used.len() {
            if used[h] || self.host_deg[h] < self.pattern_deg[pos] {
                continue;
            }
            image[v] = h as Vertex;
            let consistent = self.closing[pos].iter().all(|b| {
                mapped.clear();
                mapped.extend(b.iter().map(|&u| image[u as usize]));
                mapped.sort_unstable();
                self.host_blocks.contains(mapped.as_slice())
            });
            if consistent {
                used[h] = true;
                if self.extend(pos + 1, image, used) {
                    return true;
                }
                used[h] = false;
            }
        }
        image[v] = Vertex::MAX;
        false
    }
}

/// Whether `host` contains no member of `fam`.
pub fn is_family_free(host: &SetSystem, fam: &ForbiddenFamily) -> Result<bool> {
    if host.k() != fam.arity() {
        return Err(Error::param(format!(
            "host is {}-uniform, family has arity {}",
            host.k(),
            fam.arity()
        )));
    }
    for member in fam.members() {
        if contains_subgraph(host, member)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `clones`-blow-up: vertex `v` becomes `v * clones + z` for
/// `z in [0, clones)` and each block becomes `clones^k` blocks.
pub fn blow_up(sys: &SetSystem, clones: u32) -> Result<SetSystem> {
    if clones == 0 {
        return Err(Error::param("blow-up needs at least one clone"));
    }
    let n = sys
        .n()
        .checked_mul(clones)
        .ok_or_else(|| Error::Capacity("blow-up vertex count overflows".into()))?;
    let k = sys.k() as usize;
    let mut out = Vec::with_capacity(sys.len() * (clones as usize).pow(k as u32));
    let mut z = vec![0u32; k];
    for b in sys.blocks() {
        z.iter_mut().for_each(|x| *x = 0);
        loop {
            out.push(b.iter().zip(&z).map(|(&v, &c)| v * clones + c).collect());
            // odometer over clone choices, last position fastest
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                z[i] += 1;
                if z[i] < clones {
                    break;
                }
                z[i] = 0;
            }
            if z.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    Ok(SetSystem::from_valid_blocks(n, sys.k(), out))
}
