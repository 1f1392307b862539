//! Exact and heuristic minimization of lottery, covering and Turán systems,
//! plus exact-rational density bookkeeping.
//!
//! The exact solver is an iterative-deepening branch and bound. For each
//! target size `s`, starting at a root lower bound, a depth-first search
//! branches on the lexicographically least unsatisfied `p`-set over the
//! candidate blocks meeting it in at least `r` vertices. Sibling `i` forbids
//! siblings `0..i` in its subtree, so no block set is visited twice. Nodes
//! are pruned with the larger of two bounds: outstanding sets over the best
//! single-block gain, and a greedy packing of outstanding sets no two of
//! which share a candidate block.

use std::fmt;
use std::time::Instant;

use num::rational::BigRational;
use num::{BigInt, Integer, ToPrimitive};

use crate::combin::{binomial, binomial_big, for_each_combination, mask_of, mask_to_vec};
use crate::construct::greedy_system;
use crate::error::{Error, Result};
use crate::setsystem::{Params, SetSystem};
use crate::verify::verify_lottery;

/// Largest incidence matrix (candidate blocks x probe sets) the exact solver
/// will build.
const MAX_INCIDENCE: u128 = 64_000_000;

/// Search limits. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_seconds: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub budget: Budget,
    /// Fix the first block to `{0, ..., k-1}`. Changes which optimum is
    /// returned, never its size.
    pub symmetry_break: bool,
}

/// Lower and upper bounds on `L(n, k, r, p)`; the upper bound carries a
/// verified certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    pub params: Params,
    pub lower: u64,
    pub upper: Option<u64>,
    pub certificate: Option<SetSystem>,
    pub lower_method: &'static str,
    pub upper_method: &'static str,
    /// `lower == upper` was proven within the budget.
    pub complete: bool,
    pub nodes: u64,
}

impl BoundPair {
    /// The optimum, when the search completed.
    pub fn value(&self) -> Option<u64> {
        if self.complete {
            self.upper
        } else {
            None
        }
    }
}

impl fmt::Display for BoundPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let name = format!("L({},{},{},{})", p.n(), p.k(), p.r(), p.p());
        match (self.complete, self.upper) {
            (true, Some(v)) => write!(f, "{name} = {v}"),
            (_, Some(hi)) => write!(f, "{} ≤ {name} ≤ {hi} [incomplete]", self.lower),
            (_, None) => write!(f, "{} ≤ {name} [incomplete]", self.lower),
        }
    }
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn ones(len: usize) -> Self {
        let mut b = Bits::zeros(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> u64 {
        self.0.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and_count(&self, other: &Bits) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn iter_and<'a>(&'a self, other: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .flat_map(|(i, (a, b))| {
                let mut w = a & b;
                std::iter::from_fn(move || {
                    if w == 0 {
                        return None;
                    }
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + bit)
                })
            })
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter_and(self)
    }
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search {
    candidates: Vec<u128>,
    /// Candidate blocks satisfying each probe set.
    satisfiers: Vec<Bits>,
    /// Probe sets satisfied by each candidate block.
    satisfies: Vec<Bits>,
    budget: Budget,
    started: Instant,
    nodes: u64,
}

impl Search {
    fn new(params: &Params, budget: Budget) -> Self {
        let (n, k, r, p) = (params.n(), params.k(), params.r(), params.p());
        let candidates = masks(n, k);
        let targets = masks(n, p);
        let mut satisfiers = vec![Bits::zeros(candidates.len()); targets.len()];
        let mut satisfies = vec![Bits::zeros(targets.len()); candidates.len()];
        for (ti, &t) in targets.iter().enumerate() {
            for (ci, &c) in candidates.iter().enumerate() {
                if (c & t).count_ones() >= r {
                    satisfiers[ti].set(ci);
                    satisfies[ci].set(ti);
                }
            }
        }
        Search {
            candidates,
            satisfiers,
            satisfies,
            budget,
            started: Instant::now(),
            nodes: 0,
        }
    }

    fn over_budget(&self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes >= max {
                return true;
            }
        }
        if let Some(secs) = self.budget.max_seconds {
            if self.nodes.is_multiple_of(1024) && self.started.elapsed().as_secs_f64() > secs {
                return true;
            }
        }
        false
    }

    /// Blocks still needed to satisfy `open` using only `allowed` candidates;
    /// `u64::MAX` when impossible.
    fn lower_bound(&self, open: &Bits, allowed: &Bits) -> u64 {
        let outstanding = open.count();
        if outstanding == 0 {
            return 0;
        }
        let best_gain = allowed
            .iter()
            .map(|c| self.satisfies[c].and_count(open))
            .max()
            .unwrap_or(0);
        if best_gain == 0 {
            return u64::MAX;
        }
        let by_gain = outstanding.div_ceil(best_gain);

        let mut claimed = Bits::zeros(self.candidates.len());
        let mut packing = 0u64;
        for t in open.iter() {
            let own = &self.satisfiers[t].0;
            let mut reachable = false;
            let mut disjoint = true;
            for ((o, a), c) in own.iter().zip(&allowed.0).zip(&claimed.0) {
                let w = o & a;
                reachable |= w != 0;
                disjoint &= w & c == 0;
            }
            if !reachable {
                return u64::MAX;
            }
            if disjoint {
                packing += 1;
                for ((c, o), a) in claimed.0.iter_mut().zip(own).zip(&allowed.0) {
                    *c |= o & a;
                }
            }
        }
        by_gain.max(packing)
    }

    fn dfs(&mut self, left: u64, open: &Bits, allowed: &mut Bits, chosen: &mut Vec<usize>) -> Step {
        self.nodes += 1;
        let Some(target) = open.first() else {
            return Step::Found;
        };
        if left == 0 {
            return Step::Exhausted;
        }
        if self.over_budget() {
            return Step::OutOfBudget;
        }
        if self.lower_bound(open, allowed) > left {
            return Step::Exhausted;
        }
        let branches: Vec<usize> = self.satisfiers[target].iter_and(allowed).collect();
        let saved = allowed.clone();
        for &c in &branches {
            allowed.clear(c);
            let next_open = open.and_not(&self.satisfies[c]);
            chosen.push(c);
            match self.dfs(left - 1, &next_open, allowed, chosen) {
                Step::Exhausted => {
                    chosen.pop();
                }
                other => {
                    *allowed = saved;
                    return other;
                }
            }
        }
        *allowed = saved;
        Step::Exhausted
    }
}

fn masks(n: u32, k: u32) -> Vec<u128> {
    let mut out = Vec::new();
    for_each_combination::<()>(n, k, |c| {
        out.push(mask_of(c));
        std::ops::ControlFlow::Continue(())
    });
    out
}

/// `L(n, k, r, p)` by iterative deepening with a node/time budget. If the
/// budget runs out the bracket found so far is returned with
/// `complete == false`.
pub fn exact_min_lottery(params: &Params, budget: Budget) -> Result<BoundPair> {
    exact_min_lottery_with(
        params,
        &SolveOptions {
            budget,
            symmetry_break: false,
        },
    )
}

pub fn exact_min_lottery_with(params: &Params, opts: &SolveOptions) -> Result<BoundPair> {
    let (n, k, p) = (params.n(), params.k(), params.p());
    if p > n {
        return Ok(BoundPair {
            params: *params,
            lower: 0,
            upper: Some(0),
            certificate: Some(SetSystem::empty(n, k)),
            lower_method: "vacuous",
            upper_method: "vacuous",
            complete: true,
            nodes: 0,
        });
    }
    let size = binomial(n as u64, k as u64).saturating_mul(binomial(n as u64, p as u64));
    if n > 128 || size > MAX_INCIDENCE {
        return Err(Error::Capacity(format!(
            "exact search on ({params}) needs a {size}-entry incidence table"
        )));
    }

    let greedy = greedy_lottery(params)?;
    let mut upper = greedy.len() as u64;
    let mut certificate = greedy;
    let mut upper_method = "greedy";

    let mut search = Search::new(params, opts.budget);
    let all_open = Bits::ones(search.satisfiers.len());
    let all_allowed = Bits::ones(search.candidates.len());
    let mut lower = search.lower_bound(&all_open, &all_allowed);
    let mut lower_method = "packing/gain bound";
    let mut complete = lower >= upper;

    while !complete {
        let mut chosen = Vec::new();
        let step = if opts.symmetry_break && lower >= 1 {
            // candidate 0 is {0, ..., k-1}
            let mut allowed = all_allowed.clone();
            allowed.clear(0);
            chosen.push(0);
            let open = all_open.and_not(&search.satisfies[0]);
            search.dfs(lower - 1, &open, &mut allowed, &mut chosen)
        } else {
            let mut allowed = all_allowed.clone();
            search.dfs(lower, &all_open, &mut allowed, &mut chosen)
        };
        match step {
            Step::Found => {
                let blocks: Vec<_> = chosen.iter().map(|&c| mask_to_vec(search.candidates[c])).collect();
                certificate = SetSystem::new(n, k, blocks)?;
                upper = certificate.len() as u64;
                upper_method = "exhaustive search";
                lower_method = "exhaustive search";
                complete = true;
            }
            Step::Exhausted => {
                lower += 1;
                lower_method = "exhaustive search";
                if lower >= upper {
                    complete = true;
                }
            }
            Step::OutOfBudget => break,
        }
    }

    let verdict = verify_lottery(&certificate, params)?;
    if !verdict.ok {
        return Err(Error::Defect(format!("certificate fails ({params}): {verdict}")));
    }
    Ok(BoundPair {
        params: *params,
        lower,
        upper: Some(upper),
        certificate: Some(certificate),
        lower_method,
        upper_method,
        complete,
        nodes: search.nodes,
    })
}

/// `T(n, p, r) = L(n, r, r, p)`.
pub fn exact_turan(n: u32, p: u32, r: u32, budget: Budget) -> Result<BoundPair> {
    exact_min_lottery(&Params::new(n, r, r, p)?, budget)
}

/// `T / C(k, r)`: each block has `C(k, r)` `r`-subsets, so a lottery system
/// needs at least this many blocks when `T` bounds `T(n, p, r)` from below.
pub fn turan_lower_bound(params: &Params, turan_value: u64) -> BigRational {
    BigRational::new(
        BigInt::from(turan_value),
        BigInt::from(binomial_big(params.k() as u64, params.r() as u64)),
    )
}

/// Smallest integer at least `x`.
pub fn ceil_ratio(x: &BigRational) -> u64 {
    x.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// `T(n, p, 2)` exactly: the complement of the balanced complete
/// `(p-1)`-partite graph, i.e. `p - 1` disjoint near-equal cliques.
pub fn turan_number_r2(n: u32, p: u32) -> Result<u64> {
    if p < 2 {
        return Err(Error::param(format!("T(n,p,2) needs p >= 2, got {p}")));
    }
    if p > n {
        return Ok(0);
    }
    let parts = (p - 1) as u64;
    let (q, rem) = (n as u64).div_rem(&parts);
    let clique = |s: u64| s * s.saturating_sub(1) / 2;
    Ok(rem * clique(q + 1) + (parts - rem) * clique(q))
}

/// Averaging bound `ceil(C(n,p) / C(n-r, p-r)) <= T(n, p, r)`: every
/// `p`-set contains an edge and each edge lies in `C(n-r, p-r)` of them.
pub fn turan_counting_bound(n: u32, p: u32, r: u32) -> u64 {
    if p > n || r > p {
        return 0;
    }
    let num = binomial_big(n as u64, p as u64);
    let den = binomial_big((n - r) as u64, (p - r) as u64);
    num.div_ceil(&den).to_u64().unwrap_or(u64::MAX)
}

/// A verified lottery system built greedily.
pub fn greedy_lottery(params: &Params) -> Result<SetSystem> {
    let sys = greedy_system(params.n(), params.k(), params.r(), params.p())?;
    let verdict = verify_lottery(&sys, params)?;
    if !verdict.ok {
        return Err(Error::Defect(format!("greedy system fails ({params}): {verdict}")));
    }
    Ok(sys)
}

/// `l(k, 2, p) = 1 / ((p - 1) C(k, 2))`.
pub fn limit_density_r2(k: u32, p: u32) -> Result<BigRational> {
    if k < 2 || p < 2 {
        return Err(Error::param(format!("need k, p >= 2, got k={k}, p={p}")));
    }
    let den = BigInt::from(p - 1) * BigInt::from(binomial_big(k as u64, 2));
    Ok(BigRational::new(BigInt::from(1), den))
}

/// Limiting covering density `1 / C(k, r)`.
pub fn covering_limit_density(k: u32, r: u32) -> Result<BigRational> {
    if r > k {
        return Err(Error::param(format!("need r <= k, got k={k}, r={r}")));
    }
    Ok(BigRational::new(
        BigInt::from(1),
        BigInt::from(binomial_big(k as u64, r as u64)),
    ))
}

/// A limiting density to print next to computed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceLimit {
    pub label: String,
    pub value: BigRational,
    /// Believed but unproven.
    pub conjectural: bool,
}

/// Known and conjectured limits of `L(n, k, r, p) / C(n, r)` for the given
/// `(k, r, p)`.
pub fn reference_limits(k: u32, r: u32, p: u32) -> Vec<ReferenceLimit> {
    let mut out = Vec::new();
    if p == r {
        if let Ok(v) = covering_limit_density(k, r) {
            out.push(ReferenceLimit {
                label: format!("covering limit 1/C({k},{r})"),
                value: v,
                conjectural: false,
            });
        }
    }
    if r == 2 {
        if let Ok(v) = limit_density_r2(k, p) {
            out.push(ReferenceLimit {
                label: format!("l({k},2,{p}) = 1/(({p}-1)·C({k},2))"),
                value: v,
                conjectural: false,
            });
        }
    }
    if k == 4 && r == 3 && p > 3 {
        out.push(ReferenceLimit {
            label: format!("l(4,3,{p}) = 1/({p}-1)^2"),
            value: BigRational::new(1.into(), BigInt::from((p - 1) * (p - 1))),
            conjectural: true,
        });
    }
    if k == 3 && r == 3 && p > 3 {
        out.push(ReferenceLimit {
            label: format!("t({p},3) = 4/({p}-1)^2"),
            value: BigRational::new(4.into(), BigInt::from((p - 1) * (p - 1))),
            conjectural: true,
        });
    }
    out
}

/// One row of a density table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub params: Params,
    /// Value (or lower bound) of `T(n, p, r)` feeding the lower bound.
    pub turan: u64,
    pub turan_method: &'static str,
    /// `ceil(turan / C(k, r))`.
    pub lower: u64,
    pub exact: Option<u64>,
    pub upper: Option<u64>,
    pub upper_method: &'static str,
    pub density_lower: BigRational,
    pub density_exact: Option<BigRational>,
    pub density_upper: Option<BigRational>,
    pub references: Vec<ReferenceLimit>,
}

fn density(size: u64, params: &Params) -> BigRational {
    BigRational::new(
        BigInt::from(size),
        BigInt::from(binomial_big(params.n() as u64, params.r() as u64)),
    )
}

/// Bounds and densities for one parameter set. The exact solver runs under
/// `budget`; its result is reported only when it completes.
pub fn density_report(params: &Params, budget: Budget) -> Result<DensityReport> {
    let (n, r, p) = (params.n(), params.r(), params.p());
    // only values are reported, so the first block may be fixed
    let opts = SolveOptions {
        budget,
        symmetry_break: true,
    };
    let (turan, turan_method) = if r == 2 {
        (turan_number_r2(n, p)?, "Turán graph")
    } else {
        let counting = turan_counting_bound(n, p, r);
        match exact_min_lottery_with(&Params::new(n, r, r, p)?, &opts) {
            Ok(bp) if bp.complete => (bp.upper.unwrap_or(0), "exact"),
            Ok(bp) => (bp.lower.max(counting), "search/counting bound"),
            Err(Error::Capacity(_)) => (counting, "counting bound"),
            Err(e) => return Err(e),
        }
    };
    let lower = ceil_ratio(&turan_lower_bound(params, turan));
    let (exact, upper, upper_method) = match exact_min_lottery_with(params, &opts) {
        Ok(bp) => (bp.value(), bp.upper, bp.upper_method),
        Err(Error::Capacity(_)) => match greedy_lottery(params) {
            Ok(g) => (None, Some(g.len() as u64), "greedy"),
            Err(Error::Capacity(_)) => (None, None, "none"),
            Err(e) => return Err(e),
        },
        Err(e) => return Err(e),
    };
    Ok(DensityReport {
        params: *params,
        turan,
        turan_method,
        lower,
        exact,
        upper,
        upper_method,
        density_lower: density(lower, params),
        density_exact: exact.map(|v| density(v, params)),
        density_upper: upper.map(|v| density(v, params)),
        references: reference_limits(params.k(), r, p),
    })
}

/// `num/den`, always with an explicit denominator.
pub fn fmt_ratio(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, k: u32, r: u32, p: u32) -> Params {
        Params::new(n, k, r, p).unwrap()
    }

    #[test]
    fn small_exact_values() {
        let bp = exact_min_lottery(&params(6, 2, 1, 3), Budget::unlimited()).unwrap();
        assert_eq!(bp.value(), Some(2));
        let bp = exact_min_lottery(&params(4, 3, 2, 3), Budget::unlimited()).unwrap();
        assert_eq!(bp.value(), Some(1));
        assert_eq!(bp.certificate.unwrap().blocks(), &[vec![0, 1, 2]]);
        assert_eq!(exact_turan(5, 3, 2, Budget::unlimited()).unwrap().value(), Some(4));
        assert_eq!(exact_turan(4, 3, 2, Budget::unlimited()).unwrap().value(), Some(2));
        assert_eq!(exact_turan(6, 3, 3, Budget::unlimited()).unwrap().value(), Some(20));
    }

    #[test]
    fn symmetry_break_keeps_value() {
        for (n, k, r, p) in [(6, 3, 2, 3), (7, 3, 2, 2), (7, 2, 2, 3), (6, 2, 1, 3)] {
            let plain = exact_min_lottery(&params(n, k, r, p), Budget::unlimited()).unwrap();
            let opts = SolveOptions {
                budget: Budget::unlimited(),
                symmetry_break: true,
            };
            let sym = exact_min_lottery_with(&params(n, k, r, p), &opts).unwrap();
            assert_eq!(plain.value(), sym.value(), "({n},{k},{r},{p})");
        }
    }

    #[test]
    fn vacuous_probe() {
        let bp = exact_min_lottery(&params(4, 3, 2, 5), Budget::unlimited()).unwrap();
        assert_eq!(bp.value(), Some(0));
        assert!(greedy_lottery(&params(4, 3, 2, 5)).unwrap().is_empty());
    }

    #[test]
    fn budget_exhaustion_gives_bracket() {
        let bp = exact_min_lottery(&params(11, 3, 2, 3), Budget::nodes(10)).unwrap();
        assert!(!bp.complete);
        assert_eq!(bp.value(), None);
        assert!(bp.lower < bp.upper.unwrap());
        assert!(bp.to_string().ends_with("[incomplete]"));
        assert!(verify_lottery(bp.certificate.as_ref().unwrap(), &bp.params).unwrap().ok);
    }

    #[test]
    fn turan_bound_examples() {
        let p = params(16, 3, 2, 3);
        assert_eq!(turan_number_r2(16, 3).unwrap(), 56);
        let b = turan_lower_bound(&p, 56);
        assert_eq!(fmt_ratio(&b), "56/3");
        assert_eq!(ceil_ratio(&b), 19);
        assert_eq!(turan_lower_bound(&params(9, 3, 3, 4), 17), BigRational::from_integer(17.into()));
        assert_eq!(ceil_ratio(&turan_lower_bound(&p, 0)), 0);
        assert_eq!(turan_number_r2(5, 3).unwrap(), 4);
        assert_eq!(turan_number_r2(4, 3).unwrap(), 2);
        assert_eq!(turan_number_r2(6, 2).unwrap(), 15);
    }

    #[test]
    fn limits() {
        assert_eq!(fmt_ratio(&limit_density_r2(2, 2).unwrap()), "1/1");
        assert_eq!(fmt_ratio(&limit_density_r2(6, 4).unwrap()), "1/45");
        assert_eq!(fmt_ratio(&limit_density_r2(3, 3).unwrap()), "1/6");
        assert_eq!(fmt_ratio(&covering_limit_density(5, 5).unwrap()), "1/1");
        assert_eq!(fmt_ratio(&covering_limit_density(6, 3).unwrap()), "1/20");
        assert_eq!(fmt_ratio(&covering_limit_density(4, 2).unwrap()), "1/6");
        assert!(limit_density_r2(1, 3).is_err());
    }

    #[test]
    fn references_mark_conjectures() {
        let refs = reference_limits(4, 3, 5);
        assert!(refs.iter().any(|r| r.conjectural && fmt_ratio(&r.value) == "1/16"));
        let refs = reference_limits(3, 2, 2);
        assert_eq!(refs.len(), 2);
        assert!(refs.iter().all(|r| !r.conjectural));
    }

    #[test]
    fn greedy_examples() {
        let g = greedy_lottery(&params(4, 3, 2, 3)).unwrap();
        assert_eq!(g.blocks(), &[vec![0, 1, 2]]);
        let g = greedy_lottery(&params(7, 3, 2, 2)).unwrap();
        assert!(g.len() as u128 * 3 >= binomial(7, 2));
    }
}
