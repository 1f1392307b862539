//! Exhaustive property checkers.
//!
//! Every checker walks its probe sets in lexicographic order and reports the
//! least failing one as the witness, so verdicts are reproducible across
//! runs, platforms and thread counts.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use crate::combin::{mask_of, next_combination};
use crate::construct::PartiteLayout;
use crate::error::{Error, Result};
use crate::setsystem::{Params, SetSystem, Vertex};

/// Outcome of a check. A failed verdict always carries a witness that
/// reproduces the failure when checked on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub witness: Option<Vec<Vertex>>,
    pub detail: String,
}

impl Verdict {
    pub fn pass(detail: impl Into<String>) -> Self {
        Verdict {
            ok: true,
            witness: None,
            detail: detail.into(),
        }
    }

    pub fn fail(witness: Vec<Vertex>, detail: impl Into<String>) -> Self {
        Verdict {
            ok: false,
            witness: Some(witness),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "ok ({})", self.detail),
            Some(w) => {
                let w: Vec<String> = w.iter().map(|v| v.to_string()).collect();
                write!(f, "FAIL ({}) witness {{{}}}", self.detail, w.join(" "))
            }
        }
    }
}

/// Lex-least `size`-subset of `[0, n)` rejected by `ok`, searched with up to
/// `threads` workers split on the first element.
fn first_failure<F>(n: u32, size: u32, threads: usize, ok: F) -> Option<Vec<Vertex>>
where
    F: Fn(&[Vertex]) -> bool + Sync,
{
    if size == 0 || size > n {
        return None;
    }
    let heads = n - size + 1;
    let scan = |head: u32| -> Option<Vec<Vertex>> {
        let span = n - head - 1;
        let mut tail: Vec<u32> = (0..size - 1).collect();
        let mut probe = vec![head; size as usize];
        loop {
            for (slot, &t) in probe[1..].iter_mut().zip(&tail) {
                *slot = head + 1 + t;
            }
            if !ok(&probe) {
                return Some(probe);
            }
            if !next_combination(&mut tail, span) {
                return None;
            }
        }
    };

    if threads <= 1 {
        return (0..heads).find_map(scan);
    }
    let best = AtomicU32::new(u32::MAX);
    let workers = threads.min(heads as usize);
    let found: Vec<Option<Vec<Vertex>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let scan = &scan;
                let best = &best;
                s.spawn(move || {
                    let mut head = w as u32;
                    while head < heads && head < best.load(Ordering::Relaxed) {
                        if let Some(hit) = scan(head) {
                            best.fetch_min(head, Ordering::Relaxed);
                            return Some(hit);
                        }
                        head += workers as u32;
                    }
                    None
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verifier worker panicked")).collect()
    });
    found.into_iter().flatten().min()
}

fn vertex_index(n: u32, blocks: &[Vec<Vertex>]) -> Vec<Vec<usize>> {
    let mut index = vec![Vec::new(); n as usize];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            index[v as usize].push(i);
        }
    }
    index
}

fn lottery_check(sys: &SetSystem, r: u32, p: u32, threads: usize) -> Result<Verdict> {
    let masks = sys.masks()?;
    let index = vertex_index(sys.n(), sys.blocks());
    let detail = format!("every {p}-set meets a block in >= {r}");
    // any block meeting P in r >= 1 vertices contains some vertex of P
    let witness = first_failure(sys.n(), p, threads, |probe| {
        let pm = mask_of(probe);
        probe.iter().any(|&v| {
            index[v as usize]
                .iter()
                .any(|&b| (masks[b] & pm).count_ones() >= r)
        })
    });
    Ok(match witness {
        None => Verdict::pass(detail),
        Some(w) => Verdict::fail(w, format!("no block meets the {p}-set in >= {r}")),
    })
}

/// `(n, k, r, p)`-lottery property: every `p`-subset meets some block in at
/// least `r` vertices.
pub fn verify_lottery(sys: &SetSystem, params: &Params) -> Result<Verdict> {
    verify_lottery_threads(sys, params, 0)
}

/// [`verify_lottery`] with up to `threads` workers (`0` or `1` is
/// sequential). The verdict is identical for every thread count.
pub fn verify_lottery_threads(sys: &SetSystem, params: &Params, threads: usize) -> Result<Verdict> {
    if sys.n() != params.n() || sys.k() != params.k() {
        return Err(Error::param(format!(
            "system is (n={}, k={}) but parameters are ({params})",
            sys.n(),
            sys.k()
        )));
    }
    if params.p() > params.n() {
        return Ok(Verdict::pass("vacuous: p > n"));
    }
    lottery_check(sys, params.r(), params.p(), threads)
}

/// Covering property: every `r`-subset lies inside a block.
pub fn verify_covering(sys: &SetSystem, r: u32) -> Result<Verdict> {
    if r < 1 || r > sys.k() {
        return Err(Error::param(format!(
            "covering strength {r} outside [1, {}]",
            sys.k()
        )));
    }
    lottery_check(sys, r, r, 0)
}

/// Turán `p`-property of an `r`-uniform system: every `p`-subset contains a
/// block.
pub fn verify_turan_property(sys: &SetSystem, p: u32) -> Result<Verdict> {
    let r = sys.k();
    if r < 1 || r > p {
        return Err(Error::param(format!(
            "Turán property needs 1 <= r <= p, got r={r}, p={p}"
        )));
    }
    let masks = sys.masks()?;
    // blocks keyed by their least vertex
    let mut by_min = vec![Vec::new(); sys.n() as usize];
    for (i, b) in sys.blocks().iter().enumerate() {
        by_min[b[0] as usize].push(i);
    }
    let witness = first_failure(sys.n(), p, 0, |probe| {
        let pm = mask_of(probe);
        probe
            .iter()
            .any(|&v| by_min[v as usize].iter().any(|&b| masks[b] & pm == masks[b]))
    });
    Ok(match witness {
        None => Verdict::pass(format!("every {p}-set contains a block")),
        Some(w) => Verdict::fail(w, format!("{p}-set contains no block")),
    })
}

/// Transversal design property: any `r` vertices from `r` distinct parts lie
/// in exactly one block.
pub fn verify_gdd(sys: &SetSystem, layout: &PartiteLayout, r: u32) -> Result<Verdict> {
    if sys.n() != layout.vertex_count() || sys.k() != layout.parts() {
        return Err(Error::param(format!(
            "system (n={}, k={}) does not match a {}-part layout of size {}",
            sys.n(),
            sys.k(),
            layout.parts(),
            layout.part_size()
        )));
    }
    if r < 1 || r > layout.parts() {
        return Err(Error::param(format!(
            "r={r} outside [1, {}]",
            layout.parts()
        )));
    }
    let masks = sys.masks()?;
    let mut counts: HashMap<u128, u32> = HashMap::new();
    let mut pick: Vec<u32> = Vec::with_capacity(r as usize);
    for (b, &bm) in sys.blocks().iter().zip(&masks) {
        if !b.iter().enumerate().all(|(j, &v)| layout.part_of(v) == j as u32) {
            return Err(Error::Structural(format!("block {b:?} is not a transversal")));
        }
        pick.clear();
        pick.extend(0..r);
        loop {
            let m = pick.iter().fold(0u128, |m, &i| m | 1u128 << b[i as usize]);
            *counts.entry(m).or_default() += 1;
            if !next_combination(&mut pick, sys.k()) {
                break;
            }
        }
        debug_assert_eq!(bm.count_ones(), sys.k());
    }
    let witness = first_failure(sys.n(), r, 0, |probe| {
        let transversal = probe
            .windows(2)
            .all(|w| layout.part_of(w[0]) != layout.part_of(w[1]));
        !transversal || counts.get(&mask_of(probe)) == Some(&1)
    });
    Ok(match witness {
        None => Verdict::pass(format!(
            "every {r} vertices from distinct parts lie in exactly one block"
        )),
        Some(w) => {
            let c = counts.get(&mask_of(&w)).copied().unwrap_or(0);
            Verdict::fail(w, format!("transversal {r}-set lies in {c} blocks"))
        }
    })
}

/// Patch coverage: every `r`-subset of `[0, mN)` with at most `r - 1`
/// distinct projections `v / N` lies inside a block of `patch`.
pub fn check_patch_coverage(patch: &SetSystem, m: u32, part_size: u32, r: u32) -> Result<Verdict> {
    if part_size == 0 || m.checked_mul(part_size) != Some(patch.n()) {
        return Err(Error::param(format!(
            "system on {} vertices is not an {m} x {part_size} blow-up layout",
            patch.n()
        )));
    }
    if r < 1 {
        return Err(Error::param("r must be positive"));
    }
    let masks = patch.masks()?;
    let index = vertex_index(patch.n(), patch.blocks());
    let witness = first_failure(patch.n(), r, 0, |probe| {
        let distinct = probe
            .windows(2)
            .filter(|w| w[0] / part_size != w[1] / part_size)
            .count()
            + 1;
        if distinct as u32 == r {
            return true;
        }
        let pm = mask_of(probe);
        index[probe[0] as usize]
            .iter()
            .any(|&b| masks[b] & pm == pm)
    });
    Ok(match witness {
        None => Verdict::pass(format!(
            "every {r}-set with a repeated projection lies in a block"
        )),
        Some(w) => Verdict::fail(w, "repeated-projection set lies in no block"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fano() -> SetSystem {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        SetSystem::new(7, 3, lines.iter().map(|l| l.to_vec())).unwrap()
    }

    #[test]
    fn lottery_examples() {
        let params = Params::new(7, 3, 2, 2).unwrap();
        assert!(verify_lottery(&fano(), &params).unwrap().ok);

        let params = Params::new(6, 3, 2, 4).unwrap();
        let v = verify_lottery(&SetSystem::empty(6, 3), &params).unwrap();
        assert!(!v.ok);
        assert_eq!(v.witness, Some(vec![0, 1, 2, 3]));

        let params = Params::new(6, 3, 2, 3).unwrap();
        assert!(verify_lottery(&SetSystem::complete(6, 3), &params).unwrap().ok);

        let vacuous = Params::new(4, 3, 2, 5).unwrap();
        assert!(verify_lottery(&SetSystem::empty(4, 3), &vacuous).unwrap().ok);

        let wrong = Params::new(8, 3, 2, 2).unwrap();
        assert!(verify_lottery(&fano(), &wrong).is_err());
    }

    #[test]
    fn lottery_witness_is_least() {
        // {0,1,2} on 6 points: triples inside {3,4,5} ∪ one point fail for r = 2
        let s = SetSystem::new(6, 3, vec![vec![0, 1, 2]]).unwrap();
        let v = verify_lottery(&s, &Params::new(6, 3, 2, 3).unwrap()).unwrap();
        assert_eq!(v.witness, Some(vec![0, 3, 4]));
        for threads in [2, 3, 8] {
            let par = verify_lottery_threads(&s, &Params::new(6, 3, 2, 3).unwrap(), threads).unwrap();
            assert_eq!(par, v);
        }
    }

    #[test]
    fn covering_examples() {
        let s = SetSystem::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let v = verify_covering(&s, 2).unwrap();
        assert_eq!(v.witness, Some(vec![2, 3]));
        let s = SetSystem::new(5, 2, vec![vec![0, 1], vec![2, 3], vec![3, 4]]).unwrap();
        assert!(verify_covering(&s, 1).unwrap().ok);
        assert!(verify_covering(&s, 3).is_err());
    }

    #[test]
    fn turan_examples() {
        assert!(verify_turan_property(&SetSystem::complete(6, 2), 3).unwrap().ok);
        assert!(!verify_turan_property(&SetSystem::empty(6, 2), 3).unwrap().ok);
        let s = SetSystem::new(4, 2, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(verify_turan_property(&s, 3).unwrap().ok);
        let v = verify_turan_property(&s, 2).unwrap();
        assert_eq!(v.witness, Some(vec![0, 2]));
        assert!(verify_turan_property(&s, 1).is_err());
    }

    #[test]
    fn gdd_checks() {
        let layout = PartiteLayout::new(3, 2).unwrap();
        // z0 + z1 + z2 = 0 mod 2
        let good = SetSystem::new(
            6,
            3,
            vec![vec![0, 2, 4], vec![0, 3, 5], vec![1, 2, 5], vec![1, 3, 4]],
        )
        .unwrap();
        assert!(verify_gdd(&good, &layout, 2).unwrap().ok);

        let missing = SetSystem::new(6, 3, good.blocks()[1..].to_vec()).unwrap();
        let v = verify_gdd(&missing, &layout, 2).unwrap();
        assert_eq!(v.witness, Some(vec![0, 2]));

        let mut extra = good.blocks().to_vec();
        extra.push(vec![0, 2, 5]);
        let extra = SetSystem::new(6, 3, extra).unwrap();
        let v = verify_gdd(&extra, &layout, 2).unwrap();
        assert!(!v.ok);
        assert!(v.detail.contains("2 blocks"));

        let bad = SetSystem::new(6, 3, vec![vec![0, 1, 4]]).unwrap();
        assert!(matches!(verify_gdd(&bad, &layout, 2), Err(Error::Structural(_))));
    }

    #[test]
    fn patch_coverage_trivial_cases() {
        let empty = SetSystem::empty(8, 3);
        assert!(check_patch_coverage(&empty, 4, 2, 1).unwrap().ok);
        let v = check_patch_coverage(&empty, 4, 2, 2).unwrap();
        assert_eq!(v.witness, Some(vec![0, 1]));
        assert!(check_patch_coverage(&empty, 3, 2, 2).is_err());
    }
}
