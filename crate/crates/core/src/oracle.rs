//! Brute-force reference routines over machine integers.
//!
//! These are deliberately naive and share no code with the algorithms they
//! check: bounded breadth-first reachability, bounded member enumeration,
//! exhaustive coefficient search and pair search under `≡_n` and `≅_n`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::vas::{Vas, Vass};

/// Machine-integer copy of a VAS: source and transitions.
pub fn vas_i64(vas: &Vas) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    let s = vas.source().to_i64s()?;
    let ts = vas.transitions().iter().map(|t| t.to_i64s()).collect::<Option<Vec<_>>>()?;
    Some((s, ts))
}

/// Every configuration reachable through configurations with all entries
/// at most `cap`. Exact whenever no run to a listed configuration needs to
/// exceed `cap`.
pub fn reach_within(source: &[i64], transitions: &[Vec<i64>], cap: i64) -> BTreeSet<Vec<i64>> {
    let mut seen = BTreeSet::new();
    if source.iter().any(|&x| x > cap) {
        return seen;
    }
    let mut queue = VecDeque::from([source.to_vec()]);
    seen.insert(source.to_vec());
    while let Some(c) = queue.pop_front() {
        for t in transitions {
            let next: Vec<i64> = c.iter().zip(t).map(|(a, b)| a + b).collect();
            if next.iter().all(|&x| (0..=cap).contains(&x)) && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Every configuration reachable in at most `steps` steps.
pub fn reach_by_steps(source: &[i64], transitions: &[Vec<i64>], steps: usize) -> BTreeSet<Vec<i64>> {
    let mut seen = BTreeSet::from([source.to_vec()]);
    let mut layer = vec![source.to_vec()];
    for _ in 0..steps {
        let mut next_layer = Vec::new();
        for c in &layer {
            for t in transitions {
                let next: Vec<i64> = c.iter().zip(t).map(|(a, b)| a + b).collect();
                if next.iter().all(|&x| x >= 0) && seen.insert(next.clone()) {
                    next_layer.push(next);
                }
            }
        }
        layer = next_layer;
    }
    seen
}

/// Reachable `(state, configuration)` pairs of a VASS with entries at most `cap`.
pub fn vass_reach_within(vass: &Vass, cap: i64) -> Option<BTreeSet<(usize, Vec<i64>)>> {
    let src = vass.source().to_i64s()?;
    let ts: Vec<(usize, Vec<i64>, usize)> =
        vass.transitions().iter().map(|t| Some((t.from, t.delta.to_i64s()?, t.to))).collect::<Option<_>>()?;
    let start = (vass.initial(), src);
    let mut seen = BTreeSet::new();
    if start.1.iter().any(|&x| x > cap) {
        return Some(seen);
    }
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some((q, c)) = queue.pop_front() {
        for (from, d, to) in &ts {
            if *from != q {
                continue;
            }
            let next: Vec<i64> = c.iter().zip(d).map(|(a, b)| a + b).collect();
            if next.iter().all(|&x| (0..=cap).contains(&x)) && seen.insert((*to, next.clone())) {
                queue.push_back((*to, next));
            }
        }
    }
    Some(seen)
}

/// Projections onto `keep` of the configurations matching `fixed`.
pub fn section_of<'a>(configs: impl IntoIterator<Item = &'a Vec<i64>>, keep: &[usize], fixed: &BTreeMap<usize, i64>) -> BTreeSet<Vec<i64>> {
    configs.into_iter().filter(|c| fixed.iter().all(|(&i, &x)| c[i] == x)).map(|c| keep.iter().map(|&i| c[i]).collect()).collect()
}

/// Members of `{base} + Lin>=0(periods)` with every entry at most `bound`.
pub fn linear_members(base: &[i64], periods: &[Vec<i64>], bound: i64) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(0usize, base.to_vec())];
    while let Some((i, v)) = stack.pop() {
        if v.iter().any(|&x| x > bound) {
            continue;
        }
        if i == periods.len() {
            out.insert(v);
            continue;
        }
        if periods[i].iter().all(|&x| x == 0) {
            stack.push((i + 1, v));
            continue;
        }
        let mut cur = v;
        while cur.iter().all(|&x| x <= bound) {
            stack.push((i + 1, cur.clone()));
            cur = cur.iter().zip(&periods[i]).map(|(a, b)| a + b).collect();
        }
    }
    out
}

/// Exhaustive search for `a >= 0` with `v = Σ a_i p_i`, trying every
/// coefficient up to the largest entry of `v`.
pub fn nonneg_exhaustive(v: &[i64], periods: &[Vec<i64>]) -> Option<Vec<i64>> {
    let bound = v.iter().copied().max().unwrap_or(0).max(0);
    let k = periods.len();
    let mut a = vec![0i64; k];
    loop {
        let sum: Vec<i64> = (0..v.len()).map(|r| (0..k).map(|j| a[j] * periods[j][r]).sum()).collect();
        if sum == v {
            return Some(a);
        }
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            a[i] += 1;
            if a[i] <= bound {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

pub fn modular_equivalent(u: &[i64], v: &[i64], n: i64) -> bool {
    u.iter().zip(v).all(|(a, b)| (a - b).rem_euclid(n) == 0)
}

pub fn unary_equivalent(u: &[i64], v: &[i64], n: i64) -> bool {
    u.iter().zip(v).all(|(&a, &b)| if a < n || b < n { a == b } else { (a - b).rem_euclid(n) == 0 })
}

/// Some `(u, v)` from the two sets with `related(u, v)`.
pub fn find_pair(
    us: &BTreeSet<Vec<i64>>,
    vs: &BTreeSet<Vec<i64>>,
    related: impl Fn(&[i64], &[i64]) -> bool,
) -> Option<(Vec<i64>, Vec<i64>)> {
    us.iter().find_map(|u| vs.iter().find(|v| related(u, v)).map(|v| (u.clone(), v.clone())))
}

/// Residues modulo `n` of a set of vectors.
pub fn residues(set: &BTreeSet<Vec<i64>>, n: i64) -> BTreeSet<Vec<i64>> {
    set.iter().map(|v| v.iter().map(|x| x.rem_euclid(n)).collect()).collect()
}

/// Whether every combination with coefficients below `n` stays within
/// `bound`, so that bounded members realize every residue class modulo `n`.
pub fn residues_saturated(base: &[i64], periods: &[Vec<i64>], n: i64, bound: i64) -> bool {
    (0..base.len()).all(|r| base[r] + (n - 1) * periods.iter().map(|p| p[r]).sum::<i64>() <= bound)
}
