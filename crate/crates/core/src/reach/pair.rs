//! Reachability instances deciding whether two expansions share a class.
//!
//! A block is one normalized system extended so that its kept coordinates
//! can be brought to a class representative:
//!
//! * modular: a `-n` loop on every kept coordinate; representatives in `[0, n)`.
//! * unary: every kept coordinate first moves unit by unit into an output
//!   coordinate `z`, which may then be lowered by `n` through a pending
//!   coordinate `p` (`-2n z + p`, then `-p + n z`), so only values `>= 2n` are
//!   lowered and lowered values stay `>= n`; representatives in `[0, 2n)`.
//!
//! Moving the value out before lowering it keeps the lowering from affecting
//! later steps of the original system.
//!
//! Once a lowering has started on a coordinate, `z + n p >= n` holds from then
//! on. A run ending at `z < n` with `p = 0` therefore never lowers that
//! coordinate, and proofs for such targets may use the block without the two
//! lowering transitions of that coordinate.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::ReachInstance;
use crate::error::{Error, Result};
use crate::intlin::{Config, IntVector};
use crate::linsep::Mode;
use crate::linsets::{UnaryClass, UnaryEntry};
use crate::vas::{NormalizedPair, Vas};

/// Default cap on the number of class representatives per instance.
pub const DEFAULT_MAX_TARGETS: usize = 4096;

/// Largest representative entry plus one.
pub fn class_range(mode: Mode, n: u64) -> u64 {
    match mode {
        Mode::Modular => n,
        Mode::Unary => 2 * n,
    }
}

/// Every representative in `[0, range)^arity`, in lexicographic order.
pub fn class_representatives(mode: Mode, arity: usize, n: u64, max_targets: usize) -> Result<Vec<Vec<u64>>> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let r = class_range(mode, n);
    let count = (r as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if count > max_targets as u128 {
        return Err(Error::BudgetExceeded { what: "class representatives", limit: max_targets });
    }
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|w| (0..r).map(move |x| [w.clone(), vec![x]].concat())).collect();
    }
    Ok(out)
}

/// The unary class of a representative in `[0, 2n)^k`.
pub fn unary_class_of(w: &[u64], n: u64) -> UnaryClass {
    UnaryClass(w.iter().map(|&x| if x < n { UnaryEntry::Small(x) } else { UnaryEntry::Large(x - n) }).collect())
}

/// The block system for one side.
pub fn class_block(vas: &Vas, arity: usize, mode: Mode, n: u64) -> Result<Vas> {
    block(vas, arity, mode, n, &vec![false; arity])
}

/// The block used for proofs about representative `w`: in unary mode the
/// lowering transitions of coordinates with `w_i < n` are left out.
pub fn class_block_for(vas: &Vas, arity: usize, mode: Mode, n: u64, w: &[u64]) -> Result<Vas> {
    if w.len() != arity {
        return Err(Error::DimensionMismatch { expected: arity, found: w.len() });
    }
    block(vas, arity, mode, n, &small_mask(mode, n, w))
}

/// Coordinates whose lowering transitions are dropped for representative `w`.
pub fn small_mask(mode: Mode, n: u64, w: &[u64]) -> Vec<bool> {
    w.iter().map(|&x| mode == Mode::Unary && x < n).collect()
}

fn block(vas: &Vas, arity: usize, mode: Mode, n: u64, small: &[bool]) -> Result<Vas> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if arity > vas.dim() {
        return Err(Error::Precondition(format!("arity {arity} exceeds dimension {}", vas.dim())));
    }
    let nb = BigInt::from(n);
    match mode {
        Mode::Modular => {
            let mut ts = vas.transitions().to_vec();
            ts.extend((0..arity).map(|i| IntVector::unit(vas.dim(), i).scale(&-&nb)));
            Vas::new(vas.dim(), vas.source().clone(), ts)
        }
        Mode::Unary => {
            let d = vas.dim();
            let wide = vas.pad(2 * arity);
            let dim = wide.dim();
            let mut ts = wide.transitions().to_vec();
            let unit = |i: usize, k: &BigInt| IntVector::unit(dim, i).scale(k);
            for (i, &is_small) in small.iter().enumerate().take(arity) {
                let (z, p) = (d + i, d + arity + i);
                ts.push(&unit(i, &BigInt::from(-1)) + &unit(z, &BigInt::from(1)));
                if !is_small {
                    ts.push(&unit(z, &(-2 * &nb)) + &unit(p, &BigInt::from(1)));
                    ts.push(&unit(p, &BigInt::from(-1)) + &unit(z, &nb));
                }
            }
            Vas::new(dim, wide.source().clone(), ts)
        }
    }
}

/// The configuration of a block standing for representative `w`.
pub fn block_target(block_dim: usize, orig_dim: usize, mode: Mode, w: &[u64]) -> Config {
    let mut t = IntVector::zeros(block_dim);
    let offset = match mode {
        Mode::Modular => 0,
        Mode::Unary => orig_dim,
    };
    for (i, &x) in w.iter().enumerate() {
        t.set(offset + i, BigInt::from(x));
    }
    t
}

/// Both blocks side by side, with targets `(w, w)` for every representative `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInstance {
    pub mode: Mode,
    pub n: u64,
    pub arity: usize,
    /// Dimension of one block; the product has twice this.
    pub block_dim: usize,
    pub representatives: Vec<Vec<u64>>,
    pub instance: ReachInstance,
}

fn pair_instance(pair: &NormalizedPair, mode: Mode, n: u64, max_targets: usize) -> Result<PairInstance> {
    let reps = class_representatives(mode, pair.arity, n, max_targets)?;
    let bu = class_block(&pair.u, pair.arity, mode, n)?;
    let bv = class_block(&pair.v, pair.arity, mode, n)?;
    let bd = bu.dim();
    let zu = IntVector::zeros(bd);
    let mut ts: Vec<IntVector> = bu.transitions().iter().map(|t| t.concat(&zu)).collect();
    ts.extend(bv.transitions().iter().map(|t| zu.concat(t)));
    let vas = Vas::new(2 * bd, bu.source().concat(bv.source()), ts)?;
    let targets = reps
        .iter()
        .map(|w| {
            let t = block_target(bd, pair.dim(), mode, w);
            t.concat(&t)
        })
        .collect();
    Ok(PairInstance { mode, n, arity: pair.arity, block_dim: bd, representatives: reps, instance: ReachInstance::new(vas, targets)? })
}

/// Some target is reachable iff the expansions share a class of `≡_n`.
pub fn modpair_instance(pair: &NormalizedPair, n: u64, max_targets: usize) -> Result<PairInstance> {
    pair_instance(pair, Mode::Modular, n, max_targets)
}

/// Some target is reachable iff the expansions share a class of `≅_n`.
pub fn unarypair_instance(pair: &NormalizedPair, n: u64, max_targets: usize) -> Result<PairInstance> {
    pair_instance(pair, Mode::Unary, n, max_targets)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::ivec;
    use crate::linsets::canonical;
    use crate::oracle::unary_equivalent;
    use crate::reach::search::{explore, Compact};
    use crate::vas::{normalize_pair, SectionedVas};

    /// Representatives a single value reaches through the unary block.
    fn unary_forms(x: &[i64], n: u64) -> BTreeSet<Vec<u64>> {
        let k = x.len();
        let v = Vas::new(k, IntVector::from_i64s(x), vec![]).unwrap();
        let b = class_block(&v, k, Mode::Unary, n).unwrap();
        let ex = explore(&Compact::of_vas(&b).unwrap(), 1_000_000, None, |_| false);
        assert!(ex.report.complete());
        ex.configs
            .iter()
            .filter(|c| c[..k].iter().all(|&a| a == 0) && c[2 * k..].iter().all(|&p| p == 0))
            .filter(|c| c[k..2 * k].iter().all(|&z| z < 2 * n as i64))
            .map(|c| c[k..2 * k].iter().map(|&z| z as u64).collect())
            .collect()
    }

    #[test]
    fn unary_gadget_reaches_exactly_the_canonical_form() {
        for n in 1..=3u64 {
            for x in 0..=(10 * n as i64) {
                let forms = unary_forms(&[x], n);
                let expect = canonical(&BigInt::from(x), n);
                assert_eq!(forms, BTreeSet::from([vec![u64::try_from(expect).unwrap()]]), "x={x} n={n}");
            }
        }
    }

    #[test]
    fn canonical_forms_decide_unary_equivalence() {
        for n in 1..=3u64 {
            let hi = 10 * n as i64;
            // the per-coordinate gadgets act on disjoint coordinates, so the
            // reachable forms of a pair are products of one-coordinate forms
            let single: Vec<Vec<u64>> = (0..=hi)
                .map(|x| {
                    let f = unary_forms(&[x], n);
                    assert_eq!(f.len(), 1);
                    f.into_iter().next().unwrap()
                })
                .collect();
            assert_eq!(unary_forms(&[hi, 1], n), BTreeSet::from([[single[hi as usize].clone(), single[1].clone()].concat()]));
            let points: Vec<Vec<i64>> = (0..=hi).flat_map(|a| (0..=hi).map(move |b| vec![a, b])).collect();
            let form = |p: &[i64]| [single[p[0] as usize].clone(), single[p[1] as usize].clone()].concat();
            for u in &points {
                for v in &points {
                    assert_eq!(form(u) == form(v), unary_equivalent(u, v, n as i64), "{u:?} {v:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn modular_instance_shape() {
        let evens = SectionedVas::full(Vas::new(1, ivec![0], vec![ivec![2]]).unwrap());
        let odds = SectionedVas::full(Vas::new(1, ivec![1], vec![ivec![2]]).unwrap());
        let p = normalize_pair(&evens, &odds).unwrap();
        let inst = modpair_instance(&p, 2, 100).unwrap();
        assert_eq!(inst.representatives, vec![vec![0], vec![1]]);
        assert_eq!(inst.instance.targets, vec![ivec![0, 0], ivec![1, 1]]);
        assert!(modpair_instance(&p, 200, 100).is_err());
        let u = unarypair_instance(&p, 2, 100).unwrap();
        assert_eq!(u.representatives.len(), 4);
        assert_eq!(u.block_dim, 3);
    }

    #[test]
    fn pruned_blocks_keep_small_targets() {
        // reachable small forms are the same with and without lowering
        for n in 1..=3u64 {
            for x in 0..=(4 * n as i64) {
                let v = Vas::new(1, IntVector::from_i64s(&[x]), vec![]).unwrap();
                for w in 0..n {
                    let full = class_block(&v, 1, Mode::Unary, n).unwrap();
                    let pruned = class_block_for(&v, 1, Mode::Unary, n, &[w]).unwrap();
                    assert_eq!(pruned.transitions().len(), 1);
                    let t = block_target(full.dim(), 1, Mode::Unary, &[w]).to_i64s().unwrap();
                    let hit = |b: &Vas| explore(&Compact::of_vas(b).unwrap(), 100_000, None, |c| c == t.as_slice()).hit.is_some();
                    assert_eq!(hit(&full), hit(&pruned), "x={x} n={n} w={w}");
                }
            }
        }
    }

    #[test]
    fn unary_classes() {
        assert_eq!(unary_class_of(&[0, 3], 2), UnaryClass(vec![UnaryEntry::Small(0), UnaryEntry::Large(1)]));
    }
}
