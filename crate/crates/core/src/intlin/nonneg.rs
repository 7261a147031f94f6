use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{hnf, IntMatrix, IntVector, LatticeBasis};
use crate::error::{check_dim, Error, Result};

/// Exact nonnegative-combination membership: coefficients `a_i >= 0` with
/// `v = sum a_i p_i`, aligned with `periods`.
///
/// Zero periods are ignored and receive coefficient 0. The search is a
/// depth-first enumeration over bounded coefficients, pruned by support and
/// by lattice membership of the residual in the span of the remaining periods.
pub fn nonneg_member(v: &IntVector, periods: &[IntVector]) -> Result<Option<Vec<BigInt>>> {
    let d = v.dim();
    if !v.is_nonneg() {
        return Err(Error::NegativeEntry("target vector"));
    }
    for p in periods {
        check_dim(d, p.dim())?;
        if !p.is_nonneg() {
            return Err(Error::NegativeEntry("period"));
        }
    }
    let active: Vec<usize> = (0..periods.len()).filter(|&i| !periods[i].is_zero()).collect();
    let ps: Vec<&IntVector> = active.iter().map(|&i| &periods[i]).collect();

    // suffix[i]: span of ps[i..]; suffix_support[i]: coordinates some ps[i..] is positive on.
    let suffix: Vec<LatticeBasis> =
        (0..=ps.len()).map(|i| hnf(&IntMatrix::new(d, ps[i..].iter().map(|p| (*p).clone()).collect()).expect("dims checked"))).collect();
    let mut suffix_support = vec![vec![false; d]; ps.len() + 1];
    for i in (0..ps.len()).rev() {
        let mut s = suffix_support[i + 1].clone();
        for (j, x) in ps[i].iter().enumerate() {
            if x.is_positive() {
                s[j] = true;
            }
        }
        suffix_support[i] = s;
    }

    let mut search = Search { ps: &ps, suffix: &suffix, suffix_support: &suffix_support, dead: HashSet::new() };
    let mut coeffs = vec![BigInt::zero(); ps.len()];
    if !search.dfs(0, v.clone(), &mut coeffs) {
        return Ok(None);
    }
    let mut out = vec![BigInt::zero(); periods.len()];
    for (slot, c) in active.iter().zip(coeffs) {
        out[*slot] = c;
    }
    Ok(Some(out))
}

struct Search<'a> {
    ps: &'a [&'a IntVector],
    suffix: &'a [LatticeBasis],
    suffix_support: &'a [Vec<bool>],
    dead: HashSet<(usize, IntVector)>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, residual: IntVector, coeffs: &mut [BigInt]) -> bool {
        if residual.is_zero() {
            coeffs[i..].iter_mut().for_each(|c| *c = BigInt::zero());
            return true;
        }
        if i == self.ps.len() {
            return false;
        }
        if residual.iter().enumerate().any(|(j, x)| x.is_positive() && !self.suffix_support[i][j]) {
            return false;
        }
        if !self.suffix[i].contains(&residual) {
            return false;
        }
        let key = (i, residual);
        if self.dead.contains(&key) {
            return false;
        }
        let residual = key.1;
        let p = self.ps[i];
        let bound = p
            .iter()
            .zip(residual.iter())
            .filter(|(pj, _)| pj.is_positive())
            .map(|(pj, rj)| rj.div_floor(pj))
            .min()
            .expect("nonzero nonnegative period has a positive entry");
        let mut a = bound;
        while !a.is_negative() {
            let mut next = residual.clone();
            next.add_scaled(&-&a, p);
            if self.dfs(i + 1, next, coeffs) {
                coeffs[i] = a;
                return true;
            }
            a -= 1;
        }
        self.dead.insert((i, residual));
        false
    }
}
