//! Linear, semilinear, modular and unary subsets of `N^d`.

mod modular;
mod unary;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin::{nonneg_member, residue_subgroup, IntMatrix, IntVector};

pub use modular::{modular_member, ModularSet};
pub use unary::{canonical, unary_boolean, BoolOp, UnaryClass, UnaryEntry, UnarySet, DEFAULT_CLASS_CAP};

/// `{base} + Lin>=0(periods)` with `base >= 0` and nonzero nonnegative periods.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "LinearSetRepr", into = "LinearSetRepr")]
pub struct LinearSet {
    base: IntVector,
    periods: Vec<IntVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearSetRepr {
    base: IntVector,
    #[serde(default)]
    periods: Vec<IntVector>,
}

impl TryFrom<LinearSetRepr> for LinearSet {
    type Error = Error;
    fn try_from(r: LinearSetRepr) -> Result<Self> {
        LinearSet::new(r.base, r.periods)
    }
}

impl From<LinearSet> for LinearSetRepr {
    fn from(l: LinearSet) -> Self {
        LinearSetRepr { base: l.base, periods: l.periods }
    }
}

impl LinearSet {
    /// Validates nonnegativity and dimensions. Zero periods and repeated
    /// periods are dropped; the remaining order is preserved.
    pub fn new(base: IntVector, periods: Vec<IntVector>) -> Result<Self> {
        if !base.is_nonneg() {
            return Err(Error::NegativeEntry("linear set base"));
        }
        let mut kept: Vec<IntVector> = Vec::with_capacity(periods.len());
        for p in periods {
            check_dim(base.dim(), p.dim())?;
            if !p.is_nonneg() {
                return Err(Error::NegativeEntry("linear set period"));
            }
            if !p.is_zero() && !kept.contains(&p) {
                kept.push(p);
            }
        }
        Ok(LinearSet { base, periods: kept })
    }

    pub fn singleton(base: IntVector) -> Result<Self> {
        Self::new(base, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &IntVector {
        &self.base
    }

    pub fn periods(&self) -> &[IntVector] {
        &self.periods
    }

    /// Coordinates on which some period is positive.
    pub fn support(&self) -> BTreeSet<usize> {
        self.periods.iter().flat_map(|p| p.support()).collect()
    }

    /// Keeps only the listed coordinates. Periods that become zero are dropped.
    pub fn project(&self, coords: &[usize]) -> LinearSet {
        LinearSet::new(self.base.project(coords), self.periods.iter().map(|p| p.project(coords)).collect())
            .expect("projection preserves nonnegativity")
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        linear_member(self, v)
    }

    /// All members whose entries are at most `bound`.
    pub fn members_up_to(&self, bound: u64, cap: usize) -> Result<BTreeSet<IntVector>> {
        let b = BigInt::from(bound);
        let mut out = BTreeSet::new();
        if self.base.iter().any(|x| x > &b) {
            return Ok(out);
        }
        let mut stack = vec![(0usize, self.base.clone())];
        while let Some((i, v)) = stack.pop() {
            if i == self.periods.len() {
                if out.len() >= cap {
                    return Err(Error::BudgetExceeded { what: "bounded member enumeration", limit: cap });
                }
                out.insert(v);
                continue;
            }
            let mut cur = v;
            loop {
                let next = &cur + &self.periods[i];
                stack.push((i + 1, cur));
                if next.iter().any(|x| x > &b) {
                    break;
                }
                cur = next;
            }
        }
        Ok(out)
    }
}

/// A finite union of linear sets; the empty list is the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearSet {
    dim: usize,
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(dim: usize, components: Vec<LinearSet>) -> Result<Self> {
        for c in &components {
            check_dim(dim, c.dim())?;
        }
        Ok(SemilinearSet { dim, components })
    }

    pub fn empty(dim: usize) -> Self {
        SemilinearSet { dim, components: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        check_dim(self.dim, v.dim())?;
        for c in &self.components {
            if c.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `v ∈ L`, decided exactly by nonnegative-combination search on `v - base`.
pub fn linear_member(l: &LinearSet, v: &IntVector) -> Result<bool> {
    check_dim(l.dim(), v.dim())?;
    let diff = v - &l.base;
    if !diff.is_nonneg() {
        return Ok(false);
    }
    Ok(nonneg_member(&diff, &l.periods)?.is_some())
}

/// Residues modulo `n` of the members of `L`: `base + subgroup(periods)`.
///
/// Every element of the residue subgroup is realized by a nonnegative
/// combination (add a multiple of `n` to each coefficient), so this is exact.
pub fn mod_residues(l: &LinearSet, n: u64, cap: usize) -> Result<BTreeSet<Vec<u64>>> {
    let gens = IntMatrix::new(l.dim(), l.periods.clone())?;
    let group = residue_subgroup(&gens, n, cap)?;
    let b = l.base.residues(n)?;
    Ok(group.into_iter().map(|w| w.iter().zip(&b).map(|(x, y)| (x + y) % n).collect()).collect())
}

/// A linear subset of a linear set `L`: base `L.base + Σ shift_j p_j` with
/// nonnegative `shift`, and the periods of `L` listed by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubLinear {
    #[serde(with = "crate::intlin::bigint_vec_serde")]
    pub shift: Vec<BigInt>,
    pub periods: Vec<usize>,
}

impl SubLinear {
    /// `L` itself.
    pub fn identity(l: &LinearSet) -> SubLinear {
        SubLinear { shift: vec![BigInt::zero(); l.periods.len()], periods: (0..l.periods.len()).collect() }
    }

    pub fn is_identity(&self, l: &LinearSet) -> bool {
        self.shift.iter().all(Zero::is_zero) && self.periods.iter().copied().eq(0..l.periods.len())
    }

    /// The described subset of `l`.
    pub fn apply(&self, l: &LinearSet) -> Result<LinearSet> {
        let k = l.periods.len();
        if self.shift.len() != k {
            return Err(Error::Precondition(format!("shift has {} entries, expected {k}", self.shift.len())));
        }
        if self.shift.iter().any(Signed::is_negative) {
            return Err(Error::NegativeEntry("sub-linear shift"));
        }
        let mut seen = BTreeSet::new();
        if self.periods.iter().any(|&j| j >= k || !seen.insert(j)) {
            return Err(Error::Precondition("sub-linear period index invalid or repeated".into()));
        }
        let base = &l.base + &IntVector::linear_combination(&self.shift, &l.periods, l.dim());
        LinearSet::new(base, self.periods.iter().map(|&j| l.periods[j].clone()).collect())
    }

    /// `inner` is relative to `self.apply(l)`; the result is relative to `l`.
    pub fn compose(&self, inner: &SubLinear) -> SubLinear {
        let mut shift = self.shift.clone();
        for (j, a) in inner.shift.iter().enumerate() {
            shift[self.periods[j]] += a;
        }
        SubLinear { shift, periods: inner.periods.iter().map(|&j| self.periods[j]).collect() }
    }
}

/// `L ∩ {x : x[i] = c}` as sub-linear descriptors of `L`, one per distinct base.
pub fn slice_hyperplane(l: &LinearSet, i: usize, c: &BigInt) -> Result<Vec<SubLinear>> {
    if i >= l.dim() {
        return Err(Error::Precondition(format!("coordinate {i} out of range for dimension {}", l.dim())));
    }
    let rest = c - &l.base[i];
    if rest.is_negative() {
        return Ok(Vec::new());
    }
    let moving: Vec<usize> = (0..l.periods.len()).filter(|&j| l.periods[j][i].is_positive()).collect();
    let kept: Vec<usize> = (0..l.periods.len()).filter(|&j| l.periods[j][i].is_zero()).collect();

    let mut out: Vec<SubLinear> = Vec::new();
    let mut bases = BTreeSet::new();
    // depth-first over the moving periods, spending the remaining value on coordinate i
    let mut stack = vec![(0usize, rest, vec![BigInt::zero(); l.periods.len()])];
    while let Some((j, left, shift)) = stack.pop() {
        if j == moving.len() {
            if left.is_zero() {
                let base = &l.base + &IntVector::linear_combination(&shift, &l.periods, l.dim());
                if bases.insert(base) {
                    out.push(SubLinear { shift, periods: kept.clone() });
                }
            }
            continue;
        }
        let p = moving[j];
        let step = &l.periods[p][i];
        let mut left = left;
        let mut shift = shift;
        loop {
            stack.push((j + 1, left.clone(), shift.clone()));
            left -= step;
            if left.is_negative() {
                break;
            }
            shift[p] += 1;
        }
    }
    Ok(out)
}

/// `L ∩ {x : x[i] = c}` as a finite union of linear sets.
pub fn intersect_hyperplane(l: &LinearSet, i: usize, c: &BigInt) -> Result<SemilinearSet> {
    let components = slice_hyperplane(l, i, c)?.iter().map(|s| s.apply(l)).collect::<Result<Vec<_>>>()?;
    SemilinearSet::new(l.dim(), components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;

    fn lin(base: IntVector, periods: Vec<IntVector>) -> LinearSet {
        LinearSet::new(base, periods).unwrap()
    }

    #[test]
    fn linear_member_examples() {
        let evens = lin(ivec![0], vec![ivec![2]]);
        assert!(linear_member(&evens, &ivec![4]).unwrap());
        assert!(!linear_member(&evens, &ivec![3]).unwrap());
        let diag = lin(ivec![1, 0], vec![ivec![1, 1]]);
        assert!(linear_member(&diag, &ivec![3, 2]).unwrap());
        assert!(linear_member(&diag, &ivec![1]).is_err());
    }

    #[test]
    fn mod_residues_examples() {
        let l = lin(ivec![1], vec![ivec![3]]);
        assert_eq!(mod_residues(&l, 3, 100).unwrap(), BTreeSet::from([vec![1]]));
        let l = lin(ivec![0], vec![ivec![2]]);
        // members <= 8 are 0,2,4,6,8 -> residues mod 4 are {0, 2}
        assert_eq!(mod_residues(&l, 4, 100).unwrap(), BTreeSet::from([vec![0], vec![2]]));
        let l = lin(ivec![0, 0], vec![]);
        assert_eq!(mod_residues(&l, 2, 100).unwrap(), BTreeSet::from([vec![0, 0]]));
    }

    #[test]
    fn hyperplane_examples() {
        let l = lin(ivec![0, 0], vec![ivec![1, 0], ivec![0, 1]]);
        let s = intersect_hyperplane(&l, 0, &BigInt::from(2)).unwrap();
        assert_eq!(s.components(), &[lin(ivec![2, 0], vec![ivec![0, 1]])]);

        let l = lin(ivec![1], vec![ivec![2]]);
        assert!(intersect_hyperplane(&l, 0, &BigInt::from(4)).unwrap().is_empty());

        let l = lin(ivec![0], vec![ivec![1], ivec![2]]);
        let s = intersect_hyperplane(&l, 0, &BigInt::from(2)).unwrap();
        for x in 0..10 {
            assert_eq!(s.contains(&ivec![x]).unwrap(), x == 2);
        }
        assert!(intersect_hyperplane(&l, 1, &BigInt::from(2)).is_err());
    }

    #[test]
    fn sub_linear_compose() {
        let l = lin(ivec![0, 0, 0], vec![ivec![1, 0, 0], ivec![0, 1, 0], ivec![0, 0, 1]]);
        let outer = slice_hyperplane(&l, 0, &BigInt::from(2)).unwrap();
        assert_eq!(outer.len(), 1);
        let l1 = outer[0].apply(&l).unwrap();
        let inner = slice_hyperplane(&l1, 1, &BigInt::from(3)).unwrap();
        let l2 = inner[0].apply(&l1).unwrap();
        let composed = outer[0].compose(&inner[0]);
        assert_eq!(composed.apply(&l).unwrap(), l2);
        assert_eq!(l2, lin(ivec![2, 3, 0], vec![ivec![0, 0, 1]]));
        assert!(SubLinear::identity(&l).is_identity(&l));
        let bad = SubLinear { shift: vec![BigInt::from(-1), BigInt::zero(), BigInt::zero()], periods: vec![] };
        assert!(bad.apply(&l).is_err());
    }

    proptest::proptest! {
        #[test]
        fn hyperplane_is_member_exact(
            base in proptest::collection::vec(0i64..3, 2),
            periods in proptest::collection::vec(proptest::collection::vec(0i64..3, 2), 0..3),
            i in 0usize..2,
            c in 0i64..6,
        ) {
            let l = lin(IntVector::from_i64s(&base), periods.iter().map(|p| IntVector::from_i64s(p)).collect());
            let s = intersect_hyperplane(&l, i, &BigInt::from(c)).unwrap();
            for x in 0..8 {
                for y in 0..8 {
                    let v = ivec![x, y];
                    let expect = l.contains(&v).unwrap() && v[i] == BigInt::from(c);
                    proptest::prop_assert_eq!(s.contains(&v).unwrap(), expect);
                }
            }
        }

        #[test]
        fn residues_match_bounded_members(
            base in proptest::collection::vec(0i64..4, 2),
            periods in proptest::collection::vec(proptest::collection::vec(0i64..4, 2), 0..3),
            n in 1u64..9,
        ) {
            let l = lin(IntVector::from_i64s(&base), periods.iter().map(|p| IntVector::from_i64s(p)).collect());
            // coefficients below n reach every class; with at most two periods those members stay below 60
            let members = l.members_up_to(60, 1_000_000).unwrap();
            let seen: BTreeSet<Vec<u64>> = members.iter().map(|v| v.residues(n).unwrap()).collect();
            proptest::prop_assert_eq!(mod_residues(&l, n, 10_000).unwrap(), seen);
        }
    }

    #[test]
    fn members_up_to_enumerates_exactly() {
        let l = lin(ivec![1, 0], vec![ivec![1, 1], ivec![0, 2]]);
        let m = l.members_up_to(4, 1000).unwrap();
        for x in 0..=4 {
            for y in 0..=4 {
                let v = ivec![x, y];
                assert_eq!(m.contains(&v), linear_member(&l, &v).unwrap(), "{v}");
            }
        }
    }

    #[test]
    fn constructor_validates() {
        assert!(LinearSet::new(ivec![-1], vec![]).is_err());
        assert!(LinearSet::new(ivec![1], vec![ivec![-1]]).is_err());
        assert!(LinearSet::new(ivec![1], vec![ivec![1, 0]]).is_err());
        let l = lin(ivec![1], vec![ivec![0], ivec![2], ivec![2]]);
        assert_eq!(l.periods(), &[ivec![2]]);
    }

    #[test]
    fn json_schema() {
        let l: LinearSet = serde_json::from_str(r#"{"base":[1,0],"periods":[[1,1],[0,2]]}"#).unwrap();
        assert_eq!(l, lin(ivec![1, 0], vec![ivec![1, 1], ivec![0, 2]]));
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"base":[1,0],"periods":[[1,1],[0,2]]}"#);
        assert!(serde_json::from_str::<LinearSet>(r#"{"base":[-1]}"#).is_err());
        assert!(serde_json::from_str::<LinearSet>(r#"{"base":[1],"extra":1}"#).is_err());
    }
}
