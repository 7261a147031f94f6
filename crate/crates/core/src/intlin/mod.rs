//! Exact integer linear algebra over `Z^d`.
//!
//! Subgroups of `Z^d` are represented by a column-style Hermite normal form
//! ([`LatticeBasis`]) that also remembers how each basis column was obtained
//! from the input generators, so membership queries can return coefficients
//! over the original generators.

mod nonneg;
mod vector;

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};

pub use nonneg::nonneg_member;
pub use vector::{bigint_map_serde, bigint_serde, bigint_vec_serde, Config, IntVector};

/// Default cap on the size of an enumerated residue subgroup.
pub const DEFAULT_RESIDUE_CAP: usize = 1_000_000;

/// Above this many points in `(Z_n)^d`, modular membership goes through the
/// HNF route instead of enumerating the residue subgroup.
const CLOSURE_LIMIT: u128 = 4096;

/// A finite list of generators of equal dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    columns: Vec<IntVector>,
}

impl IntMatrix {
    pub fn new(dim: usize, columns: Vec<IntVector>) -> Result<Self> {
        for c in &columns {
            check_dim(dim, c.dim())?;
        }
        Ok(IntMatrix { dim, columns })
    }

    pub fn empty(dim: usize) -> Self {
        IntMatrix { dim, columns: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[IntVector] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn push(&mut self, v: IntVector) -> Result<()> {
        check_dim(self.dim, v.dim())?;
        self.columns.push(v);
        Ok(())
    }
}

/// Hermite normal form of the subgroup spanned by a generator list.
///
/// Columns are in echelon form: column `j` is zero above row `pivots[j]`,
/// its pivot entry is positive, and every earlier column has its entry in
/// row `pivots[j]` reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    generators: IntMatrix,
    columns: Vec<IntVector>,
    pivots: Vec<usize>,
    /// `transform[j]` holds coefficients over `generators` producing `columns[j]`.
    transform: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn dim(&self) -> usize {
        self.generators.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[IntVector] {
        &self.columns
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivots
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// Coefficients over the basis columns, if `v` lies in the span.
    fn solve_basis(&self, v: &IntVector) -> Option<Vec<BigInt>> {
        let mut residual = v.clone();
        let mut coeffs = Vec::with_capacity(self.rank());
        let mut j = 0;
        for row in 0..self.dim() {
            if j < self.rank() && self.pivots[j] == row {
                let p = &self.columns[j][row];
                let (q, r) = residual[row].div_rem(p);
                if !r.is_zero() {
                    return None;
                }
                residual.add_scaled(&-&q, &self.columns[j]);
                coeffs.push(q);
                j += 1;
            } else if !residual[row].is_zero() {
                return None;
            }
        }
        Some(coeffs)
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        v.dim() == self.dim() && self.solve_basis(v).is_some()
    }

    /// Integer coefficients `a` over the original generators with `sum a_i g_i = v`.
    pub fn express(&self, v: &IntVector) -> Result<Option<Vec<BigInt>>> {
        check_dim(self.dim(), v.dim())?;
        let Some(y) = self.solve_basis(v) else {
            return Ok(None);
        };
        let mut a = vec![BigInt::zero(); self.generators.len()];
        for (yj, tj) in y.iter().zip(&self.transform) {
            if yj.is_zero() {
                continue;
            }
            for (ai, ti) in a.iter_mut().zip(tj) {
                *ai += yj * ti;
            }
        }
        Ok(Some(a))
    }

    /// Whether both bases span the same subgroup.
    pub fn same_span(&self, other: &LatticeBasis) -> bool {
        self.dim() == other.dim() && self.columns.iter().all(|c| other.contains(c)) && other.columns.iter().all(|c| self.contains(c))
    }
}

/// Extended gcd: returns `(g, x, y)` with `x*a + y*b = g >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

fn combine(x: &BigInt, u: &IntVector, y: &BigInt, v: &IntVector) -> IntVector {
    u.iter().zip(v.iter()).map(|(a, b)| x * a + y * b).collect()
}

fn combine_coeffs(x: &BigInt, u: &[BigInt], y: &BigInt, v: &[BigInt]) -> Vec<BigInt> {
    u.iter().zip(v).map(|(a, b)| x * a + y * b).collect()
}

/// Column-style Hermite normal form of the generators' span.
pub fn hnf(generators: &IntMatrix) -> LatticeBasis {
    let d = generators.dim;
    let k = generators.len();
    let mut cols: Vec<IntVector> = generators.columns.clone();
    let mut trans: Vec<Vec<BigInt>> =
        (0..k).map(|j| (0..k).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut pivots = Vec::new();
    let mut pc = 0;

    for row in 0..d {
        if pc == k {
            break;
        }
        for j in pc + 1..k {
            if cols[j][row].is_zero() {
                continue;
            }
            let a = cols[pc][row].clone();
            let b = cols[j][row].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let nb = -(&b / &g);
            let na = &a / &g;
            let new_p = combine(&x, &cols[pc], &y, &cols[j]);
            let new_j = combine(&nb, &cols[pc], &na, &cols[j]);
            let new_tp = combine_coeffs(&x, &trans[pc], &y, &trans[j]);
            let new_tj = combine_coeffs(&nb, &trans[pc], &na, &trans[j]);
            cols[pc] = new_p;
            cols[j] = new_j;
            trans[pc] = new_tp;
            trans[j] = new_tj;
        }
        if cols[pc][row].is_zero() {
            continue;
        }
        if cols[pc][row].is_negative() {
            cols[pc] = -&cols[pc];
            trans[pc].iter_mut().for_each(|t| *t = -&*t);
        }
        let p = cols[pc][row].clone();
        for c in 0..pc {
            let q = cols[c][row].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let neg_q = -q;
            let pivot_col = cols[pc].clone();
            cols[c].add_scaled(&neg_q, &pivot_col);
            let tp = trans[pc].clone();
            for (t, s) in trans[c].iter_mut().zip(&tp) {
                *t += &neg_q * s;
            }
        }
        pivots.push(row);
        pc += 1;
    }
    cols.truncate(pc);
    trans.truncate(pc);
    LatticeBasis { generators: generators.clone(), columns: cols, pivots, transform: trans }
}

/// Integer coefficients `a` with `sum a_i g_i = v`, or `None` when `v` is
/// outside the subgroup generated by `generators`.
pub fn lattice_member(v: &IntVector, generators: &IntMatrix) -> Result<Option<Vec<BigInt>>> {
    check_dim(generators.dim, v.dim())?;
    if v.is_zero() {
        return Ok(Some(vec![BigInt::zero(); generators.len()]));
    }
    hnf(generators).express(v)
}

/// Whether `v mod n` lies in the subgroup of `(Z_n)^d` generated by the
/// generators' residues.
pub fn mod_lattice_member(v: &IntVector, generators: &IntMatrix, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    check_dim(generators.dim, v.dim())?;
    if n == 1 {
        return Ok(true);
    }
    let points = (n as u128).checked_pow(generators.dim as u32).unwrap_or(u128::MAX);
    if points <= CLOSURE_LIMIT {
        mod_lattice_member_closure(v, generators, n)
    } else {
        mod_lattice_member_hnf(v, generators, n)
    }
}

/// Modular membership by enumerating the residue subgroup.
pub fn mod_lattice_member_closure(v: &IntVector, generators: &IntMatrix, n: u64) -> Result<bool> {
    let group = residue_subgroup(generators, n, DEFAULT_RESIDUE_CAP)?;
    Ok(group.contains(&v.residues(n)?))
}

/// Modular membership via the lattice spanned by the generators and `n` times
/// every unit vector.
pub fn mod_lattice_member_hnf(v: &IntVector, generators: &IntMatrix, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    check_dim(generators.dim, v.dim())?;
    let d = generators.dim;
    let nb = BigInt::from(n);
    let mut aug = generators.clone();
    for i in 0..d {
        aug.columns.push(IntVector::unit(d, i).scale(&nb));
    }
    Ok(hnf(&aug).contains(v))
}

/// The subgroup of `(Z_n)^d` generated by the generators' residues.
pub fn residue_subgroup(generators: &IntMatrix, n: u64, cap: usize) -> Result<BTreeSet<Vec<u64>>> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let d = generators.dim;
    let gens: Vec<Vec<u64>> = generators
        .columns
        .iter()
        .map(|g| g.residues(n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|g| g.iter().any(|&x| x != 0))
        .collect();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let zero = vec![0u64; d];
    seen.insert(zero.clone());
    queue.push_back(zero);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::BudgetExceeded { what: "residue subgroup size", limit: cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Feeds one more vector into a growing generator set. Returns the updated
/// basis and whether the vector was retained (it was outside the old span).
pub fn finite_base(seen: &LatticeBasis, new: &IntVector) -> Result<(LatticeBasis, bool)> {
    check_dim(seen.dim(), new.dim())?;
    if seen.contains(new) {
        return Ok((seen.clone(), false));
    }
    let mut gens = seen.generators.clone();
    gens.push(new.clone())?;
    Ok((hnf(&gens), true))
}

/// The empty generator set in dimension `dim`, as a basis.
pub fn trivial_basis(dim: usize) -> LatticeBasis {
    hnf(&IntMatrix::empty(dim))
}
