use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin::IntVector;

/// A union of `≡_n` classes, listed by residue vectors in `[0, n)^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModularRepr", into = "ModularRepr")]
pub struct ModularSet {
    n: u64,
    dim: usize,
    residues: BTreeSet<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModularRepr {
    n: u64,
    dim: usize,
    residues: BTreeSet<Vec<u64>>,
}

impl TryFrom<ModularRepr> for ModularSet {
    type Error = Error;
    fn try_from(r: ModularRepr) -> Result<Self> {
        ModularSet::new(r.n, r.dim, r.residues)
    }
}

impl From<ModularSet> for ModularRepr {
    fn from(s: ModularSet) -> Self {
        ModularRepr { n: s.n, dim: s.dim, residues: s.residues }
    }
}

impl ModularSet {
    pub fn new(n: u64, dim: usize, residues: BTreeSet<Vec<u64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        for r in &residues {
            check_dim(dim, r.len())?;
            if r.iter().any(|&x| x >= n) {
                return Err(Error::Precondition(format!("residue {r:?} not reduced modulo {n}")));
            }
        }
        Ok(ModularSet { n, dim, residues })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn residues(&self) -> &BTreeSet<Vec<u64>> {
        &self.residues
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        check_dim(self.dim, v.dim())?;
        Ok(self.residues.contains(&v.residues(self.n)?))
    }

    /// The complementary residue listing at the same modulus.
    pub fn complement(&self, cap: usize) -> Result<ModularSet> {
        let total = (self.n as u128).checked_pow(self.dim as u32).unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::BudgetExceeded { what: "modular complement", limit: cap });
        }
        let mut out = BTreeSet::new();
        let mut cur = vec![0u64; self.dim];
        loop {
            if !self.residues.contains(&cur) {
                out.insert(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == self.dim {
                    return ModularSet::new(self.n, self.dim, out);
                }
                cur[i] += 1;
                if cur[i] < self.n {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }
}

/// Membership in a modular set.
pub fn modular_member(s: &ModularSet, v: &IntVector) -> Result<bool> {
    s.contains(v)
}
