use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::ModularSet;
use crate::error::{check_dim, Error, Result};
use crate::intlin::IntVector;

/// Default cap on the number of classes produced by unary set operations.
pub const DEFAULT_CLASS_CAP: usize = 200_000;

/// One coordinate of a `≅_n` class.
///
/// `Small(v)` is the exact value `v < n`; `Large(r)` is every value `>= n`
/// congruent to `r` modulo `n`; `Any` places no constraint (a union of all
/// `2n` atoms, kept unexpanded).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnaryEntry {
    Small(u64),
    Large(u64),
    Any,
}

impl UnaryEntry {
    /// The atom holding `x` at modulus `n`.
    pub fn of_value(x: &BigInt, n: u64) -> UnaryEntry {
        let m = BigInt::from(n);
        if x < &m {
            UnaryEntry::Small(x.to_u64().expect("nonnegative value below n"))
        } else {
            UnaryEntry::Large(x.mod_floor(&m).to_u64().expect("residue below n"))
        }
    }

    pub fn matches(&self, x: &BigInt, n: u64) -> bool {
        match *self {
            UnaryEntry::Any => true,
            e => e == UnaryEntry::of_value(x, n),
        }
    }

    fn valid(&self, n: u64) -> bool {
        match *self {
            UnaryEntry::Small(v) | UnaryEntry::Large(v) => v < n,
            UnaryEntry::Any => true,
        }
    }

    fn meet(self, other: UnaryEntry) -> Option<UnaryEntry> {
        match (self, other) {
            (UnaryEntry::Any, e) | (e, UnaryEntry::Any) => Some(e),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    /// The atoms at modulus `n` not covered by this entry.
    fn complement(self, n: u64) -> Vec<UnaryEntry> {
        if self == UnaryEntry::Any {
            return Vec::new();
        }
        atoms(n).filter(|&a| a != self).collect()
    }

    /// The same set of values, expressed at modulus `m` (a multiple of `n`).
    fn refine(self, n: u64, m: u64) -> Vec<UnaryEntry> {
        match self {
            UnaryEntry::Small(_) | UnaryEntry::Any => vec![self],
            UnaryEntry::Large(r) => {
                let mut out: Vec<UnaryEntry> = (n..m).filter(|v| v % n == r).map(UnaryEntry::Small).collect();
                out.extend((0..m).filter(|v| v % n == r).map(UnaryEntry::Large));
                out
            }
        }
    }
}

fn atoms(n: u64) -> impl Iterator<Item = UnaryEntry> {
    (0..n).map(UnaryEntry::Small).chain((0..n).map(UnaryEntry::Large))
}

/// Canonical representative of `x` under `≅_n`: `x` itself below `n`,
/// otherwise `n + (x mod n)`.
pub fn canonical(x: &BigInt, n: u64) -> BigInt {
    let m = BigInt::from(n);
    if x < &m {
        x.clone()
    } else {
        &m + x.mod_floor(&m)
    }
}

/// A product of per-coordinate entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnaryClass(pub Vec<UnaryEntry>);

impl UnaryClass {
    /// The class of `v` at modulus `n`.
    pub fn of_vector(v: &IntVector, n: u64) -> UnaryClass {
        UnaryClass(v.iter().map(|x| UnaryEntry::of_value(x, n)).collect())
    }

    pub fn entries(&self) -> &[UnaryEntry] {
        &self.0
    }

    pub fn contains(&self, v: &IntVector, n: u64) -> bool {
        self.0.iter().zip(v.iter()).all(|(e, x)| e.matches(x, n))
    }

    fn subsumes(&self, other: &UnaryClass) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == UnaryEntry::Any || a == b)
    }

    fn meet(&self, other: &UnaryClass) -> Option<UnaryClass> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.meet(*b)).collect::<Option<Vec<_>>>().map(UnaryClass)
    }

    fn refine(&self, n: u64, m: u64, cap: usize) -> Result<Vec<UnaryClass>> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for e in &self.0 {
            let options = e.refine(n, m);
            if out.len().saturating_mul(options.len()) > cap {
                return Err(Error::BudgetExceeded { what: "unary class refinement", limit: cap });
            }
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut p = prefix.clone();
                        p.push(*o);
                        p
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(UnaryClass).collect())
    }
}

/// A union of `≅_n` classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UnaryRepr", into = "UnaryRepr")]
pub struct UnarySet {
    n: u64,
    dim: usize,
    classes: BTreeSet<UnaryClass>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnaryRepr {
    n: u64,
    dim: usize,
    classes: BTreeSet<UnaryClass>,
}

impl TryFrom<UnaryRepr> for UnarySet {
    type Error = Error;
    fn try_from(r: UnaryRepr) -> Result<Self> {
        UnarySet::new(r.n, r.dim, r.classes)
    }
}

impl From<UnarySet> for UnaryRepr {
    fn from(s: UnarySet) -> Self {
        UnaryRepr { n: s.n, dim: s.dim, classes: s.classes }
    }
}

impl UnarySet {
    pub fn new(n: u64, dim: usize, classes: BTreeSet<UnaryClass>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        for c in &classes {
            check_dim(dim, c.0.len())?;
            if let Some(e) = c.0.iter().find(|e| !e.valid(n)) {
                return Err(Error::Precondition(format!("unary entry {e:?} out of range for modulus {n}")));
            }
        }
        Ok(UnarySet { n, dim, classes })
    }

    pub fn empty(dim: usize) -> Self {
        UnarySet { n: 1, dim, classes: BTreeSet::new() }
    }

    pub fn full(dim: usize) -> Self {
        UnarySet { n: 1, dim, classes: BTreeSet::from([UnaryClass(vec![UnaryEntry::Any; dim])]) }
    }

    /// `{x : x[i] = value}`.
    pub fn pin(dim: usize, i: usize, value: u64) -> Result<Self> {
        if i >= dim {
            return Err(Error::Precondition(format!("coordinate {i} out of range for dimension {dim}")));
        }
        let mut c = vec![UnaryEntry::Any; dim];
        c[i] = UnaryEntry::Small(value);
        Ok(UnarySet { n: value + 1, dim, classes: BTreeSet::from([UnaryClass(c)]) })
    }

    /// `{x : x[i] != value}`.
    pub fn avoid(dim: usize, i: usize, value: u64) -> Result<Self> {
        let pinned = Self::pin(dim, i, value)?;
        pinned.complement(DEFAULT_CLASS_CAP)
    }

    /// The single class of `v` at modulus `n`.
    pub fn class_of(v: &IntVector, n: u64) -> Result<Self> {
        if !v.is_nonneg() {
            return Err(Error::NegativeEntry("unary class representative"));
        }
        UnarySet::new(n, v.dim(), BTreeSet::from([UnaryClass::of_vector(v, n)]))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> &BTreeSet<UnaryClass> {
        &self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        check_dim(self.dim, v.dim())?;
        Ok(self.classes.iter().any(|c| c.contains(v, self.n)))
    }

    /// The same set at modulus `m`, which must be a multiple of `n`.
    pub fn refine(&self, m: u64, cap: usize) -> Result<UnarySet> {
        if m == 0 || m % self.n != 0 {
            return Err(Error::Precondition(format!("modulus {m} is not a multiple of {}", self.n)));
        }
        if m == self.n {
            return Ok(self.clone());
        }
        let mut classes = BTreeSet::new();
        for c in &self.classes {
            classes.extend(c.refine(self.n, m, cap)?);
            if classes.len() > cap {
                return Err(Error::BudgetExceeded { what: "unary class refinement", limit: cap });
            }
        }
        Ok(UnarySet { n: m, dim: self.dim, classes })
    }

    /// Drops classes contained in another class.
    pub fn simplified(&self) -> UnarySet {
        let all: Vec<&UnaryClass> = self.classes.iter().collect();
        let classes = all
            .iter()
            .enumerate()
            .filter(|(i, c)| !all.iter().enumerate().any(|(j, d)| j != *i && d.subsumes(c) && (!c.subsumes(d) || j < *i)))
            .map(|(_, c)| (*c).clone())
            .collect();
        UnarySet { n: self.n, dim: self.dim, classes }
    }

    pub fn union(&self, other: &UnarySet, cap: usize) -> Result<UnarySet> {
        check_dim(self.dim, other.dim)?;
        let m = common_modulus(self.n, other.n)?;
        let mut a = self.refine(m, cap)?;
        a.classes.extend(other.refine(m, cap)?.classes);
        Ok(a.simplified())
    }

    pub fn intersection(&self, other: &UnarySet, cap: usize) -> Result<UnarySet> {
        check_dim(self.dim, other.dim)?;
        let m = common_modulus(self.n, other.n)?;
        let a = self.refine(m, cap)?;
        let b = other.refine(m, cap)?;
        let mut classes = BTreeSet::new();
        for x in &a.classes {
            for y in &b.classes {
                if let Some(z) = x.meet(y) {
                    classes.insert(z);
                    if classes.len() > cap {
                        return Err(Error::BudgetExceeded { what: "unary intersection", limit: cap });
                    }
                }
            }
        }
        Ok(UnarySet { n: m, dim: self.dim, classes }.simplified())
    }

    /// `N^d` minus this set, at the same modulus.
    pub fn complement(&self, cap: usize) -> Result<UnarySet> {
        let mut acc = UnarySet::full(self.dim).refine(self.n, cap)?;
        for c in &self.classes {
            // the complement of one class is a union of cylinders
            let mut cyl = BTreeSet::new();
            for (j, e) in c.0.iter().enumerate() {
                for a in e.complement(self.n) {
                    let mut entries = vec![UnaryEntry::Any; self.dim];
                    entries[j] = a;
                    cyl.insert(UnaryClass(entries));
                }
            }
            let part = UnarySet { n: self.n, dim: self.dim, classes: cyl };
            acc = acc.intersection(&part, cap)?;
        }
        Ok(acc)
    }
}

fn common_modulus(a: u64, b: u64) -> Result<u64> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(Error::Overflow("unary modulus lcm"))
}

/// Boolean operations on unary sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoolOp {
    Union,
    Intersection,
    Complement,
}

/// Applies `op` to `args` at the lcm of their moduli. Union and intersection
/// take one or more arguments; complement takes exactly one.
pub fn unary_boolean(op: BoolOp, args: &[UnarySet], cap: usize) -> Result<UnarySet> {
    let first = args.first().ok_or_else(|| Error::Precondition("no operands".into()))?;
    match op {
        BoolOp::Complement => {
            if args.len() != 1 {
                return Err(Error::Precondition("complement takes one operand".into()));
            }
            first.complement(cap)
        }
        BoolOp::Union => args[1..].iter().try_fold(first.clone(), |acc, s| acc.union(s, cap)),
        BoolOp::Intersection => args[1..].iter().try_fold(first.clone(), |acc, s| acc.intersection(s, cap)),
    }
}

impl ModularSet {
    /// The same set as a union of `≅_n` classes.
    pub fn to_unary(&self, cap: usize) -> Result<UnarySet> {
        let mut classes = BTreeSet::new();
        for r in self.residues() {
            let class = UnaryClass(r.iter().map(|&x| UnaryEntry::Large(x)).collect());
            // each coordinate is either the small value r_j or large with residue r_j
            let options: Vec<Vec<UnaryEntry>> = r.iter().map(|&x| vec![UnaryEntry::Small(x), UnaryEntry::Large(x)]).collect();
            let expanded = class.expand(&options, cap)?;
            classes.extend(expanded);
            if classes.len() > cap {
                return Err(Error::BudgetExceeded { what: "modular to unary conversion", limit: cap });
            }
        }
        UnarySet::new(self.n(), self.dim(), classes)
    }
}

impl UnaryClass {
    fn expand(&self, options: &[Vec<UnaryEntry>], cap: usize) -> Result<Vec<UnaryClass>> {
        let mut out: Vec<Vec<UnaryEntry>> = vec![Vec::new()];
        for opts in options {
            if out.len().saturating_mul(opts.len()) > cap {
                return Err(Error::BudgetExceeded { what: "modular to unary conversion", limit: cap });
            }
            out = out
                .into_iter()
                .flat_map(|p| {
                    opts.iter().map(move |o| {
                        let mut q = p.clone();
                        q.push(*o);
                        q
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(UnaryClass).collect())
    }
}
