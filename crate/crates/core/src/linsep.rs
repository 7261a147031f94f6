//! Modular and unary separability of pairs of linear sets.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin::{lattice_member, mod_lattice_member, IntMatrix, IntVector, DEFAULT_RESIDUE_CAP};
use crate::linsets::{mod_residues, slice_hyperplane, LinearSet, ModularSet, SubLinear, UnarySet, DEFAULT_CLASS_CAP};

/// Which family of separators is asked for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Modular,
    Unary,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Modular => "modular",
            Mode::Unary => "unary",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "modular" => Ok(Mode::Modular),
            "unary" => Ok(Mode::Unary),
            other => Err(format!("unknown mode {other:?} (expected modular or unary)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Separator {
    Modular(ModularSet),
    Unary(UnarySet),
}

impl Separator {
    pub fn n(&self) -> u64 {
        match self {
            Separator::Modular(s) => s.n(),
            Separator::Unary(s) => s.n(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Separator::Modular(s) => s.dim(),
            Separator::Unary(s) => s.dim(),
        }
    }

    pub fn contains(&self, v: &IntVector) -> Result<bool> {
        match self {
            Separator::Modular(s) => s.contains(v),
            Separator::Unary(s) => s.contains(v),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Separator::Modular(_) => Mode::Modular,
            Separator::Unary(_) => Mode::Unary,
        }
    }
}

/// How a nonseparability proof was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProofPath {
    /// `b - c` lies in the lattice of the periods; refutes modular separators only.
    Lattice,
    /// The two sets are linked; refutes unary separators as well.
    Linked,
    /// Linked subsets found by slicing along hyperplanes.
    Sliced,
}

/// Sub-linear sets `L' ⊆ L`, `M' ⊆ M` whose bases satisfy
/// `base(L') - base(M') = Σ coeffs · (periods(L') ++ periods(M'))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonSepProof {
    pub left: SubLinear,
    pub right: SubLinear,
    #[serde(with = "crate::intlin::bigint_vec_serde")]
    pub coeffs: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linked: Option<Vec<usize>>,
    pub path: ProofPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinSepVerdict {
    Separable(Separator),
    NotSeparable(NonSepProof),
}

impl LinSepVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, LinSepVerdict::Separable(_))
    }
}

/// Caps for separator synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinSepOptions {
    pub residue_cap: usize,
    pub class_cap: usize,
}

impl Default for LinSepOptions {
    fn default() -> Self {
        LinSepOptions { residue_cap: DEFAULT_RESIDUE_CAP, class_cap: DEFAULT_CLASS_CAP }
    }
}

fn period_matrix(l: &LinearSet, m: &LinearSet) -> Result<IntMatrix> {
    let cols = l.periods().iter().chain(m.periods()).cloned().collect();
    IntMatrix::new(l.dim(), cols)
}

/// Some coordinate set `I` iff both period supports equal `I` and the bases
/// agree outside `I`.
pub fn linked(l: &LinearSet, m: &LinearSet) -> Option<Vec<usize>> {
    if l.dim() != m.dim() {
        return None;
    }
    let sp = l.support();
    if sp != m.support() {
        return None;
    }
    let off_agree = (0..l.dim()).filter(|i| !sp.contains(i)).all(|i| l.base()[i] == m.base()[i]);
    off_agree.then(|| sp.into_iter().collect())
}

/// The smallest `n >= 2` at which the residues of `L` and `M` are disjoint,
/// given that `b - c` is outside the lattice of `P ∪ Q`.
fn separating_modulus(diff: &IntVector, gens: &IntMatrix) -> Result<u64> {
    let mut n = 2u64;
    loop {
        if !mod_lattice_member(diff, gens, n)? {
            return Ok(n);
        }
        n = n.checked_add(1).ok_or(Error::Overflow("modulus search"))?;
    }
}

/// Modular separability of two linear sets.
pub fn modular_separable_linear(l: &LinearSet, m: &LinearSet) -> Result<LinSepVerdict> {
    modular_separable_linear_with(l, m, &LinSepOptions::default())
}

pub fn modular_separable_linear_with(l: &LinearSet, m: &LinearSet, opts: &LinSepOptions) -> Result<LinSepVerdict> {
    check_dim(l.dim(), m.dim())?;
    let diff = l.base() - m.base();
    let gens = period_matrix(l, m)?;
    match lattice_member(&diff, &gens)? {
        Some(coeffs) => {
            let link = linked(l, m);
            let path = if link.is_some() { ProofPath::Linked } else { ProofPath::Lattice };
            Ok(LinSepVerdict::NotSeparable(NonSepProof {
                left: SubLinear::identity(l),
                right: SubLinear::identity(m),
                coeffs,
                linked: link,
                path,
            }))
        }
        None => {
            let n = separating_modulus(&diff, &gens)?;
            let residues = mod_residues(l, n, opts.residue_cap)?;
            Ok(LinSepVerdict::Separable(Separator::Modular(ModularSet::new(n, l.dim(), residues)?)))
        }
    }
}

/// Unary separability of two linear sets.
///
/// Modular separability is tried first. Otherwise linked pairs are not
/// separable, and unlinked pairs are split along a coordinate where exactly
/// one side is constant. The total support size drops with every split, so
/// the recursion depth is at most `2d`.
pub fn unary_separable_linear(l: &LinearSet, m: &LinearSet) -> Result<LinSepVerdict> {
    unary_separable_linear_traced(l, m, &LinSepOptions::default()).map(|(v, _)| v)
}

/// As [`unary_separable_linear`], also returning the recursion depth reached.
pub fn unary_separable_linear_traced(l: &LinearSet, m: &LinearSet, opts: &LinSepOptions) -> Result<(LinSepVerdict, usize)> {
    check_dim(l.dim(), m.dim())?;
    let (out, depth) = unary_rec(l, m, opts, true, 0)?;
    let verdict = match out {
        Unary::Separable(sep) => LinSepVerdict::Separable(Separator::Unary(sep.expect("separator requested"))),
        Unary::NotSeparable(p) => LinSepVerdict::NotSeparable(p),
    };
    Ok((verdict, depth))
}

/// A unary nonseparability proof when one exists, without building separators.
pub fn unary_nonsep_proof(l: &LinearSet, m: &LinearSet) -> Result<Option<NonSepProof>> {
    check_dim(l.dim(), m.dim())?;
    match unary_rec(l, m, &LinSepOptions::default(), false, 0)?.0 {
        Unary::Separable(_) => Ok(None),
        Unary::NotSeparable(p) => Ok(Some(p)),
    }
}

/// A modular nonseparability proof when one exists.
pub fn modular_nonsep_proof(l: &LinearSet, m: &LinearSet) -> Result<Option<NonSepProof>> {
    check_dim(l.dim(), m.dim())?;
    let gens = period_matrix(l, m)?;
    Ok(lattice_member(&(l.base() - m.base()), &gens)?.map(|coeffs| {
        let link = linked(l, m);
        NonSepProof {
            left: SubLinear::identity(l),
            right: SubLinear::identity(m),
            coeffs,
            path: if link.is_some() { ProofPath::Linked } else { ProofPath::Lattice },
            linked: link,
        }
    }))
}

enum Unary {
    Separable(Option<UnarySet>),
    NotSeparable(NonSepProof),
}

fn unary_rec(l: &LinearSet, m: &LinearSet, opts: &LinSepOptions, build: bool, depth: usize) -> Result<(Unary, usize)> {
    let d = l.dim();
    let diff = l.base() - m.base();
    let gens = period_matrix(l, m)?;
    let Some(coeffs) = lattice_member(&diff, &gens)? else {
        if !build {
            return Ok((Unary::Separable(None), depth));
        }
        let n = separating_modulus(&diff, &gens)?;
        let modular = ModularSet::new(n, d, mod_residues(l, n, opts.residue_cap)?)?;
        return Ok((Unary::Separable(Some(modular.to_unary(opts.class_cap)?)), depth));
    };
    if let Some(set) = linked(l, m) {
        let path = if depth == 0 { ProofPath::Linked } else { ProofPath::Sliced };
        let proof = NonSepProof { left: SubLinear::identity(l), right: SubLinear::identity(m), coeffs, linked: Some(set), path };
        return Ok((Unary::NotSeparable(proof), depth));
    }
    let sp = l.support();
    let sq = m.support();
    for i in 0..d {
        if !sp.contains(&i) && !sq.contains(&i) && l.base()[i] != m.base()[i] {
            let sep = if build { Some(UnarySet::pin(d, i, small(&l.base()[i])?)?) } else { None };
            return Ok((Unary::Separable(sep), depth));
        }
    }
    let mut reached = depth;
    if let Some(&i) = sp.difference(&sq).next() {
        // M is constant on i: split L into its slice at M's value and the rest
        let c = &m.base()[i];
        let mut sep = if build { Some(UnarySet::avoid(d, i, small(c)?)?) } else { None };
        for s in slice_hyperplane(l, i, c)? {
            let part = s.apply(l)?;
            let (out, dk) = unary_rec(&part, m, opts, build, depth + 1)?;
            reached = reached.max(dk);
            match out {
                Unary::Separable(sk) => {
                    if let (Some(acc), Some(sk)) = (sep.as_mut(), sk) {
                        *acc = acc.union(&sk, opts.class_cap)?;
                    }
                }
                Unary::NotSeparable(mut p) => {
                    p.left = s.compose(&p.left);
                    p.path = ProofPath::Sliced;
                    return Ok((Unary::NotSeparable(p), reached));
                }
            }
        }
        Ok((Unary::Separable(sep), reached))
    } else {
        let i = *sq.difference(&sp).next().expect("unlinked pair with equal supports differs off support");
        // L is constant on i: keep only M's slice at L's value
        let b = &l.base()[i];
        let mut sep = if build { Some(UnarySet::pin(d, i, small(b)?)?) } else { None };
        for s in slice_hyperplane(m, i, b)? {
            let part = s.apply(m)?;
            let (out, dk) = unary_rec(l, &part, opts, build, depth + 1)?;
            reached = reached.max(dk);
            match out {
                Unary::Separable(sk) => {
                    if let (Some(acc), Some(sk)) = (sep.as_mut(), sk) {
                        *acc = acc.intersection(&sk, opts.class_cap)?;
                    }
                }
                Unary::NotSeparable(mut p) => {
                    p.right = s.compose(&p.right);
                    p.path = ProofPath::Sliced;
                    return Ok((Unary::NotSeparable(p), reached));
                }
            }
        }
        Ok((Unary::Separable(sep), reached))
    }
}

fn small(x: &BigInt) -> Result<u64> {
    x.to_u64().filter(|&v| v < u64::MAX).ok_or(Error::Overflow("unary pin value"))
}

/// Re-checks a verdict.
///
/// Separators are tested on every member of `L` and `M` with entries at most
/// `bound`; modular separators are additionally checked on residues. Proofs are
/// re-applied and recombined exactly; in unary mode the proof must be linked.
pub fn verify_linsep(l: &LinearSet, m: &LinearSet, verdict: &LinSepVerdict, mode: Mode, bound: u64) -> bool {
    verify_inner(l, m, verdict, mode, bound).unwrap_or(false)
}

fn verify_inner(l: &LinearSet, m: &LinearSet, verdict: &LinSepVerdict, mode: Mode, bound: u64) -> Result<bool> {
    check_dim(l.dim(), m.dim())?;
    match verdict {
        LinSepVerdict::Separable(sep) => {
            if sep.mode() != mode || sep.dim() != l.dim() {
                return Ok(false);
            }
            if let Separator::Modular(ms) = sep {
                let lr = mod_residues(l, ms.n(), DEFAULT_RESIDUE_CAP)?;
                let mr = mod_residues(m, ms.n(), DEFAULT_RESIDUE_CAP)?;
                if !lr.is_subset(ms.residues()) || !mr.is_disjoint(ms.residues()) {
                    return Ok(false);
                }
            }
            for v in l.members_up_to(bound, DEFAULT_RESIDUE_CAP)? {
                if !sep.contains(&v)? {
                    return Ok(false);
                }
            }
            for v in m.members_up_to(bound, DEFAULT_RESIDUE_CAP)? {
                if sep.contains(&v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        LinSepVerdict::NotSeparable(p) => verify_proof(l, m, p, mode),
    }
}

/// Exact re-check of a nonseparability proof.
pub fn verify_proof(l: &LinearSet, m: &LinearSet, p: &NonSepProof, mode: Mode) -> Result<bool> {
    let l2 = p.left.apply(l)?;
    let m2 = p.right.apply(m)?;
    if p.left.periods.len() != l2.periods().len() || p.right.periods.len() != m2.periods().len() {
        return Ok(false);
    }
    let gens: Vec<IntVector> = l2.periods().iter().chain(m2.periods()).cloned().collect();
    if p.coeffs.len() != gens.len() {
        return Ok(false);
    }
    let sum = IntVector::linear_combination(&p.coeffs, &gens, l.dim());
    if sum != l2.base() - m2.base() {
        return Ok(false);
    }
    let link = linked(&l2, &m2);
    if p.linked.is_some() && p.linked != link {
        return Ok(false);
    }
    Ok(mode == Mode::Modular || p.linked.is_some())
}
