use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{vass_to_vas, Vas, Vass};
use crate::error::{check_dim, Error, Result};
use crate::intlin::{Config, IntVector};

/// Kept coordinates `I` (in output order) and fixed values `ū` on the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub keep: Vec<usize>,
    #[serde(default, with = "crate::intlin::bigint_map_serde")]
    pub fixed: BTreeMap<usize, BigInt>,
}

impl SectionSpec {
    pub fn new(keep: Vec<usize>, fixed: BTreeMap<usize, BigInt>) -> Self {
        SectionSpec { keep, fixed }
    }

    /// Keeps every coordinate.
    pub fn full(dim: usize) -> Self {
        SectionSpec { keep: (0..dim).collect(), fixed: BTreeMap::new() }
    }

    /// Keeps `keep` and fixes every other coordinate below `dim` to zero.
    pub fn zero_outside(dim: usize, keep: Vec<usize>) -> Self {
        let fixed = (0..dim).filter(|i| !keep.contains(i)).map(|i| (i, BigInt::zero())).collect();
        SectionSpec { keep, fixed }
    }

    pub fn arity(&self) -> usize {
        self.keep.len()
    }

    /// Kept and fixed coordinates must partition `0..dim`; fixed values are nonnegative.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let mut seen = vec![false; dim];
        for &i in self.keep.iter().chain(self.fixed.keys()) {
            if i >= dim {
                return Err(Error::InvalidSection(format!("coordinate {i} out of range for dimension {dim}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidSection(format!("coordinate {i} listed twice")));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSection(format!("coordinate {i} is neither kept nor fixed")));
        }
        if self.fixed.values().any(Signed::is_negative) {
            return Err(Error::InvalidSection("negative fixed value".into()));
        }
        Ok(())
    }

    pub fn all_fixed_zero(&self) -> bool {
        self.fixed.values().all(Zero::is_zero)
    }

    /// The projection of `v` onto the kept coordinates, if `v` matches the fixed values.
    pub fn apply(&self, v: &Config) -> Option<IntVector> {
        self.fixed.iter().all(|(&i, x)| &v[i] == x).then(|| v.project(&self.keep))
    }
}

/// A section of the reachability set of a VAS.
///
/// `guard` optionally names token coordinates: their total is one at the
/// source and every transition moves the token. It is a hint used by
/// normalization and is re-checked before use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SectionedRepr", into = "SectionedRepr")]
pub struct SectionedVas {
    vas: Vas,
    section: SectionSpec,
    guard: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionedRepr {
    vas: Vas,
    section: SectionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<Vec<usize>>,
}

impl TryFrom<SectionedRepr> for SectionedVas {
    type Error = Error;
    fn try_from(r: SectionedRepr) -> Result<Self> {
        let s = SectionedVas::new(r.vas, r.section)?;
        match r.guard {
            Some(g) => s.with_guard(g),
            None => Ok(s),
        }
    }
}

impl From<SectionedVas> for SectionedRepr {
    fn from(s: SectionedVas) -> Self {
        SectionedRepr { vas: s.vas, section: s.section, guard: s.guard }
    }
}

impl SectionedVas {
    pub fn new(vas: Vas, section: SectionSpec) -> Result<Self> {
        section.validate(vas.dim())?;
        Ok(SectionedVas { vas, section, guard: None })
    }

    /// The whole reachability set.
    pub fn full(vas: Vas) -> Self {
        let section = SectionSpec::full(vas.dim());
        SectionedVas { vas, section, guard: None }
    }

    /// Attaches a token-guard hint.
    pub fn with_guard(mut self, guard: Vec<usize>) -> Result<Self> {
        if let Some(&g) = guard.iter().find(|&&g| g >= self.vas.dim()) {
            return Err(Error::InvalidSection(format!("guard coordinate {g} out of range")));
        }
        self.guard = Some(guard);
        Ok(self)
    }

    /// `Reach_q` of a VASS, optionally sectioned further on its own coordinates.
    pub fn from_vass(vass: &Vass, state: usize, inner: Option<SectionSpec>) -> Result<Self> {
        let inner = inner.unwrap_or_else(|| SectionSpec::full(vass.dim()));
        inner.validate(vass.dim())?;
        let (vas, outer) = vass_to_vas(vass, state)?;
        let mut fixed = outer.fixed;
        fixed.extend(inner.fixed);
        let guard = (vass.dim()..vas.dim()).collect();
        SectionedVas::new(vas, SectionSpec::new(inner.keep, fixed))?.with_guard(guard)
    }

    pub fn vas(&self) -> &Vas {
        &self.vas
    }

    pub fn section(&self) -> &SectionSpec {
        &self.section
    }

    pub fn guard(&self) -> Option<&[usize]> {
        self.guard.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.section.arity()
    }

    pub fn dim(&self) -> usize {
        self.vas.dim()
    }

    /// The section member represented by a reachable configuration, if any.
    pub fn member_of(&self, config: &Config) -> Result<Option<IntVector>> {
        check_dim(self.vas.dim(), config.dim())?;
        Ok(self.section.apply(config))
    }
}
