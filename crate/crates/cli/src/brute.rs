//! Brute-force reference answers built on the naive routines of the oracle module.

use std::collections::{BTreeMap, BTreeSet};

use anyhow::{Context, Result};
use vassep_core::linsep::Mode;
use vassep_core::oracle::{find_pair, modular_equivalent, nonneg_exhaustive, reach_within, section_of, unary_equivalent, vas_i64};
use vassep_core::vas::SectionedVas;

/// Section members with every entry at most `bound`, found through
/// configurations with entries at most `cap`.
pub fn members(s: &SectionedVas, bound: i64, cap: i64) -> Result<BTreeSet<Vec<i64>>> {
    let (src, ts) = vas_i64(s.vas()).context("system entries exceed machine integers")?;
    let fixed: BTreeMap<usize, i64> = s
        .section()
        .fixed
        .iter()
        .map(|(&i, x)| Ok((i, i64::try_from(x).ok().context("fixed value exceeds machine integers")?)))
        .collect::<Result<_>>()?;
    let reach = reach_within(&src, &ts, cap);
    Ok(section_of(&reach, &s.section().keep, &fixed).into_iter().filter(|v| v.iter().all(|&x| x <= bound)).collect())
}

/// Two bounded members, one per section, in the same class.
pub fn pair(a: &SectionedVas, b: &SectionedVas, mode: Mode, n: i64, bound: i64, cap: i64) -> Result<Option<(Vec<i64>, Vec<i64>)>> {
    anyhow::ensure!(n > 0, "modulus must be positive");
    let (ma, mb) = (members(a, bound, cap)?, members(b, bound, cap)?);
    Ok(match mode {
        Mode::Modular => find_pair(&ma, &mb, |u, v| modular_equivalent(u, v, n)),
        Mode::Unary => find_pair(&ma, &mb, |u, v| unary_equivalent(u, v, n)),
    })
}

/// Nonnegative coefficients expressing `v` over `periods`, by exhaustive search.
pub fn nonneg(v: &[i64], periods: &[Vec<i64>]) -> Result<Option<Vec<i64>>> {
    anyhow::ensure!(periods.iter().all(|p| p.len() == v.len()), "periods must match the vector length");
    Ok(nonneg_exhaustive(v, periods))
}

#[cfg(test)]
mod tests {
    use super::*;
    use vassep_core::intlin::IntVector;
    use vassep_core::vas::{SectionSpec, Vas};

    #[test]
    fn example_section_members() {
        let v = Vas::new(3, IntVector::from_i64s(&[1, 0, 0]), vec![IntVector::from_i64s(&[-1, 2, 1]), IntVector::from_i64s(&[2, -1, 1])])
            .unwrap();
        let s = SectionedVas::new(v, SectionSpec::new(vec![0, 1], [(2, 7.into())].into())).unwrap();
        assert_eq!(members(&s, 20, 20).unwrap(), BTreeSet::from([vec![0, 8], vec![3, 5], vec![6, 2]]));
    }

    #[test]
    fn coefficients() {
        assert_eq!(nonneg(&[2], &[vec![1]]).unwrap(), Some(vec![2]));
        assert!(nonneg(&[2], &[vec![1, 1]]).is_err());
    }
}
