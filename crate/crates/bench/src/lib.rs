//! Inputs shared by the benchmarks.

use vassep_core::intlin::{IntMatrix, IntVector};
use vassep_core::linsets::LinearSet;
use vassep_core::vas::{SectionSpec, SectionedVas, Vas, Vass};

pub fn iv(x: &[i64]) -> IntVector {
    IntVector::from_i64s(x)
}

/// Source `(1, 0, 0)` with transitions `(-1, 2, 1)` and `(2, -1, 1)`.
pub fn triangle() -> Vas {
    Vas::new(3, iv(&[1, 0, 0]), vec![iv(&[-1, 2, 1]), iv(&[2, -1, 1])]).unwrap()
}

/// One counter stepping by 2 from `start`.
pub fn parity(start: i64) -> SectionedVas {
    SectionedVas::full(Vas::new(1, iv(&[start]), vec![iv(&[2])]).unwrap())
}

/// A counter whose state-`p` values satisfy `1 <= a + b <= 2^c`.
pub fn doubling() -> Vass {
    Vass::from_named(
        3,
        "p",
        iv(&[1, 0, 0]),
        &[("p", iv(&[-1, 1, 0]), "p"), ("p", iv(&[0, 0, 0]), "p'"), ("p'", iv(&[2, -1, 0]), "p'"), ("p'", iv(&[0, 0, 1]), "p")],
    )
    .unwrap()
}

/// `p` loops up and down; `q` only leads into `p`.
pub fn unreachable_q() -> (Vass, usize) {
    let v = Vass::from_named(1, "p", iv(&[0]), &[("p", iv(&[1]), "p"), ("p", iv(&[-1]), "p"), ("q", iv(&[0]), "p")]).unwrap();
    let q = v.state_index("q").unwrap();
    (v, q)
}

/// Section of [`triangle`] with the last coordinate fixed to `c`.
pub fn triangle_section(c: i64) -> SectionedVas {
    SectionedVas::new(triangle(), SectionSpec::new(vec![0, 1], [(2, c.into())].into())).unwrap()
}

/// Deterministic `d x k` generator matrix with entries in `-3..=3`.
pub fn generators(d: usize, k: usize) -> IntMatrix {
    let cols = (0..k).map(|j| iv(&(0..d).map(|i| ((i * 7 + j * 5 + i * j) % 7) as i64 - 3).collect::<Vec<_>>())).collect();
    IntMatrix::new(d, cols).unwrap()
}

/// Two linked linear sets of dimension `d` that differ in their first base entry.
pub fn linked_pair(d: usize) -> (LinearSet, LinearSet) {
    let periods: Vec<IntVector> = (0..d).map(|i| iv(&(0..d).map(|j| i64::from(i == j) * 2).collect::<Vec<_>>())).collect();
    let mut b = vec![0i64; d];
    let l = LinearSet::new(iv(&b), periods.clone()).unwrap();
    b[0] = 1;
    let m = LinearSet::new(iv(&b), periods).unwrap();
    (l, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_well_formed() {
        assert_eq!(generators(4, 6).dim(), 4);
        let (l, m) = linked_pair(3);
        assert_eq!(l.periods(), m.periods());
        assert_eq!(triangle_section(7).arity(), 2);
        assert_eq!(unreachable_q().1, 1);
        assert_eq!(doubling().states().len(), 2);
        assert_eq!(parity(1).arity(), 1);
    }
}
