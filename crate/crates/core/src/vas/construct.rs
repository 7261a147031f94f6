use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{SectionSpec, SectionedVas, Vas, Vass, VassTransition};
use crate::error::{Error, Result};
use crate::intlin::IntVector;

/// Adds `v` into `out` at the listed positions.
fn place(out: &mut IntVector, positions: &[usize], v: &IntVector) {
    let mut entries = std::mem::take(out).into_entries();
    for (p, x) in positions.iter().zip(v.iter()) {
        entries[*p] += x;
    }
    *out = IntVector::new(entries);
}

fn unit(dim: usize, i: usize, k: i64) -> IntVector {
    let mut v = IntVector::zeros(dim);
    v.set(i, BigInt::from(k));
    v
}

/// The VAS simulating a VASS, with coordinates `[original | states | transitions]`.
///
/// A transition `t = (q, v, q')` becomes `-q + t` followed by `-t + q' + v`.
/// The returned section keeps the original coordinates, fixes the coordinate
/// of `state` to 1 and every other new coordinate to 0.
pub fn vass_to_vas(vass: &Vass, state: usize) -> Result<(Vas, SectionSpec)> {
    if state >= vass.states().len() {
        return Err(Error::InvalidSystem(format!("state index {state} out of range")));
    }
    let d = vass.dim();
    let n = vass.states().len();
    let m = vass.transitions().len();
    let dim = d + n + m;
    let mut source = vass.source().concat(&IntVector::zeros(n + m));
    source.set(d + vass.initial(), BigInt::one());
    let mut ts = Vec::with_capacity(2 * m);
    for (k, t) in vass.transitions().iter().enumerate() {
        let mut enter = unit(dim, d + t.from, -1);
        place(&mut enter, &[d + n + k], &IntVector::from_i64s(&[1]));
        let mut leave = unit(dim, d + n + k, -1);
        place(&mut leave, &[d + t.to], &IntVector::from_i64s(&[1]));
        place(&mut leave, &(0..d).collect::<Vec<_>>(), &t.delta);
        ts.push(enter);
        ts.push(leave);
    }
    let fixed = (d..dim).map(|i| (i, if i == d + state { BigInt::one() } else { BigInt::zero() })).collect();
    Ok((Vas::new(dim, source, ts)?, SectionSpec::new((0..d).collect(), fixed)))
}

/// How fixed values were turned into zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gadget {
    /// Every fixed value was already zero.
    None,
    /// The system carries a single token that every transition moves; a final
    /// transition consumes it together with the fixed values.
    Token,
    /// A control coordinate and a helper coordinate were appended (at the
    /// positions listed in [`NormalizedPair`]); each transition passes the
    /// control token through the helper, and a final transition consumes it
    /// together with the fixed values.
    Control,
}

/// Two systems of equal dimension whose expansions are
/// `{v ∈ Reach : v[j] = 0 for j >= arity}` and whose sections are the
/// projections of the expansions onto the first `arity` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedPair {
    pub u: Vas,
    pub v: Vas,
    pub arity: usize,
    pub gadget_u: Gadget,
    pub gadget_v: Gadget,
}

impl NormalizedPair {
    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Whether a configuration lies in an expansion: zero beyond the kept block.
    pub fn in_expansion(&self, c: &IntVector) -> bool {
        c.iter().skip(self.arity).all(Zero::is_zero)
    }
}

/// Whether `guard` holds exactly one token at the source and every transition
/// consumes one unit from the guard and puts one back.
fn token_guarded(vas: &Vas, guard: &[usize]) -> bool {
    let total: BigInt = guard.iter().map(|&g| vas.source()[g].clone()).sum();
    if !total.is_one() || guard.iter().any(|&g| vas.source()[g].is_negative()) {
        return false;
    }
    vas.transitions().iter().all(|t| {
        let sum: BigInt = guard.iter().map(|&g| t[g].clone()).sum();
        sum.is_zero() && guard.iter().any(|&g| t[g] == BigInt::from(-1))
    })
}

/// Turns fixed values into zeros. Returns the new system and its section.
fn zero_fixed(s: &SectionedVas) -> Result<(Vas, SectionSpec, Gadget)> {
    let vas = s.vas();
    let sec = s.section();
    if sec.all_fixed_zero() {
        return Ok((vas.clone(), sec.clone(), Gadget::None));
    }
    let d = vas.dim();
    let mut ubar = IntVector::zeros(d);
    for (&i, x) in &sec.fixed {
        ubar.set(i, x.clone());
    }
    if let Some(guard) = s.guard() {
        let token: Vec<usize> = guard.iter().copied().filter(|g| sec.fixed.get(g).is_some_and(|x| !x.is_zero())).collect();
        let guard_fixed = guard.iter().all(|g| sec.fixed.contains_key(g));
        if guard_fixed && token.len() == 1 && sec.fixed[&token[0]].is_one() && token_guarded(vas, guard) {
            let mut ts = vas.transitions().to_vec();
            ts.push(-&ubar);
            let zeroed = SectionSpec::zero_outside(d, sec.keep.clone());
            return Ok((Vas::new(d, vas.source().clone(), ts)?, zeroed, Gadget::Token));
        }
    }
    let (ctrl, help) = (d, d + 1);
    let dim = d + 2;
    let mut source = vas.source().concat(&IntVector::zeros(2));
    source.set(ctrl, BigInt::one());
    let mut enter = unit(dim, ctrl, -1);
    place(&mut enter, &[help], &IntVector::from_i64s(&[1]));
    let mut ts = vec![enter];
    for t in vas.transitions() {
        let mut leave = t.concat(&IntVector::zeros(2));
        place(&mut leave, &[ctrl, help], &IntVector::from_i64s(&[1, -1]));
        ts.push(leave);
    }
    let mut fin = (-&ubar).concat(&IntVector::zeros(2));
    place(&mut fin, &[ctrl], &IntVector::from_i64s(&[-1]));
    ts.push(fin);
    let zeroed = SectionSpec::zero_outside(dim, sec.keep.clone());
    Ok((Vas::new(dim, source, ts)?, zeroed, Gadget::Control))
}

/// Zero fixed values, then move the kept coordinates to the front.
fn normalize_one(s: &SectionedVas) -> Result<(Vas, Gadget)> {
    let (vas, sec, gadget) = zero_fixed(s)?;
    let mut order = sec.keep.clone();
    order.extend((0..vas.dim()).filter(|i| !sec.keep.contains(i)));
    Ok((vas.permute(&order)?, gadget))
}

/// Brings two sections of equal arity into the shared shape of [`NormalizedPair`]:
/// fixed values become zero, kept coordinates come first, dimensions are padded.
pub fn normalize_pair(a: &SectionedVas, b: &SectionedVas) -> Result<NormalizedPair> {
    if a.arity() != b.arity() {
        return Err(Error::Precondition(format!("section arities differ: {} and {}", a.arity(), b.arity())));
    }
    let (u, gadget_u) = normalize_one(a)?;
    let (v, gadget_v) = normalize_one(b)?;
    let dim = u.dim().max(v.dim());
    Ok(NormalizedPair { u: u.pad(dim - u.dim()), v: v.pad(dim - v.dim()), arity: a.arity(), gadget_u, gadget_v })
}

/// Layout helper: a normalized block (kept first) placed into a larger system.
struct Block {
    vas: Vas,
    arity: usize,
}

impl Block {
    fn new(s: &SectionedVas) -> Result<Block> {
        let (vas, _) = normalize_one(s)?;
        Ok(Block { vas, arity: s.arity() })
    }

    fn off(&self) -> usize {
        self.vas.dim() - self.arity
    }

    /// Positions of this block's coordinates given where its kept and off parts go.
    fn positions(&self, kept: &[usize], off_start: usize) -> Vec<usize> {
        kept.iter().copied().chain(off_start..off_start + self.off()).collect()
    }
}

/// Adds the guarded copy of `block`'s transitions: `-g + h`, then `-h + g + t`.
fn guarded(ts: &mut Vec<IntVector>, dim: usize, block: &Block, pos: &[usize], g: usize, h: usize, sign: i64) {
    let mut enter = unit(dim, g, -1);
    place(&mut enter, &[h], &IntVector::from_i64s(&[1]));
    ts.push(enter);
    for t in block.vas.transitions() {
        let mut leave = unit(dim, h, -1);
        place(&mut leave, &[g], &IntVector::from_i64s(&[1]));
        let t = if sign < 0 { -t } else { t.clone() };
        place(&mut leave, pos, &t);
        ts.push(leave);
    }
}

/// A section whose members are those of `a` or of `b`.
///
/// A start token is spent on choosing a side; the chosen system then runs
/// under its own guard and a finish transition clears the guard.
pub fn section_union(a: &SectionedVas, b: &SectionedVas) -> Result<SectionedVas> {
    if a.arity() != b.arity() {
        return Err(Error::Precondition(format!("section arities differ: {} and {}", a.arity(), b.arity())));
    }
    let (ba, bb) = (Block::new(a)?, Block::new(b)?);
    let k = a.arity();
    let kept: Vec<usize> = (0..k).collect();
    let oa = k;
    let ob = oa + ba.off();
    let ctl = ob + bb.off();
    let (start, ga, ha, gb, hb) = (ctl, ctl + 1, ctl + 2, ctl + 3, ctl + 4);
    let dim = ctl + 5;
    let pa = ba.positions(&kept, oa);
    let pb = bb.positions(&kept, ob);

    let mut source = IntVector::zeros(dim);
    source.set(start, BigInt::one());
    let mut ts = Vec::new();
    for (block, pos, g) in [(&ba, &pa, ga), (&bb, &pb, gb)] {
        let mut pick = unit(dim, start, -1);
        place(&mut pick, &[g], &IntVector::from_i64s(&[1]));
        place(&mut pick, pos, block.vas.source());
        ts.push(pick);
        ts.push(unit(dim, g, -1));
    }
    guarded(&mut ts, dim, &ba, &pa, ga, ha, 1);
    guarded(&mut ts, dim, &bb, &pb, gb, hb, 1);
    let vas = Vas::new(dim, source, ts)?;
    SectionedVas::new(vas, SectionSpec::zero_outside(dim, kept))
}

/// A section whose members are those of both `a` and `b`.
///
/// Phase one runs `a` forward on `(x1, yA)` while copying every change of the
/// kept part onto `x2`. Phase two runs `b` backward on `(x2, yB)` from an
/// expansion member of `b`. The section keeps `x1`, requires `yA = 0` and
/// requires `(x2, yB)` to have returned to the source of `b`.
pub fn section_intersection(a: &SectionedVas, b: &SectionedVas) -> Result<SectionedVas> {
    if a.arity() != b.arity() {
        return Err(Error::Precondition(format!("section arities differ: {} and {}", a.arity(), b.arity())));
    }
    let (ba, bb) = (Block::new(a)?, Block::new(b)?);
    let k = a.arity();
    let x1: Vec<usize> = (0..k).collect();
    let x2: Vec<usize> = (k..2 * k).collect();
    let ya = 2 * k;
    let yb = ya + ba.off();
    let ctl = yb + bb.off();
    let (g1, h1, g2, h2) = (ctl, ctl + 1, ctl + 2, ctl + 3);
    let dim = ctl + 4;

    let pa1 = ba.positions(&x1, ya);
    let pb2 = bb.positions(&x2, yb);

    let mut source = IntVector::zeros(dim);
    place(&mut source, &pa1, ba.vas.source());
    place(&mut source, &x2, &ba.vas.source().project(&x1));
    source.set(g1, BigInt::one());

    let mut ts = Vec::new();
    // phase one: a's transitions, kept part mirrored onto x2
    let mut enter = unit(dim, g1, -1);
    place(&mut enter, &[h1], &IntVector::from_i64s(&[1]));
    ts.push(enter);
    for t in ba.vas.transitions() {
        let mut leave = unit(dim, h1, -1);
        place(&mut leave, &[g1], &IntVector::from_i64s(&[1]));
        place(&mut leave, &pa1, t);
        place(&mut leave, &x2, &t.project(&x1));
        ts.push(leave);
    }
    let mut switch = unit(dim, g1, -1);
    place(&mut switch, &[g2], &IntVector::from_i64s(&[1]));
    ts.push(switch);
    // phase two: b's transitions reversed on (x2, yB)
    guarded(&mut ts, dim, &bb, &pb2, g2, h2, -1);

    let vas = Vas::new(dim, source, ts)?;
    let mut fixed = BTreeMap::new();
    for (i, p) in pb2.iter().enumerate() {
        fixed.insert(*p, bb.vas.source()[i].clone());
    }
    for i in (ya..yb).chain([g1, h1, h2]) {
        fixed.insert(i, BigInt::zero());
    }
    fixed.insert(g2, BigInt::one());
    SectionedVas::new(vas, SectionSpec::new(x1, fixed))
}

/// Two sections that are modular separable iff `state` is unreachable in `vass`.
///
/// Both copies get one extra coordinate, 0 in the first and 1 in the second;
/// the second also gets a loop at `state` decrementing it. A fresh final
/// state, entered from every state by a zero move, collects all reachable
/// configurations, and both sections keep the original coordinates plus the
/// extra one at that final state.
pub fn hardness_instance(vass: &Vass, state: usize) -> Result<(SectionedVas, SectionedVas)> {
    if state >= vass.states().len() {
        return Err(Error::InvalidSystem(format!("state index {state} out of range")));
    }
    let d = vass.dim();
    let mut states = vass.states().to_vec();
    let mut fin_name = "final".to_string();
    while states.contains(&fin_name) {
        fin_name.push('\'');
    }
    states.push(fin_name);
    let fin = states.len() - 1;
    let widen = |t: &VassTransition| VassTransition { from: t.from, delta: t.delta.concat(&IntVector::zeros(1)), to: t.to };
    let mut base: Vec<VassTransition> = vass.transitions().iter().map(widen).collect();
    for q in 0..vass.states().len() {
        base.push(VassTransition { from: q, delta: IntVector::zeros(d + 1), to: fin });
    }
    let build = |extra: i64, dec: bool| -> Result<SectionedVas> {
        let mut ts = base.clone();
        if dec {
            ts.push(VassTransition { from: state, delta: unit(d + 1, d, -1), to: state });
        }
        let source = vass.source().concat(&IntVector::from_i64s(&[extra]));
        let v = Vass::new(d + 1, states.clone(), vass.initial(), source, ts)?;
        SectionedVas::from_vass(&v, fin, None)
    };
    Ok((build(0, false)?, build(1, true)?))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::ivec;
    use crate::oracle::{reach_within, section_of, vas_i64};

    fn members(s: &SectionedVas, cap: i64) -> BTreeSet<Vec<i64>> {
        let (src, ts) = vas_i64(s.vas()).unwrap();
        let fixed: BTreeMap<usize, i64> = s.section().fixed.iter().map(|(&i, x)| (i, i64::try_from(x).unwrap())).collect();
        section_of(&reach_within(&src, &ts, cap), &s.section().keep, &fixed)
    }

    fn expansion(vas: &Vas, arity: usize, cap: i64) -> BTreeSet<Vec<i64>> {
        let (src, ts) = vas_i64(vas).unwrap();
        let fixed = (arity..vas.dim()).map(|i| (i, 0)).collect();
        section_of(&reach_within(&src, &ts, cap), &(0..arity).collect::<Vec<_>>(), &fixed)
    }

    fn counter(src: i64, step: i64) -> SectionedVas {
        SectionedVas::full(Vas::new(1, ivec![src], vec![ivec![step]]).unwrap())
    }

    fn triangle() -> Vas {
        Vas::new(3, ivec![1, 0, 0], vec![ivec![-1, 2, 1], ivec![2, -1, 1]]).unwrap()
    }

    #[test]
    fn vass_translation_small() {
        let v = Vass::from_named(1, "p", ivec![0], &[("p", ivec![1], "q")]).unwrap();
        let (vas, sec) = vass_to_vas(&v, 1).unwrap();
        assert_eq!(vas.dim(), 4);
        assert_eq!(vas.source(), &ivec![0, 1, 0, 0]);
        assert_eq!(vas.transitions(), &[ivec![0, -1, 0, 1], ivec![1, 0, 1, -1]]);
        assert_eq!(sec.fixed, BTreeMap::from([(1, BigInt::zero()), (2, BigInt::one()), (3, BigInt::zero())]));
    }

    #[test]
    fn triangle_section_through_gadget() {
        let s = SectionedVas::new(triangle(), SectionSpec::new(vec![0, 1], BTreeMap::from([(2, BigInt::from(7))]))).unwrap();
        let p = normalize_pair(&s, &s).unwrap();
        assert_eq!(p.gadget_u, Gadget::Control);
        let got: BTreeSet<Vec<i64>> = expansion(&p.u, 2, 10).into_iter().collect();
        assert_eq!(got, BTreeSet::from([vec![0, 8], vec![3, 5], vec![6, 2]]));
    }

    #[test]
    fn token_gadget_for_vass_sections() {
        let v = Vass::from_named(1, "p", ivec![0], &[("p", ivec![1], "p"), ("p", ivec![0], "q")]).unwrap();
        let s = SectionedVas::from_vass(&v, 1, None).unwrap();
        let p = normalize_pair(&s, &s).unwrap();
        assert_eq!(p.gadget_u, Gadget::Token);
        assert_eq!(p.u.dim(), s.dim());
        assert_eq!(expansion(&p.u, 1, 6), members(&s, 6));
    }

    #[test]
    fn padding_preserves_expansions() {
        let a = counter(0, 2);
        let b = SectionedVas::new(
            Vas::new(2, ivec![1, 1], vec![ivec![2, 0], ivec![0, -1]]).unwrap(),
            SectionSpec::new(vec![0], BTreeMap::from([(1, BigInt::zero())])),
        )
        .unwrap();
        let p = normalize_pair(&a, &b).unwrap();
        assert_eq!(p.u.dim(), p.v.dim());
        assert_eq!(p.gadget_u, Gadget::None);
        assert_eq!(expansion(&p.u, 1, 12), members(&a, 12));
        assert_eq!(expansion(&p.v, 1, 12), members(&b, 12));
        assert!(normalize_pair(&a, &SectionedVas::full(triangle())).is_err());
    }

    #[test]
    fn union_and_intersection() {
        let evens = counter(0, 2);
        let threes = counter(0, 3);
        let u = section_union(&evens, &threes).unwrap();
        let expect: BTreeSet<Vec<i64>> = (0..=24).filter(|x| x % 2 == 0 || x % 3 == 0).map(|x| vec![x]).collect();
        assert_eq!(members(&u, 24), expect);
        let i = section_intersection(&evens, &threes).unwrap();
        let expect: BTreeSet<Vec<i64>> = (0..=24).filter(|x| x % 6 == 0).map(|x| vec![x]).collect();
        assert_eq!(members(&i, 24), expect);
        let aa = section_union(&evens, &evens).unwrap();
        assert_eq!(members(&aa, 20), members(&evens, 20));
        let ii = section_intersection(&evens, &evens).unwrap();
        assert_eq!(members(&ii, 20), members(&evens, 20));
    }

    #[test]
    fn hardness_shapes() {
        let v = Vass::from_named(1, "p", ivec![0], &[("p", ivec![1], "p")]).unwrap();
        let (v0, v1) = hardness_instance(&v, 0).unwrap();
        assert_eq!(v0.arity(), 2);
        let m0 = members(&v0, 4);
        let m1 = members(&v1, 4);
        assert!(m0.contains(&vec![2, 0]));
        assert!(m1.contains(&vec![2, 1]) && m1.contains(&vec![2, 0]));
    }
}
