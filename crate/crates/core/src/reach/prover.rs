//! Sound unreachability provers.
//!
//! Every prover works on a projection of the system onto a set of
//! coordinates: the projected source, and the projections of the transitions
//! that can ever fire. Projections of runs are runs of the projection, so a
//! target whose projection is unreachable there is unreachable.

use std::collections::HashMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::search::{backward_exhausts, explore, Compact};
use crate::error::{check_dim, Result};
use crate::intlin::{hnf, mod_lattice_member, Config, IntMatrix, IntVector, LatticeBasis};
use crate::vas::Vas;

/// Default residue moduli: the prime powers up to 16.
pub const DEFAULT_MODULI: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// Knobs of the prover stack.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverOptions {
    pub moduli: Vec<u64>,
    /// Configurations stored by a forward exhaustion attempt.
    pub forward_budget: usize,
    /// Configurations stored by a backward exhaustion attempt.
    pub backward_budget: usize,
}

impl Default for ProverOptions {
    fn default() -> Self {
        ProverOptions { moduli: DEFAULT_MODULI.to_vec(), forward_budget: 10_000, backward_budget: 10_000 }
    }
}

/// Which prover closed a target, with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "prover", rename_all = "snake_case")]
pub enum ProofMethod {
    /// The target is positive on a coordinate that never becomes positive.
    Support { coord: usize },
    /// The displacement lies outside the lattice spanned by the transitions.
    Lattice,
    /// The displacement lies outside that lattice modulo `modulus`.
    Residue { modulus: u64 },
    /// A weighting of the coordinates that no transition decreases and that
    /// is smaller at the target than at the source.
    Monotone {
        #[serde(with = "crate::intlin::bigint_vec_serde")]
        weights: Vec<BigInt>,
    },
    /// The projection has finitely many reachable configurations, at most
    /// `states`, none equal to the target.
    ForwardExhaustion { states: usize },
    /// Finitely many configurations, at most `states`, reach the projected
    /// target, and the source is not among them.
    BackwardExhaustion { states: usize },
}

/// A checkable reason why `target` is unreachable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnreachProof {
    pub target: Config,
    /// The coordinates the proof projects onto.
    pub coords: Vec<usize>,
    #[serde(flatten)]
    pub method: ProofMethod,
}

/// Coordinates that can ever become positive, and transitions that can ever fire.
pub(crate) fn support_fixpoint(vas: &Vas) -> (Vec<bool>, Vec<bool>) {
    let mut positive: Vec<bool> = vas.source().iter().map(Signed::is_positive).collect();
    let mut live = vec![false; vas.transitions().len()];
    loop {
        let mut changed = false;
        for (k, t) in vas.transitions().iter().enumerate() {
            if live[k] || t.iter().enumerate().any(|(i, x)| x.is_negative() && !positive[i]) {
                continue;
            }
            live[k] = true;
            changed = true;
            for (i, x) in t.iter().enumerate() {
                if x.is_positive() {
                    positive[i] = true;
                }
            }
        }
        if !changed {
            return (positive, live);
        }
    }
}

/// Projected source and nonzero projected live transitions.
fn projection(vas: &Vas, live: &[bool], coords: &[usize]) -> Result<(IntVector, IntMatrix)> {
    let ts = vas.transitions().iter().zip(live).filter(|(_, &l)| l).map(|(t, _)| t.project(coords)).filter(|t| !t.is_zero()).collect();
    Ok((vas.source().project(coords), IntMatrix::new(coords.len(), ts)?))
}

/// Coordinate blocks connected through the supports of live transitions.
fn components(vas: &Vas, live: &[bool]) -> Vec<Vec<usize>> {
    let d = vas.dim();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (t, _) in vas.transitions().iter().zip(live).filter(|(_, &l)| l) {
        let supp = t.support();
        for w in supp.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..d {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

struct Component {
    coords: Vec<usize>,
    src: IntVector,
    ts: IntMatrix,
    basis: LatticeBasis,
    compact: Option<Compact>,
    /// `Some(reachable set)` once a forward exhaustion succeeded; `None` inside
    /// the outer option once it was attempted and failed.
    forward: Option<Option<std::collections::HashSet<Vec<i64>>>>,
    backward: HashMap<Vec<i64>, Option<usize>>,
}

/// The prover stack for one system, caching per-block work across targets.
pub struct UnreachProver {
    dim: usize,
    positive: Vec<bool>,
    blocks: Vec<Component>,
    opts: ProverOptions,
}

impl UnreachProver {
    pub fn new(vas: &Vas, opts: ProverOptions) -> Result<Self> {
        let (positive, live) = support_fixpoint(vas);
        let mut blocks = Vec::new();
        for coords in components(vas, &live) {
            let (src, ts) = projection(vas, &live, &coords)?;
            let basis = hnf(&ts);
            let compact = Compact::of_parts(&src, &ts);
            blocks.push(Component { coords, src, ts, basis, compact, forward: None, backward: HashMap::new() });
        }
        Ok(UnreachProver { dim: vas.dim(), positive, blocks, opts })
    }

    /// A proof that `target` is unreachable, if some prover finds one.
    pub fn prove(&mut self, target: &Config) -> Result<Option<UnreachProof>> {
        check_dim(self.dim, target.dim())?;
        let proof = |coords: &[usize], method| Some(UnreachProof { target: target.clone(), coords: coords.to_vec(), method });
        if let Some(i) = (0..self.dim).find(|&i| target[i].is_positive() && !self.positive[i]) {
            return Ok(proof(&[i], ProofMethod::Support { coord: i }));
        }
        let diffs: Vec<IntVector> = self.blocks.iter().map(|b| &target.project(&b.coords) - &b.src).collect();
        for (b, diff) in self.blocks.iter().zip(&diffs) {
            if !diff.is_zero() && !b.basis.contains(diff) {
                return Ok(proof(&b.coords, ProofMethod::Lattice));
            }
        }
        for &m in &self.opts.moduli {
            for (b, diff) in self.blocks.iter().zip(&diffs) {
                if !diff.is_zero() && !mod_lattice_member(diff, &b.ts, m)? {
                    return Ok(proof(&b.coords, ProofMethod::Residue { modulus: m }));
                }
            }
        }
        for (b, diff) in self.blocks.iter().zip(&diffs) {
            if let Some(weights) = monotone_weights(diff, &b.ts) {
                return Ok(proof(&b.coords, ProofMethod::Monotone { weights }));
            }
        }
        let fwd = self.opts.forward_budget;
        for (b, diff) in self.blocks.iter_mut().zip(&diffs) {
            let (Some(c), false) = (&b.compact, diff.is_zero()) else { continue };
            let reach = b.forward.get_or_insert_with(|| {
                let ex = explore(c, fwd, None, |_| false);
                ex.report.complete().then(|| ex.index.into_keys().collect())
            });
            if let Some(set) = reach {
                let t = target.project(&b.coords).to_i64s();
                if t.is_none_or(|t| !set.contains(&t)) {
                    return Ok(proof(&b.coords, ProofMethod::ForwardExhaustion { states: set.len() }));
                }
            }
        }
        let bwd = self.opts.backward_budget;
        for (b, diff) in self.blocks.iter_mut().zip(&diffs) {
            let (Some(c), false) = (&b.compact, diff.is_zero()) else { continue };
            let Some(t) = target.project(&b.coords).to_i64s() else { continue };
            let res = *b.backward.entry(t.clone()).or_insert_with(|| backward_exhausts(c, &t, bwd));
            if let Some(states) = res {
                return Ok(proof(&b.coords, ProofMethod::BackwardExhaustion { states }));
            }
        }
        Ok(None)
    }
}

fn dot(w: &[BigInt], v: &IntVector) -> BigInt {
    w.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

fn monotone_holds(weights: &[BigInt], diff: &IntVector, ts: &IntMatrix) -> bool {
    weights.len() == diff.dim() && dot(weights, diff).is_negative() && ts.columns().iter().all(|t| !dot(weights, t).is_negative())
}

/// Integer weights `y` with `y . t >= 0` for every transition and
/// `y . diff < 0`, searched by linear programming and checked exactly.
fn monotone_weights(diff: &IntVector, ts: &IntMatrix) -> Option<Vec<BigInt>> {
    const BOX: f64 = 100.0;
    if diff.is_zero() {
        return None;
    }
    let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let ys: Vec<_> = (0..diff.dim()).map(|_| lp.add_var(0.0, (-BOX, BOX))).collect();
    for t in ts.columns() {
        let terms: Vec<_> = ys.iter().zip(t.iter()).filter(|(_, x)| !x.is_zero()).map(|(&y, x)| (y, f(x))).collect();
        if !terms.is_empty() {
            lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
        }
    }
    let terms: Vec<_> = ys.iter().zip(diff.iter()).map(|(&y, x)| (y, f(x))).collect();
    lp.add_constraint(terms.as_slice(), ComparisonOp::Le, -1.0);
    let outcome = lp.solve().ok()?;
    let sol = outcome.solution()?;
    let values: Vec<f64> = ys.iter().map(|&y| sol.var_value(y)).collect();
    // vertices have small denominators
    (1..=720).find_map(|k| {
        let w: Vec<BigInt> = values.iter().map(|v| BigInt::from((v * k as f64).round() as i64)).collect();
        monotone_holds(&w, diff, ts).then_some(w)
    })
}

/// Runs the prover stack once per target.
pub fn prove_targets(vas: &Vas, targets: &[Config], opts: &ProverOptions) -> Result<Vec<Option<UnreachProof>>> {
    let mut p = UnreachProver::new(vas, opts.clone())?;
    targets.iter().map(|t| p.prove(t)).collect()
}

/// Re-checks a proof from scratch against `vas`.
pub fn verify_unreach_proof(vas: &Vas, proof: &UnreachProof) -> bool {
    check(vas, proof).unwrap_or(false)
}

fn check(vas: &Vas, proof: &UnreachProof) -> Result<bool> {
    let t = &proof.target;
    check_dim(vas.dim(), t.dim())?;
    if !t.is_nonneg() || proof.coords.iter().any(|&i| i >= vas.dim()) {
        return Ok(false);
    }
    let (positive, live) = support_fixpoint(vas);
    if let ProofMethod::Support { coord } = proof.method {
        return Ok(coord < vas.dim() && t[coord].is_positive() && !positive[coord]);
    }
    let (src, ts) = projection(vas, &live, &proof.coords)?;
    let tp = t.project(&proof.coords);
    let diff = &tp - &src;
    if diff.is_zero() {
        return Ok(false);
    }
    Ok(match proof.method {
        ProofMethod::Support { .. } => unreachable!("handled above"),
        ProofMethod::Lattice => !hnf(&ts).contains(&diff),
        ProofMethod::Residue { modulus } => modulus >= 1 && !mod_lattice_member(&diff, &ts, modulus)?,
        ProofMethod::Monotone { ref weights } => monotone_holds(weights, &diff, &ts),
        ProofMethod::ForwardExhaustion { states } => {
            let Some(c) = Compact::of_parts(&src, &ts) else { return Ok(false) };
            let target = tp.to_i64s();
            let ex = explore(&c, states.max(1), None, |x| target.as_deref() == Some(x));
            ex.hit.is_none() && ex.report.complete()
        }
        ProofMethod::BackwardExhaustion { states } => {
            let (Some(c), Some(target)) = (Compact::of_parts(&src, &ts), tp.to_i64s()) else { return Ok(false) };
            backward_exhausts(&c, &target, states.max(1)).is_some()
        }
    })
}
