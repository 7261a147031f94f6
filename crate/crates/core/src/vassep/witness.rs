//! Enumeration of witness linear sets from runs of a normalized system.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsets::LinearSet;
use crate::reach::search::{step, Compact, Step};
use crate::vas::{pump_linear, run_embeds, Run, Vas};

/// A base run and pump runs, each ending in the expansion, with the base
/// embedded in every pump. It induces the linear set
/// `{target(base)} + Lin>=0({target(pump) - target(base)})` on the kept coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub base: Run,
    pub pumps: Vec<Run>,
    pub linear: LinearSet,
}

/// Transition-index form of a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessRuns {
    pub base_run: Vec<usize>,
    pub pump_runs: Vec<Vec<usize>>,
}

impl Witness {
    pub fn runs(&self) -> WitnessRuns {
        WitnessRuns { base_run: self.base.labels().to_vec(), pump_runs: self.pumps.iter().map(|p| p.labels().to_vec()).collect() }
    }

    /// Replays and checks a witness given by transition indices.
    pub fn replay(vas: &Vas, arity: usize, runs: &WitnessRuns) -> Result<Witness> {
        let base = Run::from_labels(vas, &runs.base_run)?;
        let pumps = runs.pump_runs.iter().map(|l| Run::from_labels(vas, l)).collect::<Result<Vec<_>>>()?;
        let in_expansion = |r: &Run| r.target().iter().skip(arity).all(num_traits::Zero::is_zero);
        if !in_expansion(&base) || !pumps.iter().all(in_expansion) {
            return Err(Error::Precondition("a witness run ends outside the expansion".into()));
        }
        if !pumps.iter().all(|p| run_embeds(&base, p)) {
            return Err(Error::Precondition("a pump run does not embed the base run".into()));
        }
        let keep: Vec<usize> = (0..arity).collect();
        let periods = pumps.iter().map(|p| (p.target() - base.target()).project(&keep)).collect();
        let linear = LinearSet::new(base.target().project(&keep), periods)?;
        Ok(Witness { base, pumps, linear })
    }

    /// A run reaching `base + Σ coeffs_i (pump_i - base)`, built by pumping.
    pub fn member_run(&self, vas: &Vas, coeffs: &[num_bigint::BigInt]) -> Result<Run> {
        pump_linear(vas, &self.base, &self.pumps, coeffs)
    }
}

struct Node {
    parent: Option<usize>,
    label: usize,
    config: Vec<i64>,
}

/// A finite run path in machine integers.
struct Path {
    labels: Vec<usize>,
    configs: Vec<Vec<i64>>,
}

fn le(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Greedy leftmost embedding test, as in the run order of the `vas` module.
fn embeds(rho: &Path, sigma: &Path) -> bool {
    if rho.labels.len() > sigma.labels.len() || !le(rho.configs.last().unwrap(), sigma.configs.last().unwrap()) {
        return false;
    }
    let mut j = 0;
    for i in 0..rho.labels.len() {
        loop {
            if j >= sigma.labels.len() {
                return false;
            }
            let hit = rho.labels[i] == sigma.labels[j]
                && le(&rho.configs[i], &sigma.configs[j])
                && le(&rho.configs[i + 1], &sigma.configs[j + 1]);
            j += 1;
            if hit {
                break;
            }
        }
    }
    true
}

/// Limits of witness enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessLimits {
    /// Longest run considered.
    pub max_run_len: usize,
    /// Nodes of the run tree.
    pub max_runs: usize,
    /// Pumps per witness.
    pub max_pumps: usize,
}

impl Default for WitnessLimits {
    fn default() -> Self {
        WitnessLimits { max_run_len: 12, max_runs: 20_000, max_pumps: 4 }
    }
}

/// Enumerates witnesses by increasing run length.
///
/// Runs are kept in a tree, one level per length. After each level, every
/// run ending in the expansion serves as a base together with up to
/// `max_pumps` of the shortest runs that embed it with distinct nonzero
/// increments. A witness is emitted when its linear set is new.
pub struct WitnessEnumerator {
    vas: Vas,
    arity: usize,
    limits: WitnessLimits,
    compact: Option<Compact>,
    nodes: Vec<Node>,
    layer: Vec<usize>,
    depth: usize,
    started: bool,
    good: Vec<Path>,
    seen: HashSet<LinearSet>,
    exhausted: bool,
    truncated: bool,
}

impl WitnessEnumerator {
    pub fn new(vas: &Vas, arity: usize, limits: WitnessLimits) -> Self {
        let compact = Compact::of_vas(vas);
        let nodes = compact.iter().map(|c| Node { parent: None, label: 0, config: c.src.clone() }).collect();
        WitnessEnumerator {
            vas: vas.clone(),
            arity,
            limits,
            exhausted: compact.is_none(),
            truncated: compact.is_none(),
            compact,
            nodes,
            layer: vec![0],
            depth: 0,
            started: false,
            good: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// Length of the longest runs explored so far.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// No further levels will be produced.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Some run was cut off by a limit, so the enumeration is incomplete.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn emitted(&self) -> usize {
        self.seen.len()
    }

    fn path(&self, mut i: usize) -> Path {
        let mut labels = Vec::new();
        let mut configs = vec![self.nodes[i].config.clone()];
        while let Some(p) = self.nodes[i].parent {
            labels.push(self.nodes[i].label);
            configs.push(self.nodes[p].config.clone());
            i = p;
        }
        labels.reverse();
        configs.reverse();
        Path { labels, configs }
    }

    fn good_config(&self, c: &[i64]) -> bool {
        c[self.arity..].iter().all(|&x| x == 0)
    }

    /// Explores one more level and returns the witnesses that became new.
    pub fn grow(&mut self) -> Result<Vec<Witness>> {
        if self.exhausted {
            return Ok(Vec::new());
        }
        let Some(c) = self.compact.as_ref() else { return Ok(Vec::new()) };
        let fresh = if !self.started {
            self.started = true;
            self.layer.clone()
        } else {
            if self.depth >= self.limits.max_run_len {
                self.exhausted = true;
                self.truncated = true;
                return Ok(Vec::new());
            }
            let mut next = Vec::new();
            'outer: for &i in &self.layer {
                for (l, t) in c.ts.iter().enumerate() {
                    match step(&self.nodes[i].config, t) {
                        Step::Next(cfg) => {
                            if self.nodes.len() >= self.limits.max_runs {
                                self.truncated = true;
                                self.exhausted = true;
                                break 'outer;
                            }
                            self.nodes.push(Node { parent: Some(i), label: l, config: cfg });
                            next.push(self.nodes.len() - 1);
                        }
                        Step::Disabled => {}
                        Step::Overflow => self.truncated = true,
                    }
                }
            }
            self.depth += 1;
            if next.is_empty() {
                self.exhausted = true;
            }
            self.layer = next.clone();
            next
        };
        let new_good: Vec<Path> = fresh.into_iter().filter(|&i| self.good_config(&self.nodes[i].config)).map(|i| self.path(i)).collect();
        if new_good.is_empty() {
            return Ok(Vec::new());
        }
        let old = self.good.len();
        self.good.extend(new_good);
        let mut out = Vec::new();
        for b in 0..self.good.len() {
            // older bases only change if some new run embeds them
            if b < old && !(old..self.good.len()).any(|p| embeds(&self.good[b], &self.good[p])) {
                continue;
            }
            if let Some(w) = self.witness_for(b)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    fn witness_for(&mut self, b: usize) -> Result<Option<Witness>> {
        let base = &self.good[b];
        let bt = base.configs.last().unwrap();
        let mut incs: Vec<Vec<i64>> = Vec::new();
        let mut pumps = Vec::new();
        for (p, cand) in self.good.iter().enumerate() {
            if pumps.len() >= self.limits.max_pumps {
                break;
            }
            if p == b || !embeds(base, cand) {
                continue;
            }
            let inc: Vec<i64> = cand.configs.last().unwrap().iter().zip(bt).map(|(x, y)| x - y).collect();
            if inc.iter().all(|&x| x == 0) || incs.contains(&inc) {
                continue;
            }
            incs.push(inc);
            pumps.push(p);
        }
        let runs = WitnessRuns { base_run: base.labels.clone(), pump_runs: pumps.iter().map(|&p| self.good[p].labels.clone()).collect() };
        let w = Witness::replay(&self.vas, self.arity, &runs)?;
        Ok(self.seen.insert(w.linear.clone()).then_some(w))
    }
}

/// Every witness emitted within the limits, in emission order.
pub fn enumerate_witnesses(vas: &Vas, arity: usize, limits: WitnessLimits) -> Result<Vec<Witness>> {
    let mut e = WitnessEnumerator::new(vas, arity, limits);
    let mut out = Vec::new();
    while !e.is_exhausted() {
        out.extend(e.grow()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;

    #[test]
    fn counter_witnesses() {
        let v = Vas::new(1, ivec![0], vec![ivec![1]]).unwrap();
        let ws = enumerate_witnesses(&v, 1, WitnessLimits { max_run_len: 4, ..Default::default() }).unwrap();
        assert!(ws.iter().any(|w| w.linear.base() == &ivec![0] && w.linear.periods().contains(&ivec![1])));
        assert!(ws.iter().all(|w| w.pumps.iter().all(|p| run_embeds(&w.base, p))));
    }

    #[test]
    fn no_transitions() {
        let v = Vas::new(2, ivec![1, 2], vec![]).unwrap();
        let ws = enumerate_witnesses(&v, 2, WitnessLimits::default()).unwrap();
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].linear, LinearSet::singleton(ivec![1, 2]).unwrap());
        assert!(ws[0].pumps.is_empty());
    }

    #[test]
    fn triangle_bases_satisfy_invariant() {
        let v = Vas::new(3, ivec![1, 0, 0], vec![ivec![-1, 2, 1], ivec![2, -1, 1]]).unwrap();
        let ws = enumerate_witnesses(&v, 3, WitnessLimits { max_run_len: 6, ..Default::default() }).unwrap();
        assert!(!ws.is_empty());
        for w in &ws {
            let b = w.linear.base().to_i64s().unwrap();
            assert_eq!(b[0] + b[1], b[2] + 1);
        }
    }

    #[test]
    fn off_expansion_runs_are_not_bases() {
        // the second coordinate must return to zero
        let v = Vas::new(2, ivec![0, 0], vec![ivec![0, 1], ivec![1, -1]]).unwrap();
        let ws = enumerate_witnesses(&v, 1, WitnessLimits { max_run_len: 4, ..Default::default() }).unwrap();
        for w in &ws {
            assert!(w.base.target()[1] == 0.into());
        }
        assert!(ws.iter().any(|w| w.linear.periods().contains(&ivec![1])));
    }

    #[test]
    fn replay_rejects_bad_embedding() {
        let v = Vas::new(1, ivec![0], vec![ivec![1], ivec![2]]).unwrap();
        let ok = WitnessRuns { base_run: vec![0], pump_runs: vec![vec![0, 1]] };
        assert!(Witness::replay(&v, 1, &ok).is_ok());
        let bad = WitnessRuns { base_run: vec![0], pump_runs: vec![vec![1, 1]] };
        assert!(Witness::replay(&v, 1, &bad).is_err());
    }
}
