//! Breadth-first exploration over machine integers.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::intlin::IntMatrix;
use crate::vas::Vas;

/// Machine-integer copy of a system.
#[derive(Clone, Debug)]
pub(crate) struct Compact {
    pub src: Vec<i64>,
    pub ts: Vec<Vec<i64>>,
}

impl Compact {
    pub fn of_vas(vas: &Vas) -> Option<Compact> {
        let src = vas.source().to_i64s()?;
        let ts = vas.transitions().iter().map(|t| t.to_i64s()).collect::<Option<Vec<_>>>()?;
        Some(Compact { src, ts })
    }

    pub fn of_parts(src: &crate::intlin::IntVector, ts: &IntMatrix) -> Option<Compact> {
        let src = src.to_i64s()?;
        let ts = ts.columns().iter().map(|t| t.to_i64s()).collect::<Option<Vec<_>>>()?;
        Some(Compact { src, ts })
    }
}

/// Outcome of one step: the next configuration, a disabled step, or overflow.
pub(crate) enum Step {
    Next(Vec<i64>),
    Disabled,
    Overflow,
}

pub(crate) fn step(c: &[i64], t: &[i64]) -> Step {
    let mut out = Vec::with_capacity(c.len());
    for (a, b) in c.iter().zip(t) {
        match a.checked_add(*b) {
            Some(x) if x < 0 => return Step::Disabled,
            Some(x) => out.push(x),
            None => return Step::Overflow,
        }
    }
    Step::Next(out)
}

/// Statistics of a bounded search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Distinct configurations stored.
    pub explored: usize,
    /// Whether every successor of every stored configuration was examined.
    pub exhausted: bool,
    /// Whether some successor was dropped for exceeding the coordinate cap.
    pub cap_pruned: bool,
    /// Whether some successor could not be represented.
    pub overflow: bool,
}

impl SearchReport {
    /// Exhaustion with nothing dropped: the stored set is the whole reachability set.
    pub fn complete(&self) -> bool {
        self.exhausted && !self.cap_pruned && !self.overflow
    }
}

/// A breadth-first tree of configurations with parent links.
pub(crate) struct Explored {
    pub configs: Vec<Vec<i64>>,
    parent: Vec<Option<(usize, usize)>>,
    pub index: HashMap<Vec<i64>, usize>,
    pub report: SearchReport,
    /// The first stored configuration accepted by the stop predicate.
    pub hit: Option<usize>,
}

impl Explored {
    pub fn labels(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((p, l)) = self.parent[i] {
            out.push(l);
            i = p;
        }
        out.reverse();
        out
    }
}

/// Explores from `c.src` storing at most `max_states` configurations, stopping
/// early at the first configuration accepted by `stop`.
pub(crate) fn explore(c: &Compact, max_states: usize, cap: Option<i64>, mut stop: impl FnMut(&[i64]) -> bool) -> Explored {
    let mut ex = Explored {
        configs: vec![c.src.clone()],
        parent: vec![None],
        index: HashMap::from([(c.src.clone(), 0)]),
        report: SearchReport::default(),
        hit: None,
    };
    if stop(&c.src) {
        ex.hit = Some(0);
        ex.report.explored = 1;
        return ex;
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (l, t) in c.ts.iter().enumerate() {
            let next = match step(&ex.configs[i], t) {
                Step::Next(n) => n,
                Step::Disabled => continue,
                Step::Overflow => {
                    ex.report.overflow = true;
                    continue;
                }
            };
            if cap.is_some_and(|m| next.iter().any(|&x| x > m)) {
                ex.report.cap_pruned = true;
                continue;
            }
            if ex.index.contains_key(&next) {
                continue;
            }
            if ex.configs.len() >= max_states {
                ex.report.explored = ex.configs.len();
                return ex;
            }
            let j = ex.configs.len();
            ex.index.insert(next.clone(), j);
            ex.configs.push(next);
            ex.parent.push(Some((i, l)));
            if stop(&ex.configs[j]) {
                ex.hit = Some(j);
                ex.report.explored = ex.configs.len();
                return ex;
            }
            queue.push_back(j);
        }
    }
    ex.report.exhausted = true;
    ex.report.explored = ex.configs.len();
    ex
}

/// Explores backward from `target`: predecessors `c - t` that stay nonnegative.
/// Returns the number of stored configurations if the search exhausts within
/// `max_states` without meeting `src`.
pub(crate) fn backward_exhausts(c: &Compact, target: &[i64], max_states: usize) -> Option<usize> {
    if target == c.src.as_slice() {
        return None;
    }
    let neg: Vec<Vec<i64>> = c.ts.iter().map(|t| t.iter().map(|x| x.checked_neg()).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?;
    let mut seen = HashSet::from([target.to_vec()]);
    let mut queue = VecDeque::from([target.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for t in &neg {
            let prev = match step(&x, t) {
                Step::Next(p) => p,
                Step::Disabled => continue,
                Step::Overflow => return None,
            };
            if prev == c.src {
                return None;
            }
            if seen.contains(&prev) {
                continue;
            }
            if seen.len() >= max_states {
                return None;
            }
            seen.insert(prev.clone());
            queue.push_back(prev);
        }
    }
    Some(seen.len())
}
