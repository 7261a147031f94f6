//! Vector addition systems (with states), runs, the run embedding order,
//! pumping, sections and model translations.

mod construct;
mod run;
mod section;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin::{Config, IntVector};

pub use construct::{hardness_instance, normalize_pair, section_intersection, section_union, vass_to_vas, Gadget, NormalizedPair};
pub use run::{embedding, increment, pump_compose, pump_linear, run_embeds, validate_run, Run};
pub use section::{SectionSpec, SectionedVas};

/// A VAS `(s, T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VasRepr", into = "VasRepr")]
pub struct Vas {
    dim: usize,
    source: Config,
    transitions: Vec<IntVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VasRepr {
    dim: usize,
    source: Config,
    #[serde(default)]
    transitions: Vec<IntVector>,
}

impl TryFrom<VasRepr> for Vas {
    type Error = Error;
    fn try_from(r: VasRepr) -> Result<Self> {
        Vas::new(r.dim, r.source, r.transitions)
    }
}

impl From<Vas> for VasRepr {
    fn from(v: Vas) -> Self {
        VasRepr { dim: v.dim, source: v.source, transitions: v.transitions }
    }
}

impl Vas {
    pub fn new(dim: usize, source: Config, transitions: Vec<IntVector>) -> Result<Self> {
        check_dim(dim, source.dim())?;
        if !source.is_nonneg() {
            return Err(Error::NegativeEntry("VAS source"));
        }
        for t in &transitions {
            check_dim(dim, t.dim())?;
        }
        Ok(Vas { dim, source, transitions })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &Config {
        &self.source
    }

    pub fn transitions(&self) -> &[IntVector] {
        &self.transitions
    }

    /// The same system with coordinates permuted: new coordinate `j` is old `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<Vas> {
        let mut seen = vec![false; self.dim];
        if order.len() != self.dim || order.iter().any(|&i| i >= self.dim || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Precondition("coordinate order is not a permutation".into()));
        }
        Vas::new(self.dim, self.source.project(order), self.transitions.iter().map(|t| t.project(order)).collect())
    }

    /// Appends `extra` zero coordinates.
    pub fn pad(&self, extra: usize) -> Vas {
        let z = IntVector::zeros(extra);
        Vas { dim: self.dim + extra, source: self.source.concat(&z), transitions: self.transitions.iter().map(|t| t.concat(&z)).collect() }
    }
}

/// A transition `(from, delta, to)` of a VASS, with states by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VassTransition {
    pub from: usize,
    pub delta: IntVector,
    pub to: usize,
}

/// A VASS `(s, T, Q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VassRepr", into = "VassRepr")]
pub struct Vass {
    dim: usize,
    states: Vec<String>,
    initial: usize,
    source: Config,
    transitions: Vec<VassTransition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VassRepr {
    dim: usize,
    states: Vec<String>,
    initial: String,
    source: Config,
    #[serde(default)]
    transitions: Vec<(String, IntVector, String)>,
}

impl TryFrom<VassRepr> for Vass {
    type Error = Error;
    fn try_from(r: VassRepr) -> Result<Self> {
        let index: BTreeMap<&str, usize> = r.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != r.states.len() {
            return Err(Error::InvalidSystem("duplicate state name".into()));
        }
        let look = |s: &str| index.get(s).copied().ok_or_else(|| Error::InvalidSystem(format!("unknown state {s:?}")));
        let initial = look(&r.initial)?;
        let transitions = r
            .transitions
            .iter()
            .map(|(f, d, t)| Ok(VassTransition { from: look(f)?, delta: d.clone(), to: look(t)? }))
            .collect::<Result<Vec<_>>>()?;
        Vass::new(r.dim, r.states.clone(), initial, r.source, transitions)
    }
}

impl From<Vass> for VassRepr {
    fn from(v: Vass) -> Self {
        VassRepr {
            dim: v.dim,
            initial: v.states[v.initial].clone(),
            source: v.source,
            transitions: v.transitions.iter().map(|t| (v.states[t.from].clone(), t.delta.clone(), v.states[t.to].clone())).collect(),
            states: v.states,
        }
    }
}

impl Vass {
    pub fn new(dim: usize, states: Vec<String>, initial: usize, source: Config, transitions: Vec<VassTransition>) -> Result<Self> {
        check_dim(dim, source.dim())?;
        if !source.is_nonneg() {
            return Err(Error::NegativeEntry("VASS source"));
        }
        if initial >= states.len() {
            return Err(Error::InvalidSystem("initial state out of range".into()));
        }
        for t in &transitions {
            check_dim(dim, t.delta.dim())?;
            if t.from >= states.len() || t.to >= states.len() {
                return Err(Error::InvalidSystem("transition refers to a missing state".into()));
            }
        }
        Ok(Vass { dim, states, initial, source, transitions })
    }

    /// Builds a VASS from state names; states are listed in order of first use.
    pub fn from_named(dim: usize, initial: &str, source: Config, transitions: &[(&str, IntVector, &str)]) -> Result<Self> {
        let mut states = vec![initial.to_string()];
        let idx = |s: &str, states: &mut Vec<String>| match states.iter().position(|x| x == s) {
            Some(i) => i,
            None => {
                states.push(s.to_string());
                states.len() - 1
            }
        };
        let mut ts = Vec::new();
        for (f, d, t) in transitions {
            let from = idx(f, &mut states);
            let to = idx(t, &mut states);
            ts.push(VassTransition { from, delta: d.clone(), to });
        }
        Vass::new(dim, states, 0, source, ts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn source(&self) -> &Config {
        &self.source
    }

    pub fn transitions(&self) -> &[VassTransition] {
        &self.transitions
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states.iter().position(|s| s == name).ok_or_else(|| Error::InvalidSystem(format!("unknown state {name:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;

    #[test]
    fn vas_json() {
        let text = r#"{"dim":3,"source":[1,0,0],"transitions":[[-1,2,1],[2,-1,1]]}"#;
        let v: Vas = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), text);
        assert!(serde_json::from_str::<Vas>(r#"{"dim":2,"source":[1,0,0]}"#).is_err());
        assert!(serde_json::from_str::<Vas>(r#"{"dim":1,"source":[-1]}"#).is_err());
    }

    #[test]
    fn vass_json() {
        let text = r#"{"dim":1,"states":["p","q"],"initial":"p","source":[0],"transitions":[["p",[1],"q"]]}"#;
        let v: Vass = serde_json::from_str(text).unwrap();
        assert_eq!(v.transitions()[0].to, 1);
        assert_eq!(serde_json::to_string(&v).unwrap(), text);
        let bad = r#"{"dim":1,"states":["p"],"initial":"p","source":[0],"transitions":[["p",[1],"r"]]}"#;
        assert!(serde_json::from_str::<Vass>(bad).is_err());
    }

    #[test]
    fn permute_and_pad() {
        let v = Vas::new(2, ivec![1, 2], vec![ivec![-1, 3]]).unwrap();
        let p = v.permute(&[1, 0]).unwrap();
        assert_eq!(p.source(), &ivec![2, 1]);
        assert_eq!(p.transitions()[0], ivec![3, -1]);
        assert!(v.permute(&[0, 0]).is_err());
        assert_eq!(v.pad(1).source(), &ivec![1, 2, 0]);
    }
}
