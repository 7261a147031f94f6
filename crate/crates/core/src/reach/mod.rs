//! Reachability sub-procedures: bounded forward search, sound unreachability
//! provers, and the pair instances used by the separator search.

mod pair;
mod prover;
pub(crate) mod search;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin::Config;
use crate::vas::{Run, Vas};

pub use pair::{
    block_target, class_block, class_block_for, class_range, class_representatives, modpair_instance, small_mask, unary_class_of,
    unarypair_instance, PairInstance, DEFAULT_MAX_TARGETS,
};
pub use prover::{prove_targets, verify_unreach_proof, ProofMethod, ProverOptions, UnreachProof, UnreachProver, DEFAULT_MODULI};
pub use search::SearchReport;

/// A system and a finite set of targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachInstance {
    pub vas: Vas,
    pub targets: Vec<Config>,
}

impl ReachInstance {
    pub fn new(vas: Vas, targets: Vec<Config>) -> Result<Self> {
        for t in &targets {
            check_dim(vas.dim(), t.dim())?;
            if !t.is_nonneg() {
                return Err(Error::NegativeEntry("reachability target"));
            }
        }
        Ok(ReachInstance { vas, targets })
    }
}

/// Limits of a forward search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_states: usize,
    /// Successors with an entry above the cap are dropped.
    pub coord_cap: Option<i64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_states: 100_000, coord_cap: None }
    }
}

/// Three-valued answer of the reachability oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum OracleAnswer {
    /// A validated run, given by transition indices, ending in `target`.
    Found {
        run: Vec<usize>,
        target: Config,
    },
    /// One proof per target, in target order.
    ProvedEmpty {
        proofs: Vec<UnreachProof>,
    },
    Unknown {
        report: SearchReport,
    },
}

/// Breadth-first search from the source for any target.
///
/// `ProvedEmpty` is returned only when the search exhausted every
/// configuration with nothing dropped by the cap or by overflow.
pub fn forward_search(inst: &ReachInstance, budget: SearchBudget) -> Result<OracleAnswer> {
    if budget.max_states == 0 {
        return Err(Error::Precondition("search budget must be positive".into()));
    }
    let Some(c) = search::Compact::of_vas(&inst.vas) else {
        return Ok(OracleAnswer::Unknown { report: SearchReport { overflow: true, ..Default::default() } });
    };
    let targets: HashMap<Vec<i64>, usize> = inst.targets.iter().enumerate().filter_map(|(i, t)| Some((t.to_i64s()?, i))).collect();
    let ex = search::explore(&c, budget.max_states, budget.coord_cap, |x| targets.contains_key(x));
    if let Some(h) = ex.hit {
        let labels = ex.labels(h);
        let run = Run::from_labels(&inst.vas, &labels)?;
        let target = run.target().clone();
        return Ok(OracleAnswer::Found { run: labels, target });
    }
    if ex.report.complete() && targets.len() == inst.targets.len() {
        let coords: Vec<usize> = (0..inst.vas.dim()).collect();
        let proofs = inst
            .targets
            .iter()
            .map(|t| UnreachProof {
                target: t.clone(),
                coords: coords.clone(),
                method: ProofMethod::ForwardExhaustion { states: ex.report.explored },
            })
            .collect();
        return Ok(OracleAnswer::ProvedEmpty { proofs });
    }
    Ok(OracleAnswer::Unknown { report: ex.report })
}

/// The prover stack applied to every target.
pub fn prove_unreach(inst: &ReachInstance, opts: &ProverOptions) -> Result<Vec<Option<UnreachProof>>> {
    prove_targets(&inst.vas, &inst.targets, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;

    fn triangle() -> Vas {
        Vas::new(3, ivec![1, 0, 0], vec![ivec![-1, 2, 1], ivec![2, -1, 1]]).unwrap()
    }

    #[test]
    fn triangle_found() {
        let inst = ReachInstance::new(triangle(), vec![ivec![2, 1, 2]]).unwrap();
        let ans = forward_search(&inst, SearchBudget::default()).unwrap();
        assert_eq!(ans, OracleAnswer::Found { run: vec![0, 1], target: ivec![2, 1, 2] });
    }

    #[test]
    fn triangle_zero_never_found() {
        let inst = ReachInstance::new(triangle(), vec![ivec![0, 0, 0]]).unwrap();
        let ans = forward_search(&inst, SearchBudget { max_states: 2000, coord_cap: None }).unwrap();
        assert!(matches!(ans, OracleAnswer::Unknown { .. }));
        let ans = forward_search(&inst, SearchBudget { max_states: 2000, coord_cap: Some(5) }).unwrap();
        assert!(matches!(ans, OracleAnswer::Unknown { report } if report.cap_pruned));
        let proofs = prove_unreach(&inst, &ProverOptions::default()).unwrap();
        assert_eq!(proofs[0].as_ref().unwrap().method, ProofMethod::Lattice);
    }

    #[test]
    fn empty_run_and_exhaustion() {
        let v = Vas::new(2, ivec![1, 2], vec![]).unwrap();
        let inst = ReachInstance::new(v.clone(), vec![ivec![1, 2]]).unwrap();
        assert_eq!(forward_search(&inst, SearchBudget::default()).unwrap(), OracleAnswer::Found { run: vec![], target: ivec![1, 2] });
        let inst = ReachInstance::new(v.clone(), vec![ivec![0, 0]]).unwrap();
        let OracleAnswer::ProvedEmpty { proofs } = forward_search(&inst, SearchBudget::default()).unwrap() else {
            panic!("expected exhaustion")
        };
        assert!(verify_unreach_proof(&v, &proofs[0]));
        assert!(ReachInstance::new(v, vec![ivec![-1, 0]]).is_err());
    }

    #[test]
    fn answer_json() {
        let a = OracleAnswer::Found { run: vec![0], target: ivec![1] };
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"answer":"found","run":[0],"target":[1]}"#);
        let p = UnreachProof { target: ivec![3], coords: vec![0], method: ProofMethod::Residue { modulus: 2 } };
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"target":[3],"coords":[0],"prover":"residue","modulus":2}"#);
    }
}
