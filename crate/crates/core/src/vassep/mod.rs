//! Deciding modular and unary separability of two sections.
//!
//! Two semi-procedures run in alternating work quanta:
//!
//! * positive: for `n = 1, 2, ...` every class representative must be shown
//!   unreachable in at least one of the two class blocks (see [`crate::reach`]);
//!   the classes left to the second side form the separator.
//! * negative: witnesses of both expansions are enumerated by run length and
//!   every new pair is tested for nonseparability at the linear level.
//!
//! Both halves are sound, so a certificate from either is final.

mod witness;

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::IntVector;
use crate::linsep::{modular_nonsep_proof, unary_nonsep_proof, verify_proof, Mode, NonSepProof, Separator};
use crate::linsets::{LinearSet, ModularSet, UnarySet};
use crate::reach::search::{explore, Compact};
use crate::reach::{
    block_target, class_block, class_block_for, class_representatives, small_mask, unary_class_of, verify_unreach_proof, ProverOptions,
    UnreachProof, UnreachProver, DEFAULT_MODULI,
};
use crate::vas::{normalize_pair, NormalizedPair, SectionedVas};

pub use witness::{enumerate_witnesses, Witness, WitnessEnumerator, WitnessLimits, WitnessRuns};

/// Work limits of the decision procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Configurations per block exploration and per prover exhaustion attempt.
    pub states_per_quantum: usize,
    /// Largest modulus tried by the positive side.
    pub max_n: u64,
    /// Largest number of class representatives per modulus.
    pub max_targets: usize,
    pub witness: WitnessLimits,
    /// Witness pairs tested per quantum of the negative side.
    pub pairs_per_quantum: usize,
    /// Witness pairs tested in total.
    pub max_witness_pairs: usize,
    /// One worker alternates the two sides; two or more run them concurrently.
    pub workers: usize,
    /// Seeds the order in which new witness pairs are tested.
    pub seed: u64,
    pub moduli: Vec<u64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            states_per_quantum: 10_000,
            max_n: 12,
            max_targets: 4096,
            witness: WitnessLimits::default(),
            pairs_per_quantum: 50,
            max_witness_pairs: 5_000,
            workers: 1,
            seed: 0,
            moduli: DEFAULT_MODULI.to_vec(),
        }
    }
}

impl Budgets {
    fn prover_options(&self) -> ProverOptions {
        ProverOptions { moduli: self.moduli.clone(), forward_budget: self.states_per_quantum, backward_budget: self.states_per_quantum }
    }
}

/// Which block an unreachability proof refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    U,
    V,
}

/// Proof that one side never reaches the class of `class`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProof {
    pub class: Vec<u64>,
    pub side: Side,
    pub proof: UnreachProof,
}

/// What was spent before giving up.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// Largest modulus the positive side attempted.
    pub max_n_tried: u64,
    /// Classes left unproven at the last attempted modulus.
    pub unresolved_classes: usize,
    /// Moduli skipped because of too many class representatives.
    pub skipped_moduli: Vec<u64>,
    pub run_depth_u: usize,
    pub run_depth_v: usize,
    pub witnesses_u: usize,
    pub witnesses_v: usize,
    pub pairs_tested: usize,
}

/// Outcome of [`decide_separability`]; every part is re-checkable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Certificate {
    Separable {
        mode: Mode,
        n: u64,
        separator: Separator,
        proofs: Vec<ClassProof>,
    },
    NotSeparable {
        mode: Mode,
        witness_u: WitnessRuns,
        witness_v: WitnessRuns,
        #[serde(flatten)]
        proof: NonSepProof,
    },
    Unknown {
        mode: Mode,
        report: BudgetReport,
    },
}

impl Certificate {
    pub fn mode(&self) -> Mode {
        match self {
            Certificate::Separable { mode, .. } | Certificate::NotSeparable { mode, .. } | Certificate::Unknown { mode, .. } => *mode,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            Certificate::Separable { .. } => "separable",
            Certificate::NotSeparable { .. } => "not_separable",
            Certificate::Unknown { .. } => "unknown",
        }
    }
}

/// Result of one modulus on the positive side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Attempt {
    Separable(Box<Certificate>),
    /// Both sides reach this class.
    Shared(Vec<u64>),
    /// This many classes could not be closed on either side.
    Unresolved(usize),
    TooManyClasses,
}

fn reached_classes(block: &crate::vas::Vas, targets: &[IntVector], budget: usize) -> Vec<bool> {
    let Some(c) = Compact::of_vas(block) else { return vec![false; targets.len()] };
    let ex = explore(&c, budget, None, |_| false);
    targets.iter().map(|t| t.to_i64s().is_some_and(|t| ex.index.contains_key(&t))).collect()
}

/// One modulus of the positive side.
pub fn attempt_modulus(pair: &NormalizedPair, mode: Mode, n: u64, budgets: &Budgets) -> Result<Attempt> {
    let reps = match class_representatives(mode, pair.arity, n, budgets.max_targets) {
        Ok(r) => r,
        Err(Error::BudgetExceeded { .. }) => return Ok(Attempt::TooManyClasses),
        Err(e) => return Err(e),
    };
    let bu = class_block(&pair.u, pair.arity, mode, n)?;
    let bv = class_block(&pair.v, pair.arity, mode, n)?;
    let targets: Vec<IntVector> = reps.iter().map(|w| block_target(bu.dim(), pair.dim(), mode, w)).collect();
    let ru = reached_classes(&bu, &targets, budgets.states_per_quantum);
    let rv = reached_classes(&bv, &targets, budgets.states_per_quantum);
    if let Some(i) = (0..reps.len()).find(|&i| ru[i] && rv[i]) {
        return Ok(Attempt::Shared(reps[i].clone()));
    }
    // provers per set of pruned coordinates
    let mut provers: HashMap<Vec<bool>, (UnreachProver, UnreachProver)> = HashMap::new();
    let mut proofs = Vec::with_capacity(reps.len());
    for ((w, t), (&u_hit, &v_hit)) in reps.iter().zip(&targets).zip(ru.iter().zip(&rv)) {
        let mask = small_mask(mode, n, w);
        let (pu, pv) = match provers.entry(mask) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let pu = UnreachProver::new(&class_block_for(&pair.u, pair.arity, mode, n, w)?, budgets.prover_options())?;
                let pv = UnreachProver::new(&class_block_for(&pair.v, pair.arity, mode, n, w)?, budgets.prover_options())?;
                e.insert((pu, pv))
            }
        };
        let mut found = None;
        if !u_hit {
            found = pu.prove(t)?.map(|p| (Side::U, p));
        }
        if found.is_none() && !v_hit {
            found = pv.prove(t)?.map(|p| (Side::V, p));
        }
        match found {
            Some((side, proof)) => proofs.push(ClassProof { class: w.clone(), side, proof }),
            None => return Ok(Attempt::Unresolved(reps.len() - proofs.len())),
        }
    }
    let inside: Vec<&Vec<u64>> = proofs.iter().filter(|p| p.side == Side::V).map(|p| &p.class).collect();
    let separator = match mode {
        Mode::Modular => Separator::Modular(ModularSet::new(n, pair.arity, inside.into_iter().cloned().collect())?),
        Mode::Unary => {
            let classes = inside.into_iter().map(|w| unary_class_of(w, n)).collect();
            Separator::Unary(UnarySet::new(n, pair.arity, classes)?)
        }
    };
    Ok(Attempt::Separable(Box::new(Certificate::Separable { mode, n, separator, proofs })))
}

struct Positive<'a> {
    pair: &'a NormalizedPair,
    mode: Mode,
    budgets: &'a Budgets,
    next_n: u64,
    done: bool,
    report: BudgetReport,
}

impl Positive<'_> {
    fn step(&mut self) -> Result<Option<Certificate>> {
        if self.next_n > self.budgets.max_n {
            self.done = true;
            return Ok(None);
        }
        let n = self.next_n;
        self.next_n += 1;
        self.report.max_n_tried = n;
        match attempt_modulus(self.pair, self.mode, n, self.budgets)? {
            Attempt::Separable(c) => return Ok(Some(*c)),
            Attempt::Shared(_) => self.report.unresolved_classes = 0,
            Attempt::Unresolved(k) => self.report.unresolved_classes = k,
            Attempt::TooManyClasses => {
                self.report.skipped_moduli.push(n);
                // more classes for every larger modulus
                self.done = true;
            }
        }
        Ok(None)
    }
}

struct Negative<'a> {
    mode: Mode,
    budgets: &'a Budgets,
    eu: WitnessEnumerator,
    ev: WitnessEnumerator,
    wu: Vec<Witness>,
    wv: Vec<Witness>,
    queue: VecDeque<(usize, usize)>,
    tested: HashSet<(LinearSet, LinearSet)>,
    rng: ChaCha8Rng,
    done: bool,
    report: BudgetReport,
}

impl<'a> Negative<'a> {
    fn new(pair: &NormalizedPair, mode: Mode, budgets: &'a Budgets) -> Self {
        Negative {
            mode,
            budgets,
            eu: WitnessEnumerator::new(&pair.u, pair.arity, budgets.witness),
            ev: WitnessEnumerator::new(&pair.v, pair.arity, budgets.witness),
            wu: Vec::new(),
            wv: Vec::new(),
            queue: VecDeque::new(),
            tested: HashSet::new(),
            rng: ChaCha8Rng::seed_from_u64(budgets.seed),
            done: false,
            report: BudgetReport::default(),
        }
    }

    fn grow(&mut self) -> Result<()> {
        let mut batch = Vec::new();
        for w in self.eu.grow()? {
            let i = self.wu.len();
            self.wu.push(w);
            batch.extend((0..self.wv.len()).map(|j| (i, j)));
        }
        for w in self.ev.grow()? {
            let j = self.wv.len();
            self.wv.push(w);
            batch.extend((0..self.wu.len()).map(|i| (i, j)));
        }
        batch.sort_unstable();
        batch.dedup();
        batch.shuffle(&mut self.rng);
        self.queue.extend(batch);
        self.report.run_depth_u = self.eu.depth();
        self.report.run_depth_v = self.ev.depth();
        self.report.witnesses_u = self.wu.len();
        self.report.witnesses_v = self.wv.len();
        Ok(())
    }

    fn step(&mut self) -> Result<Option<Certificate>> {
        let mut work = 0;
        while work < self.budgets.pairs_per_quantum {
            if self.report.pairs_tested >= self.budgets.max_witness_pairs {
                self.done = true;
                return Ok(None);
            }
            let Some((i, j)) = self.queue.pop_front() else {
                if self.eu.is_exhausted() && self.ev.is_exhausted() {
                    self.done = true;
                    return Ok(None);
                }
                self.grow()?;
                work += 1;
                continue;
            };
            work += 1;
            let (l, m) = (&self.wu[i].linear, &self.wv[j].linear);
            if !self.tested.insert((l.clone(), m.clone())) {
                continue;
            }
            self.report.pairs_tested += 1;
            let proof = match self.mode {
                Mode::Modular => modular_nonsep_proof(l, m)?,
                Mode::Unary => unary_nonsep_proof(l, m)?,
            };
            if let Some(proof) = proof {
                return Ok(Some(Certificate::NotSeparable {
                    mode: self.mode,
                    witness_u: self.wu[i].runs(),
                    witness_v: self.wv[j].runs(),
                    proof,
                }));
            }
        }
        Ok(None)
    }
}

fn merged_report(p: &BudgetReport, n: &BudgetReport) -> BudgetReport {
    BudgetReport {
        max_n_tried: p.max_n_tried,
        unresolved_classes: p.unresolved_classes,
        skipped_moduli: p.skipped_moduli.clone(),
        ..n.clone()
    }
}

/// Decides separability of two sections of equal arity within the budgets.
pub fn decide_separability(a: &SectionedVas, b: &SectionedVas, mode: Mode, budgets: &Budgets) -> Result<Certificate> {
    let pair = normalize_pair(a, b)?;
    decide_normalized(&pair, mode, budgets)
}

/// As [`decide_separability`] on an already normalized pair.
pub fn decide_normalized(pair: &NormalizedPair, mode: Mode, budgets: &Budgets) -> Result<Certificate> {
    let mut pos = Positive { pair, mode, budgets, next_n: 1, done: false, report: BudgetReport::default() };
    let mut neg = Negative::new(pair, mode, budgets);
    if budgets.workers >= 2 {
        return decide_parallel(pos, neg);
    }
    while !(pos.done && neg.done) {
        if !pos.done {
            if let Some(c) = pos.step()? {
                return Ok(c);
            }
        }
        if !neg.done {
            if let Some(c) = neg.step()? {
                return Ok(c);
            }
        }
    }
    Ok(Certificate::Unknown { mode, report: merged_report(&pos.report, &neg.report) })
}

fn decide_parallel(mut pos: Positive<'_>, mut neg: Negative<'_>) -> Result<Certificate> {
    let mode = pos.mode;
    let stop = AtomicBool::new(false);
    let winner: Mutex<Option<Result<Certificate>>> = Mutex::new(None);
    let finish = |r: Result<Certificate>| {
        let mut w = winner.lock().expect("winner lock");
        if w.is_none() {
            *w = Some(r);
        }
        stop.store(true, Ordering::SeqCst);
    };
    std::thread::scope(|s| {
        s.spawn(|| {
            while !pos.done && !stop.load(Ordering::SeqCst) {
                match pos.step() {
                    Ok(Some(c)) => return finish(Ok(c)),
                    Ok(None) => {}
                    Err(e) => return finish(Err(e)),
                }
            }
        });
        s.spawn(|| {
            while !neg.done && !stop.load(Ordering::SeqCst) {
                match neg.step() {
                    Ok(Some(c)) => return finish(Ok(c)),
                    Ok(None) => {}
                    Err(e) => return finish(Err(e)),
                }
            }
        });
    });
    if let Some(r) = winner.into_inner().expect("winner lock") {
        return r;
    }
    Ok(Certificate::Unknown { mode, report: merged_report(&pos.report, &neg.report) })
}

/// Limits of certificate verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Expansion members are checked against a separator up to this entry bound.
    pub member_bound: i64,
    /// Configurations explored when listing bounded expansion members.
    pub max_states: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { member_bound: 12, max_states: 200_000 }
    }
}

/// Re-checks a certificate from scratch. `Unknown` certificates never verify.
pub fn verify_certificate(a: &SectionedVas, b: &SectionedVas, cert: &Certificate, opts: &VerifyOptions) -> bool {
    let Ok(pair) = normalize_pair(a, b) else { return false };
    verify_normalized(&pair, cert, opts).unwrap_or(false)
}

/// Members of an expansion found with every entry at most `bound`.
pub fn bounded_members(vas: &crate::vas::Vas, arity: usize, bound: i64, max_states: usize) -> Option<BTreeSet<Vec<i64>>> {
    let c = Compact::of_vas(vas)?;
    let ex = explore(&c, max_states, Some(bound), |_| false);
    Some(ex.configs.iter().filter(|x| x[arity..].iter().all(|&v| v == 0)).map(|x| x[..arity].to_vec()).collect())
}

/// As [`verify_certificate`] on an already normalized pair.
pub fn verify_normalized(pair: &NormalizedPair, cert: &Certificate, opts: &VerifyOptions) -> Result<bool> {
    match cert {
        Certificate::Unknown { .. } => Ok(false),
        Certificate::NotSeparable { mode, witness_u, witness_v, proof } => {
            let (Ok(wu), Ok(wv)) = (Witness::replay(&pair.u, pair.arity, witness_u), Witness::replay(&pair.v, pair.arity, witness_v))
            else {
                return Ok(false);
            };
            verify_proof(&wu.linear, &wv.linear, proof, *mode)
        }
        Certificate::Separable { mode, n, separator, proofs } => {
            if separator.mode() != *mode || separator.n() != *n || separator.dim() != pair.arity {
                return Ok(false);
            }
            let reps = class_representatives(*mode, pair.arity, *n, usize::MAX)?;
            if proofs.len() != reps.len() {
                return Ok(false);
            }
            for (w, p) in reps.iter().zip(proofs) {
                let bu = class_block_for(&pair.u, pair.arity, *mode, *n, w)?;
                let bv = class_block_for(&pair.v, pair.arity, *mode, *n, w)?;
                let target = block_target(bu.dim(), pair.dim(), *mode, w);
                if &p.class != w || p.proof.target != target {
                    return Ok(false);
                }
                let rep = IntVector::new(w.iter().map(|&x| x.into()).collect());
                let inside = separator.contains(&rep)?;
                let ok = match p.side {
                    Side::U => !inside && verify_unreach_proof(&bu, &p.proof),
                    Side::V => inside && verify_unreach_proof(&bv, &p.proof),
                };
                if !ok {
                    return Ok(false);
                }
            }
            for (vas, want) in [(&pair.u, true), (&pair.v, false)] {
                let Some(members) = bounded_members(vas, pair.arity, opts.member_bound, opts.max_states) else {
                    return Ok(false);
                };
                for m in members {
                    if separator.contains(&IntVector::from_i64s(&m))? != want {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;
    use crate::linsets::{UnaryClass, UnaryEntry};
    use crate::vas::Vas;

    fn counter(src: i64, step: i64) -> SectionedVas {
        SectionedVas::full(Vas::new(1, ivec![src], vec![ivec![step]]).unwrap())
    }

    fn singleton(x: i64) -> SectionedVas {
        SectionedVas::full(Vas::new(1, ivec![x], vec![]).unwrap())
    }

    fn check(a: &SectionedVas, b: &SectionedVas, mode: Mode) -> Certificate {
        let c = decide_separability(a, b, mode, &Budgets::default()).unwrap();
        assert!(verify_certificate(a, b, &c, &VerifyOptions::default()), "{c:?}");
        let text = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        c
    }

    #[test]
    fn evens_and_odds() {
        let c = check(&counter(0, 2), &counter(1, 2), Mode::Modular);
        match c {
            Certificate::Separable { n, separator: Separator::Modular(s), .. } => {
                assert_eq!(n, 2);
                assert_eq!(s.residues(), &BTreeSet::from([vec![0]]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(check(&counter(0, 2), &counter(1, 2), Mode::Unary), Certificate::Separable { .. }));
    }

    #[test]
    fn zero_against_positive() {
        let (a, b) = (singleton(0), counter(1, 1));
        match check(&a, &b, Mode::Unary) {
            Certificate::Separable { n, separator: Separator::Unary(s), .. } => {
                assert_eq!(n, 1);
                assert_eq!(s.classes(), &BTreeSet::from([UnaryClass(vec![UnaryEntry::Small(0)])]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(check(&a, &b, Mode::Modular), Certificate::NotSeparable { .. }));
    }

    #[test]
    fn self_against_self() {
        let v = SectionedVas::full(Vas::new(3, ivec![1, 0, 0], vec![ivec![-1, 2, 1], ivec![2, -1, 1]]).unwrap());
        for mode in [Mode::Modular, Mode::Unary] {
            assert!(matches!(check(&v, &v, mode), Certificate::NotSeparable { .. }));
        }
    }

    #[test]
    fn empty_side_is_separable() {
        let empty = SectionedVas::new(
            Vas::new(2, ivec![0, 0], vec![ivec![1, 0]]).unwrap(),
            crate::vas::SectionSpec::new(vec![0], [(1, 1.into())].into()),
        )
        .unwrap();
        let c = check(&empty, &counter(0, 1), Mode::Modular);
        assert!(matches!(c, Certificate::Separable { n: 1, .. }), "{c:?}");
    }

    #[test]
    fn parallel_mode_agrees() {
        let b = Budgets { workers: 2, ..Budgets::default() };
        let c = decide_separability(&counter(0, 2), &counter(1, 2), Mode::Modular, &b).unwrap();
        assert!(matches!(c, Certificate::Separable { n: 2, .. }));
        let c = decide_separability(&singleton(0), &counter(1, 1), Mode::Modular, &b).unwrap();
        assert!(matches!(c, Certificate::NotSeparable { .. }));
    }

    #[test]
    fn tampering_is_caught() {
        let (a, b) = (counter(0, 2), counter(1, 2));
        let c = decide_separability(&a, &b, Mode::Modular, &Budgets::default()).unwrap();
        let Certificate::Separable { mode, n, proofs, .. } = c.clone() else { panic!() };
        let emptied =
            Certificate::Separable { mode, n, separator: Separator::Modular(ModularSet::new(n, 1, BTreeSet::new()).unwrap()), proofs };
        assert!(!verify_certificate(&a, &b, &emptied, &VerifyOptions::default()));

        let s = singleton(0);
        let t = counter(1, 1);
        let c = decide_separability(&s, &t, Mode::Modular, &Budgets::default()).unwrap();
        let Certificate::NotSeparable { mode, witness_u, mut witness_v, proof } = c else { panic!() };
        let good = witness_v.clone();
        witness_v.pump_runs.push(vec![7]);
        let broken = Certificate::NotSeparable { mode, witness_u: witness_u.clone(), witness_v, proof: proof.clone() };
        assert!(!verify_certificate(&s, &t, &broken, &VerifyOptions::default()));
        let longer = WitnessRuns { base_run: vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0], pump_runs: good.pump_runs };
        let broken = Certificate::NotSeparable { mode, witness_u, witness_v: longer, proof };
        assert!(!verify_certificate(&s, &t, &broken, &VerifyOptions::default()));
    }

    #[test]
    fn tiny_budgets_give_unknown() {
        let b = Budgets { states_per_quantum: 1, max_n: 1, max_witness_pairs: 0, ..Budgets::default() };
        let c = decide_separability(&counter(0, 2), &counter(1, 2), Mode::Modular, &b).unwrap();
        let Certificate::Unknown { report, .. } = &c else { panic!("{c:?}") };
        assert_eq!(report.max_n_tried, 1);
        assert!(!verify_certificate(&counter(0, 2), &counter(1, 2), &c, &VerifyOptions::default()));
    }
}
