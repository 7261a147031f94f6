use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use vassep_core::commutative::{accepted_words, commutative_regular_separability, parikh_section, Acceptance, LabeledVas};
use vassep_core::intlin::IntVector;
use vassep_core::linsep::{modular_separable_linear, unary_separable_linear, verify_linsep, LinSepVerdict, Mode};
use vassep_core::linsets::LinearSet;
use vassep_core::oracle::{reach_within, section_of, vas_i64};
use vassep_core::vas::{increment, pump_compose, run_embeds, Run, Vas};
use vassep_core::vassep::{enumerate_witnesses, Budgets, Certificate, WitnessLimits};

fn vector(d: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(lo..=hi, d)
}

fn linear(d: usize) -> impl Strategy<Value = LinearSet> {
    (vector(d, 0, 3), proptest::collection::vec(vector(d, 0, 3), 0..=2))
        .prop_map(|(b, ps)| LinearSet::new(IntVector::from_i64s(&b), ps.iter().map(|p| IntVector::from_i64s(p)).collect()).unwrap())
}

fn pair() -> impl Strategy<Value = (LinearSet, LinearSet)> {
    (1usize..=2).prop_flat_map(|d| (linear(d), linear(d)))
}

fn small_vas() -> impl Strategy<Value = Vas> {
    (vector(2, 0, 2), proptest::collection::vec(vector(2, -1, 2), 1..=3))
        .prop_map(|(s, ts)| Vas::new(2, IntVector::from_i64s(&s), ts.iter().map(|t| IntVector::from_i64s(t)).collect()).unwrap())
}

/// A run following `labels` as far as it stays enabled.
fn greedy_run(vas: &Vas, labels: &[usize]) -> Run {
    let mut r = Run::empty(vas);
    for &l in labels {
        if let Some(next) = r.extended(vas, l % vas.transitions().len()) {
            r = next;
        }
    }
    r
}

/// `base` with extra transitions inserted before the given positions.
fn with_insertions(vas: &Vas, base: &Run, extra: &[(usize, usize)]) -> Option<Run> {
    let mut labels = base.labels().to_vec();
    let mut sorted = extra.to_vec();
    sorted.sort_by_key(|e| std::cmp::Reverse(e.0));
    for (pos, l) in sorted {
        labels.insert(pos.min(labels.len()), l % vas.transitions().len());
    }
    Run::from_labels(vas, &labels).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linsep_verdicts_verify((l, m) in pair()) {
        let mv = modular_separable_linear(&l, &m).unwrap();
        let uv = unary_separable_linear(&l, &m).unwrap();
        prop_assert!(verify_linsep(&l, &m, &mv, Mode::Modular, 10));
        prop_assert!(verify_linsep(&l, &m, &uv, Mode::Unary, 10));
        // a modular separator is a unary one
        if mv.is_separable() {
            prop_assert!(uv.is_separable());
        }
    }

    #[test]
    fn linsep_symmetric((l, m) in pair()) {
        let a = modular_separable_linear(&l, &m).unwrap().is_separable();
        let b = modular_separable_linear(&m, &l).unwrap().is_separable();
        prop_assert_eq!(a, b);
        let a = unary_separable_linear(&l, &m).unwrap().is_separable();
        let b = unary_separable_linear(&m, &l).unwrap().is_separable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn self_pairs_never_separate(l in (1usize..=3).prop_flat_map(linear)) {
        prop_assert!(matches!(unary_separable_linear(&l, &l).unwrap(), LinSepVerdict::NotSeparable(_)));
    }

    #[test]
    fn pump_compose_adds_increments(
        vas in small_vas(),
        labels in proptest::collection::vec(0usize..3, 0..5),
        e1 in proptest::collection::vec((0usize..6, 0usize..3), 0..3),
        e2 in proptest::collection::vec((0usize..6, 0usize..3), 0..3),
    ) {
        let rho = greedy_run(&vas, &labels);
        let (Some(r1), Some(r2)) = (with_insertions(&vas, &rho, &e1), with_insertions(&vas, &rho, &e2)) else {
            return Ok(());
        };
        if !run_embeds(&rho, &r1) || !run_embeds(&rho, &r2) {
            return Ok(());
        }
        let out = pump_compose(&vas, &rho, &r1, &r2).unwrap();
        prop_assert!(run_embeds(&rho, &out));
        prop_assert_eq!(increment(&rho, &out), &increment(&rho, &r1) + &increment(&rho, &r2));
    }

    #[test]
    fn witness_members_are_reachable(vas in small_vas(), coeffs in proptest::collection::vec(0u32..3, 4)) {
        let limits = WitnessLimits { max_run_len: 4, max_runs: 500, max_pumps: 2 };
        for w in enumerate_witnesses(&vas, 1, limits).unwrap().iter().take(6) {
            let c: Vec<BigInt> = coeffs.iter().take(w.pumps.len()).map(|&x| BigInt::from(x)).collect();
            let run = w.member_run(&vas, &c).unwrap();
            let expect = IntVector::linear_combination(&c, w.linear.periods(), 1);
            prop_assert_eq!(run.target().project(&[0]), w.linear.base() + &expect);
            prop_assert_eq!(&run.target()[1], &BigInt::from(0));
        }
    }
}

fn labeled() -> impl Strategy<Value = LabeledVas> {
    let letter = prop_oneof![Just("a".to_string()), Just("b".to_string())];
    (vector(1, 0, 2), proptest::collection::vec((vector(1, -1, 2), letter), 1..=3), any::<bool>(), 0i64..=2).prop_map(
        |(s, ts, cover, v0)| {
            let vas = Vas::new(1, IntVector::from_i64s(&s), ts.iter().map(|(t, _)| IntVector::from_i64s(t)).collect()).unwrap();
            let labels = ts.into_iter().map(|(_, l)| Some(l)).collect();
            let acc = if cover { Acceptance::Cover(IntVector::from_i64s(&[v0])) } else { Acceptance::Exact(IntVector::from_i64s(&[v0])) };
            LabeledVas::new(vas, labels, acc, Some(vec!["a".into(), "b".into()])).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parikh_section_is_faithful(lv in labeled()) {
        const LEN: usize = 5;
        let words = accepted_words(&lv, LEN, LEN).unwrap();
        let expect: BTreeSet<Vec<i64>> = words.iter().map(|w| lv.parikh(w).unwrap()).collect();
        let s = parikh_section(&lv).unwrap();
        let (src, ts) = vas_i64(s.vas()).unwrap();
        let fixed = s.section().fixed.iter().map(|(&i, x)| (i, i64::try_from(x).unwrap())).collect();
        let cap = 2 + 2 * LEN as i64;
        let got: BTreeSet<Vec<i64>> = section_of(&reach_within(&src, &ts, cap), &s.section().keep, &fixed)
            .into_iter()
            .filter(|v| v.iter().sum::<i64>() <= LEN as i64)
            .collect();
        prop_assert_eq!(got, expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn language_separators_split_words(v in labeled(), w in labeled()) {
        let budgets = Budgets { states_per_quantum: 2000, max_n: 4, ..Budgets::default() };
        let c = commutative_regular_separability(&v, &w, &budgets).unwrap();
        if let (Certificate::Separable { .. }, Some(l)) = (&c.certificate, &c.language_separator) {
            for word in accepted_words(&v, 8, 8).unwrap() {
                prop_assert!(l.accepts(&word));
            }
            for word in accepted_words(&w, 8, 8).unwrap() {
                prop_assert!(!l.accepts(&word));
            }
        }
    }
}
