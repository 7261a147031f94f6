//! Commutative regular separability of labeled VAS languages, by reduction
//! to unary separability of Parikh images.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlin::{Config, IntVector};
use crate::linsep::{Mode, Separator};
use crate::linsets::{UnaryEntry, UnarySet};
use crate::vas::{SectionSpec, SectionedVas, Vas};
use crate::vassep::{decide_separability, verify_certificate, Budgets, Certificate, VerifyOptions};

/// When a run is accepting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Acceptance {
    /// The final configuration dominates the vector.
    Cover(Config),
    /// The final configuration equals the vector.
    Exact(Config),
}

impl Acceptance {
    fn vector(&self) -> &Config {
        match self {
            Acceptance::Cover(v) | Acceptance::Exact(v) => v,
        }
    }
}

/// A VAS whose transitions carry a letter or are silent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LabeledRepr", into = "LabeledRepr")]
pub struct LabeledVas {
    vas: Vas,
    labels: Vec<Option<String>>,
    acceptance: Acceptance,
    alphabet: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabeledRepr {
    vas: Vas,
    labels: Vec<Option<String>>,
    acceptance: Acceptance,
    #[serde(default)]
    alphabet: Option<Vec<String>>,
}

impl TryFrom<LabeledRepr> for LabeledVas {
    type Error = Error;
    fn try_from(r: LabeledRepr) -> Result<Self> {
        LabeledVas::new(r.vas, r.labels, r.acceptance, r.alphabet)
    }
}

impl From<LabeledVas> for LabeledRepr {
    fn from(l: LabeledVas) -> Self {
        LabeledRepr { vas: l.vas, labels: l.labels, acceptance: l.acceptance, alphabet: Some(l.alphabet) }
    }
}

impl LabeledVas {
    /// `alphabet` defaults to the sorted set of letters used; when given it is
    /// sorted and must contain every letter used.
    pub fn new(vas: Vas, labels: Vec<Option<String>>, acceptance: Acceptance, alphabet: Option<Vec<String>>) -> Result<Self> {
        if labels.len() != vas.transitions().len() {
            return Err(Error::InvalidSystem(format!("{} labels for {} transitions", labels.len(), vas.transitions().len())));
        }
        let v0 = acceptance.vector();
        crate::error::check_dim(vas.dim(), v0.dim())?;
        if !v0.is_nonneg() {
            return Err(Error::NegativeEntry("acceptance vector"));
        }
        let used: BTreeSet<String> = labels.iter().flatten().cloned().collect();
        let alphabet: Vec<String> = match alphabet {
            Some(a) => {
                let set: BTreeSet<String> = a.into_iter().collect();
                if let Some(x) = used.difference(&set).next() {
                    return Err(Error::AlphabetMismatch(format!("letter {x:?} is not in the declared alphabet")));
                }
                set.into_iter().collect()
            }
            None => used.into_iter().collect(),
        };
        Ok(LabeledVas { vas, labels, acceptance, alphabet })
    }

    pub fn vas(&self) -> &Vas {
        &self.vas
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    /// Letters in increasing order; coordinate `i` of a Parikh vector counts `alphabet[i]`.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn letter_index(&self, letter: &str) -> usize {
        self.alphabet.iter().position(|a| a == letter).expect("letters are validated")
    }

    /// Parikh vector of a word over the alphabet.
    pub fn parikh(&self, word: &[String]) -> Option<Vec<i64>> {
        let mut out = vec![0i64; self.alphabet.len()];
        for w in word {
            out[self.alphabet.iter().position(|a| a == w)?] += 1;
        }
        Some(out)
    }
}

/// A section whose members are the Parikh vectors of the accepted words.
///
/// One counting coordinate per letter is appended and incremented by the
/// labeled transitions. Exact acceptance fixes the original coordinates to
/// the acceptance vector. Cover acceptance adds a one-shot token whose
/// removal subtracts the acceptance vector, plus free decrements on the
/// original coordinates, and fixes everything but the counters to zero.
pub fn parikh_section(lv: &LabeledVas) -> Result<SectionedVas> {
    let d = lv.vas.dim();
    let k = lv.alphabet.len();
    let cover = matches!(lv.acceptance, Acceptance::Cover(_));
    let extra = usize::from(cover);
    let dim = d + k + extra;
    let widen = |t: &IntVector| t.concat(&IntVector::zeros(k + extra));
    let mut source = widen(lv.vas.source());
    let mut ts = Vec::new();
    for (t, l) in lv.vas.transitions().iter().zip(&lv.labels) {
        let mut w = widen(t);
        if let Some(a) = l {
            w.set(d + lv.letter_index(a), BigInt::from(1));
        }
        ts.push(w);
    }
    let counters: Vec<usize> = (d..d + k).collect();
    let v0 = lv.acceptance.vector();
    let fixed: BTreeMap<usize, BigInt> = if cover {
        let token = d + k;
        source.set(token, BigInt::from(1));
        let mut switch = widen(&-v0);
        switch.set(token, BigInt::from(-1));
        ts.push(switch);
        ts.extend((0..d).map(|i| IntVector::unit(dim, i).scale(&BigInt::from(-1))));
        (0..d).chain([token]).map(|i| (i, BigInt::from(0))).collect()
    } else {
        (0..d).map(|i| (i, v0[i].clone())).collect()
    };
    SectionedVas::new(Vas::new(dim, source, ts)?, SectionSpec::new(counters, fixed))
}

/// Which reduction produced a commutative certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Commutative regular separability of the languages.
    CommutativeRegular,
    /// Regular separability of the commutative closures, which holds exactly
    /// when the Parikh images are unary separable.
    CommutativeClosure,
}

/// A commutative regular language: the words whose Parikh vector lies in `set`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageSeparator {
    pub alphabet: Vec<String>,
    pub set: UnarySet,
    /// One conjunction of letter-count constraints per class, joined by "or".
    pub description: String,
}

impl LanguageSeparator {
    pub fn new(alphabet: Vec<String>, set: UnarySet) -> Self {
        let n = set.n();
        let classes: Vec<String> = set
            .classes()
            .iter()
            .map(|c| {
                let parts: Vec<String> = c
                    .entries()
                    .iter()
                    .zip(&alphabet)
                    .filter_map(|(e, a)| match e {
                        UnaryEntry::Small(v) => Some(format!("#{a} = {v}")),
                        UnaryEntry::Large(_) if n == 1 => Some(format!("#{a} >= 1")),
                        UnaryEntry::Large(r) => Some(format!("#{a} >= {n} and #{a} = {r} mod {n}")),
                        UnaryEntry::Any => None,
                    })
                    .collect();
                if parts.is_empty() {
                    "true".to_string()
                } else {
                    parts.join(" and ")
                }
            })
            .collect();
        let description = if classes.is_empty() { "false".to_string() } else { classes.join(" or ") };
        LanguageSeparator { alphabet, set, description }
    }

    pub fn accepts(&self, word: &[String]) -> bool {
        let mut v = vec![0i64; self.alphabet.len()];
        for w in word {
            match self.alphabet.iter().position(|a| a == w) {
                Some(i) => v[i] += 1,
                None => return false,
            }
        }
        self.set.contains(&IntVector::from_i64s(&v)).unwrap_or(false)
    }
}

/// A separability certificate for two labeled systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutativeCertificate {
    pub reduction: Reduction,
    #[serde(flatten)]
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language_separator: Option<LanguageSeparator>,
}

fn same_alphabet(v: &LabeledVas, w: &LabeledVas) -> Result<Vec<String>> {
    if v.alphabet != w.alphabet {
        return Err(Error::AlphabetMismatch(format!("{:?} versus {:?}", v.alphabet, w.alphabet)));
    }
    Ok(v.alphabet.clone())
}

fn reduce(v: &LabeledVas, w: &LabeledVas, budgets: &Budgets, reduction: Reduction) -> Result<CommutativeCertificate> {
    let alphabet = same_alphabet(v, w)?;
    let certificate = decide_separability(&parikh_section(v)?, &parikh_section(w)?, Mode::Unary, budgets)?;
    let language_separator = match &certificate {
        Certificate::Separable { separator: Separator::Unary(s), .. } => Some(LanguageSeparator::new(alphabet, s.clone())),
        _ => None,
    };
    Ok(CommutativeCertificate { reduction, certificate, language_separator })
}

/// Separability of `L(v)` and `L(w)` by a commutative regular language.
pub fn commutative_regular_separability(v: &LabeledVas, w: &LabeledVas, budgets: &Budgets) -> Result<CommutativeCertificate> {
    reduce(v, w, budgets, Reduction::CommutativeRegular)
}

/// Regular separability of the commutative closures of `L(v)` and `L(w)`.
pub fn regular_sep_commutative_closures(v: &LabeledVas, w: &LabeledVas, budgets: &Budgets) -> Result<CommutativeCertificate> {
    reduce(v, w, budgets, Reduction::CommutativeClosure)
}

/// Re-checks the underlying certificate on the Parikh sections, and that the
/// language separator matches the unary separator.
pub fn verify_commutative(v: &LabeledVas, w: &LabeledVas, cert: &CommutativeCertificate, opts: &VerifyOptions) -> bool {
    let (Ok(a), Ok(b)) = (parikh_section(v), parikh_section(w)) else { return false };
    if same_alphabet(v, w).is_err() || !verify_certificate(&a, &b, &cert.certificate, opts) {
        return false;
    }
    match (&cert.certificate, &cert.language_separator) {
        (Certificate::Separable { separator: Separator::Unary(s), .. }, Some(l)) => &l.set == s && l.alphabet == v.alphabet,
        (Certificate::Separable { .. }, _) => false,
        (_, l) => l.is_none(),
    }
}

/// Accepted words of at most `max_len` letters, found through runs of at most
/// `max_steps` steps.
pub fn accepted_words(lv: &LabeledVas, max_len: usize, max_steps: usize) -> Option<BTreeSet<Vec<String>>> {
    let src = lv.vas.source().to_i64s()?;
    let ts: Vec<Vec<i64>> = lv.vas.transitions().iter().map(|t| t.to_i64s()).collect::<Option<_>>()?;
    let v0 = lv.acceptance.vector().to_i64s()?;
    let accepting = |c: &[i64]| match lv.acceptance {
        Acceptance::Cover(_) => c.iter().zip(&v0).all(|(a, b)| a >= b),
        Acceptance::Exact(_) => c == v0.as_slice(),
    };
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(src, Vec::<String>::new(), 0usize)]);
    while let Some((c, word, steps)) = queue.pop_front() {
        if !seen.insert((c.clone(), word.clone())) {
            continue;
        }
        if accepting(&c) {
            out.insert(word.clone());
        }
        if steps == max_steps {
            continue;
        }
        for (t, l) in ts.iter().zip(&lv.labels) {
            let next: Vec<i64> = c.iter().zip(t).map(|(a, b)| a + b).collect();
            if next.iter().any(|&x| x < 0) {
                continue;
            }
            let mut w = word.clone();
            if let Some(a) = l {
                if w.len() == max_len {
                    continue;
                }
                w.push(a.clone());
            }
            queue.push_back((next, w, steps + 1));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;
    use crate::oracle::{reach_within, section_of, vas_i64};

    fn members(s: &SectionedVas, cap: i64) -> BTreeSet<Vec<i64>> {
        let (src, ts) = vas_i64(s.vas()).unwrap();
        let fixed: BTreeMap<usize, i64> = s.section().fixed.iter().map(|(&i, x)| (i, i64::try_from(x).unwrap())).collect();
        section_of(&reach_within(&src, &ts, cap), &s.section().keep, &fixed)
    }

    fn a() -> Option<String> {
        Some("a".into())
    }

    /// Two states as one-hot coordinates, an `a` toggling between them.
    fn parity(accept_odd: bool) -> LabeledVas {
        let vas = Vas::new(2, ivec![1, 0], vec![ivec![-1, 1], ivec![1, -1]]).unwrap();
        let v0 = if accept_odd { ivec![0, 1] } else { ivec![1, 0] };
        LabeledVas::new(vas, vec![a(), a()], Acceptance::Exact(v0), None).unwrap()
    }

    #[test]
    fn empty_language_word() {
        let vas = Vas::new(1, ivec![2], vec![]).unwrap();
        let lv = LabeledVas::new(vas, vec![], Acceptance::Exact(ivec![2]), None).unwrap();
        let s = parikh_section(&lv).unwrap();
        assert_eq!(s.arity(), 0);
        assert_eq!(members(&s, 5), BTreeSet::from([vec![]]));
    }

    #[test]
    fn zero_move_gives_star() {
        let vas = Vas::new(1, ivec![0], vec![ivec![0]]).unwrap();
        let lv = LabeledVas::new(vas, vec![a()], Acceptance::Exact(ivec![0]), None).unwrap();
        let s = parikh_section(&lv).unwrap();
        let expect: BTreeSet<Vec<i64>> = (0..=6).map(|k| vec![k]).collect();
        assert_eq!(members(&s, 6), expect);
    }

    #[test]
    fn cover_acceptance_matches_words() {
        // a increments, b decrements, silent move adds 2; accept when counter >= 3
        let vas = Vas::new(1, ivec![0], vec![ivec![1], ivec![-1], ivec![2]]).unwrap();
        let lv = LabeledVas::new(vas, vec![a(), Some("b".into()), None], Acceptance::Cover(ivec![3]), None).unwrap();
        let s = parikh_section(&lv).unwrap();
        let words = accepted_words(&lv, 4, 10).unwrap();
        let from_words: BTreeSet<Vec<i64>> = words.iter().map(|w| lv.parikh(w).unwrap()).collect();
        let sec: BTreeSet<Vec<i64>> = members(&s, 12).into_iter().filter(|v| v.iter().sum::<i64>() <= 4).collect();
        assert_eq!(sec, from_words);
    }

    #[test]
    fn odd_versus_even() {
        let c = commutative_regular_separability(&parity(true), &parity(false), &Budgets::default()).unwrap();
        assert!(verify_commutative(&parity(true), &parity(false), &c, &VerifyOptions::default()));
        let Certificate::Separable { n, .. } = &c.certificate else { panic!("{c:?}") };
        assert_eq!(*n, 2);
        let l = c.language_separator.unwrap();
        let word = |k: usize| vec!["a".to_string(); k];
        for k in 0..9 {
            assert_eq!(l.accepts(&word(k)), k % 2 == 1);
        }
    }

    #[test]
    fn empty_word_versus_nonempty() {
        let eps =
            LabeledVas::new(Vas::new(1, ivec![0], vec![]).unwrap(), vec![], Acceptance::Exact(ivec![0]), Some(vec!["a".into()])).unwrap();
        let plus = LabeledVas::new(Vas::new(1, ivec![0], vec![ivec![1]]).unwrap(), vec![a()], Acceptance::Cover(ivec![1]), None).unwrap();
        let c = commutative_regular_separability(&eps, &plus, &Budgets::default()).unwrap();
        assert!(verify_commutative(&eps, &plus, &c, &VerifyOptions::default()));
        let Certificate::Separable { n, separator: Separator::Unary(s), .. } = &c.certificate else { panic!("{c:?}") };
        assert_eq!(*n, 1);
        assert_eq!(s.classes().iter().collect::<Vec<_>>(), vec![&crate::linsets::UnaryClass(vec![UnaryEntry::Small(0)])]);
        assert_eq!(c.language_separator.unwrap().description, "#a = 0");
    }

    #[test]
    fn equal_languages() {
        let c = regular_sep_commutative_closures(&parity(true), &parity(true), &Budgets::default()).unwrap();
        assert!(matches!(c.certificate, Certificate::NotSeparable { .. }));
        assert_eq!(c.reduction, Reduction::CommutativeClosure);
        assert!(verify_commutative(&parity(true), &parity(true), &c, &VerifyOptions::default()));
    }

    #[test]
    fn alphabet_mismatch() {
        let vas = Vas::new(1, ivec![0], vec![ivec![0]]).unwrap();
        let b = LabeledVas::new(vas, vec![Some("b".into())], Acceptance::Exact(ivec![0]), None).unwrap();
        assert!(matches!(commutative_regular_separability(&parity(true), &b, &Budgets::default()), Err(Error::AlphabetMismatch(_))));
        let vas = Vas::new(1, ivec![0], vec![ivec![0]]).unwrap();
        assert!(LabeledVas::new(vas, vec![a()], Acceptance::Exact(ivec![0]), Some(vec!["b".into()])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"vas":{"dim":1,"source":[0],"transitions":[[1]]},"labels":["a"],"acceptance":{"cover":[1]}}"#;
        let lv: LabeledVas = serde_json::from_str(text).unwrap();
        assert_eq!(lv.alphabet(), &["a".to_string()]);
        let back: LabeledVas = serde_json::from_str(&serde_json::to_string(&lv).unwrap()).unwrap();
        assert_eq!(back, lv);
    }
}
