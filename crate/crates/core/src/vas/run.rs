use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Vas;
use crate::error::{Error, Result};
use crate::intlin::{Config, IntVector};

/// A validated run: `configs[i] + transitions[labels[i]] = configs[i + 1]`,
/// every configuration nonnegative, starting at the system source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    configs: Vec<Config>,
    labels: Vec<usize>,
}

impl Run {
    /// The empty run at the source of `vas`.
    pub fn empty(vas: &Vas) -> Run {
        Run { configs: vec![vas.source().clone()], labels: Vec::new() }
    }

    /// Replays a transition-index sequence from the source.
    pub fn from_labels(vas: &Vas, labels: &[usize]) -> Result<Run> {
        let mut configs = Vec::with_capacity(labels.len() + 1);
        configs.push(vas.source().clone());
        for (step, &l) in labels.iter().enumerate() {
            let t = vas.transitions().get(l).ok_or_else(|| Error::InvalidRun { step, reason: format!("no transition {l}") })?;
            let next = configs.last().expect("nonempty") + t;
            if !next.is_nonneg() {
                return Err(Error::InvalidRun { step, reason: format!("configuration {next} has a negative entry") });
            }
            configs.push(next);
        }
        Ok(Run { configs, labels: labels.to_vec() })
    }

    /// Extends a run by one transition, if the result stays nonnegative.
    pub fn extended(&self, vas: &Vas, label: usize) -> Option<Run> {
        let next = self.target() + &vas.transitions()[label];
        if !next.is_nonneg() {
            return None;
        }
        let mut r = self.clone();
        r.configs.push(next);
        r.labels.push(label);
        Some(r)
    }

    pub fn source(&self) -> &Config {
        &self.configs[0]
    }

    pub fn target(&self) -> &Config {
        self.configs.last().expect("a run has at least one configuration")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    /// The step triples `(before, label, after)`.
    pub fn steps(&self) -> impl Iterator<Item = (&Config, usize, &Config)> {
        self.labels.iter().enumerate().map(|(i, &l)| (&self.configs[i], l, &self.configs[i + 1]))
    }
}

/// Checks a candidate given as explicit configurations and transition indices.
pub fn validate_run(vas: &Vas, configs: &[Config], labels: &[usize]) -> Result<Run> {
    if configs.len() != labels.len() + 1 {
        return Err(Error::InvalidRun { step: 0, reason: format!("{} configurations for {} steps", configs.len(), labels.len()) });
    }
    if &configs[0] != vas.source() {
        return Err(Error::InvalidRun { step: 0, reason: "does not start at the source".into() });
    }
    for (i, c) in configs.iter().enumerate() {
        if c.dim() != vas.dim() {
            return Err(Error::InvalidRun { step: i, reason: format!("configuration {c} has the wrong dimension") });
        }
        if !c.is_nonneg() {
            return Err(Error::InvalidRun { step: i, reason: format!("configuration {c} has a negative entry") });
        }
    }
    for (i, &l) in labels.iter().enumerate() {
        let t = vas.transitions().get(l).ok_or_else(|| Error::InvalidRun { step: i, reason: format!("no transition {l}") })?;
        if &configs[i] + t != configs[i + 1] {
            return Err(Error::InvalidRun { step: i, reason: "configurations do not chain".into() });
        }
    }
    Ok(Run { configs: configs.to_vec(), labels: labels.to_vec() })
}

/// Leftmost embedding of `rho`'s steps into `sigma`'s steps: equal labels and
/// componentwise-dominated configurations on both sides of each step. Also
/// requires `target(rho) <= target(sigma)`.
pub fn embedding(rho: &Run, sigma: &Run) -> Option<Vec<usize>> {
    if rho.source().dim() != sigma.source().dim() || !rho.target().le(sigma.target()) {
        return None;
    }
    let mut out = Vec::with_capacity(rho.len());
    let mut j = 0;
    for (a, l, a2) in rho.steps() {
        loop {
            if j >= sigma.len() {
                return None;
            }
            let (b, m, b2) = (&sigma.configs[j], sigma.labels[j], &sigma.configs[j + 1]);
            j += 1;
            if l == m && a.le(b) && a2.le(b2) {
                out.push(j - 1);
                break;
            }
        }
    }
    Some(out)
}

/// `rho ⊴ sigma`.
pub fn run_embeds(rho: &Run, sigma: &Run) -> bool {
    embedding(rho, sigma).is_some()
}

/// Given `rho ⊴ rho1` and `rho ⊴ rho2`, a run `rho'` with `rho ⊴ rho'` whose
/// target increment over `rho` is the sum of the two increments.
///
/// The segments of `rho1` and `rho2` between embedded steps are interleaved:
/// before each step of `rho`, the `rho1` segment, then the `rho2` segment.
pub fn pump_compose(vas: &Vas, rho: &Run, rho1: &Run, rho2: &Run) -> Result<Run> {
    let e1 = embedding(rho, rho1).ok_or_else(|| Error::Precondition("first run does not embed the base".into()))?;
    let e2 = embedding(rho, rho2).ok_or_else(|| Error::Precondition("second run does not embed the base".into()))?;
    if rho.source() != vas.source() || rho1.source() != vas.source() || rho2.source() != vas.source() {
        return Err(Error::Precondition("runs must start at the system source".into()));
    }
    let segment = |r: &Run, e: &[usize], j: usize| -> Vec<usize> {
        let start = if j == 0 { 0 } else { e[j - 1] + 1 };
        let end = if j == e.len() { r.len() } else { e[j] };
        r.labels[start..end].to_vec()
    };
    let mut labels = Vec::with_capacity(rho1.len() + rho2.len());
    for j in 0..=rho.len() {
        labels.extend(segment(rho1, &e1, j));
        labels.extend(segment(rho2, &e2, j));
        if j < rho.len() {
            labels.push(rho.labels[j]);
        }
    }
    Run::from_labels(vas, &labels)
}

/// A run `rho` with `rho0 ⊴ rho` and
/// `target(rho) = target(rho0) + Σ coeffs[i] * (target(pumps[i]) - target(rho0))`,
/// built by repeated [`pump_compose`].
pub fn pump_linear(vas: &Vas, rho0: &Run, pumps: &[Run], coeffs: &[BigInt]) -> Result<Run> {
    if pumps.len() != coeffs.len() {
        return Err(Error::Precondition(format!("{} pumps but {} coefficients", pumps.len(), coeffs.len())));
    }
    if coeffs.iter().any(Signed::is_negative) {
        return Err(Error::NegativeEntry("pump coefficient"));
    }
    for p in pumps {
        if !run_embeds(rho0, p) {
            return Err(Error::Precondition("a pump run does not embed the base run".into()));
        }
    }
    let mut acc = rho0.clone();
    for (p, a) in pumps.iter().zip(coeffs) {
        if a.is_zero() {
            continue;
        }
        let times = a.to_usize().ok_or(Error::Overflow("pump coefficient"))?;
        for _ in 0..times {
            acc = pump_compose(vas, rho0, &acc, p)?;
        }
    }
    Ok(acc)
}

/// `target(run) - target(base)`.
pub fn increment(base: &Run, run: &Run) -> IntVector {
    run.target() - base.target()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivec;

    fn triangle() -> Vas {
        Vas::new(3, ivec![1, 0, 0], vec![ivec![-1, 2, 1], ivec![2, -1, 1]]).unwrap()
    }

    fn counter() -> Vas {
        Vas::new(1, ivec![0], vec![ivec![1]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let v = triangle();
        let r = validate_run(&v, &[ivec![1, 0, 0], ivec![0, 2, 1], ivec![2, 1, 2]], &[0, 1]).unwrap();
        assert_eq!(r.target(), &ivec![2, 1, 2]);
        let e = validate_run(&v, &[ivec![1, 0, 0]], &[]).unwrap();
        assert_eq!(e.target(), v.source());
        assert!(validate_run(&v, &[ivec![1, 0, 0], ivec![3, -1, 1]], &[1]).is_err());
        assert!(Run::from_labels(&v, &[1]).is_err());
        assert!(validate_run(&v, &[ivec![1, 0, 0], ivec![0, 2, 2]], &[0]).is_err());
    }

    #[test]
    fn embedding_examples() {
        let c = counter();
        let one = Run::from_labels(&c, &[0]).unwrap();
        let two = Run::from_labels(&c, &[0, 0]).unwrap();
        assert!(run_embeds(&one, &two));
        assert!(!run_embeds(&two, &one));
        assert!(run_embeds(&one, &one));
        assert!(run_embeds(&Run::empty(&c), &two));
    }

    #[test]
    fn compose_examples() {
        let c = counter();
        let empty = Run::empty(&c);
        let one = Run::from_labels(&c, &[0]).unwrap();
        let r = pump_compose(&c, &empty, &one, &one).unwrap();
        assert_eq!(r.labels(), &[0, 0]);
        assert_eq!(r.target(), &ivec![2]);
        assert_eq!(pump_compose(&c, &one, &one, &one).unwrap(), one);
        assert!(pump_compose(&c, &one, &empty, &one).is_err());

        let v = triangle();
        let base = Run::from_labels(&v, &[0]).unwrap();
        let p1 = Run::from_labels(&v, &[0, 1, 0]).unwrap();
        let p2 = Run::from_labels(&v, &[0, 1, 0, 1]).unwrap();
        let r = pump_compose(&v, &base, &p1, &p2).unwrap();
        assert!(run_embeds(&base, &r));
        assert_eq!(increment(&base, &r), &increment(&base, &p1) + &increment(&base, &p2));
    }

    #[test]
    fn linear_pumping() {
        let c = counter();
        let base = Run::from_labels(&c, &[0]).unwrap();
        let pump = Run::from_labels(&c, &[0, 0, 0]).unwrap();
        assert_eq!(pump_linear(&c, &base, std::slice::from_ref(&pump), &[BigInt::zero()]).unwrap(), base);
        let r = pump_linear(&c, &base, std::slice::from_ref(&pump), &[BigInt::from(2)]).unwrap();
        assert_eq!(r.target(), &ivec![5]);
        let small = Run::from_labels(&c, &[0, 0]).unwrap();
        let r = pump_linear(&c, &base, &[pump, small], &[BigInt::from(1), BigInt::from(3)]).unwrap();
        assert_eq!(r.target(), &ivec![6]);
    }
}
