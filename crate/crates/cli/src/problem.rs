//! The versioned problem file read by every command.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use vassep_core::commutative::{parikh_section, LabeledVas};
use vassep_core::intlin::{Config, IntVector};
use vassep_core::vas::{SectionSpec, SectionedVas, Vas, Vass};
use vassep_core::BigInt;

pub const VERSION: u32 = 1;

/// Exactly one of `vas`, `vass` or `labeled` is present. A `vass` needs
/// `state`; `section` applies to `vas` and `vass` and defaults to keeping
/// every coordinate. `guard` optionally names the token coordinates of a
/// `vas`, a hint that is checked before use.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vas: Option<Vas>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vass: Option<Vass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labeled: Option<LabeledVas>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<Vec<usize>>,
    /// Reachability targets over the kept coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<Config>,
}

impl ProblemFile {
    pub fn from_sectioned(s: &SectionedVas) -> Self {
        ProblemFile {
            version: VERSION,
            vas: Some(s.vas().clone()),
            section: Some(s.section().clone()),
            guard: s.guard().map(<[usize]>::to_vec),
            ..Default::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.version == VERSION, "unsupported version {} (expected {VERSION})", self.version);
        let systems = [self.vas.is_some(), self.vass.is_some(), self.labeled.is_some()];
        ensure!(systems.iter().filter(|&&b| b).count() == 1, "exactly one of \"vas\", \"vass\" or \"labeled\" is required");
        ensure!(self.vass.is_some() == self.state.is_some(), "\"state\" is required with \"vass\" and only there");
        ensure!(self.labeled.is_none() || self.section.is_none(), "\"section\" does not apply to \"labeled\"");
        ensure!(self.vas.is_some() || self.guard.is_none(), "\"guard\" applies to \"vas\" only");
        if let Some(s) = &self.section {
            let dim = self.vas.as_ref().map_or_else(|| self.vass.as_ref().map_or(0, Vass::dim), Vas::dim);
            s.validate(dim)?;
        }
        Ok(())
    }

    /// The section this problem denotes; labeled systems give their Parikh section.
    pub fn sectioned(&self) -> Result<SectionedVas> {
        if let Some(v) = &self.vas {
            let s = match &self.section {
                Some(s) => SectionedVas::new(v.clone(), s.clone())?,
                None => SectionedVas::full(v.clone()),
            };
            return Ok(match &self.guard {
                Some(g) => s.with_guard(g.clone())?,
                None => s,
            });
        }
        if let Some(v) = &self.vass {
            let state = v.state_index(self.state.as_deref().unwrap_or_default())?;
            return Ok(SectionedVas::from_vass(v, state, self.section.clone())?);
        }
        match &self.labeled {
            Some(l) => Ok(parikh_section(l)?),
            None => bail!("no system"),
        }
    }

    pub fn labeled(&self) -> Result<&LabeledVas> {
        self.labeled.as_ref().context("a labeled system is required")
    }

    pub fn vass_state(&self) -> Result<(&Vass, usize)> {
        let v = self.vass.as_ref().context("a VASS is required")?;
        Ok((v, v.state_index(self.state.as_deref().unwrap_or_default())?))
    }
}

/// The full configuration of `s` whose kept coordinates hold `t`.
pub fn fill_section(s: &SectionedVas, t: &[i64]) -> Result<Config> {
    let sec = s.section();
    ensure!(t.len() == sec.keep.len(), "target has {} entries but the section keeps {}", t.len(), sec.keep.len());
    ensure!(t.iter().all(|&x| x >= 0), "target entries must be nonnegative");
    let mut c = IntVector::zeros(s.dim());
    for (&i, x) in &sec.fixed {
        c.set(i, x.clone());
    }
    for (&i, &x) in sec.keep.iter().zip(t) {
        c.set(i, BigInt::from(x));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let ok = r#"{"version":1,"vas":{"dim":1,"source":[0],"transitions":[[1]]}}"#;
        assert!(ProblemFile::parse(ok).is_ok());
        assert!(ProblemFile::parse(r#"{"version":1,"vas":{"dim":1,"source":[0]},"extra":1}"#).is_err());
        assert!(ProblemFile::parse(r#"{"version":2,"vas":{"dim":1,"source":[0]}}"#).is_err());
        assert!(ProblemFile::parse(r#"{"version":1}"#).is_err());
        let e = ProblemFile::parse("{\"version\":1,\n\"vas\":{\"dim\":1,\"source\":[x]}}").unwrap_err();
        assert!(format!("{e:#}").contains("line 2"));
    }

    #[test]
    fn section_and_fill() {
        let p = ProblemFile::parse(
            r#"{"version":1,"vas":{"dim":3,"source":[1,0,0],"transitions":[]},"section":{"keep":[0,1],"fixed":{"2":7}}}"#,
        )
        .unwrap();
        let s = p.sectioned().unwrap();
        assert_eq!(fill_section(&s, &[3, 5]).unwrap(), IntVector::from_i64s(&[3, 5, 7]));
        assert!(fill_section(&s, &[3]).is_err());
        let round = ProblemFile::parse(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(round, p);
    }
}
