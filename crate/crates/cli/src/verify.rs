//! Verification suites and the JSON report.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use serde::Serialize;

use crate::args::Suite;
use crate::suites;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// The relation under test.
    pub paper_ref: String,
    pub measured: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip)]
    pub bound: Bound,
}

impl Check {
    fn new(name: &str, relation: &str, measured: dirac_class::Result<f64>, threshold: f64, bound: Bound) -> Self {
        let measured = measured.ok().filter(|v| v.is_finite());
        let mut c = Self { name: name.into(), paper_ref: relation.into(), measured, threshold, pass: false, bound };
        c.evaluate();
        c
    }

    pub fn at_most(name: &str, relation: &str, measured: dirac_class::Result<f64>, threshold: f64) -> Self {
        Self::new(name, relation, measured, threshold, Bound::AtMost)
    }

    pub fn at_least(name: &str, relation: &str, measured: dirac_class::Result<f64>, threshold: f64) -> Self {
        Self::new(name, relation, measured, threshold, Bound::AtLeast)
    }

    fn evaluate(&mut self) {
        self.pass = match (self.measured, self.bound) {
            (Some(v), Bound::AtMost) => v <= self.threshold,
            (Some(v), Bound::AtLeast) => v >= self.threshold,
            (None, _) => false,
        };
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn parse_overrides(items: &[String]) -> anyhow::Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|s| {
            let (k, v) = s.split_once('=').with_context(|| format!("--tol {s:?}: expected NAME=VALUE"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("--tol {s:?}: bad value"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn suite_checks(s: Suite) -> Vec<Check> {
    match s {
        Suite::Residuals => suites::residuals(),
        Suite::Spectra => suites::spectra(),
        Suite::Algebra => suites::algebra(),
        Suite::Xpct => suites::xpct(),
        Suite::So21 => suites::so21(),
        Suite::All => unreachable!(),
    }
}

/// Runs the suite (each sub-suite on its own thread) and sorts the checks
/// by name.
pub fn run(suite: Suite, overrides: &BTreeMap<String, f64>) -> anyhow::Result<Report> {
    let parts = match suite {
        Suite::All => vec![Suite::Residuals, Suite::Spectra, Suite::Algebra, Suite::Xpct, Suite::So21],
        s => vec![s],
    };
    let mut checks: Vec<Check> = std::thread::scope(|scope| {
        let handles: Vec<_> = parts.iter().map(|&s| scope.spawn(move || suite_checks(s))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect()
    });
    for (name, &v) in overrides {
        let Some(c) = checks.iter_mut().find(|c| &c.name == name) else {
            bail!("--tol: no check named {name:?} in suite {}", suite.name());
        };
        c.threshold = v;
        c.evaluate();
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { schema: SCHEMA, suite: suite.name().into(), checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_directions() {
        assert!(Check::at_most("a", "r", Ok(1.0), 1.0).pass);
        assert!(!Check::at_most("a", "r", Ok(1.1), 1.0).pass);
        assert!(Check::at_least("a", "r", Ok(1.1), 1.0).pass);
        assert!(!Check::at_most("a", "r", Ok(f64::NAN), 1.0).pass);
        let failed = Check::at_most("a", "r", Err(dirac_class::Error::NoBoundState("x".into())), 1.0);
        assert!(!failed.pass && failed.measured.is_none());
    }

    #[test]
    fn overrides_parse() {
        let m = parse_overrides(&["x.y=1e-3".into()]).unwrap();
        assert_eq!(m["x.y"], 1e-3);
        assert!(parse_overrides(&["x".into()]).is_err());
    }
}
