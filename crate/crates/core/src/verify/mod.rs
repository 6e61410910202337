//! Exhaustive and seeded property suites.
//!
//! Each criterion compares the library against an independent oracle from
//! [`oracle`] and reports a case count, the number of failing cases and the
//! worst observed error relative to its bound. Reports carry no timings, so
//! the same seed yields byte-identical output.

mod criteria;
pub mod gen;
pub mod oracle;

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

pub const DEFAULT_SEED: u64 = 42;

/// Details kept per criterion; further failures are only counted.
const MAX_DETAILS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Measurement,
    Finitary,
    Dynamics,
    Socks,
    FhLogic,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["measurement", "finitary", "dynamics", "socks", "fhlogic", "all"];

    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Measurement => vec![1, 2, 3],
            Suite::Finitary => vec![4, 5],
            Suite::Dynamics => vec![6, 7, 8, 9, 10],
            Suite::Socks => vec![11],
            Suite::FhLogic => vec![12, 13],
            Suite::All => (1..=13).collect(),
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measurement" => Ok(Suite::Measurement),
            "finitary" => Ok(Suite::Finitary),
            "dynamics" => Ok(Suite::Dynamics),
            "socks" => Ok(Suite::Socks),
            "fhlogic" => Ok(Suite::FhLogic),
            "all" => Ok(Suite::All),
            other => Err(Error::validation(format!(
                "unknown suite '{other}'; expected one of {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// Largest `error / bound` over the numeric checks; at most 1 on success.
    pub worst_ratio: f64,
    pub details: Vec<String>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {:<28} cases={} failures={} worst={:.3e}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.failures,
            self.worst_ratio
        )?;
        for d in &self.details {
            write!(f, "\n    {d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        crate::io::to_canonical_string(self).expect("reports serialize")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        for c in &self.criteria {
            writeln!(f, "{c}")?;
        }
        write!(f, "overall {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Running totals for one criterion.
pub(crate) struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
    details: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: 0,
            worst: 0.0,
            details: Vec::new(),
        }
    }

    fn case(&mut self) {
        self.cases += 1;
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        self.failures += 1;
        if self.details.len() < MAX_DETAILS {
            self.details.push(what());
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.fail(what);
        }
    }

    /// Records `error <= bound`; a NaN error fails.
    fn within(&mut self, error: f64, bound: f64, what: impl FnOnce() -> String) {
        let ratio = error / bound;
        if ratio.is_nan() || ratio > 1.0 {
            self.worst = if ratio.is_nan() { f64::INFINITY } else { ratio.max(self.worst) };
            self.fail(|| format!("{}: {error:.3e} > {bound:.1e}", what()));
        } else {
            self.worst = self.worst.max(ratio);
        }
    }

    /// Unwraps a library result, recording the error as a failure.
    fn ok<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(|| format!("{}: {e}", what()));
                None
            }
        }
    }

    fn finish(self, id: u8, name: &'static str) -> CriterionReport {
        let passed = self.failures == 0 && self.cases > 0;
        let mut details = self.details;
        if self.cases == 0 {
            details.push("no cases ran".to_string());
        }
        CriterionReport {
            id,
            name,
            passed,
            cases: self.cases,
            failures: self.failures,
            worst_ratio: if self.worst.is_finite() { self.worst } else { f64::MAX },
            details,
        }
    }
}

/// Independent stream per criterion, so one criterion's draws never shift
/// another's.
pub(crate) fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(id));
    rng
}

pub fn criterion_name(id: u8) -> Option<&'static str> {
    criteria::NAMES.get(usize::from(id).wrapping_sub(1)).copied()
}

pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionReport> {
    let name = criterion_name(id)
        .ok_or_else(|| Error::validation(format!("unknown criterion {id}; expected 1..=13")))?;
    let mut tally = Tally::new();
    let mut rng = rng_for(seed, id);
    criteria::run(id, &mut tally, &mut rng);
    Ok(tally.finish(id, name))
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let criteria: Vec<CriterionReport> = suite
        .criteria()
        .into_iter()
        .map(|id| run_criterion(id, seed).expect("suite ids are valid"))
        .collect();
    SuiteReport {
        seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}
