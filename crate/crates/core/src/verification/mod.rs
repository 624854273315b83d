//! Executable versions of the containment arguments: per-distribution
//! identities, reductions, sampled region containment and frontier traces.

mod containment;
mod frontier;
mod identities;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use containment::{default_pairs, sampled_region_containment, ContainmentPair, JIANG_SAMPLING};
pub use frontier::{
    parse_frontier_csv, trace_frontier, trace_frontier_with, FrontierOptions, FrontierPoint,
    FrontierResult,
};
pub use identities::{
    check_cc_reduction, check_devroye_identities, check_jiang_containment, check_maric_wlog,
    devroye_identities, jiang_identities, Expected, IdentityCheck,
};

/// Sample counts, seed and tolerances shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Distributions per identity check.
    pub samples: usize,
    /// Non-empty instances per region comparison.
    pub region_samples: usize,
    pub seed: u64,
    pub tol_mi: f64,
    pub tol_region: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            region_samples: 100,
            seed: 1,
            tol_mi: 1e-9,
            tol_region: 1e-7,
        }
    }
}

/// Outcome of one check over many seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub seeds_run: usize,
    /// Largest violation seen (absolute for equalities, shortfall for
    /// inequalities, containment margin for regions).
    pub max_violation: f64,
    pub worst_seed: Option<u64>,
    /// Offending inner vertex, for region checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<[f64; 2]>,
    pub tolerance: f64,
    pub passed: bool,
    /// Logged only; never fails its suite.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub diagnostic: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            seeds_run: 0,
            max_violation: 0.0,
            worst_seed: None,
            worst_point: None,
            tolerance,
            passed: true,
            diagnostic: false,
            notes: Vec::new(),
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    /// Counts one seed with its violation (NaN counts as infinite).
    pub fn record(&mut self, seed: u64, violation: f64) {
        self.seeds_run += 1;
        let v = if violation.is_nan() {
            f64::INFINITY
        } else {
            violation
        };
        if self.worst_seed.is_none() || v > self.max_violation {
            self.max_violation = v;
            self.worst_seed = Some(seed);
        }
        self.passed = self.max_violation <= self.tolerance;
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// The violation as an error, if any.
    pub fn as_error(&self) -> Option<Error> {
        if self.passed || self.diagnostic {
            return None;
        }
        let seed = self.worst_seed.unwrap_or(0);
        Some(match self.worst_point {
            Some([r1, r2]) => Error::ContainmentViolation {
                seed,
                r1,
                r2,
                margin: self.max_violation,
            },
            None => Error::IdentityViolation {
                check: self.id.clone(),
                seed,
                value: self.max_violation,
            },
        })
    }
}

/// Checks of one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.diagnostic)
    }

    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Devroye,
    Cc,
    Jiang,
    Maric,
    Containment,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Devroye => "devroye",
            Suite::Cc => "cc",
            Suite::Jiang => "jiang",
            Suite::Maric => "maric",
            Suite::Containment => "containment",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Devroye,
            Suite::Cc,
            Suite::Jiang,
            Suite::Maric,
            Suite::Containment,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s}")))
    }
}

/// Runs `suite`; `All` expands to the five named suites in order.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Ok(match suite {
        Suite::Devroye => vec![check_devroye_identities(opts)?],
        Suite::Cc => vec![check_cc_reduction(opts)?],
        Suite::Jiang => vec![check_jiang_containment(opts)?],
        Suite::Maric => vec![check_maric_wlog(opts)?],
        Suite::Containment => {
            let checks = default_pairs()?
                .iter()
                .map(|p| {
                    sampled_region_containment(p, opts.region_samples, opts.seed, opts.tol_region)
                })
                .collect::<Result<Vec<_>>>()?;
            vec![SuiteReport {
                suite: "containment".into(),
                checks,
            }]
        }
        Suite::All => {
            let mut out = Vec::new();
            for s in [
                Suite::Devroye,
                Suite::Cc,
                Suite::Jiang,
                Suite::Maric,
                Suite::Containment,
            ] {
                out.extend(run_suite(s, opts)?);
            }
            out
        }
    })
}

/// Decorrelated stream seed.
pub(crate) fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluates `f` at `count` consecutive seeds in parallel, in seed order.
pub(crate) fn per_seed<T: Send>(
    seed: u64,
    count: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<(u64, T)>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            f(s).map(|v| (s, v))
        })
        .collect()
}

/// Evaluates `f` at consecutive seeds until `wanted` of them return
/// `Some`, giving up after `max_attempts`. Batches run in parallel and the
/// accepted seeds are the first ones in seed order. Also returns the number
/// of seeds consumed.
pub(crate) fn first_accepted<T: Send>(
    seed: u64,
    wanted: usize,
    max_attempts: usize,
    f: impl Fn(u64) -> Result<Option<T>> + Sync,
) -> Result<(Vec<(u64, T)>, usize)> {
    const BATCH: usize = 256;
    let mut out = Vec::with_capacity(wanted);
    let mut tried = 0;
    while out.len() < wanted && tried < max_attempts {
        let n = BATCH.min(max_attempts - tried);
        let start = tried;
        let batch = per_seed(seed.wrapping_add(start as u64), n, &f)?;
        for (k, (s, v)) in batch.into_iter().enumerate() {
            if out.len() == wanted {
                break;
            }
            tried = start + k + 1;
            if let Some(v) = v {
                out.push((s, v));
            }
        }
    }
    Ok((out, tried))
}

/// Counts of `values` in decade buckets, for logging nonnegative gaps.
pub(crate) fn histogram(values: &[f64]) -> String {
    let edges = [0.0, 1e-9, 1e-6, 1e-3, 1e-1, f64::INFINITY];
    let names = [
        "<=0",
        "(0,1e-9]",
        "(1e-9,1e-6]",
        "(1e-6,1e-3]",
        "(1e-3,0.1]",
        ">0.1",
    ];
    let mut counts = [0usize; 6];
    for v in values {
        let k = if *v <= edges[0] {
            0
        } else {
            edges
                .iter()
                .skip(1)
                .position(|e| *v <= *e)
                .map_or(5, |p| p + 1)
        };
        counts[k] += 1;
    }
    names
        .iter()
        .zip(counts)
        .map(|(n, c)| format!("{n}: {c}"))
        .collect::<Vec<_>>()
        .join(", ")
}
