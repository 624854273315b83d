//! Declarative rate regions: rate variables, linear constraints with
//! mutual-information right-hand sides, projection to `(R1, R2)` and the
//! input factorization the region is a union over.

mod catalog;
mod correspondence;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::probability::{
    extend_through_channel_as, ChannelBinding, FactorKind, FactorizationSpec, JointDistribution,
    MiEvaluator, MiExpr, MiTerm, Parser, RandomVariableSet,
};

pub use catalog::{builtin_schema, manifest, Manifest, ManifestConstraint, ManifestSchema};
pub use correspondence::{CorrespondenceTable, CC_MERGE_TABLE, CC_TABLE, DMT_TABLE, JIANG_TABLE};

/// Tolerance of the factorization check run by [`instantiate`].
pub const FACTORIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchemaId {
    Rtd,
    RtdIn,
    DmtOut,
    Cc,
    Ccp,
    /// The `U11`-free Cao–Chen region written with split rates and binning
    /// rates, in the RTD variable names.
    CcpSplit,
    RtdCc,
    Jiang,
    RtdJiang,
    Maric,
}

impl SchemaId {
    pub const ALL: [SchemaId; 10] = [
        SchemaId::Rtd,
        SchemaId::RtdIn,
        SchemaId::DmtOut,
        SchemaId::Cc,
        SchemaId::Ccp,
        SchemaId::CcpSplit,
        SchemaId::RtdCc,
        SchemaId::Jiang,
        SchemaId::RtdJiang,
        SchemaId::Maric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaId::Rtd => "RTD",
            SchemaId::RtdIn => "RTD_IN",
            SchemaId::DmtOut => "DMT_OUT",
            SchemaId::Cc => "CC",
            SchemaId::Ccp => "CCP",
            SchemaId::CcpSplit => "CCP_SPLIT",
            SchemaId::RtdCc => "RTD_CC",
            SchemaId::Jiang => "JIANG",
            SchemaId::RtdJiang => "RTD_JIANG",
            SchemaId::Maric => "MARIC",
        }
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == wanted)
            .ok_or_else(|| Error::UnknownSchema(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateRole {
    Message,
    Binning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateVariable {
    pub name: String,
    pub role: RateRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    /// Pinned binning rate; behaves as a `<=`/`>=` pair.
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// `Σ coeff·rate (sense) rhs`, integer coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRateConstraint {
    pub label: String,
    pub coeffs: Vec<(String, i64)>,
    pub sense: Sense,
    pub rhs: MiExpr,
}

impl LinearRateConstraint {
    /// Parses `2 R2 + R1 <= I(..) - I(..)`.
    pub fn parse(label: &str, text: &str) -> Result<Self> {
        let mut p = Parser::new(text);
        let mut coeffs: Vec<(String, i64)> = Vec::new();
        loop {
            let c = match p.number() {
                Some(v) if v.fract() == 0.0 && v >= 1.0 => v as i64,
                Some(_) => return Err(p.error("coefficients are positive integers")),
                None => 1,
            };
            let name = p.ident()?;
            match coeffs.iter_mut().find(|(n, _)| *n == name) {
                Some(entry) => entry.1 += c,
                None => coeffs.push((name, c)),
            }
            if !p.eat('+') {
                break;
            }
        }
        let sense = if p.rest_starts_with("<=") {
            p.advance(2);
            Sense::Le
        } else if p.rest_starts_with(">=") {
            p.advance(2);
            Sense::Ge
        } else if p.eat('=') {
            Sense::Eq
        } else {
            return Err(p.error("expected `<=`, `>=` or `=`"));
        };
        let rhs = p.expr()?;
        Ok(Self {
            label: label.to_string(),
            coeffs,
            sense,
            rhs,
        })
    }

    pub fn coeff(&self, var: &str) -> i64 {
        self.coeffs
            .iter()
            .find(|(n, _)| n == var)
            .map_or(0, |(_, c)| *c)
    }
}

impl fmt::Display for LinearRateConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *c != 1 {
                write!(f, "{c} ")?;
            }
            f.write_str(n)?;
        }
        write!(f, " {} {}", self.sense, self.rhs)
    }
}

/// `R1` and `R2` as integer combinations of rate variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub r1: Vec<(String, i64)>,
    pub r2: Vec<(String, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSchema {
    pub id: SchemaId,
    /// Auxiliaries, channel inputs and channel outputs with default sizes.
    pub rvs: RandomVariableSet,
    /// Which schema variables are the channel's inputs and outputs.
    pub binding: ChannelBinding,
    /// Chain over every variable except the channel outputs.
    pub factorization: FactorizationSpec,
    pub rate_vars: Vec<RateVariable>,
    pub constraints: Vec<LinearRateConstraint>,
    pub projection: Projection,
    /// Rates of the parent region held at zero; absent from `rate_vars`.
    pub zeroed: Vec<String>,
}

impl RegionSchema {
    pub fn constraint(&self, label: &str) -> Option<&LinearRateConstraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    pub fn constraint_index(&self, label: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.label == label)
    }

    /// Variables generated by the factorization (everything but outputs).
    pub fn input_rvs(&self) -> RandomVariableSet {
        let outputs = [&self.binding.y1, &self.binding.y2];
        RandomVariableSet::new(
            self.rvs
                .names()
                .iter()
                .zip(self.rvs.sizes())
                .filter(|(n, _)| !outputs.contains(n))
                .map(|(n, s)| (n.clone(), *s)),
        )
        .expect("subset of a valid set")
    }

    /// Input variables with some sizes overridden.
    pub fn input_rvs_with(&self, sizes: &[(&str, usize)]) -> Result<RandomVariableSet> {
        let base = self.input_rvs();
        for (n, _) in sizes {
            base.index_of(n)?;
        }
        RandomVariableSet::new(base.names().iter().zip(base.sizes()).map(|(n, s)| {
            let s = sizes.iter().find(|(m, _)| m == n).map_or(*s, |(_, v)| *v);
            (n.clone(), s)
        }))
    }

    /// Structural checks: known variables everywhere, projection covers
    /// every message rate, factorization covers the inputs.
    pub fn validate(&self) -> Result<()> {
        let known = |v: &str| self.rate_vars.iter().any(|r| r.name == v);
        for c in &self.constraints {
            if c.coeffs.iter().all(|(_, k)| *k == 0) {
                return Err(Error::InvalidParameter(format!("{} has no rate", c.label)));
            }
            for (v, _) in &c.coeffs {
                if !known(v) {
                    return Err(Error::InvalidParameter(format!(
                        "{} uses undeclared rate {v}",
                        c.label
                    )));
                }
            }
            for v in c.rhs.variables() {
                self.rvs.index_of(v)?;
            }
        }
        for r in self
            .rate_vars
            .iter()
            .filter(|r| r.role == RateRole::Message)
        {
            let covered = self
                .projection
                .r1
                .iter()
                .chain(&self.projection.r2)
                .any(|(n, _)| *n == r.name);
            if !covered {
                return Err(Error::InvalidParameter(format!(
                    "message rate {} missing from the projection",
                    r.name
                )));
            }
        }
        self.factorization.validate(&self.input_rvs())
    }
}

/// One numeric row: `Σ coeffs[i]·x_i (sense) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub label: String,
    pub coeffs: Vec<i64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A schema evaluated at one distribution. All variables are nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSystem {
    pub vars: Vec<String>,
    pub rows: Vec<RateRow>,
    pub r1: Vec<i64>,
    pub r2: Vec<i64>,
}

impl RateSystem {
    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no rate variable {name}")))
    }

    pub fn row(&self, label: &str) -> Option<&RateRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Holds `var` at zero and removes it from the system.
    pub fn pin_zero(&self, var: &str) -> Result<RateSystem> {
        let j = self.var_index(var)?;
        let drop = |v: &[i64]| -> Vec<i64> {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, c)| *c)
                .collect()
        };
        let mut vars = self.vars.clone();
        vars.remove(j);
        let rows = self
            .rows
            .iter()
            .filter_map(|r| {
                let coeffs = drop(&r.coeffs);
                // A row left without variables is a constant condition; keep
                // it only if it can fail.
                if coeffs.iter().all(|c| *c == 0) {
                    let violated = match r.sense {
                        Sense::Le => r.rhs < 0.0,
                        Sense::Ge => r.rhs > 0.0,
                        Sense::Eq => r.rhs != 0.0,
                    };
                    if !violated {
                        return None;
                    }
                }
                Some(RateRow {
                    label: r.label.clone(),
                    coeffs,
                    sense: r.sense,
                    rhs: r.rhs,
                })
            })
            .collect();
        Ok(RateSystem {
            vars,
            rows,
            r1: drop(&self.r1),
            r2: drop(&self.r2),
        })
    }

    pub fn pin_zero_all<S: AsRef<str>>(&self, vars: &[S]) -> Result<RateSystem> {
        vars.iter()
            .try_fold(self.clone(), |s, v| s.pin_zero(v.as_ref()))
    }

    pub fn without_row(&self, label: &str) -> Result<RateSystem> {
        let mut out = self.clone();
        let before = out.rows.len();
        out.rows.retain(|r| r.label != label);
        if out.rows.len() == before {
            return Err(Error::InvalidParameter(format!("no row labelled {label}")));
        }
        Ok(out)
    }

    /// Loosens one row by `delta` bits (raises a `<=` bound, lowers a `>=`).
    pub fn relaxed(&self, index: usize, delta: f64) -> RateSystem {
        let mut out = self.clone();
        let r = &mut out.rows[index];
        match r.sense {
            Sense::Le => r.rhs += delta,
            Sense::Ge => r.rhs -= delta,
            Sense::Eq => {}
        }
        out
    }

    /// Worst violation of the system at `x` (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0f64, |w, v| w.max(-v));
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().zip(x).map(|(c, v)| *c as f64 * v).sum();
            let v = match r.sense {
                Sense::Le => lhs - r.rhs,
                Sense::Ge => r.rhs - lhs,
                Sense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

/// Checks every conditional independence the factorization implies, the
/// copy and function factors, and that the outputs only see the inputs
/// through the channel.
pub fn check_factorization(schema: &RegionSchema, d: &JointDistribution, tol: f64) -> Result<()> {
    let mut ev = MiEvaluator::new(d);
    let mut earlier: Vec<String> = Vec::new();
    for f in &schema.factorization.factors {
        let rest: Vec<String> = earlier
            .iter()
            .filter(|e| !f.given.contains(e))
            .cloned()
            .collect();
        if !rest.is_empty() {
            let t = MiTerm::new(&f.targets, &rest, &f.given)?;
            let v = ev.term(&t)?;
            if v > tol {
                return Err(Error::FactorizationViolation {
                    condition: t.to_string(),
                    value: v,
                });
            }
        }
        match f.kind {
            FactorKind::Free => {}
            FactorKind::Copy => {
                let a = d.rvs().index_of(&f.targets[0])?;
                let b = d.rvs().index_of(&f.given[0])?;
                let v = d.mismatch_mass(a, b);
                if v > tol {
                    return Err(Error::FactorizationViolation {
                        condition: format!("P({} != {})", f.targets[0], f.given[0]),
                        value: v,
                    });
                }
            }
            FactorKind::Function => {
                let mask = |names: &[String]| d.rvs().mask_of(names);
                let v = d.entropy_mask(mask(&f.targets)? | mask(&f.given)?)
                    - d.entropy_mask(mask(&f.given)?);
                if v > tol {
                    return Err(Error::FactorizationViolation {
                        condition: format!("H({} | {})", f.targets.join(","), f.given.join(",")),
                        value: v,
                    });
                }
            }
        }
        earlier.extend(f.targets.iter().cloned());
    }
    let b = &schema.binding;
    let others: Vec<String> = earlier
        .iter()
        .filter(|n| **n != b.x1 && **n != b.x2)
        .cloned()
        .collect();
    if !others.is_empty() {
        let t = MiTerm::new(
            &[b.y1.clone(), b.y2.clone()],
            &others,
            &[b.x1.clone(), b.x2.clone()],
        )?;
        let v = ev.term(&t)?;
        if v > tol {
            return Err(Error::FactorizationViolation {
                condition: t.to_string(),
                value: v,
            });
        }
    }
    Ok(())
}

fn same_names(schema: &RegionSchema, d: &JointDistribution) -> Result<()> {
    let want = schema.rvs.names();
    let have = d.rvs().names();
    if want.len() != have.len() || want.iter().any(|n| !have.contains(n)) {
        return Err(Error::AlphabetMismatch(format!(
            "{} expects variables [{}], distribution has [{}]",
            schema.id,
            want.join(", "),
            have.join(", ")
        )));
    }
    Ok(())
}

/// Evaluates every right-hand side of `schema` at `d` (which must include
/// the channel outputs), after checking the factorization.
pub fn instantiate(schema: &RegionSchema, d: &JointDistribution) -> Result<RateSystem> {
    same_names(schema, d)?;
    check_factorization(schema, d, FACTORIZATION_TOL)?;
    instantiate_unchecked(schema, d)
}

/// As [`instantiate`] without the factorization check.
pub fn instantiate_unchecked(schema: &RegionSchema, d: &JointDistribution) -> Result<RateSystem> {
    same_names(schema, d)?;
    let vars: Vec<String> = schema.rate_vars.iter().map(|r| r.name.clone()).collect();
    let dense = |coeffs: &[(String, i64)]| -> Result<Vec<i64>> {
        let mut out = vec![0; vars.len()];
        for (n, c) in coeffs {
            let j = vars
                .iter()
                .position(|v| v == n)
                .ok_or_else(|| Error::InvalidParameter(format!("undeclared rate {n}")))?;
            out[j] += c;
        }
        Ok(out)
    };
    let mut ev = MiEvaluator::new(d);
    let rows = schema
        .constraints
        .iter()
        .map(|c| {
            Ok(RateRow {
                label: c.label.clone(),
                coeffs: dense(&c.coeffs)?,
                sense: c.sense,
                rhs: ev.expr(&c.rhs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateSystem {
        r1: dense(&schema.projection.r1)?,
        r2: dense(&schema.projection.r2)?,
        vars,
        rows,
    })
}

/// Pushes an input distribution through `c` using the schema's binding and
/// instantiates the schema.
pub fn instantiate_with_channel(
    schema: &RegionSchema,
    inputs: &JointDistribution,
    c: &Channel,
) -> Result<RateSystem> {
    let d = extend_through_channel_as(inputs, c, &schema.binding)?;
    instantiate(schema, &d)
}

/// Constraints of the unified region that may be dropped once every rate
/// in the matching set is zero.
pub const DROPPABLE: [(&str, &[&str]); 4] = [
    ("1d", &["R2c", "R2pa", "R2pb", "R2pb'"]),
    ("1e", &["R2pa", "R2pb", "R2pb'"]),
    ("1g", &["R2pb", "R2pb'"]),
    ("1i", &["R1c", "R1c'", "R1pb", "R1pb'"]),
];

/// Indices of the constraints that may be dropped when all of `zeroed`
/// are held at zero.
pub fn droppable_constraints<S: AsRef<str>>(
    schema: &RegionSchema,
    zeroed: &[S],
) -> Result<Vec<usize>> {
    if schema.id != SchemaId::Rtd {
        return Err(Error::NotApplicable(schema.id.to_string()));
    }
    let zero = |v: &str| zeroed.iter().any(|z| z.as_ref() == v);
    Ok(DROPPABLE
        .iter()
        .filter(|(_, needs)| needs.iter().all(|v| zero(v)))
        .filter_map(|(label, _)| schema.constraint_index(label))
        .collect())
}
