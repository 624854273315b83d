//! Ordered factorizations of a joint law into conditional tables, and
//! samplers over them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{JointDistribution, Odometer, RandomVariableSet};
use crate::channel::renormalize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorKind {
    /// Arbitrary conditional law `p(targets | given)`.
    Free,
    /// `target = given` symbol by symbol.
    Copy,
    /// `targets` a deterministic function of `given`.
    Function,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub targets: Vec<String>,
    pub given: Vec<String>,
    pub kind: FactorKind,
}

/// Chain of conditional factors. Text form, one factor per `;`:
/// `U2c; X2|U2c; U1c,U1pb|X2; X1=f(X2,U1c); V=U2c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationSpec {
    pub factors: Vec<Factor>,
}

fn split_names(text: &str) -> Result<Vec<String>> {
    let names: Vec<String> = text
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    for n in &names {
        if !n
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        {
            return Err(Error::Parse {
                text: text.to_string(),
                reason: format!("bad variable name `{n}`"),
            });
        }
    }
    Ok(names)
}

impl FactorizationSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut factors = Vec::new();
        for piece in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let factor = if let Some((lhs, rhs)) = piece.split_once('=') {
                let targets = split_names(lhs)?;
                let rhs = rhs.trim();
                if let Some(args) = rhs.strip_prefix("f(").and_then(|r| r.strip_suffix(')')) {
                    Factor {
                        targets,
                        given: split_names(args)?,
                        kind: FactorKind::Function,
                    }
                } else {
                    let given = split_names(rhs)?;
                    if targets.len() != 1 || given.len() != 1 {
                        return Err(bad("a copy factor relates exactly one pair"));
                    }
                    Factor {
                        targets,
                        given,
                        kind: FactorKind::Copy,
                    }
                }
            } else {
                let (lhs, rhs) = piece.split_once('|').unwrap_or((piece, ""));
                Factor {
                    targets: split_names(lhs)?,
                    given: split_names(rhs)?,
                    kind: FactorKind::Free,
                }
            };
            if factor.targets.is_empty() {
                return Err(bad("factor without targets"));
            }
            factors.push(factor);
        }
        Ok(Self { factors })
    }

    /// Every target declared so far, in order.
    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.factors
            .iter()
            .flat_map(|f| f.targets.iter().map(String::as_str))
    }

    /// Checks that `rvs` is covered exactly once and that conditioning only
    /// looks backwards.
    pub fn validate(&self, rvs: &RandomVariableSet) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        for f in &self.factors {
            for g in &f.given {
                if !seen.contains(&g.as_str()) {
                    return Err(Error::SpecCoverage(format!(
                        "{g} is conditioned on before it is generated"
                    )));
                }
            }
            for t in &f.targets {
                if !rvs.contains(t) {
                    return Err(Error::UnknownVariable(t.clone()));
                }
                if seen.contains(&t.as_str()) {
                    return Err(Error::SpecCoverage(format!("{t} generated twice")));
                }
                seen.push(t);
            }
            if f.kind == FactorKind::Copy
                && rvs.size_of(&f.targets[0])? != rvs.size_of(&f.given[0])?
            {
                return Err(Error::AlphabetMismatch(format!(
                    "{} copies {} but their sizes differ",
                    f.targets[0], f.given[0]
                )));
            }
        }
        if let Some(missing) = rvs.names().iter().find(|n| !seen.contains(&n.as_str())) {
            return Err(Error::SpecCoverage(format!("{missing} has no factor")));
        }
        Ok(())
    }

    /// Applies a name map to every factor.
    pub fn renamed(&self, f: &impl Fn(&str) -> String) -> Self {
        let map = |v: &Vec<String>| v.iter().map(|n| f(n)).collect();
        Self {
            factors: self
                .factors
                .iter()
                .map(|x| Factor {
                    targets: map(&x.targets),
                    given: map(&x.given),
                    kind: x.kind,
                })
                .collect(),
        }
    }
}

impl fmt::Display for FactorizationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let t = x.targets.join(",");
            let g = x.given.join(",");
            match x.kind {
                FactorKind::Free if g.is_empty() => write!(f, "{t}")?,
                FactorKind::Free => write!(f, "{t}|{g}")?,
                FactorKind::Copy => write!(f, "{t}={g}")?,
                FactorKind::Function => write!(f, "{t}=f({g})")?,
            }
        }
        Ok(())
    }
}

/// One factor's conditional table: `rows` conditioning cells of `cols`
/// target cells each.
#[derive(Debug, Clone, PartialEq)]
struct Table {
    target_idx: Vec<usize>,
    given_idx: Vec<usize>,
    rows: usize,
    cols: usize,
    kind: FactorKind,
    p: Vec<f64>,
}

impl Table {
    fn row(&self, r: usize) -> &[f64] {
        &self.p[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.p[r * self.cols..(r + 1) * self.cols]
    }
}

/// Local changes applied by the frontier search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbMove {
    /// Convex mix of a row with a fresh Dirichlet draw.
    Mix { weight: f64 },
    /// Replace a row by a fresh draw.
    Resample,
    /// Put all of a row's mass on its largest entry.
    Snap,
    /// Flatten a row.
    Uniform,
}

/// Concrete conditional tables for a [`FactorizationSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTables {
    rvs: RandomVariableSet,
    spec: FactorizationSpec,
    tables: Vec<Table>,
}

fn mixed_index(digits: &[usize], idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * sizes[i] + digits[i])
}

fn dirichlet_row(rng: &mut impl Rng, len: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha is positive");
    let mut row: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
    let s: f64 = row.iter().sum();
    if s > 0.0 && s.is_finite() {
        row.iter_mut().for_each(|v| *v /= s);
        renormalize(&mut row);
    } else {
        row.iter_mut().for_each(|v| *v = 0.0);
        row[rng.random_range(0..len)] = 1.0;
    }
    row
}

impl FactorTables {
    fn skeleton(rvs: &RandomVariableSet, spec: &FactorizationSpec) -> Result<Vec<Table>> {
        spec.validate(rvs)?;
        let sizes = rvs.sizes();
        spec.factors
            .iter()
            .map(|f| {
                let target_idx = f
                    .targets
                    .iter()
                    .map(|t| rvs.index_of(t))
                    .collect::<Result<Vec<_>>>()?;
                let given_idx = f
                    .given
                    .iter()
                    .map(|t| rvs.index_of(t))
                    .collect::<Result<Vec<_>>>()?;
                let rows = given_idx.iter().map(|&i| sizes[i]).product();
                let cols = target_idx.iter().map(|&i| sizes[i]).product();
                let mut p = vec![0.0; rows * cols];
                if f.kind == FactorKind::Copy {
                    for r in 0..rows {
                        p[r * cols + r] = 1.0;
                    }
                }
                Ok(Table {
                    target_idx,
                    given_idx,
                    rows,
                    cols,
                    kind: f.kind,
                    p,
                })
            })
            .collect()
    }

    /// Draws every free row from a symmetric Dirichlet(`alpha`) and every
    /// function row as a uniformly chosen point mass.
    pub fn sample(
        rvs: &RandomVariableSet,
        spec: &FactorizationSpec,
        rng: &mut impl Rng,
        alpha: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet parameter {alpha}"
            )));
        }
        let mut tables = Self::skeleton(rvs, spec)?;
        for t in &mut tables {
            for r in 0..t.rows {
                match t.kind {
                    FactorKind::Copy => {}
                    FactorKind::Free => {
                        let row = dirichlet_row(rng, t.cols, alpha);
                        t.row_mut(r).copy_from_slice(&row);
                    }
                    FactorKind::Function => {
                        let c = rng.random_range(0..t.cols);
                        t.row_mut(r)[c] = 1.0;
                    }
                }
            }
        }
        Ok(Self {
            rvs: rvs.clone(),
            spec: spec.clone(),
            tables,
        })
    }

    /// Every variable deterministically at symbol 0 (copies follow their
    /// source).
    pub fn degenerate(rvs: &RandomVariableSet, spec: &FactorizationSpec) -> Result<Self> {
        let mut tables = Self::skeleton(rvs, spec)?;
        for t in tables.iter_mut().filter(|t| t.kind != FactorKind::Copy) {
            for r in 0..t.rows {
                t.row_mut(r)[0] = 1.0;
            }
        }
        Ok(Self {
            rvs: rvs.clone(),
            spec: spec.clone(),
            tables,
        })
    }

    /// Reads the conditionals of `d` along `spec`. Conditioning cells with
    /// no mass get a uniform row (or symbol 0 for function factors). The
    /// result reproduces `d` only if `d` factors along `spec`.
    pub fn from_joint(d: &JointDistribution, spec: &FactorizationSpec) -> Result<Self> {
        let rvs = d.rvs().clone();
        let mut tables = Self::skeleton(&rvs, spec)?;
        let sizes = rvs.sizes().to_vec();
        for t in tables.iter_mut().filter(|t| t.kind != FactorKind::Copy) {
            t.p.iter_mut().for_each(|v| *v = 0.0);
            let mut odo = Odometer::new(&sizes);
            let mut cell = 0;
            while let Some(dg) = odo.next_digits() {
                let r = mixed_index(dg, &t.given_idx, &sizes);
                let c = mixed_index(dg, &t.target_idx, &sizes);
                t.p[r * t.cols + c] += d.probs()[cell];
                cell += 1;
            }
            for r in 0..t.rows {
                let kind = t.kind;
                let row = t.row_mut(r);
                let s: f64 = row.iter().sum();
                if s > super::ZERO_MASS {
                    row.iter_mut().for_each(|v| *v /= s);
                    if kind == FactorKind::Function {
                        snap(row);
                    }
                    renormalize(row);
                } else if kind == FactorKind::Function {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    row[0] = 1.0;
                } else {
                    let n = row.len() as f64;
                    row.iter_mut().for_each(|v| *v = 1.0 / n);
                }
            }
        }
        Ok(Self {
            rvs,
            spec: spec.clone(),
            tables,
        })
    }

    pub fn rvs(&self) -> &RandomVariableSet {
        &self.rvs
    }

    pub fn spec(&self) -> &FactorizationSpec {
        &self.spec
    }

    /// Indices of the factors with free parameters.
    fn mutable_factors(&self) -> Vec<usize> {
        (0..self.tables.len())
            .filter(|&i| self.tables[i].kind != FactorKind::Copy && self.tables[i].cols > 1)
            .collect()
    }

    /// Applies `mv` to one uniformly chosen row of one uniformly chosen
    /// non-trivial factor. Function factors only accept point masses, so
    /// they are resampled whatever the move.
    pub fn perturb(&mut self, rng: &mut impl Rng, mv: PerturbMove, alpha: f64) {
        let candidates = self.mutable_factors();
        if candidates.is_empty() {
            return;
        }
        let t = &mut self.tables[candidates[rng.random_range(0..candidates.len())]];
        let r = rng.random_range(0..t.rows);
        let cols = t.cols;
        if t.kind == FactorKind::Function {
            let row = t.row_mut(r);
            row.iter_mut().for_each(|v| *v = 0.0);
            row[rng.random_range(0..cols)] = 1.0;
            return;
        }
        match mv {
            PerturbMove::Mix { weight } => {
                let fresh = dirichlet_row(rng, cols, alpha);
                let row = t.row_mut(r);
                for (v, f) in row.iter_mut().zip(fresh) {
                    *v = (1.0 - weight) * *v + weight * f;
                }
                renormalize(row);
            }
            PerturbMove::Resample => {
                let fresh = dirichlet_row(rng, cols, alpha);
                t.row_mut(r).copy_from_slice(&fresh);
            }
            PerturbMove::Snap => snap(t.row_mut(r)),
            PerturbMove::Uniform => t.row_mut(r).iter_mut().for_each(|v| *v = 1.0 / cols as f64),
        }
    }

    /// Product of all factors as a dense joint over `rvs`.
    pub fn joint(&self) -> JointDistribution {
        let sizes = self.rvs.sizes();
        let mut prob = Vec::with_capacity(self.rvs.cells());
        let mut odo = Odometer::new(sizes);
        while let Some(dg) = odo.next_digits() {
            let mut p = 1.0;
            for t in &self.tables {
                let r = mixed_index(dg, &t.given_idx, sizes);
                let c = mixed_index(dg, &t.target_idx, sizes);
                p *= t.row(r)[c];
                if p == 0.0 {
                    break;
                }
            }
            prob.push(p);
        }
        JointDistribution {
            rvs: self.rvs.clone(),
            prob,
        }
    }
}

fn snap(row: &mut [f64]) {
    let best = row
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b })
        .0;
    row.iter_mut().for_each(|v| *v = 0.0);
    row[best] = 1.0;
}

/// Samples a joint law factored along `spec` with Dirichlet(1) rows,
/// reproducibly from `seed`.
pub fn sample_factored(
    rvs: &RandomVariableSet,
    spec: &FactorizationSpec,
    seed: u64,
) -> Result<JointDistribution> {
    sample_factored_with(rvs, spec, seed, 1.0)
}

/// As [`sample_factored`] with a chosen Dirichlet concentration.
pub fn sample_factored_with(
    rvs: &RandomVariableSet,
    spec: &FactorizationSpec,
    seed: u64,
    alpha: f64,
) -> Result<JointDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(FactorTables::sample(rvs, spec, &mut rng, alpha)?.joint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{check_conditional_independence, mutual_information, MiExpr};

    fn vars(v: &[(&str, usize)]) -> RandomVariableSet {
        RandomVariableSet::new(v.iter().map(|(n, s)| (*n, *s))).unwrap()
    }

    #[test]
    fn single_variable_is_a_simplex_point() {
        let rvs = vars(&[("A", 2)]);
        let spec = FactorizationSpec::parse("A").unwrap();
        for seed in 0..20 {
            let d = sample_factored(&rvs, &spec, seed).unwrap();
            assert_eq!(d.probs().len(), 2);
            assert!(d.probs().iter().all(|&p| p >= 0.0));
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_root_restricts_support() {
        let rvs = vars(&[("U", 2), ("X", 3)]);
        let spec = FactorizationSpec::parse("U; X|U").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tables = FactorTables::sample(&rvs, &spec, &mut rng, 1.0).unwrap();
        tables.tables[0].p = vec![1.0, 0.0];
        let d = tables.joint();
        assert!(d.probs()[3..].iter().all(|&p| p == 0.0));
        assert!((d.probs()[..3].iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_errors() {
        let rvs = vars(&[("A", 2), ("B", 2)]);
        let spec = FactorizationSpec::parse("A").unwrap();
        assert!(matches!(
            sample_factored(&rvs, &spec, 0),
            Err(Error::SpecCoverage(_))
        ));
        let spec = FactorizationSpec::parse("A|B; B").unwrap();
        assert!(matches!(
            sample_factored(&rvs, &spec, 0),
            Err(Error::SpecCoverage(_))
        ));
    }

    #[test]
    fn deterministic_in_seed() {
        let rvs = vars(&[("A", 2), ("B", 3), ("C", 2)]);
        let spec = FactorizationSpec::parse("A; B|A; C=f(A,B)").unwrap();
        let a = sample_factored(&rvs, &spec, 99).unwrap();
        let b = sample_factored(&rvs, &spec, 99).unwrap();
        assert_eq!(a.probs(), b.probs());
    }

    #[test]
    fn parse_round_trip() {
        let text = "U2c; X2|U2c; U1c,U1pb|X2; X1=f(X2,U1c); V=U2c";
        let spec = FactorizationSpec::parse(text).unwrap();
        assert_eq!(spec.to_string(), text);
        assert_eq!(spec.factors[3].kind, FactorKind::Function);
        assert_eq!(spec.factors[4].kind, FactorKind::Copy);
        assert!(FactorizationSpec::parse("A,B=C").is_err());
    }

    #[test]
    fn copies_and_functions_hold() {
        let rvs = vars(&[("A", 3), ("B", 3), ("C", 2)]);
        let spec = FactorizationSpec::parse("A; B=A; C=f(A)").unwrap();
        let d = sample_factored(&rvs, &spec, 4).unwrap();
        assert!(d.mismatch_mass(0, 1) < 1e-15);
        assert!(d.entropy(&["A", "C"]).unwrap() - d.entropy(&["A"]).unwrap() < 1e-12);
    }

    #[test]
    fn common_parent_chain_is_conditionally_independent() {
        let rvs = vars(&[("X2", 2), ("U1c", 2), ("U1pb", 2)]);
        let spec = FactorizationSpec::parse("X2; U1c|X2; U1pb|X2").unwrap();
        for seed in 0..100 {
            let d = sample_factored(&rvs, &spec, seed).unwrap();
            assert!(
                check_conditional_independence(&d, &["U1c"], &["U1pb"], &["X2"], 1e-9).unwrap()
            );
        }
    }

    #[test]
    fn from_joint_recovers_factored_law() {
        let rvs = vars(&[("A", 2), ("B", 2), ("C", 3)]);
        let spec = FactorizationSpec::parse("A; B|A; C|A,B").unwrap();
        let d = sample_factored(&rvs, &spec, 12).unwrap();
        let back = FactorTables::from_joint(&d, &spec).unwrap().joint();
        for (x, y) in d.probs().iter().zip(back.probs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbation_keeps_rows_stochastic() {
        let rvs = vars(&[("A", 2), ("B", 3), ("C", 2)]);
        let spec = FactorizationSpec::parse("A; B|A; C=f(B)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = FactorTables::sample(&rvs, &spec, &mut rng, 1.0).unwrap();
        for i in 0..200 {
            let mv = match i % 4 {
                0 => PerturbMove::Mix { weight: 0.3 },
                1 => PerturbMove::Resample,
                2 => PerturbMove::Snap,
                _ => PerturbMove::Uniform,
            };
            t.perturb(&mut rng, mv, 0.5);
            let d = t.joint();
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let d = t.joint();
        let h = MiExpr::parse("I(C;B)").unwrap();
        let v = mutual_information(&d, &h.terms[0].1).unwrap();
        assert!((v - d.entropy(&["C"]).unwrap()).abs() < 1e-12);
    }
}
