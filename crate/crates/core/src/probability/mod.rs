//! Joint distributions over named discrete random variables, entropies and
//! conditional mutual informations (in bits).

mod expr;
mod factor;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{Error, Result};

pub(crate) use expr::Parser;
pub use expr::{MiExpr, MiTerm};
pub use factor::{
    sample_factored, sample_factored_with, Factor, FactorKind, FactorTables, FactorizationSpec,
    PerturbMove,
};

/// Total-mass tolerance for a joint distribution.
pub const MASS_TOL: f64 = 1e-12;
/// Magnitude below which a negative mutual information is rounding noise.
pub const MI_CLAMP: f64 = 1e-12;
/// Probabilities at or below this are treated as zero mass.
pub const ZERO_MASS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomVariableSet {
    names: Vec<String>,
    sizes: Vec<usize>,
}

impl RandomVariableSet {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut names = Vec::new();
        let mut sizes = Vec::new();
        for (n, s) in vars {
            let n = n.into();
            if s == 0 {
                return Err(Error::InvalidParameter(format!("variable {n} has size 0")));
            }
            if names.contains(&n) {
                return Err(Error::InvalidParameter(format!("duplicate variable {n}")));
            }
            names.push(n);
            sizes.push(s);
        }
        if names.len() > 64 {
            return Err(Error::InvalidParameter("at most 64 variables".into()));
        }
        Ok(Self { names, sizes })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn size_of(&self, name: &str) -> Result<usize> {
        Ok(self.sizes[self.index_of(name)?])
    }

    /// Number of cells in the product space.
    pub fn cells(&self) -> usize {
        self.sizes.iter().product()
    }

    pub(crate) fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<u64> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | 1 << self.index_of(n.as_ref())?))
    }
}

/// Dense probability tensor, row-major over `rvs` in declared order (the last
/// variable varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rvs: RandomVariableSet,
    prob: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub names: Vec<String>,
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
}

/// Iterates the digits of every cell of a product space in row-major order.
pub(crate) struct Odometer<'a> {
    sizes: &'a [usize],
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> Odometer<'a> {
    pub(crate) fn new(sizes: &'a [usize]) -> Self {
        Self {
            sizes,
            digits: vec![0; sizes.len()],
            started: false,
            done: sizes.contains(&0),
        }
    }

    pub(crate) fn next_digits(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for i in (0..self.sizes.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.sizes[i] {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
        self.done = true;
        None
    }
}

impl JointDistribution {
    pub fn new(rvs: RandomVariableSet, prob: Vec<f64>) -> Result<Self> {
        if prob.len() != rvs.cells() {
            return Err(Error::ShapeMismatch(format!(
                "tensor has {} entries, variable set needs {}",
                prob.len(),
                rvs.cells()
            )));
        }
        if let Some(v) = prob.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid probability {v}")));
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(Self { rvs, prob })
    }

    /// Tabulates `f` at every cell (digits in declared order).
    pub fn from_fn(rvs: RandomVariableSet, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let mut prob = Vec::with_capacity(rvs.cells());
        let mut od = Odometer::new(rvs.sizes());
        while let Some(d) = od.next_digits() {
            prob.push(f(d));
        }
        Self::new(rvs, prob)
    }

    /// Point mass at index 0 of every variable.
    pub fn degenerate(rvs: RandomVariableSet) -> Self {
        let mut prob = vec![0.0; rvs.cells()];
        prob[0] = 1.0;
        Self { rvs, prob }
    }

    pub fn rvs(&self) -> &RandomVariableSet {
        &self.rvs
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            names: self.rvs.names.clone(),
            sizes: self.rvs.sizes.clone(),
            p: self.prob.clone(),
        }
    }

    pub fn from_file(f: DistributionFile) -> Result<Self> {
        if f.names.len() != f.sizes.len() {
            return Err(Error::ShapeMismatch(
                "names and sizes differ in length".into(),
            ));
        }
        let rvs = RandomVariableSet::new(f.names.into_iter().zip(f.sizes))?;
        Self::new(rvs, f.p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    /// Marginal over the variables selected by `mask`, in declared order.
    fn marginal_mask(&self, mask: u64) -> (Vec<usize>, Vec<f64>) {
        let kept: Vec<usize> = (0..self.rvs.len()).filter(|i| mask >> i & 1 == 1).collect();
        let out_sizes: Vec<usize> = kept.iter().map(|&i| self.rvs.sizes[i]).collect();
        let mut out_stride = vec![0usize; self.rvs.len()];
        let mut s = 1;
        for &i in kept.iter().rev() {
            out_stride[i] = s;
            s *= self.rvs.sizes[i];
        }
        let mut out = vec![0.0; s];
        let mut odo = Odometer::new(&self.rvs.sizes);
        let mut cell = 0;
        while let Some(d) = odo.next_digits() {
            let p = self.prob[cell];
            cell += 1;
            if p == 0.0 {
                continue;
            }
            let idx: usize = d.iter().zip(&out_stride).map(|(a, b)| a * b).sum();
            out[idx] += p;
        }
        (out_sizes, out)
    }

    /// Sums out every variable not in `keep`; the result keeps the declared
    /// order of `self`.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<JointDistribution> {
        let mask = self.rvs.mask_of(keep)?;
        let (sizes, prob) = self.marginal_mask(mask);
        let names = (0..self.rvs.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.rvs.names[i].clone());
        Ok(JointDistribution {
            rvs: RandomVariableSet::new(names.zip(sizes))?,
            prob,
        })
    }

    /// Entropy in bits of the variables in `mask`.
    pub(crate) fn entropy_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let (_, m) = self.marginal_mask(mask);
        entropy_bits(&m)
    }

    pub fn entropy<S: AsRef<str>>(&self, vars: &[S]) -> Result<f64> {
        Ok(self.entropy_mask(self.rvs.mask_of(vars)?))
    }

    /// Renames variables; names absent from `map` are kept.
    pub fn renamed(&self, map: &[(&str, &str)]) -> Result<JointDistribution> {
        let names = self.rvs.names.iter().map(|n| {
            map.iter()
                .find(|(from, _)| from == n)
                .map_or_else(|| n.clone(), |(_, to)| to.to_string())
        });
        Ok(JointDistribution {
            rvs: RandomVariableSet::new(names.zip(self.rvs.sizes.iter().copied()))?,
            prob: self.prob.clone(),
        })
    }

    /// Replaces `into` by the pair `(absorbed, into)` and makes `absorbed`
    /// degenerate (size 1). Both names are kept, so expressions written for
    /// the original variable set still evaluate.
    pub fn merge_into(&self, absorbed: &str, into: &str) -> Result<JointDistribution> {
        let a = self.rvs.index_of(absorbed)?;
        let b = self.rvs.index_of(into)?;
        if a == b {
            return Err(Error::InvalidParameter(
                "cannot merge a variable into itself".into(),
            ));
        }
        let mut sizes = self.rvs.sizes.clone();
        sizes[b] = self.rvs.sizes[a] * self.rvs.sizes[b];
        sizes[a] = 1;
        let rvs =
            RandomVariableSet::new(self.rvs.names.iter().cloned().zip(sizes.iter().copied()))?;
        let mut stride = vec![1usize; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * sizes[i + 1];
        }
        let mut prob = vec![0.0; rvs.cells()];
        let mut odo = Odometer::new(&self.rvs.sizes);
        let mut cell = 0;
        let inner = self.rvs.sizes[b];
        while let Some(d) = odo.next_digits() {
            let mut idx = 0;
            for (i, &digit) in d.iter().enumerate() {
                let digit = if i == a {
                    0
                } else if i == b {
                    d[a] * inner + digit
                } else {
                    digit
                };
                idx += digit * stride[i];
            }
            prob[idx] += self.prob[cell];
            cell += 1;
        }
        Ok(JointDistribution { rvs, prob })
    }

    /// Appends a size-1 variable.
    pub fn with_constant(&self, name: &str) -> Result<JointDistribution> {
        let vars = self
            .rvs
            .names
            .iter()
            .cloned()
            .zip(self.rvs.sizes.iter().copied())
            .chain([(name.to_string(), 1)]);
        Ok(JointDistribution {
            rvs: RandomVariableSet::new(vars)?,
            prob: self.prob.clone(),
        })
    }

    /// Enlarges the alphabet of `name` to `size`; new symbols get no mass.
    pub fn resized(&self, name: &str, size: usize) -> Result<JointDistribution> {
        let k = self.rvs.index_of(name)?;
        if size < self.rvs.sizes[k] {
            return Err(Error::InvalidParameter(format!(
                "cannot shrink {name} from {} to {size}",
                self.rvs.sizes[k]
            )));
        }
        let mut sizes = self.rvs.sizes.clone();
        sizes[k] = size;
        let rvs =
            RandomVariableSet::new(self.rvs.names.iter().cloned().zip(sizes.iter().copied()))?;
        let mut prob = Vec::with_capacity(rvs.cells());
        let mut odo = Odometer::new(&sizes);
        let old = &self.rvs.sizes;
        while let Some(d) = odo.next_digits() {
            if d[k] >= old[k] {
                prob.push(0.0);
                continue;
            }
            let idx = d.iter().zip(old).fold(0, |acc, (x, s)| acc * s + x);
            prob.push(self.prob[idx]);
        }
        Ok(JointDistribution { rvs, prob })
    }

    /// Total mass of cells where two equally sized variables disagree.
    pub(crate) fn mismatch_mass(&self, a: usize, b: usize) -> f64 {
        let mut odo = Odometer::new(&self.rvs.sizes);
        let mut cell = 0;
        let mut mass = 0.0;
        while let Some(d) = odo.next_digits() {
            if d[a] != d[b] {
                mass += self.prob[cell];
            }
            cell += 1;
        }
        mass
    }
}

pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > ZERO_MASS)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// Binary entropy function in bits.
pub fn h2(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

/// Evaluates mutual-information terms against one distribution, caching the
/// entropy of every variable subset it touches.
pub struct MiEvaluator<'a> {
    d: &'a JointDistribution,
    cache: HashMap<u64, f64>,
}

impl<'a> MiEvaluator<'a> {
    pub fn new(d: &'a JointDistribution) -> Self {
        Self {
            d,
            cache: HashMap::new(),
        }
    }

    fn h(&mut self, mask: u64) -> f64 {
        if let Some(&v) = self.cache.get(&mask) {
            return v;
        }
        let v = self.d.entropy_mask(mask);
        self.cache.insert(mask, v);
        v
    }

    pub fn term(&mut self, t: &MiTerm) -> Result<f64> {
        let rvs = self.d.rvs();
        let a = rvs.mask_of(&t.left)?;
        let b = rvs.mask_of(&t.right)?;
        let c = rvs.mask_of(&t.given)?;
        let v = self.h(a | c) + self.h(b | c) - self.h(a | b | c) - self.h(c);
        Ok(if v < 0.0 && v > -MI_CLAMP { 0.0 } else { v })
    }

    pub fn expr(&mut self, e: &MiExpr) -> Result<f64> {
        e.terms.iter().try_fold(e.constant, |acc, (sign, t)| {
            Ok(acc + f64::from(*sign) * self.term(t)?)
        })
    }
}

/// `I(A; B | C)` in bits.
pub fn mutual_information(d: &JointDistribution, t: &MiTerm) -> Result<f64> {
    MiEvaluator::new(d).term(t)
}

pub fn evaluate_expr(d: &JointDistribution, e: &MiExpr) -> Result<f64> {
    MiEvaluator::new(d).expr(e)
}

/// True iff `I(A; B | C) <= tol`.
pub fn check_conditional_independence<S: AsRef<str>>(
    d: &JointDistribution,
    a: &[S],
    b: &[S],
    given: &[S],
    tol: f64,
) -> Result<bool> {
    let t = MiTerm::new(a, b, given)?;
    Ok(mutual_information(d, &t)? <= tol)
}

/// Names of the variables that connect a distribution to a channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelBinding {
    pub x1: String,
    pub x2: String,
    pub y1: String,
    pub y2: String,
}

impl Default for ChannelBinding {
    fn default() -> Self {
        Self {
            x1: "X1".into(),
            x2: "X2".into(),
            y1: "Y1".into(),
            y2: "Y2".into(),
        }
    }
}

impl ChannelBinding {
    pub fn new(x1: &str, x2: &str, y1: &str, y2: &str) -> Self {
        Self {
            x1: x1.into(),
            x2: x2.into(),
            y1: y1.into(),
            y2: y2.into(),
        }
    }
}

/// Appends the channel outputs `Y1, Y2` to a distribution over inputs and
/// auxiliaries: `p(.., y1, y2) = p(..) p(y1, y2 | x1, x2)`.
pub fn extend_through_channel(d: &JointDistribution, c: &Channel) -> Result<JointDistribution> {
    extend_through_channel_as(d, c, &ChannelBinding::default())
}

pub fn extend_through_channel_as(
    d: &JointDistribution,
    c: &Channel,
    binding: &ChannelBinding,
) -> Result<JointDistribution> {
    let rvs = d.rvs();
    let ix1 = rvs.index_of(&binding.x1)?;
    let ix2 = rvs.index_of(&binding.x2)?;
    for (name, have, want) in [
        (&binding.x1, rvs.sizes()[ix1], c.x1.size),
        (&binding.x2, rvs.sizes()[ix2], c.x2.size),
    ] {
        if have != want {
            return Err(Error::AlphabetMismatch(format!(
                "{name} has {have} symbols but the channel input has {want}"
            )));
        }
    }
    for y in [&binding.y1, &binding.y2] {
        if rvs.contains(y) {
            return Err(Error::AlphabetMismatch(format!(
                "output {y} already present"
            )));
        }
    }
    let (ny1, ny2) = (c.y1.size, c.y2.size);
    let out_rvs = RandomVariableSet::new(
        rvs.names()
            .iter()
            .cloned()
            .zip(rvs.sizes().iter().copied())
            .chain([(binding.y1.clone(), ny1), (binding.y2.clone(), ny2)]),
    )?;
    let mut prob = Vec::with_capacity(out_rvs.cells());
    let mut odo = Odometer::new(rvs.sizes());
    let mut cell = 0;
    while let Some(digits) = odo.next_digits() {
        let p = d.prob[cell];
        cell += 1;
        let (x1, x2) = (digits[ix1], digits[ix2]);
        for y1 in 0..ny1 {
            for y2 in 0..ny2 {
                prob.push(p * c.prob(y1, y2, x1, x2));
            }
        }
    }
    Ok(JointDistribution { rvs: out_rvs, prob })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{canonical_channel, ChannelKind};

    fn vars(v: &[(&str, usize)]) -> RandomVariableSet {
        RandomVariableSet::new(v.iter().map(|(n, s)| (*n, *s))).unwrap()
    }

    fn term(s: &str) -> MiTerm {
        MiExpr::parse(s).unwrap().terms.remove(0).1
    }

    /// A uniform, B = A xor N with N ~ Bernoulli(eps).
    fn noisy_copy(eps: f64) -> JointDistribution {
        JointDistribution::new(
            vars(&[("A", 2), ("B", 2)]),
            vec![0.5 * (1.0 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1.0 - eps)],
        )
        .unwrap()
    }

    fn uniform_inputs() -> JointDistribution {
        JointDistribution::new(vars(&[("X1", 2), ("X2", 2)]), vec![0.25; 4]).unwrap()
    }

    #[test]
    fn independent_and_equal_bits() {
        let ind = JointDistribution::new(vars(&[("A", 2), ("B", 2)]), vec![0.25; 4]).unwrap();
        assert_eq!(mutual_information(&ind, &term("I(A;B)")).unwrap(), 0.0);
        let eq = noisy_copy(0.0);
        assert!((mutual_information(&eq, &term("I(A;B)")).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bsc_mutual_information_matches_binary_entropy() {
        // Oracle: 1 - h2(eps), h2 evaluated directly from its definition.
        let eps: f64 = 0.11;
        let oracle = 1.0 + eps * eps.log2() + (1.0 - eps) * (1.0 - eps).log2();
        let v = mutual_information(&noisy_copy(eps), &term("I(A;B)")).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.500_05).abs() < 1e-4);
    }

    #[test]
    fn channel_extension_examples() {
        let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
        let d = extend_through_channel(&uniform_inputs(), &c).unwrap();
        assert!((mutual_information(&d, &term("I(Y1;X1)")).unwrap() - 1.0).abs() < 1e-12);

        let eps: f64 = 0.11;
        let c = canonical_channel(ChannelKind::BscPair {
            eps1: eps,
            eps2: eps,
        })
        .unwrap();
        let d = extend_through_channel(&uniform_inputs(), &c).unwrap();
        let oracle = 1.0 + eps * eps.log2() + (1.0 - eps) * (1.0 - eps).log2();
        assert!((mutual_information(&d, &term("I(Y1;X1)")).unwrap() - oracle).abs() < 1e-12);
        assert!((mutual_information(&d, &term("I(Y2;X2)")).unwrap() - oracle).abs() < 1e-12);

        // Output row independent of the inputs.
        let c = Channel::from_fn([2, 2, 2, 2], |y1, y2, _, _| {
            [0.1, 0.2, 0.3, 0.4][y1 * 2 + y2]
        })
        .unwrap();
        let d = extend_through_channel(&uniform_inputs(), &c).unwrap();
        for t in ["I(Y1;X1)", "I(Y2;X1,X2)", "I(Y1,Y2;X1,X2)"] {
            assert!(mutual_information(&d, &term(t)).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn extension_checks_alphabets() {
        let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
        let d = JointDistribution::new(vars(&[("X1", 3), ("X2", 2)]), vec![1.0 / 6.0; 6]).unwrap();
        assert!(matches!(
            extend_through_channel(&d, &c),
            Err(Error::AlphabetMismatch(_))
        ));
        let d = JointDistribution::new(vars(&[("X1", 2)]), vec![0.5; 2]).unwrap();
        assert!(matches!(
            extend_through_channel(&d, &c),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn marginalize_examples() {
        let d = JointDistribution::new(
            vars(&[("A", 2), ("B", 3)]),
            vec![
                0.1 * 0.2,
                0.1 * 0.3,
                0.1 * 0.5,
                0.9 * 0.2,
                0.9 * 0.3,
                0.9 * 0.5,
            ],
        )
        .unwrap();
        assert_eq!(d.marginalize(&["A", "B"]).unwrap(), d);
        let none = d.marginalize::<&str>(&[]).unwrap();
        assert_eq!(none.probs().len(), 1);
        assert!((none.probs()[0] - 1.0).abs() < 1e-12);
        let b = d.marginalize(&["B"]).unwrap();
        for (x, y) in b.probs().iter().zip([0.2, 0.3, 0.5]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(matches!(
            d.marginalize(&["C"]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn expression_examples() {
        let d = noisy_copy(0.2);
        let e = MiExpr::parse("I(A;B) - I(A;B)").unwrap();
        assert_eq!(evaluate_expr(&d, &e).unwrap(), 0.0);
        let e = MiExpr::parse("I(A;B) + 0.25").unwrap();
        let v = evaluate_expr(&d, &e).unwrap();
        assert!((v - (1.0 - h2(0.2) + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn conditional_independence_examples() {
        let ind = JointDistribution::new(vars(&[("A", 2), ("B", 2)]), vec![0.25; 4]).unwrap();
        assert!(check_conditional_independence(&ind, &["A"], &["B"], &[], 1e-9).unwrap());
        assert!(
            !check_conditional_independence(&noisy_copy(0.0), &["A"], &["B"], &[], 1e-9).unwrap()
        );
    }

    #[test]
    fn merge_preserves_joint_information() {
        let d = JointDistribution::new(
            vars(&[("A", 2), ("B", 2), ("C", 2)]),
            vec![0.05, 0.1, 0.15, 0.2, 0.1, 0.05, 0.25, 0.1],
        )
        .unwrap();
        let m = d.merge_into("A", "B").unwrap();
        assert_eq!(m.rvs().sizes(), &[1, 4, 2]);
        let before = mutual_information(&d, &term("I(A,B;C)")).unwrap();
        let after = mutual_information(&m, &term("I(B;C)")).unwrap();
        assert!((before - after).abs() < 1e-12);
        assert_eq!(mutual_information(&m, &term("I(A;C)")).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let d = noisy_copy(0.3);
        assert_eq!(
            JointDistribution::from_json(&d.to_json().unwrap()).unwrap(),
            d
        );
        assert!(JointDistribution::from_json(r#"{"names":["A"],"sizes":[2],"p":[1.0]}"#).is_err());
    }

    #[test]
    fn constants_and_padding_keep_information() {
        let d = noisy_copy(0.2);
        let c = d.with_constant("Z").unwrap();
        assert_eq!(c.rvs().sizes(), &[2, 2, 1]);
        let r = d.resized("B", 3).unwrap();
        assert_eq!(r.probs().len(), 6);
        assert_eq!(
            r.marginalize(&["A"]).unwrap().probs(),
            d.marginalize(&["A"]).unwrap().probs()
        );
        let i = mutual_information(&d, &term("I(A;B)")).unwrap();
        assert!((mutual_information(&r, &term("I(A;B)")).unwrap() - i).abs() < 1e-12);
        assert!((mutual_information(&c, &term("I(A;B|Z)")).unwrap() - i).abs() < 1e-12);
        assert!(d.resized("B", 1).is_err());
    }
}
