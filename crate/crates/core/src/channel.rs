//! Discrete memoryless cognitive interference channels.
//!
//! A channel is a transition law `p(y1, y2 | x1, x2)`. Index 1 is the
//! cognitive pair (its encoder knows both messages), index 2 the primary pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validation tolerance on row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Default cap on any single alphabet size.
pub const DEFAULT_MAX_ALPHABET: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
        }
        Ok(Self {
            name: name.into(),
            size,
        })
    }
}

/// Transition tensor stored row-major over `(y1, y2, x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub y1: Alphabet,
    pub y2: Alphabet,
    transition: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    OrthogonalNoiseless,
    BscPair { eps1: f64, eps2: f64 },
    Random { seed: u64 },
}

/// On-disk form: `{"x1":n,"x2":n,"y1":n,"y2":n,"p":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
    pub p: Vec<f64>,
}

impl Channel {
    /// Builds a channel from a flattened `(y1, y2, x1, x2)` tensor. Only the
    /// shape is checked here; call [`validate_channel`] for the probability
    /// invariants.
    pub fn from_tensor(sizes: [usize; 4], transition: Vec<f64>) -> Result<Self> {
        let [x1, x2, y1, y2] = sizes;
        let expected = x1 * x2 * y1 * y2;
        if transition.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "transition has {} entries, expected {expected} for x1={x1} x2={x2} y1={y1} y2={y2}",
                transition.len()
            )));
        }
        Ok(Self {
            x1: Alphabet::new("X1", x1)?,
            x2: Alphabet::new("X2", x2)?,
            y1: Alphabet::new("Y1", y1)?,
            y2: Alphabet::new("Y2", y2)?,
            transition,
        })
    }

    pub fn from_fn(
        sizes: [usize; 4],
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let [x1, x2, y1, y2] = sizes;
        let mut t = Vec::with_capacity(x1 * x2 * y1 * y2);
        for a in 0..y1 {
            for b in 0..y2 {
                for c in 0..x1 {
                    for d in 0..x2 {
                        t.push(f(a, b, c, d));
                    }
                }
            }
        }
        Self::from_tensor(sizes, t)
    }

    #[inline]
    fn offset(&self, y1: usize, y2: usize, x1: usize, x2: usize) -> usize {
        ((y1 * self.y2.size + y2) * self.x1.size + x1) * self.x2.size + x2
    }

    /// `p(y1, y2 | x1, x2)`.
    #[inline]
    pub fn prob(&self, y1: usize, y2: usize, x1: usize, x2: usize) -> f64 {
        self.transition[self.offset(y1, y2, x1, x2)]
    }

    pub fn tensor(&self) -> &[f64] {
        &self.transition
    }

    pub fn sizes(&self) -> [usize; 4] {
        [self.x1.size, self.x2.size, self.y1.size, self.y2.size]
    }

    pub fn to_file(&self) -> ChannelFile {
        ChannelFile {
            x1: self.x1.size,
            x2: self.x2.size,
            y1: self.y1.size,
            y2: self.y2.size,
            p: self.transition.clone(),
        }
    }

    pub fn from_file(file: ChannelFile) -> Result<Self> {
        Self::from_tensor([file.x1, file.x2, file.y1, file.y2], file.p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }
}

/// Checks non-negativity and unit row sums, reporting the first offending
/// `(x1, x2)` slice in `(x1, x2)` lexicographic order.
pub fn validate_channel(c: &Channel) -> Result<()> {
    validate_channel_with_cap(c, usize::MAX)
}

pub fn validate_channel_with_cap(c: &Channel, max_alphabet: usize) -> Result<()> {
    for a in [&c.x1, &c.x2, &c.y1, &c.y2] {
        if a.size > max_alphabet {
            return Err(Error::InvalidParameter(format!(
                "alphabet {} has {} symbols, cap is {max_alphabet}",
                a.name, a.size
            )));
        }
    }
    for x1 in 0..c.x1.size {
        for x2 in 0..c.x2.size {
            let mut sum = 0.0;
            for y1 in 0..c.y1.size {
                for y2 in 0..c.y2.size {
                    let v = c.prob(y1, y2, x1, x2);
                    if v < 0.0 || !v.is_finite() {
                        return Err(Error::NegativeProbability {
                            x1,
                            x2,
                            y1,
                            y2,
                            value: v,
                        });
                    }
                    sum += v;
                }
            }
            let residual = 1.0 - sum;
            if residual.abs() > ROW_SUM_TOL {
                return Err(Error::RowSumMismatch { x1, x2, residual });
            }
        }
    }
    Ok(())
}

/// Test-fixture channels on binary alphabets.
pub fn canonical_channel(kind: ChannelKind) -> Result<Channel> {
    match kind {
        ChannelKind::OrthogonalNoiseless => bsc_pair(0.0, 0.0),
        ChannelKind::BscPair { eps1, eps2 } => bsc_pair(eps1, eps2),
        ChannelKind::Random { seed } => random_channel(seed, [2, 2, 2, 2]),
    }
}

fn bsc_pair(eps1: f64, eps2: f64) -> Result<Channel> {
    for e in [eps1, eps2] {
        if !(0.0..=0.5).contains(&e) {
            return Err(Error::InvalidParameter(format!(
                "crossover probability {e} outside [0, 1/2]"
            )));
        }
    }
    let flip = |x: usize, y: usize, e: f64| if x == y { 1.0 - e } else { e };
    Channel::from_fn([2, 2, 2, 2], |y1, y2, x1, x2| {
        flip(x1, y1, eps1) * flip(x2, y2, eps2)
    })
}

/// Each `(x1, x2)` row is an independent symmetric Dirichlet(1) draw over the
/// joint output alphabet. Reproducible from `seed`.
pub fn random_channel(seed: u64, sizes: [usize; 4]) -> Result<Channel> {
    let [x1, x2, y1, y2] = sizes;
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = Gamma::new(1.0, 1.0).expect("unit gamma");
    let outputs = y1 * y2;
    let mut t = vec![0.0; x1 * x2 * outputs];
    for a in 0..x1 {
        for b in 0..x2 {
            let mut row: Vec<f64> = (0..outputs).map(|_| gamma.sample(&mut rng)).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            renormalize(&mut row);
            for (k, v) in row.into_iter().enumerate() {
                let (c, d) = (k / y2, k % y2);
                t[((c * y2 + d) * x1 + a) * x2 + b] = v;
            }
        }
    }
    Channel::from_tensor(sizes, t)
}

/// Pushes the rounding residual of a probability row onto its largest entry so
/// the row sums to one within a few ulps.
pub(crate) fn renormalize(row: &mut [f64]) {
    let s: f64 = row.iter().sum();
    if let Some(max) = row
        .iter_mut()
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
    {
        *max += 1.0 - s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_channel_is_valid() {
        let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
        validate_channel(&c).unwrap();
        assert!(c.tensor().iter().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(c.prob(1, 0, 1, 0), 1.0);
        assert_eq!(c.prob(0, 0, 1, 0), 0.0);
    }

    #[test]
    fn zero_noise_bsc_matches_noiseless() {
        let a = canonical_channel(ChannelKind::BscPair {
            eps1: 0.0,
            eps2: 0.0,
        })
        .unwrap();
        let b = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_entry_is_reported() {
        let mut t = canonical_channel(ChannelKind::OrthogonalNoiseless)
            .unwrap()
            .tensor()
            .to_vec();
        t[3] = -0.1;
        let c = Channel::from_tensor([2, 2, 2, 2], t).unwrap();
        assert!(matches!(
            validate_channel(&c),
            Err(Error::NegativeProbability { .. })
        ));
    }

    #[test]
    fn half_scaled_row_reports_residual() {
        let base = canonical_channel(ChannelKind::BscPair {
            eps1: 0.2,
            eps2: 0.3,
        })
        .unwrap();
        let c = Channel::from_fn([2, 2, 2, 2], |y1, y2, x1, x2| {
            let v = base.prob(y1, y2, x1, x2);
            if (x1, x2) == (1, 0) {
                0.5 * v
            } else {
                v
            }
        })
        .unwrap();
        match validate_channel(&c) {
            Err(Error::RowSumMismatch { x1, x2, residual }) => {
                assert_eq!((x1, x2), (1, 0));
                assert!((residual - 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_is_reproducible() {
        let a = canonical_channel(ChannelKind::Random { seed: 42 }).unwrap();
        let b = canonical_channel(ChannelKind::Random { seed: 42 }).unwrap();
        let bits = |c: &Channel| c.tensor().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = canonical_channel(ChannelKind::Random { seed: 43 }).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn random_passes_validation_for_many_seeds() {
        for seed in 0..1000 {
            let c = canonical_channel(ChannelKind::Random { seed }).unwrap();
            validate_channel(&c).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn bsc_rejects_out_of_range() {
        assert!(matches!(
            canonical_channel(ChannelKind::BscPair {
                eps1: 0.6,
                eps2: 0.0
            }),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn json_rejects_length_mismatch() {
        let err = Channel::from_json(r#"{"x1":2,"x2":2,"y1":2,"y2":2,"p":[1.0,0.0]}"#);
        assert!(matches!(err, Err(Error::ShapeMismatch(_))));
        let c = canonical_channel(ChannelKind::Random { seed: 5 }).unwrap();
        let back = Channel::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn alphabet_cap() {
        let c = random_channel(1, [9, 2, 2, 2]).unwrap();
        validate_channel(&c).unwrap();
        assert!(validate_channel_with_cap(&c, DEFAULT_MAX_ALPHABET).is_err());
    }
}
