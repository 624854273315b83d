//! Derivative-free search for the outer boundary of a region's union over
//! input distributions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::polytope::{fme_project, sig12, Polytope2D};
use crate::probability::{extend_through_channel_as, FactorTables, JointDistribution, PerturbMove};
use crate::region::{builtin_schema, instantiate_unchecked, RegionSchema, SchemaId};

use super::mix;

/// Search settings for [`trace_frontier_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierOptions {
    /// Evaluations per weight.
    pub budget: usize,
    /// Number of weights λ in [0, 1].
    pub grid: usize,
    pub seed: u64,
    /// Recorded in the result.
    pub channel_id: String,
    /// Dirichlet concentration of fresh rows.
    pub alpha: f64,
    /// Input laws (over the schema's input variables) offered as starting
    /// points besides random draws.
    pub warm_starts: Vec<JointDistribution>,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        Self {
            budget: 2000,
            grid: 21,
            seed: 1,
            channel_id: "custom".into(),
            alpha: 1.0,
            warm_starts: Vec::new(),
        }
    }
}

/// A boundary point with the weight that found it and the seed of its
/// search chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierResult {
    pub channel: String,
    pub schema: SchemaId,
    /// Best support point per weight, in weight order; weights whose
    /// search found no feasible law are absent.
    pub points: Vec<FrontierPoint>,
    /// Input law achieving each entry of `points`.
    pub inputs: Vec<JointDistribution>,
    /// Non-dominated vertices of the best regions, by increasing R1.
    pub pareto: Vec<FrontierPoint>,
}

impl FrontierResult {
    /// Best value of λ·R1 + (1−λ)·R2 over the Pareto set.
    pub fn support(&self, lambda: f64) -> f64 {
        self.pareto
            .iter()
            .map(|p| lambda * p.r1 + (1.0 - lambda) * p.r2)
            .fold(0.0, f64::max)
    }

    /// `lambda,R1,R2,seed` rows of the Pareto set.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,R1,R2,seed\n");
        for p in &self.pareto {
            out.push_str(&format!(
                "{},{},{},{}\n",
                sig12(p.lambda),
                sig12(p.r1),
                sig12(p.r2),
                p.seed
            ));
        }
        out
    }
}

/// Reads the rows written by [`FrontierResult::to_csv`].
pub fn parse_frontier_csv(text: &str) -> Result<Vec<FrontierPoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "lambda,R1,R2,seed" => {}
        other => {
            return Err(Error::Parse {
                text: other.unwrap_or_default().into(),
                reason: "expected header lambda,R1,R2,seed".into(),
            })
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let bad = |reason: &str| Error::Parse {
                text: l.into(),
                reason: reason.into(),
            };
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(bad("expected four fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            Ok(FrontierPoint {
                lambda: num(f[0])?,
                r1: num(f[1])?,
                r2: num(f[2])?,
                seed: f[3].parse().map_err(|_| bad("bad seed"))?,
            })
        })
        .collect()
}

/// [`trace_frontier_with`] with default weights and Dirichlet(1) moves.
pub fn trace_frontier(
    schema: SchemaId,
    channel: &Channel,
    budget: usize,
    seed: u64,
) -> Result<FrontierResult> {
    trace_frontier_with(
        schema,
        channel,
        &FrontierOptions {
            budget,
            seed,
            ..FrontierOptions::default()
        },
    )
}

struct Evaluated {
    tables: FactorTables,
    score: f64,
    region: Option<Polytope2D>,
}

fn evaluate(
    schema: &RegionSchema,
    channel: &Channel,
    tables: FactorTables,
    lambda: f64,
) -> Evaluated {
    let region = extend_through_channel_as(&tables.joint(), channel, &schema.binding)
        .and_then(|d| instantiate_unchecked(schema, &d))
        .and_then(|s| fme_project(&s));
    let (score, region) = match region {
        Ok(p) => (p.support(lambda).0, Some(p)),
        Err(Error::Infeasible { violation }) => (-1e3 - violation, None),
        Err(_) => (f64::NEG_INFINITY, None),
    };
    Evaluated {
        tables,
        score,
        region,
    }
}

fn random_move(rng: &mut impl Rng) -> PerturbMove {
    match rng.random_range(0..8) {
        0..=3 => PerturbMove::Mix {
            weight: rng.random_range(0.02..0.5),
        },
        4 | 5 => PerturbMove::Resample,
        6 => PerturbMove::Snap,
        _ => PerturbMove::Uniform,
    }
}

/// Maximises λ·R1 + (1−λ)·R2 over input laws for each weight on an even
/// grid. Each weight runs its own chain: a pool of random draws, the
/// degenerate law and the warm starts is scored, the best one is then
/// hill-climbed by single-row perturbations, accepting ties. Infeasible
/// laws score below every feasible one, ordered by constraint violation.
/// Deterministic in `opts.seed`.
pub fn trace_frontier_with(
    schema: SchemaId,
    channel: &Channel,
    opts: &FrontierOptions,
) -> Result<FrontierResult> {
    if opts.budget == 0 || opts.grid == 0 {
        return Err(Error::InvalidParameter(
            "budget and grid must be positive".into(),
        ));
    }
    if !(opts.alpha > 0.0 && opts.alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Dirichlet parameter {}",
            opts.alpha
        )));
    }
    let s = builtin_schema(schema)?;
    let rvs = s.input_rvs();
    let warm = opts
        .warm_starts
        .iter()
        .map(|d| FactorTables::from_joint(d, &s.factorization))
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = if opts.grid == 1 {
        vec![0.5]
    } else {
        (0..opts.grid)
            .map(|k| k as f64 / (opts.grid - 1) as f64)
            .collect()
    };

    let best: Vec<(f64, u64, Evaluated)> = lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let chain_seed = mix(opts.seed, k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(chain_seed);
            let mut used = 0;
            let mut best = evaluate(
                &s,
                channel,
                FactorTables::degenerate(&rvs, &s.factorization)?,
                lambda,
            );
            used += 1;
            for t in &warm {
                if used >= opts.budget {
                    break;
                }
                let e = evaluate(&s, channel, t.clone(), lambda);
                used += 1;
                if e.score > best.score {
                    best = e;
                }
            }
            let pool = (opts.budget / 10).clamp(1, 100);
            for _ in 0..pool {
                if used >= opts.budget {
                    break;
                }
                let t = FactorTables::sample(&rvs, &s.factorization, &mut rng, opts.alpha)?;
                let e = evaluate(&s, channel, t, lambda);
                used += 1;
                if e.score > best.score {
                    best = e;
                }
            }
            while used < opts.budget {
                let mut t = best.tables.clone();
                let mv = random_move(&mut rng);
                t.perturb(&mut rng, mv, opts.alpha);
                let e = evaluate(&s, channel, t, lambda);
                used += 1;
                if e.score >= best.score {
                    best = e;
                }
            }
            Ok((lambda, chain_seed, best))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    let mut inputs = Vec::new();
    let mut candidates = Vec::new();
    for (lambda, seed, e) in &best {
        let Some(region) = &e.region else {
            continue;
        };
        let (_, [r1, r2]) = region.support(*lambda);
        points.push(FrontierPoint {
            lambda: *lambda,
            r1,
            r2,
            seed: *seed,
        });
        inputs.push(e.tables.joint());
        candidates.extend(region.vertices.iter().map(|v| FrontierPoint {
            lambda: *lambda,
            r1: v[0],
            r2: v[1],
            seed: *seed,
        }));
    }
    Ok(FrontierResult {
        channel: opts.channel_id.clone(),
        schema,
        points,
        inputs,
        pareto: pareto(candidates),
    })
}

/// Non-dominated subset, sorted by R1; among coincident points the first
/// one is kept.
fn pareto(mut pts: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    const TOL: f64 = 1e-12;
    pts.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(b.r2.total_cmp(&a.r2)));
    let mut out: Vec<FrontierPoint> = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for p in pts {
        if p.r2 > top + TOL {
            top = p.r2;
            out.push(p);
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{canonical_channel, ChannelKind};

    fn pt(r1: f64, r2: f64) -> FrontierPoint {
        FrontierPoint {
            lambda: 0.0,
            r1,
            r2,
            seed: 0,
        }
    }

    #[test]
    fn pareto_drops_dominated_points() {
        let p = pareto(vec![
            pt(0.0, 1.0),
            pt(0.5, 0.5),
            pt(1.0, 0.0),
            pt(0.4, 0.4),
            pt(0.5, 0.5),
        ]);
        let xy: Vec<_> = p.iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(xy, vec![(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]);
    }

    #[test]
    fn csv_round_trip() {
        let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
        let f = trace_frontier_with(
            SchemaId::Maric,
            &c,
            &FrontierOptions {
                budget: 30,
                grid: 3,
                ..FrontierOptions::default()
            },
        )
        .unwrap();
        let back = parse_frontier_csv(&f.to_csv()).unwrap();
        assert_eq!(back.len(), f.pareto.len());
        for (a, b) in back.iter().zip(&f.pareto) {
            assert!((a.r1 - b.r1).abs() < 1e-11 && a.seed == b.seed);
        }
        assert!(parse_frontier_csv("x,y\n").is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let c = canonical_channel(ChannelKind::BscPair {
            eps1: 0.1,
            eps2: 0.2,
        })
        .unwrap();
        let run = || trace_frontier(SchemaId::Maric, &c, 25, 4).unwrap();
        assert_eq!(run(), run());
    }
}
