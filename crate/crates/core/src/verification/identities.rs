//! Per-distribution identities and reductions behind the comparisons.

use crate::channel::{random_channel, Channel};
use crate::error::{Error, Result};
use crate::polytope::{containment_margin, project_or_empty, Polytope2D};
use crate::probability::{
    extend_through_channel_as, mutual_information, sample_factored, FactorizationSpec,
    JointDistribution, MiEvaluator, MiExpr, MiTerm,
};
use crate::region::{
    builtin_schema, check_factorization, instantiate, RateRow, RateSystem, RegionSchema, SchemaId,
    Sense, CC_TABLE, FACTORIZATION_TOL, JIANG_TABLE,
};

use super::{
    default_pairs, first_accepted, histogram, mix, per_seed, sampled_region_containment,
    CheckReport, SuiteReport, VerifyOptions,
};

/// Value an identity's left-hand side must take.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Zero,
    /// A single (nonnegative) mutual information.
    EqualsTerm(MiTerm),
}

/// A signed combination of constraint right-hand sides with its closed
/// form, valid under `factorization`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub id: String,
    pub lhs: MiExpr,
    pub expected: Expected,
    pub factorization: FactorizationSpec,
}

impl IdentityCheck {
    /// `lhs − expected` at `d`.
    pub fn residual(&self, d: &JointDistribution) -> Result<f64> {
        let mut ev = MiEvaluator::new(d);
        let lhs = ev.expr(&self.lhs)?;
        let expected = match &self.expected {
            Expected::Zero => 0.0,
            Expected::EqualsTerm(t) => ev.term(t)?,
        };
        Ok(lhs - expected)
    }
}

fn rhs(schema: &RegionSchema, label: &str) -> Result<MiExpr> {
    schema
        .constraint(label)
        .map(|c| c.rhs.clone())
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no row {label}", schema.id)))
}

fn combine(parts: &[(i8, &RegionSchema, &str)]) -> Result<MiExpr> {
    parts
        .iter()
        .try_fold(MiExpr::zero(), |e, (s, schema, label)| {
            Ok(e.add_scaled(*s, &rhs(schema, label)?))
        })
}

fn term(text: &str) -> MiTerm {
    let e = MiExpr::parse(text).expect("well-formed term");
    e.terms[0].1.clone()
}

/// The row-by-row differences between the thesis region (after its
/// enlargement) and the subset of the unified region it is compared with.
pub fn devroye_identities() -> Result<Vec<IdentityCheck>> {
    let a = builtin_schema(SchemaId::RtdIn)?;
    let b = builtin_schema(SchemaId::DmtOut)?;
    let f = a.factorization.clone();
    let check = |id: &str,
                 parts: &[(i8, &RegionSchema, &str)],
                 expected: Expected|
     -> Result<IdentityCheck> {
        Ok(IdentityCheck {
            id: id.into(),
            lhs: combine(parts)?,
            expected,
            factorization: f.clone(),
        })
    };
    Ok(vec![
        check(
            "(e13-e10)-(e23-e20)",
            &[
                (1, &a, "e13"),
                (-1, &a, "e10"),
                (-1, &b, "e23"),
                (1, &b, "e20"),
            ],
            Expected::Zero,
        )?,
        check(
            "(e14-e10)-(e24-e20)",
            &[
                (1, &a, "e14"),
                (-1, &a, "e10"),
                (-1, &b, "e24"),
                (1, &b, "e20"),
            ],
            Expected::EqualsTerm(term("I(U2c; U1c | X2)")),
        )?,
        check(
            "(e15-e10)-(e25-e20)",
            &[
                (1, &a, "e15"),
                (-1, &a, "e10"),
                (-1, &b, "e25"),
                (1, &b, "e20"),
            ],
            Expected::Zero,
        )?,
        check(
            "e16-e26",
            &[(1, &a, "e16"), (-1, &b, "e26")],
            Expected::Zero,
        )?,
        check(
            "(e17-e12)-(e27-e21-e20)",
            &[
                (1, &a, "e17"),
                (-1, &a, "e12"),
                (-1, &b, "e27"),
                (1, &b, "e21"),
                (1, &b, "e20"),
            ],
            Expected::EqualsTerm(term("I(U1c; U1pb)")),
        )?,
        check(
            "(e18-e12)-(e28-e21-e20)",
            &[
                (1, &a, "e18"),
                (-1, &a, "e12"),
                (-1, &b, "e28"),
                (1, &b, "e21"),
                (1, &b, "e20"),
            ],
            Expected::Zero,
        )?,
        check(
            "(e19-e12+e10)-(e29-e21)",
            &[
                (1, &a, "e19"),
                (-1, &a, "e12"),
                (1, &a, "e10"),
                (-1, &b, "e29"),
                (1, &b, "e21"),
            ],
            Expected::Zero,
        )?,
    ])
}

/// Unified row paired with the comparator row it must reproduce.
const JIANG_PAIRS: [(&str, &str); 8] = [
    ("us 1-0", "Jiang 2"),
    ("us 1-1", "Jiang 3"),
    ("us 1-2", "Jiang 4"),
    ("us 1-3", "Jiang 6"),
    ("us 1-4", "Jiang 7"),
    ("us 1-5", "Jiang 8"),
    ("us 1-6", "Jiang 9"),
    ("us 1-7", "Jiang 11"),
];

/// Paired right-hand sides of the Jiang–Xin region and the unified region,
/// with the comparator side renamed through the correspondence table.
pub fn jiang_identities() -> Result<Vec<IdentityCheck>> {
    let us = builtin_schema(SchemaId::RtdJiang)?;
    let them = builtin_schema(SchemaId::Jiang)?;
    let rename = |n: &str| match JIANG_TABLE.target(n) {
        Some(Some(t)) => t.to_string(),
        _ => n.to_string(),
    };
    JIANG_PAIRS
        .iter()
        .map(|(a, b)| {
            Ok(IdentityCheck {
                id: format!("{a} = {b}"),
                lhs: rhs(&us, a)?.add_scaled(-1, &rhs(&them, b)?.renamed(&rename)),
                expected: Expected::Zero,
                factorization: us.factorization.clone(),
            })
        })
        .collect()
}

fn binary_channel(seed: u64) -> Result<Channel> {
    random_channel(mix(seed, 1), [2, 2, 2, 2])
}

/// Samples the input law of `schema` (or `spec`) at `seed` and pushes it
/// through a random binary channel drawn from the same seed.
fn sampled_instance(
    schema: &RegionSchema,
    spec: &FactorizationSpec,
    seed: u64,
) -> Result<JointDistribution> {
    let d = sample_factored(&schema.input_rvs(), spec, seed)?;
    extend_through_channel_as(&d, &binary_channel(seed)?, &schema.binding)
}

fn run_identities(
    checks: &[IdentityCheck],
    values: &[(u64, Vec<f64>)],
    tol: f64,
) -> Vec<CheckReport> {
    checks
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut r = CheckReport::new(c.id.clone(), tol);
            for (s, v) in values {
                r.record(*s, v[k].abs());
            }
            r
        })
        .collect()
}

/// Thesis-region comparison: seven row identities, the vanishing of
/// `I(U2c;U1c|X2)`, the sign of the one positive gap, and sampled
/// containment of the enlarged thesis region.
pub fn check_devroye_identities(opts: &VerifyOptions) -> Result<SuiteReport> {
    let schema = builtin_schema(SchemaId::RtdIn)?;
    let checks = devroye_identities()?;
    let ci = term("I(U2c; U1c | X2)");
    let gap = term("I(U1c; U1pb)");
    let values = per_seed(opts.seed, opts.samples, |s| {
        let d = sampled_instance(&schema, &schema.factorization, s)?;
        let mut v = checks
            .iter()
            .map(|c| c.residual(&d))
            .collect::<Result<Vec<_>>>()?;
        v.push(mutual_information(&d, &ci)?);
        v.push(mutual_information(&d, &gap)?);
        Ok(v)
    })?;
    let mut out = run_identities(&checks, &values, opts.tol_mi);
    let mut r = CheckReport::new("I(U2c;U1c|X2) vanishes", opts.tol_mi);
    for (s, v) in &values {
        r.record(*s, v[checks.len()]);
    }
    out.push(r);
    let gaps: Vec<f64> = values.iter().map(|(_, v)| v[checks.len() + 1]).collect();
    let mut r = CheckReport::new("I(U1c;U1pb) gap nonnegative", opts.tol_mi);
    for ((s, _), g) in values.iter().zip(&gaps) {
        r.record(*s, (-g).max(0.0));
    }
    r.note(format!("gap histogram {}", histogram(&gaps)));
    out.push(r);
    let pair = &default_pairs()?[0];
    out.push(sampled_region_containment(
        pair,
        opts.region_samples,
        opts.seed,
        opts.tol_region,
    )?);
    Ok(SuiteReport {
        suite: "devroye".into(),
        checks: out,
    })
}

fn value(system: &RateSystem, label: &str) -> Result<f64> {
    system
        .row(label)
        .map(|r| r.rhs)
        .ok_or_else(|| Error::InvalidParameter(format!("no row {label}")))
}

/// Rows that hold for every nonnegative rate vector.
fn trivially_true(r: &RateRow) -> bool {
    match r.sense {
        Sense::Ge => r.rhs <= 0.0 && r.coeffs.iter().all(|c| *c >= 0),
        Sense::Le => r.rhs >= 0.0 && r.coeffs.iter().all(|c| *c <= 0),
        Sense::Eq => false,
    }
}

/// Largest right-hand-side mismatch between two systems over the same
/// variables, matching rows by coefficients and sense; infinite if some
/// row has no structural partner.
pub(crate) fn system_distance(a: &RateSystem, b: &RateSystem) -> f64 {
    if a.vars != b.vars {
        return f64::INFINITY;
    }
    let keep = |s: &RateSystem| -> Vec<RateRow> {
        s.rows
            .iter()
            .filter(|r| !trivially_true(r))
            .cloned()
            .collect()
    };
    let (ra, mut rb) = (keep(a), keep(b));
    if ra.len() != rb.len() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for r in &ra {
        let best = rb
            .iter()
            .enumerate()
            .filter(|(_, q)| q.coeffs == r.coeffs && q.sense == r.sense)
            .map(|(i, q)| (i, (q.rhs - r.rhs).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((i, d)) => {
                worst = worst.max(d);
                rb.remove(i);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// The Cao–Chen reduction: (i) merging `U11` into `V11` never lowers a
/// right-hand side and changes only the two rows that subtract a `U11`
/// term; (ii) the split comparator list and the unified list with
/// `R2pa = 0` coincide row by row once `R1c' = 0`, and so do their
/// projections. The published two-dimensional form of the merged region is
/// compared with the unified region as a logged diagnostic.
pub fn check_cc_reduction(opts: &VerifyOptions) -> Result<SuiteReport> {
    let cc = builtin_schema(SchemaId::Cc)?;
    let ccp = builtin_schema(SchemaId::Ccp)?;
    let split = builtin_schema(SchemaId::CcpSplit)?;
    let unified = builtin_schema(SchemaId::RtdCc)?;
    let tol = opts.tol_mi;

    let same = [("37", "37p"), ("39", "39p"), ("40", "40p")];
    let larger = [("38", "38p"), ("41", "41p")];
    let values = per_seed(opts.seed, opts.samples, |s| {
        let d = sampled_instance(&cc, &cc.factorization, s)?;
        let orig = instantiate(&cc, &d)?;
        let merged = instantiate(&ccp, &d.merge_into("U11", "V11")?)?;
        same.iter()
            .chain(&larger)
            .map(|(o, p)| Ok(value(&merged, p)? - value(&orig, o)?))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out = Vec::new();
    for (k, (o, p)) in same.iter().enumerate() {
        let mut r = CheckReport::new(format!("({o}) = ({p}) after merging U11"), tol);
        for (s, v) in &values {
            r.record(*s, v[k].abs());
        }
        out.push(r);
    }
    for (k, (o, p)) in larger.iter().enumerate() {
        let mut r = CheckReport::new(format!("({p}) >= ({o}) after merging U11"), tol);
        let diffs: Vec<f64> = values.iter().map(|(_, v)| v[same.len() + k]).collect();
        for ((s, _), d) in values.iter().zip(&diffs) {
            r.record(*s, (-d).max(0.0));
        }
        r.note(format!("difference histogram {}", histogram(&diffs)));
        out.push(r);
    }

    let structural = per_seed(opts.seed, opts.samples, |s| {
        let d = sampled_instance(&unified, &unified.factorization, s)?;
        let a = instantiate(&split, &d)?.pin_zero("R1c'")?;
        let b = instantiate(&unified, &d)?.pin_zero("R1c'")?;
        Ok(system_distance(&a, &b))
    })?;
    let mut r = CheckReport::new("split list = unified list with R1c' = 0", tol);
    for (s, v) in &structural {
        r.record(*s, *v);
    }
    out.push(r);

    let regions = first_accepted(
        opts.seed,
        opts.region_samples,
        opts.region_samples * 500,
        |s| {
            let d = sampled_instance(&unified, &unified.factorization, s)?;
            let a = project_or_empty(&instantiate(&split, &d)?.pin_zero("R1c'")?)?;
            let b = project_or_empty(&instantiate(&unified, &d)?.pin_zero("R1c'")?)?;
            let (a, b) = match (a, b) {
                (None, None) => return Ok(None),
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(Some((f64::INFINITY, None))),
            };
            if a.is_origin(tol) && b.is_origin(tol) {
                return Ok(None);
            }
            let published = published_ccp_region(&ccp, &d)?;
            let diag = published.map(|p| (containment_margin(&b, &p), containment_margin(&p, &b)));
            Ok(Some((a.vertex_distance(&b), diag)))
        },
    )?;
    let (found, tried) = regions;
    let mut r = CheckReport::new("split and unified projections equal", tol);
    for (s, (v, _)) in &found {
        r.record(*s, *v);
    }
    r.note(format!(
        "{tried} draws for {} non-empty instances",
        found.len()
    ));
    if found.len() < opts.region_samples {
        r.passed = false;
    }
    out.push(r);

    let mut outside = CheckReport::new(
        "published CC' region inside unified region",
        opts.tol_region,
    )
    .diagnostic();
    let mut inside = CheckReport::new(
        "unified region inside published CC' region",
        opts.tol_region,
    )
    .diagnostic();
    for (s, (_, diag)) in &found {
        if let Some((p_in_u, u_in_p)) = diag {
            outside.record(*s, p_in_u.max(0.0));
            inside.record(*s, u_in_p.max(0.0));
        }
    }
    let exceed = found
        .iter()
        .filter(|(_, (_, d))| d.is_some_and(|(m, _)| m > opts.tol_region))
        .count();
    outside.note(format!(
        "published region exceeds the unified one in {exceed} of {} instances",
        outside.seeds_run
    ));
    out.push(outside);
    out.push(inside);

    let pair = &default_pairs()?[1];
    out.push(sampled_region_containment(
        pair,
        opts.region_samples,
        opts.seed,
        opts.tol_region,
    )?);
    Ok(SuiteReport {
        suite: "cc".into(),
        checks: out,
    })
}

/// Projection of the merged comparator in its published two-rate form at a
/// distribution given in unified names.
fn published_ccp_region(ccp: &RegionSchema, d: &JointDistribution) -> Result<Option<Polytope2D>> {
    let back: Vec<(&str, &str)> = CC_TABLE
        .rvs
        .iter()
        .filter_map(|(from, to)| to.map(|t| (t, *from)))
        .collect();
    let native = d.renamed(&back)?.with_constant("U11")?;
    project_or_empty(&instantiate(ccp, &native)?)
}

/// Jiang–Xin comparison: eight paired right-hand sides, the vanishing
/// binning cost `I(U1c;X2|U2c)`, the factorization of the mapped law, and
/// sampled containment with the effect of the two extra rows logged.
pub fn check_jiang_containment(opts: &VerifyOptions) -> Result<SuiteReport> {
    let jiang = builtin_schema(SchemaId::Jiang)?;
    let unified = builtin_schema(SchemaId::RtdJiang)?;
    let spec = FactorizationSpec::parse(super::JIANG_SAMPLING)?;
    let checks = jiang_identities()?;
    let ci = term("I(U1c; X2 | U2c)");
    let values = per_seed(opts.seed, opts.samples, |s| {
        let d = sampled_instance(&jiang, &spec, s)?;
        let m = JIANG_TABLE.map_distribution(&d)?;
        let mut v = checks
            .iter()
            .map(|c| c.residual(&m))
            .collect::<Result<Vec<_>>>()?;
        v.push(mutual_information(&m, &ci)?);
        v.push(match check_factorization(&unified, &m, FACTORIZATION_TOL) {
            Ok(()) => 0.0,
            Err(Error::FactorizationViolation { value, .. }) => value,
            Err(e) => return Err(e),
        });
        Ok(v)
    })?;
    let mut out = run_identities(&checks, &values, opts.tol_mi);
    for (k, id) in [
        "I(U1c;X2|U2c) vanishes",
        "mapped law has the unified factorization",
    ]
    .iter()
    .enumerate()
    {
        let mut r = CheckReport::new(*id, opts.tol_mi);
        for (s, v) in &values {
            r.record(*s, v[checks.len() + k]);
        }
        out.push(r);
    }
    let pair = &default_pairs()?[2];
    out.push(sampled_region_containment(
        pair,
        opts.region_samples,
        opts.seed,
        opts.tol_region,
    )?);
    Ok(SuiteReport {
        suite: "jiang".into(),
        checks: out,
    })
}

const MARIC_ROWS: [&str; 5] = [
    "maric R1 1",
    "maric R1 2",
    "maric R2 1",
    "maric R2 2",
    "maric sum",
];

/// Marić reduction: merging `X2a` into `X2b` raises the first rate bound
/// by exactly `I(X2a;Y2|Q)` and leaves the other four, so the merged
/// region contains the original one.
pub fn check_maric_wlog(opts: &VerifyOptions) -> Result<SuiteReport> {
    let maric = builtin_schema(SchemaId::Maric)?;
    let gain = term("I(X2a; Y2 | Q)");
    let tol = opts.tol_mi;
    let values = per_seed(opts.seed, opts.samples, |s| {
        let d = sampled_instance(&maric, &maric.factorization, s)?;
        let orig = instantiate(&maric, &d)?;
        let merged = instantiate(&maric, &d.merge_into("X2a", "X2b")?)?;
        let mut v = MARIC_ROWS
            .iter()
            .map(|l| Ok(value(&merged, l)? - value(&orig, l)?))
            .collect::<Result<Vec<_>>>()?;
        v.push(mutual_information(&d, &gain)?);
        let contained = match (project_or_empty(&orig)?, project_or_empty(&merged)?) {
            (None, _) => 0.0,
            (Some(_), None) => f64::INFINITY,
            (Some(o), Some(m)) => containment_margin(&m, &o).max(0.0),
        };
        v.push(contained);
        Ok(v)
    })?;
    let g = MARIC_ROWS.len();
    let mut out = Vec::new();
    let mut r = CheckReport::new("merged - original (maric R1 1) = I(X2a;Y2|Q)", tol);
    for (s, v) in &values {
        r.record(*s, (v[0] - v[g]).abs());
    }
    r.note(format!(
        "gain histogram {}",
        histogram(&values.iter().map(|(_, v)| v[g]).collect::<Vec<_>>())
    ));
    out.push(r);
    for (k, label) in MARIC_ROWS.iter().enumerate().skip(1) {
        let mut r = CheckReport::new(format!("({label}) unchanged"), tol);
        for (s, v) in &values {
            r.record(*s, v[k].abs());
        }
        out.push(r);
    }
    let mut r = CheckReport::new("merged region contains original", opts.tol_region);
    for (s, v) in &values {
        r.record(*s, v[g + 1]);
    }
    out.push(r);
    Ok(SuiteReport {
        suite: "maric".into(),
        checks: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::sample_factored_with;

    fn opts(samples: usize) -> VerifyOptions {
        VerifyOptions {
            samples,
            region_samples: 3,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn product_distribution_has_no_gap() {
        let schema = builtin_schema(SchemaId::RtdIn).unwrap();
        let rvs = schema.input_rvs();
        let n = rvs.cells() as f64;
        let d = JointDistribution::from_fn(rvs, |_| 1.0 / n).unwrap();
        let d =
            extend_through_channel_as(&d, &binary_channel(4).unwrap(), &schema.binding).unwrap();
        for c in devroye_identities().unwrap() {
            assert!(c.residual(&d).unwrap().abs() < 1e-9, "{}", c.id);
        }
        assert!(mutual_information(&d, &term("I(U1c; U1pb)")).unwrap().abs() < 1e-12);
    }

    #[test]
    fn e16_difference_vanishes() {
        let schema = builtin_schema(SchemaId::RtdIn).unwrap();
        let c = devroye_identities()
            .unwrap()
            .into_iter()
            .find(|c| c.id == "e16-e26")
            .unwrap();
        for s in 0..20 {
            let d = sampled_instance(&schema, &schema.factorization, s).unwrap();
            assert!(c.residual(&d).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_u11_leaves_38_unchanged() {
        let cc = builtin_schema(SchemaId::Cc).unwrap();
        let ccp = builtin_schema(SchemaId::Ccp).unwrap();
        let rvs = cc.input_rvs_with(&[("U11", 1)]).unwrap();
        let d = sample_factored_with(&rvs, &cc.factorization, 9, 1.0).unwrap();
        let d = extend_through_channel_as(&d, &binary_channel(9).unwrap(), &cc.binding).unwrap();
        let orig = instantiate(&cc, &d).unwrap();
        let merged = instantiate(&ccp, &d.merge_into("U11", "V11").unwrap()).unwrap();
        assert!((value(&merged, "38p").unwrap() - value(&orig, "38").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_x2a_gives_no_gain() {
        let maric = builtin_schema(SchemaId::Maric).unwrap();
        let rvs = maric.input_rvs_with(&[("X2a", 1)]).unwrap();
        let d = sample_factored(&rvs, &maric.factorization, 5).unwrap();
        let d = extend_through_channel_as(&d, &binary_channel(5).unwrap(), &maric.binding).unwrap();
        let orig = instantiate(&maric, &d).unwrap();
        let merged = instantiate(&maric, &d.merge_into("X2a", "X2b").unwrap()).unwrap();
        for l in MARIC_ROWS {
            assert!((value(&merged, l).unwrap() - value(&orig, l).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn small_suites_pass() {
        for r in [
            check_devroye_identities(&opts(10)).unwrap(),
            check_maric_wlog(&opts(10)).unwrap(),
            check_jiang_containment(&opts(10)).unwrap(),
        ] {
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn structural_distance_ignores_trivial_rows() {
        let row = |c: Vec<i64>, sense, rhs| RateRow {
            label: String::new(),
            coeffs: c,
            sense,
            rhs,
        };
        let a = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![
                row(vec![1, 1], Sense::Le, 1.0),
                row(vec![0, 1], Sense::Ge, 0.0),
            ],
            r1: vec![1, 0],
            r2: vec![0, 1],
        };
        let mut b = a.clone();
        b.rows.truncate(1);
        assert_eq!(system_distance(&a, &b), 0.0);
        b.rows[0].rhs = 1.5;
        assert_eq!(system_distance(&a, &b), 0.5);
        b.rows[0].coeffs = vec![1, 0];
        assert_eq!(system_distance(&a, &b), f64::INFINITY);
    }
}
