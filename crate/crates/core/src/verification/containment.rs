//! Sampled containment of one projected region in another.

use crate::channel::{canonical_channel, Channel, ChannelKind};
use crate::error::Result;
use crate::polytope::{containment_violation, project_or_empty, MembershipOracle, Polytope2D};
use crate::probability::{extend_through_channel_as, sample_factored_with, FactorizationSpec};
use crate::region::{builtin_schema, instantiate, CorrespondenceTable, SchemaId, JIANG_TABLE};

use super::{first_accepted, CheckReport};

/// Input law of the Jiang–Xin comparator under which its variables map into
/// the unified region: the common messages are independent and the
/// cognitive input does not look at `V1'` beyond the auxiliaries.
pub const JIANG_SAMPLING: &str = "U2; U1; V1p|U1; W1,W2|U2,U1,V1p; X0|U1,U2,W1,W2";

/// Seeds tried per requested non-empty instance before giving up.
const ATTEMPTS_PER_SAMPLE: usize = 500;

/// An inner region expected to lie inside an outer one.
#[derive(Debug, Clone)]
pub struct ContainmentPair {
    pub id: String,
    pub outer: SchemaId,
    pub inner: SchemaId,
    /// Maps inner variables into outer ones; `None` when the names agree.
    pub table: Option<CorrespondenceTable>,
    /// Inner input law to sample instead of the inner factorization.
    pub sampling: Option<String>,
    /// Outer rates held at zero.
    pub outer_pins: Vec<String>,
    pub channel: Channel,
    /// Dirichlet concentration of the sampled rows.
    pub alpha: f64,
    /// Inner rows whose influence on the inner region is logged, together
    /// with whether the inclusion is then strict.
    pub watched_rows: Vec<String>,
}

impl ContainmentPair {
    /// Same schema on both sides, same names.
    pub fn reflexive(id: SchemaId, channel: Channel) -> Self {
        Self {
            id: format!("{id} in {id}"),
            outer: id,
            inner: id,
            table: None,
            sampling: None,
            outer_pins: Vec::new(),
            channel,
            alpha: 1.0,
            watched_rows: Vec::new(),
        }
    }
}

/// The three pairs the comparison section proves, on the `random(7)`
/// channel.
pub fn default_pairs() -> Result<Vec<ContainmentPair>> {
    let channel = canonical_channel(ChannelKind::Random { seed: 7 })?;
    Ok(vec![
        ContainmentPair {
            id: "DMT_OUT in RTD_IN".into(),
            outer: SchemaId::RtdIn,
            inner: SchemaId::DmtOut,
            table: None,
            sampling: None,
            outer_pins: Vec::new(),
            channel: channel.clone(),
            alpha: 1.0,
            watched_rows: Vec::new(),
        },
        ContainmentPair {
            id: "CCP_SPLIT in RTD_CC with R1c' = 0".into(),
            outer: SchemaId::RtdCc,
            inner: SchemaId::CcpSplit,
            table: None,
            sampling: None,
            outer_pins: vec!["R1c'".into()],
            channel: channel.clone(),
            alpha: 1.0,
            watched_rows: Vec::new(),
        },
        ContainmentPair {
            id: "JIANG in RTD_JIANG".into(),
            outer: SchemaId::RtdJiang,
            inner: SchemaId::Jiang,
            table: Some(JIANG_TABLE),
            sampling: Some(JIANG_SAMPLING.into()),
            outer_pins: Vec::new(),
            channel,
            alpha: 1.0,
            watched_rows: vec!["Jiang 5".into(), "Jiang 10".into()],
        },
    ])
}

struct Instance {
    violation: f64,
    vertex: [f64; 2],
    /// Per watched row: (row changes the inner region, outer strictly larger).
    watched: Vec<(bool, bool)>,
}

/// Draws inner-schema distributions until `n_samples` give a non-trivial
/// inner region, maps each into the outer schema and checks that the outer
/// projection contains the inner one within `tol`. A vertex failing the
/// half-plane test is re-checked against the vertex-enumeration oracle of
/// the outer system before it counts.
pub fn sampled_region_containment(
    pair: &ContainmentPair,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    let outer = builtin_schema(pair.outer)?;
    let inner = builtin_schema(pair.inner)?;
    let spec = match &pair.sampling {
        Some(s) => FactorizationSpec::parse(s)?,
        None => inner.factorization.clone(),
    };
    let rvs = inner.input_rvs();
    let attempt = |s: u64| -> Result<Option<Instance>> {
        let d = sample_factored_with(&rvs, &spec, s, pair.alpha)?;
        let d = extend_through_channel_as(&d, &pair.channel, &inner.binding)?;
        let inner_sys = instantiate(&inner, &d)?;
        let Some(pin) = project_or_empty(&inner_sys)? else {
            return Ok(None);
        };
        if pin.is_origin(tol) {
            return Ok(None);
        }
        let mapped = match &pair.table {
            Some(t) => t.map_distribution(&d)?,
            None => d,
        };
        let outer_sys = instantiate(&outer, &mapped)?.pin_zero_all(&pair.outer_pins)?;
        let pout = project_or_empty(&outer_sys)?;
        let (mut violation, vertex) = match &pout {
            Some(p) => containment_violation(p, &pin),
            None => (f64::INFINITY, pin.vertices[0]),
        };
        if violation > tol {
            let oracle = MembershipOracle::new(&outer_sys)?;
            violation = pin
                .vertices
                .iter()
                .map(|v| oracle.margin(*v))
                .fold(f64::NEG_INFINITY, f64::max);
        }
        let watched = pair
            .watched_rows
            .iter()
            .map(|label| {
                let without = project_or_empty(&inner_sys.without_row(label)?)?;
                let active = match &without {
                    Some(w) => w.vertex_distance(&pin) > tol,
                    None => false,
                };
                let strict = pout.as_ref().is_some_and(|p| strictly_larger(p, &pin, tol));
                Ok((active, strict))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(Instance {
            violation: violation.max(0.0),
            vertex,
            watched,
        }))
    };
    let (found, tried) = first_accepted(seed, n_samples, n_samples * ATTEMPTS_PER_SAMPLE, attempt)?;

    let mut report = CheckReport::new(pair.id.clone(), tol);
    for (s, inst) in &found {
        report.record(*s, inst.violation);
    }
    if found.len() < n_samples {
        report.passed = false;
        report.note(format!(
            "only {} of {} requested non-empty instances in {tried} draws",
            found.len(),
            n_samples
        ));
    }
    report.note(format!(
        "{tried} draws for {} non-empty inner regions",
        found.len()
    ));
    if let Some(w) = report.worst_seed {
        if report.max_violation > tol {
            report.worst_point = found.iter().find(|(s, _)| *s == w).map(|(_, i)| i.vertex);
        }
    }
    for (k, label) in pair.watched_rows.iter().enumerate() {
        let active = found.iter().filter(|(_, i)| i.watched[k].0).count();
        let strict = found
            .iter()
            .filter(|(_, i)| i.watched[k].0 && i.watched[k].1)
            .count();
        report.note(format!(
            "row {label} cuts the inner region in {active} instances, inclusion strict in {strict} of them"
        ));
        if strict < active {
            report.passed = false;
        }
    }
    Ok(report)
}

/// True iff some vertex of `outer` lies outside `inner` by more than `tol`.
pub(crate) fn strictly_larger(outer: &Polytope2D, inner: &Polytope2D, tol: f64) -> bool {
    outer.vertices.iter().any(|v| inner.margin(*v) > tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_contains_itself() {
        let c = canonical_channel(ChannelKind::BscPair {
            eps1: 0.05,
            eps2: 0.1,
        })
        .unwrap();
        let pair = ContainmentPair::reflexive(SchemaId::Cc, c);
        let r = sampled_region_containment(&pair, 5, 3, 1e-7).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.seeds_run, 5);
        assert_eq!(r.max_violation, 0.0);
    }
}
