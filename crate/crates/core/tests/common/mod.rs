#![allow(dead_code)]

use cifc_core::polytope::{project_or_empty, MembershipOracle};
use cifc_core::probability::JointDistribution;
use cifc_core::region::{builtin_schema, RateSystem, SchemaId};

/// RTD inputs carrying one clean bit per user: every auxiliary except
/// `U1pb` is constant, `U1pb = X1`, and `X1`, `X2` are independent fair bits.
pub fn noiseless_assignment() -> JointDistribution {
    let rvs = builtin_schema(SchemaId::Rtd).unwrap().input_rvs();
    let names = rvs.names().to_vec();
    let at = |d: &[usize], n: &str| d[names.iter().position(|x| x == n).unwrap()];
    JointDistribution::from_fn(rvs, |d| {
        let constant = ["U2c", "U1c", "U2pb"].iter().all(|n| at(d, n) == 0);
        if constant && at(d, "U1pb") == at(d, "X1") {
            0.25
        } else {
            0.0
        }
    })
    .unwrap()
}

/// Grid points on which the projection and the vertex-enumeration oracle
/// disagree about membership, skipping points within `boundary` of either
/// boundary. The grid spans both regions with a 10% margin.
pub fn grid_disagreements(system: &RateSystem, grid: usize, boundary: f64) -> usize {
    let oracle = MembershipOracle::new(system).unwrap();
    let fme = project_or_empty(system).unwrap();
    let Some(p) = fme else {
        return usize::from(!oracle.is_empty());
    };
    if oracle.is_empty() {
        return 1;
    }
    let reach = |k: usize| {
        oracle
            .hull()
            .iter()
            .chain(&p.vertices)
            .map(|v| v[k])
            .fold(1e-3, f64::max)
            * 1.1
    };
    let (rmax1, rmax2) = (reach(0), reach(1));
    let mut bad = 0;
    for i in 0..grid {
        for j in 0..grid {
            let pt = [
                rmax1 * i as f64 / (grid - 1) as f64,
                rmax2 * j as f64 / (grid - 1) as f64,
            ];
            let a = p.margin(pt);
            let b = oracle.margin(pt);
            if a.abs() <= boundary || b.abs() <= boundary {
                continue;
            }
            if (a <= 0.0) != (b <= 0.0) {
                bad += 1;
            }
        }
    }
    bad
}
