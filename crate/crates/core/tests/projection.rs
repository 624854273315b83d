use cifc_core::channel::{canonical_channel, ChannelKind};
use cifc_core::polytope::{fme_project, project_or_empty, MembershipOracle};
use cifc_core::probability::{sample_factored, JointDistribution};
use cifc_core::region::{builtin_schema, instantiate_with_channel, SchemaId};

mod common;
use common::{grid_disagreements, noiseless_assignment};

#[test]
fn noiseless_square() {
    let schema = builtin_schema(SchemaId::Rtd).unwrap();
    let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
    let system = instantiate_with_channel(&schema, &noiseless_assignment(), &c).unwrap();
    let p = fme_project(&system).unwrap();
    assert_eq!(p.vertices.len(), 4, "{:?}", p.vertices);
    for v in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
        assert!(p
            .vertices
            .iter()
            .any(|w| (w[0] - v[0]).abs() < 1e-9 && (w[1] - v[1]).abs() < 1e-9));
    }
    assert_eq!(grid_disagreements(&system, 21, 1e-7), 0);
}

#[test]
fn constant_auxiliaries_give_origin() {
    let schema = builtin_schema(SchemaId::Rtd).unwrap();
    let c = canonical_channel(ChannelKind::BscPair {
        eps1: 0.1,
        eps2: 0.2,
    })
    .unwrap();
    let d = JointDistribution::degenerate(schema.input_rvs());
    let system = instantiate_with_channel(&schema, &d, &c).unwrap();
    assert!(system.rows.iter().all(|r| r.rhs == 0.0));
    let p = fme_project(&system).unwrap();
    assert_eq!(p.vertices, vec![[0.0, 0.0]]);
    assert!(MembershipOracle::new(&system)
        .unwrap()
        .contains([0.0, 0.0], 0.0));
}

#[test]
fn random_rtd_instances_agree_with_oracle() {
    let schema = builtin_schema(SchemaId::Rtd).unwrap();
    let c = canonical_channel(ChannelKind::BscPair {
        eps1: 0.05,
        eps2: 0.1,
    })
    .unwrap();
    let mut nonempty = 0;
    for seed in 0..20 {
        let d = sample_factored(&schema.input_rvs(), &schema.factorization, seed).unwrap();
        let system = instantiate_with_channel(&schema, &d, &c).unwrap();
        if project_or_empty(&system).unwrap().is_some() {
            nonempty += 1;
        }
        assert_eq!(grid_disagreements(&system, 21, 1e-7), 0, "seed {seed}");
    }
    eprintln!("nonempty {nonempty}/20");
}
