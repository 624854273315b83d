//! Built-in schemas and the audit manifest.

use serde::Serialize;

use super::{
    CorrespondenceTable, LinearRateConstraint, Projection, RateRole, RateVariable, RegionSchema,
    SchemaId, CC_MERGE_TABLE, CC_TABLE, DMT_TABLE, JIANG_TABLE,
};
use crate::error::{Error, Result};
use crate::probability::{ChannelBinding, FactorizationSpec, RandomVariableSet};

use RateRole::{Binning as B, Message as M};

struct Spec {
    id: SchemaId,
    rvs: &'static [(&'static str, usize)],
    binding: (&'static str, &'static str, &'static str, &'static str),
    factorization: &'static str,
    rates: &'static [(&'static str, RateRole)],
    constraints: &'static [(&'static str, &'static str)],
    r1: &'static str,
    r2: &'static str,
    zeroed: &'static [&'static str],
    notes: &'static [&'static str],
}

const RTD_RVS: &[(&str, usize)] = &[
    ("U2c", 2),
    ("U1c", 2),
    ("U1pb", 2),
    ("U2pb", 2),
    ("X2", 2),
    ("X1", 2),
    ("Y1", 2),
    ("Y2", 2),
];

const PLAIN: (&str, &str, &str, &str) = ("X1", "X2", "Y1", "Y2");

const RTD: Spec = Spec {
    id: SchemaId::Rtd,
    rvs: RTD_RVS,
    binding: PLAIN,
    factorization: "U2c; U1c|U2c; U1pb|U2c,U1c; U2pb|U2c,U1c,U1pb; \
                    X2|U2c,U1c,U1pb,U2pb; X1|U2c,U1c,U1pb,U2pb,X2",
    rates: &[
        ("R1c'", B),
        ("R1pb'", B),
        ("R2pb'", B),
        ("R1c", M),
        ("R1pb", M),
        ("R2c", M),
        ("R2pa", M),
        ("R2pb", M),
    ],
    constraints: &[
        ("1a", "R1c' >= I(U1c; X2 | U2c)"),
        ("1b", "R1c' + R1pb' >= I(U1pb,U1c; X2 | U2c)"),
        (
            "1c",
            "R1c' + R1pb' + R2pb' >= I(U1pb,U1c; X2 | U2c) + I(U2pb; U1pb | U1c,U2c,X2)",
        ),
        (
            "1d",
            "R2c + R2pa + R1c + R1c' + R2pb + R2pb' <= I(Y2; U2pb,U1c,X2,U2c) + I(U1c; X2 | U2c)",
        ),
        (
            "1e",
            "R2pa + R1c + R1c' + R2pb + R2pb' <= I(Y2; U2pb,U1c,X2 | U2c) + I(U1c; X2 | U2c)",
        ),
        (
            "1f",
            "R2pa + R2pb + R2pb' <= I(Y2; U2pb,X2 | U1c,U2c) + I(U1c; X2 | U2c)",
        ),
        (
            "1g",
            "R1c + R1c' + R2pb + R2pb' <= I(Y2; U2pb,U1c | X2,U2c) + I(U1c; X2 | U2c)",
        ),
        ("1h", "R2pb + R2pb' <= I(Y2; U2pb | U1c,X2,U2c)"),
        (
            "1i",
            "R2c + R1c + R1c' + R1pb + R1pb' <= I(Y1; U1pb,U1c,U2c)",
        ),
        ("1j", "R1c + R1c' + R1pb + R1pb' <= I(Y1; U1pb,U1c | U2c)"),
        ("1k", "R1pb + R1pb' <= I(Y1; U1pb | U1c,U2c)"),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pa + R2pb",
    zeroed: &[],
    notes: &[
        "input law p(U1c,U2c,U1pb,U2pb) p(X1,X2 | U1c,U2c,U1pb,U2pb), written as a full chain",
    ],
};

const DEVROYE_FACTORS: &str = "U2c; X2|U2c; U1c|X2; U1pb|X2; U2pb; X1|X2,U1c,U1pb";

const DEVROYE_RVS: &[(&str, usize)] = &[
    ("U2c", 2),
    ("U1c", 2),
    ("U1pb", 2),
    ("U2pb", 1),
    ("X2", 2),
    ("X1", 2),
    ("Y1", 2),
    ("Y2", 2),
];

const RTD_IN: Spec = Spec {
    id: SchemaId::RtdIn,
    rvs: DEVROYE_RVS,
    binding: PLAIN,
    factorization: DEVROYE_FACTORS,
    rates: &[
        ("R1c'", B),
        ("R1pb'", B),
        ("R1c", M),
        ("R1pb", M),
        ("R2c", M),
        ("R2pa", M),
    ],
    constraints: &[
        ("e10", "R1c' = I(U1c; X2 | U2c)"),
        ("e12", "R1c' + R1pb' = I(X2; U1c,U1pb | U2c)"),
        (
            "e13",
            "R2c + R1c + R2pa + R1c' <= I(Y2; U2c,U1c,X2) + I(U1c; X2 | U2c)",
        ),
        (
            "e14",
            "R2pa + R1c + R1c' <= I(Y2; U1c,X2 | U2c) + I(U1c; X2 | U2c)",
        ),
        (
            "e15",
            "R1c + R1c' <= I(Y2; U1c | U2c,X2) + I(U1c; X2 | U2c)",
        ),
        ("e16", "R2pa <= I(Y2; X2 | U2c,U1c) + I(U1c; X2 | U2c)"),
        (
            "e17",
            "R1pb + R1pb' + R1c + R1c' + R2c <= I(Y1; U2c,U1c,U1pb)",
        ),
        ("e18", "R1c + R1pb + R1c' + R1pb' <= I(Y1; U1c,U1pb | U2c)"),
        ("e19", "R1pb + R1pb' <= I(Y1; U1pb | U2c,U1c)"),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pa",
    zeroed: &["R2pb", "R2pb'"],
    notes: &["subset of the unified region with U2pb degenerate and the binning rates pinned"],
};

const DMT_OUT: Spec = Spec {
    id: SchemaId::DmtOut,
    rvs: DEVROYE_RVS,
    binding: PLAIN,
    factorization: DEVROYE_FACTORS,
    rates: &[
        ("R1c'", B),
        ("R1pb'", B),
        ("R1c", M),
        ("R1pb", M),
        ("R2c", M),
        ("R2pa", M),
    ],
    constraints: &[
        ("e20", "R1c' >= I(U1c; X2,U2c)"),
        ("e21", "R1pb' >= I(U1pb; X2,U2c)"),
        (
            "e23",
            "R2pa + R1c + R1c' + R2c <= I(Y2; U1c,U2c,X2) + I(X2,U2c; U1c)",
        ),
        (
            "e24",
            "R2pa + R1c + R1c' <= I(Y2; X2,U1c | U2c) + I(X2; U1c)",
        ),
        ("e25", "R1c + R1c' <= I(Y2,X2,U2c; U1c)"),
        ("e26", "R2pa <= I(Y2; X2 | U2c,U1c) + I(U1c; X2 | U2c)"),
        (
            "e27",
            "R1pb + R1pb' + R1c + R1c' + R2c <= I(Y1; U1pb,U1c,U2c) + I(U1pb,U1c; U2c)",
        ),
        (
            "e28",
            "R1c + R1pb + R1c' + R1pb' <= I(Y1,U2c; U1pb,U1c) + I(U1pb; U1c)",
        ),
        ("e29", "R1pb + R1pb' <= I(Y1,U2c,U1c; U1pb)"),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pa",
    zeroed: &["R2pb", "R2pb'"],
    notes: &[
        "enlarged thesis region after inserting X1, written in the unified names",
        "binning equalities stated as >=; the largest region takes them with equality",
        "V11 absorbed into X2 and the time-sharing variable dropped",
    ],
};

const CC_RVS: &[(&str, usize)] = &[
    ("U10", 2),
    ("U11", 2),
    ("V11", 2),
    ("V20", 2),
    ("V22", 2),
    ("X1", 2),
    ("X2", 2),
    ("Y1", 2),
    ("Y2", 2),
];

const CC_BINDING: (&str, &str, &str, &str) = ("X2", "X1", "Y2", "Y1");

const CC_FACTORS: &str = "U10; U11|U10; V20|U10,U11; V11|U10,U11,V20; V22|U10,U11,V20,V11; \
                          X1|U10,U11,V20,V11,V22; X2|U10,U11,V20,V11,V22,X1";

const CC: Spec = Spec {
    id: SchemaId::Cc,
    rvs: CC_RVS,
    binding: CC_BINDING,
    factorization: CC_FACTORS,
    rates: &[("R1", M), ("R2", M)],
    constraints: &[
        ("37", "R1 <= I(Y1; V11,U11,V20,U10)"),
        ("38", "R2 <= I(Y2; V20,V22 | U10) - I(V22,V20; U11 | U10)"),
        (
            "39",
            "R1 + R2 <= I(Y1; V11,U11 | V20,U10) + I(Y2; V22,V20,U10) - I(V22; U11,V11 | V20,U10)",
        ),
        (
            "40",
            "R1 + R2 <= I(Y1; V11,U11,V20,U10) + I(Y2; V22 | V20,U10) - I(V22; U11,V11 | V20,U10)",
        ),
        (
            "41",
            "2 R2 + R1 <= I(Y1; V11,U11,V20 | U10) + I(Y2; V22 | V20,U10) + I(Y2; V20,V22,U10) \
             - I(V22; U11,V11 | V20,U10) - I(V22,V20; U11 | U10)",
        ),
    ],
    r1: "R2",
    r2: "R1",
    zeroed: &[],
    notes: &[
        "user indices swapped: plane R1 is the comparator's R2 and its Y1 is the primary receiver",
    ],
};

const CCP: Spec = Spec {
    id: SchemaId::Ccp,
    rvs: CC_RVS,
    binding: CC_BINDING,
    factorization: CC_FACTORS,
    rates: &[("R1", M), ("R2", M)],
    constraints: &[
        ("37p", "R1 <= I(Y1; V11,U11,V20,U10)"),
        ("38p", "R2 <= I(Y2; V20,V22 | U10)"),
        (
            "39p",
            "R1 + R2 <= I(Y1; V11,U11 | V20,U10) + I(Y2; V22,V20,U10) - I(V22; U11,V11 | V20,U10)",
        ),
        (
            "40p",
            "R1 + R2 <= I(Y1; V11,U11,V20,U10) + I(Y2; V22 | V20,U10) - I(V22; U11,V11 | V20,U10)",
        ),
        (
            "41p",
            "2 R2 + R1 <= I(Y1; V11,U11,V20 | U10) + I(Y2; V22 | V20,U10) + I(Y2; V20,V22,U10) \
             - I(V22; U11,V11 | V20,U10)",
        ),
    ],
    r1: "R2",
    r2: "R1",
    zeroed: &[],
    notes: &["the comparator after U11 is merged into V11; U11 terms kept so both forms share one variable set"],
};

const CC_SPLIT_FACTORS: &str =
    "U2c; U1c|U2c; U1pb|U2c,U1c; U2pb|U2c,U1c,U1pb; X2=U2c; X1|U2c,U1c,U1pb,U2pb";

const CC_SPLIT_RATES: &[(&str, RateRole)] = &[
    ("R1c'", B),
    ("R1pb'", B),
    ("R2pb'", B),
    ("R1c", M),
    ("R1pb", M),
    ("R2c", M),
    ("R2pb", M),
];

const CCP_SPLIT: Spec = Spec {
    id: SchemaId::CcpSplit,
    rvs: RTD_RVS,
    binding: PLAIN,
    factorization: CC_SPLIT_FACTORS,
    rates: CC_SPLIT_RATES,
    constraints: &[
        ("bin 20", "R1c' >= 0"),
        ("bin 11+22", "R1pb' + R2pb' >= I(U1pb; U2pb | U2c,U1c)"),
        ("rx2 V11", "R2pb + R2pb' <= I(Y2; U2pb | U2c,U1c)"),
        ("rx2 V20", "R2pb + R2pb' + R1c + R1c' <= I(Y2; U1c,U2pb | U2c)"),
        (
            "rx2 U10",
            "R2pb + R2pb' + R1c + R1c' + R2c <= I(Y2; U1c,U2c,U2pb)",
        ),
        ("rx1 V22", "R1pb + R1pb' <= I(Y1; U1pb | U2c,U1c)"),
        ("rx1 V20", "R1pb + R1pb' + R1c + R1c' <= I(Y1; U1pb,U1c | U2c)"),
        (
            "rx1 U10",
            "R1pb + R1pb' + R1c + R1c' + R2c <= I(Y1; U1pb,U1c,U2c)",
        ),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pb",
    zeroed: &["R2pa"],
    notes: &["U11-free comparator with its split and binning rates under the variable assignment, in the unified names"],
};

const RTD_CC: Spec = Spec {
    id: SchemaId::RtdCc,
    rvs: RTD_RVS,
    binding: PLAIN,
    factorization: CC_SPLIT_FACTORS,
    rates: CC_SPLIT_RATES,
    constraints: &[
        ("1a", "R1c' >= 0"),
        ("1b", "R1c' + R1pb' >= 0"),
        ("1c", "R1c' + R1pb' + R2pb' >= I(U1pb; U2pb | U2c,U1c)"),
        ("1h", "R2pb + R2pb' <= I(Y2; U2pb | U2c,U1c)"),
        ("1g", "R2pb + R2pb' + R1c + R1c' <= I(Y2; U1c,U2pb | U2c)"),
        (
            "1d",
            "R2pb + R2pb' + R1c + R1c' + R2c <= I(Y2; U1c,U2c,U2pb)",
        ),
        ("1k", "R1pb + R1pb' <= I(Y1; U1pb | U2c,U1c)"),
        ("1j", "R1pb + R1pb' + R1c + R1c' <= I(Y1; U1pb,U1c | U2c)"),
        (
            "1i",
            "R1pb + R1pb' + R1c + R1c' + R2c <= I(Y1; U1pb,U1c,U2c)",
        ),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pb",
    zeroed: &["R2pa"],
    notes: &["unified region with R2pa = 0 and X2 = U2c; rows keep the label of the unified row they reduce to"],
};

const JIANG: Spec = Spec {
    id: SchemaId::Jiang,
    rvs: &[
        ("U1", 2),
        ("U2", 2),
        ("V1p", 2),
        ("W1", 2),
        ("W2", 2),
        ("X0", 2),
        ("Y1", 2),
        ("Y2", 2),
    ],
    binding: ("X0", "V1p", "Y2", "Y1"),
    factorization: "U1; V1p|U1; U2; W1,W2|V1p,U1,U2; X0|W1,W2,V1p,U1,U2",
    rates: &[
        ("R11'", B),
        ("R22'", B),
        ("R11", M),
        ("R12", M),
        ("R21", M),
        ("R22", M),
    ],
    constraints: &[
        ("Jiang 2", "R22' >= I(W2; V1p | U1,U2)"),
        ("Jiang 3", "R11' + R22' >= I(W2; W1,V1p | U1,U2)"),
        ("Jiang 4", "R11 + R11' <= I(V1p,W1; Y1 | U1,U2)"),
        ("Jiang 5", "R12 + R11 + R11' <= I(U1,V1p,W1; Y1 | U2)"),
        ("Jiang 6", "R21 + R11 + R11' <= I(U2,V1p,W1; Y1 | U1)"),
        ("Jiang 7", "R12 + R21 + R11 + R11' <= I(U1,V1p,W1,U2; Y1)"),
        ("Jiang 8", "R22 + R22' <= I(W2; Y2 | U1,U2)"),
        ("Jiang 9", "R21 + R22 + R22' <= I(U2,W2; Y2 | U1)"),
        ("Jiang 10", "R12 + R22 + R22' <= I(U1,W2; Y2 | U2)"),
        ("Jiang 11", "R12 + R21 + R22 + R22' <= I(U1,U2,W2; Y2)"),
    ],
    r1: "R21 + R22",
    r2: "R11 + R12",
    zeroed: &[],
    notes: &[
        "V1p stands for V1' = (V1, X1); the relay input X0 is the cognitive input",
        "user indices swapped: the comparator's Y1 is the primary receiver",
    ],
};

const RTD_JIANG: Spec = Spec {
    id: SchemaId::RtdJiang,
    rvs: RTD_RVS,
    binding: PLAIN,
    factorization: "U1c; U2c; X2|U2c; U1pb,U2pb|U1c,U2c,X2; X1|U2c,U1c,U1pb,U2pb",
    rates: &[
        ("R1c'", B),
        ("R1pb'", B),
        ("R2pb'", B),
        ("R1c", M),
        ("R1pb", M),
        ("R2c", M),
        ("R2pa", M),
    ],
    constraints: &[
        ("pin 1c'", "R1c' = I(U1c; X2 | U2c)"),
        ("us 1-0", "R1pb' >= I(U1pb; X2 | U2c,U1c)"),
        ("us 1-1", "R1pb' + R2pb' >= I(U1pb; X2,U2pb | U2c,U1c)"),
        (
            "us 1-2",
            "R2pa + R2pb' <= I(Y2; X2,U2pb | U2c,U1c) + I(U1c; X2 | U2c)",
        ),
        ("us 1-3", "R1c + R2pa + R2pb' <= I(Y2; U1c,X2,U2pb | U2c)"),
        (
            "us 1-4",
            "R2c + R1c + R2pa + R2pb' <= I(Y2; U2pb,U1c,U2c,X2)",
        ),
        ("us 1-5", "R1pb + R1pb' <= I(Y1; U1pb | U2c,U1c)"),
        ("us 1-6", "R1c + R1pb + R1pb' <= I(Y1; U1c,U1pb | U2c)"),
        (
            "us 1-7",
            "R2c + R1c + R1pb + R1pb' <= I(Y1; U2c,U1c,U1pb)",
        ),
    ],
    r1: "R1c + R1pb",
    r2: "R2c + R2pa",
    zeroed: &["R2pb"],
    notes: &["unified region with R2pb = 0 and R1c' pinned, under the independent-common-message factorization"],
};

const MARIC: Spec = Spec {
    id: SchemaId::Maric,
    rvs: &[
        ("Q", 1),
        ("X2a", 2),
        ("X2b", 2),
        ("U1c", 2),
        ("U1a", 2),
        ("X2", 2),
        ("X1", 2),
        ("Y1", 2),
        ("Y2", 2),
    ],
    binding: PLAIN,
    factorization: "Q; X2a|Q; X2b|Q,X2a; U1c|Q,X2a,X2b; U1a|Q,X2a,X2b,U1c; \
                    X2|Q,X2a,X2b,U1c,U1a; X1|Q,X2a,X2b,U1c,U1a,X2",
    rates: &[("R1", M), ("R2", M)],
    constraints: &[
        (
            "maric R1 1",
            "R1 <= I(U1a; Y1 | U1c,Q) - I(U1a; X2a,X2b | U1c,Q) + I(X2b,U1c; Y2 | X2a,Q)",
        ),
        (
            "maric R1 2",
            "R1 <= I(U1a,U1c; Y1 | Q) - I(U1a,U1c; X2a,X2b | Q)",
        ),
        ("maric R2 1", "R2 <= I(X2,U1c; Y2 | Q)"),
        ("maric R2 2", "R2 <= I(X2; Y2,U1c | Q)"),
        (
            "maric sum",
            "R1 + R2 <= I(U1a; Y1 | U1c,Q) - I(U1a; X2a,X2b | U1c,Q) + I(X2,U1c; Y2 | Q)",
        ),
    ],
    r1: "R1",
    r2: "R2",
    zeroed: &[],
    notes: &[
        "region after elimination, any law on (X1, X2, X2a, X2b, U1c, U1a, Q); Q kept degenerate",
        "the merged form is the same schema evaluated with X2b <- (X2a, X2b) and X2a degenerate",
    ],
};

fn spec_of(id: SchemaId) -> &'static Spec {
    match id {
        SchemaId::Rtd => &RTD,
        SchemaId::RtdIn => &RTD_IN,
        SchemaId::DmtOut => &DMT_OUT,
        SchemaId::Cc => &CC,
        SchemaId::Ccp => &CCP,
        SchemaId::CcpSplit => &CCP_SPLIT,
        SchemaId::RtdCc => &RTD_CC,
        SchemaId::Jiang => &JIANG,
        SchemaId::RtdJiang => &RTD_JIANG,
        SchemaId::Maric => &MARIC,
    }
}

fn parse_combination(text: &str) -> Result<Vec<(String, i64)>> {
    text.split('+')
        .map(|part| {
            let part = part.trim();
            match part.split_once(' ') {
                Some((c, n)) => c
                    .parse::<i64>()
                    .map(|c| (n.trim().to_string(), c))
                    .map_err(|_| Error::Parse {
                        text: text.to_string(),
                        reason: format!("bad coefficient in `{part}`"),
                    }),
                None => Ok((part.to_string(), 1)),
            }
        })
        .collect()
}

fn build(s: &Spec) -> Result<RegionSchema> {
    let (x1, x2, y1, y2) = s.binding;
    let schema = RegionSchema {
        id: s.id,
        rvs: RandomVariableSet::new(s.rvs.iter().copied())?,
        binding: ChannelBinding::new(x1, x2, y1, y2),
        factorization: FactorizationSpec::parse(s.factorization)?,
        rate_vars: s
            .rates
            .iter()
            .map(|(n, role)| RateVariable {
                name: n.to_string(),
                role: *role,
            })
            .collect(),
        constraints: s
            .constraints
            .iter()
            .map(|(label, text)| LinearRateConstraint::parse(label, text))
            .collect::<Result<_>>()?,
        projection: Projection {
            r1: parse_combination(s.r1)?,
            r2: parse_combination(s.r2)?,
        },
        zeroed: s.zeroed.iter().map(|z| z.to_string()).collect(),
    };
    schema.validate()?;
    Ok(schema)
}

/// The schema with the given id.
pub fn builtin_schema(id: SchemaId) -> Result<RegionSchema> {
    build(spec_of(id))
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestConstraint {
    pub label: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestSchema {
    pub id: SchemaId,
    pub factorization: String,
    pub binding: ChannelBinding,
    pub rate_vars: Vec<RateVariable>,
    pub zeroed: Vec<String>,
    pub r1: String,
    pub r2: String,
    pub constraints: Vec<ManifestConstraint>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schemas: Vec<ManifestSchema>,
    pub tables: Vec<CorrespondenceTable>,
    /// Constraint lists that appear in the source but are not encoded.
    pub superseded: Vec<ManifestConstraint>,
}

/// Thesis region before `X1` is inserted; kept for audit only.
const DMT_BEFORE_X1: &[(&str, &str)] = &[
    ("devroye 1", "R21' = I(V21; V11,V12 | W)"),
    ("devroye 2", "R22' = I(V22; V11,V12 | W)"),
    ("devroye 3", "R11 <= I(Y1,V12,V21; V11 | W)"),
    ("devroye 4", "R21 + R21' <= I(Y1,V11,V12; V21 | W)"),
    (
        "devroye 5",
        "R11 + R21 + R21' <= I(Y1,V12; V11,V21 | W) + I(V11; V21 | W)",
    ),
    (
        "devroye 6",
        "R11 + R21 + R21' + R12 <= I(Y1; V11,V21,V12 | W) + I(V11,V12; V21 | W)",
    ),
    ("devroye 7", "R22 + R22' <= I(Y2,V12,V21; V22 | W)"),
    (
        "devroye 8",
        "R22 + R22' + R21 + R21' <= I(Y2,V12; V22,V21 | W) + I(V22; V21 | W)",
    ),
    (
        "devroye 9",
        "R22 + R22' + R21 + R21' + R12 <= I(Y2; V22,V21,V12 | W) + I(V22,V21; V12 | W)",
    ),
];

fn combination_text(c: &[(String, i64)]) -> String {
    c.iter()
        .map(|(n, k)| {
            if *k == 1 {
                n.clone()
            } else {
                format!("{k} {n}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Audit map of every schema: constraint labels, their text, the
/// factorization and the correspondence tables.
pub fn manifest() -> Result<Manifest> {
    let schemas = SchemaId::ALL
        .iter()
        .map(|&id| {
            let s = builtin_schema(id)?;
            Ok(ManifestSchema {
                id,
                factorization: s.factorization.to_string(),
                binding: s.binding.clone(),
                rate_vars: s.rate_vars.clone(),
                zeroed: s.zeroed.clone(),
                r1: combination_text(&s.projection.r1),
                r2: combination_text(&s.projection.r2),
                constraints: s
                    .constraints
                    .iter()
                    .map(|c| ManifestConstraint {
                        label: c.label.clone(),
                        text: c.to_string(),
                    })
                    .collect(),
                notes: spec_of(id).notes.iter().map(|n| n.to_string()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Manifest {
        schemas,
        tables: vec![DMT_TABLE, CC_TABLE, CC_MERGE_TABLE, JIANG_TABLE],
        superseded: DMT_BEFORE_X1
            .iter()
            .map(|(l, t)| ManifestConstraint {
                label: l.to_string(),
                text: t.to_string(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Sense;

    #[test]
    fn every_builtin_schema_builds() {
        for id in SchemaId::ALL {
            let s = builtin_schema(id).unwrap();
            assert_eq!(s.id, id);
            for z in &s.zeroed {
                assert!(s.rate_vars.iter().all(|r| &r.name != z));
            }
        }
    }

    #[test]
    fn unified_region_shape() {
        let s = builtin_schema(SchemaId::Rtd).unwrap();
        assert_eq!(s.constraints.len(), 11);
        assert_eq!(s.rate_vars.len(), 8);
        let ge = s
            .constraints
            .iter()
            .filter(|c| c.sense == Sense::Ge)
            .count();
        assert_eq!(ge, 3);
        let labels: Vec<&str> = s.constraints.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            labels,
            ["1a", "1b", "1c", "1d", "1e", "1f", "1g", "1h", "1i", "1j", "1k"]
        );
    }

    #[test]
    fn cao_chen_has_one_double_coefficient() {
        let s = builtin_schema(SchemaId::Cc).unwrap();
        let doubles: Vec<_> = s
            .constraints
            .iter()
            .filter(|c| c.coeffs.iter().any(|(_, k)| *k == 2))
            .collect();
        assert_eq!(doubles.len(), 1);
        assert_eq!(doubles[0].coeff("R2"), 2);
    }

    #[test]
    fn jiang_subset_pins_and_zeroes() {
        let s = builtin_schema(SchemaId::RtdJiang).unwrap();
        assert_eq!(s.zeroed, vec!["R2pb".to_string()]);
        let pin = s.constraint("pin 1c'").unwrap();
        assert_eq!(pin.sense, Sense::Eq);
        assert_eq!(pin.coeffs, vec![("R1c'".to_string(), 1)]);
        assert_eq!(pin.rhs.to_string(), "I(U1c; X2 | U2c)");
    }

    #[test]
    fn manifest_lists_all_schemas() {
        let m = manifest().unwrap();
        assert_eq!(m.schemas.len(), SchemaId::ALL.len());
        assert_eq!(m.superseded.len(), 9);
        serde_json::to_string(&m).unwrap();
    }
}
