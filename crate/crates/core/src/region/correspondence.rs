//! Name maps from comparator regions into the unified region's variables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::probability::JointDistribution;

/// Random-variable and rate assignments between two schemas. An RV mapped
/// to `None` must be degenerate and is summed out.
#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceTable {
    pub name: &'static str,
    pub rvs: &'static [(&'static str, Option<&'static str>)],
    pub rates: &'static [(&'static str, &'static str)],
    pub notes: &'static [&'static str],
}

/// Thesis region of Devroye (primed `X1'` = `(X1, V11)`) into the unified
/// region. The comparator is transcribed directly in the target names, so
/// this table documents the assignment rather than drives a rename.
pub const DMT_TABLE: CorrespondenceTable = CorrespondenceTable {
    name: "devroye",
    rvs: &[
        ("V12", Some("U2c")),
        ("V21", Some("U1c")),
        ("V22", Some("U1pb")),
        ("X1'", Some("X2")),
        ("X2", Some("X1")),
        ("Y1", Some("Y2")),
        ("Y2", Some("Y1")),
    ],
    rates: &[
        ("R12", "R2c"),
        ("R21", "R1c"),
        ("R22", "R1pb"),
        ("R11", "R2pa"),
        ("L21-R21", "R1c'"),
        ("L22-R22", "R1pb'"),
    ],
    notes: &[
        "U2pb is degenerate and R2pb' = R2pb = 0",
        "W and V11 are absorbed before the assignment (W into V12, V11 into X1')",
        "user indices are swapped with respect to the unified region",
    ],
};

/// Cao–Chen variables into the unified region.
pub const CC_TABLE: CorrespondenceTable = CorrespondenceTable {
    name: "cao-chen",
    rvs: &[
        ("U10", Some("U2c")),
        ("U11", None),
        ("V20", Some("U1c")),
        ("V22", Some("U1pb")),
        ("V11", Some("U2pb")),
        ("X1", Some("X2")),
        ("X2", Some("X1")),
        ("Y1", Some("Y2")),
        ("Y2", Some("Y1")),
    ],
    rates: &[
        ("R10", "R2c"),
        ("R20", "R1c"),
        ("R22", "R1pb"),
        ("L20-R20", "R1c'"),
        ("L22-R22", "R1pb'"),
        ("L11-R11", "R2pb'"),
    ],
    notes: &[
        "X2 = U2c and R2pa = 0 on the unified side",
        "U11 is degenerate and R11 = 0",
        "user indices are swapped with respect to the unified region",
    ],
};

/// Removal of `U11` by merging it into `V11`.
pub const CC_MERGE_TABLE: CorrespondenceTable = CorrespondenceTable {
    name: "cao-chen-merge",
    rvs: &[("U11", None), ("V11", Some("V11"))],
    rates: &[],
    notes: &["V11' = (V11, U11) and U11' is degenerate; other variables unchanged"],
};

/// Jiang–Xin variables (with `V1'` = `(V1, X1)`) into the unified region.
pub const JIANG_TABLE: CorrespondenceTable = CorrespondenceTable {
    name: "jiang",
    rvs: &[
        ("U1", Some("U2c")),
        ("V1p", Some("X2")),
        ("U2", Some("U1c")),
        ("W2", Some("U1pb")),
        ("W1", Some("U2pb")),
        ("X0", Some("X1")),
        ("Y1", Some("Y2")),
        ("Y2", Some("Y1")),
    ],
    rates: &[
        ("R12", "R2c"),
        ("R11", "R2pa"),
        ("R21", "R1c"),
        ("R22", "R1pb"),
        ("R11'", "R2pb'"),
        ("R22'", "R1pb'"),
    ],
    notes: &[
        "R2pb = 0 and R1c' = I(U1c; X2 | U2c)",
        "the cognitive relay input X0 plays the cognitive input X1",
    ],
};

impl CorrespondenceTable {
    /// Image of a comparator RV.
    pub fn target(&self, name: &str) -> Option<Option<&'static str>> {
        self.rvs.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }

    /// Checks injectivity on RV names.
    pub fn validate(&self) -> Result<()> {
        let targets: Vec<&str> = self.rvs.iter().filter_map(|(_, t)| *t).collect();
        for (i, t) in targets.iter().enumerate() {
            if targets[i + 1..].contains(t) {
                return Err(Error::InvalidParameter(format!(
                    "table {} maps two variables to {t}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Renames a comparator distribution into the target names. Unmapped
    /// variables are an error; variables mapped to nothing must be
    /// degenerate and are summed out.
    pub fn map_distribution(&self, d: &JointDistribution) -> Result<JointDistribution> {
        let mut keep = Vec::new();
        let mut renames = Vec::new();
        for (name, size) in d.rvs().names().iter().zip(d.rvs().sizes()) {
            match self.target(name) {
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "table {} does not map {name}",
                        self.name
                    )))
                }
                Some(None) => {
                    if *size != 1 {
                        return Err(Error::InvalidParameter(format!(
                            "{name} must be degenerate to be dropped"
                        )));
                    }
                }
                Some(Some(t)) => {
                    keep.push(name.as_str());
                    renames.push((name.as_str(), t));
                }
            }
        }
        d.marginalize(&keep)?.renamed(&renames)
    }
}
