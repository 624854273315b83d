//! Rate regions of the discrete memoryless cognitive interference channel:
//! schemas, numeric projection to the (R1, R2) plane and containment checks.

pub mod channel;
mod error;
pub mod polytope;
pub mod probability;
pub mod region;
pub mod verification;

pub use error::{Error, Result};
