//! Exact and numeric tools for GKZ-type hypergeometric systems attached to
//! quasi-symmetric weight configurations.

pub mod analytic;
pub mod arrangement;
pub mod cone;
pub mod exactlat;
pub mod instances;
pub mod ksdata;
pub mod ktheory;
pub mod laurent;
pub mod lp;
pub mod rational;
pub mod resonance;
pub mod schober_k0;
pub mod verify;

pub use exactlat::{validate_config, validate_config_with_dual, ExactLatError, IntMatrix, WeightConfig};
