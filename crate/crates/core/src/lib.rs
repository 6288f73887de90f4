pub mod avg_error;
pub mod designs;
pub mod errors;
pub mod experiment;
pub mod fieldsim;
pub mod kernel;
pub mod problem;
pub mod quadrature;
pub mod spectrum;

pub use avg_error::{ErrorReport, LinearAlgorithm};
pub use designs::{Design, Provenance};
pub use errors::{Error, Result};
pub use experiment::{Config, ErrorCurve, RateFit};
pub use fieldsim::FieldRealization;
pub use kernel::GramFactorization;
pub use problem::ProblemSpec;
pub use quadrature::QuadratureRule;
pub use spectrum::{Spectrum, TractabilityVerdict};
