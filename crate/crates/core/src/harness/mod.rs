//! Instance generators, crafted inputs for the normalizing steps, batch
//! experiments, and the exhaustive small-tree sweep.

pub mod crafted;
pub mod experiment;
pub mod generate;
pub mod sweep;

use num_rational::Rational64;
use thiserror::Error;

pub use crafted::{crafted_instances, CraftedBatch, CraftedInstance, Gate};
pub use experiment::{run_experiment, uniform_specs, ExperimentReport, ExperimentRow};
pub use generate::{generate, GeneratorKind, GeneratorSpec, RevealOrder};
pub use sweep::{enumerate_parents, exhaustive_small_sweep, parents_count, SweepReport, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("infeasible generator spec {spec:?}: {reason}")]
    InfeasibleSpec { spec: GeneratorSpec, reason: String },
    #[error("RA ratio {ratio} exceeds 5/2 on {input}")]
    BoundViolated { ratio: String, input: String },
    #[error("sweep limited to n <= 12, got {0}")]
    SweepTooLarge(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

/// `num/den`, always with the denominator.
pub fn format_ratio(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The bound every RA ratio must respect.
pub fn five_halves() -> Rational64 {
    Rational64::new(5, 2)
}
