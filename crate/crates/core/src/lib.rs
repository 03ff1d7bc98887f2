//! Fuzzy multi-objective reliability-redundancy allocation.
//!
//! Interval type-2 fuzzy reliabilities are reduced to crisp values, plugged
//! into a series-parallel reliability model with cost, volume and weight,
//! and the resulting bi-objective integer problem is solved by exhaustive
//! enumeration under several scalarization methods.

/// Serializes a type through its `Display` and `FromStr` text form.
macro_rules! serde_via_str {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub mod config;
pub mod error;
pub mod fuzzy;
pub mod generate;
pub mod model;
pub mod moo;
pub mod output;
pub mod pipeline;
pub mod reduction;
pub mod solver;

pub use error::{Error, ErrorKind, Result};
pub use fuzzy::{DiscretizedFou, IntervalType2, Triangular, DEFAULT_GRID};
pub use reduction::{CentroidInterval, Reduction};
pub use generate::GenerationSpec;
pub use model::{evaluate, Design, Evaluation, ProblemInstance, SubsystemParams, Violation};
pub use moo::{Method, Objectives, PayoffTable};
pub use solver::{CompromiseSolution, FeasibleSet, ParetoFront};
pub use config::{ProblemConfig, Profile};
pub use pipeline::{run_pipeline, Report, RunOptions, Stage, StageError};
