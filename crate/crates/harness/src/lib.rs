//! Randomized verification harness for the `noneuclid` predicates.
//!
//! A [`Scene`](scene::Scene) holds named points, curves and assertions. The
//! generators in [`generate`] build scenes realizing each suite's hypotheses,
//! [`suite::run_suite`] checks many of them, and [`report`] writes the
//! results as CSV.

pub mod config;
pub mod generate;
pub mod plot;
pub mod predicates;
pub mod report;
pub mod rng;
pub mod scene;
pub mod suite;

pub use config::Tolerances;
pub use generate::{generate_scene, GenerationFailed, Request};
pub use predicates::{check_scene, evaluate, Outcome};
pub use scene::{Assertion, Relation, Scene, SceneError};
pub use suite::{run_suite, RunSpec, Suite, SuiteReport};
