//! Exact harmonic analysis and Bayesian filtering on the symmetric group,
//! with a statevector model of a diffusion/conditioning pipeline.
//!
//! Permutations are indexed by the big-endian factorial-base rank of their
//! Lehmer code. Irreducible representations use Young's orthogonal form with
//! partitions in reverse lexicographic order.

pub mod conditioning;
pub mod diffusion;
pub mod error;
pub mod gft;
pub mod irrep;
pub mod perm;
pub mod pipeline;
pub mod verify;
pub mod young;

pub use conditioning::{Encoding, Observation, ObservationKind};
pub use diffusion::{DiffusionKernel, LowerBound, StayProbability};
pub use error::{Error, Result};
pub use gft::{FourierSpectrum, GroupFunction, Normalization};
pub use irrep::IrrepMatrix;
pub use perm::{LehmerCode, Permutation, ReorderMode};
pub use pipeline::{ExperimentPlan, ModelState, PlanStep, RunReport};
pub use young::Partition;
