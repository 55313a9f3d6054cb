//! Compatibility analysis for multiparameter quantum estimation.
//!
//! States are written `ρ = (1/N)(I + Σ_a β_a S_a)` over an orthonormal
//! traceless generator set. SLDs, Fisher matrices and the commutation
//! condition are computed numerically; the antisymmetric matrix
//! `X^β_ab = Σ_c f_abc β_c` bounds how many parameters can be estimated
//! simultaneously at the quantum limit.

pub mod algebra;
pub mod bound;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod model;
pub mod state;
pub mod tolerances;

pub use algebra::{make_preset, GeneratorSet, Preset, StructureConstants};
pub use bound::{sharp_l, sharp_x_bound, stratum_scan, BoundReport, InvariantOrder, ScanReport, StratumSpec, XMatrix};
pub use error::{Error, Result};
pub use estimation::{fisher_bundle, FisherBundle, Povm};
pub use linalg::{CMatrix, HermitianMatrix, RMatrix};
pub use model::{Convention, Model};
pub use state::{assemble_rho, DensityMatrix};
pub use tolerances::Tolerances;
