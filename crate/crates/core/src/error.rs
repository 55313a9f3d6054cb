use thiserror::Error;

use crate::model::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unknown preset `{0}` (expected pauli, gellmann or xstate2q)")]
    UnknownPreset(String),

    #[error("preset `{name}` requires N = {required}, got {got}")]
    PresetDimension {
        name: String,
        required: usize,
        got: usize,
    },

    #[error("generators are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("generator {index} is not traceless (|tr| = {trace:e})")]
    NotTraceless { index: usize, trace: f64 },

    #[error("generator {index} is linearly dependent on the previous ones (pivot {pivot:e})")]
    LinearDependence { index: usize, pivot: f64 },

    #[error("Lie product of generators ({a}, {b}) leaves their span (residual {residual:e})")]
    NotClosed { a: usize, b: usize, residual: f64 },

    #[error("structure constants are not antisymmetric in their first two indices (deviation {0:e})")]
    NotAntisymmetric(f64),

    #[error("expression error: {0}")]
    Parse(#[from] ParseError),

    #[error("domain error in beta component {component}: {reason}")]
    Domain { component: usize, reason: String },

    #[error("density matrix trace is {0}, expected 1")]
    NonUnitTrace(f64),

    #[error("state derivative has weight {weight:e} in the kernel of rho (eigen pair {j}, {k})")]
    UnsupportedDerivative { j: usize, k: usize, weight: f64 },

    #[error("density matrix is singular (min eigenvalue {0:e}); integral SLD does not converge")]
    SingularState(f64),

    #[error("quadrature did not converge (max entry change {0:e})")]
    QuadratureNotConverged(f64),

    #[error("POVM is invalid: {0}")]
    InvalidPovm(String),

    #[error("outcome {outcome} has probability {probability:e} but derivative {derivative:e}; classical Fisher information diverges")]
    DivergentFisher {
        outcome: usize,
        probability: f64,
        derivative: f64,
    },

    #[error("rank {rank} out of range for g = {g} (must be even and <= g)")]
    RankOutOfRange { rank: usize, g: usize },

    #[error("symplectic reduction failed: {0}")]
    Symplectic(String),

    #[error("missing data for strata {0:?}")]
    MissingStrata(Vec<usize>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
