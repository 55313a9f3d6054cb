use serde::{Deserialize, Serialize};

/// Numerical thresholds used across an analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on traces and closure residuals.
    pub algebra: f64,
    /// Eigenvalue-sum threshold below which an SLD entry lies in the kernel.
    pub null: f64,
    /// Relative singular-value threshold for ranks of `X^β`.
    pub rank: f64,
    /// Absolute threshold on the commutation matrix.
    pub compat: f64,
    /// States with min eigenvalue >= -psd are physical.
    pub psd: f64,
    /// Shared threshold for the QFIM / state-derivative independence test.
    pub invertibility: f64,
    /// Relative threshold below which a characteristic coefficient vanishes.
    pub vanishing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-10,
            null: 1e-10,
            rank: 1e-9,
            compat: 1e-9,
            psd: 1e-10,
            invertibility: 1e-9,
            vanishing: 1e-9,
        }
    }
}

impl Tolerances {
    /// Overrides one tolerance by name; `all` sets every field.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "algebra" => self.algebra = value,
            "null" => self.null = value,
            "rank" => self.rank = value,
            "compat" => self.compat = value,
            "psd" => self.psd = value,
            "invertibility" => self.invertibility = value,
            "vanishing" => self.vanishing = value,
            "all" => {
                *self = Tolerances {
                    algebra: value,
                    null: value,
                    rank: value,
                    compat: value,
                    psd: value,
                    invertibility: value,
                    vanishing: value,
                }
            }
            _ => return false,
        }
        true
    }
}
