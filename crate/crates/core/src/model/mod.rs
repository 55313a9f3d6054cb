//! Encode maps `β(x)`: parsed expressions over the parameters with exact
//! forward-mode derivatives.

mod dual;
mod expr;
mod parse;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use dual::Dual;
pub use expr::{DomainError, Expr, Func, Scalar};
pub use parse::{parse_expression, ParseError, ParseErrorKind};

use crate::algebra::GeneratorSet;
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// How the user-facing β relates to the orthonormal internal basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `ρ = (1/N)(I + Σ β_a S_a)` with `tr(S_a S_b) = δ_ab`.
    #[default]
    Internal,
    /// Qubit Bloch vector: `ρ = (I + n·σ)/2`.
    PaperPauli,
    /// X-state coefficients against the unnormalized Pauli products.
    PaperXstate,
}

impl Convention {
    /// Factor mapping user β to internal β.
    pub fn scale(self) -> f64 {
        match self {
            Convention::Internal => 1.0,
            Convention::PaperPauli => std::f64::consts::SQRT_2,
            Convention::PaperXstate => 2.0,
        }
    }

    fn check(self, gs: &GeneratorSet) -> Result<()> {
        let (n, g, label) = match self {
            Convention::Internal => return Ok(()),
            Convention::PaperPauli => (2, 3, "paper-pauli"),
            Convention::PaperXstate => (4, 7, "paper-xstate"),
        };
        if gs.dim_hilbert() != n || gs.g() != g {
            return Err(Error::InvalidInput(format!("convention {label} needs N = {n}, g = {g}")));
        }
        Ok(())
    }
}

/// A parameterized state `ρ(x) = (1/N)(I + Σ_a β_a(x) S_a)`.
#[derive(Clone, Debug)]
pub struct Model {
    generator_set: Arc<GeneratorSet>,
    params: Vec<String>,
    beta: Vec<Expr>,
    convention: Convention,
    pub tolerances: Tolerances,
}

impl Model {
    pub fn new(generator_set: Arc<GeneratorSet>, params: Vec<String>, beta: Vec<Expr>, convention: Convention) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidInput("at least one parameter is required".into()));
        }
        for (k, p) in params.iter().enumerate() {
            if Func::from_name(p).is_some() {
                return Err(Error::InvalidInput(format!("parameter name `{p}` shadows a function")));
            }
            if params[..k].contains(p) {
                return Err(Error::InvalidInput(format!("duplicate parameter `{p}`")));
            }
        }
        if beta.len() != generator_set.g() {
            return Err(Error::DimensionMismatch { what: "beta expressions", expected: generator_set.g(), got: beta.len() });
        }
        if let Some(k) = beta.iter().filter_map(Expr::max_param).max() {
            if k >= params.len() {
                return Err(Error::InvalidInput(format!("parameter index {k} out of range")));
            }
        }
        convention.check(&generator_set)?;
        Ok(Model { generator_set, params, beta, convention, tolerances: Tolerances::default() })
    }

    /// Parses one expression per generator.
    pub fn parse(generator_set: Arc<GeneratorSet>, params: Vec<String>, beta: &[&str], convention: Convention) -> Result<Self> {
        let exprs = beta.iter().map(|t| parse_expression(t, &params)).collect::<Result<Vec<_>, _>>()?;
        Self::new(generator_set, params, exprs, convention)
    }

    pub fn generator_set(&self) -> &Arc<GeneratorSet> {
        &self.generator_set
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.params.len()
    }

    pub fn g(&self) -> usize {
        self.beta.len()
    }

    pub fn beta_exprs(&self) -> &[Expr] {
        &self.beta
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch { what: "parameter point", expected: self.m(), got: x.len() });
        }
        Ok(())
    }

    /// Internal-convention `β(x)`.
    pub fn eval_beta(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let s = self.convention.scale();
        self.beta
            .iter()
            .enumerate()
            .map(|(component, e)| {
                e.eval(x).map(|v| s * v).map_err(|err| Error::Domain { component, reason: err.to_string() })
            })
            .collect()
    }

    /// `∂_i β_a` as a g×m matrix, by forward-mode differentiation.
    pub fn eval_beta_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let s = self.convention.scale();
        let mut jac = DMatrix::zeros(self.g(), self.m());
        for (component, e) in self.beta.iter().enumerate() {
            let d = e.eval_dual(x).map_err(|err| Error::Domain { component, reason: err.to_string() })?;
            for (i, p) in d.partials.iter().enumerate() {
                jac[(component, i)] = s * p;
            }
        }
        Ok(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_preset;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn qubit() -> Model {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        Model::parse(gs, names(&["x1", "x2"]), &["cos(x1)*sin(x2)", "sin(x1)*sin(x2)", "cos(x2)"], Convention::Internal).unwrap()
    }

    #[test]
    fn qubit_beta() {
        let b = qubit().eval_beta(&[0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        assert_eq!(b[0], 1.0);
        assert_eq!(b[1], 0.0);
        assert!(b[2].abs() < 1e-16);
    }

    #[test]
    fn xstate_beta() {
        let gs = Arc::new(make_preset("xstate2q", 4).unwrap());
        let m = Model::parse(gs, names(&["x1", "x2", "x3"]), &["x1", "-x1", "0", "x2", "x3", "-x3", "x2"], Convention::Internal)
            .unwrap();
        assert_eq!(m.eval_beta(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn division_by_zero_names_component() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs, names(&["x"]), &["x", "1/x", "0"], Convention::Internal).unwrap();
        assert!(matches!(m.eval_beta(&[0.0]), Err(Error::Domain { component: 1, .. })));
        assert!(matches!(m.eval_beta_jacobian(&[0.0]), Err(Error::Domain { component: 1, .. })));
    }

    #[test]
    fn jacobian_examples() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs, names(&["x1", "x2"]), &["x1*x2", "sin(x1)", "0"], Convention::Internal).unwrap();
        let j = m.eval_beta_jacobian(&[2.0, 3.0]).unwrap();
        assert_eq!((j[(0, 0)], j[(0, 1)]), (3.0, 2.0));
        let j0 = m.eval_beta_jacobian(&[0.0, 3.0]).unwrap();
        assert_eq!(j0[(1, 0)], 1.0);
        assert_eq!(j0[(2, 0)], 0.0);
    }

    #[test]
    fn convention_scaling() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs.clone(), names(&["r"]), &["0", "0", "r"], Convention::PaperPauli).unwrap();
        assert_eq!(m.eval_beta(&[1.0]).unwrap()[2], std::f64::consts::SQRT_2);
        assert!(Model::parse(gs, names(&["r"]), &["0", "0", "r"], Convention::PaperXstate).is_err());
    }

    #[test]
    fn rejects_bad_models() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        assert!(matches!(
            Model::parse(gs.clone(), names(&["x"]), &["x", "x"], Convention::Internal),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Model::parse(gs.clone(), names(&["sin"]), &["1", "1", "1"], Convention::Internal).is_err());
        assert!(Model::parse(gs.clone(), vec![], &["1", "1", "1"], Convention::Internal).is_err());
        assert!(matches!(
            Model::parse(gs, names(&["x"]), &["y", "1", "1"], Convention::Internal),
            Err(Error::Parse(_))
        ));
    }
}
