use std::fmt;

use serde::{Deserialize, Serialize};

use super::dual::Dual;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree over parameter references (0-based indices).
///
/// Exponents are integers folded at parse time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Why an expression could not be evaluated at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainError {
    DivisionByZero,
    SqrtOfNegative(f64),
    NotDifferentiable(&'static str),
    NonFinite,
    MissingParameter(usize),
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::DivisionByZero => write!(f, "division by zero"),
            DomainError::SqrtOfNegative(v) => write!(f, "sqrt of negative value {v}"),
            DomainError::NotDifferentiable(what) => write!(f, "{what} is not differentiable here"),
            DomainError::NonFinite => write!(f, "non-finite result"),
            DomainError::MissingParameter(k) => write!(f, "parameter index {k} out of range"),
        }
    }
}

/// Arithmetic needed to evaluate an [`Expr`]. Implemented for plain `f64`
/// and for forward-mode [`Dual`] numbers; both perform the same
/// floating-point operations on the value part.
pub trait Scalar: Sized {
    fn constant(v: f64, like: &Self) -> Self;
    fn value(&self) -> f64;
    fn neg(self) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn div(self, rhs: Self) -> Result<Self, DomainError>;
    fn powi(self, n: i32) -> Result<Self, DomainError>;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Result<Self, DomainError>;
}

impl Scalar for f64 {
    fn constant(v: f64, _: &Self) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn neg(self) -> Self {
        -self
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn div(self, rhs: Self) -> Result<Self, DomainError> {
        if rhs == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn powi(self, n: i32) -> Result<Self, DomainError> {
        if n < 0 && self == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        Ok(f64::powi(self, n))
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Result<Self, DomainError> {
        if self < 0.0 {
            return Err(DomainError::SqrtOfNegative(self));
        }
        Ok(f64::sqrt(self))
    }
}

impl Expr {
    /// Evaluates with parameters supplied as scalars of type `T`.
    pub fn eval_with<T: Scalar + Clone>(&self, params: &[T]) -> Result<T, DomainError> {
        let like = params.first().ok_or(DomainError::MissingParameter(0))?;
        let out = self.eval_inner(params, like)?;
        if !out.value().is_finite() {
            return Err(DomainError::NonFinite);
        }
        Ok(out)
    }

    fn eval_inner<T: Scalar + Clone>(&self, params: &[T], like: &T) -> Result<T, DomainError> {
        Ok(match self {
            Expr::Num(v) => T::constant(*v, like),
            Expr::Param(k) => params.get(*k).cloned().ok_or(DomainError::MissingParameter(*k))?,
            Expr::Neg(e) => e.eval_inner(params, like)?.neg(),
            Expr::Add(a, b) => a.eval_inner(params, like)?.add(b.eval_inner(params, like)?),
            Expr::Sub(a, b) => a.eval_inner(params, like)?.sub(b.eval_inner(params, like)?),
            Expr::Mul(a, b) => a.eval_inner(params, like)?.mul(b.eval_inner(params, like)?),
            Expr::Div(a, b) => a.eval_inner(params, like)?.div(b.eval_inner(params, like)?)?,
            Expr::Pow(a, n) => a.eval_inner(params, like)?.powi(*n)?,
            Expr::Call(func, a) => {
                let v = a.eval_inner(params, like)?;
                match func {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt()?,
                }
            }
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, DomainError> {
        if x.is_empty() {
            // constant expressions still need a carrier value
            return self.eval_inner(&[0.0], &0.0).and_then(|v| if v.is_finite() { Ok(v) } else { Err(DomainError::NonFinite) });
        }
        self.eval_with(x)
    }

    /// Value and gradient with respect to all parameters.
    pub fn eval_dual(&self, x: &[f64]) -> Result<Dual, DomainError> {
        let vars = Dual::variables(x);
        self.eval_with(&vars)
    }

    pub fn max_param(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Param(k) => Some(*k),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.max_param(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_param(), b.max_param()) {
                    (Some(p), Some(q)) => Some(p.max(q)),
                    (p, q) => p.or(q),
                }
            }
        }
    }

    /// Canonical text form. Binary operations are fully parenthesized so the
    /// output re-parses to an identical tree.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_text(names, &mut s);
        s
    }

    fn write_text(&self, names: &[String], out: &mut String) {
        use std::fmt::Write;
        match self {
            Expr::Num(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::Param(k) => match names.get(*k) {
                Some(n) => out.push_str(n),
                None => {
                    let _ = write!(out, "x{}", k + 1);
                }
            },
            Expr::Neg(e) => {
                out.push_str("(-");
                e.write_text(names, out);
                out.push(')');
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => " * ",
                    _ => " / ",
                };
                out.push('(');
                a.write_text(names, out);
                out.push_str(op);
                b.write_text(names, out);
                out.push(')');
            }
            Expr::Pow(a, n) => {
                out.push('(');
                a.write_text(names, out);
                let _ = write!(out, "^({n}))");
            }
            Expr::Call(func, a) => {
                out.push_str(func.name());
                out.push('(');
                a.write_text(names, out);
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors() {
        let div = Expr::Div(Box::new(Expr::Num(1.0)), Box::new(Expr::Param(0)));
        assert_eq!(div.eval(&[0.0]), Err(DomainError::DivisionByZero));
        let sq = Expr::Call(Func::Sqrt, Box::new(Expr::Param(0)));
        assert!(matches!(sq.eval(&[-1.0]), Err(DomainError::SqrtOfNegative(_))));
        assert_eq!(sq.eval(&[4.0]), Ok(2.0));
        let inv = Expr::Pow(Box::new(Expr::Param(0)), -1);
        assert_eq!(inv.eval(&[0.0]), Err(DomainError::DivisionByZero));
        let big = Expr::Call(Func::Exp, Box::new(Expr::Param(0)));
        assert_eq!(big.eval(&[1000.0]), Err(DomainError::NonFinite));
    }

    #[test]
    fn printed_text_is_parenthesized() {
        let e = Expr::Mul(Box::new(Expr::Param(0)), Box::new(Expr::Call(Func::Cos, Box::new(Expr::Param(1)))));
        assert_eq!(e.to_text(&["a".into(), "b".into()]), "(a * cos(b))");
    }
}
