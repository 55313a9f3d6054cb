use super::expr::{DomainError, Scalar};

/// Forward-mode dual number carrying a value and its gradient with respect
/// to all `m` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub partials: Vec<f64>,
}

impl Dual {
    pub fn constant(value: f64, m: usize) -> Self {
        Dual { value, partials: vec![0.0; m] }
    }

    /// Seeds one dual variable per coordinate of `x`.
    pub fn variables(x: &[f64]) -> Vec<Dual> {
        let m = x.len();
        x.iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut partials = vec![0.0; m];
                partials[k] = 1.0;
                Dual { value: v, partials }
            })
            .collect()
    }

    fn map_partials(mut self, value: f64, scale: f64) -> Self {
        self.value = value;
        for p in &mut self.partials {
            *p *= scale;
        }
        self
    }
}

impl Scalar for Dual {
    fn constant(v: f64, like: &Self) -> Self {
        Dual::constant(v, like.partials.len())
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn neg(mut self) -> Self {
        self.value = -self.value;
        for p in &mut self.partials {
            *p = -*p;
        }
        self
    }

    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (p, q) in self.partials.iter_mut().zip(&rhs.partials) {
            *p += q;
        }
        self
    }

    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (p, q) in self.partials.iter_mut().zip(&rhs.partials) {
            *p -= q;
        }
        self
    }

    fn mul(mut self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        for (p, q) in self.partials.iter_mut().zip(&rhs.partials) {
            *p = *p * b + a * q;
        }
        self.value = a * b;
        self
    }

    fn div(mut self, rhs: Self) -> Result<Self, DomainError> {
        let b = rhs.value;
        if b == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        let v = self.value / b;
        for (p, q) in self.partials.iter_mut().zip(&rhs.partials) {
            *p = (*p - v * q) / b;
        }
        self.value = v;
        Ok(self)
    }

    fn powi(self, n: i32) -> Result<Self, DomainError> {
        let a = self.value;
        if n < 0 && a == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        let v = a.powi(n);
        let d = if n == 0 { 0.0 } else { n as f64 * a.powi(n - 1) };
        Ok(self.map_partials(v, d))
    }

    fn sin(self) -> Self {
        let a = self.value;
        self.map_partials(a.sin(), a.cos())
    }

    fn cos(self) -> Self {
        let a = self.value;
        self.map_partials(a.cos(), -a.sin())
    }

    fn exp(self) -> Self {
        let v = self.value.exp();
        self.map_partials(v, v)
    }

    fn sqrt(self) -> Result<Self, DomainError> {
        let a = self.value;
        if a < 0.0 {
            return Err(DomainError::SqrtOfNegative(a));
        }
        let v = a.sqrt();
        if v == 0.0 {
            if self.partials.iter().any(|&p| p != 0.0) {
                return Err(DomainError::NotDifferentiable("sqrt at 0"));
            }
            return Ok(self.map_partials(0.0, 0.0));
        }
        Ok(self.map_partials(v, 0.5 / v))
    }
}
