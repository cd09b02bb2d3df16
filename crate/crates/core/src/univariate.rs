//! The fractional Kantorovich operator `K` and its affine-preserving variant `A`.
//!
//! ```text
//! K(f; x) = Σ_k b_{n,k}^α(x) · β ∫₀¹ (1−t)^{β−1} f((k+t)/(n+1)) dt
//! A(f; x) = Σ_k b_{n,k}^α(x) · β ∫₀¹ (1−t)^{β−1} f(a_{n,k}(k+t)/(n+1)) dt
//! ```
//!
//! The inner integrals are evaluated with a Gauss–Jacobi rule and depend only
//! on `k`, so they are tabulated once per function and reused for every `x`.

use crate::basis::{discrete_apply_with, discrete_second_moment, BasisContext};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::special_functions::{
    check_beta, gauss_jacobi_rule, QuadratureRule, DEFAULT_QUAD_NODES, MAX_QUAD_NODES,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub quad_nodes: usize,
}

impl UnivariateParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            n,
            alpha,
            beta,
            quad_nodes: DEFAULT_QUAD_NODES,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_quad_nodes(mut self, q: usize) -> Result<Self> {
        self.quad_nodes = q;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        check_beta(self.beta)?;
        if self.quad_nodes < 1 || self.quad_nodes > MAX_QUAD_NODES {
            return Err(Error::invalid(format!(
                "quad_nodes must lie in [1, {MAX_QUAD_NODES}], got {}",
                self.quad_nodes
            )));
        }
        Ok(())
    }
}

/// Which operator a moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    K,
    A,
}

/// Formula used for the affine coefficients `a_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AffineVariant {
    /// Solves `a_{n,k}(k + 1/(β+1))/(n+1) = k/n` exactly.
    #[default]
    Derived,
    /// `k(n+1)(β+1) / (n(kβ+1))`, kept for comparison; it does not reproduce `e₁`.
    Printed,
}

impl AffineVariant {
    pub fn coefficient(self, n: usize, k: usize, beta: f64) -> f64 {
        match self {
            AffineVariant::Derived => affine_coefficient(n, k, beta),
            AffineVariant::Printed => printed_affine_coefficient(n, k, beta),
        }
    }
}

/// `a_{n,k} = k(n+1)(β+1) / (n(k(β+1)+1))`, the scaling that makes `A` fix `e₁`.
pub fn affine_coefficient(n: usize, k: usize, beta: f64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    k * (n + 1.0) * (beta + 1.0) / (n * (k * (beta + 1.0) + 1.0))
}

pub fn printed_affine_coefficient(n: usize, k: usize, beta: f64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    k * (n + 1.0) * (beta + 1.0) / (n * (k * beta + 1.0))
}

/// Largest argument `max_k a_{n,k}(k+1)/(n+1)` at which `A` samples `f`.
pub fn affine_domain_upper(n: usize, beta: f64, variant: AffineVariant) -> f64 {
    (0..=n)
        .map(|k| variant.coefficient(n, k, beta) * (k as f64 + 1.0) / (n as f64 + 1.0))
        .fold(0.0, f64::max)
}

/// An operator instance: basis context plus quadrature rule.
#[derive(Debug, Clone)]
pub struct UnivariateOperator {
    params: UnivariateParams,
    basis: BasisContext,
    rule: QuadratureRule,
}

/// Per-`k` inner integrals of one function, ready to be evaluated at any `x`.
#[derive(Debug, Clone)]
pub struct PreparedUnivariate<'a> {
    basis: &'a BasisContext,
    inner: Vec<f64>,
}

impl PreparedUnivariate<'_> {
    pub fn inner(&self) -> &[f64] {
        &self.inner
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("x must lie in [0, 1], got {x}")));
        }
        let mut row = vec![0.0; self.inner.len()];
        self.basis.fill_row(x, &mut row);
        Ok(row.iter().zip(&self.inner).map(|(b, v)| b * v).sum())
    }
}

fn require_univariate(f: &ScalarField) -> Result<()> {
    if f.is_bivariate() {
        Err(Error::invalid(format!(
            "univariate operator applied to bivariate function {}",
            f.name()
        )))
    } else {
        Ok(())
    }
}

impl UnivariateOperator {
    pub fn new(params: &UnivariateParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: *params,
            basis: BasisContext::new(params.n, params.alpha)?,
            rule: gauss_jacobi_rule(params.beta, params.quad_nodes)?,
        })
    }

    pub fn params(&self) -> &UnivariateParams {
        &self.params
    }

    pub fn basis(&self) -> &BasisContext {
        &self.basis
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// `β Σᵢ wᵢ g((k+tᵢ)/(n+1))` for every `k`.
    pub fn prepare_k_with(&self, g: impl Fn(f64) -> f64) -> Result<PreparedUnivariate<'_>> {
        let scale = 1.0 / (self.params.n as f64 + 1.0);
        let inner = (0..=self.params.n)
            .map(|k| {
                let mut sum = 0.0;
                for (t, w) in self.rule.iter() {
                    let arg = (k as f64 + t) * scale;
                    let v = g(arg);
                    if !v.is_finite() {
                        return Err(Error::non_finite_1d(arg));
                    }
                    sum += w * v;
                }
                Ok(self.params.beta * sum)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedUnivariate {
            basis: &self.basis,
            inner,
        })
    }

    pub fn prepare_k(&self, f: &ScalarField) -> Result<PreparedUnivariate<'_>> {
        require_univariate(f)?;
        self.prepare_k_with(|t| f.eval1(t))
    }

    pub fn prepare_a(
        &self,
        f: &ScalarField,
        variant: AffineVariant,
    ) -> Result<PreparedUnivariate<'_>> {
        require_univariate(f)?;
        let n = self.params.n;
        let scale = 1.0 / (n as f64 + 1.0);
        let upper = f.domain_upper();
        let mut inner = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let a = variant.coefficient(n, k, self.params.beta);
            let reach = a * (k as f64 + 1.0) * scale;
            if reach > upper {
                return Err(Error::Domain {
                    k,
                    argument: reach,
                    upper,
                });
            }
            let mut sum = 0.0;
            for (t, w) in self.rule.iter() {
                let arg = a * (k as f64 + t) * scale;
                let v = f.eval1(arg);
                if !v.is_finite() {
                    return Err(Error::Domain {
                        k,
                        argument: arg,
                        upper,
                    });
                }
                sum += w * v;
            }
            inner.push(self.params.beta * sum);
        }
        Ok(PreparedUnivariate {
            basis: &self.basis,
            inner,
        })
    }

    pub fn k_eval(&self, f: &ScalarField, x: f64) -> Result<f64> {
        self.prepare_k(f)?.eval(x)
    }

    pub fn a_eval(&self, f: &ScalarField, x: f64) -> Result<f64> {
        self.a_eval_variant(f, x, AffineVariant::Derived)
    }

    pub fn a_eval_variant(&self, f: &ScalarField, x: f64, variant: AffineVariant) -> Result<f64> {
        self.prepare_a(f, variant)?.eval(x)
    }

    /// Closed-form moments `K(e_j; x)` and `A(e_j; x)` for `j ≤ 2`.
    pub fn moment_analytic(&self, kind: OperatorKind, j: u32, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("x must lie in [0, 1], got {x}")));
        }
        let UnivariateParams { n, alpha, beta, .. } = self.params;
        let nf = n as f64;
        let discrete_e2 = discrete_second_moment(n, alpha, x);
        match (kind, j) {
            (_, 0) => Ok(1.0),
            (OperatorKind::K, 1) => Ok(nf * x / (nf + 1.0) + 1.0 / ((nf + 1.0) * (beta + 1.0))),
            (OperatorKind::K, 2) => {
                let s = (nf + 1.0) * (nf + 1.0);
                Ok(nf * nf / s * discrete_e2
                    + 2.0 * nf * x / ((beta + 1.0) * s)
                    + 2.0 / (s * (2.0 + beta) * (1.0 + beta)))
            }
            (OperatorKind::A, 1) => Ok(x),
            (OperatorKind::A, 2) => {
                let correction = discrete_apply_with(
                    &self.basis,
                    |t| {
                        let d = nf * t * (beta + 1.0) + 1.0;
                        t * t / (d * d)
                    },
                    x,
                )?;
                Ok(discrete_e2 + beta / (2.0 + beta) * correction)
            }
            _ => Err(Error::invalid(format!(
                "closed-form moments exist for j ≤ 2, got j = {j}"
            ))),
        }
    }
}

pub fn k_eval(p: &UnivariateParams, f: &ScalarField, x: f64) -> Result<f64> {
    UnivariateOperator::new(p)?.k_eval(f, x)
}

pub fn a_eval(p: &UnivariateParams, f: &ScalarField, x: f64) -> Result<f64> {
    UnivariateOperator::new(p)?.a_eval(f, x)
}

pub fn moment_analytic(p: &UnivariateParams, kind: OperatorKind, j: u32, x: f64) -> Result<f64> {
    UnivariateOperator::new(p)?.moment_analytic(kind, j, x)
}
