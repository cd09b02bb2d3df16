//! Tensor-product fractional Kantorovich operator on `[0,1]²`.
//!
//! The double integral for each `(k, j)` depends only on the function, so it
//! is tabulated once ([`BivariateOperator::prepare`]) and every evaluation
//! point then costs `O(nm)` instead of `O(nm q²)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::special_functions::{check_beta, fractional_moment_unchecked, DEFAULT_QUAD_NODES};
use crate::univariate::{OperatorKind, UnivariateOperator, UnivariateParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateParams {
    pub n: usize,
    pub m: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub quad_nodes: usize,
}

impl BivariateParams {
    pub fn new(n: usize, m: usize, alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let p = Self {
            n,
            m,
            alpha1,
            alpha2,
            beta1,
            beta2,
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

    /// Same shape parameters with `n = m = degree`.
    pub fn with_degree(self, degree: usize) -> Result<Self> {
        let p = Self {
            n: degree,
            m: degree,
            ..self
        };
        p.validate()?;
        Ok(p)
    }

    pub fn x_params(&self) -> UnivariateParams {
        UnivariateParams {
            n: self.n,
            alpha: self.alpha1,
            beta: self.beta1,
            quad_nodes: self.quad_nodes,
        }
    }

    pub fn y_params(&self) -> UnivariateParams {
        UnivariateParams {
            n: self.m,
            alpha: self.alpha2,
            beta: self.beta2,
            quad_nodes: self.quad_nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta1)?;
        check_beta(self.beta2)?;
        self.x_params().validate()?;
        self.y_params().validate()
    }
}

/// The five test monomials `t^i s^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monomial {
    E00,
    E10,
    E01,
    E20,
    E02,
}

impl Monomial {
    pub const ALL: [Monomial; 5] = [
        Monomial::E00,
        Monomial::E10,
        Monomial::E01,
        Monomial::E20,
        Monomial::E02,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Monomial::E00 => "e00",
            Monomial::E10 => "e10",
            Monomial::E01 => "e01",
            Monomial::E20 => "e20",
            Monomial::E02 => "e02",
        }
    }

    pub fn exponents(self) -> (i32, i32) {
        match self {
            Monomial::E00 => (0, 0),
            Monomial::E10 => (1, 0),
            Monomial::E01 => (0, 1),
            Monomial::E20 => (2, 0),
            Monomial::E02 => (0, 2),
        }
    }

    pub fn field(self) -> ScalarField {
        let (i, j) = self.exponents();
        ScalarField::bivariate(self.name(), move |x, y| x.powi(i) * y.powi(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Second-order central moments and the derived quantities used by the error
/// estimates.
///
/// `theta` squares the raw first moments `e₁₀` and `e₀₁` rather than the
/// biases `e₁₀ − x` and `e₀₁ − y`; the bias-squared version is available from
/// [`BivariateOperator::theta_centered`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMomentBundle {
    pub delta2_x: f64,
    pub delta2_y: f64,
    pub theta: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct BivariateOperator {
    params: BivariateParams,
    x_op: UnivariateOperator,
    y_op: UnivariateOperator,
}

/// Tabulated inner integrals `I[k][j]` of one function.
#[derive(Debug, Clone)]
pub struct PreparedBivariate<'a> {
    op: &'a BivariateOperator,
    table: Vec<f64>,
}

fn check_point(x: f64, y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "(x, y) must lie in [0, 1]², got ({x}, {y})"
        )))
    }
}

impl PreparedBivariate<'_> {
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `Σ_k b_k(x) I[k][·]`, the table contracted along the first axis.
    fn contract_x(&self, row_x: &[f64]) -> Vec<f64> {
        let width = self.op.params.m + 1;
        let mut acc = vec![0.0; width];
        for (b, cells) in row_x.iter().zip(self.table.chunks_exact(width)) {
            if *b == 0.0 {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(cells) {
                *a += b * c;
            }
        }
        acc
    }

    fn row(&self, axis: Axis, v: f64) -> Vec<f64> {
        let (basis, len) = match axis {
            Axis::X => (self.op.x_op.basis(), self.op.params.n + 1),
            Axis::Y => (self.op.y_op.basis(), self.op.params.m + 1),
        };
        let mut row = vec![0.0; len];
        basis.fill_row(v, &mut row);
        row
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_point(x, y)?;
        let partial = self.contract_x(&self.row(Axis::X, x));
        Ok(dot(&self.row(Axis::Y, y), &partial))
    }

    /// Values on the tensor grid `xs × ys`, row-major with `x` outermost.
    ///
    /// Each value is bit-identical to [`PreparedBivariate::eval`] at that point.
    pub fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        for &x in xs {
            check_point(x, 0.0)?;
        }
        for &y in ys {
            check_point(0.0, y)?;
        }
        let rows_y: Vec<Vec<f64>> = ys.iter().map(|&y| self.row(Axis::Y, y)).collect();
        let blocks: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                let partial = self.contract_x(&self.row(Axis::X, x));
                rows_y.iter().map(|ry| dot(ry, &partial)).collect()
            })
            .collect();
        Ok(blocks.concat())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

impl BivariateOperator {
    pub fn new(params: &BivariateParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: *params,
            x_op: UnivariateOperator::new(&params.x_params())?,
            y_op: UnivariateOperator::new(&params.y_params())?,
        })
    }

    pub fn params(&self) -> &BivariateParams {
        &self.params
    }

    pub fn x_operator(&self) -> &UnivariateOperator {
        &self.x_op
    }

    pub fn y_operator(&self) -> &UnivariateOperator {
        &self.y_op
    }

    /// Tabulates `β₁β₂ ΣᵤΣᵥ wᵤwᵥ f((k+tᵤ)/(n+1), (j+sᵥ)/(m+1))` for all `(k, j)`.
    pub fn prepare(&self, f: &ScalarField) -> Result<PreparedBivariate<'_>> {
        let BivariateParams {
            n, m, beta1, beta2, ..
        } = self.params;
        let (hx, hy) = (1.0 / (n as f64 + 1.0), 1.0 / (m as f64 + 1.0));
        let (rx, ry) = (self.x_op.rule(), self.y_op.rule());
        let rows = (0..=n)
            .into_par_iter()
            .map(|k| {
                let mut row = Vec::with_capacity(m + 1);
                for j in 0..=m {
                    let mut outer = 0.0;
                    for (t, wt) in rx.iter() {
                        let u = (k as f64 + t) * hx;
                        let mut inner = 0.0;
                        for (s, ws) in ry.iter() {
                            let v = (j as f64 + s) * hy;
                            let val = f.eval(u, v);
                            if !val.is_finite() {
                                return Err(Error::non_finite_2d(u, v));
                            }
                            inner += ws * val;
                        }
                        outer += wt * inner;
                    }
                    row.push(beta1 * beta2 * outer);
                }
                Ok(row)
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(PreparedBivariate {
            op: self,
            table: rows.concat(),
        })
    }

    pub fn bi_eval(&self, f: &ScalarField, x: f64, y: f64) -> Result<f64> {
        self.prepare(f)?.eval(x, y)
    }

    /// Closed-form images of the test monomials.
    pub fn moment_analytic(&self, which: Monomial, x: f64, y: f64) -> Result<f64> {
        check_point(x, y)?;
        match which {
            Monomial::E00 => Ok(1.0),
            Monomial::E10 => self.x_op.moment_analytic(OperatorKind::K, 1, x),
            Monomial::E20 => self.x_op.moment_analytic(OperatorKind::K, 2, x),
            Monomial::E01 => self.y_op.moment_analytic(OperatorKind::K, 1, y),
            Monomial::E02 => self.y_op.moment_analytic(OperatorKind::K, 2, y),
        }
    }

    fn first_second(&self, axis: Axis, v: f64) -> Result<(f64, f64)> {
        let op = match axis {
            Axis::X => &self.x_op,
            Axis::Y => &self.y_op,
        };
        Ok((
            op.moment_analytic(OperatorKind::K, 1, v)?,
            op.moment_analytic(OperatorKind::K, 2, v)?,
        ))
    }

    pub fn central_moments(&self, x: f64, y: f64) -> Result<CentralMomentBundle> {
        check_point(x, y)?;
        let (e10, e20) = self.first_second(Axis::X, x)?;
        let (e01, e02) = self.first_second(Axis::Y, y)?;
        let delta2_x = e20 - 2.0 * x * e10 + x * x;
        let delta2_y = e02 - 2.0 * y * e01 + y * y;
        Ok(CentralMomentBundle {
            delta2_x,
            delta2_y,
            theta: delta2_x + e10 * e10 + delta2_y + e01 * e01,
            mu: ((e10 - x).powi(2) + (e01 - y).powi(2)).sqrt(),
        })
    }

    /// `δ²ₓ + (e₁₀−x)² + δ²ᵧ + (e₀₁−y)²`, the bias-squared counterpart of `theta`.
    pub fn theta_centered(&self, x: f64, y: f64) -> Result<f64> {
        let c = self.central_moments(x, y)?;
        Ok(c.delta2_x + c.delta2_y + c.mu * c.mu)
    }

    /// `K((t−x)(s−y); x, y) = (e₁₀ − x)(e₀₁ − y)`.
    pub fn mixed_central_moment(&self, x: f64, y: f64) -> Result<f64> {
        check_point(x, y)?;
        let e10 = self.x_op.moment_analytic(OperatorKind::K, 1, x)?;
        let e01 = self.y_op.moment_analytic(OperatorKind::K, 1, y)?;
        Ok((e10 - x) * (e01 - y))
    }

    /// `K((t−x)⁴; x, y)` or `K((s−y)⁴; x, y)` by exact binomial expansion of
    /// `(c + h t)⁴` with `c = k/(n+1) − x`, `h = 1/(n+1)`.
    pub fn fourth_central_moment(&self, axis: Axis, x: f64, y: f64) -> Result<f64> {
        check_point(x, y)?;
        let (op, v) = match axis {
            Axis::X => (&self.x_op, x),
            Axis::Y => (&self.y_op, y),
        };
        let p = op.params();
        let h = 1.0 / (p.n as f64 + 1.0);
        let moments: Vec<f64> = (0..=4)
            .map(|i| fractional_moment_unchecked(i, p.beta) * h.powi(i as i32))
            .collect();
        const BINOM4: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
        let mut row = vec![0.0; p.n + 1];
        op.basis().fill_row(v, &mut row);
        Ok(row
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let c = k as f64 * h - v;
                let expansion: f64 = (0..=4)
                    .map(|i| BINOM4[i] * c.powi(4 - i as i32) * moments[i])
                    .sum();
                b * expansion
            })
            .sum())
    }
}

pub fn bi_eval(p: &BivariateParams, f: &ScalarField, x: f64, y: f64) -> Result<f64> {
    BivariateOperator::new(p)?.bi_eval(f, x, y)
}

pub fn bi_moment_analytic(p: &BivariateParams, which: Monomial, x: f64, y: f64) -> Result<f64> {
    BivariateOperator::new(p)?.moment_analytic(which, x, y)
}

pub fn central_moments(p: &BivariateParams, x: f64, y: f64) -> Result<CentralMomentBundle> {
    BivariateOperator::new(p)?.central_moments(x, y)
}

pub fn mixed_central_moment(p: &BivariateParams, x: f64, y: f64) -> Result<f64> {
    BivariateOperator::new(p)?.mixed_central_moment(x, y)
}

pub fn fourth_central_moment(p: &BivariateParams, axis: Axis, x: f64, y: f64) -> Result<f64> {
    BivariateOperator::new(p)?.fourth_central_moment(axis, x, y)
}
