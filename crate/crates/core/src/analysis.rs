//! Error surfaces, convergence ladders and the asymptotic (Voronovskaya-type)
//! limits of the bivariate operator.

use std::fmt::Write as _;

use crate::bivariate::{BivariateOperator, BivariateParams};
use crate::error::{Error, Result};
use crate::field::{Partials, ScalarField};

pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const DEFAULT_SURFACE_GRID: usize = 51;

/// `g` equally spaced points from 0 to 1 inclusive.
pub fn unit_grid(g: usize) -> Vec<f64> {
    let last = (g - 1) as f64;
    (0..g).map(|i| i as f64 / last).collect()
}

fn check_grid(g: usize) -> Result<()> {
    if g < 2 {
        Err(Error::invalid(format!("grid resolution must be at least 2, got {g}")))
    } else {
        Ok(())
    }
}

fn check_ladder(ladder: &[usize]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::invalid("degree ladder is empty"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "degree ladder must be strictly increasing, got {ladder:?}"
        )));
    }
    Ok(())
}

/// `|K(f; x, y) − f(x, y)|` on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurface {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major with `x` outermost: `values[i * ys.len() + j]`.
    pub values: Vec<f64>,
    pub params: BivariateParams,
}

impl ErrorSurface {
    pub fn compute(op: &BivariateOperator, f: &ScalarField, grid: usize) -> Result<Self> {
        check_grid(grid)?;
        let xs = unit_grid(grid);
        let ys = xs.clone();
        let approx = op.prepare(f)?.eval_grid(&xs, &ys)?;
        let mut values = Vec::with_capacity(approx.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let exact = f.eval(x, y);
                if !exact.is_finite() {
                    return Err(Error::non_finite_2d(x, y));
                }
                values.push((approx[i * ys.len() + j] - exact).abs());
            }
        }
        Ok(Self {
            xs,
            ys,
            values,
            params: *op.params(),
        })
    }

    pub fn max_error(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean_error(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Largest pointwise difference between two surfaces on the same grid.
    pub fn linf_distance(&self, other: &ErrorSurface) -> Result<f64> {
        if self.xs != other.xs || self.ys != other.ys {
            return Err(Error::invalid("surfaces are on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `x,y,value` rows, LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for (i, x) in self.xs.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                let _ = writeln!(out, "{x},{y},{}", self.values[i * self.ys.len() + j]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub m: usize,
    pub max_error: f64,
    pub grid: usize,
}

/// Maximum error over the grid for each `n = m` on the ladder.
pub fn convergence_study(
    f: &ScalarField,
    base: &BivariateParams,
    ladder: &[usize],
    grid: usize,
) -> Result<Vec<ConvergenceRow>> {
    check_ladder(ladder)?;
    check_grid(grid)?;
    ladder
        .iter()
        .map(|&n| {
            let op = BivariateOperator::new(&base.with_degree(n)?)?;
            let surface = ErrorSurface::compute(&op, f, grid)?;
            Ok(ConvergenceRow {
                n,
                m: n,
                max_error: surface.max_error(),
                grid,
            })
        })
        .collect()
}

/// `n,m,max_error` rows, LF-terminated.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,m,max_error\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.n, r.m, r.max_error);
    }
    out
}

/// Offsets (in steps) and weights for a first or second derivative at `v`,
/// one-sided within one step of the ends of `[0, 1]`.
fn stencil(v: f64, h: f64, order: u8) -> &'static [(f64, f64)] {
    const D1_CENTRAL: [(f64, f64); 2] = [(-1.0, -0.5), (1.0, 0.5)];
    const D1_FORWARD: [(f64, f64); 3] = [(0.0, -1.5), (1.0, 2.0), (2.0, -0.5)];
    const D1_BACKWARD: [(f64, f64); 3] = [(0.0, 1.5), (-1.0, -2.0), (-2.0, 0.5)];
    const D2_CENTRAL: [(f64, f64); 3] = [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
    const D2_FORWARD: [(f64, f64); 4] = [(0.0, 2.0), (1.0, -5.0), (2.0, 4.0), (3.0, -1.0)];
    const D2_BACKWARD: [(f64, f64); 4] = [(0.0, 2.0), (-1.0, -5.0), (-2.0, 4.0), (-3.0, -1.0)];
    let side = if v - h < 0.0 {
        1
    } else if v + h > 1.0 {
        -1
    } else {
        0
    };
    match (order, side) {
        (1, 0) => &D1_CENTRAL,
        (1, 1) => &D1_FORWARD,
        (1, _) => &D1_BACKWARD,
        (_, 0) => &D2_CENTRAL,
        (_, 1) => &D2_FORWARD,
        _ => &D2_BACKWARD,
    }
}

/// Finite-difference first and second partials of `f` at `(x, y)`,
/// second-order accurate in `h`.
pub fn partial_derivatives(f: &ScalarField, x: f64, y: f64, h: f64) -> Partials {
    let along = |sx: &[(f64, f64)], sy: &[(f64, f64)]| -> f64 {
        let mut acc = 0.0;
        for &(ox, wx) in sx {
            for &(oy, wy) in sy {
                acc += wx * wy * f.eval(x + ox * h, y + oy * h);
            }
        }
        acc
    };
    const ID: [(f64, f64); 1] = [(0.0, 1.0)];
    let (dx1, dx2) = (stencil(x, h, 1), stencil(x, h, 2));
    let (dy1, dy2) = (stencil(y, h, 1), stencil(y, h, 2));
    Partials {
        fx: along(dx1, &ID) / h,
        fy: along(&ID, dy1) / h,
        fxx: along(dx2, &ID) / (h * h),
        fyy: along(&ID, dy2) / (h * h),
        fxy: along(dx1, dy1) / (h * h),
    }
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h < 0.25 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "finite-difference step must lie in (0, 0.25), got {h}"
        )))
    }
}

/// `(1/(β₁+1) − x) f_x + (1/(β₂+1) − y) f_y + ½[x(1−x) f_xx + y(1−y) f_yy]`.
pub fn voronovskaya_limit(
    f: &ScalarField,
    x: f64,
    y: f64,
    beta1: f64,
    beta2: f64,
    fd_step: f64,
) -> Result<f64> {
    check_step(fd_step)?;
    let d = partial_derivatives(f, x, y, fd_step);
    Ok((1.0 / (beta1 + 1.0) - x) * d.fx
        + (1.0 / (beta2 + 1.0) - y) * d.fy
        + 0.5 * (x * (1.0 - x) * d.fxx + y * (1.0 - y) * d.fyy))
}

/// `n (K_{n,n}(f; x, y) − f(x, y))` along the ladder.
pub fn voronovskaya_sequence(
    f: &ScalarField,
    x: f64,
    y: f64,
    template: &BivariateParams,
    ladder: &[usize],
) -> Result<Vec<(usize, f64)>> {
    check_ladder(ladder)?;
    let exact = f.eval(x, y);
    ladder
        .iter()
        .map(|&n| {
            let op = BivariateOperator::new(&template.with_degree(n)?)?;
            Ok((n, n as f64 * (op.bi_eval(f, x, y)? - exact)))
        })
        .collect()
}

/// `x(1−x) f_x g_x + y(1−y) f_y g_y`.
pub fn covariance_limit(
    f: &ScalarField,
    g: &ScalarField,
    x: f64,
    y: f64,
    fd_step: f64,
) -> Result<f64> {
    check_step(fd_step)?;
    let df = partial_derivatives(f, x, y, fd_step);
    let dg = partial_derivatives(g, x, y, fd_step);
    Ok(x * (1.0 - x) * df.fx * dg.fx + y * (1.0 - y) * df.fy * dg.fy)
}

/// `n [K(fg) − K(f) K(g)]` at `(x, y)` along the ladder.
pub fn covariance_sequence(
    f: &ScalarField,
    g: &ScalarField,
    x: f64,
    y: f64,
    template: &BivariateParams,
    ladder: &[usize],
) -> Result<Vec<(usize, f64)>> {
    check_ladder(ladder)?;
    let fg = f.product(g);
    ladder
        .iter()
        .map(|&n| {
            let op = BivariateOperator::new(&template.with_degree(n)?)?;
            let k_fg = op.bi_eval(&fg, x, y)?;
            let k_f = op.bi_eval(f, x, y)?;
            let k_g = op.bi_eval(g, x, y)?;
            Ok((n, n as f64 * (k_fg - k_f * k_g)))
        })
        .collect()
}
