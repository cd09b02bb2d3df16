//! Bernstein and α-Bernstein basis polynomials.
//!
//! For `n ≥ 2` the α-Bernstein basis is evaluated in the form
//!
//! ```text
//! b_{n,k}(x) = (1−α)[(1−x) p_{n−2,k}(x) + x p_{n−2,k−2}(x)] + α p_{n,k}(x)
//! ```
//!
//! where `p_{n,k}` is the ordinary Bernstein polynomial (zero when `k` is out
//! of range). This is the usual expression with the common factor
//! `x^{k−1}(1−x)^{n−k−1}` absorbed, so no negative power is ever formed.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::special_functions::ln_gamma_unchecked;

/// Largest `n` whose binomial row is stored exactly.
const EXACT_BINOMIAL_MAX: usize = 20;

/// Binomial coefficients of one row, either exact or as logarithms.
#[derive(Debug, Clone)]
struct BinomialRow {
    n: usize,
    log_space: bool,
    coeffs: Vec<f64>,
}

impl BinomialRow {
    fn new(n: usize) -> Self {
        if n <= EXACT_BINOMIAL_MAX {
            let mut coeffs = Vec::with_capacity(n + 1);
            let mut c: u64 = 1;
            for k in 0..=n {
                coeffs.push(c as f64);
                c = c * (n - k) as u64 / (k + 1) as u64;
            }
            Self {
                n,
                log_space: false,
                coeffs,
            }
        } else {
            let ln_n = ln_gamma_unchecked(n as f64 + 1.0);
            let coeffs = (0..=n)
                .map(|k| {
                    ln_n - ln_gamma_unchecked(k as f64 + 1.0)
                        - ln_gamma_unchecked((n - k) as f64 + 1.0)
                })
                .collect();
            Self {
                n,
                log_space: true,
                coeffs,
            }
        }
    }

    /// `p_{n,k}(x)`, exact at `x ∈ {0, 1}`.
    fn basis(&self, k: usize, x: f64) -> f64 {
        let n = self.n;
        if x <= 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if x >= 1.0 {
            return if k == n { 1.0 } else { 0.0 };
        }
        if self.log_space {
            (self.coeffs[k] + k as f64 * x.ln() + (n - k) as f64 * (-x).ln_1p()).exp()
        } else {
            self.coeffs[k] * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32)
        }
    }

    fn fill(&self, x: f64, out: &mut [f64]) {
        for (k, slot) in out.iter_mut().enumerate().take(self.n + 1) {
            *slot = self.basis(k, x);
        }
    }
}

/// Degree and shape parameter of an α-Bernstein basis, with cached binomials.
#[derive(Debug, Clone)]
pub struct BasisContext {
    n: usize,
    alpha: f64,
    full: BinomialRow,
    reduced: Option<BinomialRow>,
}

impl BasisContext {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("basis degree n must be at least 1"));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Self {
            n,
            alpha,
            full: BinomialRow::new(n),
            reduced: (n >= 2).then(|| BinomialRow::new(n - 2)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.n {
            Err(Error::invalid(format!("basis index k = {k} exceeds n = {}", self.n)))
        } else {
            Ok(())
        }
    }

    fn value(&self, k: usize, x: f64) -> f64 {
        let n = self.n;
        if x <= 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if x >= 1.0 {
            return if k == n { 1.0 } else { 0.0 };
        }
        let Some(reduced) = &self.reduced else {
            return if k == 0 { 1.0 - x } else { x };
        };
        let low = if k + 2 <= n { reduced.basis(k, x) } else { 0.0 };
        let high = if k >= 2 { reduced.basis(k - 2, x) } else { 0.0 };
        (1.0 - self.alpha) * ((1.0 - x) * low + x * high) + self.alpha * self.full.basis(k, x)
    }

    /// Writes `b_{n,0}(x), …, b_{n,n}(x)` into `out[..=n]`.
    pub fn fill_row(&self, x: f64, out: &mut [f64]) {
        let n = self.n;
        let out = &mut out[..=n];
        if x <= 0.0 || x >= 1.0 {
            out.fill(0.0);
            out[if x <= 0.0 { 0 } else { n }] = 1.0;
            return;
        }
        let Some(reduced) = &self.reduced else {
            out[0] = 1.0 - x;
            out[1] = x;
            return;
        };
        let mut low = vec![0.0; n - 1];
        reduced.fill(x, &mut low);
        self.full.fill(x, out);
        let a = self.alpha;
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = if k + 2 <= n { low[k] } else { 0.0 };
            let hi = if k >= 2 { low[k - 2] } else { 0.0 };
            *slot = (1.0 - a) * ((1.0 - x) * lo + x * hi) + a * *slot;
        }
    }
}

/// Closed form of `T_{n,α}(e₂; x)`. For `n = 1` the basis does not depend on
/// `α`, so the `α`-term is dropped there.
pub fn discrete_second_moment(n: usize, alpha: f64, x: f64) -> f64 {
    let alpha = if n == 1 { 1.0 } else { alpha };
    let nf = n as f64;
    x * x + (nf + 2.0 * (1.0 - alpha)) / (nf * nf) * x * (1.0 - x)
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid(format!("x must lie in [0, 1], got {x}")))
    }
}

/// Ordinary Bernstein polynomial `C(n,k) x^k (1−x)^{n−k}`.
pub fn bernstein_basis(n: usize, k: usize, x: f64) -> Result<f64> {
    if k > n {
        return Err(Error::invalid(format!("basis index k = {k} exceeds n = {n}")));
    }
    check_unit(x)?;
    Ok(BinomialRow::new(n).basis(k, x))
}

/// α-Bernstein basis polynomial `b_{n,k}^α(x)`.
pub fn alpha_basis(ctx: &BasisContext, k: usize, x: f64) -> Result<f64> {
    ctx.check_k(k)?;
    check_unit(x)?;
    Ok(ctx.value(k, x))
}

/// The full row `(b_{n,0}^α(x), …, b_{n,n}^α(x))`.
pub fn alpha_basis_row(ctx: &BasisContext, x: f64) -> Result<Vec<f64>> {
    check_unit(x)?;
    let mut row = vec![0.0; ctx.n + 1];
    ctx.fill_row(x, &mut row);
    Ok(row)
}

/// The discrete operator `Σ_k b_{n,k}^α(x) f(k/n)`.
pub fn discrete_apply(ctx: &BasisContext, f: &ScalarField, x: f64) -> Result<f64> {
    discrete_apply_with(ctx, |t| f.eval1(t), x)
}

pub(crate) fn discrete_apply_with(
    ctx: &BasisContext,
    f: impl Fn(f64) -> f64,
    x: f64,
) -> Result<f64> {
    let row = alpha_basis_row(ctx, x)?;
    let n = ctx.n as f64;
    let mut sum = 0.0;
    for (k, b) in row.iter().enumerate() {
        let node = k as f64 / n;
        let v = f(node);
        if !v.is_finite() {
            return Err(Error::non_finite_1d(node));
        }
        sum += b * v;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ctx(n: usize, alpha: f64) -> BasisContext {
        BasisContext::new(n, alpha).unwrap()
    }

    // Direct expansion of the unsimplified form with the common factor.
    fn raw_alpha_basis(n: usize, k: usize, alpha: f64, x: f64) -> f64 {
        let c = |n: i64, k: i64| -> f64 {
            if k < 0 || k > n {
                0.0
            } else {
                (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
            }
        };
        let (n, k) = (n as i64, k as i64);
        (c(n - 2, k) * (1.0 - alpha) * x
            + c(n - 2, k - 2) * (1.0 - alpha) * (1.0 - x)
            + c(n, k) * alpha * x * (1.0 - x))
            * x.powi(k as i32 - 1)
            * (1.0 - x).powi((n - k - 1) as i32)
    }

    #[test]
    fn bernstein_examples() {
        assert_eq!(bernstein_basis(3, 0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(bernstein_basis(4, 2, 0.5).unwrap(), 0.375, max_relative = 1e-15);
        assert!(bernstein_basis(3, 4, 0.5).is_err());
        assert!(bernstein_basis(3, 1, 1.5).is_err());
    }

    #[test]
    fn bernstein_high_degree_against_exact_binomial() {
        // C(60, 30) is exactly representable as an integer.
        let c60_30: u64 = 118_264_581_564_861_424;
        let want = c60_30 as f64 / 2f64.powi(60);
        let got = bernstein_basis(60, 30, 0.5).unwrap();
        assert!(got > 0.0);
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn log_space_rows_match_exact_recurrence() {
        let n = 45;
        let row = BinomialRow::new(n);
        let x: f64 = 0.37;
        // p_{n,k} by the stable de Casteljau-like recurrence on degree.
        let mut p = vec![1.0];
        for _ in 0..n {
            let mut next = vec![0.0; p.len() + 1];
            for (k, v) in p.iter().enumerate() {
                next[k] += v * (1.0 - x);
                next[k + 1] += v * x;
            }
            p = next;
        }
        for (k, want) in p.iter().enumerate() {
            assert_relative_eq!(row.basis(k, x), *want, max_relative = 1e-12);
        }
    }

    #[test]
    fn alpha_basis_examples() {
        assert_relative_eq!(alpha_basis(&ctx(1, 0.3), 0, 0.3).unwrap(), 0.7, max_relative = 1e-15);
        assert_relative_eq!(
            alpha_basis(&ctx(5, 1.0), 2, 0.4).unwrap(),
            bernstein_basis(5, 2, 0.4).unwrap(),
            max_relative = 1e-14
        );
        assert_eq!(alpha_basis(&ctx(6, 0.3), 0, 0.0).unwrap(), 1.0);
        // limit of the raw form at x → 0⁺ for k = 0 is 1 as well
        assert_relative_eq!(raw_alpha_basis(6, 0, 0.3, 1e-12), 1.0, max_relative = 1e-9);
        assert!(alpha_basis(&ctx(5, 0.5), 6, 0.3).is_err());
    }

    #[test]
    fn simplified_form_matches_raw_expansion() {
        for n in [2, 3, 7, 12, 25] {
            for &alpha in &[0.0, 0.35, 1.0] {
                let c = ctx(n, alpha);
                for &x in &[0.1, 0.5, 0.83] {
                    for k in 0..=n {
                        let got = alpha_basis(&c, k, x).unwrap();
                        let want = raw_alpha_basis(n, k, alpha, x);
                        assert!(
                            (got - want).abs() <= 1e-13 * (1.0 + want.abs()),
                            "n={n} k={k} alpha={alpha} x={x}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn degree_two_alpha_zero_by_hand() {
        // α = 0, n = 2: b_{2,0} = 1−x, b_{2,1} = 0, b_{2,2} = x
        let row = alpha_basis_row(&ctx(2, 0.0), 0.5).unwrap();
        assert_eq!(row, vec![0.5, 0.0, 0.5]);
        let row = alpha_basis_row(&ctx(2, 0.0), 0.2).unwrap();
        for (k, b) in row.iter().enumerate() {
            assert_relative_eq!(*b, raw_alpha_basis(2, k, 0.0, 0.2), max_relative = 1e-15);
        }
    }

    #[test]
    fn rows_and_endpoints() {
        let row = alpha_basis_row(&ctx(3, 0.5), 0.25).unwrap();
        assert_relative_eq!(row.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
        let row = alpha_basis_row(&ctx(10, 0.7), 0.0).unwrap();
        assert_eq!(row[0], 1.0);
        assert!(row[1..].iter().all(|&v| v == 0.0));
        let row = alpha_basis_row(&ctx(10, 0.7), 1.0).unwrap();
        assert_eq!(row[10], 1.0);
        assert!(row[..10].iter().all(|&v| v == 0.0));
        assert!(alpha_basis_row(&ctx(3, 0.5), -0.1).is_err());
    }

    #[test]
    fn discrete_apply_examples() {
        let e0 = ScalarField::builtin("e0").unwrap();
        let e1 = ScalarField::builtin("e1").unwrap();
        let e2 = ScalarField::builtin("e2").unwrap();
        assert_relative_eq!(discrete_apply(&ctx(4, 0.2), &e0, 0.3).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(discrete_apply(&ctx(7, 0.4), &e1, 0.6).unwrap(), 0.6, max_relative = 1e-14);
        assert_relative_eq!(discrete_apply(&ctx(5, 0.5), &e2, 0.3).unwrap(), 0.1404, max_relative = 1e-13);
        let bad = ScalarField::parse("1/x").unwrap();
        for &(n, alpha, x) in &[(1, 0.2, 0.4), (2, 0.0, 0.7), (9, 0.6, 0.15)] {
            assert_relative_eq!(
                discrete_apply(&ctx(n, alpha), &e2, x).unwrap(),
                discrete_second_moment(n, alpha, x),
                max_relative = 1e-13
            );
        }
        assert!(matches!(
            discrete_apply(&ctx(5, 0.5), &bad, 0.3),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn context_validation() {
        assert!(BasisContext::new(0, 0.5).is_err());
        assert!(BasisContext::new(3, 1.1).is_err());
        assert!(BasisContext::new(3, -0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn partition_of_unity(n in 1usize..=64, alpha in 0.0f64..=1.0, x in 0.0f64..=1.0) {
            let row = alpha_basis_row(&ctx(n, alpha), x).unwrap();
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn nonnegative(n in 1usize..=64, alpha in 0.0f64..=1.0, x in 0.0f64..=1.0) {
            let row = alpha_basis_row(&ctx(n, alpha), x).unwrap();
            prop_assert!(row.iter().all(|&b| b >= -1e-15));
        }

        #[test]
        fn alpha_one_is_bernstein(n in 1usize..=64, x in 0.0f64..=1.0) {
            let row = alpha_basis_row(&ctx(n, 1.0), x).unwrap();
            for (k, b) in row.iter().enumerate() {
                prop_assert!((b - bernstein_basis(n, k, x).unwrap()).abs() <= 1e-13);
            }
        }

        #[test]
        fn row_matches_pointwise(n in 1usize..=40, alpha in 0.0f64..=1.0, x in 0.0f64..=1.0) {
            let c = ctx(n, alpha);
            let row = alpha_basis_row(&c, x).unwrap();
            for (k, b) in row.iter().enumerate() {
                prop_assert_eq!(*b, alpha_basis(&c, k, x).unwrap());
            }
        }

        #[test]
        fn reproduces_linear(n in 1usize..=64, alpha in 0.0f64..=1.0, x in 0.0f64..=1.0) {
            let e1 = ScalarField::builtin("e1").unwrap();
            prop_assert!((discrete_apply(&ctx(n, alpha), &e1, x).unwrap() - x).abs() <= 1e-12);
        }
    }
}
