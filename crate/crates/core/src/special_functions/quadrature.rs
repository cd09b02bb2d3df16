//! Gauss–Jacobi rules for `∫₀¹ (1−t)^{β−1} g(t) dt`.
//!
//! The rule is built from the three-term recurrence of the Jacobi
//! polynomials with exponents `(a, b) = (β−1, 0)`, shifted to `[0, 1]`.
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix and
//! weights are `μ₀ v₁²` with `v₁` the first component of each normalised
//! eigenvector and `μ₀ = ∫₀¹(1−t)^{β−1}dt = 1/β`.

use crate::error::{Error, Result};
use crate::special_functions::gamma::check_beta;

/// Default number of quadrature nodes used by the operators.
pub const DEFAULT_QUAD_NODES: usize = 32;

/// Largest supported rule size.
pub const MAX_QUAD_NODES: usize = 512;

/// Iteration budget per eigenvalue in the implicit QL sweep.
const QL_MAX_ITERATIONS: usize = 50;

/// Nodes and weights of a Gauss–Jacobi rule for the weight `(1−t)^{β−1}`
/// on `[0, 1]`.
///
/// Immutable once built; nodes are strictly increasing in `(0, 1)` and the
/// weights sum to `1/β`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    beta: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σᵢ wᵢ g(tᵢ)`, the bare weighted sum approximating `∫₀¹(1−t)^{β−1}g(t)dt`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.iter().map(|(t, w)| w * g(t)).sum()
    }

    /// The normalised fractional average `Γ(β+1)/Γ(β) ∫₀¹(1−t)^{β−1}g(t)dt`,
    /// i.e. `β Σᵢ wᵢ g(tᵢ)`.
    pub fn fractional_integral<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let mut sum = 0.0;
        for (t, w) in self.iter() {
            let v = g(t);
            if !v.is_finite() {
                return Err(Error::non_finite_1d(t));
            }
            sum += w * v;
        }
        Ok(self.beta * sum)
    }
}

/// Builds the `q`-node Gauss–Jacobi rule for the weight `(1−t)^{β−1}` on `[0, 1]`.
pub fn gauss_jacobi_rule(beta: f64, q: usize) -> Result<QuadratureRule> {
    check_beta(beta)?;
    if q == 0 || q > MAX_QUAD_NODES {
        return Err(Error::invalid(format!(
            "quadrature node count must lie in 1..={MAX_QUAD_NODES}, got {q}"
        )));
    }

    let (mut diag, mut offdiag) = shifted_jacobi_matrix(beta - 1.0, 0.0, q);
    let mut first = vec![0.0; q];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut offdiag, &mut first)?;

    let norm: f64 = first.iter().map(|v| v * v).sum();
    let weights: Vec<f64> = first.iter().map(|v| v * v / (norm * beta)).collect();

    let rule = QuadratureRule {
        beta,
        nodes: diag,
        weights,
    };
    validate(&rule)?;
    Ok(rule)
}

/// `β Σᵢ wᵢ g(tᵢ)` for a rule built with the same `β`.
pub fn fractional_integral<G: Fn(f64) -> f64>(
    g: G,
    beta: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if beta != rule.beta {
        return Err(Error::invalid(format!(
            "rule was built for beta = {}, requested {beta}",
            rule.beta
        )));
    }
    rule.fractional_integral(g)
}

/// Diagonal and off-diagonal of the Jacobi matrix for the weight
/// `(1−x)^a (1+x)^b` on `[−1, 1]`, mapped onto `[0, 1]` by `t = (1+x)/2`.
///
/// The returned off-diagonal has length `q`; its last entry is zero.
fn shifted_jacobi_matrix(a: f64, b: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let mut diag = Vec::with_capacity(q);
    let mut offdiag = vec![0.0; q];
    for k in 0..q {
        let kf = k as f64;
        let alpha = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push(0.5 * (1.0 + alpha));
    }
    for k in 1..q {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let beta_k =
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0));
        offdiag[k - 1] = 0.5 * beta_k.sqrt();
    }
    (diag, offdiag)
}

/// Implicit-shift QL iteration for a symmetric tridiagonal matrix.
///
/// On return `diag` holds the eigenvalues in ascending order and `z` holds
/// the first row of the eigenvector matrix (for `z = e₁` on entry).
/// `offdiag[i]` couples rows `i` and `i+1`; its last entry is ignored.
fn tridiagonal_ql(diag: &mut [f64], offdiag: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    offdiag[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if offdiag[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iterations == QL_MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations: QL_MAX_ITERATIONS,
                });
            }
            iterations += 1;

            let mut g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + offdiag[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;

            for i in (l..m).rev() {
                let f = s * offdiag[i];
                let b = c * offdiag[i];
                r = f.hypot(g);
                offdiag[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    offdiag[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            offdiag[l] = g;
            offdiag[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let sorted_d: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let sorted_z: Vec<f64> = order.iter().map(|&i| z[i]).collect();
    diag.copy_from_slice(&sorted_d);
    z.copy_from_slice(&sorted_z);
    Ok(())
}

fn validate(rule: &QuadratureRule) -> Result<()> {
    let inside = rule.nodes.iter().all(|&t| t > 0.0 && t < 1.0);
    let increasing = rule.nodes.windows(2).all(|w| w[0] < w[1]);
    let positive = rule.weights.iter().all(|&w| w > 0.0);
    if inside && increasing && positive {
        Ok(())
    } else {
        // only reachable if the eigen-solve lost all accuracy
        Err(Error::NoConvergence {
            iterations: QL_MAX_ITERATIONS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::{beta_fn, fractional_moment};
    use approx::assert_abs_diff_eq;

    /// Gauss–Legendre on `[0, 1]` by Newton iteration on `P_q`, independent
    /// of the eigenvalue route.
    fn legendre_newton(q: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(q);
        let mut weights = Vec::with_capacity(q);
        for i in 0..q {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=q {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(0.5 * (1.0 + x));
            weights.push(1.0 / ((1.0 - x * x) * dp * dp));
        }
        (nodes, weights)
    }

    #[test]
    fn two_node_legendre() {
        let rule = gauss_jacobi_rule(1.0, 2).unwrap();
        let s3 = 3f64.sqrt();
        assert_abs_diff_eq!(rule.nodes()[0], (3.0 - s3) / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.nodes()[1], (3.0 + s3) / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.weights()[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn single_node_is_the_mean() {
        for beta in [0.2, 0.5, 1.0] {
            let rule = gauss_jacobi_rule(beta, 1).unwrap();
            assert_abs_diff_eq!(rule.nodes()[0], 1.0 / (beta + 1.0), epsilon = 1e-15);
            assert_abs_diff_eq!(rule.weights()[0], 1.0 / beta, epsilon = 1e-14);
        }
    }

    #[test]
    fn beta_one_coincides_with_newton_legendre() {
        for q in [3, 8, 17, 32, 64] {
            let rule = gauss_jacobi_rule(1.0, q).unwrap();
            let (nodes, weights) = legendre_newton(q);
            for i in 0..q {
                assert_abs_diff_eq!(rule.nodes()[i], nodes[i], epsilon = 1e-12);
                assert_abs_diff_eq!(rule.weights()[i], weights[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn weight_sum_and_high_degree_exactness() {
        let rule = gauss_jacobi_rule(0.5, 8).unwrap();
        assert_abs_diff_eq!(rule.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-12);
        let got = rule.integrate(|t| t.powi(15));
        assert_abs_diff_eq!(got, beta_fn(16.0, 0.5).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn fractional_integral_examples() {
        let rule = gauss_jacobi_rule(0.7, 16).unwrap();
        assert_abs_diff_eq!(rule.fractional_integral(|_| 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            fractional_integral(|t| t, 0.7, &rule).unwrap(),
            1.0 / 1.7,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            rule.fractional_integral(|t| t).unwrap(),
            fractional_moment(1, 0.7).unwrap(),
            epsilon = 1e-14
        );

        let r32 = gauss_jacobi_rule(0.5, 32).unwrap();
        let r64 = gauss_jacobi_rule(0.5, 64).unwrap();
        let a = r32.fractional_integral(f64::exp).unwrap();
        let b = r64.fractional_integral(f64::exp).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn fractional_integral_errors() {
        let rule = gauss_jacobi_rule(0.7, 4).unwrap();
        assert!(fractional_integral(|t| t, 0.5, &rule).is_err());
        assert!(matches!(
            rule.fractional_integral(|t| 1.0 / (t - t)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_jacobi_rule(0.0, 4).is_err());
        assert!(gauss_jacobi_rule(1.2, 4).is_err());
        assert!(gauss_jacobi_rule(0.5, 0).is_err());
        assert!(gauss_jacobi_rule(0.5, MAX_QUAD_NODES + 1).is_err());
    }

    #[test]
    fn largest_rule_is_valid() {
        for beta in [0.1, 1.0] {
            let rule = gauss_jacobi_rule(beta, MAX_QUAD_NODES).unwrap();
            assert_eq!(rule.len(), MAX_QUAD_NODES);
            assert_abs_diff_eq!(
                rule.weights().iter().sum::<f64>(),
                1.0 / beta,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn ql_reports_exhausted_budget() {
        // NaN entries never deflate
        let mut d = vec![f64::NAN, 1.0, 2.0];
        let mut e = vec![1.0, 1.0, 0.0];
        let mut z = vec![1.0, 0.0, 0.0];
        assert!(matches!(
            tridiagonal_ql(&mut d, &mut e, &mut z),
            Err(Error::NoConvergence { .. })
        ));
    }
}
