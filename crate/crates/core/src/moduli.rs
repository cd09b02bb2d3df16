//! Grid estimates of moduli of continuity and the error bounds built on them.
//!
//! A field is sampled once on the uniform `g × g` grid over `[0,1]²` and every
//! supremum is taken over grid points only. A distance `d` becomes the integer
//! offset `⌊d (g−1)⌋`, so the estimates are lower bounds of the continuous
//! moduli and converge to them as `g` grows.

use std::collections::VecDeque;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use crate::bivariate::{Axis, BivariateOperator, BivariateParams, PreparedBivariate};
use crate::error::{Error, Result};
use crate::field::ScalarField;

pub const DEFAULT_MODULUS_GRID: usize = 201;

/// Relative slack when converting a distance into grid offsets, so that
/// `d = 0.1` on a 201-point grid gives exactly 20 steps.
const OFFSET_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    Complete,
    CompleteEuclid,
    PartialX,
    PartialY,
    SecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub value: f64,
    pub grid_step: f64,
    pub kind: ModulusKind,
}

/// Values of a field on the uniform grid, `values[i*g + j] = f(i/(g−1), j/(g−1))`.
///
/// The Euclidean and second-order moduli memoise the largest difference per
/// grid offset, so repeated queries only scan offsets not seen before.
#[derive(Debug)]
pub struct SampledField {
    g: usize,
    values: Vec<f64>,
    offsets: OnceLock<Vec<(isize, isize, usize)>>,
    first_diffs: Mutex<OffsetMaxima>,
    second_diffs: Mutex<OffsetMaxima>,
}

impl Clone for SampledField {
    fn clone(&self) -> Self {
        Self::from_values(self.g, self.values.clone())
    }
}

/// Per-offset maxima for a prefix of the length-sorted offsets, plus their
/// running maximum.
#[derive(Debug, Default)]
struct OffsetMaxima {
    running: Vec<f64>,
}

fn check_distance(d: f64) -> Result<()> {
    if d >= 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "modulus distance must be finite and non-negative, got {d}"
        )))
    }
}

/// Sliding-window maximum and minimum over `[i−r, i+r]`.
fn window_extrema(values: &[f64], r: usize) -> (Vec<f64>, Vec<f64>) {
    let len = values.len();
    let mut maxs = Vec::with_capacity(len);
    let mut mins = Vec::with_capacity(len);
    let mut dq_max: VecDeque<usize> = VecDeque::new();
    let mut dq_min: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..len {
        let hi = (i + r).min(len - 1);
        while next <= hi {
            let v = values[next];
            while dq_max.back().is_some_and(|&b| values[b] <= v) {
                dq_max.pop_back();
            }
            dq_max.push_back(next);
            while dq_min.back().is_some_and(|&b| values[b] >= v) {
                dq_min.pop_back();
            }
            dq_min.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(r);
        while dq_max.front().is_some_and(|&f| f < lo) {
            dq_max.pop_front();
        }
        while dq_min.front().is_some_and(|&f| f < lo) {
            dq_min.pop_front();
        }
        maxs.push(values[dq_max[0]]);
        mins.push(values[dq_min[0]]);
    }
    (maxs, mins)
}

/// Largest deviation of each sample from the extrema of its window.
fn spread(center: &[f64], maxs: &[f64], mins: &[f64]) -> f64 {
    center
        .iter()
        .zip(maxs.iter().zip(mins))
        .map(|(c, (hi, lo))| (hi - c).max(c - lo))
        .fold(0.0, f64::max)
}

impl SampledField {
    pub fn new(f: &ScalarField, g: usize) -> Result<Self> {
        if g < 2 {
            return Err(Error::invalid(format!("grid resolution must be at least 2, got {g}")));
        }
        let h = 1.0 / (g as f64 - 1.0);
        let values = (0..g)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 * h;
                (0..g)
                    .map(|j| {
                        let y = j as f64 * h;
                        let v = f.eval(x, y);
                        if v.is_finite() {
                            Ok(v)
                        } else {
                            Err(Error::non_finite_2d(x, y))
                        }
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?
            .concat();
        Ok(Self::from_values(g, values))
    }

    fn from_values(g: usize, values: Vec<f64>) -> Self {
        Self {
            g,
            values,
            offsets: OnceLock::new(),
            first_diffs: Mutex::default(),
            second_diffs: Mutex::default(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.g
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.g as f64 - 1.0)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.g + j]
    }

    fn offset(&self, d: f64) -> usize {
        let steps = (d * (self.g as f64 - 1.0) * (1.0 + OFFSET_EPS)).floor();
        (steps as usize).min(self.g - 1)
    }

    fn estimate(&self, value: f64, kind: ModulusKind) -> ModulusEstimate {
        ModulusEstimate {
            value,
            grid_step: self.step(),
            kind,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        (0..self.g).map(|i| self.at(i, j)).collect()
    }

    /// `sup |f(u,v) − f(x,y)|` over `|u−x| ≤ d1`, `|v−y| ≤ d2`.
    pub fn complete(&self, d1: f64, d2: f64) -> Result<ModulusEstimate> {
        check_distance(d1)?;
        check_distance(d2)?;
        let (r1, r2) = (self.offset(d1), self.offset(d2));
        let g = self.g;
        // window along y inside each row, then along x across rows
        let row_ext: Vec<(Vec<f64>, Vec<f64>)> = self
            .values
            .par_chunks_exact(g)
            .map(|row| window_extrema(row, r2))
            .collect();
        let value = (0..g)
            .into_par_iter()
            .map(|j| {
                let col_max: Vec<f64> = (0..g).map(|i| row_ext[i].0[j]).collect();
                let col_min: Vec<f64> = (0..g).map(|i| row_ext[i].1[j]).collect();
                let (maxs, _) = window_extrema(&col_max, r1);
                let (_, mins) = window_extrema(&col_min, r1);
                spread(&self.column(j), &maxs, &mins)
            })
            .reduce(|| 0.0, f64::max);
        Ok(self.estimate(value, ModulusKind::Complete))
    }

    /// `sup |f(u,v) − f(x,y)|` over Euclidean distance at most `d`.
    pub fn complete_euclid(&self, d: f64) -> Result<ModulusEstimate> {
        check_distance(d)?;
        let value = self.disk_maximum(d, &self.first_diffs, first_difference);
        Ok(self.estimate(value, ModulusKind::CompleteEuclid))
    }

    /// One-directional modulus: the other coordinate is held fixed.
    pub fn partial(&self, axis: Axis, d: f64) -> Result<ModulusEstimate> {
        check_distance(d)?;
        let r = self.offset(d);
        let lines: Vec<Vec<f64>> = match axis {
            Axis::X => (0..self.g).map(|j| self.column(j)).collect(),
            Axis::Y => self.values.chunks_exact(self.g).map(<[f64]>::to_vec).collect(),
        };
        let value = lines
            .par_iter()
            .map(|line| {
                let (maxs, mins) = window_extrema(line, r);
                spread(line, &maxs, &mins)
            })
            .reduce(|| 0.0, f64::max);
        let kind = match axis {
            Axis::X => ModulusKind::PartialX,
            Axis::Y => ModulusKind::PartialY,
        };
        Ok(self.estimate(value, kind))
    }

    /// `sup |f(x+2u, y+2v) − 2f(x+u, y+v) + f(x,y)|` over `√(u²+v²) ≤ d` with
    /// all three points in the square.
    pub fn second_order(&self, d: f64) -> Result<ModulusEstimate> {
        check_distance(d)?;
        let value = self.disk_maximum(d, &self.second_diffs, second_difference);
        Ok(self.estimate(value, ModulusKind::SecondOrder))
    }

    /// Half-disk offsets `(a, b, a² + b²)` inside the grid box, sorted by length.
    fn sorted_offsets(&self) -> &[(isize, isize, usize)] {
        self.offsets.get_or_init(|| {
            let r = self.g as isize - 1;
            let mut out: Vec<(isize, isize, usize)> = (0..=r)
                .flat_map(|a| (-r..=r).map(move |b| (a, b)))
                .filter(|&(a, b)| a > 0 || b > 0)
                .map(|(a, b)| (a, b, (a * a + b * b) as usize))
                .collect();
            out.sort_unstable_by_key(|&(a, b, len2)| (len2, a, b));
            out
        })
    }

    /// Maximum of `term` over every offset of length at most `d`, extending
    /// the memo when `d` reaches past what has been scanned.
    fn disk_maximum(
        &self,
        d: f64,
        memo: &Mutex<OffsetMaxima>,
        term: fn(&Self, isize, isize) -> f64,
    ) -> f64 {
        let reach = d * (self.g as f64 - 1.0) * (1.0 + OFFSET_EPS);
        let offsets = self.sorted_offsets();
        let count = offsets.partition_point(|&(_, _, len2)| len2 as f64 <= reach * reach);
        if count == 0 {
            return 0.0;
        }
        let mut memo = memo.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        let done = memo.running.len();
        if count > done {
            let fresh: Vec<f64> = offsets[done..count]
                .par_iter()
                .map(|&(a, b, _)| term(self, a, b))
                .collect();
            let mut best = memo.running.last().copied().unwrap_or(0.0);
            for v in fresh {
                best = best.max(v);
                memo.running.push(best);
            }
        }
        memo.running[count - 1]
    }
}

/// Index ranges `[lo, hi)` of `i` with `i + step` inside `0..g`.
fn shifted_range(g: usize, step: isize) -> (usize, usize) {
    let lo = (-step).max(0) as usize;
    let hi = (g as isize - step.max(0)).max(0) as usize;
    (lo, hi.max(lo))
}

fn first_difference(s: &SampledField, a: isize, b: isize) -> f64 {
    let g = s.g;
    let (i_lo, i_hi) = shifted_range(g, a);
    let (j_lo, j_hi) = shifted_range(g, b);
    let mut best = 0.0f64;
    for i in i_lo..i_hi {
        let base = &s.values[i * g..(i + 1) * g];
        let far = &s.values[(i as isize + a) as usize * g..][..g];
        for j in j_lo..j_hi {
            best = best.max((far[(j as isize + b) as usize] - base[j]).abs());
        }
    }
    best
}

fn second_difference(s: &SampledField, a: isize, b: isize) -> f64 {
    let g = s.g;
    let (i_lo, i_hi) = shifted_range(g, 2 * a);
    let (j_lo, j_hi) = shifted_range(g, 2 * b);
    let mut best = 0.0f64;
    for i in i_lo..i_hi {
        let base = &s.values[i * g..(i + 1) * g];
        let mid = &s.values[(i as isize + a) as usize * g..][..g];
        let far = &s.values[(i as isize + 2 * a) as usize * g..][..g];
        for j in j_lo..j_hi {
            let v = far[(j as isize + 2 * b) as usize] - 2.0 * mid[(j as isize + b) as usize] + base[j];
            best = best.max(v.abs());
        }
    }
    best
}

pub fn complete_modulus(f: &ScalarField, d1: f64, d2: f64, g: usize) -> Result<ModulusEstimate> {
    SampledField::new(f, g)?.complete(d1, d2)
}

pub fn complete_modulus_euclid(f: &ScalarField, d: f64, g: usize) -> Result<ModulusEstimate> {
    SampledField::new(f, g)?.complete_euclid(d)
}

pub fn partial_modulus(f: &ScalarField, axis: Axis, d: f64, g: usize) -> Result<ModulusEstimate> {
    SampledField::new(f, g)?.partial(axis, d)
}

pub fn second_modulus(f: &ScalarField, d: f64, g: usize) -> Result<ModulusEstimate> {
    SampledField::new(f, g)?.second_order(d)
}

/// A certified bound next to the error it is meant to dominate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound: f64,
    pub actual_error: f64,
}

impl BoundReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.actual_error <= self.bound + slack
    }
}

/// The variable part of the second-order estimate, whose constant is unknown:
/// `ω₂(f; √Θ/2)`, `min(1, Θ/4)` and `ω(f; μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessReport {
    pub theta: f64,
    pub theta_centered: f64,
    pub mu: f64,
    pub second_modulus: f64,
    pub min_term: f64,
    pub first_modulus: f64,
    pub actual_error: f64,
}

/// Evaluates the error bounds at many points for one function and operator.
pub struct BoundCertifier<'a> {
    op: &'a BivariateOperator,
    f: ScalarField,
    prepared: PreparedBivariate<'a>,
    sampled: SampledField,
}

impl<'a> BoundCertifier<'a> {
    pub fn new(op: &'a BivariateOperator, f: &ScalarField, g: usize) -> Result<Self> {
        Ok(Self {
            op,
            f: f.clone(),
            prepared: op.prepare(f)?,
            sampled: SampledField::new(f, g)?,
        })
    }

    pub fn sampled(&self) -> &SampledField {
        &self.sampled
    }

    pub fn actual_error(&self, x: f64, y: f64) -> Result<f64> {
        Ok((self.prepared.eval(x, y)? - self.f.eval(x, y)).abs())
    }

    /// `4 ω(f; δ²ₓ, δ²ᵧ)`.
    pub fn complete(&self, x: f64, y: f64) -> Result<BoundReport> {
        let c = self.op.central_moments(x, y)?;
        let w = self.sampled.complete(c.delta2_x.max(0.0), c.delta2_y.max(0.0))?;
        Ok(BoundReport {
            bound: 4.0 * w.value,
            actual_error: self.actual_error(x, y)?,
        })
    }

    /// `2 [ω¹(f; δ²ₓ) + ω²(f; δ²ᵧ)]`.
    pub fn partial(&self, x: f64, y: f64) -> Result<BoundReport> {
        let c = self.op.central_moments(x, y)?;
        let wx = self.sampled.partial(Axis::X, c.delta2_x.max(0.0))?;
        let wy = self.sampled.partial(Axis::Y, c.delta2_y.max(0.0))?;
        Ok(BoundReport {
            bound: 2.0 * (wx.value + wy.value),
            actual_error: self.actual_error(x, y)?,
        })
    }

    /// `M (δ²ₓ)^{γ₁/2} (δ²ᵧ)^{γ₂/2}`.
    pub fn lipschitz(&self, lip: f64, gamma1: f64, gamma2: f64, x: f64, y: f64) -> Result<BoundReport> {
        Ok(BoundReport {
            bound: lipschitz_bound(self.op, lip, gamma1, gamma2, x, y)?,
            actual_error: self.actual_error(x, y)?,
        })
    }

    pub fn smoothness(&self, x: f64, y: f64) -> Result<SmoothnessReport> {
        let c = self.op.central_moments(x, y)?;
        Ok(SmoothnessReport {
            theta: c.theta,
            theta_centered: self.op.theta_centered(x, y)?,
            mu: c.mu,
            second_modulus: self.sampled.second_order(0.5 * c.theta.max(0.0).sqrt())?.value,
            min_term: (0.25 * c.theta).min(1.0),
            first_modulus: self.sampled.complete_euclid(c.mu)?.value,
            actual_error: self.actual_error(x, y)?,
        })
    }
}

fn lipschitz_bound(
    op: &BivariateOperator,
    lip: f64,
    gamma1: f64,
    gamma2: f64,
    x: f64,
    y: f64,
) -> Result<f64> {
    if lip.is_nan() || lip <= 0.0 {
        return Err(Error::invalid(format!("Lipschitz constant must be positive, got {lip}")));
    }
    for g in [gamma1, gamma2] {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::invalid(format!("Lipschitz exponents must lie in (0, 1], got {g}")));
        }
    }
    let c = op.central_moments(x, y)?;
    Ok(lip * c.delta2_x.max(0.0).powf(gamma1 / 2.0) * c.delta2_y.max(0.0).powf(gamma2 / 2.0))
}

pub fn bound_complete(p: &BivariateParams, f: &ScalarField, x: f64, y: f64, g: usize) -> Result<BoundReport> {
    let op = BivariateOperator::new(p)?;
    BoundCertifier::new(&op, f, g)?.complete(x, y)
}

pub fn bound_partial(p: &BivariateParams, f: &ScalarField, x: f64, y: f64, g: usize) -> Result<BoundReport> {
    let op = BivariateOperator::new(p)?;
    BoundCertifier::new(&op, f, g)?.partial(x, y)
}

pub fn bound_lipschitz(
    p: &BivariateParams,
    f: &ScalarField,
    lip: f64,
    gamma1: f64,
    gamma2: f64,
    x: f64,
    y: f64,
) -> Result<BoundReport> {
    let op = BivariateOperator::new(p)?;
    let bound = lipschitz_bound(&op, lip, gamma1, gamma2, x, y)?;
    Ok(BoundReport {
        bound,
        actual_error: (op.bi_eval(f, x, y)? - f.eval(x, y)).abs(),
    })
}
