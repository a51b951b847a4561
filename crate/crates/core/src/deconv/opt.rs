//! Two-factor deconvolution by trust-region Newton minimisation of the
//! Jensen–Shannon cost `JS(P ‖ q1 ∗ q2)`.
//!
//! Derivatives are computed in full coordinates (every entry of `q1` and `q2`
//! independent). The optimiser works on a reduced chart where one entry of
//! each factor is `1 - Σ(rest)`, so iterates stay on the product of simplices.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::linalg::{axpy, dot, norm, Matrix};
use crate::math;
use crate::pmf::{self, Pmf, PmfError};
use crate::rng::{open_unit, stream_rng};

/// Iterates keep every coordinate in `[FEASIBILITY_MARGIN, 1 - FEASIBILITY_MARGIN]`.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;
/// A solve stops as converged once the cost falls below this value.
pub const COST_FLOOR: f64 = 1e-14;

/// Coordinates at or below this with an outward descent direction are held.
pub const ACTIVE_BOUND: f64 = 1e-7;

const MAX_RADIUS: f64 = 1.0;
const MIN_RADIUS: f64 = 1e-16;
const ACCEPT_RATIO: f64 = 1e-4;
const SHRINK_RATIO: f64 = 0.25;
const GROW_RATIO: f64 = 0.75;
const SHRINK_FACTOR: f64 = 0.25;
const GROW_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeconvError {
    #[error("factor lengths {len1} + {len2} - 1 do not match target length {target}")]
    Dimensions {
        len1: usize,
        len2: usize,
        target: usize,
    },
    #[error("convolution vanishes at index {index} where the target is positive")]
    Domain { index: usize },
    #[error("invalid optimizer config: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Pmf(#[from] PmfError),
}

/// Target and factor lengths for a two-way split.
#[derive(Debug, Clone, PartialEq)]
pub struct DeconvProblem {
    target: Pmf,
    len1: usize,
    len2: usize,
}

impl DeconvProblem {
    pub fn new(target: Pmf, len1: usize, len2: usize) -> Result<Self, DeconvError> {
        if len1 == 0 || len2 == 0 || len1 + len2 - 1 != target.len() {
            return Err(DeconvError::Dimensions {
                len1,
                len2,
                target: target.len(),
            });
        }
        Ok(DeconvProblem { target, len1, len2 })
    }

    /// Default split: `len1 = ⌊(N+1)/2⌋`, `len2 = ⌈(N+1)/2⌉`.
    pub fn split(target: Pmf) -> Self {
        let n = target.len();
        let len1 = n.div_ceil(2);
        let len2 = (n + 2) / 2;
        DeconvProblem { target, len1, len2 }
    }

    pub fn target(&self) -> &Pmf {
        &self.target
    }

    pub fn len1(&self) -> usize {
        self.len1
    }

    pub fn len2(&self) -> usize {
        self.len2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase", default)
)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub initial_radius: f64,
    /// Convergence threshold on the reduced-gradient norm.
    pub grad_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 1000,
            initial_radius: 0.1,
            grad_tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), DeconvError> {
        if self.max_iterations == 0 {
            return Err(DeconvError::Config("maxIterations must be at least 1"));
        }
        if !(self.initial_radius > 0.0) || !(self.grad_tolerance > 0.0) {
            return Err(DeconvError::Config("radius and tolerance must be positive"));
        }
        Ok(())
    }
}

/// One row of the iteration log.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Cost at the current (accepted) iterate after this iteration.
    pub cost: f64,
    pub radius: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub struct DeconvResult {
    pub factors: Vec<Pmf>,
    pub final_cost: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub trace: Vec<TraceRecord>,
}

/// Per output index `i`: `log(Q_i / R_i)` and `1/Q_i - 1/(2 R_i)`.
fn output_terms(q: &[f64], target: &[f64]) -> Result<(Vec<f64>, Vec<f64>), DeconvError> {
    let mut logs = Vec::with_capacity(q.len());
    let mut weights = Vec::with_capacity(q.len());
    for (i, (&qi, &pi)) in q.iter().zip(target).enumerate() {
        if qi <= 0.0 {
            if pi > 0.0 {
                return Err(DeconvError::Domain { index: i });
            }
            // P_i = 0 forces Q_i / R_i = 2 for every Q_i > 0; use the limit
            logs.push(core::f64::consts::LN_2);
            weights.push(0.0);
            continue;
        }
        let ri = 0.5 * (pi + qi);
        logs.push(math::ln(qi / ri));
        weights.push(1.0 / qi - 0.5 / ri);
    }
    Ok((logs, weights))
}

fn check_lengths(q1: &[f64], q2: &[f64], target: &[f64]) -> Result<(), DeconvError> {
    if q1.is_empty() || q2.is_empty() || q1.len() + q2.len() - 1 != target.len() {
        return Err(DeconvError::Dimensions {
            len1: q1.len(),
            len2: q2.len(),
            target: target.len(),
        });
    }
    Ok(())
}

/// Full-coordinate gradient of `JS(target ‖ q1 ∗ q2)`: the first `L1`
/// entries are `∂/∂q1_k`, the remaining `L2` are `∂/∂q2_l`.
pub fn js_gradient(q1: &[f64], q2: &[f64], target: &[f64]) -> Result<Vec<f64>, DeconvError> {
    check_lengths(q1, q2, target)?;
    let q = pmf::convolve_slices(q1, q2);
    let (logs, _) = output_terms(&q, target)?;
    let mut grad = vec![0.0; q1.len() + q2.len()];
    for k in 0..q1.len() {
        grad[k] = q2.iter().enumerate().map(|(v, &b)| b * logs[k + v]).sum();
    }
    for l in 0..q2.len() {
        grad[q1.len() + l] = q1.iter().enumerate().map(|(u, &a)| a * logs[u + l]).sum();
    }
    Ok(grad)
}

/// Full-coordinate Hessian `[[A, D], [Dᵀ, C]]` of `JS(target ‖ q1 ∗ q2)`.
pub fn js_hessian(q1: &[f64], q2: &[f64], target: &[f64]) -> Result<Matrix, DeconvError> {
    check_lengths(q1, q2, target)?;
    let (n1, n2) = (q1.len(), q2.len());
    let q = pmf::convolve_slices(q1, q2);
    let (logs, weights) = output_terms(&q, target)?;
    let mut h = Matrix::zeros(n1 + n2, n1 + n2);

    let mut grad_q: Vec<(usize, f64)> = Vec::with_capacity(n1 + n2);
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        // sparse ∇Q_i: q1_k contributes q2[i-k], q2_l contributes q1[i-l]
        let lo = i.saturating_sub(n2 - 1);
        let hi = i.min(n1 - 1);
        grad_q.clear();
        grad_q.extend((lo..=hi).map(|k| (k, q2[i - k])));
        grad_q.extend((lo..=hi).map(|k| (n1 + i - k, q1[k])));
        for &(a, da) in &grad_q {
            for &(b, db) in &grad_q {
                h[(a, b)] += w * da * db;
            }
        }
    }
    // bilinear term: ∂²Q_i / ∂q1_k ∂q2_l = [k + l = i]
    for k in 0..n1 {
        for l in 0..n2 {
            h[(k, n1 + l)] += logs[k + l];
            h[(n1 + l, k)] += logs[k + l];
        }
    }
    Ok(h)
}

/// Maps between the reduced chart and full coordinates. Each block drops its
/// pivot (largest entry), which is recomputed as `1 - Σ(others)`; pivoting on
/// the largest entry keeps the eliminated coordinate away from the bounds.
struct Chart {
    n1: usize,
    n2: usize,
    pivot1: usize,
    pivot2: usize,
}

fn argmax(q: &[f64]) -> usize {
    q.iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > q[best] { i } else { best })
}

impl Chart {
    fn at(q1: &[f64], q2: &[f64]) -> Chart {
        Chart {
            n1: q1.len(),
            n2: q2.len(),
            pivot1: argmax(q1),
            pivot2: argmax(q2),
        }
    }

    fn dim(&self) -> usize {
        self.n1 + self.n2 - 2
    }

    /// Full index of reduced coordinate `j` and of its block's pivot.
    fn full(&self, j: usize) -> (usize, usize) {
        if j < self.n1 - 1 {
            (if j < self.pivot1 { j } else { j + 1 }, self.pivot1)
        } else {
            let k = j - (self.n1 - 1);
            let k = if k < self.pivot2 { k } else { k + 1 };
            (self.n1 + k, self.n1 + self.pivot2)
        }
    }

    fn reduce_gradient(&self, g: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let (f, pivot) = self.full(j);
                g[f] - g[pivot]
            })
            .collect()
    }

    fn reduce_hessian(&self, h: &Matrix) -> Matrix {
        let m = self.dim();
        let mut out = Matrix::zeros(m, m);
        for a in 0..m {
            let (fa, la) = self.full(a);
            for b in 0..m {
                let (fb, lb) = self.full(b);
                out[(a, b)] = h[(fa, fb)] - h[(fa, lb)] - h[(la, fb)] + h[(la, lb)];
            }
        }
        out
    }

    fn value(&self, q1: &[f64], q2: &[f64], j: usize) -> f64 {
        let (f, _) = self.full(j);
        if f < self.n1 {
            q1[f]
        } else {
            q2[f - self.n1]
        }
    }

    /// Applies a reduced step, recomputing the pivots.
    fn step(&self, q1: &[f64], q2: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut a = q1.to_vec();
        let mut b = q2.to_vec();
        for (j, &pj) in p.iter().enumerate() {
            let (f, _) = self.full(j);
            if f < self.n1 {
                a[f] += pj;
            } else {
                b[f - self.n1] += pj;
            }
        }
        close_simplex(&mut a, self.pivot1);
        close_simplex(&mut b, self.pivot2);
        (a, b)
    }
}

fn close_simplex(q: &mut [f64], pivot: usize) {
    let rest: f64 = q
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, v)| v)
        .sum();
    q[pivot] = 1.0 - rest;
}

/// Drops coordinates resting on the lower bound whose descent direction
/// points out of the feasible box, so the subproblem moves along the face.
fn hold_active(chart: &Chart, q1: &[f64], q2: &[f64], g: &mut [f64], h: &mut Matrix) {
    for j in 0..g.len() {
        if chart.value(q1, q2, j) <= ACTIVE_BOUND && g[j] > 0.0 {
            g[j] = 0.0;
            for k in 0..g.len() {
                h[(j, k)] = 0.0;
                h[(k, j)] = 0.0;
            }
            h[(j, j)] = 1.0;
        }
    }
}

fn feasible(q: &[f64]) -> bool {
    q.iter()
        .all(|&x| (FEASIBILITY_MARGIN..=1.0 - FEASIBILITY_MARGIN).contains(&x))
}

/// Steihaug truncated conjugate gradient for `min g·p + ½ pᵀHp, ‖p‖ ≤ radius`.
fn steihaug(h: &Matrix, g: &[f64], radius: f64) -> Vec<f64> {
    let m = g.len();
    let mut z = vec![0.0; m];
    let mut r = g.to_vec();
    let mut d: Vec<f64> = g.iter().map(|x| -x).collect();
    let g_norm = norm(g);
    let tol = g_norm * math::sqrt(g_norm).min(0.5);
    if g_norm == 0.0 {
        return z;
    }
    for _ in 0..(2 * m + 10) {
        let hd = h.mul_vec(&d);
        let curvature = dot(&d, &hd);
        if curvature <= 0.0 {
            return to_boundary(&z, &d, radius);
        }
        let rr = dot(&r, &r);
        let alpha = rr / curvature;
        let mut z_next = z.clone();
        axpy(alpha, &d, &mut z_next);
        if norm(&z_next) >= radius {
            return to_boundary(&z, &d, radius);
        }
        axpy(alpha, &hd, &mut r);
        z = z_next;
        let rr_next = dot(&r, &r);
        if math::sqrt(rr_next) < tol {
            return z;
        }
        let beta = rr_next / rr;
        for (di, ri) in d.iter_mut().zip(&r) {
            *di = -ri + beta * *di;
        }
    }
    z
}

/// `z + τ d` with `τ ≥ 0` and `‖z + τ d‖ = radius`.
fn to_boundary(z: &[f64], d: &[f64], radius: f64) -> Vec<f64> {
    let dd = dot(d, d);
    let zd = dot(z, d);
    let zz = dot(z, z);
    let disc = (zd * zd + dd * (radius * radius - zz)).max(0.0);
    let tau = (-zd + math::sqrt(disc)) / dd;
    let mut out = z.to_vec();
    axpy(tau, d, &mut out);
    out
}

fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..len).map(|_| -math::ln(open_unit(rng))).collect();
        let total: f64 = draws.iter().sum();
        let mut point: Vec<f64> = draws.iter().map(|d| d / total).collect();
        close_simplex(&mut point, len - 1);
        if len == 1 || feasible(&point) {
            return point;
        }
    }
}

fn cost(q1: &[f64], q2: &[f64], target: &[f64]) -> f64 {
    let q = pmf::convolve_slices(q1, q2);
    pmf::js_cost(target, &q).expect("lengths checked")
}

/// One trust-region solve from the random start of stream 0 of `config.seed`.
pub fn trust_region_deconvolve(
    problem: &DeconvProblem,
    config: &OptimizerConfig,
) -> Result<DeconvResult, DeconvError> {
    trust_region_restart(problem, config, 0)
}

/// One trust-region solve started from the random point of stream `restart`.
pub fn trust_region_restart(
    problem: &DeconvProblem,
    config: &OptimizerConfig,
    restart: u64,
) -> Result<DeconvResult, DeconvError> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, restart);
    let q1 = random_simplex_point(&mut rng, problem.len1);
    let q2 = random_simplex_point(&mut rng, problem.len2);
    minimize_from(problem, config, q1, q2)
}

/// Runs `restarts` independent solves and keeps the lowest final cost
/// (earliest restart on ties).
pub fn trust_region_best(
    problem: &DeconvProblem,
    config: &OptimizerConfig,
    restarts: usize,
) -> Result<DeconvResult, DeconvError> {
    let mut best: Option<DeconvResult> = None;
    for r in 0..restarts.max(1) {
        let result = trust_region_restart(problem, config, r as u64)?;
        if best.as_ref().is_none_or(|b| result.final_cost < b.final_cost) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Trust-region minimisation from a given feasible starting point.
pub fn minimize_from(
    problem: &DeconvProblem,
    config: &OptimizerConfig,
    mut q1: Vec<f64>,
    mut q2: Vec<f64>,
) -> Result<DeconvResult, DeconvError> {
    config.validate()?;
    check_lengths(&q1, &q2, &problem.target)?;
    let target = problem.target.values();

    let mut f = cost(&q1, &q2, target);
    let mut radius = config.initial_radius.min(MAX_RADIUS);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm;

    loop {
        let chart = Chart::at(&q1, &q2);
        let mut g = chart.reduce_gradient(&js_gradient(&q1, &q2, target)?);
        let mut h = chart.reduce_hessian(&js_hessian(&q1, &q2, target)?);
        hold_active(&chart, &q1, &q2, &mut g, &mut h);
        grad_norm = norm(&g);
        if chart.dim() == 0 || grad_norm < config.grad_tolerance || f < COST_FLOOR {
            converged = true;
            break;
        }
        if iterations >= config.max_iterations || radius < MIN_RADIUS {
            break;
        }
        iterations += 1;

        let p = steihaug(&h, &g, radius);
        let step_norm = norm(&p);
        let predicted = -(dot(&g, &p) + 0.5 * dot(&p, &h.mul_vec(&p)));
        let (t1, t2) = chart.step(&q1, &q2, &p);

        if !feasible(&t1) || !feasible(&t2) {
            radius = SHRINK_FACTOR * step_norm.min(radius);
        } else {
            let f_trial = cost(&t1, &t2, target);
            let ratio = if predicted > 0.0 {
                (f - f_trial) / predicted
            } else {
                -1.0
            };
            if ratio < SHRINK_RATIO {
                radius = SHRINK_FACTOR * step_norm.min(radius);
            } else if ratio > GROW_RATIO && step_norm >= 0.99 * radius {
                radius = (GROW_FACTOR * radius).min(MAX_RADIUS);
            }
            if ratio > ACCEPT_RATIO && f_trial <= f {
                q1 = t1;
                q2 = t2;
                f = f_trial;
            }
        }
        trace.push(TraceRecord {
            iteration: iterations,
            cost: f,
            radius,
            grad_norm,
        });
    }

    let factors = vec![Pmf::new(q1)?, Pmf::new(q2)?];
    let final_cost = pmf::js_cost(target, &pmf::convolve(&factors[0], &factors[1]))?;
    Ok(DeconvResult {
        factors,
        final_cost,
        iterations,
        gradient_norm: grad_norm,
        converged,
        trace,
    })
}
