//! The log-Laplace transform f(θ) = ln ∫_K e^{⟨θ,x⟩} dx and its first two
//! derivatives.
//!
//! Two evaluation routes are provided. The exact route triangulates the body
//! and integrates the exponential over each simplex in closed form through
//! confluent divided differences (the Hermite–Genocchi identity), summing
//! cells in log-space with a single global shift so that tilts with norms in
//! the thousands stay inside double-precision range. The Monte Carlo route
//! estimates the mean and covariance as empirical moments of hit-and-run
//! samples from the tilted density, and the value by thermodynamic
//! integration of ⟨θ, ∇f(sθ)⟩ over s ∈ [0, 1].
//!
//! The derivative structure is the classical exponential-family one: ∇f(θ)
//! is the mean of the tilted density p_θ ∝ e^{⟨θ,x⟩} on K and ∇²f(θ) is its
//! covariance. Product bodies factor: f adds across factors and the
//! covariance is block-diagonal.

mod divdiff;

pub use divdiff::divided_diff_exp;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{factorial, ConvexBody, GeometryError, SimplexCell};
use crate::sampler::{self, SamplerConfig, SamplerError};

/// Auto mode evaluates exactly when the triangulation has at most this many
/// cells, and falls back to Monte Carlo otherwise.
pub const AUTO_EXACT_MAX_CELLS: usize = 10_000;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("non-finite or empty numeric input")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid evaluator configuration: {0}")]
    InvalidConfig(String),
    #[error("covariance lost positive definiteness (smallest eigenvalue {min_eig:.3e})")]
    NonPositiveCovariance { min_eig: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Which evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact when the triangulation is small enough, Monte Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

/// Which evaluator actually produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Exact,
    MonteCarlo,
}

/// Configuration for [`eval`] / [`eval_mc`].
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub mode: EvalMode,
    /// Samples per Markov chain (Monte Carlo mode). At least 1000.
    pub mc_samples: usize,
    /// Thermodynamic-integration grid size (trapezoid rule on s ∈ [0,1]).
    /// At least 8; rounded up to the next even number so the error can be
    /// reported by grid halving.
    pub ti_steps: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mode: EvalMode::Auto,
            mc_samples: 20_000,
            ti_steps: 16,
            seed: 0,
        }
    }
}

/// Standard errors for a Monte Carlo evaluation, entry by entry.
#[derive(Debug, Clone)]
pub struct EvalStdErr {
    pub value: f64,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

/// f(θ) together with its gradient (the mean of p_θ) and Hessian (the
/// covariance of p_θ).
#[derive(Debug, Clone)]
pub struct LogLaplaceEval {
    pub theta: DVector<f64>,
    pub value: f64,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub method: EvalMethod,
    /// Present for Monte Carlo results only.
    pub std_err: Option<EvalStdErr>,
    /// True when the Monte Carlo value excludes the (unavailable) ln vol(K)
    /// constant, i.e. reports f(θ) − f(0).
    pub value_is_relative: bool,
}

/// ∫_Δ e^{⟨θ,x⟩} dx over one simplex together with the barycentric moments
/// of the tilted density restricted to the cell: E[λ_i] (length n+1, sums
/// to 1) and E[λ_i λ_j] ((n+1)×(n+1), rows sum to E[λ_i]).
///
/// The integral is n!·vol(Δ)·exp[y_0,…,y_n] with y_i = ⟨θ, v_i⟩; first
/// moments append one copy of y_i to the node list, second moments append
/// two (with a factor 2 on the diagonal, from the confluent repetition).
pub fn integrate_exp_simplex(
    cell: &SimplexCell,
    theta: &DVector<f64>,
) -> Result<(f64, DVector<f64>, DMatrix<f64>), EvalError> {
    let m = cell_moments(cell, theta, 0.0)?;
    Ok((m.weight, m.lambda_mean, m.lambda_second))
}

/// Per-cell integration result, with the exponential prefactor taken
/// relative to a caller-chosen shift: weight = n!·vol·e^{g−shift}·exp[y−g]
/// where g = max_i y_i.
struct CellMoments {
    weight: f64,
    lambda_mean: DVector<f64>,
    lambda_second: DMatrix<f64>,
}

fn cell_moments(cell: &SimplexCell, theta: &DVector<f64>, shift: f64) -> Result<CellMoments, EvalError> {
    let n = cell.vertices.len() - 1;
    if theta.len() != n {
        return Err(EvalError::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    if !theta.iter().all(|t| t.is_finite()) {
        return Err(EvalError::NonFiniteInput);
    }
    let ys: Vec<f64> = cell.vertices.iter().map(|v| theta.dot(v)).collect();
    let g = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let zs: Vec<f64> = ys.iter().map(|y| y - g).collect();

    let d0 = divdiff::dd_exp_shifted(&zs);
    debug_assert!(d0 > 0.0, "shifted divided difference must be positive");

    // E[λ_i]: one extra node at z_i.
    let mut nodes = zs.clone();
    nodes.push(0.0);
    let mut lambda_mean = DVector::zeros(n + 1);
    for i in 0..=n {
        nodes[n + 1] = zs[i];
        lambda_mean[i] = divdiff::dd_exp_shifted(&nodes) / d0;
    }
    debug_assert!(
        (lambda_mean.sum() - 1.0).abs() < 1e-9,
        "barycentric means must sum to 1"
    );

    // E[λ_i λ_j]: two extra nodes, diagonal carries the confluent factor 2.
    nodes.push(0.0);
    let mut lambda_second = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        nodes[n + 1] = zs[i];
        for j in i..=n {
            nodes[n + 2] = zs[j];
            let dd = divdiff::dd_exp_shifted(&nodes) / d0;
            let val = if i == j { 2.0 * dd } else { dd };
            lambda_second[(i, j)] = val;
            lambda_second[(j, i)] = val;
        }
    }

    let weight = factorial(n) * cell.volume * (g - shift).exp() * d0;
    if !weight.is_finite() {
        return Err(EvalError::NonFiniteInput);
    }
    Ok(CellMoments {
        weight,
        lambda_mean,
        lambda_second,
    })
}

/// Exact evaluator with a cached triangulation, reusable across many θ.
/// Product bodies hold one evaluator per factor and combine results
/// block-diagonally instead of triangulating the product.
pub struct ExactEvaluator {
    dim: usize,
    kind: EvalKind,
}

enum EvalKind {
    Cells(Vec<SimplexCell>),
    Product(Box<ExactEvaluator>, Box<ExactEvaluator>),
}

impl ExactEvaluator {
    pub fn new(body: &ConvexBody) -> Result<Self, EvalError> {
        let kind = match body {
            ConvexBody::Product { left, right } => EvalKind::Product(
                Box::new(ExactEvaluator::new(left)?),
                Box::new(ExactEvaluator::new(right)?),
            ),
            _ => EvalKind::Cells(body.triangulate()?),
        };
        Ok(ExactEvaluator {
            dim: body.dimension(),
            kind,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of simplices integrated per evaluation (factors add).
    pub fn cell_count(&self) -> usize {
        match &self.kind {
            EvalKind::Cells(cells) => cells.len(),
            EvalKind::Product(l, r) => l.cell_count() + r.cell_count(),
        }
    }

    pub fn eval(&self, theta: &DVector<f64>) -> Result<LogLaplaceEval, EvalError> {
        if theta.len() != self.dim {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim,
                got: theta.len(),
            });
        }
        if !theta.iter().all(|t| t.is_finite()) {
            return Err(EvalError::NonFiniteInput);
        }
        match &self.kind {
            EvalKind::Cells(cells) => eval_cells(cells, theta),
            EvalKind::Product(l, r) => {
                let nl = l.dim;
                let el = l.eval(&DVector::from(theta.rows(0, nl).clone_owned()))?;
                let er = r.eval(&DVector::from(theta.rows(nl, r.dim).clone_owned()))?;
                let mut mean = DVector::zeros(self.dim);
                mean.rows_mut(0, nl).copy_from(&el.mean);
                mean.rows_mut(nl, r.dim).copy_from(&er.mean);
                let mut covariance = DMatrix::zeros(self.dim, self.dim);
                covariance
                    .view_mut((0, 0), (nl, nl))
                    .copy_from(&el.covariance);
                covariance
                    .view_mut((nl, nl), (r.dim, r.dim))
                    .copy_from(&er.covariance);
                Ok(LogLaplaceEval {
                    theta: theta.clone(),
                    value: el.value + er.value,
                    mean,
                    covariance,
                    method: EvalMethod::Exact,
                    std_err: None,
                    value_is_relative: false,
                })
            }
        }
    }
}

fn eval_cells(cells: &[SimplexCell], theta: &DVector<f64>) -> Result<LogLaplaceEval, EvalError> {
    let n = theta.len();
    // Global shift: the largest exponent over every cell vertex, so each
    // cell weight is at most n!·vol and the log-space sum cannot overflow.
    let global = cells
        .iter()
        .flat_map(|c| c.vertices.iter())
        .map(|v| theta.dot(v))
        .fold(f64::NEG_INFINITY, f64::max);

    let moments: Vec<CellMoments> = cells
        .iter()
        .map(|c| cell_moments(c, theta, global))
        .collect::<Result<_, _>>()?;

    let total: f64 = moments.iter().map(|m| m.weight).sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(EvalError::NonFiniteInput);
    }
    let value = global + total.ln();

    let mut mean = DVector::zeros(n);
    for (cell, m) in cells.iter().zip(&moments) {
        for (v, lm) in cell.vertices.iter().zip(m.lambda_mean.iter()) {
            mean.axpy(m.weight * lm, v, 1.0);
        }
    }
    mean /= total;

    // Second moments are assembled about the mean: with centered vertices
    // w_i = v_i − mean and x = Σ λ_i v_i, E[(x−mean)(x−mean)ᵀ] over the cell
    // is exactly Σ_{ij} E[λ_i λ_j] w_i w_jᵀ, which avoids the cancellation
    // E[xxᵀ] − μμᵀ would suffer when the body sits far from the origin or
    // the tilt is extreme.
    let mut covariance = DMatrix::zeros(n, n);
    let mut residual = DVector::zeros(n);
    for (cell, m) in cells.iter().zip(&moments) {
        let centered: Vec<DVector<f64>> = cell.vertices.iter().map(|v| v - &mean).collect();
        for (i, wi) in centered.iter().enumerate() {
            residual.axpy(m.weight * m.lambda_mean[i], wi, 1.0);
            for (j, wj) in centered.iter().enumerate() {
                covariance.ger(m.weight * m.lambda_second[(i, j)], wi, wj, 1.0);
            }
        }
    }
    covariance /= total;
    residual /= total;
    // The residual Σ w E[x−mean]/W is zero in exact arithmetic; subtracting
    // its outer product keeps the formula an identity.
    covariance.ger(-1.0, &residual, &residual, 1.0);
    let covariance = (&covariance + covariance.transpose()) * 0.5;

    let min_eig = covariance
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(min_eig > 0.0) {
        return Err(EvalError::NonPositiveCovariance { min_eig });
    }

    Ok(LogLaplaceEval {
        theta: theta.clone(),
        value,
        mean,
        covariance,
        method: EvalMethod::Exact,
        std_err: None,
        value_is_relative: false,
    })
}

/// Exact evaluation of f(θ), ∇f(θ), ∇²f(θ) by triangulation and divided
/// differences. For repeated evaluations on one body prefer
/// [`ExactEvaluator`], which caches the triangulation.
pub fn eval_exact(body: &ConvexBody, theta: &DVector<f64>) -> Result<LogLaplaceEval, EvalError> {
    ExactEvaluator::new(body)?.eval(theta)
}

/// Evaluate with the mode chosen by `config` (Auto: exact when the
/// triangulation has at most [`AUTO_EXACT_MAX_CELLS`] cells).
pub fn eval(
    body: &ConvexBody,
    theta: &DVector<f64>,
    config: &EvalConfig,
) -> Result<LogLaplaceEval, EvalError> {
    match config.mode {
        EvalMode::Exact => eval_exact(body, theta),
        EvalMode::MonteCarlo => eval_mc(body, theta, config),
        EvalMode::Auto => match ExactEvaluator::new(body) {
            Ok(ev) if ev.cell_count() <= AUTO_EXACT_MAX_CELLS => ev.eval(theta),
            _ => eval_mc(body, theta, config),
        },
    }
}

/// Monte Carlo evaluation. The mean and covariance are empirical moments of
/// hit-and-run samples from p_θ; the value is obtained by thermodynamic
/// integration, f(θ) = f(0) + ∫₀¹ ⟨θ, ∇f(sθ)⟩ ds, with a trapezoid rule on
/// an even-sized uniform grid. The value error combines the per-node
/// statistical errors with a grid-halving discretization estimate. When the
/// body volume is unavailable (triangulation infeasible) the value is
/// reported relative to f(0) and flagged.
pub fn eval_mc(
    body: &ConvexBody,
    theta: &DVector<f64>,
    config: &EvalConfig,
) -> Result<LogLaplaceEval, EvalError> {
    if config.mc_samples < 1000 {
        return Err(EvalError::InvalidConfig(format!(
            "mc_samples = {} (minimum 1000)",
            config.mc_samples
        )));
    }
    if config.ti_steps < 8 {
        return Err(EvalError::InvalidConfig(format!(
            "ti_steps = {} (minimum 8)",
            config.ti_steps
        )));
    }
    let n = body.dimension();
    if theta.len() != n {
        return Err(EvalError::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    if !theta.iter().all(|t| t.is_finite()) {
        return Err(EvalError::NonFiniteInput);
    }

    let steps = config.ti_steps + config.ti_steps % 2;
    let mut node_mean = vec![0.0; steps + 1];
    let mut node_se = vec![0.0; steps + 1];
    let mut top_moments = None;
    for j in 0..=steps {
        let s = j as f64 / steps as f64;
        let tilt = theta * s;
        let chain_cfg = SamplerConfig {
            seed: config.seed ^ j as u64,
            ..SamplerConfig::default()
        };
        let samples = sampler::sample(body, &tilt, config.mc_samples, &chain_cfg)?;
        let projected: Vec<f64> = samples.iter().map(|x| theta.dot(x)).collect();
        let (m, se) = sampler::scalar_batch_stats(&projected);
        node_mean[j] = m;
        node_se[j] = se;
        if j == steps {
            top_moments = Some(sampler::estimate_moments(&samples)?);
        }
    }
    let top = top_moments.expect("final grid node always sampled");

    // Trapezoid on the full grid and on the half grid (every other node);
    // their difference estimates the discretization error.
    let trap = |stride: usize| -> (f64, f64) {
        let m = steps / stride;
        let h = 1.0 / m as f64;
        let mut total = 0.0;
        let mut var = 0.0;
        for (k, j) in (0..=steps).step_by(stride).enumerate() {
            let w = if k == 0 || k == m { 0.5 * h } else { h };
            total += w * node_mean[j];
            var += (w * node_se[j]).powi(2);
        }
        (total, var.sqrt())
    };
    let (full, full_se) = trap(1);
    let (half, _) = trap(2);
    let value_se = full_se + (full - half).abs();

    let (value, value_is_relative) = match body.volume() {
        Ok(v) => (v.ln() + full, false),
        Err(_) => (full, true),
    };

    Ok(LogLaplaceEval {
        theta: theta.clone(),
        value,
        mean: top.mean,
        covariance: top.covariance,
        method: EvalMethod::MonteCarlo,
        std_err: Some(EvalStdErr {
            value: value_se,
            mean: top.mean_se,
            covariance: top.covariance_se,
        }),
        value_is_relative,
    })
}
