//! The entropic barrier f*(x) = sup_θ {⟨θ,x⟩ − f(θ)} and its diagnostics.
//!
//! Everything here rides on convex duality for the log-partition function
//! f: the supremum is attained at the unique θ with ∇f(θ) = x, so
//! conjugation is a smooth root-finding problem solved by damped Newton
//! ascent. At the optimum, ∇f*(x) = θ and ∇²f*(x) = (∇²f(θ))⁻¹, so the
//! barrier's derivatives come for free from the evaluator's moments.
//!
//! The self-concordance parameter of f* is ν = sup_θ var_{p_θ}⟨θ,X⟩, a
//! quantity this module samples over tilt ladders ([`sc_sweep`]); the
//! headline claim under test is that ν equals the dimension n exactly.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{ConvexBody, GeometryError};
use crate::loglaplace::{self, EvalConfig, EvalError, ExactEvaluator, LogLaplaceEval};
use crate::quadrature::{adaptive_simpson, Polygon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Strict-interior margin required of conjugation inputs.
pub const INTERIOR_MARGIN: f64 = 1e-9;
/// Newton iteration cap; exceeding it signals near-boundary conditioning.
const NEWTON_CAP: usize = 500;
/// Hessian condition-number ceiling for the symmetric solve.
const MAX_CONDITION: f64 = 1e12;
/// Default Newton-decrement tolerance used by the convenience wrappers.
pub const DEFAULT_CONJUGATE_TOL: f64 = 1e-10;
/// Rungs of the geometric norm ladder used by [`sc_sweep`].
const LADDER_RUNGS: u32 = 8;

#[derive(Debug, Error)]
pub enum BarrierError {
    #[error("point is not strictly interior (margin {INTERIOR_MARGIN:.0e})")]
    NotInterior,
    #[error("Newton iteration cap ({NEWTON_CAP}) exceeded; point is too close to the boundary")]
    IterationCap,
    #[error("Hessian condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}; point is too close to the boundary")]
    IllConditioned { cond: f64 },
    #[error("finite-difference step {step:.3e} needs interior margin {required:.3e}, have {margin:.3e}")]
    FdStepTooLarge { step: f64, required: f64, margin: f64 },
    #[error("quadrature-based check supports dimension <= 2, got {0}")]
    DimensionTooLarge(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point of int K with its dual coordinates: θ = ∇f*(x), the barrier
/// value f*(x) = ⟨θ,x⟩ − f(θ), gradient θ, and Hessian (∇²f(θ))⁻¹.
#[derive(Debug, Clone)]
pub struct BarrierPoint {
    pub x: DVector<f64>,
    pub theta: DVector<f64>,
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    /// Final Newton decrement — the convergence certificate.
    pub newton_decrement: f64,
}

/// One ν(θ) measurement from a sweep.
#[derive(Debug, Clone)]
pub struct ScSample {
    pub theta: DVector<f64>,
    pub nu: f64,
    /// Statistical error for Monte Carlo measurements, None in exact mode.
    pub std_err: Option<f64>,
}

/// Result of a self-concordance sweep: ν(θ) sampled over tilt ladders, with
/// the dimension bound ν ≤ n checked sample by sample.
#[derive(Debug, Clone)]
pub struct ScReport {
    pub body_id: String,
    pub samples: Vec<ScSample>,
    /// Evaluation failures (extreme tilts), recorded rather than fatal.
    pub failures: Vec<(DVector<f64>, String)>,
    pub nu_max: f64,
    /// The claimed bound, equal to the dimension n.
    pub bound: f64,
    pub pass: bool,
}

/// The Fenchel conjugate at x: maximizes ⟨θ,x⟩ − f(θ) by damped Newton
/// ascent from θ = 0, using the exact evaluator (the triangulation is built
/// once and reused across iterations).
///
/// The step is (∇²f)⁻¹(x − ∇f); with Newton decrement λ = ‖step‖_{∇²f} the
/// update is damped by 1/(1+λ) until λ < 1/4, then full. Terminates when
/// λ ≤ tol.
pub fn conjugate(body: &ConvexBody, x: &DVector<f64>, tol: f64) -> Result<BarrierPoint, BarrierError> {
    let ev = ExactEvaluator::new(body)?;
    conjugate_with(&ev, body, x, tol)
}

/// [`conjugate`] against a prebuilt evaluator; use this when conjugating
/// many points of the same body.
pub fn conjugate_with(
    ev: &ExactEvaluator,
    body: &ConvexBody,
    x: &DVector<f64>,
    tol: f64,
) -> Result<BarrierPoint, BarrierError> {
    let n = body.dimension();
    if x.len() != n {
        return Err(EvalError::DimensionMismatch {
            expected: n,
            got: x.len(),
        }
        .into());
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(EvalError::NonFiniteInput.into());
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(BarrierError::InvalidInput(format!(
            "conjugation tolerance must be positive and finite, got {tol}"
        )));
    }
    if !body.contains(x, -INTERIOR_MARGIN) {
        return Err(BarrierError::NotInterior);
    }

    let mut theta = DVector::zeros(n);
    for _ in 0..=NEWTON_CAP {
        let e = ev.eval(&theta)?;
        let chol = factor(&e.covariance)?;
        let residual = x - &e.mean;
        let step = chol.solve(&residual);
        let lambda = residual.dot(&step).max(0.0).sqrt();
        if lambda <= tol {
            let hessian = symmetrized_inverse(&chol);
            return Ok(BarrierPoint {
                x: x.clone(),
                theta: theta.clone(),
                value: theta.dot(x) - e.value,
                gradient: theta,
                hessian,
                newton_decrement: lambda,
            });
        }
        let damping = if lambda < 0.25 { 1.0 } else { 1.0 / (1.0 + lambda) };
        theta.axpy(damping, &step, 1.0);
    }
    Err(BarrierError::IterationCap)
}

/// Symmetric factorization with a condition-number gate.
fn factor(cov: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>, BarrierError> {
    let eig = cov.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(BarrierError::IllConditioned { cond });
    }
    nalgebra::Cholesky::new(cov.clone()).ok_or(BarrierError::IllConditioned { cond })
}

fn symmetrized_inverse(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>) -> DMatrix<f64> {
    let inv = chol.inverse();
    (&inv + inv.transpose()) * 0.5
}

/// Barrier value, gradient, and Hessian at x (convenience wrapper over
/// [`conjugate`] at the default tolerance).
pub fn barrier_eval(
    body: &ConvexBody,
    x: &DVector<f64>,
) -> Result<(f64, DVector<f64>, DMatrix<f64>), BarrierError> {
    let bp = conjugate(body, x, DEFAULT_CONJUGATE_TOL)?;
    Ok((bp.value, bp.gradient, bp.hessian))
}

/// ν(θ) = ⟨θ, ∇²f(θ) θ⟩ = var_{p_θ}⟨θ, X⟩, evaluated with the configured
/// evaluator. The self-concordance parameter of f* is the supremum of this
/// quantity over θ.
pub fn sc_parameter_at(
    body: &ConvexBody,
    theta: &DVector<f64>,
    config: &EvalConfig,
) -> Result<f64, EvalError> {
    let e = loglaplace::eval(body, theta, config)?;
    Ok(quadratic_form(&e.covariance, theta))
}

fn quadratic_form(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(m * v))
}

/// Conservative statistical error for ν = θᵀ Σ θ from per-entry errors of Σ.
fn nu_std_err(e: &LogLaplaceEval) -> Option<f64> {
    e.std_err.as_ref().map(|se| {
        let mut total = 0.0;
        for i in 0..e.theta.len() {
            for j in 0..e.theta.len() {
                total += (e.theta[i] * e.theta[j]).abs() * se.covariance[(i, j)];
            }
        }
        total
    })
}

/// Samples ν(θ) over `directions` random unit directions plus the
/// directions from the barycenter toward each vertex (when enumerable),
/// each scaled by a geometric ladder max_norm·2^{−j}, j = 0..8. Evaluation
/// failures at extreme tilts are recorded per sample. Pass criterion:
/// ν ≤ n·(1 + 1e−6) in exact mode, ν ≤ n + 3·std_err per sample in Monte
/// Carlo mode.
pub fn sc_sweep(
    body: &ConvexBody,
    directions: usize,
    max_norm: f64,
    seed: u64,
    config: &EvalConfig,
) -> Result<ScReport, BarrierError> {
    if !(max_norm > 0.0 && max_norm.is_finite()) {
        return Err(BarrierError::InvalidInput(format!(
            "max_norm must be positive and finite, got {max_norm}"
        )));
    }
    let n = body.dimension();
    let bound = n as f64;
    let base = loglaplace::eval(body, &DVector::zeros(n), config)?;

    let mut dirs: Vec<DVector<f64>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..directions {
        loop {
            let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            if v.norm() > 1e-12 {
                dirs.push(v.normalize());
                break;
            }
        }
    }
    if let Ok(vertices) = body.enumerate_vertices() {
        for v in vertices {
            let d = v - &base.mean;
            if d.norm() > 1e-12 {
                dirs.push(d.normalize());
            }
        }
    }

    // Exact mode reuses one triangulation across the whole sweep.
    let exact = match config.mode {
        loglaplace::EvalMode::MonteCarlo => None,
        _ => ExactEvaluator::new(body)
            .ok()
            .filter(|ev| ev.cell_count() <= loglaplace::AUTO_EXACT_MAX_CELLS
                || config.mode == loglaplace::EvalMode::Exact),
    };

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    let mut nu_max = 0.0f64;
    let mut pass = true;
    for d in &dirs {
        for j in 0..LADDER_RUNGS {
            let theta = d * (max_norm / f64::powi(2.0, j as i32));
            let evaluated = match &exact {
                Some(ev) => ev.eval(&theta),
                None => loglaplace::eval(body, &theta, config),
            };
            match evaluated {
                Ok(e) => {
                    let nu = quadratic_form(&e.covariance, &theta);
                    let std_err = nu_std_err(&e);
                    nu_max = nu_max.max(nu);
                    let tol = match std_err {
                        None => bound * 1e-6,
                        Some(se) => 3.0 * se,
                    };
                    if nu > bound + tol {
                        pass = false;
                    }
                    samples.push(ScSample { theta, nu, std_err });
                }
                Err(err) => failures.push((theta, err.to_string())),
            }
        }
    }

    Ok(ScReport {
        body_id: body.to_string(),
        samples,
        failures,
        nu_max,
        bound,
        pass,
    })
}

/// Finite-difference test of the defining self-concordance inequality
/// ∇³f*(x)[h,h,h] ≤ 2⟨h, ∇²f*(x)h⟩^{3/2}: the left side is a central
/// difference of s ↦ ⟨h, ∇²f*(x+s·h)h⟩. `fd_step` defaults to 1e−4 times
/// the interior margin along ±h; a caller-provided step must leave a
/// 10-step margin. Pass tolerance is 1e−3 relative, acknowledging the
/// O(step²) differencing error.
pub fn third_order_check(
    body: &ConvexBody,
    x: &DVector<f64>,
    h: &DVector<f64>,
    fd_step: Option<f64>,
) -> Result<(f64, f64, bool), BarrierError> {
    let n = body.dimension();
    if x.len() != n || h.len() != n {
        return Err(EvalError::DimensionMismatch {
            expected: n,
            got: if x.len() != n { x.len() } else { h.len() },
        }
        .into());
    }
    if h.norm() <= 1e-12 {
        return Err(BarrierError::InvalidInput("direction h is zero".into()));
    }
    if !body.contains(x, -INTERIOR_MARGIN) {
        return Err(BarrierError::NotInterior);
    }
    let h = h.normalize();

    // Interior margin along ±h from the chord through x.
    let (a, b) = body.halfspaces()?;
    let (t_lo, t_hi) = crate::geometry::chord_interval(&a, &b, x, &h)?;
    let margin = (-t_lo).min(t_hi);
    let step = match fd_step {
        Some(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(BarrierError::InvalidInput(format!(
                    "fd_step must be positive and finite, got {s}"
                )));
            }
            if 10.0 * s > margin {
                return Err(BarrierError::FdStepTooLarge {
                    step: s,
                    required: 10.0 * s,
                    margin,
                });
            }
            s
        }
        None => 1e-4 * margin,
    };

    let ev = ExactEvaluator::new(body)?;
    let q = |s: f64| -> Result<f64, BarrierError> {
        let point = x + &h * s;
        let bp = conjugate_with(&ev, body, &point, DEFAULT_CONJUGATE_TOL)?;
        Ok(quadratic_form(&bp.hessian, &h))
    };
    let lhs = (q(step)? - q(-step)?) / (2.0 * step);
    let rhs = 2.0 * q(0.0)?.max(0.0).powf(1.5);
    let pass = lhs <= rhs * (1.0 + 1e-3);
    Ok((lhs, rhs, pass))
}

/// Checks the entropy identity f*(x) = ∫ p_θ ln p_θ (θ = ∇f*(x)) by
/// adaptive quadrature; returns the absolute residual. Supports n ≤ 2.
pub fn entropy_identity_check(body: &ConvexBody, x: &DVector<f64>) -> Result<f64, BarrierError> {
    let n = body.dimension();
    if n > 2 {
        return Err(BarrierError::DimensionTooLarge(n));
    }
    let bp = conjugate(body, x, DEFAULT_CONJUGATE_TOL)?;
    let theta = &bp.theta;
    let f_value = theta.dot(x) - bp.value; // f(θ) recovered from duality

    let entropy = match n {
        1 => {
            let vertices = body.enumerate_vertices()?;
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            let t = theta[0];
            adaptive_simpson(
                &|y| {
                    let log_p = t * y - f_value;
                    log_p.exp() * log_p
                },
                lo,
                hi,
                1e-10,
            )
        }
        _ => {
            let cycle: Vec<[f64; 2]> = body
                .vertex_cycle_2d()?
                .iter()
                .map(|v| [v[0], v[1]])
                .collect();
            let polygon = Polygon::new(cycle);
            polygon.integral(
                &|y0, y1| {
                    let log_p = theta[0] * y0 + theta[1] * y1 - f_value;
                    log_p.exp() * log_p
                },
                1e-10,
            )
        }
    };
    Ok((bp.value - entropy).abs())
}
