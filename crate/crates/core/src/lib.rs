//! Entropic barrier on convex polytopes.
//!
//! The log-Laplace transform of the uniform measure on a bounded polytope K,
//! f(theta) = ln ∫_K e^{<theta,x>} dx, is the log-partition function of the
//! exponential family supported on K. Its Fenchel conjugate f* is the
//! entropic barrier: a self-concordant barrier on the interior of K whose
//! parameter equals the dimension. This crate evaluates f and f* (values,
//! gradients, Hessians) exactly via simplicial divided differences or
//! stochastically via hit-and-run sampling, and ships numerical harnesses
//! for the variance inequalities behind the barrier's optimality: the
//! varentropy bound, the dimensional Brascamp-Lieb inequality, a 1-D
//! Hörmander-type identity, tensorization across products, and a
//! central-path LP solver with certified optimality gaps.
//!
//! Modules
//! - [`geometry`]: polytope representations, membership, vertices, cells.
//! - [`loglaplace`]: f(theta) and its first two derivatives.
//! - [`barrier`]: the conjugate f*, duality, self-concordance diagnostics.
//! - [`sampler`]: hit-and-run chains with exact exponential chord steps.
//! - [`inequalities`]: variance-inequality and identity verification.
//! - [`ipm`]: central-path linear optimization with gap certificates.
//! - [`quadrature`]: adaptive quadrature shared by the harnesses.

pub mod barrier;
pub mod geometry;
pub mod inequalities;
pub mod ipm;
pub mod loglaplace;
pub mod quadrature;
pub mod sampler;

pub use barrier::{
    barrier_eval, conjugate, entropy_identity_check, sc_parameter_at, sc_sweep,
    third_order_check, BarrierError, BarrierPoint, ScReport, ScSample,
};
pub use geometry::{ConvexBody, GeometryError, SimplexCell};
pub use inequalities::{
    amplify_nu, bl_catalog, classical_bl_check, dimensional_bl_check, hormander_catalog,
    hormander_identity_check, tensorization_check, varentropy_catalog, varentropy_check,
    Custom1D, Estimator, HormanderReport, InequalityError, InequalityReport, PotentialSpec,
    TestFunctionSpec,
};
pub use ipm::{
    central_path_point, exact_lp_oracle, solve_lp, CentralPathRecord, CentralPathTrace, IpmError,
};
pub use loglaplace::{
    divided_diff_exp, eval, eval_exact, eval_mc, integrate_exp_simplex, EvalConfig, EvalError,
    EvalMethod, EvalMode, ExactEvaluator, LogLaplaceEval,
};
pub use sampler::{chord_sample_1d, estimate_moments, sample, SamplerConfig, SamplerError};
