//! Numerical verification of the variance inequalities behind the barrier's
//! optimality: the varentropy bound var_μ V ≤ n for log-concave μ ∝ e^{−V},
//! the dimensional Brascamp–Lieb inequality
//! var_μ g ≤ E⟨∇g, (∇²V)⁻¹∇g⟩ − cov(g,V)²/(n − var V) and its classical
//! form, the 1-D Hörmander L² identity for the generator
//! ℒu = −u″ + V′u′, the tensorization identity f*_{K×K′} = f*_K + f*_{K′},
//! and the dimension-amplification arithmetic min_k ν(kn)/k.
//!
//! Deterministic estimators use adaptive quadrature (1-D potentials, plus a
//! separable route for product Gaussians) or the exact polytope evaluator
//! (tilted uniforms, whose variance functionals are moments of p_θ). Monte
//! Carlo estimators report batch-means standard errors and pass at 3σ.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::barrier::{self, BarrierError};
use crate::geometry::{ConvexBody, GeometryError};
use crate::loglaplace::{self, EvalError};
use crate::quadrature::adaptive_simpson;
use crate::sampler::{self, SamplerConfig, SamplerError};

/// Deterministic pass tolerance on inequality slack.
const QUAD_TOL: f64 = 1e-8;
/// Absolute tolerance for each quadrature moment.
const MOMENT_TOL: f64 = 1e-10;
/// Effective support half-width used to integrate Gaussian potentials; the
/// neglected tail mass is below 1e-31.
const GAUSSIAN_DOMAIN: f64 = 12.0;
/// Hörmander boundary-flux gate: beyond this the identity is not
/// applicable on the given domain.
const BOUNDARY_GATE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum InequalityError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("potential Hessian is not positive at x = {x}")]
    SingularHessian { x: f64 },
    #[error("degenerate denominator: var V = {var_v} within 1e-12 of n = {n}")]
    DegenerateDenominator { var_v: f64, n: f64 },
    #[error("boundary flux {estimate:.3e} exceeds {BOUNDARY_GATE:.0e}; domain too narrow for the identity")]
    BoundaryFlux { estimate: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A 1-D strictly convex potential with closed-form derivatives on [a, b].
#[derive(Debug, Clone)]
pub struct Custom1D {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub v: fn(f64) -> f64,
    pub dv: fn(f64) -> f64,
    pub ddv: fn(f64) -> f64,
}

/// A log-concave reference measure μ ∝ e^{−V}.
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    /// V(x) = −⟨θ,x⟩ on the body K (the exponential family p_θ).
    TiltedUniform { body: ConvexBody, theta: DVector<f64> },
    /// Standard normal on R^dim: V(x) = ‖x‖²/2 + (dim/2)·ln 2π.
    Gaussian { dim: usize },
    Custom1D(Custom1D),
}

impl PotentialSpec {
    pub fn dimension(&self) -> usize {
        match self {
            PotentialSpec::TiltedUniform { body, .. } => body.dimension(),
            PotentialSpec::Gaussian { dim } => *dim,
            PotentialSpec::Custom1D(_) => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            PotentialSpec::TiltedUniform { body, theta } => {
                let t: Vec<String> = theta.iter().map(|v| format!("{v}")).collect();
                format!("tilted-uniform({body}, theta=[{}])", t.join(","))
            }
            PotentialSpec::Gaussian { dim } => format!("gaussian(n={dim})"),
            PotentialSpec::Custom1D(c) => format!("{}[{},{}]", c.name, c.a, c.b),
        }
    }
}

/// 1-D test functions g with closed-form derivatives.
#[derive(Debug, Clone)]
pub enum TestFunctionSpec {
    /// g(x) = a·x
    Linear { a: f64 },
    /// g(x) = q·x² + b·x
    Quadratic { q: f64, b: f64 },
    /// g(x) = sin(freq·x)
    Sine { freq: f64 },
    /// g = V itself.
    PotentialItself,
}

impl TestFunctionSpec {
    pub fn name(&self) -> String {
        match self {
            TestFunctionSpec::Linear { a } => format!("linear(a={a})"),
            TestFunctionSpec::Quadratic { q, b } => format!("quadratic(q={q},b={b})"),
            TestFunctionSpec::Sine { freq } => format!("sine(freq={freq})"),
            TestFunctionSpec::PotentialItself => "potential-itself".into(),
        }
    }

    /// (g, g′, g″) at x, resolving `PotentialItself` against `pot`.
    fn eval(&self, pot: &Potential1D, x: f64) -> (f64, f64, f64) {
        match self {
            TestFunctionSpec::Linear { a } => (a * x, *a, 0.0),
            TestFunctionSpec::Quadratic { q, b } => (q * x * x + b * x, 2.0 * q * x + b, 2.0 * q),
            TestFunctionSpec::Sine { freq } => {
                let s = (freq * x).sin();
                (s, freq * (freq * x).cos(), -freq * freq * s)
            }
            TestFunctionSpec::PotentialItself => ((pot.v)(x), (pot.dv)(x), (pot.ddv)(x)),
        }
    }
}

/// How to estimate the moments of a check.
#[derive(Debug, Clone, Copy)]
pub enum Estimator {
    /// Adaptive quadrature (1-D and separable-Gaussian potentials) or the
    /// exact polytope evaluator (tilted uniforms). Deterministic.
    Quadrature,
    Mc { samples: usize, seed: u64 },
}

/// Outcome of one inequality instance: lhs ≤ rhs claimed, slack = rhs − lhs,
/// pass iff slack ≥ −tol with tol = 1e−8 (deterministic) or 3·std_err (MC).
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Named intermediate quantities (e.g. bl_form, cov_gv, var_v).
    pub terms: Vec<(String, f64)>,
    pub slack: f64,
    pub std_err: Option<f64>,
    pub pass: bool,
}

fn report(
    name: String,
    lhs: f64,
    rhs: f64,
    terms: Vec<(String, f64)>,
    std_err: Option<f64>,
) -> InequalityReport {
    let slack = rhs - lhs;
    let tol = match std_err {
        None => QUAD_TOL,
        Some(se) => 3.0 * se,
    };
    InequalityReport {
        name,
        lhs,
        rhs,
        terms,
        slack,
        std_err,
        pass: slack >= -tol,
    }
}

// ---------------------------------------------------------------------------
// 1-D quadrature plumbing
// ---------------------------------------------------------------------------

struct Potential1D {
    a: f64,
    b: f64,
    v: fn(f64) -> f64,
    dv: fn(f64) -> f64,
    ddv: fn(f64) -> f64,
}

fn gaussian_1d() -> Potential1D {
    Potential1D {
        a: -GAUSSIAN_DOMAIN,
        b: GAUSSIAN_DOMAIN,
        v: |x| 0.5 * x * x + 0.5 * (2.0 * std::f64::consts::PI).ln(),
        dv: |x| x,
        ddv: |_| 1.0,
    }
}

fn potential_1d(spec: &PotentialSpec) -> Option<Potential1D> {
    match spec {
        PotentialSpec::Gaussian { dim: 1 } => Some(gaussian_1d()),
        PotentialSpec::Custom1D(c) => Some(Potential1D {
            a: c.a,
            b: c.b,
            v: c.v,
            dv: c.dv,
            ddv: c.ddv,
        }),
        _ => None,
    }
}

impl Potential1D {
    /// ∫_a^b h over a fixed 16-panel partition, each panel adaptive. The
    /// partition guarantees initial quadrature nodes inside the bulk of the
    /// measure even on wide domains where the integrand vanishes at the
    /// endpoints and midpoint alike.
    fn integrate<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        const PANELS: usize = 16;
        let width = (self.b - self.a) / PANELS as f64;
        (0..PANELS)
            .map(|k| {
                let lo = self.a + k as f64 * width;
                adaptive_simpson(&|x| h(x), lo, lo + width, MOMENT_TOL / PANELS as f64)
            })
            .sum()
    }

    /// ∫_a^b e^{−V}.
    fn mass(&self) -> f64 {
        let v = self.v;
        self.integrate(|x| (-v(x)).exp())
    }

    /// E_μ[h] for μ ∝ e^{−V} on [a,b].
    fn expect<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        let v = self.v;
        self.integrate(|x| h(x) * (-v(x)).exp()) / self.mass()
    }

    /// Reject potentials whose second derivative is not strictly positive;
    /// scanned on a fine grid since quadrature cannot fail mid-integrand.
    fn require_convex(&self) -> Result<(), InequalityError> {
        for k in 0..=2000 {
            let x = self.a + (self.b - self.a) * k as f64 / 2000.0;
            if !((self.ddv)(x) > 0.0) {
                return Err(InequalityError::SingularHessian { x });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Varentropy: var_μ V ≤ n
// ---------------------------------------------------------------------------

/// Checks Theorem-4-style varentropy: for log-concave μ ∝ e^{−V} on R^n,
/// var_μ V ≤ n.
pub fn varentropy_check(
    mu: &PotentialSpec,
    estimator: &Estimator,
) -> Result<InequalityReport, InequalityError> {
    let n = mu.dimension() as f64;
    let name = format!("varentropy: {}", mu.name());
    let (var_v, std_err) = match (mu, estimator) {
        (PotentialSpec::TiltedUniform { body, theta }, Estimator::Quadrature) => {
            // V = −⟨θ,x⟩, so var V = θᵀ (cov p_θ) θ, an exact moment.
            let e = loglaplace::eval_exact(body, theta)?;
            (theta.dot(&(&e.covariance * theta)), None)
        }
        (PotentialSpec::TiltedUniform { body, theta }, Estimator::Mc { samples, seed }) => {
            let cfg = SamplerConfig {
                seed: *seed,
                ..SamplerConfig::default()
            };
            let pts = sampler::sample(body, theta, *samples, &cfg)?;
            let values: Vec<f64> = pts.iter().map(|x| -theta.dot(x)).collect();
            let (var, se) = sampler::scalar_variance_stats(&values);
            (var, Some(se))
        }
        (PotentialSpec::Gaussian { dim }, Estimator::Quadrature) => {
            // Coordinates are independent, so var V = n · var(t²/2).
            let g = gaussian_1d();
            let m1 = g.expect(|t| 0.5 * t * t);
            let m2 = g.expect(|t| 0.25 * t.powi(4));
            (*dim as f64 * (m2 - m1 * m1), None)
        }
        (PotentialSpec::Gaussian { dim }, Estimator::Mc { samples, seed }) => {
            let values = gaussian_potential_samples(*dim, *samples, *seed);
            let (var, se) = sampler::scalar_variance_stats(&values);
            (var, Some(se))
        }
        (PotentialSpec::Custom1D(_), Estimator::Quadrature) => {
            let p = potential_1d(mu).expect("custom potential is 1-D");
            let v = p.v;
            let m1 = p.expect(v);
            let m2 = p.expect(|x| v(x) * v(x));
            (m2 - m1 * m1, None)
        }
        (PotentialSpec::Custom1D(_), Estimator::Mc { .. }) => {
            return Err(InequalityError::InvalidInput(
                "Monte Carlo estimation is not supported for Custom1D potentials; use Quadrature"
                    .into(),
            ))
        }
    };
    let terms = vec![("var_v".into(), var_v)];
    Ok(report(name, var_v, n, terms, std_err))
}

fn gaussian_potential_samples(dim: usize, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = 0.5 * dim as f64 * (2.0 * std::f64::consts::PI).ln();
    (0..samples)
        .map(|_| {
            let sq: f64 = (0..dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    z * z
                })
                .sum();
            0.5 * sq + c
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Brascamp–Lieb: classical and dimensional
// ---------------------------------------------------------------------------

struct BlMoments {
    var_g: f64,
    bl_form: f64,
    cov_gv: f64,
    var_v: f64,
    se: Option<BlErrors>,
}

struct BlErrors {
    var_g: f64,
    bl_form: f64,
    cov_gv: f64,
    var_v: f64,
}

fn bl_moments(
    mu: &PotentialSpec,
    g: &TestFunctionSpec,
    estimator: &Estimator,
) -> Result<BlMoments, InequalityError> {
    match mu {
        PotentialSpec::TiltedUniform { .. } => Err(InequalityError::InvalidInput(
            "dimensional Brascamp-Lieb needs a strictly convex potential; tilted uniforms are linear"
                .into(),
        )),
        PotentialSpec::Gaussian { dim } if *dim > 1 => {
            if !matches!(g, TestFunctionSpec::PotentialItself) {
                return Err(InequalityError::InvalidInput(format!(
                    "Gaussian(n={dim}) supports only g = PotentialItself (separable route); \
                     use a 1-D potential for other test functions"
                )));
            }
            match estimator {
                Estimator::Quadrature => {
                    // Separability: var V = n·var(t²/2), E⟨∇V, (∇²V)⁻¹∇V⟩ = n·E[t²].
                    let n = *dim as f64;
                    let g1 = gaussian_1d();
                    let m1 = g1.expect(|t| 0.5 * t * t);
                    let m2 = g1.expect(|t| 0.25 * t.powi(4));
                    let var_v = n * (m2 - m1 * m1);
                    let bl_form = n * g1.expect(|t| t * t);
                    Ok(BlMoments {
                        var_g: var_v,
                        bl_form,
                        cov_gv: var_v,
                        var_v,
                        se: None,
                    })
                }
                Estimator::Mc { samples, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let c = 0.5 * *dim as f64 * (2.0 * std::f64::consts::PI).ln();
                    let mut vs = Vec::with_capacity(*samples);
                    let mut grads = Vec::with_capacity(*samples);
                    for _ in 0..*samples {
                        let z: Vec<f64> =
                            (0..*dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                        let sq: f64 = z.iter().map(|t| t * t).sum();
                        vs.push(0.5 * sq + c);
                        grads.push(sq); // ‖∇V‖² with (∇²V)⁻¹ = I
                    }
                    let (var_v, se_var) = sampler::scalar_variance_stats(&vs);
                    let (bl_form, se_bl) = sampler::scalar_batch_stats(&grads);
                    Ok(BlMoments {
                        var_g: var_v,
                        bl_form,
                        cov_gv: var_v,
                        var_v,
                        se: Some(BlErrors {
                            var_g: se_var,
                            bl_form: se_bl,
                            cov_gv: se_var,
                            var_v: se_var,
                        }),
                    })
                }
            }
        }
        _ => {
            let p = potential_1d(mu).ok_or_else(|| {
                InequalityError::InvalidInput(format!(
                    "unsupported potential for Brascamp-Lieb: {}",
                    mu.name()
                ))
            })?;
            if matches!(estimator, Estimator::Mc { .. }) {
                return Err(InequalityError::InvalidInput(
                    "Monte Carlo estimation is not supported for 1-D potentials; use Quadrature"
                        .into(),
                ));
            }
            p.require_convex()?;
            let gv = |x: f64| g.eval(&p, x);
            let v = p.v;
            let e_g = p.expect(|x| gv(x).0);
            let e_g2 = p.expect(|x| gv(x).0.powi(2));
            let e_v = p.expect(v);
            let e_v2 = p.expect(|x| v(x) * v(x));
            let e_gv = p.expect(|x| gv(x).0 * v(x));
            let bl_form = p.expect(|x| gv(x).1.powi(2) / (p.ddv)(x));
            Ok(BlMoments {
                var_g: e_g2 - e_g * e_g,
                bl_form,
                cov_gv: e_gv - e_g * e_v,
                var_v: e_v2 - e_v * e_v,
                se: None,
            })
        }
    }
}

/// The dimensional Brascamp–Lieb inequality:
/// var_μ g ≤ E⟨∇g, (∇²V)⁻¹∇g⟩ − cov_μ(g,V)²/(n − var_μ V).
pub fn dimensional_bl_check(
    mu: &PotentialSpec,
    g: &TestFunctionSpec,
    estimator: &Estimator,
) -> Result<InequalityReport, InequalityError> {
    let n = mu.dimension() as f64;
    let m = bl_moments(mu, g, estimator)?;
    if m.var_v >= n - 1e-12 {
        return Err(InequalityError::DegenerateDenominator { var_v: m.var_v, n });
    }
    let improvement = m.cov_gv * m.cov_gv / (n - m.var_v);
    let rhs = m.bl_form - improvement;
    let std_err = m.se.as_ref().map(|se| {
        let denom = n - m.var_v;
        se.var_g
            + se.bl_form
            + 2.0 * m.cov_gv.abs() / denom * se.cov_gv
            + (m.cov_gv / denom).powi(2) * se.var_v
    });
    let terms = vec![
        ("var_g".into(), m.var_g),
        ("bl_form".into(), m.bl_form),
        ("improvement".into(), improvement),
        ("cov_gv".into(), m.cov_gv),
        ("var_v".into(), m.var_v),
    ];
    Ok(report(
        format!("dimensional-bl: {} with {}", mu.name(), g.name()),
        m.var_g,
        rhs,
        terms,
        std_err,
    ))
}

/// The classical Brascamp–Lieb inequality var_μ g ≤ E⟨∇g, (∇²V)⁻¹∇g⟩.
/// Also exposes the dimensional right-hand side in `terms`; the improvement
/// term is a square over a positive denominator, so rhs_classical ≥
/// rhs_dimensional always.
pub fn classical_bl_check(
    mu: &PotentialSpec,
    g: &TestFunctionSpec,
    estimator: &Estimator,
) -> Result<InequalityReport, InequalityError> {
    let n = mu.dimension() as f64;
    let m = bl_moments(mu, g, estimator)?;
    if m.var_v >= n - 1e-12 {
        return Err(InequalityError::DegenerateDenominator { var_v: m.var_v, n });
    }
    let improvement = m.cov_gv * m.cov_gv / (n - m.var_v);
    let rhs_dimensional = m.bl_form - improvement;
    debug_assert!(m.bl_form >= rhs_dimensional);
    let std_err = m.se.as_ref().map(|se| se.var_g + se.bl_form);
    let terms = vec![
        ("var_g".into(), m.var_g),
        ("bl_form".into(), m.bl_form),
        ("rhs_dimensional".into(), rhs_dimensional),
        ("cov_gv".into(), m.cov_gv),
        ("var_v".into(), m.var_v),
    ];
    Ok(report(
        format!("classical-bl: {} with {}", mu.name(), g.name()),
        m.var_g,
        m.bl_form,
        terms,
        std_err,
    ))
}

// ---------------------------------------------------------------------------
// Hörmander identity
// ---------------------------------------------------------------------------

/// Both sides of E[(ℒu)²] = E[V″u′²] + E[u″²] for ℒu = −u″ + V′u′, with
/// the boundary fluxes the integration by parts drops. `residual` is
/// relative; `pass` corresponds to residual ≤ 1e−6.
#[derive(Debug, Clone)]
pub struct HormanderReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub boundary: f64,
    pub pass: bool,
}

/// Verifies the 1-D Hörmander L² identity for μ ∝ e^{−V} on [a,b] by
/// adaptive quadrature. The integration by parts behind the identity drops
/// the fluxes [−u′·(ℒu)·e^{−V}] and [−u′·u″·e^{−V}] at the endpoints; both
/// are estimated, and a combined flux above 1e−8 is an error (the domain is
/// too narrow for the identity to hold there).
pub fn hormander_identity_check(
    v: &Custom1D,
    u: &TestFunctionSpec,
) -> Result<HormanderReport, InequalityError> {
    let p = Potential1D {
        a: v.a,
        b: v.b,
        v: v.v,
        dv: v.dv,
        ddv: v.ddv,
    };
    let name = format!("hormander: {}[{},{}] with {}", v.name, v.a, v.b, u.name());
    let gen = |x: f64| {
        let (_, du, ddu) = u.eval(&p, x);
        -ddu + (p.dv)(x) * du
    };

    let vv = p.v;
    let mass = p.mass();
    let flux = |x: f64| {
        let (_, du, ddu) = u.eval(&p, x);
        let w = (-vv(x)).exp() / mass;
        ((-du * gen(x) * w).abs(), (-du * ddu * w).abs())
    };
    let (f1a, f2a) = flux(p.a);
    let (f1b, f2b) = flux(p.b);
    let boundary = f1a + f2a + f1b + f2b;
    if boundary > BOUNDARY_GATE {
        return Err(InequalityError::BoundaryFlux { estimate: boundary });
    }

    let lhs = p.expect(|x| gen(x).powi(2));
    let rhs = p.expect(|x| {
        let (_, du, ddu) = u.eval(&p, x);
        (p.ddv)(x) * du * du + ddu * ddu
    });
    let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
    Ok(HormanderReport {
        name,
        lhs,
        rhs,
        residual,
        boundary,
        pass: residual <= 1e-6,
    })
}

// ---------------------------------------------------------------------------
// Tensorization and amplification
// ---------------------------------------------------------------------------

/// Checks f*_{K×K′}(x,x′) = f*_K(x) + f*_{K′}(x′). The left side is forced
/// through an H-polytope re-representation of the product, so it is
/// conjugated against an independent generic triangulation rather than the
/// factorwise product evaluator; the identity is then a genuine
/// cross-check. Returns |lhs − rhs|.
pub fn tensorization_check(
    k: &ConvexBody,
    k2: &ConvexBody,
    x: &DVector<f64>,
    x2: &DVector<f64>,
) -> Result<f64, InequalityError> {
    let tol = 1e-11;
    let product = ConvexBody::product(k.clone(), k2.clone()).to_hpolytope()?;
    let joint = DVector::from_iterator(
        x.len() + x2.len(),
        x.iter().chain(x2.iter()).cloned(),
    );
    let lhs = barrier::conjugate(&product, &joint, tol)?.value;
    let rhs = barrier::conjugate(k, x, tol)?.value + barrier::conjugate(k2, x2, tol)?.value;
    Ok((lhs - rhs).abs())
}

/// The amplification arithmetic of the tensorization argument: given a
/// bound ν(m) valid in every dimension m, the product construction yields
/// the barrier parameter min_{1 ≤ k ≤ k_max} ν(k·n)/k in dimension n.
/// Nonincreasing in k_max; never exceeds ν(n).
pub fn amplify_nu<F: Fn(usize) -> f64>(nu: F, n: usize, k_max: usize) -> f64 {
    (1..=k_max.max(1))
        .map(|k| nu(k * n) / k as f64)
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Catalogs
// ---------------------------------------------------------------------------

fn quartic_potential() -> Custom1D {
    Custom1D {
        name: "quartic".into(),
        a: -3.0,
        b: 3.0,
        v: |x| x.powi(4) / 12.0 + 0.5 * x * x,
        dv: |x| x.powi(3) / 3.0 + x,
        ddv: |x| x * x + 1.0,
    }
}

fn cosh_potential(half_width: f64) -> Custom1D {
    Custom1D {
        name: "cosh".into(),
        a: -half_width,
        b: half_width,
        v: f64::cosh,
        dv: f64::sinh,
        ddv: f64::cosh,
    }
}

fn gaussian_custom(half_width: f64) -> Custom1D {
    Custom1D {
        name: "gaussian".into(),
        a: -half_width,
        b: half_width,
        v: |x| 0.5 * x * x,
        dv: |x| x,
        ddv: |_| 1.0,
    }
}

/// Varentropy test catalog: Gaussians checked by quadrature (n = 1, 2) and
/// Monte Carlo (n = 3, 5), tilted uniforms on polytopes (exact moments and
/// one MC cross-check), and the 1-D convex potentials.
pub fn varentropy_catalog() -> Vec<(PotentialSpec, Estimator)> {
    let box1 = ConvexBody::unit_box(1);
    let box2 = ConvexBody::unit_box(2);
    let simplex2 = ConvexBody::standard_simplex(2);
    vec![
        (PotentialSpec::Gaussian { dim: 1 }, Estimator::Quadrature),
        (PotentialSpec::Gaussian { dim: 2 }, Estimator::Quadrature),
        (
            PotentialSpec::Gaussian { dim: 3 },
            Estimator::Mc {
                samples: 200_000,
                seed: 11,
            },
        ),
        (
            PotentialSpec::Gaussian { dim: 5 },
            Estimator::Mc {
                samples: 200_000,
                seed: 12,
            },
        ),
        (
            PotentialSpec::TiltedUniform {
                body: box1.clone(),
                theta: DVector::from_vec(vec![1.0]),
            },
            Estimator::Quadrature,
        ),
        (
            PotentialSpec::TiltedUniform {
                body: box2.clone(),
                theta: DVector::from_vec(vec![2.0, -1.0]),
            },
            Estimator::Quadrature,
        ),
        (
            PotentialSpec::TiltedUniform {
                body: simplex2,
                theta: DVector::from_vec(vec![3.0, 1.0]),
            },
            Estimator::Quadrature,
        ),
        (
            PotentialSpec::TiltedUniform {
                body: box2,
                theta: DVector::zeros(2),
            },
            Estimator::Quadrature,
        ),
        (
            PotentialSpec::TiltedUniform {
                body: box1,
                theta: DVector::from_vec(vec![2.0]),
            },
            Estimator::Mc {
                samples: 30_000,
                seed: 13,
            },
        ),
        (
            PotentialSpec::Custom1D(quartic_potential()),
            Estimator::Quadrature,
        ),
        (
            PotentialSpec::Custom1D(cosh_potential(6.0)),
            Estimator::Quadrature,
        ),
    ]
}

/// The 12-case Brascamp–Lieb catalog: three strictly convex 1-D potentials
/// crossed with four test functions, all by quadrature.
pub fn bl_catalog() -> Vec<(PotentialSpec, TestFunctionSpec, Estimator)> {
    let potentials = [
        PotentialSpec::Gaussian { dim: 1 },
        PotentialSpec::Custom1D(quartic_potential()),
        PotentialSpec::Custom1D(cosh_potential(6.0)),
    ];
    let gs = [
        TestFunctionSpec::Linear { a: 1.0 },
        TestFunctionSpec::Quadratic { q: 1.0, b: 0.0 },
        TestFunctionSpec::Sine { freq: 1.0 },
        TestFunctionSpec::PotentialItself,
    ];
    let mut out = Vec::new();
    for p in &potentials {
        for g in &gs {
            out.push((p.clone(), g.clone(), Estimator::Quadrature));
        }
    }
    out
}

/// The 12-case Hörmander catalog: three potentials on domains wide enough
/// for negligible boundary flux, crossed with four test functions.
pub fn hormander_catalog() -> Vec<(Custom1D, TestFunctionSpec)> {
    let potentials = [
        gaussian_custom(12.0),
        Custom1D {
            name: "gaussian-plus-quartic".into(),
            a: -10.0,
            b: 10.0,
            v: |x| 0.5 * x * x + x.powi(4) / 12.0,
            dv: |x| x + x.powi(3) / 3.0,
            ddv: |x| 1.0 + x * x,
        },
        cosh_potential(8.0),
    ];
    let us = [
        TestFunctionSpec::Linear { a: 1.0 },
        TestFunctionSpec::Quadratic { q: 1.0, b: 0.0 },
        TestFunctionSpec::Sine { freq: 1.0 },
        TestFunctionSpec::PotentialItself,
    ];
    let mut out = Vec::new();
    for p in &potentials {
        for u in &us {
            out.push((p.clone(), u.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::dvector;

    #[test]
    fn varentropy_gaussian_quadrature() {
        for n in [1usize, 2] {
            let r = varentropy_check(&PotentialSpec::Gaussian { dim: n }, &Estimator::Quadrature)
                .unwrap();
            assert_relative_eq!(r.lhs, n as f64 / 2.0, epsilon = 1e-9);
            assert_eq!(r.rhs, n as f64);
            assert!(r.pass);
        }
    }

    #[test]
    fn varentropy_gaussian_mc() {
        let r = varentropy_check(
            &PotentialSpec::Gaussian { dim: 3 },
            &Estimator::Mc {
                samples: 100_000,
                seed: 5,
            },
        )
        .unwrap();
        let se = r.std_err.unwrap();
        assert!((r.lhs - 1.5).abs() <= 3.0 * se, "var {} se {se}", r.lhs);
        assert!(r.pass);
    }

    #[test]
    fn varentropy_tilted_box_matches_closed_form() {
        let r = varentropy_check(
            &PotentialSpec::TiltedUniform {
                body: ConvexBody::unit_box(1),
                theta: dvector![1.0],
            },
            &Estimator::Quadrature,
        )
        .unwrap();
        // var V = 1²·f″(1) = 1 − e/(e−1)².
        assert_relative_eq!(r.lhs, 0.07932640583319738, epsilon = 1e-10);
        assert!(r.pass);
    }

    #[test]
    fn varentropy_zero_tilt_is_zero() {
        let r = varentropy_check(
            &PotentialSpec::TiltedUniform {
                body: ConvexBody::unit_box(2),
                theta: dvector![0.0, 0.0],
            },
            &Estimator::Quadrature,
        )
        .unwrap();
        assert_abs_diff_eq!(r.lhs, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dimensional_bl_gaussian_equality_cases() {
        // g = x: var g = 1, BL form = 1, cov(g,V) = E[x·x²/2] = 0.
        let r = dimensional_bl_check(
            &PotentialSpec::Gaussian { dim: 1 },
            &TestFunctionSpec::Linear { a: 1.0 },
            &Estimator::Quadrature,
        )
        .unwrap();
        assert_relative_eq!(r.lhs, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.rhs, 1.0, epsilon = 1e-9);
        assert!(r.slack.abs() <= 1e-8 && r.pass);

        // g = V: var V = 1/2, E[(V′)²] = 1, improvement = (1/2)²/(1/2) = 1/2.
        let r = dimensional_bl_check(
            &PotentialSpec::Gaussian { dim: 1 },
            &TestFunctionSpec::PotentialItself,
            &Estimator::Quadrature,
        )
        .unwrap();
        assert_relative_eq!(r.lhs, 0.5, epsilon = 1e-9);
        assert_relative_eq!(r.rhs, 0.5, epsilon = 1e-9);
        assert!(r.slack.abs() <= 1e-8 && r.pass);
    }

    #[test]
    fn classical_bl_gaussian_quadratic() {
        // var(x²) = 2; E[(2x)²·1] = 4.
        let r = classical_bl_check(
            &PotentialSpec::Gaussian { dim: 1 },
            &TestFunctionSpec::Quadratic { q: 1.0, b: 0.0 },
            &Estimator::Quadrature,
        )
        .unwrap();
        assert_relative_eq!(r.lhs, 2.0, epsilon = 1e-8);
        assert_relative_eq!(r.rhs, 4.0, epsilon = 1e-8);
        assert_relative_eq!(r.slack, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn quartic_sine_has_positive_slack_and_ordering() {
        let mu = PotentialSpec::Custom1D(quartic_potential());
        let g = TestFunctionSpec::Sine { freq: 1.0 };
        let dim = dimensional_bl_check(&mu, &g, &Estimator::Quadrature).unwrap();
        let cls = classical_bl_check(&mu, &g, &Estimator::Quadrature).unwrap();
        assert!(dim.pass && dim.slack > 0.0, "slack {}", dim.slack);
        assert!(cls.slack >= dim.slack - 1e-12, "improvement must help");
    }

    #[test]
    fn rearranged_bound_on_gaussians() {
        // With g = V, the inequality rearranges to var V ≤ nQ/(n+Q) with
        // Q = E⟨∇V,(∇²V)⁻¹∇V⟩; Gaussians meet it with equality (both n/2).
        for n in [1usize, 2, 3] {
            let r = dimensional_bl_check(
                &PotentialSpec::Gaussian { dim: n },
                &TestFunctionSpec::PotentialItself,
                &Estimator::Quadrature,
            )
            .unwrap();
            let nf = n as f64;
            let q = r
                .terms
                .iter()
                .find(|(k, _)| k == "bl_form")
                .map(|(_, v)| *v)
                .unwrap();
            let var_v = r
                .terms
                .iter()
                .find(|(k, _)| k == "var_v")
                .map(|(_, v)| *v)
                .unwrap();
            let sharper = nf * q / (nf + q);
            assert!(var_v <= sharper + 1e-9);
            assert_relative_eq!(var_v, sharper, epsilon = 1e-8);
        }
    }

    #[test]
    fn tilted_uniform_rejected_for_bl() {
        let err = dimensional_bl_check(
            &PotentialSpec::TiltedUniform {
                body: ConvexBody::unit_box(1),
                theta: dvector![1.0],
            },
            &TestFunctionSpec::Linear { a: 1.0 },
            &Estimator::Quadrature,
        );
        assert!(matches!(err, Err(InequalityError::InvalidInput(_))));
    }

    #[test]
    fn hormander_gaussian_hand_cases() {
        let v = gaussian_custom(12.0);
        // u = x: ℒu = x, E[x²] = 1 = E[V″] + 0.
        let r = hormander_identity_check(&v, &TestFunctionSpec::Linear { a: 1.0 }).unwrap();
        assert_relative_eq!(r.lhs, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.rhs, 1.0, epsilon = 1e-9);
        assert!(r.residual <= 1e-9 && r.pass);
        // u = x²: ℒu = 2x² − 2, E[(2x²−2)²] = 8 = E[4x²] + E[4].
        let r = hormander_identity_check(&v, &TestFunctionSpec::Quadratic { q: 1.0, b: 0.0 })
            .unwrap();
        assert_relative_eq!(r.lhs, 8.0, epsilon = 1e-9);
        assert_relative_eq!(r.rhs, 8.0, epsilon = 1e-9);
        assert!(r.residual <= 1e-9);
        assert!(r.boundary < 1e-10);
    }

    #[test]
    fn hormander_narrow_domain_rejected() {
        // On [−1,1] the Gaussian flux at the endpoints is far from zero.
        let v = gaussian_custom(1.0);
        assert!(matches!(
            hormander_identity_check(&v, &TestFunctionSpec::Quadratic { q: 1.0, b: 0.0 }),
            Err(InequalityError::BoundaryFlux { .. })
        ));
    }

    #[test]
    fn hormander_catalog_passes() {
        for (v, u) in hormander_catalog() {
            let r = hormander_identity_check(&v, &u).unwrap();
            assert!(
                r.residual <= 1e-6,
                "{}: residual {}",
                r.name,
                r.residual
            );
        }
    }

    #[test]
    fn tensorization_boxes() {
        let b = ConvexBody::unit_box(1);
        // Centers: every term is 0.
        let r = tensorization_check(&b, &b, &dvector![0.5], &dvector![0.5]).unwrap();
        assert!(r <= 1e-9, "residual {r}");
        // Off-center, against the 1-D closed-form symmetry f*(0.7)+f*(0.3).
        let r = tensorization_check(&b, &b, &dvector![0.7], &dvector![0.3]).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        let f07 = barrier::conjugate(&b, &dvector![0.7], 1e-11).unwrap().value;
        let f03 = barrier::conjugate(&b, &dvector![0.3], 1e-11).unwrap().value;
        assert_relative_eq!(f07, f03, epsilon = 1e-9); // θ ↔ −θ symmetry
    }

    #[test]
    fn tensorization_simplex_box() {
        let r = tensorization_check(
            &ConvexBody::standard_simplex(2),
            &ConvexBody::unit_box(1),
            &dvector![0.2, 0.3],
            &dvector![0.6],
        )
        .unwrap();
        assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn amplification_arithmetic() {
        assert_abs_diff_eq!(amplify_nu(|m| m as f64, 4, 100), 4.0);
        let v = amplify_nu(|m| m as f64 + (m as f64).sqrt(), 4, 10_000);
        assert_relative_eq!(v, 4.0 + 2.0 / 100.0, epsilon = 1e-12);
        // Monotone nonincreasing in k_max, bounded by ν(n).
        let f = |m: usize| (1.0 + 1.0 / ((m as f64) + std::f64::consts::E).ln()) * m as f64;
        let mut prev = f64::INFINITY;
        for k_max in [1, 10, 100, 1000, 10_000] {
            let v = amplify_nu(f, 2, k_max);
            assert!(v <= prev + 1e-15);
            assert!(v <= f(2));
            prev = v;
        }
        // Limit value at k_max = 10⁴ is 2·(1 + 1/ln(2·10⁴)) ≈ 2.2019.
        assert!(prev > 2.0 && prev < 2.21, "approaches 2, got {prev}");
    }
}
