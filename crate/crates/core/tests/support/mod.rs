//! Shared oracles and generators for the integration-test suites.
//!
//! Everything here recomputes the quantities under test by an independent
//! method: exact rational arithmetic for divided differences, tensor
//! Gauss-Legendre quadrature (through a Duffy substitution) for simplex
//! integrals, and closed-form volumes for generated bodies. None of it
//! shares code with the library paths being checked.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use entropic_barrier::geometry::{ConvexBody, SimplexCell};

// ---------------------------------------------------------------------------
// Exact divided differences of the exponential
// ---------------------------------------------------------------------------

/// Taylor degree beyond the node count. For nodes in [-15, 15] the
/// truncation error is below e^{-70} relative to the divided difference,
/// far under double precision.
const TAYLOR_EXTRA: usize = 110;

/// Divided difference of exp over the given nodes (repeats allowed),
/// computed in exact integer arithmetic on the Taylor polynomial of degree
/// `nodes + TAYLOR_EXTRA` and rounded to f64 once at the end.
///
/// Uses dd[x^m](y_0..y_k) = h_{m-k}(y_0..y_k), the complete homogeneous
/// symmetric polynomial, so confluent nodes need no special casing. The
/// nodes are scaled by a common power of two so the whole computation is
/// integer; no rational reductions happen until the final conversion.
pub fn dd_exp_oracle(ys: &[f64]) -> f64 {
    assert!(!ys.is_empty());
    assert!(ys.iter().all(|y| y.is_finite() && y.abs() <= 15.0));
    let k = ys.len() - 1;
    let d_max = TAYLOR_EXTRA;

    // Common power-of-two denominator: y_i = n_i / 2^e exactly.
    let mut e = 64u32;
    let exact = |y: f64, e: u32| -> Option<BigInt> {
        let r = BigRational::from_float(y).expect("finite");
        let scaled = r * BigRational::from_integer(BigInt::one() << e);
        scaled.is_integer().then(|| scaled.to_integer())
    };
    let nodes: Vec<BigInt> = loop {
        let attempt: Option<Vec<BigInt>> = ys.iter().map(|&y| exact(y, e)).collect();
        match attempt {
            Some(v) => break v,
            None => e *= 2,
        }
    };

    // h[d] carries an implicit denominator 2^{e·d}.
    let mut h: Vec<BigInt> = vec![BigInt::zero(); d_max + 1];
    h[0] = BigInt::one();
    for w in &nodes {
        for m in 1..=d_max {
            let add = w * &h[m - 1];
            h[m] += add;
        }
    }

    // Sum h_d / (k+d)! over a common denominator 2^{e·d_max} (k+d_max)!.
    let mut numerator = BigInt::zero();
    // tail_factorial = (k + d_max)! / (k + d)!, built from d = d_max down.
    let mut tail_factorial = BigInt::one();
    for d in (0..=d_max).rev() {
        let scale = BigInt::one() << (e as usize * (d_max - d));
        numerator += &h[d] * &tail_factorial * scale;
        if d > 0 {
            tail_factorial *= BigInt::from(k + d);
        }
    }
    let mut denominator = BigInt::one() << (e as usize * d_max);
    for m in 1..=(k + d_max) {
        denominator *= BigInt::from(m);
    }
    big_ratio_to_f64(&numerator, &denominator)
}

/// num/den as f64 (den > 0), via a 110-bit integer quotient plus an exact
/// power-of-two rescale; accurate to well under one ulp of headroom.
fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(den.is_positive());
    if num.is_zero() {
        return 0.0;
    }
    let shift: i64 = 110 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().expect("110-bit quotient fits");
    q * 2f64.powi(-shift as i32)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre tensor quadrature over simplices (n <= 3)
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    // Roots of P_n on [-1, 1] by Newton iteration on the recurrence.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0f64, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature points of the reference simplex {u >= 0, sum u <= 1} in
/// dimension n (1..3), as (barycentric lambda of length n+1, weight),
/// via the Duffy substitution from the unit cube.
fn reference_simplex_rule(n: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let gl = gauss_legendre_unit(order);
    let mut out = Vec::new();
    match n {
        1 => {
            for &(s, w) in &gl {
                out.push((vec![1.0 - s, s], w));
            }
        }
        2 => {
            for &(s1, w1) in &gl {
                for &(s2, w2) in &gl {
                    let u = [s1 * (1.0 - s2), s1 * s2];
                    let jac = s1;
                    out.push((vec![1.0 - u[0] - u[1], u[0], u[1]], w1 * w2 * jac));
                }
            }
        }
        3 => {
            for &(s1, w1) in &gl {
                for &(s2, w2) in &gl {
                    for &(s3, w3) in &gl {
                        let u = [s1 * (1.0 - s2), s1 * s2 * (1.0 - s3), s1 * s2 * s3];
                        let jac = s1 * s1 * s2;
                        out.push((
                            vec![1.0 - u[0] - u[1] - u[2], u[0], u[1], u[2]],
                            w1 * w2 * w3 * jac,
                        ));
                    }
                }
            }
        }
        _ => panic!("quadrature oracle supports n <= 3"),
    }
    out
}

/// Independent computation of the exponential integral and barycentric
/// moments over a simplex cell: (∫ e^{θ·x} dx, E[λ_i], E[λ_i λ_j]).
pub fn simplex_moments_oracle(
    cell: &SimplexCell,
    theta: &DVector<f64>,
    order: usize,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let n = theta.len();
    let k = cell.vertices.len();
    assert_eq!(k, n + 1);
    let rule = reference_simplex_rule(n, order);
    // Reference-to-cell volume scale: det factor = n! * vol(cell).
    let scale = cell.volume * (1..=n).map(|m| m as f64).product::<f64>();
    let dots: Vec<f64> = cell.vertices.iter().map(|v| theta.dot(v)).collect();

    let mut total = 0.0;
    let mut first = vec![0.0; k];
    let mut second = vec![0.0; k * k];
    for (lambda, w) in &rule {
        let y: f64 = lambda.iter().zip(&dots).map(|(l, d)| l * d).sum();
        let f = w * y.exp();
        total += f;
        for i in 0..k {
            first[i] += f * lambda[i];
            for j in 0..k {
                second[i * k + j] += f * lambda[i] * lambda[j];
            }
        }
    }
    let integral = scale * total;
    let lambda_mean = DVector::from_iterator(k, first.iter().map(|v| v / total));
    let lambda_second = DMatrix::from_fn(k, k, |i, j| second[i * k + j] / total);
    (integral, lambda_mean, lambda_second)
}

// ---------------------------------------------------------------------------
// Random bodies with known ground truth
// ---------------------------------------------------------------------------

pub fn random_box(n: usize, rng: &mut ChaCha8Rng) -> (ConvexBody, f64) {
    let lo = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let hi = DVector::from_fn(n, |i, _| lo[i] + rng.random_range(0.3..2.5));
    let volume = (&hi - &lo).iter().product();
    (ConvexBody::new_box(lo, hi).expect("valid box"), volume)
}

pub fn random_simplex(n: usize, rng: &mut ChaCha8Rng) -> (ConvexBody, f64) {
    loop {
        let vertices: Vec<DVector<f64>> = (0..=n)
            .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0)))
            .collect();
        if let Ok(cell) = SimplexCell::new(vertices.clone()) {
            if cell.volume > 0.05 {
                return (
                    ConvexBody::new_simplex(vertices).expect("valid simplex"),
                    cell.volume,
                );
            }
        }
    }
}

/// A bounded random H-polytope: a box shell plus `extra` random cuts that
/// keep the origin strictly interior.
pub fn random_hpolytope(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> ConvexBody {
    let m = 2 * n + extra;
    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    for i in 0..n {
        a[(2 * i, i)] = 1.0;
        b[2 * i] = rng.random_range(0.8..1.8);
        a[(2 * i + 1, i)] = -1.0;
        b[2 * i + 1] = rng.random_range(0.8..1.8);
    }
    for r in 0..extra {
        let dir = random_unit_vector(n, rng);
        for j in 0..n {
            a[(2 * n + r, j)] = dir[j];
        }
        b[2 * n + r] = rng.random_range(0.6..1.5);
    }
    ConvexBody::new_hpolytope(a, b).expect("bounded with interior")
}

/// A rotated unit cube as a V-polytope, with its corner list. Volume 1.
pub fn random_rotated_cube(n: usize, rng: &mut ChaCha8Rng) -> (ConvexBody, Vec<DVector<f64>>) {
    let gaussian = DMatrix::from_fn(n, n, |_, _| standard_normal(rng));
    let rot = gaussian.qr().q();
    let corners: Vec<DVector<f64>> = (0..1usize << n)
        .map(|mask| {
            let corner = DVector::from_fn(n, |i, _| ((mask >> i) & 1) as f64);
            &rot * corner
        })
        .collect();
    let body = ConvexBody::new_vpolytope(corners.clone()).expect("valid vpolytope");
    (body, corners)
}

pub fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| standard_normal(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; avoids pulling a distributions crate into the tests.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A point strictly inside the body: the Chebyshev center pushed a random
/// sub-radius distance in a random direction.
pub fn random_interior_point(body: &ConvexBody, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let (center, radius) = body.chebyshev_center().expect("nonempty interior");
    let dir = random_unit_vector(body.dimension(), rng);
    let step: f64 = rng.random_range(0.0..0.85);
    &center + dir * (step * radius)
}

/// Shoelace area of a 2-D body from its vertex cycle.
pub fn shoelace_area(body: &ConvexBody) -> f64 {
    let cycle = body.vertex_cycle_2d().expect("2-D body");
    let k = cycle.len();
    let mut twice = 0.0;
    for i in 0..k {
        let p = &cycle[i];
        let q = &cycle[(i + 1) % k];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    twice.abs() / 2.0
}
