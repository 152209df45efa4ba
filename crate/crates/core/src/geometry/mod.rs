//! Bounded convex polytopes: membership, vertex enumeration, triangulation,
//! Chebyshev centers, and products.
//!
//! All bodies are full-dimensional and bounded by construction; degenerate
//! inputs are rejected rather than repaired. Half-space representations keep
//! their rows normalized to unit Euclidean norm, so a constraint slack is a
//! signed distance to the bounding hyperplane and tolerances are metric.
//!
//! Exact paths (vertex enumeration, triangulation) are guarded at desk scale
//! (`n <= 6`, `m <= 32`); larger instances must go through the Monte Carlo
//! evaluator instead.

mod lp;
mod triangulate;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute dedup tolerance for enumerated vertices (rows are unit-norm, so
/// this is a Euclidean scale; double-precision LP residuals sit well below it).
pub(crate) const VERTEX_DEDUP_TOL: f64 = 1e-9;
/// A vertex is considered to lie on a facet when its constraint slack is
/// below this.
pub(crate) const ACTIVE_TOL: f64 = 1e-8;
/// Feasibility slack allowed when screening candidate vertices.
pub(crate) const FEASIBILITY_TOL: f64 = 1e-9;
/// Desk-scale guards for exact combinatorial paths.
pub(crate) const MAX_EXACT_DIM: usize = 6;
pub(crate) const MAX_EXACT_ROWS: usize = 32;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("exact-path guard exceeded (n = {n}, m = {m}; limits n <= 6, m <= 32)")]
    DeskGuard { n: usize, m: usize },
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("malformed body JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("body JSON contains a non-finite number")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// One simplex of a triangulation: `n + 1` affinely independent vertices in
/// dimension `n`, with its volume `|det(v_1 - v_0, ..., v_n - v_0)| / n!`.
#[derive(Debug, Clone)]
pub struct SimplexCell {
    pub vertices: Vec<DVector<f64>>,
    pub volume: f64,
}

impl SimplexCell {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let n = vertices
            .first()
            .ok_or_else(|| GeometryError::Degenerate("cell with no vertices".into()))?
            .len();
        if vertices.len() != n + 1 {
            return Err(GeometryError::Degenerate(format!(
                "cell needs {} vertices in dimension {}, got {}",
                n + 1,
                n,
                vertices.len()
            )));
        }
        let mut diff = DMatrix::zeros(n, n);
        for (j, v) in vertices.iter().skip(1).enumerate() {
            diff.set_column(j, &(v - &vertices[0]));
        }
        let volume = diff.determinant().abs() / factorial(n);
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(GeometryError::Degenerate(
                "cell has zero volume (affinely dependent vertices)".into(),
            ));
        }
        Ok(SimplexCell { vertices, volume })
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A bounded convex polytope in one of several representations.
///
/// The `Box`, `Simplex` and `Product` forms keep structure that the exact
/// evaluator exploits (Kuhn subdivision, identity triangulation, factorwise
/// evaluation); `HPolytope` and `VPolytope` go through the generic
/// vertex-enumeration / centroid-fan path.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    Box {
        lo: DVector<f64>,
        hi: DVector<f64>,
    },
    Simplex {
        vertices: Vec<DVector<f64>>,
    },
    HPolytope {
        /// Constraint matrix with unit-norm rows; the body is `{x : a x <= b}`.
        a: DMatrix<f64>,
        b: DVector<f64>,
    },
    VPolytope {
        vertices: Vec<DVector<f64>>,
    },
    Product {
        left: Box<ConvexBody>,
        right: Box<ConvexBody>,
    },
}

impl ConvexBody {
    // ----- construction -------------------------------------------------

    pub fn new_box(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(GeometryError::InvalidBody("box in dimension 0".into()));
        }
        if !all_finite(lo.iter().chain(hi.iter())) {
            return Err(GeometryError::NonFinite);
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| !(l < h)) {
            return Err(GeometryError::InvalidBody(
                "box needs lo < hi componentwise".into(),
            ));
        }
        Ok(ConvexBody::Box { lo, hi })
    }

    /// Axis-aligned unit cube `[0,1]^n`.
    pub fn unit_box(n: usize) -> Self {
        ConvexBody::new_box(DVector::zeros(n), DVector::from_element(n, 1.0))
            .expect("unit box is valid")
    }

    pub fn new_simplex(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let n = vertices
            .first()
            .ok_or_else(|| GeometryError::InvalidBody("simplex with no vertices".into()))?
            .len();
        if n == 0 {
            return Err(GeometryError::InvalidBody("simplex in dimension 0".into()));
        }
        if vertices.len() != n + 1 {
            return Err(GeometryError::InvalidBody(format!(
                "simplex in dimension {} needs {} vertices, got {}",
                n,
                n + 1,
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(GeometryError::InvalidBody(
                "simplex vertices of mixed dimensions".into(),
            ));
        }
        if !all_finite(vertices.iter().flat_map(|v| v.iter())) {
            return Err(GeometryError::NonFinite);
        }
        // The vertex-difference matrix must be nonsingular: reject flat input.
        SimplexCell::new(vertices.clone()).map_err(|_| {
            GeometryError::Degenerate("simplex vertex-difference matrix is singular".into())
        })?;
        Ok(ConvexBody::Simplex { vertices })
    }

    /// Standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut vertices = vec![DVector::zeros(n)];
        for i in 0..n {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            vertices.push(v);
        }
        ConvexBody::new_simplex(vertices).expect("standard simplex is valid")
    }

    /// Builds `{x : a x <= b}`, normalizing every row to unit Euclidean norm.
    /// Rejects unbounded bodies (nontrivial recession cone) and bodies with
    /// empty interior.
    pub fn new_hpolytope(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if n == 0 || m == 0 {
            return Err(GeometryError::InvalidBody(
                "half-space form needs at least one row and one column".into(),
            ));
        }
        if b.len() != m {
            return Err(GeometryError::DimensionMismatch {
                expected: m,
                got: b.len(),
            });
        }
        if !all_finite(a.iter().chain(b.iter())) {
            return Err(GeometryError::NonFinite);
        }
        let mut a = a;
        let mut b = b;
        for i in 0..m {
            let norm = a.row(i).norm();
            if norm < 1e-12 {
                return Err(GeometryError::InvalidBody(format!(
                    "constraint row {i} is numerically zero"
                )));
            }
            for j in 0..n {
                a[(i, j)] /= norm;
            }
            b[i] /= norm;
        }
        if lp::has_recession_direction(&a)? {
            return Err(GeometryError::Unbounded);
        }
        let (_, radius) = lp::chebyshev(&a, &b)?;
        if radius <= 1e-9 {
            return Err(GeometryError::EmptyInterior);
        }
        Ok(ConvexBody::HPolytope { a, b })
    }

    /// Convex hull of the given points. The hull must be full-dimensional.
    pub fn new_vpolytope(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let n = vertices
            .first()
            .ok_or_else(|| GeometryError::InvalidBody("vertex form with no points".into()))?
            .len();
        if n == 0 {
            return Err(GeometryError::InvalidBody("vertex form in dimension 0".into()));
        }
        if vertices.len() < n + 1 {
            return Err(GeometryError::InvalidBody(format!(
                "need at least {} points in dimension {}",
                n + 1,
                n
            )));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(GeometryError::InvalidBody(
                "vertex form with mixed dimensions".into(),
            ));
        }
        if !all_finite(vertices.iter().flat_map(|v| v.iter())) {
            return Err(GeometryError::NonFinite);
        }
        let vertices = dedup_points(vertices);
        if affine_rank(&vertices) < n {
            return Err(GeometryError::Degenerate(
                "point set is not full-dimensional".into(),
            ));
        }
        Ok(ConvexBody::VPolytope { vertices })
    }

    /// Cartesian product `K x K2`.
    pub fn product(left: ConvexBody, right: ConvexBody) -> Self {
        ConvexBody::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    // ----- basic queries -------------------------------------------------

    pub fn dimension(&self) -> usize {
        match self {
            ConvexBody::Box { lo, .. } => lo.len(),
            ConvexBody::Simplex { vertices } | ConvexBody::VPolytope { vertices } => {
                vertices[0].len()
            }
            ConvexBody::HPolytope { a, .. } => a.ncols(),
            ConvexBody::Product { left, right } => left.dimension() + right.dimension(),
        }
    }

    /// Membership test with slack `tol`: every defining constraint may be
    /// violated by at most `tol` (Euclidean distance, rows being unit-norm).
    /// A negative `tol` demands strict interiority by that margin.
    ///
    /// Panics on dimension mismatch; that is a caller bug, not a data error.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        assert_eq!(
            x.len(),
            self.dimension(),
            "contains: point dimension {} does not match body dimension {}",
            x.len(),
            self.dimension()
        );
        match self {
            ConvexBody::Box { lo, hi } => (0..lo.len())
                .all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
            ConvexBody::HPolytope { a, b } => {
                let slack = a * x - b;
                slack.iter().all(|s| *s <= tol)
            }
            ConvexBody::Simplex { .. } => {
                let (a, b) = self.halfspaces().expect("simplex half-spaces");
                let slack = a * x - b;
                slack.iter().all(|s| *s <= tol)
            }
            ConvexBody::VPolytope { vertices } => {
                if tol >= 0.0 {
                    // Membership LP: distance (in the max norm) from x to the hull.
                    match lp::hull_distance(vertices, x) {
                        Ok(d) => d <= tol + 1e-12,
                        Err(_) => false,
                    }
                } else {
                    // Strict-interior queries need a metric margin; use facets.
                    match self.halfspaces() {
                        Ok((a, b)) => {
                            let slack = a * x - b;
                            slack.iter().all(|s| *s <= tol)
                        }
                        Err(_) => false,
                    }
                }
            }
            ConvexBody::Product { left, right } => {
                let nl = left.dimension();
                let xl = x.rows(0, nl).into_owned();
                let xr = x.rows(nl, x.len() - nl).into_owned();
                left.contains(&xl, tol) && right.contains(&xr, tol)
            }
        }
    }

    /// Half-space representation `{x : a x <= b}` with unit-norm rows.
    ///
    /// For vertex forms this enumerates facets by brute force and is guarded
    /// at desk scale.
    pub fn halfspaces(&self) -> Result<(DMatrix<f64>, DVector<f64>)> {
        match self {
            ConvexBody::Box { lo, hi } => {
                let n = lo.len();
                let mut a = DMatrix::zeros(2 * n, n);
                let mut b = DVector::zeros(2 * n);
                for i in 0..n {
                    a[(2 * i, i)] = -1.0;
                    b[2 * i] = -lo[i];
                    a[(2 * i + 1, i)] = 1.0;
                    b[2 * i + 1] = hi[i];
                }
                Ok((a, b))
            }
            ConvexBody::Simplex { vertices } => simplex_halfspaces(vertices),
            ConvexBody::HPolytope { a, b } => Ok((a.clone(), b.clone())),
            ConvexBody::VPolytope { vertices } => vpolytope_facets(vertices),
            ConvexBody::Product { left, right } => {
                let (al, bl) = left.halfspaces()?;
                let (ar, br) = right.halfspaces()?;
                let (nl, nr) = (al.ncols(), ar.ncols());
                let mut a = DMatrix::zeros(al.nrows() + ar.nrows(), nl + nr);
                a.view_mut((0, 0), (al.nrows(), nl)).copy_from(&al);
                a.view_mut((al.nrows(), nl), (ar.nrows(), nr)).copy_from(&ar);
                let mut b = DVector::zeros(bl.len() + br.len());
                b.rows_mut(0, bl.len()).copy_from(&bl);
                b.rows_mut(bl.len(), br.len()).copy_from(&br);
                Ok((a, b))
            }
        }
    }

    /// Center and radius of the largest inscribed Euclidean ball, from the
    /// standard linear program over the normalized half-space rows.
    pub fn chebyshev_center(&self) -> Result<(DVector<f64>, f64)> {
        let (a, b) = self.halfspaces()?;
        let (center, radius) = lp::chebyshev(&a, &b)?;
        if radius <= 0.0 {
            return Err(GeometryError::EmptyInterior);
        }
        Ok((center, radius))
    }

    /// All vertices, deduplicated within 1e-9 and sorted lexicographically.
    ///
    /// Each returned point satisfies `n` linearly independent constraints with
    /// equality and every other constraint with slack >= -1e-9.
    pub fn enumerate_vertices(&self) -> Result<Vec<DVector<f64>>> {
        let verts = match self {
            ConvexBody::Box { lo, hi } => {
                let n = lo.len();
                if n > MAX_EXACT_DIM {
                    return Err(GeometryError::DeskGuard { n, m: 2 * n });
                }
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0..(1usize << n) {
                    let v = DVector::from_fn(n, |i, _| {
                        if mask >> i & 1 == 1 {
                            hi[i]
                        } else {
                            lo[i]
                        }
                    });
                    out.push(v);
                }
                out
            }
            ConvexBody::Simplex { vertices } => vertices.clone(),
            ConvexBody::HPolytope { a, b } => hpolytope_vertices(a, b)?,
            ConvexBody::VPolytope { vertices } => {
                // Input points may include non-extreme ones; a point is a
                // vertex exactly when it is outside the hull of the others.
                let mut out = Vec::new();
                for (i, v) in vertices.iter().enumerate() {
                    let others: Vec<DVector<f64>> = vertices
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, w)| w.clone())
                        .collect();
                    if lp::hull_distance(&others, v)? > VERTEX_DEDUP_TOL {
                        out.push(v.clone());
                    }
                }
                out
            }
            ConvexBody::Product { left, right } => {
                let vl = left.enumerate_vertices()?;
                let vr = right.enumerate_vertices()?;
                let mut out = Vec::with_capacity(vl.len() * vr.len());
                for l in &vl {
                    for r in &vr {
                        let mut v = DVector::zeros(l.len() + r.len());
                        v.rows_mut(0, l.len()).copy_from(l);
                        v.rows_mut(l.len(), r.len()).copy_from(r);
                        out.push(v);
                    }
                }
                out
            }
        };
        let mut verts = dedup_points(verts);
        verts.sort_by(|p, q| lex_cmp(p, q));
        Ok(verts)
    }

    /// Decomposes the body into simplices with disjoint interiors whose union
    /// is the body. Simplices return themselves, boxes use the Kuhn
    /// subdivision, everything else fans from the vertex centroid over
    /// recursively triangulated facets.
    pub fn triangulate(&self) -> Result<Vec<SimplexCell>> {
        triangulate::triangulate(self)
    }

    /// Volume via triangulation.
    pub fn volume(&self) -> Result<f64> {
        match self {
            // Cheap structural cases; the generic path must agree with these.
            ConvexBody::Box { lo, hi } => Ok((hi - lo).iter().product()),
            ConvexBody::Product { left, right } => Ok(left.volume()? * right.volume()?),
            _ => Ok(self.triangulate()?.iter().map(|c| c.volume).sum()),
        }
    }

    /// Translate the body by `v`.
    pub fn translate(&self, v: &DVector<f64>) -> ConvexBody {
        assert_eq!(v.len(), self.dimension(), "translate: dimension mismatch");
        match self {
            ConvexBody::Box { lo, hi } => ConvexBody::Box {
                lo: lo + v,
                hi: hi + v,
            },
            ConvexBody::Simplex { vertices } => ConvexBody::Simplex {
                vertices: vertices.iter().map(|p| p + v).collect(),
            },
            ConvexBody::HPolytope { a, b } => ConvexBody::HPolytope {
                a: a.clone(),
                b: b + a * v,
            },
            ConvexBody::VPolytope { vertices } => ConvexBody::VPolytope {
                vertices: vertices.iter().map(|p| p + v).collect(),
            },
            ConvexBody::Product { left, right } => {
                let nl = left.dimension();
                let vl = v.rows(0, nl).into_owned();
                let vr = v.rows(nl, v.len() - nl).into_owned();
                ConvexBody::Product {
                    left: Box::new(left.translate(&vl)),
                    right: Box::new(right.translate(&vr)),
                }
            }
        }
    }

    /// Rebuild the body as a plain half-space polytope. Useful when a
    /// structured representation (box, simplex, product) should be forced
    /// through the generic evaluation path.
    pub fn to_hpolytope(&self) -> Result<ConvexBody> {
        let (a, b) = self.halfspaces()?;
        ConvexBody::new_hpolytope(a, b)
    }

    /// Vertices of a two-dimensional body ordered counterclockwise around
    /// their centroid. Used by the planar quadrature oracles.
    pub fn vertex_cycle_2d(&self) -> Result<Vec<DVector<f64>>> {
        if self.dimension() != 2 {
            return Err(GeometryError::DimensionMismatch {
                expected: 2,
                got: self.dimension(),
            });
        }
        let verts = self.enumerate_vertices()?;
        Ok(sort_cycle_2d(verts))
    }

    // ----- JSON ----------------------------------------------------------

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: BodyJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&BodyJson::from(self)).expect("body serializes")
    }
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexBody::Box { lo, .. } => write!(f, "box(n={})", lo.len()),
            ConvexBody::Simplex { vertices } => write!(f, "simplex(n={})", vertices[0].len()),
            ConvexBody::HPolytope { a, .. } => {
                write!(f, "hpolytope(n={}, m={})", a.ncols(), a.nrows())
            }
            ConvexBody::VPolytope { vertices } => {
                write!(f, "vpolytope(n={}, k={})", vertices[0].len(), vertices.len())
            }
            ConvexBody::Product { left, right } => write!(f, "product({left} x {right})"),
        }
    }
}

// ----- shared geometric helpers -------------------------------------------

fn all_finite<'a, I: Iterator<Item = &'a f64>>(mut it: I) -> bool {
    it.all(|x| x.is_finite())
}

pub(crate) fn lex_cmp(p: &DVector<f64>, q: &DVector<f64>) -> std::cmp::Ordering {
    for (a, b) in p.iter().zip(q.iter()) {
        match a.partial_cmp(b) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

pub(crate) fn dedup_points(points: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out
            .iter()
            .any(|q| (&p - q).amax() <= VERTEX_DEDUP_TOL)
        {
            out.push(p);
        }
    }
    out
}

/// Rank of the affine hull of `points`, with a scale-aware tolerance.
pub(crate) fn affine_rank(points: &[DVector<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let n = points[0].len();
    let mut diff = DMatrix::zeros(points.len() - 1, n);
    let mut scale = 1.0f64;
    for (i, p) in points.iter().skip(1).enumerate() {
        let d = p - &points[0];
        scale = scale.max(d.amax());
        diff.set_row(i, &d.transpose());
    }
    let svd = diff.svd(false, false);
    let tol = 1e-7 * scale.max(1.0);
    svd.singular_values.iter().filter(|s| **s > tol).count()
}

/// Chord of the body through `x` along direction `d`, as the parameter
/// interval `[t_lo, t_hi]` with `x + t d` inside `{a x <= b}`.
pub(crate) fn chord_interval(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for i in 0..a.nrows() {
        let den: f64 = a.row(i).transpose().dot(d);
        let num = b[i] - a.row(i).transpose().dot(x);
        if den.abs() <= 1e-14 {
            continue; // direction parallel to this facet
        }
        let t = num / den;
        if den > 0.0 {
            t_hi = t_hi.min(t);
        } else {
            t_lo = t_lo.max(t);
        }
    }
    if !t_lo.is_finite() || !t_hi.is_finite() {
        return Err(GeometryError::Unbounded);
    }
    Ok((t_lo, t_hi))
}

fn sort_cycle_2d(verts: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let k = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0]).sum::<f64>() / k;
    let cy = verts.iter().map(|v| v[1]).sum::<f64>() / k;
    let mut verts = verts;
    verts.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.partial_cmp(&aq).unwrap_or(std::cmp::Ordering::Equal)
    });
    verts
}

/// Facets of a simplex: for each omitted vertex, the hyperplane through the
/// remaining `n`, oriented so the omitted vertex is on the feasible side.
fn simplex_halfspaces(vertices: &[DVector<f64>]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = vertices[0].len();
    let mut a = DMatrix::zeros(n + 1, n);
    let mut b = DVector::zeros(n + 1);
    for omit in 0..=n {
        let face: Vec<&DVector<f64>> = vertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != omit)
            .map(|(_, v)| v)
            .collect();
        let normal = hyperplane_normal(&face)?;
        let offset = normal.dot(face[0]);
        let (mut normal, mut offset) = (normal, offset);
        if normal.dot(&vertices[omit]) > offset {
            normal = -normal;
            offset = -offset;
        }
        a.set_row(omit, &normal.transpose());
        b[omit] = offset;
    }
    Ok((a, b))
}

/// Unit normal of the hyperplane through `n` affinely independent points.
fn hyperplane_normal(points: &[&DVector<f64>]) -> Result<DVector<f64>> {
    let n = points[0].len();
    debug_assert_eq!(points.len(), n);
    if n == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    // Differences padded with a zero row to n x n: the padded matrix has rank
    // n-1 when the points span a hyperplane, and the full square SVD exposes
    // the nullspace as the trailing right-singular vector.
    let mut diff = DMatrix::zeros(n, n);
    for (i, p) in points.iter().skip(1).enumerate() {
        diff.set_row(i, &(*p - points[0]).transpose());
    }
    let scale = diff.amax().max(1.0);
    let svd = diff.svd(false, true);
    let vt = svd.v_t.as_ref().expect("svd with v requested");
    let normal: DVector<f64> = vt.row(n - 1).transpose().into_owned();
    // Second-smallest singular value must be clearly nonzero, otherwise the
    // points do not determine a unique hyperplane.
    if svd.singular_values[n - 2] <= 1e-9 * scale {
        return Err(GeometryError::Degenerate(
            "points do not span a hyperplane".into(),
        ));
    }
    Ok(&normal / normal.norm())
}

/// Brute-force facet enumeration of a full-dimensional hull, desk scale only.
fn vpolytope_facets(vertices: &[DVector<f64>]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    use itertools::Itertools;
    let n = vertices[0].len();
    let k = vertices.len();
    if n > MAX_EXACT_DIM || k > MAX_EXACT_ROWS {
        return Err(GeometryError::DeskGuard { n, m: k });
    }
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
    for subset in (0..k).combinations(n) {
        let pts: Vec<&DVector<f64>> = subset.iter().map(|&i| &vertices[i]).collect();
        let normal = match hyperplane_normal(&pts) {
            Ok(nrm) => nrm,
            Err(_) => continue, // affinely dependent subset; skip
        };
        let offset = normal.dot(pts[0]);
        let mut below = true;
        let mut above = true;
        for v in vertices {
            let s = normal.dot(v) - offset;
            if s > ACTIVE_TOL {
                below = false;
            }
            if s < -ACTIVE_TOL {
                above = false;
            }
        }
        let (normal, offset) = if below {
            (normal, offset)
        } else if above {
            (-normal.clone(), -offset)
        } else {
            continue; // not a supporting hyperplane
        };
        let duplicate = rows.iter().any(|(a, b)| {
            (a - &normal).amax() <= 1e-8 && (b - offset).abs() <= 1e-8
        });
        if !duplicate {
            rows.push((normal, offset));
        }
    }
    if rows.is_empty() {
        return Err(GeometryError::Degenerate("no facets found".into()));
    }
    let mut a = DMatrix::zeros(rows.len(), n);
    let mut b = DVector::zeros(rows.len());
    for (i, (normal, offset)) in rows.iter().enumerate() {
        a.set_row(i, &normal.transpose());
        b[i] = *offset;
    }
    Ok((a, b))
}

/// Brute force over all row subsets of size `n`: solve the square system,
/// keep solutions feasible for all remaining rows.
fn hpolytope_vertices(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
    use itertools::Itertools;
    let (m, n) = (a.nrows(), a.ncols());
    if n > MAX_EXACT_DIM || m > MAX_EXACT_ROWS {
        return Err(GeometryError::DeskGuard { n, m });
    }
    let mut verts = Vec::new();
    for subset in (0..m).combinations(n) {
        let mut sys = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (r, &i) in subset.iter().enumerate() {
            sys.set_row(r, &a.row(i));
            rhs[r] = b[i];
        }
        let lu = sys.clone().full_piv_lu();
        let Some(x) = lu.solve(&rhs) else { continue };
        if (&sys * &x - &rhs).amax() > 1e-8 || !all_finite(x.iter()) {
            continue; // ill-conditioned subset
        }
        let slack = a * &x - b;
        if slack.iter().all(|s| *s <= FEASIBILITY_TOL) {
            verts.push(x);
        }
    }
    if verts.is_empty() {
        return Err(GeometryError::Degenerate(
            "no vertices found (body may be empty)".into(),
        ));
    }
    Ok(verts)
}

// ----- JSON mirror ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum BodyJson {
    Hpolytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Simplex {
        vertices: Vec<Vec<f64>>,
    },
    Product {
        left: Box<BodyJson>,
        right: Box<BodyJson>,
    },
}

fn vec_to_dvector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != n) {
        return Err(GeometryError::InvalidBody(
            "matrix rows of unequal length".into(),
        ));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

impl TryFrom<BodyJson> for ConvexBody {
    type Error = GeometryError;

    fn try_from(raw: BodyJson) -> Result<Self> {
        match raw {
            BodyJson::Hpolytope { a, b } => {
                ConvexBody::new_hpolytope(rows_to_matrix(&a)?, vec_to_dvector(b))
            }
            BodyJson::Vpolytope { vertices } => {
                ConvexBody::new_vpolytope(vertices.into_iter().map(vec_to_dvector).collect())
            }
            BodyJson::Box { lo, hi } => {
                ConvexBody::new_box(vec_to_dvector(lo), vec_to_dvector(hi))
            }
            BodyJson::Simplex { vertices } => {
                ConvexBody::new_simplex(vertices.into_iter().map(vec_to_dvector).collect())
            }
            BodyJson::Product { left, right } => Ok(ConvexBody::product(
                (*left).try_into()?,
                (*right).try_into()?,
            )),
        }
    }
}

impl From<&ConvexBody> for BodyJson {
    fn from(body: &ConvexBody) -> Self {
        let to_vec = |v: &DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
        match body {
            ConvexBody::Box { lo, hi } => BodyJson::Box {
                lo: to_vec(lo),
                hi: to_vec(hi),
            },
            ConvexBody::Simplex { vertices } => BodyJson::Simplex {
                vertices: vertices.iter().map(to_vec).collect(),
            },
            ConvexBody::HPolytope { a, b } => BodyJson::Hpolytope {
                a: (0..a.nrows())
                    .map(|i| a.row(i).iter().copied().collect())
                    .collect(),
                b: to_vec(b),
            },
            ConvexBody::VPolytope { vertices } => BodyJson::Vpolytope {
                vertices: vertices.iter().map(to_vec).collect(),
            },
            ConvexBody::Product { left, right } => BodyJson::Product {
                left: Box::new(BodyJson::from(left.as_ref())),
                right: Box::new(BodyJson::from(right.as_ref())),
            },
        }
    }
}
