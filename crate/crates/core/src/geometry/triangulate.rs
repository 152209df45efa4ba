//! Triangulation of polytopes into simplex cells.
//!
//! Simplices triangulate as themselves and boxes by the Kuhn subdivision
//! (one cell per coordinate permutation). Everything else is handled
//! generically: fan from the vertex centroid over the facets, where each
//! facet — and recursively each lower face — is triangulated by pulling from
//! its lexicographically smallest vertex. Cells can be badly shaped; that is
//! fine because the downstream divided-difference integration needs no shape
//! regularity. Cell vertices are always body vertices, plus the single body
//! centroid introduced by the fan.

use std::collections::BTreeSet;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::{
    affine_rank, lex_cmp, ConvexBody, GeometryError, Result, SimplexCell, ACTIVE_TOL,
};

pub(crate) fn triangulate(body: &ConvexBody) -> Result<Vec<SimplexCell>> {
    match body {
        ConvexBody::Simplex { vertices } => Ok(vec![SimplexCell::new(vertices.clone())?]),
        ConvexBody::Box { lo, hi } => kuhn_cells(lo, hi),
        ConvexBody::HPolytope { .. } | ConvexBody::VPolytope { .. } => fan_triangulation(body),
        // Products lose their factor structure here on purpose: convert to a
        // half-space form and go through the generic path. The exact
        // evaluator never calls this for products (it works factorwise), so
        // this path stays an independent route through product geometry.
        ConvexBody::Product { .. } => fan_triangulation(&body.to_hpolytope()?),
    }
}

/// Kuhn subdivision of a box: for each permutation pi of the axes, the cell
/// lo -> lo + e_{pi(1)} -> ... walking one axis at a time. n! cells of equal
/// volume, fixed lexicographic permutation order.
fn kuhn_cells(lo: &DVector<f64>, hi: &DVector<f64>) -> Result<Vec<SimplexCell>> {
    let n = lo.len();
    let mut cells = Vec::new();
    for perm in (0..n).permutations(n) {
        let mut vertices = Vec::with_capacity(n + 1);
        let mut v = lo.clone();
        vertices.push(v.clone());
        for &axis in &perm {
            v[axis] = hi[axis];
            vertices.push(v.clone());
        }
        cells.push(SimplexCell::new(vertices)?);
    }
    Ok(cells)
}

/// A face of the polytope, tracked by which vertices lie on it and which
/// constraint rows are active on all of them.
struct Face {
    vertex_ids: Vec<usize>,
    active_rows: Vec<usize>,
}

fn fan_triangulation(body: &ConvexBody) -> Result<Vec<SimplexCell>> {
    let n = body.dimension();
    let verts = body.enumerate_vertices()?;
    let (a, b) = body.halfspaces()?;
    if verts.len() < n + 1 {
        return Err(GeometryError::Degenerate(
            "too few vertices to span the body".into(),
        ));
    }

    let centroid =
        verts.iter().fold(DVector::zeros(n), |acc, v| acc + v) / verts.len() as f64;

    // Activity table: which vertices lie on which constraint row.
    let active_sets: Vec<Vec<usize>> = (0..a.nrows())
        .map(|i| {
            (0..verts.len())
                .filter(|&k| (a.row(i).transpose().dot(&verts[k]) - b[i]).abs() <= ACTIVE_TOL)
                .collect()
        })
        .collect();

    let mut cells = Vec::new();
    let mut seen_facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (row, ids) in active_sets.iter().enumerate() {
        if ids.len() < n || rank_of(ids, &verts) != n - 1 {
            continue; // redundant row or lower face
        }
        if !seen_facets.insert(ids.clone()) {
            continue; // duplicate hyperplane
        }
        let face = Face {
            vertex_ids: ids.clone(),
            active_rows: vec![row],
        };
        for simplex_ids in pull_face(&face, &verts, &active_sets, n - 1) {
            let mut vertices = Vec::with_capacity(n + 1);
            vertices.push(centroid.clone());
            vertices.extend(simplex_ids.iter().map(|&k| verts[k].clone()));
            cells.push(SimplexCell::new(vertices)?);
        }
    }
    if cells.is_empty() {
        return Err(GeometryError::Degenerate("no facets to fan over".into()));
    }
    Ok(cells)
}

/// Pulling triangulation of a `d`-dimensional face into `d`-simplices (lists
/// of vertex indices): cone from the lexicographically smallest vertex over
/// the triangulations of the subfaces that do not contain it. Subfaces are
/// found by intersecting with each additional constraint row, which is
/// exhaustive for polytope faces.
fn pull_face(
    face: &Face,
    verts: &[DVector<f64>],
    active_sets: &[Vec<usize>],
    d: usize,
) -> Vec<Vec<usize>> {
    if face.vertex_ids.len() == d + 1 {
        return vec![face.vertex_ids.clone()];
    }
    let apex = *face
        .vertex_ids
        .iter()
        .min_by(|&&p, &&q| lex_cmp(&verts[p], &verts[q]))
        .expect("face has vertices");

    let mut simplices = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (row, row_active) in active_sets.iter().enumerate() {
        if face.active_rows.contains(&row) {
            continue;
        }
        let sub_ids: Vec<usize> = face
            .vertex_ids
            .iter()
            .copied()
            .filter(|id| row_active.contains(id))
            .collect();
        if sub_ids.contains(&apex) || sub_ids.len() < d {
            continue;
        }
        if rank_of(&sub_ids, verts) != d - 1 {
            continue; // a ridge or lower face, not a facet of this face
        }
        if !seen.insert(sub_ids.clone()) {
            continue;
        }
        let mut active_rows = face.active_rows.clone();
        active_rows.push(row);
        let sub = Face {
            vertex_ids: sub_ids,
            active_rows,
        };
        for mut simplex in pull_face(&sub, verts, active_sets, d - 1) {
            simplex.insert(0, apex);
            simplices.push(simplex);
        }
    }
    simplices
}

fn rank_of(ids: &[usize], verts: &[DVector<f64>]) -> usize {
    let pts: Vec<DVector<f64>> = ids.iter().map(|&k| verts[k].clone()).collect();
    affine_rank(&pts)
}

#[allow(dead_code)]
fn difference_matrix(vertices: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vertices[0].len();
    let mut diff = DMatrix::zeros(n, vertices.len() - 1);
    for (j, v) in vertices.iter().skip(1).enumerate() {
        diff.set_column(j, &(v - &vertices[0]));
    }
    diff
}
