//! Adaptive quadrature used by the verification harnesses: 1-D adaptive
//! Simpson and a strip decomposition for integrals over convex polygons.

/// Adaptive Simpson rule on `[a, b]` with absolute tolerance `tol`.
///
/// The recursion inherits the classical 1/15 Richardson error estimate; the
/// depth cap makes the routine total (at depth 50 the panel width has shrunk
/// by 2^-50, far below any sensible resolution for the smooth integrands
/// used here).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    assert!(a.is_finite() && b.is_finite() && a <= b);
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_panel(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol.max(1e-300), 50)
}

fn simpson_panel(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// A convex polygon given by its vertex cycle (counterclockwise), used for
/// 2-D integrals via vertical strips.
pub struct Polygon {
    cycle: Vec<[f64; 2]>,
}

impl Polygon {
    /// `cycle` must walk the boundary of a convex polygon (either
    /// orientation); at least 3 vertices.
    pub fn new(cycle: Vec<[f64; 2]>) -> Self {
        assert!(cycle.len() >= 3, "polygon needs at least 3 vertices");
        Polygon { cycle }
    }

    pub fn area(&self) -> f64 {
        let mut twice = 0.0;
        for (p, q) in self.edges() {
            twice += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * twice.abs()
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| (self.cycle[i], self.cycle[(i + 1) % k]))
    }

    /// Integrate `f(x, y)` over the polygon. Between consecutive vertex
    /// abscissae the boundary is a pair of line segments, so the inner
    /// integral has smooth limits and nested adaptive Simpson converges
    /// cleanly.
    pub fn integral<F: Fn(f64, f64) -> f64>(&self, f: &F, tol: f64) -> f64 {
        let mut xs: Vec<f64> = self.cycle.iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + a.abs()));
        let total_width: f64 = xs.last().unwrap() - xs.first().unwrap();
        assert!(total_width > 0.0, "polygon has zero width");

        let mut total = 0.0;
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let width = x1 - x0;
            if width <= 1e-13 * (1.0 + x0.abs()) {
                continue;
            }
            // Edges spanning this strip; for a convex polygon there are two.
            let spanning: Vec<(f64, f64)> = self
                .edges()
                .filter(|(p, q)| {
                    p[0].min(q[0]) <= x0 + 1e-12 && p[0].max(q[0]) >= x1 - 1e-12
                })
                .map(|(p, q)| {
                    let slope = (q[1] - p[1]) / (q[0] - p[0]);
                    (p[1] - slope * p[0], slope) // y = intercept + slope * x
                })
                .collect();
            assert!(
                spanning.len() >= 2,
                "strip [{x0}, {x1}] not bounded by two edges"
            );
            let strip_tol = tol * (width / total_width).max(1e-3) * 0.5;
            let inner_tol = strip_tol / (4.0 * width.max(1.0));
            total += adaptive_simpson(
                &|x| {
                    let mut y_lo = f64::INFINITY;
                    let mut y_hi = f64::NEG_INFINITY;
                    for (b0, b1) in &spanning {
                        let y = b0 + b1 * x;
                        y_lo = y_lo.min(y);
                        y_hi = y_hi.max(y);
                    }
                    if y_hi <= y_lo {
                        0.0
                    } else {
                        adaptive_simpson(&|y| f(x, y), y_lo, y_hi, inner_tol)
                    }
                },
                x0,
                x1,
                strip_tol,
            );
        }
        total
    }
}
