//! Convex hull volumes and facet halfspaces in dimensions 1 to 3.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Relative tolerance for coplanarity and support tests.
const REL_EPS: f64 = 1e-10;

/// `k`-dimensional volume of the convex hull of points in `ℝ^k`, `k ≤ 3`.
/// Degenerate inputs (lower affine dimension) have volume 0.
pub fn hull_volume(points: &[Vec<f64>]) -> Result<f64> {
    let Some(first) = points.first() else {
        return Ok(0.0);
    };
    let k = first.len();
    if points.iter().any(|p| p.len() != k) {
        return Err(Error::invalid("points have inconsistent dimensions"));
    }
    match k {
        1 => Ok(interval_length(points.iter().map(|p| p[0]))),
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            Ok(polygon_area(&pts))
        }
        3 => {
            let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            Ok(polyhedron_volume(&pts))
        }
        _ => Err(Error::DimensionTooLarge { k }),
    }
}

pub fn interval_length(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = xs
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Hull vertices in counter-clockwise order (Andrew's monotone chain).
/// Collinear boundary points are dropped.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross2(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of the planar hull.
pub fn polygon_area(points: &[[f64; 2]]) -> f64 {
    let hull = convex_hull_2d(points);
    if hull.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..hull.len())
        .map(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    (twice / 2.0).abs()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// A supporting plane `⟨normal, x⟩ = offset` with unit outward normal,
/// together with the indices of the input points lying on it.
#[derive(Debug, Clone)]
pub struct Facet3 {
    pub normal: [f64; 3],
    pub offset: f64,
    pub members: Vec<usize>,
}

fn scale_of(points: &[[f64; 3]]) -> f64 {
    let c = centroid3(points);
    points
        .iter()
        .map(|p| norm3(sub3(*p, c)))
        .fold(0.0, f64::max)
}

fn centroid3(points: &[[f64; 3]]) -> [f64; 3] {
    let n = points.len() as f64;
    let mut c = [0.0; 3];
    for p in points {
        for i in 0..3 {
            c[i] += p[i] / n;
        }
    }
    c
}

/// Facets of the hull of a full-dimensional point set, found by testing
/// every plane through three points for the supporting property. Meant
/// for the small vertex counts handled here (cubic in the point count).
pub fn facets_3d(points: &[[f64; 3]]) -> Vec<Facet3> {
    let n = points.len();
    let scale = scale_of(points);
    if n < 4 || scale == 0.0 {
        return Vec::new();
    }
    let tol = REL_EPS * scale;
    let centroid = centroid3(points);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut facets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let nrm = cross3(sub3(points[j], points[i]), sub3(points[l], points[i]));
                let len = norm3(nrm);
                if len <= tol * scale {
                    continue;
                }
                let mut unit = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let mut offset = dot3(unit, points[i]);
                let (mut above, mut below) = (false, false);
                let mut members = Vec::new();
                for (q, p) in points.iter().enumerate() {
                    let s = dot3(unit, *p) - offset;
                    if s > tol {
                        above = true;
                    } else if s < -tol {
                        below = true;
                    } else {
                        members.push(q);
                    }
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                if members.len() == n {
                    // Coplanar input: no full-dimensional hull.
                    return Vec::new();
                }
                if dot3(unit, centroid) - offset > 0.0 {
                    unit = [-unit[0], -unit[1], -unit[2]];
                    offset = -offset;
                }
                if members[0] != i || !seen.insert(members.clone()) {
                    continue;
                }
                facets.push(Facet3 {
                    normal: unit,
                    offset,
                    members,
                });
            }
        }
    }
    facets
}

/// Volume of the hull of points in `ℝ³`: each facet contributes a cone
/// over the centroid, `area · height / 3`.
pub fn polyhedron_volume(points: &[[f64; 3]]) -> f64 {
    let facets = facets_3d(points);
    if facets.is_empty() {
        return 0.0;
    }
    let centroid = centroid3(points);
    facets
        .iter()
        .map(|f| {
            let height = f.offset - dot3(f.normal, centroid);
            facet_area(points, f) * height / 3.0
        })
        .sum()
}

fn facet_area(points: &[[f64; 3]], facet: &Facet3) -> f64 {
    let nrm = facet.normal;
    // Orthonormal basis (u, v) of the facet plane.
    let helper = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = cross3(nrm, helper);
    let ul = norm3(u);
    let u = [u[0] / ul, u[1] / ul, u[2] / ul];
    let v = cross3(nrm, u);
    let planar: Vec<[f64; 2]> = facet
        .members
        .iter()
        .map(|&q| [dot3(points[q], u), dot3(points[q], v)])
        .collect();
    polygon_area(&planar)
}

/// Perimeter of the planar hull.
pub fn polygon_perimeter(points: &[[f64; 2]]) -> f64 {
    let hull = convex_hull_2d(points);
    match hull.len() {
        0 | 1 => 0.0,
        2 => 2.0 * ((hull[1][0] - hull[0][0]).hypot(hull[1][1] - hull[0][1])),
        n => (0..n)
            .map(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % n]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum(),
    }
}

/// Surface area of the hull of a full-dimensional point set in `ℝ³`
/// (0 when the set is degenerate).
pub fn polyhedron_surface_area(points: &[[f64; 3]]) -> f64 {
    facets_3d(points).iter().map(|f| facet_area(points, f)).sum()
}

/// Outward halfspaces `⟨a, x⟩ ≤ b` describing the hull of a full-dimensional
/// point set in `ℝ^k`, `k ≤ 3`. Returns `None` when the set is degenerate.
/// Outward unit normal `a` and offset `b` of `{x : a·x ≤ b}`.
pub type Halfspace = (Vec<f64>, f64);

pub fn halfspaces(points: &[Vec<f64>]) -> Result<Option<Vec<Halfspace>>> {
    let Some(first) = points.first() else {
        return Ok(None);
    };
    let k = first.len();
    match k {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                return Ok(None);
            }
            Ok(Some(vec![(vec![1.0], hi), (vec![-1.0], -lo)]))
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let hull = convex_hull_2d(&pts);
            if hull.len() < 3 {
                return Ok(None);
            }
            let mut out = Vec::with_capacity(hull.len());
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                // Counter-clockwise order: outward normal is the edge rotated clockwise.
                let (nx, ny) = (b[1] - a[1], a[0] - b[0]);
                let len = (nx * nx + ny * ny).sqrt();
                let normal = vec![nx / len, ny / len];
                let offset = normal[0] * a[0] + normal[1] * a[1];
                out.push((normal, offset));
            }
            Ok(Some(out))
        }
        3 => {
            let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            let facets = facets_3d(&pts);
            if facets.is_empty() {
                return Ok(None);
            }
            Ok(Some(
                facets
                    .into_iter()
                    .map(|f| (f.normal.to_vec(), f.offset))
                    .collect(),
            ))
        }
        _ => Err(Error::DimensionTooLarge { k }),
    }
}
