//! Planar point-containment tests used to validate the ECP against the patch.

use alloc::vec::Vec;

/// Relative slack for boundary points.
const EDGE_EPS: f64 = 1e-12;

/// Shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let [x0, y0] = vertices[i];
        let [x1, y1] = vertices[(i + 1) % n];
        twice += x0 * y1 - x1 * y0;
    }
    0.5 * twice
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by monotone chain, counter-clockwise, without collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn scale_of(vertices: &[[f64; 2]]) -> f64 {
    vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()))
        .max(f64::MIN_POSITIVE)
}

/// Point in a counter-clockwise convex polygon, boundary inclusive.
pub fn convex_polygon_contains(hull: &[[f64; 2]], p: [f64; 2]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    let s = scale_of(hull);
    let tol = EDGE_EPS * s * s;
    (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], p) >= -tol)
}

/// Point in an arbitrary simple polygon (even-odd rule), boundary inclusive.
pub fn polygon_contains(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let s = scale_of(vertices);
    let tol = EDGE_EPS * s;
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if on_segment(a, b, p, tol) {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_at = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x_at {
                inside = !inside;
            }
        }
    }
    inside
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2], tol: f64) -> bool {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return libm::hypot(p[0] - a[0], p[1] - a[1]) <= tol;
    }
    let u = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
    if !(-0.0..=1.0).contains(&u) {
        return false;
    }
    let cx = a[0] + u * dx;
    let cy = a[1] + u * dy;
    libm::hypot(p[0] - cx, p[1] - cy) <= tol
}

pub fn within_radius(p: [f64; 2], r: f64) -> bool {
    libm::hypot(p[0], p[1]) <= r * (1.0 + EDGE_EPS)
}

pub fn strictly_within_radius(p: [f64; 2], r: f64) -> bool {
    libm::hypot(p[0], p[1]) < r * (1.0 - EDGE_EPS)
}

/// Rotate a 2-vector counter-clockwise by `angle` radians.
pub fn rotate(v: [f64; 2], angle: f64) -> [f64; 2] {
    let (s, c) = libm::sincos(angle);
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}
