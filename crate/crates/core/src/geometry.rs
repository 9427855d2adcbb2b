//! Small planar geometry kit: lines with fixed normals, half-plane clipping,
//! shoelace areas and uniform sampling in triangles.

pub type Point = [f64; 2];

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

/// Intersection of the lines `⟨x, n1⟩ = b1` and `⟨x, n2⟩ = b2`, or `None`
/// when they are (numerically) parallel.
pub fn intersect_lines(n1: Point, b1: f64, n2: Point, b2: f64) -> Option<Point> {
    let det = cross(n1, n2);
    if det.abs() < 1e-14 {
        return None;
    }
    Some([
        (b1 * n2[1] - b2 * n1[1]) / det,
        (n1[0] * b2 - n2[0] * b1) / det,
    ])
}

/// Signed area of a vertex cycle (positive for counter-clockwise order).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
}

pub fn area(poly: &[Point]) -> f64 {
    signed_area(poly).abs()
}

/// Keeps the part of a convex polygon where `⟨x, normal⟩ ≥ offset`
/// (one Sutherland–Hodgman pass).
pub fn clip_halfplane(poly: &[Point], normal: Point, offset: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let ds = dot(s, normal) - offset;
        let de = dot(e, normal) - offset;
        let s_in = ds >= 0.0;
        let e_in = de >= 0.0;
        if s_in != e_in {
            let t = ds / (ds - de);
            out.push([s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]);
        }
        if e_in {
            out.push(e);
        }
    }
    out
}

/// Uniform point in the triangle `abc` from two uniforms on `[0, 1)`.
#[inline]
pub fn triangle_point(a: Point, b: Point, c: Point, mut u: f64, mut v: f64) -> Point {
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    [
        a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
        a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
    ]
}
