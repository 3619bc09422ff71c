//! Polygon footprints, rigid placement and the collision-free indicator.
//!
//! Boundary contact counts as a collision throughout: two polygons that
//! merely touch are reported as intersecting, and a point on an edge is
//! inside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertical nudge applied to a ray-cast query point when a vertex sits
/// exactly on its ray.
const RAY_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;

    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

/// Planar pose. `theta` is an unwrapped real angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    #[inline]
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.theta]
    }

    #[inline]
    pub fn from_array([x, y, theta]: [f64; 3]) -> Self {
        Self { x, y, theta }
    }

    #[inline]
    pub fn position(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Componentwise sum.
    #[inline]
    pub fn compose_offset(self, offset: Pose2D) -> Pose2D {
        Pose2D::new(self.x + offset.x, self.y + offset.y, self.theta + offset.theta)
    }

    /// Componentwise difference `self - other`.
    #[inline]
    pub fn minus(self, other: Pose2D) -> Pose2D {
        Pose2D::new(self.x - other.x, self.y - other.y, self.theta - other.theta)
    }
}

/// A simple, counter-clockwise polygon in its body frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<Vec2>,
    bounding_radius: f64,
}

impl Polygon2D {
    /// Validates the vertex list. Clockwise input is reversed.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(Error::InvalidPolygon(format!("vertex {i} is not finite")));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::InvalidPolygon("polygon has zero area".into()));
        }
        if let Some((i, j)) = first_self_intersection(&vertices) {
            return Err(Error::InvalidPolygon(format!(
                "edges {i} and {j} intersect; polygon is not simple"
            )));
        }
        let mut vertices = vertices;
        if area < 0.0 {
            vertices.reverse();
        }
        let bounding_radius = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Self {
            vertices,
            bounding_radius,
        })
    }

    /// Axis-aligned `length x width` rectangle centred on the body origin.
    pub fn rectangle(length: f64, width: f64) -> Result<Self> {
        let (hl, hw) = (0.5 * length, 0.5 * width);
        Self::new(vec![
            Vec2::new(-hl, -hw),
            Vec2::new(hl, -hw),
            Vec2::new(hl, hw),
            Vec2::new(-hl, hw),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Radius of the smallest origin-centred disc containing the polygon.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

fn signed_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

fn first_self_intersection(v: &[Vec2]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        let (a1, a2) = (v[i], v[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (b1, b2) = (v[j], v[(j + 1) % n]);
            if adjacent {
                // Neighbouring edges share a vertex; they are only a problem
                // if they fold back onto each other.
                let shared = if j == i + 1 { a2 } else { a1 };
                let (p, q) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                if orient(p, shared, q) == 0.0 && dot(p - shared, q - shared) > 0.0 {
                    return Some((i, j));
                }
            } else if segments_intersect(a1, a2, b1, b2) {
                return Some((i, j));
            }
        }
    }
    None
}

#[inline]
fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

#[inline]
fn dot(a: Vec2, b: Vec2) -> f64 {
    a.x * b.x + a.y * b.y
}

#[inline]
fn within_box(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Rigidly places `poly` at `pose`: `R(theta) v + (x, y)` for each vertex.
pub fn place(poly: &Polygon2D, pose: Pose2D) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.vertices.len());
    place_into(poly, pose, &mut out);
    out
}

/// Like [`place`] but reuses `out`.
pub fn place_into(poly: &Polygon2D, pose: Pose2D, out: &mut Vec<Vec2>) {
    let (s, c) = pose.theta.sin_cos();
    out.clear();
    out.extend(
        poly.vertices
            .iter()
            .map(|v| Vec2::new(c * v.x - s * v.y + pose.x, s * v.x + c * v.y + pose.y)),
    );
}

/// True if `pt` is inside `verts` or on its boundary.
pub fn point_in_polygon(pt: Vec2, verts: &[Vec2]) -> bool {
    let n = verts.len();
    for i in 0..n {
        let (a, b) = (verts[i], verts[(i + 1) % n]);
        if orient(a, b, pt) == 0.0 && within_box(pt, a, b) {
            return true;
        }
    }
    let mut py = pt.y;
    if verts.iter().any(|v| v.y == py && v.x >= pt.x) {
        py += RAY_NUDGE;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (verts[i], verts[(i + 1) % n]);
        if (a.y > py) != (b.y > py) {
            let x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if x_cross > pt.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// True if the closed segments `a1-a2` and `b1-b2` share at least one point.
pub fn segments_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(a1, b1, b2))
        || (d2 == 0.0 && within_box(a2, b1, b2))
        || (d3 == 0.0 && within_box(b1, a1, a2))
        || (d4 == 0.0 && within_box(b2, a1, a2))
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vec2,
    max: Vec2,
}

impl Aabb {
    fn of(verts: &[Vec2]) -> Self {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in verts {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        Self { min, max }
    }

    fn of_segment(a: Vec2, b: Vec2) -> Self {
        Self {
            min: Vec2::new(a.x.min(b.x), a.y.min(b.y)),
            max: Vec2::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    #[inline]
    fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }
}

/// True if two world-frame polygons overlap, touch, or one contains the
/// other.
pub fn polygons_intersect(pa: &[Vec2], pb: &[Vec2]) -> bool {
    let (ba, bb) = (Aabb::of(pa), Aabb::of(pb));
    if !ba.overlaps(&bb) {
        return false;
    }
    let (na, nb) = (pa.len(), pb.len());
    for i in 0..na {
        let (a1, a2) = (pa[i], pa[(i + 1) % na]);
        let ea = Aabb::of_segment(a1, a2);
        if !ea.overlaps(&bb) {
            continue;
        }
        for j in 0..nb {
            let (b1, b2) = (pb[j], pb[(j + 1) % nb]);
            if ea.overlaps(&Aabb::of_segment(b1, b2)) && segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    point_in_polygon(pa[0], pb) || point_in_polygon(pb[0], pa)
}

/// Collision-free indicator for one relative pose.
///
/// Agent 2 is placed at `anchor_pose2`, agent 1 at `anchor_pose2 +
/// relative_pose`. Returns `true` (indicator 1) when the footprints do not
/// intersect.
pub fn collision_indicator(
    poly1: &Polygon2D,
    poly2: &Polygon2D,
    relative_pose: Pose2D,
    anchor_pose2: Pose2D,
) -> bool {
    let w2 = place(poly2, anchor_pose2);
    let w1 = place(poly1, anchor_pose2.compose_offset(relative_pose));
    !polygons_intersect(&w1, &w2)
}
