//! One-sided penalty contact against the squeezed object.
//!
//! Shapes differ in contact geometry: a ball touches each link at the single
//! closest point with a radial normal, a box presses flat faces against
//! several points per link at once, and a cylinder uses radial normals over
//! a wider patch along the link.

use super::{ObjectSpec, Shape};

/// Outward normal and penetration depth at `point`, or `None` outside.
pub(crate) fn probe(object: &ObjectSpec, point: [f64; 2]) -> Option<([f64; 2], f64)> {
    let dx = point[0] - object.center[0];
    let dy = point[1] - object.center[1];
    match object.shape {
        Shape::Ball | Shape::Cylinder => {
            let dist = (dx * dx + dy * dy).sqrt();
            let depth = object.size - dist;
            if depth <= 0.0 {
                return None;
            }
            if dist < 1e-12 {
                // Degenerate center hit; push along +y deterministically.
                return Some(([0.0, 1.0], depth));
            }
            Some(([dx / dist, dy / dist], depth))
        }
        Shape::Box => {
            let (ax, ay) = (dx.abs(), dy.abs());
            if ax >= object.size || ay >= object.size {
                return None;
            }
            let pen_x = object.size - ax;
            let pen_y = object.size - ay;
            if pen_x <= pen_y {
                let sx = if dx >= 0.0 { 1.0 } else { -1.0 };
                Some(([sx, 0.0], pen_x))
            } else {
                let sy = if dy >= 0.0 { 1.0 } else { -1.0 };
                Some(([0.0, sy], pen_y))
            }
        }
    }
}

/// Penetration depth of a point into the object, zero outside.
pub fn penetration_depth(object: &ObjectSpec, point: [f64; 2]) -> f64 {
    probe(object, point).map(|(_, d)| d).unwrap_or(0.0)
}

/// Penalty force on a link point: `max(0, k*depth + c*depth_rate)` along the
/// outward normal. Never pulls (no sticking).
pub fn contact_force(object: &ObjectSpec, point: [f64; 2], velocity: [f64; 2]) -> [f64; 2] {
    match probe(object, point) {
        None => [0.0, 0.0],
        Some((normal, depth)) => {
            let depth_rate = -(velocity[0] * normal[0] + velocity[1] * normal[1]);
            let magnitude =
                (object.stiffness * depth + object.contact_damping * depth_rate).max(0.0);
            [magnitude * normal[0], magnitude * normal[1]]
        }
    }
}

/// Sample fractions along a link where contact is evaluated, with weights
/// summing to one. The patch realizes the per-shape contact geometry.
pub(crate) fn contact_samples(shape: Shape, closest_t: f64) -> ([(f64, f64); 3], usize) {
    match shape {
        // Single contact at the closest point.
        Shape::Ball => ([(closest_t, 1.0), (0.0, 0.0), (0.0, 0.0)], 1),
        // Flat faces meet the whole link; three spread points.
        Shape::Box => {
            let w = 1.0 / 3.0;
            ([(1.0 / 6.0, w), (0.5, w), (5.0 / 6.0, w)], 3)
        }
        // Wider curved patch around the closest point.
        Shape::Cylinder => {
            let w = 1.0 / 3.0;
            (
                [
                    ((closest_t - 0.35).clamp(0.0, 1.0), w),
                    (closest_t, w),
                    ((closest_t + 0.35).clamp(0.0, 1.0), w),
                ],
                3,
            )
        }
    }
}

/// Parameter of the closest point on segment [a, b] to `p`, in [0, 1].
pub(crate) fn closest_point_t(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    if len_sq < 1e-18 {
        return 0.0;
    }
    ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
}
