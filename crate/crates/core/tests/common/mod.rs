//! Independent geometric oracles shared by the integration tests.
#![allow(dead_code)]

use obb2d::{OrientedBox, Vec2};

/// Polygon clipping of `subject` against convex, counter-clockwise `clip`.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let inside = |p: Vec2| (b - a).cross(p - a) >= 0.0;
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let p = input[j];
            let q = input[(j + 1) % input.len()];
            let (pin, qin) = (inside(p), inside(q));
            if pin {
                out.push(p);
            }
            if pin != qin {
                let d = b - a;
                let t = d.cross(a - p) / d.cross(q - p);
                out.push(p + (q - p) * t);
            }
        }
    }
    out
}

pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(d) / len2).clamp(0.0, 1.0)
    };
    p.distance(a + d * t)
}

/// Smallest distance between the boundaries of two polygons.
pub fn boundary_distance(a: &[Vec2], b: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for (poly, other) in [(a, b), (b, a)] {
        for &p in poly {
            for j in 0..other.len() {
                best = best.min(point_segment_distance(
                    p,
                    other[j],
                    other[(j + 1) % other.len()],
                ));
            }
        }
    }
    best
}

/// Counter-clockwise corners of a box.
pub fn ccw_corners(b: &OrientedBox) -> Vec<Vec2> {
    let mut c = b.corners().to_vec();
    if polygon_area(&c) < 0.0 {
        c.reverse();
    }
    c
}

/// `Some(true)` when the boxes share interior, `Some(false)` when they are
/// apart, `None` when the pair is too close to call.
pub fn overlap_oracle(a: &OrientedBox, b: &OrientedBox, near: f64) -> Option<bool> {
    let (pa, pb) = (ccw_corners(a), ccw_corners(b));
    let area = polygon_area(&clip_convex(&pa, &pb));
    let gap = boundary_distance(&pa, &pb);
    if area > 1e-12 {
        Some(true)
    } else if gap >= near {
        Some(false)
    } else {
        None
    }
}

/// Direct cubic B-spline evaluation by the de Boor recurrence on the
/// integer knot vector; segment `s` spans knots `[s, s + 1)`.
pub fn de_boor(points: &[Vec2], segment: usize, t: f64) -> Vec2 {
    let m = points.len() as isize;
    let s = segment as isize;
    let mut d: Vec<Vec2> = (0..4)
        .map(|j| points[(s - 1 + j).rem_euclid(m) as usize])
        .collect();
    for r in 1..4 {
        for j in (r..4).rev() {
            let alpha = (t + 3.0 - j as f64) / (4 - r) as f64;
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    d[3]
}
