//! Interference detection between placed box trees.
//!
//! The broad phase walks two trees simultaneously, discarding pairs of
//! boxes that a separating axis proves disjoint and collecting the leaf
//! pairs that survive. The narrow phase then measures the distance between
//! the bounded curve segments and compares it with the combined roughness
//! tolerance.

use serde::Serialize;

use crate::boxtree::BoxTree;
use crate::contour::{spline_point, ClosedContour};
use crate::geom::{RigidPose, Vec2};
use crate::obbfit::OrientedBox;

/// Default slack for the separating-axis test: touching boxes overlap.
pub const DEFAULT_EPS_SEP: f64 = 1e-12;
/// Default slack added to the tolerance sum when confirming a contact.
pub const DEFAULT_EPS_CONTACT: f64 = 1e-9;
/// Default polyline resolution of the narrow phase.
pub const DEFAULT_NARROW_SAMPLES: usize = 64;

/// Environment variable overriding both epsilons: `"1e-9"` sets both,
/// `"1e-12,1e-9"` sets separation then contact.
pub const EPS_ENV_VAR: &str = "OBB2D_EPS";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectParams {
    pub eps_sep: f64,
    pub eps_contact: f64,
    /// Points per segment in the narrow-phase polyline.
    pub narrow_samples: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            eps_sep: DEFAULT_EPS_SEP,
            eps_contact: DEFAULT_EPS_CONTACT,
            narrow_samples: DEFAULT_NARROW_SAMPLES,
        }
    }
}

impl DetectParams {
    /// Defaults, with epsilons overridden from [`EPS_ENV_VAR`] when set.
    pub fn from_env() -> Result<Self, crate::Error> {
        let mut params = DetectParams::default();
        if let Ok(raw) = std::env::var(EPS_ENV_VAR) {
            params.apply_eps_override(&raw)?;
        }
        Ok(params)
    }

    pub fn apply_eps_override(&mut self, raw: &str) -> Result<(), crate::Error> {
        let parse = |s: &str| -> Result<f64, crate::Error> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| crate::Error::domain(format!("bad {EPS_ENV_VAR} value {s:?}")))
        };
        match raw.split_once(',') {
            Some((sep, contact)) => {
                self.eps_sep = parse(sep)?;
                self.eps_contact = parse(contact)?;
            }
            None => {
                let v = parse(raw)?;
                self.eps_sep = v;
                self.eps_contact = v;
            }
        }
        Ok(())
    }
}

/// Separating-axis test over the four edge directions of the two boxes.
pub fn boxes_overlap(a: &OrientedBox, b: &OrientedBox) -> bool {
    boxes_overlap_eps(a, b, DEFAULT_EPS_SEP)
}

/// Like [`boxes_overlap`], treating gaps up to `eps` as touching.
#[inline]
pub fn boxes_overlap_eps(a: &OrientedBox, b: &OrientedBox, eps: f64) -> bool {
    let d = b.center - a.center;
    for axis in a.axes.iter().chain(&b.axes) {
        let ra = a.half_extents[0] * a.axes[0].dot(*axis).abs()
            + a.half_extents[1] * a.axes[1].dot(*axis).abs();
        let rb = b.half_extents[0] * b.axes[0].dot(*axis).abs()
            + b.half_extents[1] * b.axes[1].dot(*axis).abs();
        if d.dot(*axis).abs() > ra + rb + eps {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// The root boxes, or every descendant pair, are disjoint.
    Separate,
    /// Some leaf boxes overlap but no segment pair is within tolerance.
    Candidate,
    /// At least one segment pair is within tolerance.
    Interfering,
}

/// A segment pair within tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Contact {
    pub segment_a: usize,
    pub segment_b: usize,
    pub point_a: Vec2,
    pub point_b: Vec2,
    pub distance: f64,
}

/// Closest points between two discretised segments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proximity {
    pub point_a: Vec2,
    pub point_b: Vec2,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterferenceReport {
    pub status: Status,
    /// Number of box-pair overlap tests executed.
    pub boxes_tested: usize,
    /// `(segment of A, segment of B)` whose leaf boxes overlap.
    pub candidate_pairs: Vec<(usize, usize)>,
    pub contacts: Vec<Contact>,
}

impl InterferenceReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// An object placed in the world for a query.
#[derive(Clone, Copy, Debug)]
pub struct Body<'a> {
    pub tree: &'a BoxTree,
    pub contour: &'a ClosedContour,
    pub pose: RigidPose,
}

impl<'a> Body<'a> {
    pub fn new(tree: &'a BoxTree, contour: &'a ClosedContour, pose: RigidPose) -> Self {
        Body {
            tree,
            contour,
            pose,
        }
    }
}

struct Traversal<'a> {
    a: &'a BoxTree,
    pose_a: &'a RigidPose,
    b: &'a BoxTree,
    pose_b: &'a RigidPose,
    margin: f64,
    tested: usize,
    candidates: Vec<(usize, usize)>,
}

impl Traversal<'_> {
    fn visit(&mut self, ka: usize, kb: usize) {
        let box_a = &self.a.nodes()[ka];
        let box_b = &self.b.nodes()[kb];
        self.tested += 1;
        if !boxes_overlap_eps(
            &box_a.transformed(self.pose_a),
            &box_b.transformed(self.pose_b),
            self.margin,
        ) {
            return;
        }
        match (self.a.children(ka), self.b.children(kb)) {
            (None, None) => self
                .candidates
                .push((self.a.leaf_segment(ka), self.b.leaf_segment(kb))),
            (Some((l, r)), None) => {
                self.visit(l, kb);
                self.visit(r, kb);
            }
            (None, Some((l, r))) => {
                self.visit(ka, l);
                self.visit(ka, r);
            }
            (Some((la, ra)), Some((lb, rb))) => {
                if box_a.area() >= box_b.area() {
                    self.visit(la, kb);
                    self.visit(ra, kb);
                } else {
                    self.visit(ka, lb);
                    self.visit(ka, rb);
                }
            }
        }
    }
}

/// Broad phase: simultaneous descent of both trees from their roots.
///
/// At every overlapping internal pair the node with the larger box is split.
/// The returned report has no contacts; its status is `Separate` or
/// `Candidate`.
pub fn traverse(
    tree_a: &BoxTree,
    pose_a: &RigidPose,
    tree_b: &BoxTree,
    pose_b: &RigidPose,
    params: &DetectParams,
) -> InterferenceReport {
    let mut t = Traversal {
        a: tree_a,
        pose_a,
        b: tree_b,
        pose_b,
        // a contact may be declared up to eps_contact beyond the tolerance
        // band, so the boxes must not be separated by less than that
        margin: params.eps_sep + params.eps_contact,
        tested: 0,
        candidates: Vec::new(),
    };
    t.visit(0, 0);
    InterferenceReport {
        status: if t.candidates.is_empty() {
            Status::Separate
        } else {
            Status::Candidate
        },
        boxes_tested: t.tested,
        candidate_pairs: t.candidates,
        contacts: Vec::new(),
    }
}

/// World-space polyline of `samples` points on one segment.
pub fn segment_polyline(
    contour: &ClosedContour,
    segment: usize,
    pose: &RigidPose,
    samples: usize,
) -> Vec<Vec2> {
    let samples = samples.max(2);
    (0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            pose.apply(spline_point(contour.control_points(), segment, t))
        })
        .collect()
}

/// Closest points between segments `[p0, p1]` and `[q0, q1]`.
pub fn closest_points_on_segments(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> (Vec2, Vec2) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(r);
    let tiny = f64::EPSILON * f64::EPSILON;

    let (s, t);
    if a <= tiny && e <= tiny {
        return (p0, q0);
    }
    if a <= tiny {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= tiny {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p0 + d1 * s, q0 + d2 * t)
}

/// True when the two closed segments cross or touch.
fn segments_intersect(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> Option<Vec2> {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let denom = d1.cross(d2);
    if denom == 0.0 {
        return None;
    }
    let w = q0 - p0;
    let s = w.cross(d2) / denom;
    let t = w.cross(d1) / denom;
    ((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)).then(|| p0 + d1 * s)
}

fn bounds(points: &[Vec2]) -> (Vec2, Vec2) {
    points.iter().fold(
        (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

fn gap_to_bounds(p0: Vec2, p1: Vec2, lo: Vec2, hi: Vec2) -> f64 {
    let dx = (lo.x - p0.x.max(p1.x)).max(p0.x.min(p1.x) - hi.x).max(0.0);
    let dy = (lo.y - p0.y.max(p1.y)).max(p0.y.min(p1.y) - hi.y).max(0.0);
    dx.hypot(dy)
}

/// Minimum distance between two polylines, with the minimising points.
pub fn polyline_proximity(a: &[Vec2], b: &[Vec2]) -> Proximity {
    let (lo, hi) = bounds(b);
    let mut best = Proximity {
        point_a: a[0],
        point_b: b[0],
        distance: a[0].distance(b[0]),
    };
    for wa in a.windows(2) {
        if gap_to_bounds(wa[0], wa[1], lo, hi) > best.distance {
            continue;
        }
        for wb in b.windows(2) {
            if let Some(x) = segments_intersect(wa[0], wa[1], wb[0], wb[1]) {
                return Proximity {
                    point_a: x,
                    point_b: x,
                    distance: 0.0,
                };
            }
            let (pa, pb) = closest_points_on_segments(wa[0], wa[1], wb[0], wb[1]);
            let d = pa.distance(pb);
            if d < best.distance {
                best = Proximity {
                    point_a: pa,
                    point_b: pb,
                    distance: d,
                };
            }
        }
    }
    best
}

/// Distance between two placed smooth segments, measured on polylines of
/// `samples` points each.
pub fn segment_proximity(
    contour_a: &ClosedContour,
    segment_a: usize,
    pose_a: &RigidPose,
    contour_b: &ClosedContour,
    segment_b: usize,
    pose_b: &RigidPose,
    samples: usize,
) -> Proximity {
    let pa = segment_polyline(contour_a, segment_a, pose_a, samples);
    let pb = segment_polyline(contour_b, segment_b, pose_b, samples);
    polyline_proximity(&pa, &pb)
}

/// Narrow phase for one candidate pair: a contact when the segments come
/// within `ζ_A + ζ_B + eps_contact` of each other.
pub fn narrow_phase(
    a: &Body<'_>,
    segment_a: usize,
    b: &Body<'_>,
    segment_b: usize,
    params: &DetectParams,
) -> Option<Contact> {
    let prox = segment_proximity(
        a.contour,
        segment_a,
        &a.pose,
        b.contour,
        segment_b,
        &b.pose,
        params.narrow_samples,
    );
    let reach = a.contour.q_factor() * a.contour.sigma()[segment_a]
        + b.contour.q_factor() * b.contour.sigma()[segment_b]
        + params.eps_contact;
    (prox.distance <= reach).then_some(Contact {
        segment_a,
        segment_b,
        point_a: prox.point_a,
        point_b: prox.point_b,
        distance: prox.distance,
    })
}

/// Broad phase followed by narrow phase on every candidate pair.
pub fn detect_pair(a: &Body<'_>, b: &Body<'_>, params: &DetectParams) -> InterferenceReport {
    let mut report = traverse(a.tree, &a.pose, b.tree, &b.pose, params);
    let mut cache_a: Vec<Option<Vec<Vec2>>> = vec![None; a.contour.segment_count()];
    let mut cache_b: Vec<Option<Vec<Vec2>>> = vec![None; b.contour.segment_count()];
    for &(sa, sb) in &report.candidate_pairs {
        let pa = cache_a[sa]
            .get_or_insert_with(|| segment_polyline(a.contour, sa, &a.pose, params.narrow_samples));
        let pb = cache_b[sb]
            .get_or_insert_with(|| segment_polyline(b.contour, sb, &b.pose, params.narrow_samples));
        let prox = polyline_proximity(pa, pb);
        let reach = a.contour.q_factor() * a.contour.sigma()[sa]
            + b.contour.q_factor() * b.contour.sigma()[sb]
            + params.eps_contact;
        if prox.distance <= reach {
            report.contacts.push(Contact {
                segment_a: sa,
                segment_b: sb,
                point_a: prox.point_a,
                point_b: prox.point_b,
                distance: prox.distance,
            });
        }
    }
    if !report.contacts.is_empty() {
        report.status = Status::Interfering;
    }
    report
}

/// Report for the object pair `(a, b)`, `a < b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub a: usize,
    pub b: usize,
    #[serde(flatten)]
    pub report: InterferenceReport,
}

/// Every unordered object pair, in lexicographic order.
pub fn detect_scene(bodies: &[Body<'_>], params: &DetectParams) -> Vec<PairReport> {
    let mut out = Vec::with_capacity(bodies.len() * bodies.len().saturating_sub(1) / 2);
    for i in 0..bodies.len() {
        for j in i + 1..bodies.len() {
            out.push(PairReport {
                a: i,
                b: j,
                report: detect_pair(&bodies[i], &bodies[j], params),
            });
        }
    }
    out
}

/// Sum of `boxes_tested` over a scene.
pub fn total_boxes_tested(reports: &[PairReport]) -> usize {
    reports.iter().map(|r| r.report.boxes_tested).sum()
}
