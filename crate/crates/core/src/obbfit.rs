//! Oriented box fitting.
//!
//! Every box is built in two stages. *Adaptation* picks the axes from a
//! covariance matrix, *adjustment* sizes the box by projecting geometry onto
//! those axes. Elementary (leaf) boxes add a third stage, *increment*, which
//! widens both sides by the segment's roughness tolerance.
//!
//! Super-box axes come either from the arc-length-weighted centroids of the
//! elementary boxes underneath, or from the matching segment of a coarser
//! contour in the pyramid.

use serde::Serialize;

use crate::contour::{
    power_coefficients, ClosedContour, SamplingMode, DEFAULT_ORIENTATION_SAMPLES,
};
use crate::error::{Error, Result};
use crate::geom::{RigidPose, Vec2};
use crate::multires::{AnalysisKind, ContourPyramid, SegmentId, DEFAULT_MIN_LEVEL};

/// Relative discriminant below which a covariance has no preferred direction.
const ISOTROPY_RATIO: f64 = 1e-12;

/// Second moments of a 2D point set about its mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Covariance2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
    pub mean: Vec2,
}

impl Covariance2 {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Eigenvalues, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_trace = 0.5 * self.trace();
        let root = 0.5 * ((self.xx - self.yy).powi(2) + 4.0 * self.xy * self.xy).sqrt();
        (half_trace + root, half_trace - root)
    }
}

/// Raw-moment covariance: `w_xy = (1/r) Σ p_x p_y − mean_x mean_y`.
pub fn covariance_of_points(points: &[Vec2]) -> Result<Covariance2> {
    if points.len() < 2 {
        return Err(Error::domain(format!(
            "covariance needs at least 2 points, got {}",
            points.len()
        )));
    }
    let r = points.len() as f64;
    let mut sum = Vec2::ZERO;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        sum += *p;
        sxx += p.x * p.x;
        sxy += p.x * p.y;
        syy += p.y * p.y;
    }
    let mean = sum / r;
    Ok(Covariance2 {
        xx: sxx / r - mean.x * mean.x,
        xy: sxy / r - mean.x * mean.y,
        yy: syy / r - mean.y * mean.y,
        mean,
    })
}

/// Weighted central covariance with weights normalised by their sum.
pub fn weighted_covariance(points: &[Vec2], weights: &[f64]) -> Result<Covariance2> {
    if points.len() != weights.len() {
        return Err(Error::domain("points and weights differ in length"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::domain(format!(
            "total weight must be positive, got {total}"
        )));
    }
    let mut mean = Vec2::ZERO;
    for (p, w) in points.iter().zip(weights) {
        mean += *p * (*w / total);
    }
    let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
    for (p, w) in points.iter().zip(weights) {
        let d = *p - mean;
        let w = *w / total;
        xx += w * d.x * d.x;
        xy += w * d.x * d.y;
        yy += w * d.y * d.y;
    }
    Ok(Covariance2 { xx, xy, yy, mean })
}

/// An orthonormal frame; `axis2` is `axis1` turned a quarter counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axes {
    pub axis1: Vec2,
    pub axis2: Vec2,
}

impl Axes {
    pub const WORLD: Axes = Axes {
        axis1: Vec2::X,
        axis2: Vec2::Y,
    };

    /// Frame whose major axis is `direction`, sign-canonicalised.
    /// Zero vectors give the world frame.
    pub fn from_direction(direction: Vec2) -> Axes {
        let Some(mut d) = direction.try_normalize() else {
            return Axes::WORLD;
        };
        if d.x < 0.0 || (d.x == 0.0 && d.y < 0.0) {
            d = -d;
        }
        Axes {
            axis1: d,
            axis2: d.perp(),
        }
    }

    pub fn as_array(&self) -> [Vec2; 2] {
        [self.axis1, self.axis2]
    }
}

/// Eigenvector frame of `cov`, major axis first. When the covariance has no
/// dominant direction the frame is built from `fallback` instead.
pub fn principal_axes(cov: &Covariance2, fallback: Vec2) -> Axes {
    let diff = cov.xx - cov.yy;
    let discriminant = diff * diff + 4.0 * cov.xy * cov.xy;
    let trace = cov.trace();
    if discriminant <= ISOTROPY_RATIO * trace * trace {
        return Axes::from_direction(fallback);
    }
    let angle = 0.5 * (2.0 * cov.xy).atan2(diff);
    let (s, c) = angle.sin_cos();
    Axes::from_direction(Vec2::new(c, s))
}

/// Box fitting parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitParams {
    /// Samples per segment used for orientation (`r`).
    pub orientation_samples: usize,
    pub sampling: SamplingMode,
    /// Filter used when a tree builds its own pyramid.
    pub analysis: AnalysisKind,
    /// Coarsest pyramid level used for multiresolution adaptation.
    pub min_level: u32,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            orientation_samples: DEFAULT_ORIENTATION_SAMPLES,
            sampling: SamplingMode::Parameter,
            analysis: AnalysisKind::default(),
            min_level: DEFAULT_MIN_LEVEL,
        }
    }
}

impl FitParams {
    pub fn with_samples(r: usize) -> Self {
        FitParams {
            orientation_samples: r,
            ..Default::default()
        }
    }
}

/// A rectangle with arbitrary orientation, plus the bookkeeping the
/// hierarchy needs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientedBox {
    pub center: Vec2,
    pub axes: [Vec2; 2],
    pub half_extents: [f64; 2],
    /// Roughness tolerance. Already folded into the extents.
    pub tolerance: f64,
    /// Arc length of the bounded contour portion.
    pub segment_length: f64,
    /// Half-open range of leaf segments covered.
    pub leaf_range: (usize, usize),
}

impl OrientedBox {
    pub fn axis_aligned(center: Vec2, half_extents: [f64; 2]) -> Self {
        OrientedBox::new(center, Axes::WORLD, half_extents)
    }

    pub fn new(center: Vec2, axes: Axes, half_extents: [f64; 2]) -> Self {
        OrientedBox {
            center,
            axes: axes.as_array(),
            half_extents,
            tolerance: 0.0,
            segment_length: 0.0,
            leaf_range: (0, 1),
        }
    }

    /// Box with rotation `angle` (radians) of its first axis.
    pub fn rotated(center: Vec2, angle: f64, half_extents: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        let axis1 = Vec2::new(c, s);
        OrientedBox::new(
            center,
            Axes {
                axis1,
                axis2: axis1.perp(),
            },
            half_extents,
        )
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_extents[0] * self.half_extents[1]
    }

    /// Counter-clockwise corners.
    pub fn corners(&self) -> [Vec2; 4] {
        let u = self.axes[0] * self.half_extents[0];
        let v = self.axes[1] * self.half_extents[1];
        let c = self.center;
        [c - u - v, c + u - v, c + u + v, c - u + v]
    }

    /// Projection interval of the box onto the unit direction `axis`.
    #[inline]
    pub fn project(&self, axis: Vec2) -> (f64, f64) {
        let mid = self.center.dot(axis);
        let radius = self.half_extents[0] * self.axes[0].dot(axis).abs()
            + self.half_extents[1] * self.axes[1].dot(axis).abs();
        (mid - radius, mid + radius)
    }

    /// Positive outside the box, non-positive inside; equals the Chebyshev
    /// distance in the box frame.
    pub fn signed_excess(&self, p: Vec2) -> f64 {
        let d = p - self.center;
        let e1 = d.dot(self.axes[0]).abs() - self.half_extents[0];
        let e2 = d.dot(self.axes[1]).abs() - self.half_extents[1];
        e1.max(e2)
    }

    pub fn contains(&self, p: Vec2, eps: f64) -> bool {
        self.signed_excess(p) <= eps
    }

    /// Same box moved by `pose`; extents, tolerance and bookkeeping unchanged.
    pub fn transformed(&self, pose: &RigidPose) -> OrientedBox {
        OrientedBox {
            center: pose.apply(self.center),
            axes: [pose.rotate(self.axes[0]), pose.rotate(self.axes[1])],
            ..self.clone()
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_range.1 - self.leaf_range.0
    }

    pub fn is_leaf(&self) -> bool {
        self.leaf_count() == 1
    }
}

/// Exact `[min, max]` of `axis · f(t)` for `t ∈ [0, 1]` over one cubic
/// segment given by its four control points.
pub fn cubic_projection_range(controls: &[Vec2; 4], axis: Vec2) -> (f64, f64) {
    let a = power_coefficients(controls).map(|c| c.dot(axis));
    let value = |t: f64| a[0] + t * (a[1] + t * (a[2] + t * a[3]));
    let mut lo = value(0.0).min(value(1.0));
    let mut hi = value(0.0).max(value(1.0));
    let mut consider = |t: f64| {
        if t > 0.0 && t < 1.0 {
            let v = value(t);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    };
    // derivative: a1 + 2 a2 t + 3 a3 t²
    let (qa, qb, qc) = (3.0 * a[3], 2.0 * a[2], a[1]);
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if scale == 0.0 {
        return (lo, hi);
    }
    if qa.abs() <= 1e-14 * scale {
        if qb != 0.0 {
            consider(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let sign = if qb >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (qb + sign * sq);
            consider(q / qa);
            if q != 0.0 {
                consider(qc / q);
            }
        }
    }
    (lo, hi)
}

/// Elementary box of one segment: adapt, adjust, increment.
pub fn fit_elementary_box(
    contour: &ClosedContour,
    segment: usize,
    params: &FitParams,
) -> Result<OrientedBox> {
    let samples = contour.sample_segment(segment, params.orientation_samples, params.sampling)?;
    let cov = covariance_of_points(&samples)?;
    let chord = *samples.last().unwrap() - samples[0];
    let axes = principal_axes(&cov, chord);

    let controls = contour.controls(segment)?;
    let origin = cov.mean;
    let mut center = origin;
    let mut half_extents = [0.0; 2];
    for (k, axis) in axes.as_array().into_iter().enumerate() {
        let (lo, hi) = cubic_projection_range(&controls, axis);
        let base = origin.dot(axis);
        let (lo, hi) = (lo - base, hi - base);
        half_extents[k] = 0.5 * (hi - lo);
        center += axis * (0.5 * (lo + hi));
    }

    let tolerance = contour.segment_tolerance(segment)?;
    Ok(OrientedBox {
        center,
        axes: axes.as_array(),
        half_extents: half_extents.map(|h| h + tolerance),
        tolerance,
        segment_length: contour.segment_arc_length(segment)?,
        leaf_range: (segment, segment + 1),
    })
}

/// Axes from the arc-length-weighted centroids of elementary boxes.
pub fn superbox_axes_elementary(boxes: &[OrientedBox]) -> Result<Axes> {
    if boxes.len() < 2 {
        return Err(Error::domain(format!(
            "super box needs at least 2 children, got {}",
            boxes.len()
        )));
    }
    let centers: Vec<Vec2> = boxes.iter().map(|b| b.center).collect();
    let weights: Vec<f64> = boxes.iter().map(|b| b.segment_length).collect();
    let cov = weighted_covariance(&centers, &weights)?;
    let chord = *centers.last().unwrap() - centers[0];
    Ok(principal_axes(&cov, chord))
}

/// Axes from `r` samples of the matching coarse-contour segment.
///
/// Fails with [`Error::BelowMinLevel`] when the pyramid does not reach that
/// level; callers then fall back to [`superbox_axes_elementary`].
pub fn superbox_axes_multires(
    pyramid: &ContourPyramid,
    segment: SegmentId,
    r: usize,
) -> Result<Axes> {
    let samples = pyramid.sample_segment(segment, r)?;
    let cov = covariance_of_points(&samples)?;
    let chord = *samples.last().unwrap() - samples[0];
    Ok(principal_axes(&cov, chord))
}

/// Sizes a box on the given axes so that it covers every corner of
/// `children`. Projections are taken about the length-weighted mean of the
/// child centres.
pub fn fit_superbox(axes: Axes, children: &[OrientedBox]) -> Result<OrientedBox> {
    if children.is_empty() {
        return Err(Error::domain("super box needs at least one child"));
    }
    let total_length: f64 = children.iter().map(|c| c.segment_length).sum();
    let origin = if total_length > 0.0 {
        children.iter().fold(Vec2::ZERO, |acc, c| {
            acc + c.center * (c.segment_length / total_length)
        })
    } else {
        children.iter().fold(Vec2::ZERO, |acc, c| acc + c.center) / children.len() as f64
    };

    let mut center = origin;
    let mut half_extents = [0.0; 2];
    for (k, axis) in axes.as_array().into_iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for child in children {
            let (a, b) = child.project(axis);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        let base = origin.dot(axis);
        let (lo, hi) = (lo - base, hi - base);
        half_extents[k] = 0.5 * (hi - lo);
        center += axis * (0.5 * (lo + hi));
    }

    let start = children.iter().map(|c| c.leaf_range.0).min().unwrap();
    let end = children.iter().map(|c| c.leaf_range.1).max().unwrap();
    let covered: usize = children.iter().map(OrientedBox::leaf_count).sum();
    if covered != end - start {
        return Err(Error::domain(
            "children do not cover a contiguous leaf range",
        ));
    }

    Ok(OrientedBox {
        center,
        axes: axes.as_array(),
        half_extents,
        tolerance: children.iter().map(|c| c.tolerance).fold(0.0, f64::max),
        segment_length: total_length,
        leaf_range: (start, end),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_contour() -> ClosedContour {
        ClosedContour::smooth((0..8).map(|k| Vec2::new(k as f64, 0.0)).collect()).unwrap()
    }

    #[test]
    fn collinear_covariance_by_hand() {
        let pts: Vec<Vec2> = (0..5).map(|k| Vec2::new(k as f64, 0.0)).collect();
        let cov = covariance_of_points(&pts).unwrap();
        assert_eq!(cov.mean, Vec2::new(2.0, 0.0));
        assert!((cov.xx - 2.0).abs() < 1e-15);
        assert_eq!(cov.xy, 0.0);
        assert_eq!(cov.yy, 0.0);
        let axes = principal_axes(&cov, Vec2::Y);
        assert_eq!(axes.axis1, Vec2::X);
        assert_eq!(axes.axis2, Vec2::Y);
    }

    #[test]
    fn repeated_point_has_zero_covariance() {
        let cov = covariance_of_points(&[Vec2::new(1.5, -2.0); 6]).unwrap();
        assert!(cov.xx.abs() < 1e-15 && cov.xy.abs() < 1e-15 && cov.yy.abs() < 1e-15);
        assert!(covariance_of_points(&[Vec2::ZERO]).is_err());
    }

    #[test]
    fn isotropic_uses_fallback() {
        let cov = Covariance2 {
            xx: 1.0,
            xy: 0.0,
            yy: 1.0,
            mean: Vec2::ZERO,
        };
        assert_eq!(principal_axes(&cov, Vec2::Y).axis1, Vec2::Y);
        assert_eq!(principal_axes(&cov, Vec2::ZERO).axis1, Vec2::X);
        // fallback is sign-canonicalised
        assert_eq!(principal_axes(&cov, -Vec2::Y).axis1, Vec2::Y);
    }

    #[test]
    fn diagonal_dominant_covariance() {
        let cov = Covariance2 {
            xx: 2.0,
            xy: 1.0,
            yy: 2.0,
            mean: Vec2::ZERO,
        };
        let axes = principal_axes(&cov, Vec2::X);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((axes.axis1 - Vec2::new(h, h)).norm() < 1e-12);
        assert!((axes.axis2 - Vec2::new(-h, h)).norm() < 1e-12);
        let (big, small) = cov.eigenvalues();
        assert!((big - 3.0).abs() < 1e-12 && (small - 1.0).abs() < 1e-12);
    }

    #[test]
    fn straight_segment_gives_thin_box() {
        let c = line_contour();
        let b = fit_elementary_box(&c, 3, &FitParams::default()).unwrap();
        assert!((b.half_extents[0] - 0.5).abs() < 1e-9);
        assert!(b.half_extents[1] <= 1e-9);
        assert_eq!(b.axes[0], Vec2::X);
        assert!((b.center - Vec2::new(3.5, 0.0)).norm() < 1e-12);
        assert!((b.segment_length - 1.0).abs() < 1e-9);
    }

    #[test]
    fn increment_is_additive() {
        let smooth = line_contour();
        let rough =
            ClosedContour::with_uniform_sigma(smooth.control_points().to_vec(), 0.2, 3.0).unwrap();
        let a = fit_elementary_box(&smooth, 3, &FitParams::default()).unwrap();
        let b = fit_elementary_box(&rough, 3, &FitParams::default()).unwrap();
        for k in 0..2 {
            assert!((b.half_extents[k] - a.half_extents[k] - 0.6).abs() < 1e-12);
        }
        assert_eq!(a.center, b.center);
        assert!((b.tolerance - 0.6).abs() < 1e-15);
    }

    #[test]
    fn equal_weight_pair_axes() {
        let mut a = OrientedBox::axis_aligned(Vec2::ZERO, [0.1, 0.1]);
        let mut b = OrientedBox::axis_aligned(Vec2::new(2.0, 0.0), [0.1, 0.1]);
        a.segment_length = 1.0;
        b.segment_length = 1.0;
        b.leaf_range = (1, 2);
        let axes = superbox_axes_elementary(&[a.clone(), b]).unwrap();
        assert_eq!(axes.axis1, Vec2::X);
        assert!(superbox_axes_elementary(&[a]).is_err());
    }

    #[test]
    fn weighted_mean() {
        let cov = weighted_covariance(&[Vec2::ZERO, Vec2::new(4.0, 0.0)], &[3.0, 1.0]).unwrap();
        assert!((cov.mean - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!(weighted_covariance(&[Vec2::ZERO, Vec2::X], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn superbox_of_identical_children_is_the_child() {
        let mut child = OrientedBox::rotated(Vec2::new(1.0, 2.0), 0.4, [1.0, 0.5]);
        child.segment_length = 2.0;
        let mut twin = child.clone();
        twin.leaf_range = (1, 2);
        let axes = Axes {
            axis1: child.axes[0],
            axis2: child.axes[1],
        };
        let sb = fit_superbox(axes, &[child.clone(), twin]).unwrap();
        assert!((sb.center - child.center).norm() < 1e-12);
        assert!((sb.half_extents[0] - 1.0).abs() < 1e-12);
        assert!((sb.half_extents[1] - 0.5).abs() < 1e-12);
        assert_eq!(sb.leaf_range, (0, 2));
        assert_eq!(sb.segment_length, 4.0);
    }

    #[test]
    fn superbox_interval_union() {
        let a = OrientedBox::axis_aligned(Vec2::ZERO, [1.0, 1.0]);
        let mut b = OrientedBox::axis_aligned(Vec2::new(4.0, 0.0), [1.0, 1.0]);
        b.leaf_range = (1, 2);
        let sb = fit_superbox(Axes::WORLD, &[a, b]).unwrap();
        assert!((sb.center - Vec2::new(2.0, 0.0)).norm() < 1e-12);
        assert!((sb.half_extents[0] - 3.0).abs() < 1e-12);
        assert!((sb.half_extents[1] - 1.0).abs() < 1e-12);
        assert!(fit_superbox(Axes::WORLD, &[]).is_err());
    }

    #[test]
    fn superbox_rejects_gapped_children() {
        let a = OrientedBox::axis_aligned(Vec2::ZERO, [1.0, 1.0]);
        let mut b = a.clone();
        b.leaf_range = (2, 3);
        assert!(fit_superbox(Axes::WORLD, &[a, b]).is_err());
    }

    #[test]
    fn projection_range_finds_interior_extremum() {
        // symmetric arch, apex at t = 0.5
        let c = [
            Vec2::new(-3.0, 0.0),
            Vec2::new(-1.0, 3.0),
            Vec2::new(1.0, 3.0),
            Vec2::new(3.0, 0.0),
        ];
        let (lo, hi) = cubic_projection_range(&c, Vec2::Y);
        let top = crate::contour::spline_point(&c, 1, 0.5).y;
        assert!((hi - top).abs() < 1e-14, "{hi} vs {top}");
        let brute = (0..=10_000)
            .map(|k| crate::contour::spline_point(&c, 1, k as f64 / 1e4).y)
            .fold(f64::INFINITY, f64::min);
        assert!((lo - brute).abs() < 1e-12);
    }
}
