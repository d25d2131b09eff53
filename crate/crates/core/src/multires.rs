//! Coarse-to-fine pyramid of control polygons.
//!
//! Level `j` holds `2^j` control points. Coarsening halves the polygon so
//! that segment `i` at level `j` corresponds to segments `2i` and `2i + 1` at
//! level `j + 1`; that dyadic correspondence is what the box hierarchy uses.

use serde::Serialize;

use crate::contour::{spline_point, ClosedContour};
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Coarsest level a closed cubic B-spline can use (4 control points).
pub const DEFAULT_MIN_LEVEL: u32 = 2;

/// A linear analysis step taking `2k` control points to `k`.
pub trait AnalysisFilter {
    fn coarsen(&self, points: &[Vec2]) -> Vec<Vec2>;
}

/// Three-tap `(1/4, 1/2, 1/4)` average centred on the even points.
#[derive(Clone, Copy, Debug, Default)]
pub struct AveragingFilter;

impl AnalysisFilter for AveragingFilter {
    fn coarsen(&self, points: &[Vec2]) -> Vec<Vec2> {
        let n = points.len();
        (0..n / 2)
            .map(|i| {
                let prev = points[(2 * i + n - 1) % n];
                let mid = points[2 * i];
                let next = points[(2 * i + 1) % n];
                (prev + mid * 2.0 + next) * 0.25
            })
            .collect()
    }
}

/// Least-squares inverse of cubic B-spline refinement: the coarse polygon
/// whose midpoint-subdivided control polygon is closest to the input.
///
/// Solves `(PᵀP) c = Pᵀ f` by conjugate gradients, where `P` doubles a
/// closed polygon with the `(1, 6, 1)/8` and `(1, 1)/2` masks.
#[derive(Clone, Copy, Debug)]
pub struct LeastSquaresFilter {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for LeastSquaresFilter {
    fn default() -> Self {
        LeastSquaresFilter {
            max_iterations: 500,
            tolerance: 1e-15,
        }
    }
}

/// Cubic B-spline refinement of a closed polygon (`k` points to `2k`).
pub fn refine(coarse: &[Vec2]) -> Vec<Vec2> {
    let k = coarse.len();
    let mut fine = Vec::with_capacity(2 * k);
    for i in 0..k {
        let prev = coarse[(i + k - 1) % k];
        let here = coarse[i];
        let next = coarse[(i + 1) % k];
        fine.push((prev + here * 6.0 + next) / 8.0);
        fine.push((here + next) * 0.5);
    }
    fine
}

fn refine_transpose(fine: &[Vec2]) -> Vec<Vec2> {
    let n = fine.len();
    (0..n / 2)
        .map(|i| {
            let e = 2 * i;
            fine[e] * 0.75
                + (fine[(e + n - 2) % n] + fine[(e + 2) % n]) * 0.125
                + (fine[(e + n - 1) % n] + fine[(e + 1) % n]) * 0.5
        })
        .collect()
}

impl AnalysisFilter for LeastSquaresFilter {
    fn coarsen(&self, points: &[Vec2]) -> Vec<Vec2> {
        let normal = |x: &[Vec2]| refine_transpose(&refine(x));
        let dot = |a: &[Vec2], b: &[Vec2]| a.iter().zip(b).map(|(p, q)| p.dot(*q)).sum::<f64>();
        let rhs = refine_transpose(points);
        let mut x = AveragingFilter.coarsen(points);
        let ax = normal(&x);
        let mut r: Vec<Vec2> = rhs.iter().zip(&ax).map(|(b, a)| *b - *a).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let scale = dot(&rhs, &rhs).max(f64::MIN_POSITIVE);
        for _ in 0..self.max_iterations {
            if rr <= self.tolerance * self.tolerance * scale {
                break;
            }
            let ap = normal(&p);
            let alpha = rr / dot(&p, &ap);
            for ((xi, pi), (ri, api)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
                *xi += *pi * alpha;
                *ri = *ri - *api * alpha;
            }
            let rr_next = dot(&r, &r);
            let beta = rr_next / rr;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = *ri + *pi * beta;
            }
            rr = rr_next;
        }
        x
    }
}

/// Selectable analysis filter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisKind {
    /// [`AveragingFilter`].
    Averaging,
    /// [`LeastSquaresFilter`] with default settings.
    #[default]
    LeastSquares,
}

impl AnalysisFilter for AnalysisKind {
    fn coarsen(&self, points: &[Vec2]) -> Vec<Vec2> {
        match self {
            AnalysisKind::Averaging => AveragingFilter.coarsen(points),
            AnalysisKind::LeastSquares => LeastSquaresFilter::default().coarsen(points),
        }
    }
}

impl std::str::FromStr for AnalysisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "averaging" => Ok(AnalysisKind::Averaging),
            "least-squares" => Ok(AnalysisKind::LeastSquares),
            other => Err(Error::domain(format!("unknown analysis filter {other:?}"))),
        }
    }
}

/// One coarsening step with the default filter.
pub fn coarsen_once(points: &[Vec2]) -> Result<Vec<Vec2>> {
    coarsen_with(&AveragingFilter, points)
}

pub fn coarsen_with<F: AnalysisFilter + ?Sized>(filter: &F, points: &[Vec2]) -> Result<Vec<Vec2>> {
    if !points.len().is_multiple_of(2) || points.len() < 8 {
        return Err(Error::domain(format!(
            "cannot halve {} control points into a closed polygon of at least 4",
            points.len()
        )));
    }
    Ok(filter.coarsen(points))
}

/// Identifies segment `index` of the contour at resolution `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SegmentId {
    pub level: u32,
    pub index: usize,
}

impl SegmentId {
    pub const fn new(level: u32, index: usize) -> Self {
        SegmentId { level, index }
    }

    pub const fn root() -> Self {
        SegmentId { level: 0, index: 0 }
    }

    /// Number of segments at this level.
    pub const fn level_width(&self) -> usize {
        1 << self.level
    }

    pub fn is_valid(&self) -> bool {
        self.index < self.level_width()
    }

    /// The two segments one level finer that this one splits into.
    pub const fn children(&self) -> (SegmentId, SegmentId) {
        (
            SegmentId::new(self.level + 1, 2 * self.index),
            SegmentId::new(self.level + 1, 2 * self.index + 1),
        )
    }

    pub const fn parent(&self) -> Option<SegmentId> {
        if self.level == 0 {
            None
        } else {
            Some(SegmentId::new(self.level - 1, self.index / 2))
        }
    }

    /// Indices of the descendant segments at `finest_level`, as a half-open
    /// range.
    pub fn leaf_range(&self, finest_level: u32) -> std::ops::Range<usize> {
        let span = 1usize << (finest_level - self.level);
        self.index * span..(self.index + 1) * span
    }
}

/// Control polygons `C^n, C^{n-1}, ..., C^{min}` of one contour.
#[derive(Clone, Debug, Serialize)]
pub struct ContourPyramid {
    min_level: u32,
    finest_level: u32,
    /// `levels[k]` is level `min_level + k`.
    levels: Vec<Vec<Vec2>>,
}

impl ContourPyramid {
    pub fn build(contour: &ClosedContour, min_level: u32) -> Result<Self> {
        Self::build_with(&AveragingFilter, contour, min_level)
    }

    pub fn build_with<F: AnalysisFilter + ?Sized>(
        filter: &F,
        contour: &ClosedContour,
        min_level: u32,
    ) -> Result<Self> {
        let n = contour.level();
        if min_level < DEFAULT_MIN_LEVEL {
            return Err(Error::domain(format!(
                "min_level must be at least {DEFAULT_MIN_LEVEL}, got {min_level}"
            )));
        }
        if n < min_level {
            return Err(Error::domain(format!(
                "contour level {n} is coarser than min_level {min_level}"
            )));
        }
        let mut levels = vec![contour.control_points().to_vec()];
        for _ in min_level..n {
            let coarse = coarsen_with(filter, levels.last().unwrap())?;
            levels.push(coarse);
        }
        levels.reverse();
        Ok(ContourPyramid {
            min_level,
            finest_level: n,
            levels,
        })
    }

    pub fn min_level(&self) -> u32 {
        self.min_level
    }

    pub fn finest_level(&self) -> u32 {
        self.finest_level
    }

    pub fn contains_level(&self, level: u32) -> bool {
        (self.min_level..=self.finest_level).contains(&level)
    }

    /// Control polygon at `level`.
    pub fn level(&self, level: u32) -> Result<&[Vec2]> {
        if level < self.min_level {
            return Err(Error::BelowMinLevel {
                level,
                min_level: self.min_level,
            });
        }
        self.levels
            .get((level - self.min_level) as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::domain(format!("level {level} is finer than the pyramid")))
    }

    /// Iterator over `(level, polygon)` from coarse to fine.
    pub fn levels(&self) -> impl Iterator<Item = (u32, &[Vec2])> {
        self.levels
            .iter()
            .enumerate()
            .map(move |(k, l)| (self.min_level + k as u32, l.as_slice()))
    }

    pub fn evaluate(&self, segment: SegmentId, t: f64) -> Result<Vec2> {
        let poly = self.level(segment.level)?;
        if segment.index >= poly.len() {
            return Err(Error::domain(format!("segment {segment:?} out of range")));
        }
        Ok(spline_point(poly, segment.index, t))
    }

    /// `r` parameter-uniform samples on a segment of the coarse contour.
    pub fn sample_segment(&self, segment: SegmentId, r: usize) -> Result<Vec<Vec2>> {
        if r < 2 {
            return Err(Error::domain(format!("need at least 2 samples, got {r}")));
        }
        (0..r)
            .map(|k| self.evaluate(segment, k as f64 / (r - 1) as f64))
            .collect()
    }

    pub fn children_of(&self, segment: SegmentId) -> Result<(SegmentId, SegmentId)> {
        if !segment.is_valid() {
            return Err(Error::domain(format!("segment {segment:?} out of range")));
        }
        if segment.level >= self.finest_level {
            return Err(Error::domain(format!(
                "segment {segment:?} is already at the finest level"
            )));
        }
        Ok(segment.children())
    }

    /// True when the finest level is exactly `contour`'s control polygon.
    pub fn matches(&self, contour: &ClosedContour) -> bool {
        self.levels.last().map(Vec::as_slice) == Some(contour.control_points())
    }

    /// One JSON array of polygons, coarse to fine.
    pub fn to_json_string(&self) -> String {
        let polys: Vec<&Vec<Vec2>> = self.levels.iter().collect();
        serde_json::to_string_pretty(&polys).expect("pyramid serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polygon(n: usize, radius: f64) -> Vec<Vec2> {
        (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Vec2::new(radius * a.cos(), radius * a.sin())
            })
            .collect()
    }

    #[test]
    fn constant_polygon_is_fixed() {
        let p = Vec2::new(3.5, -1.0);
        let out = coarsen_once(&[p; 16]).unwrap();
        assert_eq!(out.len(), 8);
        assert!(out.iter().all(|q| (*q - p).norm() < 1e-15));
    }

    #[test]
    fn translation_commutes() {
        let base = polygon(8, 1.0);
        let shift = Vec2::new(5.0, -3.0);
        let moved: Vec<Vec2> = base.iter().map(|p| *p + shift).collect();
        let a = coarsen_once(&base).unwrap();
        let b = coarsen_once(&moved).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((*p + shift - *q).norm() < 1e-12);
        }
    }

    #[test]
    fn refuses_to_go_below_four_points() {
        assert!(coarsen_once(&polygon(4, 1.0)).is_err());
        assert!(coarsen_once(&polygon(6, 1.0)).is_err());
    }

    #[test]
    fn single_level_pyramid() {
        let c = ClosedContour::smooth(polygon(4, 1.0)).unwrap();
        let p = ContourPyramid::build(&c, 2).unwrap();
        assert_eq!(p.levels().count(), 1);
        assert!(p.matches(&c));
        assert!(matches!(p.level(1), Err(Error::BelowMinLevel { .. })));
    }

    #[test]
    fn min_level_above_contour_level_fails() {
        let c = ClosedContour::smooth(polygon(8, 1.0)).unwrap();
        assert!(ContourPyramid::build(&c, 4).is_err());
        assert!(ContourPyramid::build(&c, 1).is_err());
    }

    #[test]
    fn children_index_doubling() {
        let (a, b) = SegmentId::new(3, 0).children();
        assert_eq!((a, b), (SegmentId::new(4, 0), SegmentId::new(4, 1)));
        let (a, b) = SegmentId::new(3, 5).children();
        assert_eq!((a.index, b.index), (10, 11));
        let (c0, c1) = a.children();
        let (c2, c3) = b.children();
        assert_eq!([c0.index, c1.index, c2.index, c3.index], [20, 21, 22, 23]);
        assert_eq!(c3.level, 5);
    }

    #[test]
    fn children_of_leaf_is_rejected() {
        let c = ClosedContour::smooth(polygon(16, 1.0)).unwrap();
        let p = ContourPyramid::build(&c, 2).unwrap();
        assert!(p.children_of(SegmentId::new(4, 3)).is_err());
        assert!(p.children_of(SegmentId::new(3, 3)).is_ok());
        assert!(p.children_of(SegmentId::new(3, 8)).is_err());
    }

    #[test]
    fn leaf_range_is_dyadic_block() {
        assert_eq!(SegmentId::new(2, 3).leaf_range(5), 24..32);
        assert_eq!(SegmentId::root().leaf_range(9), 0..512);
    }

    #[test]
    fn least_squares_inverts_refinement() {
        let coarse: Vec<Vec2> = (0..8)
            .map(|k| Vec2::new((k as f64).sin() * 3.0, (k * k) as f64 * 0.1))
            .collect();
        let back = LeastSquaresFilter::default().coarsen(&refine(&coarse));
        for (a, b) in back.iter().zip(&coarse) {
            assert!(a.distance(*b) < 1e-10);
        }
    }

    #[test]
    fn analysis_kind_parsing() {
        assert_eq!(
            "averaging".parse::<AnalysisKind>().unwrap(),
            AnalysisKind::Averaging
        );
        assert_eq!(
            "least-squares".parse::<AnalysisKind>().unwrap(),
            AnalysisKind::LeastSquares
        );
        assert!("wavelet".parse::<AnalysisKind>().is_err());
    }
}
