//! Closed contours bounded by periodic uniform cubic B-splines.
//!
//! A contour with `m` control points `c_0 .. c_{m-1}` has `m` segments.
//! Segment `i` is driven by `c_{i-1}, c_i, c_{i+1}, c_{i+2}` (indices mod
//! `m`) and is parameterised locally by `t ∈ [0, 1]`. Each segment carries a
//! roughness standard deviation; the roughness itself is never stored, only
//! the tolerance band `q_factor * sigma` that is guaranteed to cover it with
//! high probability.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{RigidPose, Vec2};

/// Default multiplier turning a roughness standard deviation into a
/// tolerance (about 99.7% two-sided Gaussian coverage).
pub const DEFAULT_Q_FACTOR: f64 = 3.0;

/// Default number of samples used to orient a box.
pub const DEFAULT_ORIENTATION_SAMPLES: usize = 5;

const ARC_LENGTH_REL_TOL: f64 = 1e-9;
const ARC_LENGTH_MAX_CHORDS: usize = 1 << 20;

/// Uniform cubic B-spline basis weights at local parameter `t`.
#[inline]
pub fn basis(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    let t2 = t * t;
    let t3 = t2 * t;
    [
        s * s * s / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

#[inline]
fn basis_derivative(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    [
        -0.5 * s * s,
        1.5 * t * t - 2.0 * t,
        -1.5 * t * t + t + 0.5,
        0.5 * t * t,
    ]
}

/// The four control points that drive segment `segment` of a closed polygon.
#[inline]
pub fn segment_controls(points: &[Vec2], segment: usize) -> [Vec2; 4] {
    let m = points.len();
    [
        points[(segment + m - 1) % m],
        points[segment % m],
        points[(segment + 1) % m],
        points[(segment + 2) % m],
    ]
}

#[inline]
fn blend(c: &[Vec2; 4], w: [f64; 4]) -> Vec2 {
    Vec2::new(
        w[0] * c[0].x + w[1] * c[1].x + w[2] * c[2].x + w[3] * c[3].x,
        w[0] * c[0].y + w[1] * c[1].y + w[2] * c[2].y + w[3] * c[3].y,
    )
}

/// Point at local parameter `t` of segment `segment` of the closed periodic
/// cubic B-spline over `points`. No range checks.
#[inline]
pub fn spline_point(points: &[Vec2], segment: usize, t: f64) -> Vec2 {
    blend(&segment_controls(points, segment), basis(t))
}

/// First derivative with respect to the local parameter.
#[inline]
pub fn spline_tangent(points: &[Vec2], segment: usize, t: f64) -> Vec2 {
    blend(&segment_controls(points, segment), basis_derivative(t))
}

/// Power-basis coefficients `a0 + a1 t + a2 t² + a3 t³` of one segment.
pub fn power_coefficients(c: &[Vec2; 4]) -> [Vec2; 4] {
    let [p0, p1, p2, p3] = *c;
    [
        (p0 + p1 * 4.0 + p2) / 6.0,
        (p2 - p0) * 0.5,
        (p0 - p1 * 2.0 + p2) * 0.5,
        (p3 - p0 + (p1 - p2) * 3.0) / 6.0,
    ]
}

/// How sample parameters are distributed along a segment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// `t = k / (r - 1)`.
    #[default]
    Parameter,
    /// Equal arc-length steps along the smooth segment.
    ArcLength,
}

/// A closed object boundary with per-segment Gaussian roughness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedContour {
    control_points: Vec<Vec2>,
    sigma: Vec<f64>,
    q_factor: f64,
}

#[derive(Deserialize)]
struct ContourFile {
    control_points: Vec<Vec2>,
    #[serde(default)]
    sigma: Vec<f64>,
    #[serde(default = "default_q")]
    q_factor: f64,
}

fn default_q() -> f64 {
    DEFAULT_Q_FACTOR
}

impl<'de> Deserialize<'de> for ClosedContour {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ContourFile::deserialize(d)?;
        let sigma = if f.sigma.is_empty() {
            vec![0.0; f.control_points.len()]
        } else {
            f.sigma
        };
        ClosedContour::new(f.control_points, sigma, f.q_factor).map_err(serde::de::Error::custom)
    }
}

/// Returns `log2(m)` when `m` is a power of two of at least 4.
pub fn dyadic_level(m: usize) -> Option<u32> {
    (m >= 4 && m.is_power_of_two()).then(|| m.trailing_zeros())
}

impl ClosedContour {
    pub fn new(control_points: Vec<Vec2>, sigma: Vec<f64>, q_factor: f64) -> Result<Self> {
        let m = control_points.len();
        if dyadic_level(m).is_none() {
            return Err(Error::domain(format!(
                "contour needs a power-of-two number of control points >= 4, got {m}"
            )));
        }
        if sigma.len() != m {
            return Err(Error::domain(format!(
                "expected {m} roughness values, got {}",
                sigma.len()
            )));
        }
        if let Some((i, s)) = sigma
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && **s >= 0.0))
        {
            return Err(Error::domain(format!(
                "sigma[{i}] = {s} must be finite and >= 0"
            )));
        }
        if control_points
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::domain("control points must be finite"));
        }
        if !(q_factor.is_finite() && q_factor > 0.0) {
            return Err(Error::domain(format!(
                "q_factor must be positive, got {q_factor}"
            )));
        }
        Ok(ClosedContour {
            control_points,
            sigma,
            q_factor,
        })
    }

    /// Smooth contour with no roughness.
    pub fn smooth(control_points: Vec<Vec2>) -> Result<Self> {
        let m = control_points.len();
        ClosedContour::new(control_points, vec![0.0; m], DEFAULT_Q_FACTOR)
    }

    /// Same roughness on every segment.
    pub fn with_uniform_sigma(
        control_points: Vec<Vec2>,
        sigma: f64,
        q_factor: f64,
    ) -> Result<Self> {
        let m = control_points.len();
        ClosedContour::new(control_points, vec![sigma; m], q_factor)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("contour serialises")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }

    pub fn control_points(&self) -> &[Vec2] {
        &self.control_points
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn q_factor(&self) -> f64 {
        self.q_factor
    }

    /// Number of segments (= number of control points).
    pub fn segment_count(&self) -> usize {
        self.control_points.len()
    }

    /// `n` with `m = 2^n`.
    pub fn level(&self) -> u32 {
        self.control_points.len().trailing_zeros()
    }

    /// Copy with every control point moved by `pose`.
    pub fn transformed(&self, pose: &RigidPose) -> ClosedContour {
        ClosedContour {
            control_points: self.control_points.iter().map(|p| pose.apply(*p)).collect(),
            sigma: self.sigma.clone(),
            q_factor: self.q_factor,
        }
    }

    fn check_segment(&self, segment: usize) -> Result<()> {
        if segment < self.segment_count() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "segment {segment} out of range for {} segments",
                self.segment_count()
            )))
        }
    }

    pub fn controls(&self, segment: usize) -> Result<[Vec2; 4]> {
        self.check_segment(segment)?;
        Ok(segment_controls(&self.control_points, segment))
    }

    pub fn evaluate_segment(&self, segment: usize, t: f64) -> Result<Vec2> {
        self.check_segment(segment)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("local parameter {t} outside [0, 1]")));
        }
        Ok(spline_point(&self.control_points, segment, t))
    }

    pub fn tangent(&self, segment: usize, t: f64) -> Result<Vec2> {
        self.check_segment(segment)?;
        Ok(spline_tangent(&self.control_points, segment, t))
    }

    /// Evaluates at a global parameter `u`, wrapping modulo `m`.
    pub fn evaluate(&self, u: f64) -> Vec2 {
        let m = self.segment_count() as f64;
        let w = u.rem_euclid(m);
        let seg = (w.floor() as usize).min(self.segment_count() - 1);
        spline_point(&self.control_points, seg, w - seg as f64)
    }

    pub fn sample_segment_uniform(&self, segment: usize, r: usize) -> Result<Vec<Vec2>> {
        self.sample_segment(segment, r, SamplingMode::Parameter)
    }

    pub fn sample_segment(
        &self,
        segment: usize,
        r: usize,
        mode: SamplingMode,
    ) -> Result<Vec<Vec2>> {
        self.check_segment(segment)?;
        if r < 2 {
            return Err(Error::domain(format!("need at least 2 samples, got {r}")));
        }
        let params: Vec<f64> = match mode {
            SamplingMode::Parameter => (0..r).map(|k| k as f64 / (r - 1) as f64).collect(),
            SamplingMode::ArcLength => self.arc_length_parameters(segment, r),
        };
        Ok(params
            .into_iter()
            .map(|t| spline_point(&self.control_points, segment, t))
            .collect())
    }

    /// Parameters splitting the segment into `r - 1` pieces of equal length,
    /// by inverting a 256-chord cumulative length table.
    fn arc_length_parameters(&self, segment: usize, r: usize) -> Vec<f64> {
        const CHORDS: usize = 256;
        let pts: Vec<Vec2> = (0..=CHORDS)
            .map(|k| spline_point(&self.control_points, segment, k as f64 / CHORDS as f64))
            .collect();
        let mut cumulative = Vec::with_capacity(CHORDS + 1);
        cumulative.push(0.0);
        for w in pts.windows(2) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + w[0].distance(w[1]));
        }
        let total = cumulative[CHORDS];
        if total <= 0.0 {
            return (0..r).map(|k| k as f64 / (r - 1) as f64).collect();
        }
        (0..r)
            .map(|k| {
                let target = total * k as f64 / (r - 1) as f64;
                let j = cumulative.partition_point(|&c| c < target).clamp(1, CHORDS);
                let (lo, hi) = (cumulative[j - 1], cumulative[j]);
                let frac = if hi > lo {
                    (target - lo) / (hi - lo)
                } else {
                    0.0
                };
                ((j - 1) as f64 + frac) / CHORDS as f64
            })
            .collect()
    }

    /// Arc length of the smooth segment.
    ///
    /// Chord sums are refined by doubling; consecutive Richardson-extrapolated
    /// estimates must agree to a relative `1e-9`.
    pub fn segment_arc_length(&self, segment: usize) -> Result<f64> {
        self.check_segment(segment)?;
        let a = power_coefficients(&segment_controls(&self.control_points, segment));
        if a[1..].iter().all(|v| *v == Vec2::ZERO) {
            return Ok(0.0);
        }
        let at = |t: f64| a[0] + (a[1] + (a[2] + a[3] * t) * t) * t;
        let chord_sum = |n: usize| -> f64 {
            let mut prev = at(0.0);
            let mut total = 0.0;
            for k in 1..=n {
                let p = at(k as f64 / n as f64);
                total += prev.distance(p);
                prev = p;
            }
            total
        };
        let mut n = 16;
        let mut coarse = chord_sum(n);
        let mut previous_estimate = f64::NAN;
        loop {
            n *= 2;
            let fine = chord_sum(n);
            let estimate = (4.0 * fine - coarse) / 3.0;
            if (estimate - previous_estimate).abs() <= ARC_LENGTH_REL_TOL * estimate.abs()
                || n >= ARC_LENGTH_MAX_CHORDS
            {
                return Ok(estimate);
            }
            previous_estimate = estimate;
            coarse = fine;
        }
    }

    /// Tolerance band `q_factor * sigma[segment]`.
    pub fn segment_tolerance(&self, segment: usize) -> Result<f64> {
        self.check_segment(segment)?;
        Ok(self.q_factor * self.sigma[segment])
    }

    /// Unit normal (tangent turned clockwise) at `t`, falling back to the
    /// chord between the segment's inner control points when the tangent
    /// vanishes.
    pub fn normal(&self, segment: usize, t: f64) -> Result<Vec2> {
        let c = self.controls(segment)?;
        let tangent = blend(&c, basis_derivative(t))
            .try_normalize()
            .or_else(|| (c[2] - c[1]).try_normalize())
            .unwrap_or(Vec2::X);
        Ok(-tangent.perp())
    }

    /// `r` parameter-uniform samples of the segment, each pushed along the
    /// local normal by an independent draw from `N(0, sigma²)`.
    ///
    /// The stream is a pure function of `(seed, segment)`.
    pub fn synthesize_rough_polyline(
        &self,
        segment: usize,
        r: usize,
        seed: u64,
    ) -> Result<Vec<Vec2>> {
        let smooth = self.sample_segment_uniform(segment, r)?;
        let sigma = self.sigma[segment];
        if sigma == 0.0 {
            return Ok(smooth);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(segment as u64);
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::domain(e.to_string()))?;
        smooth
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let t = k as f64 / (r - 1) as f64;
                let n = self.normal(segment, t)?;
                Ok(p + n * noise.sample(&mut rng))
            })
            .collect()
    }
}
