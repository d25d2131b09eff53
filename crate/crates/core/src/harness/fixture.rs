//! Parameterised closed-contour generators.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contour::{ClosedContour, DEFAULT_Q_FACTOR};
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Mean radius of generated contours, in world units.
pub const FIXTURE_RADIUS: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKind {
    /// Smooth low-frequency wobble.
    Blob,
    /// Rounded teeth around a disc.
    Gear,
    /// Five lobes.
    Star,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 3] = [FixtureKind::Blob, FixtureKind::Gear, FixtureKind::Star];
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureKind::Blob => "blob",
            FixtureKind::Gear => "gear",
            FixtureKind::Star => "star",
        })
    }
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blob" => Ok(FixtureKind::Blob),
            "gear" => Ok(FixtureKind::Gear),
            "star" => Ok(FixtureKind::Star),
            other => Err(Error::domain(format!("unknown fixture kind {other:?}"))),
        }
    }
}

/// Everything needed to regenerate a fixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    pub m: usize,
    #[serde(default)]
    pub roughness: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    FIXTURE_RADIUS
}

impl FixtureSpec {
    pub fn new(kind: FixtureKind, m: usize, roughness: f64, seed: u64) -> Self {
        FixtureSpec {
            kind,
            m,
            roughness,
            seed,
            radius: FIXTURE_RADIUS,
        }
    }

    pub fn generate(&self) -> Result<ClosedContour> {
        generate_fixture_scaled(self.kind, self.m, self.roughness, self.seed, self.radius)
    }
}

/// Deterministic contour of `m` control points sampled from a radial
/// function `ρ(θ) = R (1 + Σ harmonics)` at equally spaced angles.
pub fn generate_fixture(
    kind: FixtureKind,
    m: usize,
    roughness: f64,
    seed: u64,
) -> Result<ClosedContour> {
    generate_fixture_scaled(kind, m, roughness, seed, FIXTURE_RADIUS)
}

pub fn generate_fixture_scaled(
    kind: FixtureKind,
    m: usize,
    roughness: f64,
    seed: u64,
    radius: f64,
) -> Result<ClosedContour> {
    if m < 8 || !m.is_power_of_two() {
        return Err(Error::domain(format!(
            "fixture size must be a power of two >= 8, got {m}"
        )));
    }
    if !(roughness.is_finite() && roughness >= 0.0) {
        return Err(Error::domain(format!(
            "roughness must be >= 0, got {roughness}"
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spin = rng.random_range(0.0..TAU);

    // (harmonic, amplitude, phase)
    let mut terms: Vec<(f64, f64, f64)> = Vec::new();
    let mut squareness = None;
    match kind {
        FixtureKind::Blob => {
            for k in 2..=5 {
                let amp = rng.random_range(0.02..0.12) / (k as f64 - 1.0);
                terms.push((k as f64, amp, rng.random_range(0.0..TAU)));
            }
        }
        FixtureKind::Gear => {
            let teeth = (m / 32).clamp(3, 16) as f64;
            squareness = Some((teeth, rng.random_range(0.08..0.12)));
            terms.push((2.0, rng.random_range(0.0..0.03), rng.random_range(0.0..TAU)));
        }
        FixtureKind::Star => {
            terms.push((5.0, rng.random_range(0.3..0.4), rng.random_range(0.0..TAU)));
            terms.push((3.0, rng.random_range(0.0..0.04), rng.random_range(0.0..TAU)));
        }
    }

    let points = (0..m)
        .map(|i| {
            let theta = TAU * i as f64 / m as f64;
            let mut rho = 1.0;
            for &(k, amp, phase) in &terms {
                rho += amp * (k * theta + phase).cos();
            }
            if let Some((teeth, depth)) = squareness {
                rho += depth * (3.0 * (teeth * theta).sin()).tanh();
            }
            let a = theta + spin;
            Vec2::new(radius * rho * a.cos(), radius * rho * a.sin())
        })
        .collect();
    ClosedContour::with_uniform_sigma(points, roughness, DEFAULT_Q_FACTOR)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = generate_fixture(FixtureKind::Blob, 64, 0.0, 1).unwrap();
        let b = generate_fixture(FixtureKind::Blob, 64, 0.0, 1).unwrap();
        let c = generate_fixture(FixtureKind::Blob, 64, 0.0, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate_fixture(FixtureKind::Gear, 4, 0.0, 1).is_err());
        assert!(generate_fixture(FixtureKind::Gear, 96, 0.0, 1).is_err());
        assert!(generate_fixture(FixtureKind::Gear, 64, -1.0, 1).is_err());
    }

    #[test]
    fn roughness_is_uniform() {
        let c = generate_fixture(FixtureKind::Star, 16, 0.25, 7).unwrap();
        assert!(c.sigma().iter().all(|s| *s == 0.25));
    }

    #[test]
    fn radius_stays_near_nominal() {
        for kind in FixtureKind::ALL {
            let c = generate_fixture(kind, 128, 0.0, 3).unwrap();
            for p in c.control_points() {
                let r = p.norm();
                assert!(
                    r > 0.5 * FIXTURE_RADIUS && r < 1.5 * FIXTURE_RADIUS,
                    "{kind}: {r}"
                );
            }
        }
    }
}
