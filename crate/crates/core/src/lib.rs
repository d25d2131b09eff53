//! Interference detection for 2D objects bounded by closed cubic B-spline
//! contours with stochastic roughness.
//!
//! Each contour is covered by a binary tree of oriented boxes. Leaves bound
//! single curve segments widened by their roughness tolerance; internal
//! boxes cover their two children and take their orientation either from
//! the elementary boxes underneath or from a coarser version of the contour
//! ([`multires`]). Two placed trees are compared with separating-axis tests
//! while descending from the roots, and surviving leaf pairs are verified
//! numerically on the curves themselves.
//!
//! ```
//! use obb2d::{generate_fixture, BoxTree, Body, FixtureKind, FitParams, Method, RigidPose, Vec2};
//! use obb2d::detect::{detect_pair, DetectParams};
//!
//! let a = generate_fixture(FixtureKind::Blob, 64, 0.0, 1).unwrap();
//! let b = generate_fixture(FixtureKind::Star, 64, 0.0, 2).unwrap();
//! let ta = BoxTree::from_contour(&a, Method::Multiresolution, &FitParams::default()).unwrap();
//! let tb = BoxTree::from_contour(&b, Method::Multiresolution, &FitParams::default()).unwrap();
//! let report = detect_pair(
//!     &Body::new(&ta, &a, RigidPose::IDENTITY),
//!     &Body::new(&tb, &b, RigidPose::translation(Vec2::new(150.0, 0.0))),
//!     &DetectParams::default(),
//! );
//! assert!(report.boxes_tested >= 1);
//! ```

pub mod boxtree;
pub mod contour;
pub mod detect;
mod error;
pub mod geom;
pub mod harness;
pub mod multires;
pub mod obbfit;

pub use boxtree::{BoxTree, Method};
pub use contour::{ClosedContour, SamplingMode};
pub use detect::{boxes_overlap, Body, InterferenceReport, Status};
pub use error::{Error, Result};
pub use geom::{RigidPose, Vec2};
pub use harness::{generate_fixture, FixtureKind, Scene};
pub use multires::{ContourPyramid, SegmentId};
pub use obbfit::{FitParams, OrientedBox};
