use proptest::prelude::*;

use obb2d::boxtree::{node_index, node_segment};
use obb2d::detect::{detect_pair, Body, DetectParams};
use obb2d::multires::{AnalysisKind, ContourPyramid};
use obb2d::obbfit::{principal_axes, Covariance2};
use obb2d::{BoxTree, ClosedContour, FitParams, Method, RigidPose, Vec2};

fn contour(level: u32) -> impl Strategy<Value = ClosedContour> {
    let m = 1usize << level;
    prop::collection::vec((0.6f64..1.4, -0.3f64..0.3), m).prop_map(move |jitter| {
        let pts = jitter
            .iter()
            .enumerate()
            .map(|(k, (r, da))| {
                let a = std::f64::consts::TAU * (k as f64 + da) / m as f64;
                Vec2::new(a.cos(), a.sin()) * (50.0 * r)
            })
            .collect();
        ClosedContour::smooth(pts).unwrap()
    })
}

fn any_contour() -> impl Strategy<Value = ClosedContour> {
    (2u32..=5).prop_flat_map(contour)
}

fn pose() -> impl Strategy<Value = RigidPose> {
    (-3.2f64..3.2, -200.0f64..200.0, -200.0f64..200.0)
        .prop_map(|(a, x, y)| RigidPose::new(a, Vec2::new(x, y)))
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Elementary), Just(Method::Multiresolution)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segments_join_up(c in any_contour()) {
        let m = c.segment_count();
        for s in 0..m {
            let end = c.evaluate_segment(s, 1.0).unwrap();
            let start = c.evaluate_segment((s + 1) % m, 0.0).unwrap();
            prop_assert!(end.distance(start) < 1e-9);
        }
    }

    #[test]
    fn evaluation_is_rigid_equivariant(c in any_contour(), p in pose(), t in 0.0f64..=1.0) {
        let moved = c.transformed(&p);
        for s in 0..c.segment_count() {
            let a = moved.evaluate_segment(s, t).unwrap();
            let b = p.apply(c.evaluate_segment(s, t).unwrap());
            prop_assert!(a.distance(b) < 1e-9);
        }
    }

    #[test]
    fn points_stay_in_control_bounds(c in any_contour(), t in 0.0f64..=1.0) {
        for s in 0..c.segment_count() {
            let q = c.evaluate_segment(s, t).unwrap();
            let ctl = c.controls(s).unwrap();
            let lo = ctl.iter().fold(Vec2::new(f64::INFINITY, f64::INFINITY), |a, v| Vec2::new(a.x.min(v.x), a.y.min(v.y)));
            let hi = ctl.iter().fold(Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, v| Vec2::new(a.x.max(v.x), a.y.max(v.y)));
            prop_assert!(q.x >= lo.x - 1e-9 && q.x <= hi.x + 1e-9 && q.y >= lo.y - 1e-9 && q.y <= hi.y + 1e-9);
        }
    }

    #[test]
    fn pyramid_commutes_with_poses(c in (3u32..=5).prop_flat_map(contour), p in pose()) {
        for kind in [AnalysisKind::Averaging, AnalysisKind::LeastSquares] {
            let a = ContourPyramid::build_with(&kind, &c.transformed(&p), 2).unwrap();
            let b = ContourPyramid::build_with(&kind, &c, 2).unwrap();
            for ((la, pa), (lb, pb)) in a.levels().zip(b.levels()) {
                prop_assert_eq!(la, lb);
                prop_assert_eq!(pa.len(), 1usize << la);
                for (x, y) in pa.iter().zip(pb) {
                    prop_assert!(x.distance(p.apply(*y)) < 1e-8);
                }
            }
        }
    }

    #[test]
    fn node_indexing_is_a_bijection(k in 0usize..1 << 20) {
        let id = node_segment(k);
        prop_assert!(id.is_valid());
        prop_assert_eq!(node_index(id.level, id.index), k);
    }

    #[test]
    fn principal_axes_are_orthonormal(xx in 0.0f64..10.0, yy in 0.0f64..10.0, xy in -5.0f64..5.0) {
        let axes = principal_axes(&Covariance2 { xx, xy, yy, mean: Vec2::ZERO }, Vec2::new(1.0, 2.0));
        prop_assert!((axes.axis1.norm() - 1.0).abs() < 1e-12);
        prop_assert!((axes.axis2.norm() - 1.0).abs() < 1e-12);
        prop_assert!(axes.axis1.dot(axes.axis2).abs() < 1e-12);
        prop_assert!(axes.axis1.cross(axes.axis2) > 0.0);
    }

    #[test]
    fn box_fitting_is_rigid_equivariant(c in any_contour(), p in pose(), m in method()) {
        let fit = FitParams::default();
        let a = BoxTree::from_contour(&c.transformed(&p), m, &fit).unwrap();
        let b = BoxTree::from_contour(&c, m, &fit).unwrap();
        for k in 0..a.node_count() {
            let (x, y) = (&a.nodes()[k], b.world_box(k, &p).unwrap());
            prop_assert!((x.area() - y.area()).abs() <= 1e-6 * y.area().max(1.0));
            prop_assert!(x.center.distance(y.center) < 1e-6);
        }
    }

    #[test]
    fn common_pose_does_not_change_contacts(
        a in (3u32..=4).prop_flat_map(contour),
        b in (3u32..=4).prop_flat_map(contour),
        offset in (40.0f64..140.0, -40.0f64..40.0, -3.0f64..3.0),
        common in pose(),
        m in method(),
    ) {
        let fit = FitParams::default();
        let (ta, tb) = (BoxTree::from_contour(&a, m, &fit).unwrap(), BoxTree::from_contour(&b, m, &fit).unwrap());
        let rel = RigidPose::new(offset.2, Vec2::new(offset.0, offset.1));
        let params = DetectParams::default();
        let here = detect_pair(&Body::new(&ta, &a, RigidPose::IDENTITY), &Body::new(&tb, &b, rel), &params);
        let there = detect_pair(&Body::new(&ta, &a, common), &Body::new(&tb, &b, common.compose(&rel)), &params);
        let pairs = |r: &obb2d::InterferenceReport| r.contacts.iter().map(|c| (c.segment_a, c.segment_b)).collect::<Vec<_>>();
        prop_assert_eq!(pairs(&here), pairs(&there));
        prop_assert_eq!(here.status, there.status);
    }

    #[test]
    fn roughness_only_grows_leaves(c in any_contour(), sigma in 0.0f64..2.0, extra in 0.01f64..1.0) {
        let pts = c.control_points().to_vec();
        let fit = FitParams::default();
        let lo = BoxTree::from_contour(&ClosedContour::with_uniform_sigma(pts.clone(), sigma, 3.0).unwrap(), Method::Elementary, &fit).unwrap();
        let hi = BoxTree::from_contour(&ClosedContour::with_uniform_sigma(pts, sigma + extra, 3.0).unwrap(), Method::Elementary, &fit).unwrap();
        for s in 0..c.segment_count() {
            for axis in 0..2 {
                prop_assert!(hi.leaf(s).half_extents[axis] > lo.leaf(s).half_extents[axis]);
            }
        }
    }

    #[test]
    fn counters_are_bounded(
        a in (2u32..=4).prop_flat_map(contour),
        b in (2u32..=4).prop_flat_map(contour),
        p in pose(),
        m in method(),
    ) {
        let fit = FitParams::default();
        let (ta, tb) = (BoxTree::from_contour(&a, m, &fit).unwrap(), BoxTree::from_contour(&b, m, &fit).unwrap());
        let r = detect_pair(&Body::new(&ta, &a, RigidPose::IDENTITY), &Body::new(&tb, &b, p), &DetectParams::default());
        prop_assert!(r.boxes_tested >= 1);
        prop_assert!(r.boxes_tested <= ta.node_count() * tb.node_count());
        prop_assert!(r.candidate_pairs.len() <= a.segment_count() * b.segment_count());
        prop_assert!(r.contacts.len() <= r.candidate_pairs.len());
    }
}
