// Place two objects so that they cross, then run broad and narrow phase
// and list the touching segment pairs.

use obb2d::detect::{detect_pair, Body, DetectParams};
use obb2d::{generate_fixture, BoxTree, FitParams, FixtureKind, Method, RigidPose, Vec2};

pub fn main() -> obb2d::Result<()> {
    let gear = generate_fixture(FixtureKind::Gear, 128, 0.0, 2)?;
    let star = generate_fixture(FixtureKind::Star, 128, 0.2, 5)?;
    let params = FitParams::default();
    let gear_tree = BoxTree::from_contour(&gear, Method::Multiresolution, &params)?;
    let star_tree = BoxTree::from_contour(&star, Method::Multiresolution, &params)?;

    for dx in [260.0, 195.0, 170.0] {
        let a = Body::new(&gear_tree, &gear, RigidPose::IDENTITY);
        let b = Body::new(&star_tree, &star, RigidPose::new(0.4, Vec2::new(dx, 10.0)));
        let report = detect_pair(&a, &b, &DetectParams::from_env()?);
        println!(
            "offset {dx}: {:?}, {} boxes tested, {} candidate pairs, {} contacts",
            report.status,
            report.boxes_tested,
            report.candidate_pairs.len(),
            report.contacts.len()
        );
        for c in report.contacts.iter().take(4) {
            println!(
                "    gear segment {:3} / star segment {:3} near ({:.2}, {:.2}), distance {:.2e}",
                c.segment_a, c.segment_b, c.point_a.x, c.point_a.y, c.distance
            );
        }
    }
    Ok(())
}
