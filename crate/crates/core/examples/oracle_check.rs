// Compare tree-based detection with an all-pairs segment check on random
// small scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use obb2d::harness::run_oracle_check;
use obb2d::{generate_fixture, FixtureKind, Method, RigidPose, Scene, Vec2};

pub fn main() -> obb2d::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut found, mut missed) = (0, 0);
    for i in 0..20 {
        let contours = (0..3)
            .map(|_| {
                let kind = FixtureKind::ALL[rng.random_range(0..3)];
                generate_fixture(kind, 32, 0.0, rng.random())
            })
            .collect::<obb2d::Result<Vec<_>>>()?;
        let poses = (0..3)
            .map(|_| {
                RigidPose::new(
                    rng.random_range(0.0..6.3),
                    Vec2::new(rng.random_range(0.0..250.0), rng.random_range(0.0..250.0)),
                )
            })
            .collect();
        let scene = Scene::new(format!("random-{i}"), contours, poses)?;
        for method in Method::ALL {
            let report = run_oracle_check(&scene, method, &scene.poses)?;
            found += report.tree_contacts;
            missed += report.missing.len();
        }
    }
    println!("tree contacts {found}, missed {missed}");
    Ok(())
}
