// Build box trees for the three fixture families and compare the summed box
// area per level under the two methods.

use obb2d::{generate_fixture, BoxTree, FitParams, FixtureKind, Method};

pub fn main() -> obb2d::Result<()> {
    let params = FitParams::default();
    for (kind, seed) in FixtureKind::ALL.into_iter().zip(1..) {
        let contour = generate_fixture(kind, 512, 0.0, seed)?;
        let elem = BoxTree::from_contour(&contour, Method::Elementary, &params)?;
        let multi = BoxTree::from_contour(&contour, Method::Multiresolution, &params)?;
        println!("{kind} (seed {seed}): {} boxes per tree", elem.node_count());
        println!("  level  elementary    multires   ratio");
        for (level, (e, m)) in elem
            .area_by_level()
            .iter()
            .zip(multi.area_by_level())
            .enumerate()
        {
            println!("  {level:5} {e:11.2} {m:11.2} {:7.4}", m / e);
        }
    }
    Ok(())
}
