// Separating-axis overlap tests on hand-placed boxes.

use std::f64::consts::FRAC_PI_4;

use obb2d::detect::boxes_overlap_eps;
use obb2d::{boxes_overlap, OrientedBox, Vec2};

pub fn main() -> obb2d::Result<()> {
    let base = OrientedBox::axis_aligned(Vec2::ZERO, [2.0, 1.0]);
    let cases = [
        (
            "clear gap",
            OrientedBox::axis_aligned(Vec2::new(5.0, 0.0), [1.0, 1.0]),
        ),
        (
            "shared edge",
            OrientedBox::axis_aligned(Vec2::new(3.0, 0.0), [1.0, 1.0]),
        ),
        (
            "diamond at corner",
            OrientedBox::rotated(Vec2::new(3.0, 2.0), FRAC_PI_4, [0.7, 0.7]),
        ),
        (
            "near miss",
            OrientedBox::axis_aligned(Vec2::new(3.1, 0.0), [1.0, 1.0]),
        ),
        (
            "crossing bar",
            OrientedBox::rotated(Vec2::new(0.5, 0.0), 1.2, [3.0, 0.2]),
        ),
        (
            "nested",
            OrientedBox::rotated(Vec2::new(0.3, 0.1), 0.4, [0.3, 0.2]),
        ),
    ];
    for (label, other) in &cases {
        println!(
            "{label:>18}: overlap {:5}  with 0.2 slack {:5}",
            boxes_overlap(&base, other),
            boxes_overlap_eps(&base, other, 0.2)
        );
    }
    Ok(())
}
