// Fit elementary boxes to two neighbouring segments and a super box around
// them, under both ways of choosing its axes.

use obb2d::multires::{ContourPyramid, SegmentId};
use obb2d::obbfit::{
    fit_elementary_box, fit_superbox, superbox_axes_elementary, superbox_axes_multires,
};
use obb2d::{generate_fixture, FitParams, FixtureKind, OrientedBox};

fn show(label: &str, b: &OrientedBox) {
    println!(
        "{label:>12}: center ({:8.3}, {:8.3}) axis ({:6.3}, {:6.3}) half-extents [{:.3}, {:.3}] area {:.3}",
        b.center.x, b.center.y, b.axes[0].x, b.axes[0].y, b.half_extents[0], b.half_extents[1], b.area()
    );
}

pub fn main() -> obb2d::Result<()> {
    let contour = generate_fixture(FixtureKind::Star, 16, 0.4, 3)?;
    let params = FitParams::default();

    let left = fit_elementary_box(&contour, 6, &params)?;
    let right = fit_elementary_box(&contour, 7, &params)?;
    show("segment 6", &left);
    show("segment 7", &right);

    let children = [left, right];
    let by_children = fit_superbox(superbox_axes_elementary(&children)?, &children)?;
    show("elementary", &by_children);

    let pyramid = ContourPyramid::build_with(&params.analysis, &contour, 2)?;
    let axes = superbox_axes_multires(&pyramid, SegmentId::new(3, 3), params.orientation_samples)?;
    let by_pyramid = fit_superbox(axes, &children)?;
    show("multires", &by_pyramid);

    for corner in children.iter().flat_map(OrientedBox::corners) {
        assert!(by_children.contains(corner, 1e-9) && by_pyramid.contains(corner, 1e-9));
    }
    Ok(())
}
