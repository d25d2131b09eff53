// Coarsen a fixture contour level by level with both analysis filters and
// compare how far each coarse curve drifts from the original.

use obb2d::multires::{AnalysisKind, ContourPyramid, SegmentId};
use obb2d::{generate_fixture, FixtureKind};

pub fn main() -> obb2d::Result<()> {
    let contour = generate_fixture(FixtureKind::Blob, 512, 0.0, 1)?;
    for kind in [AnalysisKind::Averaging, AnalysisKind::LeastSquares] {
        let pyramid = ContourPyramid::build_with(&kind, &contour, 2)?;
        println!("{kind:?}");
        for (level, points) in pyramid.levels() {
            // each coarse segment covers a block of fine segments; compare midpoints
            let width = contour.segment_count() >> level;
            let drift = (0..points.len())
                .map(|i| {
                    let coarse = pyramid.evaluate(SegmentId::new(level, i), 0.5).unwrap();
                    let fine_seg = i * width + width / 2;
                    let t = if width == 1 { 0.5 } else { 0.0 };
                    coarse.distance(contour.evaluate_segment(fine_seg, t).unwrap())
                })
                .fold(0.0, f64::max);
            println!(
                "  level {level}: {:4} points, max drift {drift:8.4}",
                points.len()
            );
        }
    }
    Ok(())
}
