// Evaluate a closed cubic B-spline contour, measure its segments and draw a
// rough boundary around it.

use obb2d::contour::SamplingMode;
use obb2d::{ClosedContour, Vec2};

pub fn main() -> obb2d::Result<()> {
    let square = vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(4.0, 0.0),
        Vec2::new(4.0, 4.0),
        Vec2::new(0.0, 4.0),
        Vec2::new(-2.0, 2.0),
        Vec2::new(-2.0, 1.0),
        Vec2::new(-1.0, -1.0),
        Vec2::new(-0.5, -1.5),
    ];
    let contour = ClosedContour::with_uniform_sigma(square, 0.05, 3.0)?;
    println!(
        "{} segments, level {}",
        contour.segment_count(),
        contour.level()
    );

    for s in 0..contour.segment_count() {
        let start = contour.evaluate_segment(s, 0.0)?;
        println!(
            "segment {s}: starts at ({:7.4}, {:7.4}), length {:.6}, tolerance {:.3}",
            start.x,
            start.y,
            contour.segment_arc_length(s)?,
            contour.segment_tolerance(s)?
        );
    }

    let by_param = contour.sample_segment(2, 5, SamplingMode::Parameter)?;
    let by_length = contour.sample_segment(2, 5, SamplingMode::ArcLength)?;
    println!("segment 2, parameter vs arc-length samples:");
    for (a, b) in by_param.iter().zip(&by_length) {
        println!("  ({:7.4}, {:7.4})   ({:7.4}, {:7.4})", a.x, a.y, b.x, b.y);
    }

    let rough = contour.synthesize_rough_polyline(0, 8, 42)?;
    let smooth = contour.sample_segment_uniform(0, 8)?;
    let worst = rough
        .iter()
        .zip(&smooth)
        .map(|(r, s)| r.distance(*s))
        .fold(0.0, f64::max);
    println!("largest rough offset on segment 0: {worst:.4}");
    Ok(())
}
